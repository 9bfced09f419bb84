//! Scenario presets shipped under `presets/`.

use super::ScreeningScenario;
use crate::error::{Error, Result};

const PRESETS: &[(&str, &str)] = &[
    ("marley_woods_12_26_a3_b5", include_str!("../../presets/marley_woods_12_26_a3_b5.json")),
    ("marley_woods_12_26_a4_b4", include_str!("../../presets/marley_woods_12_26_a4_b4.json")),
    ("marley_woods_12_26_a6_b3", include_str!("../../presets/marley_woods_12_26_a6_b3.json")),
    ("marley_woods_12_26_a9_mixed", include_str!("../../presets/marley_woods_12_26_a9_mixed.json")),
    ("marley_woods_14_24_a3_b5", include_str!("../../presets/marley_woods_14_24_a3_b5.json")),
    ("marley_woods_14_24_a4_b4", include_str!("../../presets/marley_woods_14_24_a4_b4.json")),
    ("marley_woods_14_24_a6_b3", include_str!("../../presets/marley_woods_14_24_a6_b3.json")),
    ("marley_woods_14_24_a9_mixed", include_str!("../../presets/marley_woods_14_24_a9_mixed.json")),
    ("marley_woods_18_22_a3_b5", include_str!("../../presets/marley_woods_18_22_a3_b5.json")),
    ("marley_woods_18_22_a4_b4", include_str!("../../presets/marley_woods_18_22_a4_b4.json")),
    ("marley_woods_18_22_a6_b3", include_str!("../../presets/marley_woods_18_22_a6_b3.json")),
    ("marley_woods_18_22_a9_mixed", include_str!("../../presets/marley_woods_18_22_a9_mixed.json")),
    ("singh_14_24_a4_sn3", include_str!("../../presets/singh_14_24_a4_sn3.json")),
    ("singh_14_24_a7_sn3", include_str!("../../presets/singh_14_24_a7_sn3.json")),
    ("singh_14_24_a11_sn3", include_str!("../../presets/singh_14_24_a11_sn3.json")),
    ("mee_20_7_2fi_small_a2_g1", include_str!("../../presets/mee_20_7_2fi_small_a2_g1.json")),
    ("mee_20_7_2fi_small_a2_g2", include_str!("../../presets/mee_20_7_2fi_small_a2_g2.json")),
    ("mee_20_7_2fi_small_a2_g3", include_str!("../../presets/mee_20_7_2fi_small_a2_g3.json")),
    ("mee_20_7_2fi_small_a2_g4", include_str!("../../presets/mee_20_7_2fi_small_a2_g4.json")),
    ("mee_20_7_2fi_small_a2_g5", include_str!("../../presets/mee_20_7_2fi_small_a2_g5.json")),
    ("mee_20_7_2fi_small_a2_g6", include_str!("../../presets/mee_20_7_2fi_small_a2_g6.json")),
    ("mee_20_7_2fi_small_a2_g7", include_str!("../../presets/mee_20_7_2fi_small_a2_g7.json")),
    ("mee_20_7_2fi_small_a4_g1", include_str!("../../presets/mee_20_7_2fi_small_a4_g1.json")),
    ("mee_20_7_2fi_small_a4_g2", include_str!("../../presets/mee_20_7_2fi_small_a4_g2.json")),
    ("mee_20_7_2fi_small_a4_g3", include_str!("../../presets/mee_20_7_2fi_small_a4_g3.json")),
    ("mee_20_7_2fi_small_a4_g4", include_str!("../../presets/mee_20_7_2fi_small_a4_g4.json")),
    ("mee_20_7_2fi_small_a4_g5", include_str!("../../presets/mee_20_7_2fi_small_a4_g5.json")),
    ("mee_20_7_2fi_small_a4_g6", include_str!("../../presets/mee_20_7_2fi_small_a4_g6.json")),
    ("mee_20_7_2fi_small_a4_g7", include_str!("../../presets/mee_20_7_2fi_small_a4_g7.json")),
    ("mee_20_7_2fi_equal_a2_g1", include_str!("../../presets/mee_20_7_2fi_equal_a2_g1.json")),
    ("mee_20_7_2fi_equal_a2_g2", include_str!("../../presets/mee_20_7_2fi_equal_a2_g2.json")),
    ("mee_20_7_2fi_equal_a2_g3", include_str!("../../presets/mee_20_7_2fi_equal_a2_g3.json")),
    ("mee_20_7_2fi_equal_a2_g4", include_str!("../../presets/mee_20_7_2fi_equal_a2_g4.json")),
    ("mee_20_7_2fi_equal_a2_g5", include_str!("../../presets/mee_20_7_2fi_equal_a2_g5.json")),
    ("mee_20_7_2fi_equal_a2_g6", include_str!("../../presets/mee_20_7_2fi_equal_a2_g6.json")),
    ("mee_20_7_2fi_equal_a2_g7", include_str!("../../presets/mee_20_7_2fi_equal_a2_g7.json")),
    ("mee_20_7_2fi_equal_a4_g1", include_str!("../../presets/mee_20_7_2fi_equal_a4_g1.json")),
    ("mee_20_7_2fi_equal_a4_g2", include_str!("../../presets/mee_20_7_2fi_equal_a4_g2.json")),
    ("mee_20_7_2fi_equal_a4_g3", include_str!("../../presets/mee_20_7_2fi_equal_a4_g3.json")),
    ("mee_20_7_2fi_equal_a4_g4", include_str!("../../presets/mee_20_7_2fi_equal_a4_g4.json")),
    ("mee_20_7_2fi_equal_a4_g5", include_str!("../../presets/mee_20_7_2fi_equal_a4_g5.json")),
    ("mee_20_7_2fi_equal_a4_g6", include_str!("../../presets/mee_20_7_2fi_equal_a4_g6.json")),
    ("mee_20_7_2fi_equal_a4_g7", include_str!("../../presets/mee_20_7_2fi_equal_a4_g7.json")),
    ("lasso_split_20_7_a2_g1", include_str!("../../presets/lasso_split_20_7_a2_g1.json")),
    ("lasso_split_20_7_a2_g2", include_str!("../../presets/lasso_split_20_7_a2_g2.json")),
    ("lasso_split_20_7_a2_g3", include_str!("../../presets/lasso_split_20_7_a2_g3.json")),
    ("lasso_split_20_7_a2_g4", include_str!("../../presets/lasso_split_20_7_a2_g4.json")),
    ("lasso_split_20_7_a2_g5", include_str!("../../presets/lasso_split_20_7_a2_g5.json")),
    ("lasso_split_20_7_a2_g6", include_str!("../../presets/lasso_split_20_7_a2_g6.json")),
    ("lasso_split_20_7_a2_g7", include_str!("../../presets/lasso_split_20_7_a2_g7.json")),
    ("lasso_split_20_7_a4_g1", include_str!("../../presets/lasso_split_20_7_a4_g1.json")),
    ("lasso_split_20_7_a4_g2", include_str!("../../presets/lasso_split_20_7_a4_g2.json")),
    ("lasso_split_20_7_a4_g3", include_str!("../../presets/lasso_split_20_7_a4_g3.json")),
    ("lasso_split_20_7_a4_g4", include_str!("../../presets/lasso_split_20_7_a4_g4.json")),
    ("lasso_split_20_7_a4_g5", include_str!("../../presets/lasso_split_20_7_a4_g5.json")),
    ("lasso_split_20_7_a4_g6", include_str!("../../presets/lasso_split_20_7_a4_g6.json")),
    ("lasso_split_20_7_a4_g7", include_str!("../../presets/lasso_split_20_7_a4_g7.json")),
    ("pb12_a1_b10", include_str!("../../presets/pb12_a1_b10.json")),
];

pub fn preset_names() -> impl Iterator<Item = &'static str> {
    PRESETS.iter().map(|(name, _)| *name)
}

pub fn preset(name: &str) -> Result<ScreeningScenario> {
    let (_, text) = PRESETS
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| Error::config("scenario", format!("unknown preset `{name}`")))?;
    ScreeningScenario::from_json(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_preset_parses_under_its_own_name() {
        for name in preset_names() {
            let scn = preset(name).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert_eq!(scn.name, name);
        }
        assert!(preset("nope").is_err());
    }
}
