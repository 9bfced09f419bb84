use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use screenpath::design::{half_fraction_ssd, plackett_burman, ModelMatrix};
use screenpath::gds::{
    gds_select, ols_refit_ic, select_from_path, simulate_gds, solve_path, Aggregate, GammaRule, GdsConfig,
    Metrics, RefitOutcome, Selection,
};
use screenpath::simulate::{generate_replicates, preset};
use screenpath::solvers::{Estimator, GridSpec};

fn ssd() -> ModelMatrix {
    let d = half_fraction_ssd(28).unwrap().truncate_factors(24).unwrap();
    ModelMatrix::build(&d, false, true, true).unwrap()
}

fn noise(n: usize, seed: u64) -> DVector<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let y = DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
    let mean = y.mean();
    y.add_scalar(-mean)
}

fn fitted(r: RefitOutcome) -> screenpath::gds::Refit {
    match r {
        RefitOutcome::Fitted(f) => f,
        RefitOutcome::Skipped(why) => panic!("skipped: {why}"),
    }
}

#[test]
fn empty_support_is_intercept_only() {
    let m = ssd();
    let y = noise(14, 1).add_scalar(5.0);
    let f = fitted(ols_refit_ic(&m, &y, &[], Selection::Bic).unwrap());
    let ybar = y.mean();
    let rss: f64 = y.iter().map(|v| (v - ybar).powi(2)).sum();
    assert!((f.rss - rss).abs() < 1e-10);
    assert!((f.intercept - ybar).abs() < 1e-12);
}

#[test]
fn bic_matches_hand_formula_for_two_terms() {
    let m = ssd();
    let y = noise(14, 2) + m.columns().column(3) * 2.0 - m.columns().column(9);
    let f = fitted(ols_refit_ic(&m, &y, &[3, 9], Selection::Bic).unwrap());
    // normal equations on [1 | x3 | x9]
    let mut z = DMatrix::from_element(14, 3, 1.0);
    z.set_column(1, &m.columns().column(3));
    z.set_column(2, &m.columns().column(9));
    let theta = (z.transpose() * &z).lu().solve(&(z.transpose() * &y)).unwrap();
    let rss = (&y - &z * theta).norm_squared();
    let bic = 14.0 * (rss / 14.0).ln() + 3.0 * 14f64.ln();
    assert!((f.ic - bic).abs() < 1e-9, "{} vs {}", f.ic, bic);
    let aicc = fitted(ols_refit_ic(&m, &y, &[3, 9], Selection::Aicc).unwrap()).ic;
    let want = 14.0 * (rss / 14.0).ln() + 2.0 * 4.0 + 2.0 * 4.0 * 5.0 / 9.0;
    assert!((aicc - want).abs() < 1e-9);
}

#[test]
fn exact_fit_is_floored() {
    let m = ssd();
    let y = m.columns().column(0) * 3.0;
    let f = fitted(ols_refit_ic(&m, &y, &[0], Selection::Bic).unwrap());
    assert_eq!(f.rss, 1e-12 * y.norm_squared());
    assert!(f.ic.is_finite());
}

#[test]
fn oversized_or_aliased_supports_are_skipped() {
    let m = ssd();
    let y = noise(14, 3);
    let big: Vec<usize> = (0..13).collect();
    assert!(matches!(ols_refit_ic(&m, &y, &big, Selection::Bic).unwrap(), RefitOutcome::Skipped(_)));
    let aicc_edge: Vec<usize> = (0..11).collect();
    assert!(matches!(ols_refit_ic(&m, &y, &aicc_edge, Selection::Aicc).unwrap(), RefitOutcome::Skipped(_)));
    // a duplicated column is rank deficient
    let mut cols = m.columns().clone().insert_column(24, 0.0);
    let c0 = cols.column(0).into_owned();
    cols.set_column(24, &c0);
    let dup = ModelMatrix::from_columns("dup", cols);
    assert!(matches!(ols_refit_ic(&dup, &y, &[0, 24], Selection::Bic).unwrap(), RefitOutcome::Skipped(_)));
}

#[test]
fn identical_supports_share_ic() {
    let m = ssd();
    let y = noise(14, 4) + m.columns().column(5) * 3.0;
    let path = solve_path(&m, &y, Estimator::Dantzig, GridSpec::Fine100).unwrap().unwrap();
    let supports = screenpath::gds::threshold(&path, GammaRule::Fixed(1.0));
    let mut seen = std::collections::HashMap::new();
    for s in supports {
        let ic = fitted(ols_refit_ic(&m, &y, &s, Selection::Bic).unwrap()).ic;
        if let Some(prev) = seen.insert(s, ic) {
            assert_eq!(prev, ic);
        }
    }
    let fit = select_from_path(&m, &y, &path, GammaRule::Fixed(1.0), Selection::Bic).unwrap();
    assert!(fit.candidates < 100);
}

#[test]
fn extreme_signal_on_pb12_recovers_the_active_effect() {
    let d = plackett_burman(12).unwrap();
    let m = ModelMatrix::build(&d, false, true, true).unwrap();
    let scn = preset("pb12_a1_b10").unwrap();
    let cfg = GdsConfig {
        grid: GridSpec::Fine100,
        gamma: GammaRule::Sigma(1.0),
        selection: Selection::Bic,
        estimator: Estimator::Dantzig,
    };
    let out = simulate_gds(&m, &scn, &[cfg]).unwrap().remove(0);
    let reps = generate_replicates(&m, &scn).unwrap();
    let exact = out.iter().zip(&reps).filter(|(o, r)| o.selected == r.support.active()).count();
    assert!(exact as f64 / 500.0 >= 0.99, "exact recoveries {exact}/500");
}

#[test]
fn pure_noise_selects_little() {
    let m = ssd();
    let cfg = GdsConfig {
        grid: GridSpec::Coarse12,
        gamma: GammaRule::Fixed(1.5),
        selection: Selection::Bic,
        estimator: Estimator::Dantzig,
    };
    let mut type1 = 0.0;
    for s in 0..50 {
        let y = noise(14, 100 + s) * 0.2;
        let fit = gds_select(&m, &y, &cfg).unwrap();
        type1 += Metrics::new(&fit.selected, &[], 24).type1;
    }
    assert!(type1 / 50.0 < 0.05, "mean type1 {}", type1 / 50.0);
}

#[test]
fn zero_response_gives_empty_model() {
    let m = ssd();
    let cfg = GdsConfig {
        grid: GridSpec::Fine100,
        gamma: GammaRule::DataDriven(0.1),
        selection: Selection::Aicc,
        estimator: Estimator::Dantzig,
    };
    let fit = gds_select(&m, &DVector::zeros(14), &cfg).unwrap();
    assert!(fit.selected.is_empty());
}

#[test]
fn marley_woods_preset_runs_end_to_end() {
    let m = ssd();
    let mut scn = preset("marley_woods_14_24_a6_b3").unwrap();
    scn.niter = 40;
    let configs: Vec<GdsConfig> = [GridSpec::Fine100, GridSpec::Coarse12]
        .into_iter()
        .flat_map(|grid| {
            [Selection::Aicc, Selection::Bic].into_iter().map(move |selection| GdsConfig {
                grid,
                gamma: GammaRule::DataDriven(0.1),
                selection,
                estimator: Estimator::Dantzig,
            })
        })
        .collect();
    let out = simulate_gds(&m, &scn, &configs).unwrap();
    assert_eq!(out.len(), 4);
    for run in &out {
        assert_eq!(run.len(), 40);
        let agg = Aggregate::of(run);
        for v in [agg.power.mean, agg.type1.mean, agg.fdr.mean] {
            assert!((0.0..=1.0).contains(&v));
        }
    }
    let diff = Aggregate::paired_difference(&out[0], &out[2]);
    assert!(diff.power.se.is_finite());
}

#[test]
fn lasso_pipeline_is_available() {
    let m = ssd();
    let y = noise(14, 8) + m.columns().column(2) * 4.0;
    let cfg = GdsConfig {
        grid: GridSpec::Log { d: 50, min_ratio: 1e-3 },
        gamma: GammaRule::Fixed(1.0),
        selection: Selection::Bic,
        estimator: Estimator::Lasso,
    };
    let fit = gds_select(&m, &y, &cfg).unwrap();
    assert!(fit.selected.contains(&2));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn metrics_stay_in_unit_interval(
        sel in proptest::collection::btree_set(0usize..24, 0..10),
        truth in proptest::collection::btree_set(0usize..24, 0..10),
    ) {
        let sel: Vec<usize> = sel.into_iter().collect();
        let truth: Vec<usize> = truth.into_iter().collect();
        let m = Metrics::new(&sel, &truth, 24);
        for v in [m.power, m.type1, m.fdr] {
            prop_assert!((0.0..=1.0).contains(&v));
        }
        if sel.iter().all(|j| truth.contains(j)) {
            prop_assert_eq!(m.fdr, 0.0);
        }
    }
}
