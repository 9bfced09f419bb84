use nalgebra::DMatrix;
use screenpath::design::{hadamard, plackett_burman, Design, ModelMatrix, Term};
use screenpath::rng::{substream, Domain};
use screenpath::simulate::{
    generate_replicates, preset, preset_names, replicate, BetaSpec, Heredity, ScreeningScenario, SignRule,
};

fn seven_factor_model() -> ModelMatrix {
    // 20 runs from a 20-run PB design, 7 factors, all 21 interactions
    let d = plackett_burman(20).unwrap().truncate_factors(7).unwrap();
    ModelMatrix::build(&d, true, true, true).unwrap()
}

fn scenario(a: usize, g: usize, heredity: Heredity, signs: SignRule, beta: &str) -> ScreeningScenario {
    ScreeningScenario {
        name: String::new(),
        description: String::new(),
        a,
        g,
        beta: beta.parse().unwrap(),
        tfi_beta: None,
        signs,
        heredity,
        sigma: 1.0,
        niter: 100,
        seed: 11,
    }
}

#[test]
fn weak_heredity_interactions_have_an_active_parent() {
    let m = seven_factor_model();
    let scn = scenario(2, 3, Heredity::Weak, SignRule::Random, "fixed:2");
    for i in 0..2000 {
        let mut rng = substream(5, Domain::Replicate, i);
        let s = scn.draw_support(&m, &mut rng).unwrap();
        let parents: Vec<usize> = s
            .active()
            .iter()
            .filter_map(|&t| match m.terms()[t] {
                Term::MainEffect(j) => Some(j),
                _ => None,
            })
            .collect();
        assert_eq!(parents.len(), 2);
        let fis: Vec<_> = s.active().iter().filter(|&&t| !m.terms()[t].is_main_effect()).collect();
        assert_eq!(fis.len(), 3);
        for &&t in &fis {
            let Term::Interaction(j, l) = m.terms()[t] else { unreachable!() };
            assert!(parents.contains(&j) || parents.contains(&l));
        }
    }
}

#[test]
fn weak_heredity_caps_g_at_pool_size() {
    let m = seven_factor_model();
    // one parent among 7 factors admits 6 interactions
    let scn = scenario(1, 9, Heredity::Weak, SignRule::Random, "fixed:2");
    assert_eq!(scn.effective_g(&m).unwrap(), 6);
    let r = replicate(&m, &scn, 0).unwrap();
    assert_eq!(r.support.len(), 7);
}

#[test]
fn weak_heredity_without_parents_is_rejected() {
    let scn = scenario(0, 1, Heredity::Weak, SignRule::Random, "fixed:2");
    assert!(scn.validate().is_err());
}

#[test]
fn interactions_need_an_interaction_model() {
    let d = plackett_burman(12).unwrap();
    let m = ModelMatrix::build(&d, false, true, true).unwrap();
    let scn = scenario(2, 1, Heredity::None, SignRule::Random, "fixed:2");
    assert!(replicate(&m, &scn, 0).is_err());
}

#[test]
fn unconstrained_interaction_draw_is_uniform() {
    let m = seven_factor_model();
    let scn = scenario(0, 1, Heredity::None, SignRule::KnownPositive, "fixed:1");
    let fis = m.interaction_indices();
    let mut counts = vec![0usize; fis.len()];
    let draws = 10_000;
    for i in 0..draws {
        let mut rng = substream(99, Domain::Replicate, i);
        let s = scn.draw_support(&m, &mut rng).unwrap();
        let t = s.active()[0];
        counts[fis.iter().position(|&f| f == t).unwrap()] += 1;
        assert_eq!(s.signs(), &[1]);
    }
    let expected = draws as f64 / fis.len() as f64;
    let chi2: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    // upper 0.001 point of chi-square with 20 degrees of freedom
    assert!(chi2 < 45.315, "chi2 = {chi2}, counts {counts:?}");
}

#[test]
fn magnitude_draws_follow_their_spec() {
    let mut rng = substream(3, Domain::BetaDraw, 0);
    let exp: BetaSpec = "exp:3".parse().unwrap();
    let e = exp.draw(10_000, &mut rng).unwrap();
    assert!(e.iter().all(|&v| v >= 3.0));
    let mean = e.iter().sum::<f64>() / e.len() as f64;
    assert!((mean - 4.0).abs() < 0.05, "Exp(1)+3 mean {mean}");

    let fixed: BetaSpec = "fixed:3.5".parse().unwrap();
    assert!(fixed.draw(20, &mut rng).unwrap().iter().all(|&v| v == 3.5));

    let set: BetaSpec = "set:2,2.5,3,3.5".parse().unwrap();
    let s = set.draw(10_000, &mut rng).unwrap();
    for v in [2.0, 2.5, 3.0, 3.5] {
        let f = s.iter().filter(|&&x| x == v).count() as f64 / 1e4;
        // four binomial standard errors at p = 1/4
        assert!((f - 0.25).abs() < 4.0 * (0.25f64 * 0.75 / 1e4).sqrt(), "{v}: {f}");
    }

    let nr: BetaSpec = "setnr:1,2,3".parse().unwrap();
    let mut d = nr.draw(3, &mut rng).unwrap();
    d.sort_by(f64::total_cmp);
    assert_eq!(d, vec![1.0, 2.0, 3.0]);
    assert!(nr.draw(4, &mut rng).is_err());
}

#[test]
fn replicates_do_not_depend_on_threads_or_batch() {
    let d = plackett_burman(12).unwrap();
    let m = ModelMatrix::build(&d, false, true, true).unwrap();
    let scn = scenario(3, 0, Heredity::None, SignRule::Random, "exp:2");
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| generate_replicates(&m, &scn).unwrap())
    };
    let one = run(1);
    let four = run(4);
    assert_eq!(one, four);
    for i in [0, 17, 99] {
        assert_eq!(replicate(&m, &scn, i).unwrap(), one[i]);
    }
}

#[test]
fn noise_variance_matches_sigma() {
    let d = plackett_burman(12).unwrap();
    let m = ModelMatrix::build(&d, false, true, true).unwrap();
    let mut scn = scenario(2, 0, Heredity::None, SignRule::Random, "fixed:3");
    scn.sigma = 2.0;
    scn.niter = 10_000;
    let reps = generate_replicates(&m, &scn).unwrap();
    // centering removes one degree of freedom
    let n = m.runs() as f64;
    let mut ss = 0.0;
    for r in &reps {
        let mu = m.columns() * &r.beta_full;
        let mu = mu.add_scalar(-mu.mean());
        ss += (&r.response - mu).norm_squared();
    }
    let var = ss / (reps.len() as f64 * (n - 1.0));
    assert!((var / 4.0 - 1.0).abs() < 0.05, "variance {var}");
}

#[test]
fn noiseless_response_is_centered_signal_and_ols_on_truth_is_exact() {
    let d = plackett_burman(12).unwrap();
    let m = ModelMatrix::build(&d, false, true, true).unwrap();
    let mut scn = scenario(3, 0, Heredity::None, SignRule::Random, "fixed:2");
    scn.sigma = 1e-8;
    let r = replicate(&m, &scn, 4).unwrap();
    let mu = m.columns() * &r.beta_full;
    let mu = mu.add_scalar(-mu.mean());
    assert!((&r.response - &mu).amax() < 1e-6);
    let xa = m.select(r.support.active());
    let fit = (xa.transpose() * &xa).lu().solve(&(xa.transpose() * &r.response)).unwrap();
    for (b, c) in fit.iter().zip(r.support.coefficients()) {
        assert!((b - c).abs() < 1e-6);
    }
}

#[test]
fn orthogonal_columns_with_all_interactions_partition_7_21() {
    let h = hadamard(8).unwrap();
    let d = Design::from_levels("h8", DMatrix::from(h.columns(1, 7))).unwrap();
    let m = ModelMatrix::build(&d, true, false, false).unwrap();
    assert_eq!(m.main_effect_indices().len(), 7);
    assert_eq!(m.interaction_indices().len(), 21);
}

#[test]
fn presets_match_quoted_cells() {
    let mw = preset("marley_woods_14_24_a6_b3").unwrap();
    assert_eq!((mw.a, mw.beta.fixed_value(), mw.signs, mw.sigma), (6, Some(3.0), SignRule::Random, 1.0));
    let mw9 = preset("marley_woods_18_22_a9_mixed").unwrap();
    assert_eq!(mw9.beta.to_string(), "list:10,8,5,3;rest:2");
    let singh = preset("singh_14_24_a7_sn3").unwrap();
    assert_eq!(singh.beta.to_string(), "exp:3");
    assert_eq!((singh.signs, singh.niter), (SignRule::KnownPositive, 1000));
    let mee = preset("mee_20_7_2fi_small_a4_g7").unwrap();
    assert_eq!(mee.beta.to_string(), "set:2,2.5,3,3.5");
    assert_eq!(mee.tfi_beta.unwrap().to_string(), "set:0.5,1,1.5,2");
    assert_eq!(mee.heredity, Heredity::Weak);
    let eq = preset("mee_20_7_2fi_equal_a2_g1").unwrap();
    assert_eq!(eq.tfi_beta.unwrap().to_string(), "set:2,2.5,3,3.5");
    assert!(preset_names().count() >= 50);
}
