use std::fmt::Write;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde_json::json;

use screenpath::design::{criteria_report, half_fraction_ssd, plackett_burman};
use screenpath::gds::{simulate_gds, Aggregate, GammaRule, GdsConfig, MeanSe, ScreeningOutcome, Selection};
use screenpath::mvnorm::DEFAULT_ACCURACY;
use screenpath::recovery::{
    default_log_grid, log_lambda_grid, phi_average, sim_recovery, sim_recovery_split, PhiAverageOptions, Target,
};
use screenpath::simulate::{preset, preset_names, Heredity};
use screenpath::solvers::GridSpec;
use screenpath::{BetaSpec, Design, Estimator, ModelMatrix, RecoveryCurve, ScreeningScenario, SignRule};

use crate::manifest::OutputDir;
use crate::opts::Opts;
use crate::svg::{self, Panel, Series};

/// `pb:<n>[:<k>]`, `ssd:<order>[:<k>]` or a CSV path.
fn load_design(spec: &str) -> Result<Design> {
    let builtin = |parts: &[&str], build: fn(usize) -> screenpath::Result<Design>| -> Result<Design> {
        let bad = || anyhow::anyhow!("invalid config field `design`: cannot parse `{spec}`");
        let n: usize = parts.first().and_then(|v| v.parse().ok()).ok_or_else(bad)?;
        let d = build(n)?;
        match parts.get(1) {
            None => Ok(d),
            Some(k) => Ok(d.truncate_factors(k.parse().map_err(|_| bad())?)?),
        }
    };
    let parts: Vec<&str> = spec.split(':').collect();
    match parts[0] {
        "pb" if parts.len() <= 3 => builtin(&parts[1..], plackett_burman),
        "ssd" if parts.len() <= 3 => builtin(&parts[1..], half_fraction_ssd),
        _ => Ok(Design::load(spec)?),
    }
}

fn designs(opts: &Opts) -> Result<Vec<Design>> {
    if opts.design.is_empty() {
        bail!("invalid config field `design`: at least one design is required");
    }
    opts.design.iter().map(|d| load_design(d)).collect()
}

fn model(d: &Design, interactions: bool) -> Result<ModelMatrix> {
    Ok(ModelMatrix::build(d, interactions, true, true)?)
}

fn curve_grid(opts: &Opts) -> Result<Vec<f64>> {
    let Some(spec) = &opts.log_lambda else {
        return Ok(default_log_grid());
    };
    let bad = || anyhow::anyhow!("invalid config field `log-lambda`: expected <lo>:<hi>:<d>, got `{spec}`");
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    let lo: f64 = parts[0].parse().map_err(|_| bad())?;
    let hi: f64 = parts[1].parse().map_err(|_| bad())?;
    let d: usize = parts[2].parse().map_err(|_| bad())?;
    Ok(log_lambda_grid(lo, hi, d)?)
}

fn single<T: Copy>(values: &[T], field: &str) -> Result<Option<T>> {
    match values {
        [] => Ok(None),
        [v] => Ok(Some(*v)),
        _ => bail!("invalid config field `{field}`: this command takes one value"),
    }
}

/// The `--scenario` preset or file with flag overrides applied.
fn scenario(opts: &Opts) -> Result<ScreeningScenario> {
    let mut scn = match &opts.scenario {
        Some(name) if preset_names().any(|p| p == name.as_str()) => preset(name)?,
        Some(path) => ScreeningScenario::load(path)?,
        None => {
            let a = single(&opts.a, "a")?.context("invalid config field `a`: required without --scenario")?;
            let beta = opts.beta.first().context("invalid config field `beta`: required without --scenario")?;
            ScreeningScenario {
                name: "custom".into(),
                description: String::new(),
                a,
                g: 0,
                beta: beta.parse()?,
                tfi_beta: None,
                signs: SignRule::KnownPositive,
                heredity: Heredity::None,
                sigma: 1.0,
                niter: 1000,
                seed: 1,
            }
        }
    };
    if let Some(a) = single(&opts.a, "a")? {
        scn.a = a;
    }
    match opts.beta.as_slice() {
        [] => {}
        [b] => scn.beta = b.parse()?,
        _ => bail!("invalid config field `beta`: this command takes one value"),
    }
    if let Some(s) = &opts.signs {
        scn.signs = s.parse()?;
    }
    if let Some(n) = opts.niter {
        scn.niter = n;
    }
    if let Some(s) = opts.seed {
        scn.seed = s;
    }
    if let Some(s) = opts.sigma {
        scn.sigma = s;
    }
    scn.validate()?;
    Ok(scn)
}

fn estimator(opts: &Opts, default: Estimator) -> Result<Estimator> {
    Ok(opts.estimator.as_deref().map(str::parse).transpose()?.unwrap_or(default))
}

fn parsed<T: std::str::FromStr<Err = screenpath::Error>>(values: &[String], default: &str) -> Result<Vec<T>> {
    if values.is_empty() {
        return Ok(vec![default.parse()?]);
    }
    Ok(values.iter().map(|v| v.parse()).collect::<Result<_, _>>()?)
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| x.to_string())
}

pub fn criteria(name: &str, opts: &Opts) -> Result<()> {
    let designs = designs(opts)?;
    let mut csv = String::from("id,n,k,es2,ue_s2,ue_s2_efficiency,mean_s,var_s,balanced\n");
    for d in &designs {
        let r = criteria_report(d, opts.ue_s2_ref)?;
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{},{},{}",
            r.id,
            r.n,
            r.k,
            fmt_opt(r.es2),
            r.ue_s2,
            fmt_opt(r.ue_s2_efficiency),
            r.mean_s,
            r.var_s,
            r.balanced
        );
    }
    print!("{csv}");
    if let Some(dir) = &opts.out {
        let mut out = OutputDir::create(dir)?;
        out.write("criteria.csv", &csv)?;
        out.finish(name, opts, None, json!({}))?;
    }
    Ok(())
}

fn aggregate_row(csv: &mut String, design: &str, cfg: &GdsConfig, agg: &Aggregate, n: usize, diff: Option<&Aggregate>) {
    let cell = |m: &MeanSe| format!("{},{}", m.mean, m.se);
    let diff = diff.map_or_else(
        || ",,,,,".to_string(),
        |d| format!("{},{},{}", cell(&d.power), cell(&d.type1), cell(&d.fdr)),
    );
    let _ = writeln!(
        csv,
        "{design},{},{},{},{},{},{},{},{n},{diff}",
        cfg.grid,
        cfg.selection,
        cfg.gamma,
        cfg.estimator,
        cell(&agg.power),
        cell(&agg.type1),
        cell(&agg.fdr)
    );
}

pub fn gds(name: &str, opts: &Opts) -> Result<()> {
    let dir = opts.out_dir()?;
    let designs = designs(opts)?;
    let scn = scenario(opts)?;
    let est = estimator(opts, Estimator::Dantzig)?;
    let grids: Vec<GridSpec> = parsed(&opts.grid, "fine100")?;
    let gammas: Vec<GammaRule> = parsed(&opts.gamma, "sigma:1")?;
    let ics: Vec<Selection> = parsed(&opts.ic, "aicc")?;
    let mut configs = Vec::new();
    for &grid in &grids {
        for &gamma in &gammas {
            for &selection in &ics {
                configs.push(GdsConfig { grid, gamma, selection, estimator: est });
            }
        }
    }
    let models = designs.iter().map(|d| model(d, scn.needs_interactions())).collect::<Result<Vec<_>>>()?;

    let mut outcomes = String::from("design_id,replicate,power,type1,fdr,chosen_lambda,chosen_ic,grid,selection,gamma_rule\n");
    let mut aggregate = String::from(
        "design_id,grid,selection,gamma_rule,estimator,power,power_se,type1,type1_se,fdr,fdr_se,replicates,\
         diff_power,diff_power_se,diff_type1,diff_type1_se,diff_fdr,diff_fdr_se\n",
    );
    for m in &models {
        let results: Vec<Vec<ScreeningOutcome>> = simulate_gds(m, &scn, &configs)?;
        for (cfg, reps) in configs.iter().zip(&results) {
            for (i, o) in reps.iter().enumerate() {
                let _ = writeln!(
                    outcomes,
                    "{},{i},{},{},{},{},{},{},{},{}",
                    m.design_id(),
                    o.power,
                    o.type1,
                    o.fdr,
                    fmt_opt(o.chosen_lambda),
                    fmt_opt(o.chosen_ic),
                    cfg.grid,
                    cfg.selection,
                    cfg.gamma
                );
            }
        }
        for (c, (cfg, reps)) in configs.iter().zip(&results).enumerate() {
            let diff = (c > 0).then(|| Aggregate::paired_difference(reps, &results[0]));
            aggregate_row(&mut aggregate, m.design_id(), cfg, &Aggregate::of(reps), reps.len(), diff.as_ref());
        }
    }
    let mut out = OutputDir::create(dir)?;
    out.write("outcomes.csv", &outcomes)?;
    out.write("aggregate.csv", &aggregate)?;
    let details = json!({
        "scenario": scn,
        "scenario_hash": scn.hash(),
        "difference_reference": configs.first().map(|c| format!("{} {} {}", c.grid, c.selection, c.gamma)),
    });
    out.finish(name, opts, Some(scn.seed), details)?;
    Ok(())
}

fn curve_details(c: &RecoveryCurve, extra: serde_json::Value) -> serde_json::Value {
    let max_mvn = c.mvn_stderr.as_ref().map(|v| v.iter().fold(0.0f64, |m, x| m.max(*x)));
    json!({
        "design_id": c.design_id,
        "estimator": c.estimator,
        "kind": c.kind,
        "scenario": c.scenario,
        "scenario_hash": c.scenario_hash,
        "sampling": c.sampling,
        "mvn_accuracy": c.mvn_accuracy,
        "max_mvn_stderr": max_mvn,
        "nonconverged": c.nonconverged,
        "cell": extra,
    })
}

fn series(c: &RecoveryCurve, label: String) -> Series {
    Series {
        label,
        x: c.log_lambda.clone(),
        y: c.prob.clone(),
        stderr: Some((0..c.len()).map(|i| c.total_stderr(i)).collect()),
    }
}

fn write_curves(
    name: &str,
    opts: &Opts,
    dir: &Path,
    curves: &[(RecoveryCurve, serde_json::Value)],
    panels: &[Panel],
    cols: usize,
    seed: u64,
) -> Result<()> {
    let mut csv = format!("{}\n", RecoveryCurve::CSV_HEADER);
    for (c, _) in curves {
        csv.push_str(&c.csv_rows());
    }
    let mut out = OutputDir::create(dir)?;
    out.write("curves.csv", &csv)?;
    out.write(&format!("{}.svg", name.replace('-', "_")), &svg::render(panels, cols))?;
    let details: Vec<_> = curves.iter().map(|(c, x)| curve_details(c, x.clone())).collect();
    out.finish(name, opts, Some(seed), json!({ "curves": details }))?;
    Ok(())
}

fn phi_options(opts: &Opts, sigma: f64) -> PhiAverageOptions {
    let d = PhiAverageOptions::default();
    PhiAverageOptions {
        sigma,
        budget: opts.budget.unwrap_or(d.budget),
        draws: opts.niter.unwrap_or(d.draws),
        accuracy: opts.accuracy.unwrap_or(DEFAULT_ACCURACY),
        seed: opts.seed.unwrap_or(d.seed),
        enumeration: d.enumeration,
    }
}

fn check_cells(models: &[ModelMatrix], a_values: &[usize], opts: &PhiAverageOptions) -> Result<()> {
    for m in models {
        for &a in a_values {
            if a < 1 || a >= m.runs() || a > m.p() {
                bail!(
                    "invalid config field `a`: a = {a} needs 1 <= a < n = {} and a <= p = {} for design `{}`",
                    m.runs(),
                    m.p(),
                    m.design_id()
                );
            }
        }
    }
    if opts.budget == 0 {
        bail!("invalid config field `budget`: must be at least 1");
    }
    if opts.draws == 0 {
        bail!("invalid config field `niter`: must be at least 1");
    }
    Ok(())
}

pub fn phi(name: &str, opts: &Opts) -> Result<()> {
    let dir = opts.out_dir()?;
    let designs = designs(opts)?;
    let models = designs.iter().map(|d| model(d, false)).collect::<Result<Vec<_>>>()?;
    if opts.a.is_empty() {
        bail!("invalid config field `a`: at least one value is required");
    }
    let betas: Vec<BetaSpec> = parsed(&opts.beta, "fixed:3")?;
    for b in &betas {
        b.validate()?;
    }
    let signs: SignRule = opts.signs.as_deref().unwrap_or("known").parse()?;
    let grid = curve_grid(opts)?;
    let popts = phi_options(opts, opts.sigma.unwrap_or(1.0));
    check_cells(&models, &opts.a, &popts)?;

    let mut curves = Vec::new();
    let mut panels = Vec::new();
    for beta in &betas {
        for &a in &opts.a {
            let mut panel = Panel { title: format!("a = {a}, beta = {beta}"), series: Vec::new() };
            for m in &models {
                let c = phi_average(m, a, beta, signs, &grid, &popts)?;
                panel.series.push(series(&c, m.design_id().to_string()));
                curves.push((c, json!({ "a": a, "beta": beta.to_string(), "signs": signs })));
            }
            panels.push(panel);
        }
    }
    write_curves(name, opts, dir, &curves, &panels, opts.a.len(), popts.seed)
}

pub fn phi_sim(name: &str, opts: &Opts) -> Result<()> {
    let dir = opts.out_dir()?;
    let designs = designs(opts)?;
    let scn = scenario(opts)?;
    let est = estimator(opts, Estimator::Lasso)?;
    let target: Target = opts.target.as_deref().unwrap_or("sign").parse()?;
    let grid = curve_grid(opts)?;
    if opts.split && est != Estimator::Lasso {
        bail!("invalid config field `estimator`: split curves are computed for the lasso only");
    }
    if opts.overlay_exact && (est != Estimator::Lasso || target != Target::Sign || scn.needs_interactions()) {
        bail!("invalid config field `overlay-exact`: needs lasso sign recovery without interactions");
    }
    let interactions = opts.split || scn.needs_interactions();
    let models = designs.iter().map(|d| model(d, interactions)).collect::<Result<Vec<_>>>()?;
    let popts = phi_options(opts, scn.sigma);
    if opts.overlay_exact {
        check_cells(&models, &[scn.a], &popts)?;
    }

    let cell = json!({ "scenario": scn });
    let mut curves = Vec::new();
    let mut panels = Vec::new();
    for m in &models {
        let mut panel = Panel { title: format!("{} ({})", m.design_id(), scn.name), series: Vec::new() };
        let mut add = |c: RecoveryCurve, extra: serde_json::Value| {
            panel.series.push(series(&c, c.kind.to_string()));
            curves.push((c, extra));
        };
        if opts.split {
            let s = sim_recovery_split(m, &scn, &grid)?;
            if s.conjunction_mismatches != 0 {
                bail!("{} replicate cells disagree between split and full sign recovery", s.conjunction_mismatches);
            }
            add(s.me, cell.clone());
            add(s.tfi, cell.clone());
            add(s.full, cell.clone());
        } else {
            add(sim_recovery(m, &scn, est, target, &grid)?, cell.clone());
        }
        if opts.overlay_exact {
            let c = phi_average(m, scn.a, &scn.beta, scn.signs, &grid, &popts)?;
            add(c, json!({ "a": scn.a, "beta": scn.beta.to_string(), "signs": scn.signs }));
        }
        panels.push(panel);
    }
    write_curves(name, opts, dir, &curves, &panels, 2, scn.seed)
}
