//! Budget sweeps over a test family, rate fitting and comparison with the
//! exponent lower bounds.

mod config;

use std::path::Path;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{default_sigmas, exponent_lower_bound, ExponentBound};
use crate::cost::CostModel;
use crate::error::{Error, Result};
use crate::quad::{derive_seed, Algorithm, CdPlan, LevelPlan, Method, QuadratureEngine};
use crate::sets::VariableSet;
use crate::stats::{fit_line, rmse_with_jackknife};
use crate::weights::{covered_mass, WeightFamily};

pub use config::{
    random_translates, AlgorithmSpec, BoundSpec, ExperimentConfig, TestFamilySpec, TestFunction,
    MIN_REPLICATIONS, NORM_TOLERANCE, SCHEMA_VERSION,
};

/// Environment variable capping the worker threads.
pub const THREADS_ENV: &str = "ANCHORQUAD_THREADS";
/// Realized mean cost may exceed the budget by at most this factor.
pub const COST_TOLERANCE: f64 = 1.05;
const MAX_CHAIN_DIM: usize = 1 << 20;

/// Maps a budget to a concrete plan; `None` when the budget is infeasible.
pub fn plan_for_budget(
    alg: &AlgorithmSpec,
    w: &WeightFamily,
    model: &CostModel,
    budget: f64,
) -> Result<std::result::Result<Method, String>> {
    let cost_of = |d: usize| model.cost(&VariableSet::range(d as u32));
    Ok(match alg {
        AlgorithmSpec::Cd { sampling } => match CdPlan::build(w, budget, model) {
            Ok(plan) => Ok(Method::Cd {
                plan,
                sampling: *sampling,
            }),
            Err(Error::Budget(msg)) => Err(msg),
            Err(e) => return Err(e),
        },
        AlgorithmSpec::Mc => {
            let mut d = 1;
            while d < MAX_CHAIN_DIM && cost_of(d + 1) <= budget.sqrt() {
                d += 1;
            }
            let n = (budget / cost_of(d)).floor() as usize;
            if n == 0 {
                Err(format!("one evaluation on [{d}] costs more than {budget}"))
            } else {
                Ok(Method::Mc {
                    v: VariableSet::range(d as u32),
                    n,
                })
            }
        }
        AlgorithmSpec::Uni3 => {
            let n = (budget / cost_of(1)).floor() as usize / 2 * 2;
            if n < 4 {
                Err(format!("budget {budget} allows fewer than 4 evaluations"))
            } else {
                Ok(Method::Uni3 { n })
            }
        }
        AlgorithmSpec::Ml => match level_plan(w, model, budget)? {
            Some(plan) => Ok(Method::Multilevel { plan }),
            None => Err(format!("budget {budget} cannot fund the first level")),
        },
    })
}

/// Levels `[2^ℓ]`, `ℓ < ⌈log₂ N⌉`, with `n_ℓ ∝ (V_ℓ/C_ℓ)^{1/2}` where `V_ℓ`
/// is the `γ̂` mass first covered by level `ℓ` and `C_ℓ` its coupled cost.
fn level_plan(w: &WeightFamily, model: &CostModel, budget: f64) -> Result<Option<LevelPlan>> {
    let max_levels = budget.log2().ceil().max(1.0) as u32;
    let mut levels = Vec::new();
    let mut below_mass = 0.0;
    let mut below_cost = 0.0;
    for l in 0..max_levels.min(20) {
        let v = VariableSet::range(1 << l);
        let c = model.cost(&v);
        if c + below_cost > budget {
            break;
        }
        let mass = covered_mass(w, std::slice::from_ref(&v))?;
        levels.push((v, (mass - below_mass).max(0.0), c + below_cost));
        below_mass = mass;
        below_cost = c;
    }
    if levels.is_empty() {
        return Ok(None);
    }
    let weight: f64 = levels.iter().map(|(_, var, c)| (var * c).sqrt()).sum();
    let counts: Vec<usize> = if weight > 0.0 {
        let lambda = budget / weight;
        levels
            .iter()
            .map(|(_, var, c)| (lambda * (var / c).sqrt()).floor() as usize)
            .collect()
    } else {
        vec![(budget / levels[0].2).floor() as usize]
    };
    let plan: Vec<(VariableSet, usize)> = levels
        .into_iter()
        .zip(counts)
        .map(|((v, _, _), n)| (v, n))
        .take_while(|(_, n)| *n > 0)
        .collect();
    if plan.is_empty() {
        return Ok(None);
    }
    LevelPlan::new(plan).map(Some)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FunctionRmse {
    pub function_id: String,
    pub rmse: f64,
    /// Jackknife standard error of `rmse`.
    pub se: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BudgetRow {
    pub budget: f64,
    pub realized_cost_mean: f64,
    pub realized_cost_max: f64,
    pub per_function: Vec<FunctionRmse>,
    pub worst_rmse: f64,
    pub worst_se: f64,
    pub worst_function: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SkippedBudget {
    pub budget: f64,
    pub reason: String,
}

/// `log RMSE = log c − r log N`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub rate: f64,
    pub c: f64,
    /// RMS of the fit errors in log space.
    pub residual: f64,
    pub rate_se: f64,
    pub rows_used: usize,
    /// Budgets dropped because their RMSE was zero.
    pub excluded: Vec<f64>,
}

/// Least-squares rate over `(N, RMSE)` pairs; zero-error rows are excluded.
pub fn fit_rate(points: &[(f64, f64)]) -> Result<RateFit> {
    let (used, excluded): (Vec<_>, Vec<_>) = points.iter().partition(|(_, e)| *e > 0.0);
    if used.len() < 4 {
        return Err(Error::DegenerateInput(format!(
            "rate fit needs 4 rows with positive error, got {}",
            used.len()
        )));
    }
    let xs: Vec<f64> = used.iter().map(|(n, _)| n.ln()).collect();
    let ys: Vec<f64> = used.iter().map(|(_, e)| e.ln()).collect();
    let (slope, intercept, se, residual) = fit_line(&xs, &ys);
    Ok(RateFit {
        rate: -slope,
        c: intercept.exp(),
        residual,
        rate_se: se,
        rows_used: used.len(),
        excluded: excluded.into_iter().map(|(n, _)| n).collect(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
    Vacuous,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub verdict: Verdict,
    pub rate: f64,
    /// `1 / bound`, the fastest rate the lower bound allows.
    pub rate_cap: f64,
    pub slack: f64,
    /// `rate_cap − rate`; absent when the bound is vacuous.
    pub margin: Option<f64>,
}

/// PASS iff the fitted rate does not beat the lower bound by more than `slack`.
pub fn compare_with_bounds(rate: f64, bound: &ExponentBound, slack: f64) -> Comparison {
    if !bound.bound.is_finite() {
        return Comparison {
            verdict: Verdict::Vacuous,
            rate,
            rate_cap: 0.0,
            slack,
            margin: None,
        };
    }
    let cap = bound.rate_cap();
    Comparison {
        verdict: if rate <= cap + slack {
            Verdict::Pass
        } else {
            Verdict::Fail
        },
        rate,
        rate_cap: cap,
        slack,
        margin: Some(cap - rate),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRun {
    pub schema: u32,
    pub name: Option<String>,
    pub algorithm: String,
    pub seed: u64,
    pub replications: usize,
    pub functions: Vec<String>,
    pub rows: Vec<BudgetRow>,
    pub skipped: Vec<SkippedBudget>,
    pub fit: Option<RateFit>,
    pub fit_note: Option<String>,
    pub bound: Option<ExponentBound>,
    pub comparison: Option<Comparison>,
}

impl ExperimentRun {
    /// `(N, worst-case RMSE)` for every completed budget.
    pub fn worst_points(&self) -> Vec<(f64, f64)> {
        self.rows.iter().map(|r| (r.budget, r.worst_rmse)).collect()
    }

    pub fn write_runs_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["budget", "realized_cost_mean", "function_id", "rmse", "se"])?;
        for row in &self.rows {
            let worst = FunctionRmse {
                function_id: "worst".into(),
                rmse: row.worst_rmse,
                se: row.worst_se,
            };
            for f in row.per_function.iter().chain(std::iter::once(&worst)) {
                w.write_record([
                    row.budget.to_string(),
                    row.realized_cost_mean.to_string(),
                    f.function_id.clone(),
                    f.rmse.to_string(),
                    f.se.to_string(),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }

    /// Natural logarithms of the budget and the worst-case RMSE.
    pub fn write_plot_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["log_budget", "log_worst_rmse"])?;
        for (n, e) in self.worst_points() {
            w.write_record([n.ln().to_string(), e.ln().to_string()])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Writes `runs.csv`, `summary.json` and `plotdata.csv` into `dir`.
    pub fn write_outputs(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        self.write_runs_csv(std::fs::File::create(dir.join("runs.csv"))?)?;
        self.write_plot_csv(std::fs::File::create(dir.join("plotdata.csv"))?)?;
        std::fs::write(
            dir.join("summary.json"),
            serde_json::to_string_pretty(self)? + "\n",
        )?;
        Ok(())
    }
}

/// Runs `f` on a pool capped by `ANCHORQUAD_THREADS` when it is set.
pub fn with_thread_cap<T: Send>(f: impl FnOnce() -> T + Send) -> Result<T> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => {
            let n: usize = v.trim().parse().ok().filter(|n| *n > 0).ok_or_else(|| {
                Error::Configuration(format!(
                    "{THREADS_ENV} must be a positive integer, got `{v}`"
                ))
            })?;
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Configuration(e.to_string()))?;
            Ok(pool.install(f))
        }
        Err(_) => Ok(f()),
    }
}

/// Runs the sweep. Every (function, replication) cell has its own derived
/// seed and results are reduced in a fixed order, so the output depends only
/// on the configuration and `seed`.
pub fn run_experiment(cfg: &ExperimentConfig, seed: u64) -> Result<ExperimentRun> {
    cfg.validate()?;
    let kernel = cfg.kernel()?;
    let w = cfg.family(&kernel)?;
    let model = Arc::new(cfg.cost.clone());
    let family = cfg.test_functions(&kernel, &w, seed)?;
    let exact: Vec<f64> = family.iter().map(|t| t.f.integral(&kernel)).collect();
    let r = cfg.replications;

    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for (bi, &budget) in cfg.budgets.iter().enumerate() {
        let method = match plan_for_budget(&cfg.algorithm, &w, &model, budget)? {
            Ok(m) => m,
            Err(reason) => {
                skipped.push(SkippedBudget { budget, reason });
                continue;
            }
        };
        let engine = QuadratureEngine {
            kernel: kernel.clone(),
            model: Arc::clone(&model),
            method,
        };
        let budget_seed = derive_seed(seed, bi as u64);
        let cells: Vec<(f64, f64)> = with_thread_cap(|| {
            (0..family.len() * r)
                .into_par_iter()
                .map(|cell| {
                    let fi = cell / r;
                    let g = family[fi].f.bind(&kernel);
                    let res = engine.run(&g, derive_seed(budget_seed, cell as u64))?;
                    Ok((res.estimate - exact[fi], res.cost()))
                })
                .collect::<Result<Vec<_>>>()
        })??;
        let costs: Vec<f64> = cells.iter().map(|c| c.1).collect();
        let realized_cost_mean = costs.iter().sum::<f64>() / costs.len() as f64;
        let realized_cost_max = costs.iter().cloned().fold(0.0, f64::max);
        if realized_cost_mean > COST_TOLERANCE * budget {
            return Err(Error::Budget(format!(
                "realized mean cost {realized_cost_mean} exceeds {COST_TOLERANCE} × {budget}"
            )));
        }
        let per_function: Vec<FunctionRmse> = family
            .iter()
            .enumerate()
            .map(|(fi, t)| {
                let errors: Vec<f64> = cells[fi * r..(fi + 1) * r].iter().map(|c| c.0).collect();
                let (rmse, se) = rmse_with_jackknife(&errors);
                FunctionRmse {
                    function_id: t.id.clone(),
                    rmse,
                    se,
                }
            })
            .collect();
        let worst = per_function
            .iter()
            .fold(&per_function[0], |a, b| if b.rmse > a.rmse { b } else { a });
        rows.push(BudgetRow {
            budget,
            realized_cost_mean,
            realized_cost_max,
            worst_rmse: worst.rmse,
            worst_se: worst.se,
            worst_function: worst.function_id.clone(),
            per_function,
        });
    }

    let points: Vec<(f64, f64)> = rows.iter().map(|r| (r.budget, r.worst_rmse)).collect();
    let (fit, fit_note) = match fit_rate(&points) {
        Ok(f) => {
            let note = (!f.excluded.is_empty())
                .then(|| format!("{} zero-error rows excluded", f.excluded.len()));
            (Some(f), note)
        }
        Err(e) => (None, Some(e.to_string())),
    };
    let (bound, comparison) = match &cfg.bound {
        Some(b) => {
            let sigmas = b
                .sigmas
                .clone()
                .unwrap_or_else(|| default_sigmas(&w, b.model));
            let bound = exponent_lower_bound(b.model, b.alpha, b.s, &w, &sigmas)?;
            let comparison = fit
                .as_ref()
                .map(|f| compare_with_bounds(f.rate, &bound, b.slack));
            (Some(bound), comparison)
        }
        None => (None, None),
    };
    Ok(ExperimentRun {
        schema: SCHEMA_VERSION,
        name: cfg.name.clone(),
        algorithm: cfg.algorithm.name().into(),
        seed,
        replications: r,
        functions: family.into_iter().map(|t| t.id).collect(),
        rows,
        skipped,
        fit,
        fit_note,
        bound,
        comparison,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::{exponent_from_terms, BoundModel};
    use crate::cost::DollarFunction;

    fn config(weights: &str, algorithm: &str, budgets: &[f64], extra: &str) -> ExperimentConfig {
        let budgets: Vec<String> = budgets.iter().map(|b| b.to_string()).collect();
        ExperimentConfig::from_toml(&format!(
            r#"
schema = 1
weights = "{weights}"
budgets = [{}]
replications = 30

[cost]
model = "unrestricted"
dollar = {{ kind = "poly", s = 1.0 }}

[algorithm]
kind = "{algorithm}"
{extra}
"#,
            budgets.join(", ")
        ))
        .unwrap()
    }

    #[test]
    fn fit_examples() {
        let exact: Vec<(f64, f64)> = (6..12)
            .map(|k| {
                let n = 2f64.powi(k);
                (n, n.powf(-1.5))
            })
            .collect();
        let f = fit_rate(&exact).unwrap();
        assert!((f.rate - 1.5).abs() < 1e-12 && f.residual < 1e-12);

        let scaled: Vec<(f64, f64)> = (6..12)
            .map(|k| {
                let n = 2f64.powi(k);
                (n, 3.0 * n.powf(-0.5))
            })
            .collect();
        let f = fit_rate(&scaled).unwrap();
        assert!((f.rate - 0.5).abs() < 1e-12 && (f.c - 3.0).abs() < 1e-10);

        let mut with_zero = scaled.clone();
        with_zero[0].1 = 0.0;
        let f = fit_rate(&with_zero).unwrap();
        assert_eq!(f.excluded, vec![64.0]);
        assert!(fit_rate(&scaled[..3]).is_err());
    }

    #[test]
    fn jittered_power_law_fit() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let pts: Vec<(f64, f64)> = (6..15)
            .map(|k| {
                let n = 2f64.powi(k);
                (n, 2.0 * n.powf(-1.0) * rng.random_range(0.95..1.05))
            })
            .collect();
        assert!((fit_rate(&pts).unwrap().rate - 1.0).abs() < 0.1);
    }

    #[test]
    fn comparison_examples() {
        let bound = exponent_from_terms(BoundModel::NestRan, 3.0, 1.0, &[(1, 3.0, 1.0)]).unwrap();
        let c = compare_with_bounds(0.9, &bound, 0.15);
        assert_eq!(c.verdict, Verdict::Pass);
        assert!((c.margin.unwrap() - 0.1).abs() < 1e-12);
        assert_eq!(
            compare_with_bounds(1.4, &bound, 0.15).verdict,
            Verdict::Fail
        );
        let vacuous = exponent_from_terms(BoundModel::UnrRes, 3.0, 1.0, &[(1, 1.0, 1.0)]).unwrap();
        assert_eq!(
            compare_with_bounds(0.5, &vacuous, 0.15).verdict,
            Verdict::Vacuous
        );
        let text = serde_json::to_string(&c).unwrap();
        assert!(text.contains("\"PASS\""));
    }

    #[test]
    fn config_validation() {
        let good = config("prod:pow:1:4", "cd", &[64.0, 128.0], "");
        assert_eq!(good.replications, 30);
        let bad = |text: String| ExperimentConfig::from_toml(&text).unwrap_err();
        let base = good.to_toml().unwrap();
        assert!(matches!(
            bad(base.replace("schema = 1", "schema = 2")),
            Error::Configuration(_)
        ));
        assert!(matches!(
            bad(base.replace("replications = 30", "replications = 29")),
            Error::Configuration(_)
        ));
        assert!(matches!(
            bad(base.replace("[64.0, 128.0]", "[128.0, 64.0]")),
            Error::Configuration(_)
        ));
        assert!(matches!(
            bad(base.replace("[64.0, 128.0]", "[64.0, 64.0]")),
            Error::Configuration(_)
        ));
        assert!(bad(base.clone() + "\nunknown = 3\n").is_validation());
    }

    #[test]
    fn test_family_is_unit_norm() {
        let cfg = config(
            "prod:pow:1:3",
            "cd",
            &[64.0],
            "[test_family]\ntranslates = 3\nzero = true\n",
        );
        let k = cfg.kernel().unwrap();
        let w = cfg.family(&k).unwrap();
        let fam = cfg.test_functions(&k, &w, 9).unwrap();
        assert_eq!(fam.len(), 5);
        assert_eq!(fam[0].f.norm(&k, &w).unwrap(), 0.0);
        for t in &fam[1..] {
            assert!((t.f.norm(&k, &w).unwrap() - 1.0).abs() < 1e-12, "{}", t.id);
        }
        assert_eq!(fam, cfg.test_functions(&k, &w, 9).unwrap());
        assert_ne!(fam[2].f, cfg.test_functions(&k, &w, 10).unwrap()[2].f);
    }

    #[test]
    fn zero_family_has_zero_error() {
        let cfg = config(
            "prod:pow:1:3",
            "cd",
            &[64.0],
            "[test_family]\nresidual = false\nzero = true\n",
        );
        let run = run_experiment(&cfg, 1).unwrap();
        assert_eq!(run.rows.len(), 1);
        assert_eq!(run.rows[0].worst_rmse, 0.0);
        assert!(run.fit.is_none());
    }

    #[test]
    fn plans_respect_budgets() {
        let w = crate::weights::parse_weights("prod:pow:1:4")
            .unwrap()
            .bind(1.0 / 3.0)
            .unwrap();
        let model = CostModel::unrestricted(DollarFunction::Poly { s: 1.0 }).unwrap();
        for alg in [
            AlgorithmSpec::Cd {
                sampling: Default::default(),
            },
            AlgorithmSpec::Ml,
            AlgorithmSpec::Mc,
            AlgorithmSpec::Uni3,
        ] {
            for budget in [16.0, 100.0, 4096.0] {
                let m = plan_for_budget(&alg, &w, &model, budget).unwrap().unwrap();
                let planned = match &m {
                    Method::Cd { plan, .. } => plan.planned_cost(),
                    Method::Multilevel { plan } => plan.planned_cost(&model),
                    Method::Mc { v, n } => *n as f64 * model.cost(v),
                    Method::Uni3 { n } => *n as f64,
                };
                assert!(planned <= budget, "{alg:?} {budget} {planned}");
            }
        }
        assert!(plan_for_budget(&AlgorithmSpec::Uni3, &w, &model, 3.0)
            .unwrap()
            .is_err());
        assert!(plan_for_budget(
            &AlgorithmSpec::Cd {
                sampling: Default::default()
            },
            &w,
            &model,
            0.5
        )
        .unwrap()
        .is_err());
    }

    #[test]
    fn infeasible_budgets_are_skipped() {
        let cfg = config("prod:pow:1:3", "uni3", &[2.0, 64.0], "");
        let run = run_experiment(&cfg, 4).unwrap();
        assert_eq!(run.skipped.len(), 1);
        assert_eq!(run.skipped[0].budget, 2.0);
        assert_eq!(run.rows.len(), 1);
    }

    fn spearman(xs: &[f64], ys: &[f64]) -> f64 {
        let rank = |v: &[f64]| {
            let mut idx: Vec<usize> = (0..v.len()).collect();
            idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
            let mut r = vec![0.0; v.len()];
            for (k, i) in idx.into_iter().enumerate() {
                r[i] = k as f64;
            }
            r
        };
        let (a, b) = (rank(xs), rank(ys));
        let n = xs.len() as f64;
        let d2: f64 = a.iter().zip(&b).map(|(x, y)| (x - y).powi(2)).sum();
        1.0 - 6.0 * d2 / (n * (n * n - 1.0))
    }

    #[test]
    fn cd_error_decreases_with_budget() {
        let budgets: Vec<f64> = (6..=12).map(|k| 2f64.powi(k)).collect();
        let cfg = config(
            "explicit:1,2=1",
            "cd",
            &budgets,
            "[test_family]\ntranslates = 2\n",
        );
        let run = run_experiment(&cfg, 17).unwrap();
        let pts = run.worst_points();
        let (ns, es): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
        assert!(spearman(&ns, &es) < -0.8);
        for row in &run.rows {
            assert!(row.realized_cost_max <= 1.05 * row.budget);
            assert!(row.per_function.iter().all(|f| f.rmse <= row.worst_rmse));
        }
    }

    #[test]
    fn runs_are_reproducible_and_thread_independent() {
        let budgets: Vec<f64> = (6..=9).map(|k| 2f64.powi(k)).collect();
        let cfg = config(
            "prod:pow:1:4",
            "ml",
            &budgets,
            "[test_family]\ntranslates = 1\n",
        );
        let csv = |run: &ExperimentRun| {
            let mut buf = Vec::new();
            run.write_runs_csv(&mut buf).unwrap();
            buf
        };
        let a = csv(&run_experiment(&cfg, 3).unwrap());
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let b = csv(&pool.install(|| run_experiment(&cfg, 3).unwrap()));
        assert_eq!(a, b);
        assert_ne!(a, csv(&run_experiment(&cfg, 4).unwrap()));
    }

    #[test]
    fn outputs_are_written() {
        let budgets: Vec<f64> = (6..=9).map(|k| 2f64.powi(k)).collect();
        let cfg = config(
            "prod:pow:1:4",
            "mc",
            &budgets,
            "[bound]\nmodel = \"unr_res\"\ns = 1.0\n",
        );
        let run = run_experiment(&cfg, 8).unwrap();
        let dir = tempfile::tempdir().unwrap();
        run.write_outputs(dir.path()).unwrap();
        let runs = std::fs::read_to_string(dir.path().join("runs.csv")).unwrap();
        assert!(runs.starts_with("budget,realized_cost_mean,function_id,rmse,se\n"));
        assert_eq!(runs.lines().count(), 1 + 2 * budgets.len());
        let plot = std::fs::read_to_string(dir.path().join("plotdata.csv")).unwrap();
        assert_eq!(plot.lines().count(), 1 + budgets.len());
        let summary: serde_json::Value = serde_json::from_str(
            &std::fs::read_to_string(dir.path().join("summary.json")).unwrap(),
        )
        .unwrap();
        assert_eq!(summary["bound"]["bound"], 2.0 / 3.0);
        assert_eq!(summary["comparison"]["verdict"], "PASS");
    }
}
