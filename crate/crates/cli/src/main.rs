//! `anchorquad` command line front end.
//!
//! Every subcommand prints JSON on stdout. Exit status is 0 on success, 2 on
//! invalid input and 3 on failures at run time.

use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use anchorquad::bounds::{
    b_squared, default_sigmas, exponent_lower_bound, fooling_experiment, pw11_upper_bound,
    BoundModel, CoverFamily,
};
use anchorquad::experiment::{plan_for_budget, run_experiment, AlgorithmSpec, ExperimentConfig};
use anchorquad::quad::{Algorithm, CdSampling, Method, QuadratureEngine};
use anchorquad::rkhs::{Kernel1D, KernelSpec};
use anchorquad::weights::{
    decay, enumerate_ordered, operator_norm_sq, parse_weights, tstar, DEFAULT_DECAY_RANKS,
};
use anchorquad::{AnchoredFunction, CostModel, Error, Result, VariableSet, WeightFamily};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser)]
#[command(
    name = "anchorquad",
    version,
    about = "Randomized integration on weighted anchored spaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Kernel constants M = sup k(x, x) and C0 = ∫∫ k.
    Constants {
        #[arg(long, default_value = "wiener")]
        kernel: String,
    },
    /// Inspect a weight family.
    #[command(subcommand)]
    Weights(WeightsCommand),
    /// Projection errors and exponent bounds.
    #[command(subcommand)]
    Bounds(BoundsCommand),
    /// Integrate an explicit function with one estimator.
    Integrate(IntegrateArgs),
    /// Run a budget sweep from a TOML configuration.
    Experiment {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, required = true)]
        seed: u64,
        /// Output directory for runs.csv, summary.json and plotdata.csv.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a Monte Carlo estimator confined to a cover on the worst-case residual pair.
    Fool(FoolArgs),
}

#[derive(Args)]
struct FamilyArgs {
    /// Weight spec such as `prod:pow:1:3`, inline JSON or a JSON file.
    #[arg(long)]
    weights: String,
    #[arg(long, default_value = "wiener")]
    kernel: String,
}

impl FamilyArgs {
    fn load(&self) -> Result<(Kernel1D, WeightFamily)> {
        let k = KernelSpec::parse(&self.kernel)?.build()?;
        let w = parse_weights(&self.weights)?.bind(k.c0())?;
        Ok((k, w))
    }
}

/// A cut-off order: `inf` or a positive integer.
#[derive(Clone, Copy)]
struct Sigma(Option<usize>);

fn parse_sigma(s: &str) -> std::result::Result<Sigma, String> {
    match s {
        "inf" | "∞" => Ok(Sigma(None)),
        _ => s
            .parse::<usize>()
            .ok()
            .filter(|v| *v > 0)
            .map(|v| Sigma(Some(v)))
            .ok_or_else(|| format!("expected a positive integer or `inf`, got `{s}`")),
    }
}

#[derive(Subcommand)]
enum WeightsCommand {
    /// The leading sets in decreasing γ̂ order.
    Enumerate {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, value_parser = parse_sigma, default_value = "inf")]
        sigma: Sigma,
        #[arg(long, default_value_t = 20)]
        m: usize,
    },
    Decay {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, value_parser = parse_sigma, default_value = "inf")]
        sigma: Sigma,
        #[arg(long, default_value_t = DEFAULT_DECAY_RANKS)]
        ranks: usize,
    },
    Tstar {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long)]
        sigma: usize,
    },
    /// Σ γ̂_u, the squared norm of the integration functional.
    Norm {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    NestRan,
    UnrRes,
    UnrResOmega,
}

#[derive(Subcommand)]
enum BoundsCommand {
    Bsq {
        #[command(flatten)]
        family: FamilyArgs,
        /// Cover sets separated by `;`, e.g. `1;1,2`.
        #[arg(long)]
        cover: String,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    Exponent {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, value_enum)]
        model: ModelArg,
        #[arg(long)]
        omega: Option<usize>,
        #[arg(long, default_value_t = 3.0)]
        alpha: f64,
        #[arg(long)]
        s: f64,
        /// Cut-off orders to probe, e.g. `1..6` or `1,2,4`.
        #[arg(long)]
        sigmas: Option<String>,
    },
    Pw11 {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, default_value_t = 3.0)]
        kappa: f64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Cd,
    Ml,
    Mc,
    Uni3,
}

#[derive(Args)]
struct IntegrateArgs {
    /// JSON file holding the function.
    #[arg(long)]
    function: PathBuf,
    #[command(flatten)]
    family: FamilyArgs,
    #[arg(long, value_enum)]
    method: MethodArg,
    #[arg(long)]
    budget: f64,
    /// Cost model, e.g. `unrestricted:poly:1` or `nested:doubling=1:poly:1`.
    #[arg(long, default_value = "unrestricted:poly:1")]
    cost: String,
    #[arg(long, required = true)]
    seed: u64,
    /// Write the evaluation ledger as CSV.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FoolArgs {
    #[command(flatten)]
    family: FamilyArgs,
    #[arg(long)]
    cover: String,
    /// Sampling set of the Monte Carlo estimator under test.
    #[arg(long)]
    v: VariableSet,
    #[arg(long, default_value_t = 64)]
    n: usize,
    #[arg(long, default_value_t = 200)]
    replications: usize,
    #[arg(long, default_value_t = 1000)]
    rank_cap: usize,
    #[arg(long, default_value_t = 0.05)]
    slack: f64,
    #[arg(long, default_value = "unrestricted:poly:1")]
    cost: String,
    #[arg(long, required = true)]
    seed: u64,
}

fn print<T: Serialize>(value: &T) -> Result<()> {
    println!("{}", serde_json::to_string(value)?);
    Ok(())
}

fn parse_sigmas(s: &str) -> Result<Vec<usize>> {
    let set: VariableSet = s.parse()?;
    if set.is_empty() {
        return Err(Error::Parameter("at least one sigma is required".into()));
    }
    Ok(set.iter().map(|j| j as usize).collect())
}

#[derive(Serialize)]
struct Constants {
    #[serde(rename = "M")]
    m: f64,
    #[serde(rename = "C0")]
    c0: f64,
}

#[derive(Serialize)]
struct Integration {
    exact: f64,
    error: f64,
    #[serde(flatten)]
    record: anchorquad::quad::QuadratureRecord,
}

fn integrate(a: &IntegrateArgs) -> Result<()> {
    let (kernel, w) = a.family.load()?;
    let f = AnchoredFunction::load(&a.function)?;
    let model = CostModel::parse(&a.cost)?;
    let alg = match a.method {
        MethodArg::Cd => AlgorithmSpec::Cd {
            sampling: CdSampling::default(),
        },
        MethodArg::Ml => AlgorithmSpec::Ml,
        MethodArg::Mc => AlgorithmSpec::Mc,
        MethodArg::Uni3 => AlgorithmSpec::Uni3,
    };
    let method: Method = plan_for_budget(&alg, &w, &model, a.budget)?.map_err(Error::Budget)?;
    let engine = QuadratureEngine {
        kernel: kernel.clone(),
        model: Arc::new(model),
        method,
    };
    let result = engine.run(&f.bind(&kernel), a.seed)?;
    if let Some(path) = &a.out {
        result.ledger.write_csv(std::fs::File::create(path)?)?;
    }
    let exact = f.integral(&kernel);
    print(&Integration {
        exact,
        error: result.estimate - exact,
        record: result.record(),
    })
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Constants { kernel } => {
            let k = KernelSpec::parse(&kernel)?.build()?;
            let (m, c0) = k.constants();
            print(&Constants { m, c0 })
        }
        Command::Weights(cmd) => match cmd {
            WeightsCommand::Enumerate { family, sigma, m } => {
                let (_, w) = family.load()?;
                print(&enumerate_ordered(&w, sigma.0, m)?)
            }
            WeightsCommand::Decay {
                family,
                sigma,
                ranks,
            } => {
                let (_, w) = family.load()?;
                print(&decay(&w, sigma.0, ranks)?)
            }
            WeightsCommand::Tstar { family, sigma } => {
                let (_, w) = family.load()?;
                print(&tstar(&w, sigma)?)
            }
            WeightsCommand::Norm { family, tol } => {
                let (_, w) = family.load()?;
                print(&operator_norm_sq(&w, tol)?)
            }
        },
        Command::Bounds(cmd) => match cmd {
            BoundsCommand::Bsq { family, cover, tol } => {
                let (_, w) = family.load()?;
                print(&b_squared(&w, &CoverFamily::parse(&cover)?, tol)?)
            }
            BoundsCommand::Exponent {
                family,
                model,
                omega,
                alpha,
                s,
                sigmas,
            } => {
                let (_, w) = family.load()?;
                let model = match (model, omega) {
                    (ModelArg::NestRan, _) => BoundModel::NestRan,
                    (ModelArg::UnrRes, _) => BoundModel::UnrRes,
                    (ModelArg::UnrResOmega, Some(omega)) => BoundModel::UnrResOmega { omega },
                    (ModelArg::UnrResOmega, None) => {
                        return Err(Error::Parameter("unr-res-omega needs --omega".into()))
                    }
                };
                let sigmas = match sigmas {
                    Some(s) => parse_sigmas(&s)?,
                    None => default_sigmas(&w, model),
                };
                print(&exponent_lower_bound(model, alpha, s, &w, &sigmas)?)
            }
            BoundsCommand::Pw11 { family, kappa } => {
                let (_, w) = family.load()?;
                print(&serde_json::json!({ "kappa": kappa, "bound": pw11_upper_bound(kappa, &w)? }))
            }
        },
        Command::Integrate(a) => integrate(&a),
        Command::Experiment { config, seed, out } => {
            let cfg = ExperimentConfig::load(&config)?;
            let run = run_experiment(&cfg, seed)?;
            if let Some(dir) = out {
                run.write_outputs(&dir)?;
            }
            print(&run)
        }
        Command::Fool(a) => {
            let (kernel, w) = a.family.load()?;
            let q = QuadratureEngine {
                kernel: kernel.clone(),
                model: Arc::new(CostModel::parse(&a.cost)?),
                method: Method::Mc { v: a.v, n: a.n },
            };
            let cover = CoverFamily::parse(&a.cover)?;
            print(&fooling_experiment(
                &q,
                &kernel,
                &w,
                &cover,
                a.replications,
                a.rank_cap,
                a.slack,
                a.seed,
            )?)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_validation() { 2 } else { 3 })
        }
    }
}
