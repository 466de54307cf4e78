//! Experiment configuration files (TOML, `schema = 1`).
//!
//! ```toml
//! schema = 1
//! kernel = "wiener"
//! weights = "prod:pow:1:4"
//! budgets = [64, 128, 256, 512]
//! replications = 100
//!
//! [cost]
//! model = "unrestricted"
//! dollar = { kind = "poly", s = 1.0 }
//!
//! [algorithm]
//! kind = "cd"            # cd | ml | mc | uni3
//!
//! [test_family]
//! residual = true        # normalized integration representer
//! translates = 4         # random kernel-translate functions
//! functions = []         # JSON files, normalized on load
//!
//! [bound]                # optional
//! model = "unr_res"
//! alpha = 3.0
//! s = 1.0
//! ```

use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bounds::{worst_case_residual, BoundModel, CoverFamily};
use crate::cost::CostModel;
use crate::error::{Error, Result};
use crate::quad::{derive_seed, CdSampling};
use crate::rkhs::{AnchoredFunction, Kernel1D, KernelSpec, Term};
use crate::sets::VariableSet;
use crate::weights::{parse_weights, SupportIter, WeightFamily};

pub const SCHEMA_VERSION: u32 = 1;
pub const MIN_REPLICATIONS: usize = 30;
/// Tolerance on the unit norm of every test function.
pub const NORM_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AlgorithmSpec {
    /// Changing-dimension estimator with a greedy plan per budget.
    Cd {
        #[serde(default)]
        sampling: CdSampling,
    },
    /// Multilevel estimator over the chain `[1] ⊂ [2] ⊂ [4] ⊂ ...`.
    Ml,
    /// Plain Monte Carlo on `[d]` with `$(d) ≤ √N`.
    Mc,
    /// The univariate estimator on coordinate 1.
    Uni3,
}

impl AlgorithmSpec {
    pub fn name(&self) -> &'static str {
        match self {
            AlgorithmSpec::Cd { .. } => "cd",
            AlgorithmSpec::Ml => "ml",
            AlgorithmSpec::Mc => "mc",
            AlgorithmSpec::Uni3 => "uni3",
        }
    }
}

fn yes() -> bool {
    true
}

fn default_residual_ranks() -> usize {
    64
}

fn default_translate_ranks() -> usize {
    16
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TestFamilySpec {
    #[serde(default = "yes")]
    pub residual: bool,
    /// Number of leading sets kept in the residual.
    #[serde(default = "default_residual_ranks")]
    pub residual_ranks: usize,
    #[serde(default)]
    pub translates: usize,
    /// Number of leading sets each random translate function spans.
    #[serde(default = "default_translate_ranks")]
    pub translate_ranks: usize,
    /// Include `f ≡ 0`.
    #[serde(default)]
    pub zero: bool,
    #[serde(default)]
    pub functions: Vec<PathBuf>,
}

impl Default for TestFamilySpec {
    fn default() -> Self {
        TestFamilySpec {
            residual: true,
            residual_ranks: default_residual_ranks(),
            translates: 0,
            translate_ranks: default_translate_ranks(),
            zero: false,
            functions: Vec::new(),
        }
    }
}

fn default_alpha() -> f64 {
    3.0
}

fn default_slack() -> f64 {
    0.2
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundSpec {
    #[serde(flatten)]
    pub model: BoundModel,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    pub s: f64,
    #[serde(default)]
    pub sigmas: Option<Vec<usize>>,
    #[serde(default = "default_slack")]
    pub slack: f64,
}

fn default_kernel() -> String {
    "wiener".into()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema: u32,
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default = "default_kernel")]
    pub kernel: String,
    pub weights: String,
    pub cost: CostModel,
    pub algorithm: AlgorithmSpec,
    #[serde(default)]
    pub test_family: TestFamilySpec,
    pub budgets: Vec<f64>,
    pub replications: usize,
    #[serde(default)]
    pub bound: Option<BoundSpec>,
    /// Directory relative paths in the file are resolved against.
    #[serde(skip)]
    pub base_dir: Option<PathBuf>,
}

/// A named member of the test family.
#[derive(Clone, Debug, PartialEq)]
pub struct TestFunction {
    pub id: String,
    pub f: AnchoredFunction,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            toml::from_str(text).map_err(|e| Error::Configuration(e.message().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let mut cfg = Self::from_toml(&std::fs::read_to_string(path)?)?;
        cfg.base_dir = path.parent().map(Path::to_path_buf);
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Configuration(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema != SCHEMA_VERSION {
            return Err(Error::Configuration(format!(
                "unsupported schema {}, expected {SCHEMA_VERSION}",
                self.schema
            )));
        }
        if self.budgets.is_empty() {
            return Err(Error::Configuration(
                "at least one budget is required".into(),
            ));
        }
        if self.budgets.iter().any(|b| !(b.is_finite() && *b > 0.0)) {
            return Err(Error::Configuration(
                "budgets must be positive and finite".into(),
            ));
        }
        if self.budgets.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Configuration(
                "budgets must be strictly increasing".into(),
            ));
        }
        if self.replications < MIN_REPLICATIONS {
            return Err(Error::Configuration(format!(
                "replications must be >= {MIN_REPLICATIONS}, got {}",
                self.replications
            )));
        }
        let t = &self.test_family;
        if !t.residual && t.translates == 0 && !t.zero && t.functions.is_empty() {
            return Err(Error::Configuration("the test family is empty".into()));
        }
        if let Some(b) = &self.bound {
            if !(b.slack >= 0.0) {
                return Err(Error::Configuration("slack must be >= 0".into()));
            }
        }
        self.cost.validate()?;
        KernelSpec::parse(&self.kernel)?;
        parse_weights(&self.weights)?;
        Ok(())
    }

    pub fn kernel(&self) -> Result<Kernel1D> {
        KernelSpec::parse(&self.kernel)?.build()
    }

    /// The weight family bound to the kernel's `C0`.
    pub fn family(&self, kernel: &Kernel1D) -> Result<WeightFamily> {
        parse_weights(&self.weights)?.bind(kernel.c0())
    }

    fn resolve(&self, p: &Path) -> PathBuf {
        match &self.base_dir {
            Some(dir) if p.is_relative() => dir.join(p),
            _ => p.to_path_buf(),
        }
    }

    /// Builds the unit-norm test family; random members depend only on `seed`.
    pub fn test_functions(
        &self,
        kernel: &Kernel1D,
        w: &WeightFamily,
        seed: u64,
    ) -> Result<Vec<TestFunction>> {
        let spec = &self.test_family;
        let mut out = Vec::new();
        if spec.zero {
            out.push(TestFunction {
                id: "zero".into(),
                f: AnchoredFunction::zero(),
            });
        }
        if spec.residual {
            let cover = CoverFamily::new(vec![VariableSet::empty()])?;
            let r = worst_case_residual(w, &cover, spec.residual_ranks)?;
            out.push(TestFunction {
                id: "residual".into(),
                f: r.g,
            });
        }
        for i in 0..spec.translates {
            let f = random_translates(
                kernel,
                w,
                spec.translate_ranks,
                derive_seed(seed, u64::MAX - i as u64),
            )?;
            out.push(TestFunction {
                id: format!("translate-{i}"),
                f,
            });
        }
        for p in &spec.functions {
            let f = AnchoredFunction::load(&self.resolve(p))?;
            let f = if f.norm(kernel, w)? == 0.0 {
                f
            } else {
                f.normalized(kernel, w)?
            };
            let stem = p.file_stem().map_or_else(
                || p.display().to_string(),
                |s| s.to_string_lossy().into_owned(),
            );
            out.push(TestFunction {
                id: format!("file-{stem}"),
                f,
            });
        }
        for t in &out {
            let n = t.f.norm(kernel, w)?;
            if n != 0.0 && (n - 1.0).abs() > NORM_TOLERANCE {
                return Err(Error::Configuration(format!(
                    "test function {} has norm {n}",
                    t.id
                )));
            }
        }
        Ok(out)
    }
}

/// `Σ_u c_u Π_{j ∈ u} k(·, t_j)` over the leading `ranks` sets, with
/// `c_u = γ_u ξ_u`, `ξ_u ~ U(−1, 1)` and uniform `t_j`, normalized.
pub fn random_translates(
    kernel: &Kernel1D,
    w: &WeightFamily,
    ranks: usize,
    seed: u64,
) -> Result<AnchoredFunction> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let space = kernel.sampling_space();
    let mut f = AnchoredFunction::zero();
    for e in SupportIter::new(w, None)?.take(ranks) {
        let e = e?;
        if e.gamma <= 0.0 {
            continue;
        }
        let c = e.gamma * rng.random_range(-1.0..1.0);
        let ts: Vec<f64> = (0..e.u.len())
            .map(|_| space.lo + (space.hi - space.lo) * (1.0 - rng.random::<f64>()))
            .collect();
        f.push(Term::translates(e.u, c, &ts)?);
    }
    f.normalized(kernel, w)
}
