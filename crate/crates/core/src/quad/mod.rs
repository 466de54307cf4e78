//! Randomized quadrature engines instrumented with cost ledgers.

mod engines;
mod plan;

pub use engines::{
    cd_quad, mc_quad, multilevel_quad, stratified_tensor_mc, tensor_mc, uni_quad_rate3, CdSampling,
};
pub use plan::{cd_component_cost, CdEntry, CdPlan, LevelPlan};

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cost::{CostLedger, CostModel};
use crate::error::Result;
use crate::rkhs::{Integrand, Kernel1D, SamplingSpace};
use crate::sets::{Point, VariableSet};

/// SplitMix64 finalizer.
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of the `index`-th independent stream derived from `master`.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    mix64(master ^ mix64(index))
}

/// Draws points from `ρ^v` with all other coordinates at the anchor.
pub struct ProductMeasureSampler {
    space: SamplingSpace,
    rng: ChaCha8Rng,
}

impl ProductMeasureSampler {
    pub fn new(space: SamplingSpace, seed: u64) -> Self {
        ProductMeasureSampler {
            space,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn space(&self) -> SamplingSpace {
        self.space
    }

    /// A uniform draw from `[0, 1)`.
    pub fn unit(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    /// A draw from `ρ` restricted to the fraction `[lo, hi)` of the domain.
    pub fn coordinate_in(&mut self, lo: f64, hi: f64) -> f64 {
        let u = lo + (hi - lo) * self.unit();
        self.space.lo + (self.space.hi - self.space.lo) * u
    }

    pub fn point(&mut self, v: &VariableSet) -> Point {
        let values = (0..v.len()).map(|_| self.coordinate_in(0.0, 1.0)).collect();
        Point::new(v.clone(), values).expect("one value per index")
    }
}

/// An integrand whose every evaluation is charged to a ledger.
pub struct Metered<'a> {
    f: &'a dyn Integrand,
    anchor: f64,
    ledger: CostLedger,
}

impl<'a> Metered<'a> {
    pub fn new(f: &'a dyn Integrand, anchor: f64, model: Arc<CostModel>) -> Self {
        Metered {
            f,
            anchor,
            ledger: CostLedger::new(model),
        }
    }

    pub fn eval(&mut self, x: &Point) -> f64 {
        self.ledger.charge(x, self.anchor);
        self.f.eval(x)
    }

    pub fn into_ledger(self) -> CostLedger {
        self.ledger
    }
}

/// Output of one randomized run.
#[derive(Clone, Debug)]
pub struct QuadratureResult {
    pub estimate: f64,
    pub ledger: CostLedger,
    pub n_evals: usize,
    pub seed: u64,
    /// Per-level or per-component contributions, summing to `estimate`.
    pub parts: Vec<f64>,
}

impl QuadratureResult {
    fn new(estimate: f64, ledger: CostLedger, seed: u64, parts: Vec<f64>) -> Self {
        QuadratureResult {
            estimate,
            n_evals: ledger.len(),
            ledger,
            seed,
            parts,
        }
    }

    pub fn cost(&self) -> f64 {
        self.ledger.total()
    }

    pub fn record(&self) -> QuadratureRecord {
        QuadratureRecord {
            estimate: self.estimate,
            cost: self.ledger.total(),
            n_evals: self.n_evals,
            seed: self.seed,
            infeasible: self.ledger.is_infeasible(),
            parts: self.parts.clone(),
        }
    }
}

/// Serializable summary of a [`QuadratureResult`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureRecord {
    pub estimate: f64,
    pub cost: f64,
    pub n_evals: usize,
    pub seed: u64,
    pub infeasible: bool,
    pub parts: Vec<f64>,
}

/// A randomized algorithm with a fixed plan.
pub trait Algorithm: Sync {
    fn run(&self, f: &dyn Integrand, seed: u64) -> Result<QuadratureResult>;
}

/// The available engines with their plans.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum Method {
    Mc { v: VariableSet, n: usize },
    Uni3 { n: usize },
    Multilevel { plan: LevelPlan },
    Cd { plan: CdPlan, sampling: CdSampling },
}

/// An engine bound to a kernel and a cost model.
#[derive(Clone, Debug)]
pub struct QuadratureEngine {
    pub kernel: Kernel1D,
    pub model: Arc<CostModel>,
    pub method: Method,
}

impl Algorithm for QuadratureEngine {
    fn run(&self, f: &dyn Integrand, seed: u64) -> Result<QuadratureResult> {
        let model = Arc::clone(&self.model);
        match &self.method {
            Method::Mc { v, n } => mc_quad(f, &self.kernel, model, v, *n, seed),
            Method::Uni3 { n } => uni_quad_rate3(f, &self.kernel, model, *n, seed),
            Method::Multilevel { plan } => multilevel_quad(f, &self.kernel, model, plan, seed),
            Method::Cd { plan, sampling } => cd_quad(f, &self.kernel, model, plan, *sampling, seed),
        }
    }
}
