//! Monte Carlo, univariate rate-3/2, multilevel and changing-dimension estimators.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::plan::{CdPlan, LevelPlan};
use super::{Metered, ProductMeasureSampler, QuadratureResult};
use crate::cost::CostModel;
use crate::error::{Error, Result};
use crate::rkhs::{anchored_component_eval, Integrand, Kernel1D};
use crate::sets::{Point, VariableSet};

/// `(1/n) Σ f(x_i)` with `x_i ~ ρ^v`, anchored outside `v`.
pub fn mc_quad(
    f: &dyn Integrand,
    kernel: &Kernel1D,
    model: Arc<CostModel>,
    v: &VariableSet,
    n: usize,
    seed: u64,
) -> Result<QuadratureResult> {
    if n == 0 {
        return Err(Error::Parameter("mc needs n >= 1".into()));
    }
    let mut sampler = ProductMeasureSampler::new(kernel.sampling_space(), seed);
    let mut oracle = Metered::new(f, kernel.anchor(), model);
    let mut sum = 0.0;
    for _ in 0..n {
        let x = sampler.point(v);
        sum += oracle.eval(&x);
    }
    let estimate = sum / n as f64;
    Ok(QuadratureResult::new(
        estimate,
        oracle.into_ledger(),
        seed,
        vec![estimate],
    ))
}

/// Univariate estimator on coordinate 1 with `n` evaluations: the piecewise
/// linear interpolant through the anchor and the domain end points is
/// integrated exactly, and the residual is corrected by stratified sampling
/// with one uniform draw in each of the remaining `n − #nodes` equal strata.
pub fn uni_quad_rate3(
    f: &dyn Integrand,
    kernel: &Kernel1D,
    model: Arc<CostModel>,
    n: usize,
    seed: u64,
) -> Result<QuadratureResult> {
    if n < 4 || n % 2 == 1 {
        return Err(Error::Parameter(format!(
            "uni3 needs an even n >= 4, got {n}"
        )));
    }
    let space = kernel.sampling_space();
    let (lo, hi, a) = (space.lo, space.hi, space.anchor);
    let mut nodes = vec![lo, a, hi];
    nodes.dedup();
    let coord = VariableSet::range(1);
    let at = |x: f64| Point::new(coord.clone(), vec![x]).expect("one coordinate");

    let mut sampler = ProductMeasureSampler::new(space, seed);
    let mut oracle = Metered::new(f, a, model);
    let values: Vec<f64> = nodes.iter().map(|&x| oracle.eval(&at(x))).collect();
    let interpolant = |x: f64| {
        let i = nodes.partition_point(|&t| t <= x).clamp(1, nodes.len() - 1);
        let (x0, x1) = (nodes[i - 1], nodes[i]);
        values[i - 1] + (values[i] - values[i - 1]) * (x - x0) / (x1 - x0)
    };
    // trapezoid rule is exact for the interpolant; ρ has density 1/(hi − lo)
    let exact: f64 = nodes
        .windows(2)
        .zip(values.windows(2))
        .map(|(x, y)| (x[1] - x[0]) * (y[0] + y[1]) / 2.0)
        .sum::<f64>()
        / (hi - lo);

    let m = n - nodes.len();
    let mut correction = 0.0;
    for i in 0..m {
        let t = sampler.coordinate_in(i as f64 / m as f64, (i + 1) as f64 / m as f64);
        correction += oracle.eval(&at(t)) - interpolant(t);
    }
    correction /= m as f64;
    Ok(QuadratureResult::new(
        exact + correction,
        oracle.into_ledger(),
        seed,
        vec![exact, correction],
    ))
}

/// Telescoping estimator `Σ_ℓ mean(Ψ_{v_ℓ} f − Ψ_{v_{ℓ−1}} f)` with common random
/// numbers on the shared coordinates of consecutive levels.
pub fn multilevel_quad(
    f: &dyn Integrand,
    kernel: &Kernel1D,
    model: Arc<CostModel>,
    plan: &LevelPlan,
    seed: u64,
) -> Result<QuadratureResult> {
    let mut sampler = ProductMeasureSampler::new(kernel.sampling_space(), seed);
    let mut oracle = Metered::new(f, kernel.anchor(), model);
    let mut parts = Vec::with_capacity(plan.levels.len());
    for (l, (v, n)) in plan.levels.iter().enumerate() {
        let mut sum = 0.0;
        for _ in 0..*n {
            let x = sampler.point(v);
            let mut d = oracle.eval(&x);
            if l > 0 {
                d -= oracle.eval(&x.restrict(&plan.levels[l - 1].0));
            }
            sum += d;
        }
        parts.push(sum / *n as f64);
    }
    let estimate = parts.iter().sum();
    Ok(QuadratureResult::new(
        estimate,
        oracle.into_ledger(),
        seed,
        parts,
    ))
}

/// Plain Monte Carlo mean of a component over `ρ^u`; `u = ∅` takes one evaluation.
pub fn tensor_mc<F>(
    mut component: F,
    u: &VariableSet,
    n: usize,
    sampler: &mut ProductMeasureSampler,
) -> Result<f64>
where
    F: FnMut(&Point) -> Result<f64>,
{
    if n == 0 {
        return Err(Error::Parameter("tensor mc needs n >= 1".into()));
    }
    if u.is_empty() {
        return component(&Point::anchor());
    }
    let mut sum = 0.0;
    for _ in 0..n {
        sum += component(&sampler.point(u))?;
    }
    Ok(sum / n as f64)
}

/// Largest `k` with `k^d ≤ n`.
fn grid_side(n: usize, d: usize) -> usize {
    let mut k = (n as f64).powf(1.0 / d as f64).floor() as usize;
    while (k + 1).checked_pow(d as u32).is_some_and(|p| p <= n) {
        k += 1;
    }
    while k > 1 && k.checked_pow(d as u32).is_none_or(|p| p > n) {
        k -= 1;
    }
    k
}

/// Jittered-grid estimate: `k^{|u|} ≤ n` cells with one draw each; falls back
/// to plain Monte Carlo with `n` draws when `k < 2`.
pub fn stratified_tensor_mc<F>(
    mut component: F,
    u: &VariableSet,
    n: usize,
    sampler: &mut ProductMeasureSampler,
) -> Result<f64>
where
    F: FnMut(&Point) -> Result<f64>,
{
    let d = u.len();
    let k = if d == 0 { 1 } else { grid_side(n, d) };
    if k < 2 {
        return tensor_mc(component, u, n, sampler);
    }
    let cells = k.pow(d as u32);
    let mut cell = vec![0usize; d];
    let mut sum = 0.0;
    for _ in 0..cells {
        let values = cell
            .iter()
            .map(|&c| sampler.coordinate_in(c as f64 / k as f64, (c + 1) as f64 / k as f64))
            .collect();
        sum += component(&Point::new(u.clone(), values)?)?;
        for c in cell.iter_mut() {
            *c += 1;
            if *c < k {
                break;
            }
            *c = 0;
        }
    }
    Ok(sum / cells as f64)
}

/// Sampling design for the per-component estimates of `cd_quad`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CdSampling {
    Plain,
    #[default]
    Stratified,
}

/// Changing-dimension estimator: `f(a) + Σ_j I_{u_j}(f_{u_j})`, each component
/// accessed through inclusion–exclusion over anchored evaluations.
pub fn cd_quad(
    f: &dyn Integrand,
    kernel: &Kernel1D,
    model: Arc<CostModel>,
    plan: &CdPlan,
    sampling: CdSampling,
    seed: u64,
) -> Result<QuadratureResult> {
    let mut sampler = ProductMeasureSampler::new(kernel.sampling_space(), seed);
    let mut oracle = Metered::new(f, kernel.anchor(), model);
    let constant = oracle.eval(&Point::anchor());
    let mut parts = Vec::with_capacity(plan.entries.len() + 1);
    parts.push(constant);
    for e in &plan.entries {
        let component = |x: &Point| anchored_component_eval(|p| oracle.eval(p), &e.u, x);
        let part = match sampling {
            CdSampling::Plain => tensor_mc(component, &e.u, e.n, &mut sampler)?,
            CdSampling::Stratified => stratified_tensor_mc(component, &e.u, e.n, &mut sampler)?,
        };
        parts.push(part);
    }
    let estimate = parts.iter().sum();
    Ok(QuadratureResult::new(
        estimate,
        oracle.into_ledger(),
        seed,
        parts,
    ))
}
