//! Anchored restrictions, inclusion–exclusion components and the weighted
//! superposition kernel.

use super::kernel::Kernel1D;
use crate::error::{Error, Result};
use crate::sets::{Point, VariableSet};
use crate::weights::WeightFamily;

/// Largest set for which `2^{|u|}` evaluations are attempted.
pub const MAX_COMPONENT_SET: usize = 25;

/// `k_u(x, y) = Π_{j ∈ u} k(x_j, y_j)`; the empty product is 1.
pub fn ku_eval(k: &Kernel1D, u: &VariableSet, x: &Point, y: &Point) -> Result<f64> {
    let mut acc = 1.0;
    for j in u.iter() {
        let (xj, yj) = match (x.get(j), y.get(j)) {
            (Some(a), Some(b)) => (a, b),
            _ => return Err(Error::Shape(format!("coordinate {j} missing"))),
        };
        acc *= k.eval(xj, yj)?;
    }
    Ok(acc)
}

/// Value of `K_γ(x, y)` together with the bound on the omitted tail.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelValue {
    pub value: f64,
    pub tail_bound: f64,
}

/// `K_γ(x, y) = Σ_u γ_u k_u(x, y)`.
///
/// Since `k_u(x, y)` vanishes unless `u` lies inside the common active set
/// of the two points, the sum is finite for finitely supported points and is
/// evaluated exactly; `tail_tol` is accepted for interface symmetry and the
/// reported tail bound is zero.
pub fn kgamma_eval(
    k: &Kernel1D,
    w: &WeightFamily,
    x: &Point,
    y: &Point,
    tail_tol: f64,
) -> Result<KernelValue> {
    if !(tail_tol >= 0.0) {
        return Err(Error::Parameter(
            "tail tolerance must be non-negative".into(),
        ));
    }
    let a = k.anchor();
    let common = x.active_set(a).intersection(&y.active_set(a));
    let mut z = Vec::with_capacity(common.len());
    for j in common.iter() {
        // both present by construction
        z.push(k.eval(x.coord(j, a), y.coord(j, a))?);
    }
    let value = w.weighted_subset_sum(&common, &z)?;
    Ok(KernelValue {
        value,
        tail_bound: 0.0,
    })
}

/// `Ψ_{v,a} f (x) = f(x_v; a)`.
pub fn anchor_restrict<F>(mut f: F, v: &VariableSet, x: &Point) -> f64
where
    F: FnMut(&Point) -> f64,
{
    f(&x.restrict(v))
}

/// `f_u(x) = Σ_{w ⊆ u} (-1)^{|u| - |w|} f(x_w; a)` using exactly `2^{|u|}`
/// evaluations of `f`, each at a point whose active set lies in `u`.
pub fn anchored_component_eval<F>(mut f: F, u: &VariableSet, x: &Point) -> Result<f64>
where
    F: FnMut(&Point) -> f64,
{
    if u.len() > MAX_COMPONENT_SET {
        return Err(Error::Budget(format!(
            "inclusion-exclusion over {} coordinates exceeds the limit of {MAX_COMPONENT_SET}",
            u.len()
        )));
    }
    for j in u.iter() {
        if x.get(j).is_none() {
            return Err(Error::Shape(format!("coordinate {j} missing from point")));
        }
    }
    let base = x.restrict(u);
    let n = u.len();
    let mut acc = 0.0;
    for mask in 0..1u64 << n {
        let w = u.sub_by_mask(mask);
        let value = f(&base.restrict(&w));
        if (n - w.len()).is_multiple_of(2) {
            acc += value;
        } else {
            acc -= value;
        }
    }
    Ok(acc)
}
