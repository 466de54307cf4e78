//! Level plans for multilevel estimators and allocation plans for the
//! changing-dimension estimator.

use serde::{Deserialize, Serialize};

use crate::cost::{CostModel, DollarFunction};
use crate::error::{Error, Result};
use crate::rkhs::MAX_COMPONENT_SET;
use crate::sets::VariableSet;
use crate::weights::{SupportIter, WeightFamily};

/// Levels `(v_ℓ, n_ℓ)` over a strictly increasing chain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelPlan {
    pub levels: Vec<(VariableSet, usize)>,
}

impl LevelPlan {
    pub fn new(levels: Vec<(VariableSet, usize)>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::Parameter(
                "a level plan needs at least one level".into(),
            ));
        }
        if levels.iter().any(|(_, n)| *n == 0) {
            return Err(Error::Parameter("every level needs n >= 1".into()));
        }
        for w in levels.windows(2) {
            let (a, b) = (&w[0].0, &w[1].0);
            if !(a.is_subset(b) && a.len() < b.len()) {
                return Err(Error::Parameter(format!(
                    "levels not strictly increasing at {a} ⊂ {b}"
                )));
            }
        }
        Ok(LevelPlan { levels })
    }

    /// Cost of the plan when every sample lands in the full level set.
    pub fn planned_cost(&self, model: &CostModel) -> f64 {
        self.levels
            .iter()
            .enumerate()
            .map(|(l, (v, n))| {
                let below = if l == 0 {
                    0.0
                } else {
                    model.cost(&self.levels[l - 1].0)
                };
                *n as f64 * (model.cost(v) + below)
            })
            .sum()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CdEntry {
    pub u: VariableSet,
    pub gamma_hat: f64,
    /// Number of component samples.
    pub n: usize,
    /// Cost of one access to `f_u` (all `2^{|u|}` anchored evaluations).
    pub unit_cost: f64,
}

/// Sets taken in `γ̂` order with sample counts `n_j ∝ γ̂_j^{1/2}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CdPlan {
    pub entries: Vec<CdEntry>,
    pub budget: f64,
    /// Cost of the single evaluation at the anchor.
    pub anchor_cost: f64,
}

/// `Σ_{w ⊆ u} c(w)`: the cost of one inclusion–exclusion access to `f_u`
/// at a point whose coordinates on `u` are all non-anchor.
pub fn cd_component_cost(model: &CostModel, u: &VariableSet) -> Result<f64> {
    if u.len() > MAX_COMPONENT_SET {
        return Err(Error::Budget(format!(
            "component on {} coordinates",
            u.len()
        )));
    }
    Ok(match model {
        CostModel::Unrestricted { dollar } => binomial_cost(dollar, u.len()),
        CostModel::Nested { .. } => (0..1u64 << u.len())
            .map(|m| model.cost(&u.sub_by_mask(m)))
            .sum(),
    })
}

fn binomial_cost(dollar: &DollarFunction, d: usize) -> f64 {
    let mut binom = 1.0;
    let mut total = 0.0;
    for k in 0..=d {
        total += binom * dollar.eval(k);
        binom = binom * (d - k) as f64 / (k + 1) as f64;
    }
    total
}

impl CdPlan {
    /// Greedy plan for budget `N`: after the anchor evaluation, sets are taken
    /// in `γ̂` order until their cumulative unit cost would exceed the
    /// remaining budget, then `n_j = ⌊λ γ̂_j^{1/2}⌋` with `λ` exhausting it.
    pub fn build(w: &WeightFamily, budget: f64, model: &CostModel) -> Result<Self> {
        let anchor_cost = model.cost(&VariableSet::empty());
        if !(budget >= anchor_cost) {
            return Err(Error::Budget(format!(
                "budget {budget} below the cost {anchor_cost} of one anchor evaluation"
            )));
        }
        let remaining = budget - anchor_cost;
        let mut candidates = Vec::new();
        let mut cumulative = 0.0;
        for e in SupportIter::new(w, None)? {
            let e = e?;
            if e.u.len() > MAX_COMPONENT_SET {
                break;
            }
            let c = cd_component_cost(model, &e.u)?;
            if cumulative + c > remaining {
                break;
            }
            cumulative += c;
            candidates.push((e.u, e.gamma_hat, c));
        }
        let weight: f64 = candidates.iter().map(|(_, g, c)| g.sqrt() * c).sum();
        let entries = if weight > 0.0 {
            let lambda = remaining / weight;
            candidates
                .into_iter()
                .map(|(u, gamma_hat, unit_cost)| CdEntry {
                    n: (lambda * gamma_hat.sqrt()).floor() as usize,
                    u,
                    gamma_hat,
                    unit_cost,
                })
                .filter(|e| e.n > 0)
                .collect()
        } else {
            Vec::new()
        };
        Ok(CdPlan {
            entries,
            budget,
            anchor_cost,
        })
    }

    pub fn planned_cost(&self) -> f64 {
        self.anchor_cost
            + self
                .entries
                .iter()
                .map(|e| e.n as f64 * e.unit_cost)
                .sum::<f64>()
    }

    /// Largest `|u_j|` in the plan.
    pub fn max_order(&self) -> usize {
        self.entries.iter().map(|e| e.u.len()).max().unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::Generator;

    fn unrestricted() -> CostModel {
        CostModel::unrestricted(DollarFunction::Poly { s: 1.0 }).unwrap()
    }

    #[test]
    fn component_cost_sums_over_subsets() {
        let m = unrestricted();
        // {}, {1}, {2}, {1,2} cost 1 + 1 + 1 + 2
        assert_eq!(cd_component_cost(&m, &"1,2".parse().unwrap()).unwrap(), 5.0);
        let nested = CostModel::nested(
            crate::cost::NestedChain::Doubling { base: 1 },
            DollarFunction::Poly { s: 1.0 },
        )
        .unwrap();
        // {} → [1], {3} → [4], {1} → [1], {1,3} → [4]
        assert_eq!(
            cd_component_cost(&nested, &"1,3".parse().unwrap()).unwrap(),
            10.0
        );
    }

    #[test]
    fn plan_respects_budget_and_order() {
        let w = WeightFamily::product(Generator::Power { c: 1.0, beta: 4.0 })
            .unwrap()
            .bind(1.0 / 3.0)
            .unwrap();
        let m = unrestricted();
        for budget in [64.0, 1000.0, 16384.0] {
            let p = CdPlan::build(&w, budget, &m).unwrap();
            assert!(p.planned_cost() <= budget + 1e-9);
            assert!(!p.entries.is_empty());
            assert!(p
                .entries
                .windows(2)
                .all(|e| e[0].gamma_hat >= e[1].gamma_hat));
            assert!(p.entries.windows(2).all(|e| e[0].n >= e[1].n));
        }
        assert!(CdPlan::build(&w, 0.5, &m).is_err());
        let tiny = CdPlan::build(&w, 1.0, &m).unwrap();
        assert!(tiny.entries.is_empty());
    }

    #[test]
    fn level_plan_validation() {
        let v = |s: &str| s.parse::<VariableSet>().unwrap();
        assert!(LevelPlan::new(vec![(v("1"), 4), (v("1,2"), 2)]).is_ok());
        assert!(LevelPlan::new(vec![(v("1"), 4), (v("2"), 2)]).is_err());
        assert!(LevelPlan::new(vec![(v("1"), 0)]).is_err());
        assert!(LevelPlan::new(vec![]).is_err());
    }
}
