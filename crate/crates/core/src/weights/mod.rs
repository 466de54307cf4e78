//! Weight families `γ = (γ_u)`, the hat transformation `γ̂_u = γ_u C0^{|u|}`,
//! ordered enumeration of the support, and the decay and `t*` exponents.

mod analysis;
mod enumerate;
mod spec;

pub use analysis::{
    covered_mass, decay, operator_norm_sq, tstar, DecayReport, NormSq, TstarReport,
    DEFAULT_DECAY_RANKS,
};
pub use enumerate::{enumerate_ordered, Entry, OrderedSupport, SupportIter, DEFAULT_CANDIDATE_CAP};
pub use spec::parse_weights;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rkhs::MAX_COMPONENT_SET;
use crate::sets::VariableSet;

/// A non-increasing, non-negative sequence `j ↦ γ_j`, `j ≥ 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Generator {
    /// `c · j^{-β}`.
    Power { c: f64, beta: f64 },
    /// Explicit leading values; zero beyond the list.
    List(Vec<f64>),
}

impl Generator {
    #[inline]
    pub fn value(&self, j: u64) -> f64 {
        debug_assert!(j >= 1);
        match self {
            Generator::Power { c, beta } => c * (j as f64).powf(-beta),
            Generator::List(v) => v.get(j as usize - 1).copied().unwrap_or(0.0),
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            Generator::Power { c, beta } => {
                if !(*c > 0.0 && c.is_finite()) || !(*beta > 0.0 && beta.is_finite()) {
                    return Err(Error::Parameter(format!(
                        "power generator needs c > 0 and beta > 0, got c={c}, beta={beta}"
                    )));
                }
            }
            Generator::List(v) => {
                if v.iter().any(|x| !(*x >= 0.0 && x.is_finite())) {
                    return Err(Error::Parameter(
                        "generator values must be finite and >= 0".into(),
                    ));
                }
                if v.windows(2).any(|w| w[1] > w[0]) {
                    return Err(Error::Parameter("generator must be non-increasing".into()));
                }
            }
        }
        Ok(())
    }

    /// `(c, β)` for power-law generators.
    pub fn power_law(&self) -> Option<(f64, f64)> {
        match *self {
            Generator::Power { c, beta } => Some((c, beta)),
            Generator::List(_) => None,
        }
    }

    /// Number of positive entries, `None` when infinite.
    pub fn support_len(&self) -> Option<usize> {
        match self {
            Generator::Power { .. } => None,
            Generator::List(v) => Some(v.iter().take_while(|&&x| x > 0.0).count()),
        }
    }

    /// Whether `Σ_j γ_j < ∞`.
    pub fn is_summable(&self) -> bool {
        match self {
            Generator::Power { beta, .. } => *beta > 1.0,
            Generator::List(_) => true,
        }
    }
}

/// A set with its weight, used by the explicitly listed classes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightedSet {
    pub u: VariableSet,
    pub gamma: f64,
}

impl WeightedSet {
    pub fn new(u: VariableSet, gamma: f64) -> Self {
        WeightedSet { u, gamma }
    }
}

/// The weight classes with class-specific closed forms.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum WeightClass {
    /// `γ_u = Π_{j ∈ u} γ_j`.
    Product { generator: Generator },
    /// Product weights zeroed above cardinality `order`.
    FiniteProduct { generator: Generator, order: usize },
    /// `γ_u = Γ_{|u|} Π_{j ∈ u} γ_j`; `order_weights = [Γ_0, Γ_1, Γ_2, ...]`,
    /// zero beyond the list.
    Pod {
        generator: Generator,
        order_weights: Vec<f64>,
    },
    /// Finite-order weights where each positive set meets at most `1 + degree`
    /// positive sets.
    FiniteIntersection {
        sets: Vec<WeightedSet>,
        degree: usize,
    },
    /// Weights of order `order` whose `i`-th set in lexicographic word order
    /// carries `generator(i)`.
    LexOrdered { order: usize, generator: Generator },
    /// A finite map `u ↦ γ_u`; unlisted sets have weight zero.
    Explicit { sets: Vec<WeightedSet> },
    /// `γ_u` for `|u| ≤ sigma`, zero otherwise.
    CutOff {
        base: Box<WeightClass>,
        sigma: usize,
    },
}

/// A weight family, optionally bound to the `C0` of a kernel.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightFamily {
    #[serde(flatten)]
    class: WeightClass,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    c0: Option<f64>,
}

/// Order weights `Γ_k` of product-type classes after applying cut-offs.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct OrderWeights {
    /// `Γ_0, ..., Γ_{K}`.
    pub explicit: Vec<f64>,
    /// `Γ_k` for `k > K` (before the cut-off).
    pub tail: f64,
    /// Largest admissible cardinality.
    pub sigma: Option<usize>,
}

impl OrderWeights {
    pub fn get(&self, k: usize) -> f64 {
        if self.sigma.is_some_and(|s| k > s) {
            return 0.0;
        }
        self.explicit.get(k).copied().unwrap_or(self.tail)
    }

    /// `sup_{k' ≥ k} Γ_{k'}`.
    pub fn sup_from(&self, k: usize) -> f64 {
        let mut best = 0.0f64;
        let upper = self.max_order().unwrap_or(self.explicit.len());
        for i in k..=upper.max(k) {
            best = best.max(self.get(i));
        }
        if self.max_order().is_none() && self.sigma.is_none() {
            best = best.max(self.tail);
        }
        best
    }

    /// Largest cardinality with a possibly positive weight, `None` if unbounded.
    pub fn max_order(&self) -> Option<usize> {
        let natural = if self.tail > 0.0 {
            None
        } else {
            Some(self.explicit.iter().rposition(|&g| g > 0.0).unwrap_or(0))
        };
        match (natural, self.sigma) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        }
    }
}

/// The structural kind of a family after peeling cut-offs.
#[derive(Clone, Debug)]
pub(crate) enum Shape<'a> {
    ProductType {
        generator: &'a Generator,
        order: OrderWeights,
    },
    Finite {
        sets: &'a [WeightedSet],
        sigma: Option<usize>,
    },
    Lex {
        generator: &'a Generator,
        omega: usize,
        sigma: Option<usize>,
    },
}

fn min_opt(a: Option<usize>, b: Option<usize>) -> Option<usize> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, y) => x.or(y),
    }
}

impl WeightClass {
    pub(crate) fn shape(&self, sigma: Option<usize>) -> Shape<'_> {
        match self {
            WeightClass::Product { generator } => Shape::ProductType {
                generator,
                order: OrderWeights {
                    explicit: vec![1.0],
                    tail: 1.0,
                    sigma,
                },
            },
            WeightClass::FiniteProduct { generator, order } => Shape::ProductType {
                generator,
                order: OrderWeights {
                    explicit: vec![1.0],
                    tail: 1.0,
                    sigma: min_opt(Some(*order), sigma),
                },
            },
            WeightClass::Pod {
                generator,
                order_weights,
            } => Shape::ProductType {
                generator,
                order: OrderWeights {
                    explicit: order_weights.clone(),
                    tail: 0.0,
                    sigma,
                },
            },
            WeightClass::FiniteIntersection { sets, .. } | WeightClass::Explicit { sets } => {
                Shape::Finite { sets, sigma }
            }
            WeightClass::LexOrdered { order, generator } => Shape::Lex {
                generator,
                omega: *order,
                sigma,
            },
            WeightClass::CutOff { base, sigma: s } => base.shape(min_opt(Some(*s), sigma)),
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            WeightClass::Product { generator } => generator.validate(),
            WeightClass::FiniteProduct { generator, order } => {
                if *order == 0 {
                    return Err(Error::Parameter("finite-product order must be >= 1".into()));
                }
                generator.validate()
            }
            WeightClass::Pod {
                generator,
                order_weights,
            } => {
                if order_weights.len() < 2 || order_weights[0] != 1.0 || order_weights[1] != 1.0 {
                    return Err(Error::Parameter(
                        "POD order weights must start with Γ_0 = Γ_1 = 1".into(),
                    ));
                }
                if order_weights.iter().any(|g| !(*g >= 0.0 && g.is_finite())) {
                    return Err(Error::Parameter("POD order weights must be >= 0".into()));
                }
                generator.validate()
            }
            WeightClass::Explicit { sets } => validate_listed(sets),
            WeightClass::FiniteIntersection { sets, degree } => {
                validate_listed(sets)?;
                let positive: Vec<&VariableSet> = sets
                    .iter()
                    .filter(|s| s.gamma > 0.0)
                    .map(|s| &s.u)
                    .collect();
                for u in &positive {
                    if u.is_empty() {
                        continue;
                    }
                    let meets = positive.iter().filter(|v| u.intersects(v)).count();
                    if meets > 1 + degree {
                        return Err(Error::Parameter(format!(
                            "set {u} meets {meets} positive-weight sets, more than 1 + {degree}"
                        )));
                    }
                }
                Ok(())
            }
            WeightClass::LexOrdered { order, generator } => {
                if *order == 0 {
                    return Err(Error::Parameter("lexicographic order must be >= 1".into()));
                }
                generator.validate()?;
                if let Generator::List(v) = generator {
                    if v.iter().any(|&g| g <= 0.0) {
                        return Err(Error::Parameter(
                            "lexicographically-ordered weights must be positive".into(),
                        ));
                    }
                }
                Ok(())
            }
            WeightClass::CutOff { base, sigma } => {
                if *sigma == 0 {
                    return Err(Error::Parameter("cut-off order must be >= 1".into()));
                }
                base.validate()
            }
        }
    }
}

fn validate_listed(sets: &[WeightedSet]) -> Result<()> {
    if sets
        .iter()
        .any(|s| !(s.gamma >= 0.0 && s.gamma.is_finite()))
    {
        return Err(Error::Parameter("weights must be finite and >= 0".into()));
    }
    let mut keys: Vec<&VariableSet> = sets.iter().map(|s| &s.u).collect();
    keys.sort();
    if keys.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Parameter("a set is listed twice".into()));
    }
    Ok(())
}

/// `Σ_{k=1}^{r} C(n, k)`: number of non-empty subsets of `[n]` with at most `r` elements.
pub(crate) fn count_small_subsets(n: u64, r: usize) -> f64 {
    let mut total = 0.0;
    let mut binom = 1.0;
    for k in 1..=r as u64 {
        if k > n {
            break;
        }
        binom = binom * (n - k + 1) as f64 / k as f64;
        total += binom;
    }
    total
}

/// 1-based position of a non-empty `u` (`|u| ≤ omega`) in the lexicographic
/// order of the words formed by its elements in decreasing order.
pub(crate) fn lex_rank(u: &VariableSet, omega: usize) -> f64 {
    let word: Vec<u32> = u.indices().iter().rev().copied().collect();
    let mut rank = word.len() as f64;
    for (p, &letter) in word.iter().enumerate() {
        rank += count_small_subsets(letter as u64 - 1, omega - p);
    }
    rank
}

impl WeightFamily {
    pub fn new(class: WeightClass) -> Result<Self> {
        class.validate()?;
        let class = match class {
            WeightClass::Explicit { mut sets } => {
                sets.sort_by(|a, b| a.u.cmp(&b.u));
                WeightClass::Explicit { sets }
            }
            WeightClass::FiniteIntersection { mut sets, degree } => {
                sets.sort_by(|a, b| a.u.cmp(&b.u));
                WeightClass::FiniteIntersection { sets, degree }
            }
            other => other,
        };
        Ok(WeightFamily { class, c0: None })
    }

    pub fn product(generator: Generator) -> Result<Self> {
        Self::new(WeightClass::Product { generator })
    }

    pub fn finite_product(generator: Generator, order: usize) -> Result<Self> {
        Self::new(WeightClass::FiniteProduct { generator, order })
    }

    pub fn pod(generator: Generator, order_weights: Vec<f64>) -> Result<Self> {
        Self::new(WeightClass::Pod {
            generator,
            order_weights,
        })
    }

    pub fn explicit(sets: Vec<WeightedSet>) -> Result<Self> {
        Self::new(WeightClass::Explicit { sets })
    }

    pub fn finite_intersection(sets: Vec<WeightedSet>, degree: usize) -> Result<Self> {
        Self::new(WeightClass::FiniteIntersection { sets, degree })
    }

    pub fn lex_ordered(order: usize, generator: Generator) -> Result<Self> {
        Self::new(WeightClass::LexOrdered { order, generator })
    }

    /// Binds the family to a kernel constant `C0`, enabling `γ̂`.
    pub fn bind(mut self, c0: f64) -> Result<Self> {
        if !(c0 > 0.0 && c0.is_finite()) {
            return Err(Error::Parameter(format!("C0 must be positive, got {c0}")));
        }
        self.c0 = Some(c0);
        Ok(self)
    }

    pub fn class(&self) -> &WeightClass {
        &self.class
    }

    pub fn c0(&self) -> Result<f64> {
        self.c0
            .ok_or_else(|| Error::Configuration("weights are not bound to a kernel C0".into()))
    }

    pub(crate) fn shape(&self) -> Shape<'_> {
        self.class.shape(None)
    }

    /// The cut-off family `γ^{(σ)}`.
    pub fn cutoff(&self, sigma: usize) -> Result<Self> {
        if sigma == 0 {
            return Err(Error::Parameter("cut-off order must be >= 1".into()));
        }
        Ok(WeightFamily {
            class: WeightClass::CutOff {
                base: Box::new(self.class.clone()),
                sigma,
            },
            c0: self.c0,
        })
    }

    /// `γ_u`.
    pub fn weight_of(&self, u: &VariableSet) -> f64 {
        match self.shape() {
            Shape::ProductType { generator, order } => {
                let gk = order.get(u.len());
                if gk == 0.0 {
                    return 0.0;
                }
                u.iter().fold(gk, |acc, j| acc * generator.value(j as u64))
            }
            Shape::Finite { sets, sigma } => {
                if sigma.is_some_and(|s| u.len() > s) {
                    return 0.0;
                }
                sets.binary_search_by(|s| s.u.cmp(u))
                    .map_or(0.0, |i| sets[i].gamma)
            }
            Shape::Lex {
                generator,
                omega,
                sigma,
            } => {
                if u.is_empty() {
                    return 1.0;
                }
                if u.len() > omega || sigma.is_some_and(|s| u.len() > s) {
                    return 0.0;
                }
                lex_generator_value(generator, lex_rank(u, omega))
            }
        }
    }

    /// `γ̂_u = γ_u C0^{|u|}`.
    pub fn hatweight_of(&self, u: &VariableSet) -> Result<f64> {
        let c0 = self.c0()?;
        Ok(self.weight_of(u) * c0.powi(u.len() as i32))
    }

    /// Maximal cardinality of a positive-weight set, `None` if unbounded.
    pub fn order(&self) -> Option<usize> {
        match self.shape() {
            Shape::ProductType { generator, order } => {
                let by_gen = generator.support_len();
                min_opt(order.max_order(), by_gen)
            }
            Shape::Finite { sets, sigma } => {
                let m = sets
                    .iter()
                    .filter(|s| s.gamma > 0.0)
                    .map(|s| s.u.len())
                    .max();
                min_opt(Some(m.unwrap_or(0)), sigma)
            }
            Shape::Lex { omega, sigma, .. } => min_opt(Some(omega), sigma),
        }
    }

    /// Whether the support is a finite list of sets.
    pub fn has_finite_support(&self) -> bool {
        match self.shape() {
            Shape::ProductType { generator, .. } => generator.support_len().is_some(),
            Shape::Finite { .. } => true,
            Shape::Lex { generator, .. } => generator.support_len().is_some(),
        }
    }

    /// Certificate for `Σ_u γ_u M^{|u|} < ∞`.
    pub fn is_summable(&self) -> bool {
        match self.shape() {
            Shape::ProductType { generator, .. } | Shape::Lex { generator, .. } => {
                generator.is_summable()
            }
            Shape::Finite { .. } => true,
        }
    }

    /// `Σ_{u ⊆ s} γ_u Π_{j ∈ u} z_j`, where `z` lists one value per index of `s`.
    pub fn weighted_subset_sum(&self, s: &VariableSet, z: &[f64]) -> Result<f64> {
        if z.len() != s.len() {
            return Err(Error::Shape("one value per coordinate is required".into()));
        }
        match self.shape() {
            Shape::ProductType { generator, order } => {
                let kmax = order.max_order().unwrap_or(s.len()).min(s.len());
                let mut e = vec![0.0; kmax + 1];
                e[0] = 1.0;
                for (j, &zj) in s.iter().zip(z) {
                    let x = generator.value(j as u64) * zj;
                    for k in (1..=kmax).rev() {
                        e[k] += e[k - 1] * x;
                    }
                }
                Ok(e.iter().enumerate().map(|(k, ek)| order.get(k) * ek).sum())
            }
            Shape::Finite { sets, sigma } => Ok(sets
                .iter()
                .filter(|ws| ws.u.is_subset(s) && !sigma.is_some_and(|m| ws.u.len() > m))
                .map(|ws| {
                    ws.u.iter().fold(ws.gamma, |acc, j| {
                        let pos = s.indices().binary_search(&j).expect("subset");
                        acc * z[pos]
                    })
                })
                .sum()),
            Shape::Lex { .. } => {
                if s.len() > MAX_COMPONENT_SET {
                    return Err(Error::Budget(format!(
                        "subset sum over {} coordinates for lexicographic weights",
                        s.len()
                    )));
                }
                let mut total = 0.0;
                for mask in 0..1u64 << s.len() {
                    let u = s.sub_by_mask(mask);
                    let g = self.weight_of(&u);
                    if g == 0.0 {
                        continue;
                    }
                    let prod: f64 = (0..s.len())
                        .filter(|i| mask >> i & 1 == 1)
                        .map(|i| z[i])
                        .product();
                    total += g * prod;
                }
                Ok(total)
            }
        }
    }
}

pub(crate) fn lex_generator_value(generator: &Generator, rank: f64) -> f64 {
    match generator {
        Generator::Power { c, beta } => c * rank.powf(-beta),
        Generator::List(v) => {
            if rank > v.len() as f64 {
                0.0
            } else {
                v[rank as usize - 1]
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vs(s: &str) -> VariableSet {
        s.parse().unwrap()
    }

    fn cubic() -> WeightFamily {
        WeightFamily::product(Generator::Power { c: 1.0, beta: 3.0 }).unwrap()
    }

    #[test]
    fn product_weight_examples() {
        let w = cubic();
        assert_eq!(w.weight_of(&vs("1,2")), 1.0 / 8.0);
        assert_eq!(w.weight_of(&VariableSet::empty()), 1.0);
        assert_eq!(w.cutoff(1).unwrap().weight_of(&vs("1,2")), 0.0);
    }

    #[test]
    fn hatweight_examples() {
        let w = cubic().bind(1.0 / 3.0).unwrap();
        assert!((w.hatweight_of(&vs("1")).unwrap() - 1.0 / 3.0).abs() < 1e-16);
        assert!((w.hatweight_of(&vs("1,2")).unwrap() - 1.0 / 72.0).abs() < 1e-16);
        assert_eq!(w.hatweight_of(&VariableSet::empty()).unwrap(), 1.0);
        assert!(matches!(
            cubic().hatweight_of(&vs("1")),
            Err(Error::Configuration(_))
        ));
    }

    #[test]
    fn cutoff_examples() {
        let w = cubic();
        let c2 = w.cutoff(2).unwrap();
        assert_eq!(c2.weight_of(&vs("1,2,3")), 0.0);
        for u in ["", "1", "4", "2,7"] {
            assert_eq!(c2.weight_of(&vs(u)), w.weight_of(&vs(u)));
        }
    }

    #[test]
    fn hatweight_product_multiplicativity() {
        let c0 = 1.0 / 3.0;
        let w = cubic().bind(c0).unwrap();
        let u = vs("1,4");
        for j in [2, 3, 5, 9] {
            let uj = u.union(&VariableSet::new([j]).unwrap());
            let lhs = w.hatweight_of(&uj).unwrap();
            let rhs =
                w.hatweight_of(&u).unwrap() * w.weight_of(&VariableSet::new([j]).unwrap()) * c0;
            assert!((lhs - rhs).abs() <= 1e-15 * lhs);
        }
    }

    #[test]
    fn lex_rank_follows_word_order() {
        // words: 1, 2, 21, 3, 31, 32, 321, 4, ...
        let order = ["1", "2", "1,2", "3", "1,3", "2,3", "1,2,3", "4", "1,4"];
        for (i, s) in order.iter().enumerate() {
            assert_eq!(lex_rank(&vs(s), 3), (i + 1) as f64, "{s}");
        }
        // with omega = 2 the triple is skipped
        assert_eq!(lex_rank(&vs("4"), 2), 7.0);
    }

    #[test]
    fn pod_weights() {
        let w =
            WeightFamily::pod(Generator::List(vec![0.5, 0.5, 0.5]), vec![1.0, 1.0, 4.0]).unwrap();
        assert_eq!(w.weight_of(&vs("1,2")), 1.0);
        assert_eq!(w.weight_of(&vs("1,2,3")), 0.0);
        assert!(WeightFamily::pod(Generator::List(vec![0.5]), vec![2.0, 1.0]).is_err());
    }

    #[test]
    fn finite_intersection_validation() {
        let ok = vec![
            WeightedSet::new(vs("1,2"), 0.5),
            WeightedSet::new(vs("3,4"), 0.5),
            WeightedSet::new(vs("1"), 0.3),
        ];
        assert!(WeightFamily::finite_intersection(ok.clone(), 1).is_ok());
        let mut bad = ok;
        bad.push(WeightedSet::new(vs("2"), 0.3));
        // {1,2} now meets itself, {1} and {2}
        assert!(WeightFamily::finite_intersection(bad, 1).is_err());
    }

    #[test]
    fn generator_validation() {
        assert!(WeightFamily::product(Generator::List(vec![0.5, 0.6])).is_err());
        assert!(WeightFamily::product(Generator::Power { c: 1.0, beta: 0.0 }).is_err());
    }

    #[test]
    fn subset_sum_matches_brute_force() {
        let s = vs("1,2,5");
        let z = [0.3, 0.7, 0.9];
        for w in [
            cubic(),
            WeightFamily::finite_product(Generator::Power { c: 0.8, beta: 2.0 }, 2).unwrap(),
            WeightFamily::pod(
                Generator::Power { c: 1.0, beta: 2.0 },
                vec![1.0, 1.0, 3.0, 0.5],
            )
            .unwrap(),
            WeightFamily::lex_ordered(2, Generator::Power { c: 1.0, beta: 2.0 }).unwrap(),
            cubic().cutoff(1).unwrap(),
        ] {
            let brute: f64 = s
                .subsets()
                .map(|u| {
                    let prod: f64 = u
                        .iter()
                        .map(|j| z[s.indices().iter().position(|&i| i == j).unwrap()])
                        .product();
                    w.weight_of(&u) * prod
                })
                .sum();
            let fast = w.weighted_subset_sum(&s, &z).unwrap();
            assert!((brute - fast).abs() < 1e-14, "{:?}", w.class());
        }
    }

    #[test]
    fn serde_round_trip() {
        let w = WeightFamily::pod(Generator::Power { c: 1.0, beta: 2.0 }, vec![1.0, 1.0, 0.5])
            .unwrap()
            .cutoff(3)
            .unwrap();
        let s = serde_json::to_string(&w).unwrap();
        let back: WeightFamily = serde_json::from_str(&s).unwrap();
        assert_eq!(back, w);
    }
}
