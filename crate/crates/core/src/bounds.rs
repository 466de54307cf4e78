//! Projections onto sampled subspaces, the projection error `b²`, worst-case
//! residuals, and lower bounds on tractability exponents.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cost::{certify_class, AlgorithmClass, ClassCertificate};
use crate::error::{Error, Result};
use crate::quad::{derive_seed, Algorithm};
use crate::rkhs::{AnchoredFunction, Integrand, Kernel1D, Negated, Term};
use crate::sets::VariableSet;
use crate::weights::{
    covered_mass, decay, operator_norm_sq, tstar, SupportIter, WeightFamily, DEFAULT_DECAY_RANKS,
};

/// Sets `v_1, ..., v_n` whose anchored subspaces an algorithm samples from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverFamily {
    sets: Vec<VariableSet>,
}

impl CoverFamily {
    pub fn new(mut sets: Vec<VariableSet>) -> Result<Self> {
        if sets.is_empty() {
            return Err(Error::Parameter("a cover needs at least one set".into()));
        }
        sets.sort();
        sets.dedup();
        Ok(CoverFamily { sets })
    }

    /// Parses `"1;1,2;{}"`.
    pub fn parse(s: &str) -> Result<Self> {
        Self::new(
            s.split(';')
                .map(|p| p.trim().parse())
                .collect::<Result<Vec<VariableSet>>>()?,
        )
    }

    pub fn sets(&self) -> &[VariableSet] {
        &self.sets
    }

    pub fn covers(&self, u: &VariableSet) -> bool {
        self.sets.iter().any(|v| u.is_subset(v))
    }
}

/// `Ψ_{{v_i},a} f`: the terms of `f` living on a subset of some `v_i`.
pub fn project(f: &AnchoredFunction, cover: &CoverFamily) -> AnchoredFunction {
    AnchoredFunction::new(
        f.terms
            .iter()
            .filter(|t| cover.covers(&t.u))
            .cloned()
            .collect(),
    )
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BsqReport {
    /// Enumerated uncovered mass, a lower estimate of `b²`.
    pub value: f64,
    pub covered_mass: f64,
    /// `Σ_{u ≠ ∅} γ̂_u`.
    pub total_mass: f64,
    /// `value + tail_bound` is an upper estimate of `b²`.
    pub tail_bound: f64,
    /// Number of support sets enumerated.
    pub truncation_rank: usize,
}

/// `b² = Σ γ̂_u` over non-empty `u` contained in no cover set.
pub fn b_squared(w: &WeightFamily, cover: &CoverFamily, tail_tol: f64) -> Result<BsqReport> {
    if !(tail_tol > 0.0) {
        return Err(Error::Parameter("tail tolerance must be positive".into()));
    }
    let norm = operator_norm_sq(w, tail_tol / 2.0)?;
    let covered = covered_mass(w, cover.sets())?;
    let upper_total = norm.nonempty + norm.tail_bound;
    let mut value = 0.0;
    let mut rank = 0;
    let exhaustive = w.has_finite_support();
    let mut it = SupportIter::new(w, None)?;
    loop {
        let remaining = (upper_total - covered - value).max(0.0);
        if !exhaustive && remaining <= tail_tol {
            return Ok(BsqReport {
                value,
                covered_mass: covered,
                total_mass: norm.nonempty,
                tail_bound: remaining,
                truncation_rank: rank,
            });
        }
        match it.next() {
            None => {
                return Ok(BsqReport {
                    value,
                    covered_mass: covered,
                    total_mass: norm.nonempty,
                    tail_bound: 0.0,
                    truncation_rank: rank,
                })
            }
            Some(Err(e)) => {
                return Err(Error::Truncation(format!(
                    "{e}; partial b² = {value:e} after {rank} sets, remaining tail ≤ {remaining:e}"
                )))
            }
            Some(Ok(e)) => {
                rank += 1;
                if !cover.covers(&e.u) {
                    value += e.gamma_hat;
                }
            }
        }
    }
}

/// Normalized representer of `I − I ∘ Ψ`, truncated to the leading uncovered sets.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    pub g: AnchoredFunction,
    /// `I(g) = ‖truncated residual‖_γ`.
    pub achieved: f64,
    pub achieved_sq: f64,
    pub sets_used: usize,
}

pub fn worst_case_residual(
    w: &WeightFamily,
    cover: &CoverFamily,
    rank_cap: usize,
) -> Result<Residual> {
    let mut picked = Vec::new();
    for e in SupportIter::new(w, None)?.take(rank_cap) {
        let e = e?;
        if e.gamma_hat > 0.0 && !cover.covers(&e.u) {
            picked.push(e);
        }
    }
    if picked.is_empty() {
        return Err(Error::DegenerateInput(
            "no uncovered set with positive weight among the leading ranks".into(),
        ));
    }
    let mass: f64 = picked.iter().map(|e| e.gamma_hat).sum();
    let scale = mass.sqrt();
    let g = AnchoredFunction::new(
        picked
            .iter()
            .map(|e| Term::mean_product(e.u.clone(), e.gamma / scale))
            .collect(),
    );
    Ok(Residual {
        g,
        achieved: scale,
        achieved_sq: mass,
        sets_used: picked.len(),
    })
}

/// `(2θ − 1) b²`, the squared-error lower bound for algorithms that stay in
/// the cover with probability at least `θ`.
pub fn lemma3_lower(theta: f64, b_sq: f64) -> Result<f64> {
    if !(theta > 0.5 && theta <= 1.0) {
        return Err(Error::Parameter(format!(
            "θ must lie in (1/2, 1], got {theta}"
        )));
    }
    Ok((2.0 * theta - 1.0) * b_sq)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum BoundModel {
    NestRan,
    UnrRes,
    UnrResOmega { omega: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SigmaTerm {
    pub sigma: usize,
    #[serde(with = "crate::serde_float")]
    pub decay: f64,
    #[serde(with = "crate::serde_float")]
    pub tstar: f64,
    #[serde(with = "crate::serde_float")]
    pub term: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentBound {
    #[serde(with = "crate::serde_float")]
    pub bound: f64,
    #[serde(flatten)]
    pub model: BoundModel,
    pub alpha: f64,
    pub s: f64,
    pub necessary_condition_ok: bool,
    pub per_sigma: Vec<SigmaTerm>,
}

impl ExponentBound {
    /// The largest convergence rate `1/p` compatible with the bound.
    pub fn rate_cap(&self) -> f64 {
        1.0 / self.bound
    }
}

fn sigma_term(model: BoundModel, s: f64, decay: f64, tstar: f64) -> f64 {
    if !(decay > 1.0) {
        return f64::INFINITY;
    }
    if decay.is_infinite() {
        return 0.0;
    }
    let numerator = match model {
        BoundModel::NestRan => 2.0 * s / tstar,
        BoundModel::UnrRes => 2.0 * (s / tstar).min(1.0),
        BoundModel::UnrResOmega { .. } => 2.0,
    };
    numerator / (decay - 1.0)
}

/// The bound from precomputed `(σ, decay_σ, t*_σ)` triples.
pub fn exponent_from_terms(
    model: BoundModel,
    alpha: f64,
    s: f64,
    terms: &[(usize, f64, f64)],
) -> Result<ExponentBound> {
    if !(alpha > 0.0) || !(s > 0.0) {
        return Err(Error::Parameter(format!(
            "need alpha > 0 and s > 0, got {alpha}, {s}"
        )));
    }
    if terms.is_empty() {
        return Err(Error::Parameter("at least one sigma must be probed".into()));
    }
    let per_sigma: Vec<SigmaTerm> = terms
        .iter()
        .map(|&(sigma, decay, tstar)| SigmaTerm {
            sigma,
            decay,
            tstar,
            term: sigma_term(model, s, decay, tstar),
        })
        .collect();
    let necessary_condition_ok = per_sigma.iter().all(|t| t.decay > 1.0);
    let bound = per_sigma.iter().map(|t| t.term).fold(2.0 / alpha, f64::max);
    Ok(ExponentBound {
        model,
        alpha,
        s,
        per_sigma,
        bound,
        necessary_condition_ok,
    })
}

/// Lower bound on the exponent of strong polynomial tractability, taking the
/// maximum over the probed cut-off orders.
pub fn exponent_lower_bound(
    model: BoundModel,
    alpha: f64,
    s: f64,
    w: &WeightFamily,
    sigmas: &[usize],
) -> Result<ExponentBound> {
    let mut terms = Vec::with_capacity(sigmas.len());
    for &sigma in sigmas {
        if sigma == 0 {
            return Err(Error::Parameter("sigma must be >= 1".into()));
        }
        let d = decay(w, Some(sigma), DEFAULT_DECAY_RANKS)?.value();
        let t = tstar(w, sigma)?.value().unwrap_or(sigma as f64);
        terms.push((sigma, d, t));
    }
    exponent_from_terms(model, alpha, s, &terms)
}

/// `{1, ..., 6}` together with the family's order and the model's `ω`.
pub fn default_sigmas(w: &WeightFamily, model: BoundModel) -> Vec<usize> {
    let mut out: Vec<usize> = (1..=6).collect();
    if let Some(order) = w.order() {
        out.push(order.max(1));
    }
    if let BoundModel::UnrResOmega { omega } = model {
        out.push(omega.max(1));
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// `max(2/κ, 2/(decay − 1))`.
pub fn pw11_from_decay(kappa: f64, decay: f64) -> Result<f64> {
    if !(kappa > 0.0) {
        return Err(Error::Parameter(format!(
            "kappa must be positive, got {kappa}"
        )));
    }
    if !(decay > 1.0) {
        return Ok(f64::INFINITY);
    }
    let second = if decay.is_infinite() {
        0.0
    } else {
        2.0 / (decay - 1.0)
    };
    Ok((2.0 / kappa).max(second))
}

/// Upper bound on the unrestricted restricted-class exponent using `decay_{γ,1}`.
pub fn pw11_upper_bound(kappa: f64, w: &WeightFamily) -> Result<f64> {
    pw11_from_decay(kappa, decay(w, Some(1), DEFAULT_DECAY_RANKS)?.value())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FoolingReport {
    /// `max(rmse_plus, rmse_minus)`.
    pub empirical_rmse: f64,
    pub rmse_plus: f64,
    pub rmse_minus: f64,
    /// `I(g)` of the truncated residual.
    pub achieved: f64,
    /// `√(b²)`, from the enumerated value.
    pub b: f64,
    pub replications: usize,
    pub certificate: Option<ClassCertificate>,
    /// Whether `empirical_rmse ≥ (1 − slack) · achieved`.
    pub passed: bool,
}

/// Runs `q` on the fooling pair `±g` and checks that it cannot beat `b`.
#[allow(clippy::too_many_arguments)]
pub fn fooling_experiment(
    q: &dyn Algorithm,
    kernel: &Kernel1D,
    w: &WeightFamily,
    cover: &CoverFamily,
    replications: usize,
    rank_cap: usize,
    slack: f64,
    seed: u64,
) -> Result<FoolingReport> {
    if replications == 0 {
        return Err(Error::Parameter(
            "at least one replication is required".into(),
        ));
    }
    // a finite cover never exhausts an infinite support, so only finite families can give b = 0
    let b_sq = if w.has_finite_support() {
        b_squared(w, cover, 1e-12)?.value
    } else {
        let norm = operator_norm_sq(w, 1e-10)?;
        (norm.nonempty - covered_mass(w, cover.sets())?).max(0.0)
    };
    if b_sq == 0.0 && w.has_finite_support() {
        return Ok(FoolingReport {
            empirical_rmse: 0.0,
            rmse_plus: 0.0,
            rmse_minus: 0.0,
            achieved: 0.0,
            b: 0.0,
            replications,
            certificate: None,
            passed: true,
        });
    }
    let residual = worst_case_residual(w, cover, rank_cap)?;
    let g = residual.g.bind(kernel);
    let neg = Negated(&g);
    let target = residual.achieved;
    let runs: Vec<_> = (0..2 * replications)
        .into_par_iter()
        .map(|i| {
            let seed = derive_seed(seed, i as u64);
            if i < replications {
                q.run(&g as &dyn Integrand, seed)
                    .map(|r| (r.estimate - target, r.ledger))
            } else {
                q.run(&neg, seed).map(|r| (r.estimate + target, r.ledger))
            }
        })
        .collect::<Result<_>>()?;
    let (errors, ledgers): (Vec<f64>, Vec<_>) = runs.into_iter().unzip();
    let certificate = certify_class(&ledgers, None)?;
    if certificate.class == AlgorithmClass::Ran {
        return Err(Error::Class(
            "algorithm does not use a fixed evaluation count".into(),
        ));
    }
    if let Some(v) = certificate.sets.iter().find(|v| !cover.covers(v)) {
        return Err(Error::Class(format!(
            "algorithm samples in {v}, outside the cover"
        )));
    }
    let rms = |e: &[f64]| (e.iter().map(|x| x * x).sum::<f64>() / e.len() as f64).sqrt();
    let rmse_plus = rms(&errors[..replications]);
    let rmse_minus = rms(&errors[replications..]);
    let empirical_rmse = rmse_plus.max(rmse_minus);
    Ok(FoolingReport {
        empirical_rmse,
        rmse_plus,
        rmse_minus,
        achieved: target,
        b: b_sq.sqrt(),
        replications,
        certificate: Some(certificate),
        passed: empirical_rmse >= (1.0 - slack) * target,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::{CostModel, DollarFunction};
    use crate::quad::{Method, QuadratureEngine};
    use crate::weights::{Generator, WeightedSet};
    use proptest::prelude::*;
    use std::sync::Arc;

    const C0: f64 = 1.0 / 3.0;

    fn vs(s: &str) -> VariableSet {
        s.parse().unwrap()
    }

    fn hand_family() -> WeightFamily {
        WeightFamily::explicit(vec![
            WeightedSet::new(vs("1"), 1.0),
            WeightedSet::new(vs("2"), 1.0 / 8.0),
            WeightedSet::new(vs("1,2"), 1.0 / 8.0),
        ])
        .unwrap()
        .bind(C0)
        .unwrap()
    }

    fn cubic() -> WeightFamily {
        WeightFamily::product(Generator::Power { c: 1.0, beta: 3.0 })
            .unwrap()
            .bind(C0)
            .unwrap()
    }

    fn sample_function() -> AnchoredFunction {
        AnchoredFunction::new(vec![
            Term::translates(vs("1"), 1.0, &[0.3]).unwrap(),
            Term::translates(vs("2"), -0.5, &[0.8]).unwrap(),
            Term::translates(vs("1,2"), 2.0, &[0.6, 0.1]).unwrap(),
        ])
    }

    #[test]
    fn projection_examples() {
        let f = sample_function();
        let p = project(&f, &CoverFamily::parse("1").unwrap());
        assert_eq!(p.terms.len(), 1);
        assert_eq!(p.terms[0].u, vs("1"));
        assert_eq!(project(&f, &CoverFamily::parse("1,2").unwrap()), f);
        let q = project(&f, &CoverFamily::parse("1;2").unwrap());
        assert!(q.terms.iter().all(|t| t.u.len() == 1));
        assert_eq!(q.terms.len(), 2);
    }

    #[test]
    fn projection_matches_anchor_restriction() {
        let k = Kernel1D::wiener();
        let f = sample_function();
        let p = project(&f, &CoverFamily::parse("1").unwrap());
        for x in [[0.2, 0.7], [0.9, 0.4]] {
            let pt = crate::sets::Point::dense(&x);
            let restricted = crate::rkhs::anchor_restrict(|y| f.eval(&k, y), &vs("1"), &pt);
            assert!((p.eval(&k, &pt) - restricted).abs() < 1e-15);
        }
    }

    #[test]
    fn bsq_examples() {
        let w = hand_family();
        let r = b_squared(&w, &CoverFamily::parse("1").unwrap(), 1e-14).unwrap();
        assert!((r.value - 1.0 / 18.0).abs() < 1e-16);
        assert_eq!(r.tail_bound, 0.0);
        let r = b_squared(&w, &CoverFamily::parse("1,2").unwrap(), 1e-14).unwrap();
        assert_eq!(r.value, 0.0);

        let w = cubic();
        let r = b_squared(&w, &CoverFamily::parse("1,2").unwrap(), 1e-5).unwrap();
        let complement = r.total_mass - r.covered_mass;
        assert!(r.tail_bound <= 1e-5);
        assert!(complement - r.value >= -1e-12);
        assert!(complement - r.value <= r.tail_bound + 1e-12);
    }

    #[test]
    fn residual_examples() {
        let k = Kernel1D::wiener();
        let w = hand_family();
        let res = worst_case_residual(&w, &CoverFamily::parse("1").unwrap(), 100).unwrap();
        assert!((res.achieved_sq - 1.0 / 18.0).abs() < 1e-16);
        assert!((res.g.norm(&k, &w).unwrap() - 1.0).abs() < 1e-12);
        assert!((res.g.integral(&k) - res.achieved).abs() < 1e-15);
        assert!(matches!(
            worst_case_residual(&w, &CoverFamily::parse("1,2").unwrap(), 100),
            Err(Error::DegenerateInput(_))
        ));
    }

    #[test]
    fn exponent_examples() {
        let b = exponent_lower_bound(BoundModel::NestRan, 3.0, 1.0, &cubic(), &[1]).unwrap();
        assert_eq!(b.bound, 1.0);
        assert!(b.necessary_condition_ok);
        let quad = WeightFamily::product(Generator::Power { c: 1.0, beta: 2.0 })
            .unwrap()
            .bind(C0)
            .unwrap();
        let b = exponent_lower_bound(
            BoundModel::UnrResOmega { omega: 2 },
            3.0,
            1.0,
            &quad,
            &[1, 2],
        )
        .unwrap();
        assert_eq!(b.bound, 2.0);
        let b = exponent_from_terms(BoundModel::UnrRes, 3.0, 1.0, &[(1, 1.0, 1.0)]).unwrap();
        assert_eq!(b.bound, f64::INFINITY);
        assert!(!b.necessary_condition_ok);
        let text = serde_json::to_string(&b).unwrap();
        assert!(text.contains("\"bound\":\"inf\""), "{text}");
        assert!(text.contains("\"model\":\"unr_res\""), "{text}");
    }

    #[test]
    fn pw11_examples() {
        assert_eq!(pw11_from_decay(3.0, 3.0).unwrap(), 1.0);
        assert_eq!(pw11_from_decay(3.0, 4.0).unwrap(), 2.0 / 3.0);
        assert_eq!(pw11_from_decay(3.0, f64::INFINITY).unwrap(), 2.0 / 3.0);
        assert_eq!(pw11_from_decay(3.0, 1.0).unwrap(), f64::INFINITY);
        assert_eq!(pw11_upper_bound(3.0, &cubic()).unwrap(), 1.0);
        let explicit = hand_family();
        assert_eq!(pw11_upper_bound(3.0, &explicit).unwrap(), 2.0 / 3.0);
    }

    #[test]
    fn lemma3_formula() {
        assert_eq!(lemma3_lower(1.0, 0.25).unwrap(), 0.25);
        assert_eq!(lemma3_lower(0.75, 0.25).unwrap(), 0.125);
        assert!(lemma3_lower(0.5, 0.25).is_err());
    }

    fn mc_on(v: &str) -> QuadratureEngine {
        QuadratureEngine {
            kernel: Kernel1D::wiener(),
            model: Arc::new(CostModel::unrestricted(DollarFunction::Poly { s: 1.0 }).unwrap()),
            method: Method::Mc { v: vs(v), n: 16 },
        }
    }

    #[test]
    fn fooling_examples() {
        let k = Kernel1D::wiener();
        let w = hand_family();
        let cover = CoverFamily::parse("1").unwrap();
        let r = fooling_experiment(&mc_on("1"), &k, &w, &cover, 50, 100, 0.05, 3).unwrap();
        assert!(r.passed);
        assert!(r.empirical_rmse >= 0.95 * (1.0f64 / 18.0).sqrt());

        let all = CoverFamily::parse("1,2").unwrap();
        let r = fooling_experiment(&mc_on("1"), &k, &w, &all, 10, 100, 0.05, 3).unwrap();
        assert_eq!(r.b, 0.0);
        assert!(r.passed);

        let err = fooling_experiment(&mc_on("1,2"), &k, &w, &cover, 10, 100, 0.05, 3).unwrap_err();
        assert!(matches!(err, Error::Class(_)));
    }

    fn arb_family() -> impl Strategy<Value = WeightFamily> {
        proptest::collection::btree_map(
            proptest::collection::btree_set(1u32..7, 1..4),
            0.0f64..1.0,
            1..12,
        )
        .prop_map(|m| {
            let sets = m
                .into_iter()
                .map(|(u, g)| WeightedSet::new(VariableSet::new(u).unwrap(), g))
                .collect();
            WeightFamily::explicit(sets).unwrap().bind(C0).unwrap()
        })
    }

    fn arb_cover() -> impl Strategy<Value = CoverFamily> {
        proptest::collection::vec(proptest::collection::btree_set(1u32..7, 0..4), 1..4).prop_map(
            |v| {
                CoverFamily::new(
                    v.into_iter()
                        .map(|s| VariableSet::new(s).unwrap())
                        .collect(),
                )
                .unwrap()
            },
        )
    }

    fn arb_function() -> impl Strategy<Value = AnchoredFunction> {
        proptest::collection::vec(
            (
                proptest::collection::btree_set(1u32..5, 0..3),
                -2.0f64..2.0,
                0.05f64..1.0,
            ),
            1..6,
        )
        .prop_map(|terms| {
            AnchoredFunction::new(
                terms
                    .into_iter()
                    .map(|(u, c, t)| {
                        let u = VariableSet::new(u).unwrap();
                        let ts = vec![t; u.len()];
                        Term::translates(u, c, &ts).unwrap()
                    })
                    .collect(),
            )
        })
    }

    proptest! {
        #[test]
        fn two_path_agreement(w in arb_family(), c in arb_cover()) {
            let r = b_squared(&w, &c, 1e-15).unwrap();
            prop_assert!((r.value - (r.total_mass - r.covered_mass)).abs() <= 1e-12);
            prop_assert!(r.value >= 0.0);
        }

        #[test]
        fn enlarging_cover_never_increases_bsq(w in arb_family(), c in arb_cover(), extra in proptest::collection::btree_set(1u32..7, 0..3)) {
            let before = b_squared(&w, &c, 1e-15).unwrap().value;
            let mut sets = c.sets().to_vec();
            sets[0] = sets[0].union(&VariableSet::new(extra).unwrap());
            let after = b_squared(&w, &CoverFamily::new(sets).unwrap(), 1e-15).unwrap().value;
            prop_assert!(after <= before + 1e-15);
        }

        #[test]
        fn projection_is_idempotent_and_orthogonal(f in arb_function(), c in arb_cover()) {
            let k = Kernel1D::wiener();
            let w = WeightFamily::product(Generator::Power { c: 1.0, beta: 2.0 }).unwrap();
            let p = project(&f, &c);
            prop_assert_eq!(project(&p, &c), p.clone());
            let total = f.norm(&k, &w).unwrap().powi(2);
            let parts = p.norm(&k, &w).unwrap().powi(2) + f.minus(&p).norm(&k, &w).unwrap().powi(2);
            prop_assert!((total - parts).abs() <= 1e-10 * total.max(1.0));
        }

        #[test]
        fn residual_has_unit_norm(w in arb_family(), c in arb_cover()) {
            let k = Kernel1D::wiener();
            if let Ok(res) = worst_case_residual(&w, &c, 1000) {
                prop_assert!((res.g.norm(&k, &w).unwrap() - 1.0).abs() < 1e-12);
                let bsq = b_squared(&w, &c, 1e-15).unwrap();
                prop_assert!(res.achieved_sq <= bsq.value + bsq.tail_bound + 1e-15);
                prop_assert!(res.achieved_sq >= bsq.value - 1e-15);
            }
        }

        #[test]
        fn bounds_are_monotone(s1 in 0.1f64..4.0, ds in 0.0f64..2.0, d1 in 1.01f64..6.0, dd in 0.0f64..3.0, t in 0.5f64..4.0) {
            let nest = |s: f64, d: f64| exponent_from_terms(BoundModel::NestRan, 3.0, s, &[(1, d, t)]).unwrap().bound;
            prop_assert!(nest(s1 + ds, d1) >= nest(s1, d1));
            for model in [BoundModel::NestRan, BoundModel::UnrRes, BoundModel::UnrResOmega { omega: 2 }] {
                let b = |d: f64| exponent_from_terms(model, 3.0, s1, &[(1, d, t)]).unwrap().bound;
                prop_assert!(b(d1 + dd) <= b(d1));
                prop_assert!(b(d1) >= 2.0 / 3.0);
            }
        }
    }
}
