//! Decay and `t*` exponents, `‖I‖²`, and downset masses.

use serde::{Deserialize, Serialize};

use super::enumerate::LexStream;
use super::{
    count_small_subsets, lex_generator_value, Generator, Shape, SupportIter, WeightClass,
    WeightFamily,
};
use crate::error::{Error, Result};
use crate::sets::VariableSet;
use crate::stats::fit_line;

pub const DEFAULT_DECAY_RANKS: usize = 1024;

const MAX_TRUNCATION: usize = 1 << 27;
const MAX_COVER_SETS: usize = 20;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    pub sigma: Option<usize>,
    #[serde(with = "crate::serde_float::option")]
    pub closed_form: Option<f64>,
    #[serde(with = "crate::serde_float")]
    pub estimate: f64,
    /// Standard error of the fitted slope.
    pub slope_se: f64,
    /// Rank interval used by the regression.
    pub window: (usize, usize),
    /// Root-mean-square residual of the fit.
    pub residual: f64,
    pub saturated: bool,
}

impl DecayReport {
    /// Closed form when known, otherwise the estimate.
    pub fn value(&self) -> f64 {
        self.closed_form.unwrap_or(self.estimate)
    }
}

fn closed_form_decay(class: &WeightClass) -> Option<f64> {
    match class {
        WeightClass::Product { generator }
        | WeightClass::FiniteProduct { generator, .. }
        | WeightClass::Pod { generator, .. } => generator.power_law().map(|(_, beta)| beta),
        WeightClass::CutOff { base, .. } => closed_form_decay(base),
        _ => None,
    }
}

/// `decay_{γ,σ}`: closed form for power-law product-type classes plus a
/// regression estimate over the tail half of the first `ranks` sets.
pub fn decay(w: &WeightFamily, sigma: Option<usize>, ranks: usize) -> Result<DecayReport> {
    if ranks < 16 {
        return Err(Error::Parameter("decay needs at least 16 ranks".into()));
    }
    let closed_form = closed_form_decay(w.class());
    let mut values = Vec::with_capacity(ranks);
    for e in SupportIter::new(w, sigma)?.take(ranks) {
        values.push(e?.gamma_hat);
    }
    let lo = ranks / 2 + 1;
    if values.len() < ranks {
        return Ok(DecayReport {
            sigma,
            closed_form: closed_form.or(Some(f64::INFINITY)),
            estimate: f64::INFINITY,
            slope_se: 0.0,
            window: (lo, ranks),
            residual: 0.0,
            saturated: true,
        });
    }
    let xs: Vec<f64> = (lo..=ranks).map(|j| (j as f64).ln()).collect();
    let ys: Vec<f64> = (lo..=ranks).map(|j| -values[j - 1].ln()).collect();
    let (slope, _, se, residual) = fit_line(&xs, &ys);
    Ok(DecayReport {
        sigma,
        closed_form,
        estimate: slope,
        slope_se: se,
        window: (lo, ranks),
        residual,
        saturated: false,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TstarReport {
    pub sigma: usize,
    pub closed_form: Option<f64>,
    pub estimate: Option<f64>,
    /// `(m, count of u_i(σ) ⊆ [m])`.
    pub counts: Vec<(u32, f64)>,
    pub saturated: bool,
}

impl TstarReport {
    pub fn value(&self) -> Option<f64> {
        self.closed_form.or(self.estimate)
    }
}

const TSTAR_GRID: [u32; 5] = [4, 8, 16, 32, 64];

fn closed_form_tstar(class: &WeightClass, sigma: usize) -> (Option<f64>, bool) {
    let finite = |g: &Generator| g.support_len().is_some();
    match class {
        WeightClass::Product { generator } if !finite(generator) => (Some(sigma as f64), false),
        WeightClass::FiniteProduct { generator, order } if !finite(generator) => {
            (Some(sigma.min(*order) as f64), false)
        }
        WeightClass::FiniteIntersection { .. } => (Some(1.0), false),
        WeightClass::LexOrdered { order, generator } if !finite(generator) => {
            (Some(sigma.min(*order) as f64), false)
        }
        WeightClass::Pod { generator, .. } if !finite(generator) => (None, false),
        WeightClass::CutOff { base, sigma: s } => closed_form_tstar(base, sigma.min(*s)),
        _ => (Some(0.0), true),
    }
}

fn count_inside(w: &WeightFamily, sigma: usize, m: u32) -> f64 {
    match w.class().shape(Some(sigma)) {
        Shape::ProductType { generator, order } => {
            let p = (1..=m as u64).filter(|&j| generator.value(j) > 0.0).count() as u64;
            let mut total = 0.0;
            let mut binom = 1.0;
            for k in 1..=p.min(sigma as u64) {
                binom = binom * (p - k + 1) as f64 / k as f64;
                if order.get(k as usize) > 0.0 {
                    total += binom;
                }
            }
            total
        }
        Shape::Finite { sets, sigma } => sets
            .iter()
            .filter(|s| {
                s.gamma > 0.0
                    && !s.u.is_empty()
                    && !sigma.is_some_and(|m| s.u.len() > m)
                    && s.u.max_index().is_some_and(|x| x <= m)
            })
            .count() as f64,
        Shape::Lex {
            generator,
            omega,
            sigma,
        } => {
            let kappa = sigma.map_or(omega, |s| s.min(omega));
            match generator {
                Generator::Power { .. } => count_small_subsets(m as u64, kappa),
                Generator::List(_) => {
                    let mut stream = LexStream::new(generator, omega, sigma, 1.0);
                    let mut count = 0.0;
                    while lex_generator_value(generator, stream.rank()) > 0.0 {
                        if let Some(r) = stream.next_set() {
                            if r.u.max_index().is_some_and(|x| x <= m) {
                                count += 1.0;
                            }
                        }
                    }
                    count
                }
            }
        }
    }
}

/// `t*_σ`: closed form per class and a growth-exponent fit of
/// `|{i : u_i(σ) ⊆ [m]}|` over `m ∈ {16, 32, 64}`.
pub fn tstar(w: &WeightFamily, sigma: usize) -> Result<TstarReport> {
    if sigma == 0 {
        return Err(Error::Parameter("sigma must be >= 1".into()));
    }
    let (closed_form, saturated) = closed_form_tstar(w.class(), sigma);
    let counts: Vec<(u32, f64)> = TSTAR_GRID
        .iter()
        .map(|&m| (m, count_inside(w, sigma, m)))
        .collect();
    let tail = &counts[2..];
    let estimate = if tail.iter().all(|(_, c)| *c > 0.0) {
        let xs: Vec<f64> = tail.iter().map(|(m, _)| (*m as f64).ln()).collect();
        let ys: Vec<f64> = tail.iter().map(|(_, c)| c.ln()).collect();
        fit_line(&xs, &ys).0
    } else {
        0.0
    };
    Ok(TstarReport {
        sigma,
        closed_form,
        estimate: Some(estimate),
        counts,
        saturated,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormSq {
    /// `Σ_{u ∈ 𝒰} γ̂_u`, including `u = ∅`.
    pub full: f64,
    /// `Σ_{u ≠ ∅} γ̂_u`.
    pub nonempty: f64,
    /// Bound on `|full − true value|`.
    pub tail_bound: f64,
    /// Number of leading coordinates or ranks summed explicitly.
    pub truncation: usize,
}

fn power_tail(a: f64, beta: f64, from: f64) -> f64 {
    // ∫_from^∞ a t^{-β} dt
    a * from.powf(1.0 - beta) / (beta - 1.0)
}

/// `‖I‖² = Σ_u γ̂_u`, with the truncation tail bounded by `tail_tol`.
pub fn operator_norm_sq(w: &WeightFamily, tail_tol: f64) -> Result<NormSq> {
    let c0 = w.c0()?;
    if !(tail_tol > 0.0) {
        return Err(Error::Parameter("tail tolerance must be positive".into()));
    }
    if !w.is_summable() {
        return Err(Error::Parameter("weights are not summable".into()));
    }
    let empty = w.weight_of(&VariableSet::empty());
    let finish = |full: f64, tail_bound: f64, truncation: usize| NormSq {
        full,
        nonempty: full - empty,
        tail_bound,
        truncation,
    };
    match w.shape() {
        Shape::Finite { sets, sigma } => {
            let full = sets
                .iter()
                .filter(|s| !sigma.is_some_and(|m| s.u.len() > m))
                .map(|s| s.gamma * c0.powi(s.u.len() as i32))
                .sum();
            Ok(finish(full, 0.0, sets.len()))
        }
        Shape::ProductType { generator, order } => {
            let x = |j: usize| generator.value(j as u64) * c0;
            let kmax = order.max_order();
            let (beta, a) = match generator.power_law() {
                Some((c, beta)) => (beta, c * c0),
                None => (f64::NAN, 0.0),
            };
            let exact_len = generator.support_len();
            let mut j_max = exact_len.unwrap_or(1024);
            loop {
                // tail sums over j > j_max: S ∈ [s_lo, s_hi], Σ x_j² ≤ q
                let (s_lo, s_hi, q) = if exact_len.is_some() {
                    (0.0, 0.0, 0.0)
                } else {
                    let jm = j_max as f64;
                    (
                        power_tail(a, beta, jm + 1.0),
                        power_tail(a, beta, jm + 0.5),
                        power_tail(a * a, 2.0 * beta, jm),
                    )
                };
                let (value, bound) = match kmax {
                    None => {
                        let log_p: f64 = (1..=j_max).map(|j| x(j).ln_1p()).sum();
                        let lo = log_p + s_lo - 0.5 * q;
                        let hi = log_p + s_hi;
                        let (elo, ehi) = (lo.exp(), hi.exp());
                        ((elo + ehi) / 2.0, (ehi - elo) / 2.0)
                    }
                    Some(kmax) => {
                        let mut e = vec![0.0; kmax + 1];
                        e[0] = 1.0;
                        for j in 1..=j_max {
                            let xj = x(j);
                            for k in (1..=kmax).rev() {
                                e[k] += e[k - 1] * xj;
                            }
                        }
                        let lower: f64 = (0..=kmax).map(|k| order.get(k) * e[k]).sum();
                        // e_k(all) ≤ Σ_i e_{k-i}(head) S^i / i!
                        let mut upper = 0.0;
                        for k in 0..=kmax {
                            let mut fact = 1.0;
                            let mut acc = 0.0;
                            for i in 0..=k {
                                if i > 0 {
                                    fact *= s_hi / i as f64;
                                }
                                acc += e[k - i] * fact;
                            }
                            upper += order.get(k) * acc;
                        }
                        ((lower + upper) / 2.0, (upper - lower) / 2.0)
                    }
                };
                if bound <= tail_tol || exact_len.is_some() {
                    return Ok(finish(value, bound, j_max));
                }
                if j_max >= MAX_TRUNCATION {
                    return Err(Error::Enumeration(format!(
                        "tail bound {bound:e} above {tail_tol:e} after {j_max} coordinates"
                    )));
                }
                j_max *= 2;
            }
        }
        Shape::Lex {
            generator,
            omega,
            sigma,
        } => {
            let kappa = sigma.map_or(omega, |s| s.min(omega));
            let max_pow = (1..=kappa as i32).map(|k| c0.powi(k)).fold(0.0, f64::max);
            let mut stream = LexStream::new(generator, omega, sigma, c0);
            let mut sum = empty;
            let mut block = 1024usize;
            loop {
                while stream.rank() <= block as f64 {
                    if lex_generator_value(generator, stream.rank()) <= 0.0 {
                        return Ok(finish(sum, 0.0, stream.rank() as usize - 1));
                    }
                    if let Some(r) = stream.next_set() {
                        sum += r.gamma_hat;
                    }
                }
                // Σ_{r > R} g(r) ≤ ∫_R^∞ g for the convex power generator
                let (c, beta) = generator.power_law().expect("list generators terminate");
                let bound = max_pow * power_tail(c, beta, block as f64) / 2.0;
                if bound <= tail_tol {
                    return Ok(finish(sum + bound, bound, block));
                }
                if block >= MAX_TRUNCATION {
                    return Err(Error::Enumeration(format!(
                        "tail bound {bound:e} above {tail_tol:e} after {block} ranks"
                    )));
                }
                block *= 2;
            }
        }
    }
}

/// Mass `Σ γ̂_u` over non-empty `u` contained in some member of `cover`.
pub fn covered_mass(w: &WeightFamily, cover: &[VariableSet]) -> Result<f64> {
    let c0 = w.c0()?;
    let cover: Vec<&VariableSet> = cover.iter().filter(|v| !v.is_empty()).collect();
    if cover.len() > MAX_COVER_SETS {
        return Err(Error::Budget(format!(
            "cover with {} sets exceeds the limit of {MAX_COVER_SETS}",
            cover.len()
        )));
    }
    let empty = w.weight_of(&VariableSet::empty());
    let downset = |v: &VariableSet| -> Result<f64> {
        Ok(w.weighted_subset_sum(v, &vec![c0; v.len()])? - empty)
    };
    let mut total = 0.0;
    for mask in 1u64..1 << cover.len() {
        let mut inter: Option<VariableSet> = None;
        for (i, v) in cover.iter().enumerate() {
            if mask >> i & 1 == 1 {
                inter = Some(match inter {
                    None => (*v).clone(),
                    Some(s) => s.intersection(v),
                });
            }
        }
        let inter = inter.expect("non-empty mask");
        let sign = if mask.count_ones() % 2 == 1 {
            1.0
        } else {
            -1.0
        };
        if !inter.is_empty() {
            total += sign * downset(&inter)?;
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::WeightedSet;

    const C0: f64 = 1.0 / 3.0;

    fn vs(s: &str) -> VariableSet {
        s.parse().unwrap()
    }

    fn cubic() -> WeightFamily {
        WeightFamily::product(Generator::Power { c: 1.0, beta: 3.0 })
            .unwrap()
            .bind(C0)
            .unwrap()
    }

    #[test]
    fn decay_of_cubic_product() {
        let w = cubic();
        let r1 = decay(&w, Some(1), 1000).unwrap();
        assert_eq!(r1.closed_form, Some(3.0));
        assert!((r1.estimate - 3.0).abs() < 0.01, "{}", r1.estimate);
        let r3 = decay(&w, Some(3), 1000).unwrap();
        assert_eq!(r3.closed_form, Some(3.0));
        assert!(r3.estimate < 3.0 + 1e-9);
    }

    // Sets of size up to σ add a log^{σ-1} factor to the rank count, so on
    // 10^3 ranks the σ = 3 slope sits near 2.47 while σ = 1 gives 3.00.
    #[test]
    #[ignore = "tail-half slope at sigma = 3 is 2.47 on 1000 ranks; the gap closes only logarithmically"]
    fn decay_estimates_agree_across_sigma() {
        let w = cubic();
        let r1 = decay(&w, Some(1), 1000).unwrap();
        let r3 = decay(&w, Some(3), 1000).unwrap();
        assert!(
            (r1.estimate - r3.estimate).abs() < 0.1,
            "{} vs {}",
            r1.estimate,
            r3.estimate
        );
    }

    #[test]
    fn decay_of_explicit_family_saturates() {
        let w = WeightFamily::explicit(vec![WeightedSet::new(vs("1"), 0.5)])
            .unwrap()
            .bind(C0)
            .unwrap();
        let r = decay(&w, None, 16).unwrap();
        assert!(r.saturated);
        assert_eq!(r.value(), f64::INFINITY);
        assert!(decay(&w, None, 8).is_err());
    }

    #[test]
    fn tstar_closed_forms_and_estimates() {
        let prod = cubic();
        let r = tstar(&prod, 2).unwrap();
        assert_eq!(r.closed_form, Some(2.0));
        // brute-force count of subsets of [m] with 1 ≤ |u| ≤ 2
        for (m, c) in &r.counts {
            if *m <= 16 {
                let brute = VariableSet::range(*m)
                    .subsets()
                    .filter(|u| !u.is_empty() && u.len() <= 2)
                    .count();
                assert_eq!(*c, brute as f64);
            }
        }
        assert!((r.estimate.unwrap() - 2.0).abs() < 0.25);

        let lex = WeightFamily::lex_ordered(3, Generator::Power { c: 1.0, beta: 2.0 })
            .unwrap()
            .bind(C0)
            .unwrap();
        let r = tstar(&lex, 2).unwrap();
        assert_eq!(r.closed_form, Some(2.0));
        assert!((r.estimate.unwrap() - 2.0).abs() < 0.25);

        let fi_sets: Vec<_> = (1..=40)
            .map(|i| WeightedSet::new(VariableSet::new([2 * i - 1, 2 * i]).unwrap(), 0.5))
            .chain((1..=80).map(|i| WeightedSet::new(VariableSet::new([i]).unwrap(), 0.25)))
            .collect();
        let fi = WeightFamily::finite_intersection(fi_sets, 2)
            .unwrap()
            .bind(C0)
            .unwrap();
        let r = tstar(&fi, 3).unwrap();
        assert_eq!(r.closed_form, Some(1.0));
        assert!((r.estimate.unwrap() - 1.0).abs() < 0.25);

        let fp = WeightFamily::finite_product(Generator::Power { c: 1.0, beta: 2.0 }, 2)
            .unwrap()
            .bind(C0)
            .unwrap();
        let r = tstar(&fp, 3).unwrap();
        assert_eq!(r.closed_form, Some(2.0));
        assert!((r.estimate.unwrap() - 2.0).abs() < 0.25);
    }

    #[test]
    fn norm_of_cubic_product() {
        let n = operator_norm_sq(&cubic(), 1e-10).unwrap();
        let partial: f64 = (1..=1_000_000u32)
            .map(|j| 1.0 + (j as f64).powi(-3) / 3.0)
            .product();
        assert!(n.tail_bound <= 1e-10);
        assert!((n.full - partial).abs() < 1e-8, "{} vs {partial}", n.full);
        assert!((n.nonempty - (n.full - 1.0)).abs() < 1e-15);
    }

    #[test]
    fn norm_of_small_explicit_families() {
        let w = WeightFamily::explicit(vec![
            WeightedSet::new(VariableSet::empty(), 1.0),
            WeightedSet::new(vs("1"), 2.0),
        ])
        .unwrap()
        .bind(C0)
        .unwrap();
        let n = operator_norm_sq(&w, 1e-12).unwrap();
        assert!((n.full - (1.0 + 2.0 / 3.0)).abs() < 1e-15);
        let only_empty = WeightFamily::explicit(vec![WeightedSet::new(VariableSet::empty(), 1.0)])
            .unwrap()
            .bind(C0)
            .unwrap();
        assert_eq!(operator_norm_sq(&only_empty, 1e-12).unwrap().full, 1.0);
    }

    fn brute_norm(w: &WeightFamily, n: u32) -> f64 {
        VariableSet::range(n)
            .subsets()
            .map(|u| w.hatweight_of(&u).unwrap())
            .sum()
    }

    #[test]
    fn norm_matches_brute_force_on_finite_generators() {
        let gen = Generator::List(vec![0.9, 0.7, 0.5, 0.5, 0.2, 0.1, 0.05]);
        for w in [
            WeightFamily::product(gen.clone()).unwrap(),
            WeightFamily::finite_product(gen.clone(), 2).unwrap(),
            WeightFamily::pod(gen.clone(), vec![1.0, 1.0, 3.0, 0.5]).unwrap(),
            WeightFamily::lex_ordered(2, Generator::List(vec![1.0, 0.5, 0.4, 0.3, 0.2, 0.1]))
                .unwrap(),
        ] {
            let w = w.bind(0.7).unwrap();
            let n = operator_norm_sq(&w, 1e-12).unwrap();
            assert!(
                (n.full - brute_norm(&w, 9)).abs() < 1e-13,
                "{:?}",
                w.class()
            );
        }
    }

    #[test]
    fn norm_brackets_power_families() {
        let fp = WeightFamily::finite_product(Generator::Power { c: 1.0, beta: 2.0 }, 2)
            .unwrap()
            .bind(C0)
            .unwrap();
        let n = operator_norm_sq(&fp, 1e-6).unwrap();
        // 1 + S1 + (S1² − S2)/2 with S1 = ζ(2)/3, S2 = ζ(4)/9
        let s1 = std::f64::consts::PI.powi(2) / 18.0;
        let s2 = std::f64::consts::PI.powi(4) / 810.0;
        let exact = 1.0 + s1 + (s1 * s1 - s2) / 2.0;
        assert!((n.full - exact).abs() <= n.tail_bound + 1e-12);

        let lex = WeightFamily::lex_ordered(2, Generator::Power { c: 1.0, beta: 3.0 })
            .unwrap()
            .bind(C0)
            .unwrap();
        let n = operator_norm_sq(&lex, 1e-7).unwrap();
        assert!(n.tail_bound <= 1e-7);
        let head: f64 = SupportIter::new(&lex, None)
            .unwrap()
            .take(20_000)
            .map(|e| e.unwrap().gamma_hat)
            .sum();
        assert!(n.full >= 1.0 + head - 1e-12);
    }

    #[test]
    fn covered_mass_matches_brute_force() {
        let w = cubic();
        let cover = [vs("1,2,3"), vs("2,4"), vs("3,4,5")];
        let got = covered_mass(&w, &cover).unwrap();
        let brute: f64 = VariableSet::range(5)
            .subsets()
            .filter(|u| !u.is_empty() && cover.iter().any(|v| u.is_subset(v)))
            .map(|u| w.hatweight_of(&u).unwrap())
            .sum();
        assert!((got - brute).abs() < 1e-15);
    }
}
