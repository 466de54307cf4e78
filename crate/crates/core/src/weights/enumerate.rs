//! Best-first enumeration of the non-empty support in decreasing `γ̂` order.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use super::{lex_generator_value, Generator, OrderWeights, Shape, WeightFamily};
use crate::error::{Error, Result};
use crate::sets::VariableSet;

/// Default limit on frontier expansions.
pub const DEFAULT_CANDIDATE_CAP: usize = 10_000_000;

const MAX_LEADING: usize = 1_000_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Entry {
    pub rank: usize,
    pub u: VariableSet,
    pub gamma: f64,
    pub gamma_hat: f64,
}

/// The `m` leading sets `u_1(σ), u_2(σ), ...`; `sigma = None` means `σ = ∞`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrderedSupport {
    pub sigma: Option<usize>,
    pub entries: Vec<Entry>,
}

pub fn enumerate_ordered(
    w: &WeightFamily,
    sigma: Option<usize>,
    m: usize,
) -> Result<OrderedSupport> {
    if m == 0 {
        return Err(Error::Parameter("count must be >= 1".into()));
    }
    if sigma == Some(0) {
        return Err(Error::Parameter("sigma must be >= 1".into()));
    }
    let mut entries = Vec::with_capacity(m.min(1 << 16));
    for e in SupportIter::new(w, sigma)?.take(m) {
        entries.push(e?);
    }
    Ok(OrderedSupport { sigma, entries })
}

pub(crate) struct Ranked {
    pub gamma: f64,
    pub gamma_hat: f64,
    pub u: VariableSet,
}

impl PartialEq for Ranked {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Ranked {}
impl PartialOrd for Ranked {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Ranked {
    // max-heap: larger γ̂ first, then smaller |u|, then lexicographic
    fn cmp(&self, other: &Self) -> Ordering {
        self.gamma_hat
            .total_cmp(&other.gamma_hat)
            .then_with(|| other.u.cmp(&self.u))
    }
}

struct Node {
    ub: f64,
    u: Vec<u32>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Node {
    fn cmp(&self, other: &Self) -> Ordering {
        self.ub
            .total_cmp(&other.ub)
            .then_with(|| other.u.cmp(&self.u))
    }
}

struct ProductSearch<'a> {
    generator: &'a Generator,
    order: OrderWeights,
    c0: f64,
    /// `tail_max[m] = Π_{j > m} max(1, γ_j C0)` for `m < tail_max.len()`, 1 beyond.
    tail_max: Vec<f64>,
    /// `sup_{k' ≥ k} Γ_{k'}` for small `k`.
    gamma_sup: Vec<f64>,
    frontier: BinaryHeap<Node>,
}

impl<'a> ProductSearch<'a> {
    fn new(generator: &'a Generator, order: OrderWeights, c0: f64) -> Result<Self> {
        let x = |j: u64| generator.value(j) * c0;
        let mut leading = 0usize;
        while x(leading as u64 + 1) > 1.0 {
            leading += 1;
            if leading > MAX_LEADING {
                return Err(Error::Enumeration(
                    "more than 10^6 coordinates with γ_j C0 > 1".into(),
                ));
            }
        }
        let mut tail_max = vec![1.0; leading + 1];
        for m in (0..leading).rev() {
            tail_max[m] = tail_max[m + 1] * x(m as u64 + 1);
        }
        let span = order.explicit.len() + 2;
        let gamma_sup = (0..=span).map(|k| order.sup_from(k)).collect();
        let mut s = ProductSearch {
            generator,
            order,
            c0,
            tail_max,
            gamma_sup,
            frontier: BinaryHeap::new(),
        };
        s.push(vec![1]);
        Ok(s)
    }

    fn gamma_sup(&self, k: usize) -> f64 {
        if let Some(&g) = self.gamma_sup.get(k) {
            return g;
        }
        self.order.sup_from(k)
    }

    fn push(&mut self, u: Vec<u32>) {
        let m = *u.last().expect("non-empty");
        let prod: f64 = u
            .iter()
            .map(|&j| self.generator.value(j as u64) * self.c0)
            .product();
        let b = self.tail_max.get(m as usize).copied().unwrap_or(1.0);
        let ub = prod * b * self.gamma_sup(u.len()) * (1.0 + 1e-12);
        if ub > 0.0 {
            self.frontier.push(Node { ub, u });
        }
    }

    fn peek_bound(&self) -> Option<f64> {
        self.frontier.peek().map(|n| n.ub)
    }

    fn expand(&mut self) -> Option<Ranked> {
        let node = self.frontier.pop()?;
        let u = node.u;
        let m = *u.last().expect("non-empty");
        let mut appended = u.clone();
        appended.push(m + 1);
        self.push(appended);
        let mut shifted = u.clone();
        *shifted.last_mut().expect("non-empty") = m + 1;
        self.push(shifted);
        let gk = self.order.get(u.len());
        let gamma = u
            .iter()
            .fold(gk, |acc, &j| acc * self.generator.value(j as u64));
        let gamma_hat = gamma * self.c0.powi(u.len() as i32);
        Some(Ranked {
            gamma,
            gamma_hat,
            u: VariableSet::from_sorted_unchecked(u),
        })
    }
}

pub(crate) struct LexStream<'a> {
    generator: &'a Generator,
    omega: usize,
    sigma: Option<usize>,
    c0: f64,
    max_c0_power: f64,
    /// current word, letters in decreasing order
    word: Vec<u32>,
    rank: f64,
}

impl<'a> LexStream<'a> {
    pub(crate) fn new(
        generator: &'a Generator,
        omega: usize,
        sigma: Option<usize>,
        c0: f64,
    ) -> Self {
        let kappa = sigma.map_or(omega, |s| s.min(omega));
        let max_c0_power = (1..=kappa as i32).map(|k| c0.powi(k)).fold(0.0, f64::max);
        LexStream {
            generator,
            omega,
            sigma,
            c0,
            max_c0_power,
            word: vec![1],
            rank: 1.0,
        }
    }

    /// Bound on `γ̂` of every set not yet produced.
    fn bound(&self) -> f64 {
        lex_generator_value(self.generator, self.rank) * self.max_c0_power
    }

    fn advance(&mut self) {
        let w = &mut self.word;
        if w.len() < self.omega && *w.last().expect("non-empty") > 1 {
            w.push(1);
        } else {
            let mut p = w.len() - 1;
            loop {
                if p == 0 || w[p] + 1 < w[p - 1] {
                    w[p] += 1;
                    w.truncate(p + 1);
                    break;
                }
                p -= 1;
            }
        }
        self.rank += 1.0;
    }

    pub(crate) fn rank(&self) -> f64 {
        self.rank
    }

    /// Produces the set at the current rank, `None` when it exceeds `σ`.
    pub(crate) fn next_set(&mut self) -> Option<Ranked> {
        let gamma = lex_generator_value(self.generator, self.rank);
        if gamma <= 0.0 {
            return None;
        }
        let mut idx = self.word.clone();
        idx.reverse();
        let admissible = !self.sigma.is_some_and(|s| idx.len() > s);
        let k = idx.len() as i32;
        self.advance();
        admissible.then(|| Ranked {
            gamma,
            gamma_hat: gamma * self.c0.powi(k),
            u: VariableSet::from_sorted_unchecked(idx),
        })
    }
}

enum Source<'a> {
    Product(ProductSearch<'a>),
    Lex(LexStream<'a>, bool),
    Sorted(std::vec::IntoIter<Ranked>),
}

/// Lazy iterator over `u_1(σ), u_2(σ), ...`.
pub struct SupportIter<'a> {
    source: Source<'a>,
    pending: BinaryHeap<Ranked>,
    emitted: usize,
    pops: usize,
    cap: usize,
    failed: bool,
}

impl<'a> SupportIter<'a> {
    pub fn new(w: &'a WeightFamily, sigma: Option<usize>) -> Result<Self> {
        Self::with_cap(w, sigma, DEFAULT_CANDIDATE_CAP)
    }

    pub fn with_cap(w: &'a WeightFamily, sigma: Option<usize>, cap: usize) -> Result<Self> {
        let c0 = w.c0()?;
        let source = match w.class().shape(sigma) {
            Shape::ProductType { generator, order } => {
                Source::Product(ProductSearch::new(generator, order, c0)?)
            }
            Shape::Lex {
                generator,
                omega,
                sigma,
            } => Source::Lex(LexStream::new(generator, omega, sigma, c0), false),
            Shape::Finite { sets, sigma } => {
                let mut v: Vec<Ranked> = sets
                    .iter()
                    .filter(|s| {
                        !s.u.is_empty() && s.gamma > 0.0 && !sigma.is_some_and(|m| s.u.len() > m)
                    })
                    .map(|s| Ranked {
                        gamma: s.gamma,
                        gamma_hat: s.gamma * c0.powi(s.u.len() as i32),
                        u: s.u.clone(),
                    })
                    .collect();
                v.sort_by(|a, b| b.cmp(a));
                Source::Sorted(v.into_iter())
            }
        };
        Ok(SupportIter {
            source,
            pending: BinaryHeap::new(),
            emitted: 0,
            pops: 0,
            cap,
            failed: false,
        })
    }

    fn next_ranked(&mut self) -> Result<Option<Ranked>> {
        loop {
            let bound = match &mut self.source {
                Source::Sorted(it) => return Ok(it.next()),
                Source::Product(s) => s.peek_bound(),
                Source::Lex(s, done) => (!*done).then(|| s.bound()).filter(|b| *b > 0.0),
            };
            if let Some(top) = self.pending.peek() {
                if bound.is_none_or(|b| top.gamma_hat > b) {
                    return Ok(self.pending.pop());
                }
            }
            if bound.is_none() {
                return Ok(self.pending.pop());
            }
            self.pops += 1;
            if self.pops > self.cap {
                return Err(Error::Enumeration(format!(
                    "candidate cap of {} expansions reached after {} sets",
                    self.cap, self.emitted
                )));
            }
            match &mut self.source {
                Source::Product(s) => {
                    if let Some(r) = s.expand() {
                        if r.gamma_hat > 0.0 {
                            self.pending.push(r);
                        }
                    }
                }
                Source::Lex(s, done) => {
                    if lex_generator_value(s.generator, s.rank) <= 0.0 {
                        *done = true;
                    } else if let Some(r) = s.next_set() {
                        self.pending.push(r);
                    }
                }
                Source::Sorted(_) => unreachable!(),
            }
        }
    }
}

impl Iterator for SupportIter<'_> {
    type Item = Result<Entry>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.failed {
            return None;
        }
        match self.next_ranked() {
            Ok(Some(r)) => {
                self.emitted += 1;
                Some(Ok(Entry {
                    rank: self.emitted,
                    u: r.u,
                    gamma: r.gamma,
                    gamma_hat: r.gamma_hat,
                }))
            }
            Ok(None) => None,
            Err(e) => {
                self.failed = true;
                Some(Err(e))
            }
        }
    }
}
