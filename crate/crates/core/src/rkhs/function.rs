//! Explicitly represented elements of the weighted space with closed-form
//! integrals and norms.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::kernel::Kernel1D;
use crate::error::{Error, Result};
use crate::sets::{Point, VariableSet};
use crate::weights::WeightFamily;

/// A univariate building block of `H(k)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Atom {
    /// `k(·, t)`.
    Translate { t: f64 },
    /// `m_k = ∫ k(·, y) ρ(dy)`, the univariate factor of the integration representer.
    Mean,
}

impl Atom {
    #[inline]
    pub fn eval(&self, k: &Kernel1D, x: f64) -> f64 {
        match *self {
            Atom::Translate { t } => k.value(x, t),
            Atom::Mean => k.mean_value(x),
        }
    }

    pub fn integral(&self, k: &Kernel1D) -> f64 {
        match *self {
            Atom::Translate { t } => k.mean_value(t),
            Atom::Mean => k.c0(),
        }
    }

    /// Closed-form inner product in `H(k)`.
    pub fn inner(&self, other: &Atom, k: &Kernel1D) -> f64 {
        match (*self, *other) {
            (Atom::Translate { t: s }, Atom::Translate { t }) => k.value(s, t),
            (Atom::Translate { t }, Atom::Mean) | (Atom::Mean, Atom::Translate { t }) => {
                k.mean_value(t)
            }
            (Atom::Mean, Atom::Mean) => k.c0(),
        }
    }
}

/// `coeff * Π_{j ∈ u} atom_j(x_j)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTerm")]
pub struct Term {
    pub u: VariableSet,
    pub coeff: f64,
    pub atoms: Vec<Atom>,
}

#[derive(Deserialize)]
struct RawTerm {
    u: VariableSet,
    coeff: f64,
    #[serde(default)]
    atoms: Vec<Atom>,
}

impl TryFrom<RawTerm> for Term {
    type Error = Error;
    fn try_from(raw: RawTerm) -> Result<Self> {
        Term::new(raw.u, raw.coeff, raw.atoms)
    }
}

impl Term {
    pub fn new(u: VariableSet, coeff: f64, atoms: Vec<Atom>) -> Result<Self> {
        if atoms.len() != u.len() {
            return Err(Error::Shape(format!(
                "term on {u} needs {} atoms, got {}",
                u.len(),
                atoms.len()
            )));
        }
        if !coeff.is_finite() {
            return Err(Error::Parameter("term coefficient must be finite".into()));
        }
        Ok(Term { u, coeff, atoms })
    }

    pub fn constant(c: f64) -> Self {
        Term {
            u: VariableSet::empty(),
            coeff: c,
            atoms: Vec::new(),
        }
    }

    /// `coeff * Π_{j ∈ u} m_k(x_j)`.
    pub fn mean_product(u: VariableSet, coeff: f64) -> Self {
        let atoms = vec![Atom::Mean; u.len()];
        Term { u, coeff, atoms }
    }

    pub fn translates(u: VariableSet, coeff: f64, ts: &[f64]) -> Result<Self> {
        Term::new(
            u,
            coeff,
            ts.iter().map(|&t| Atom::Translate { t }).collect(),
        )
    }

    #[inline]
    pub fn eval(&self, k: &Kernel1D, x: &Point) -> f64 {
        let a = k.anchor();
        let mut acc = self.coeff;
        for (j, atom) in self.u.iter().zip(&self.atoms) {
            match x.get(j) {
                Some(xj) if xj != a => acc *= atom.eval(k, xj),
                // every atom vanishes at the anchor
                _ => return 0.0,
            }
        }
        acc
    }

    pub fn integral(&self, k: &Kernel1D) -> f64 {
        self.atoms
            .iter()
            .fold(self.coeff, |acc, atom| acc * atom.integral(k))
    }

    /// `⟨self, other⟩_{H_u}` for two terms on the same set.
    fn inner_same_set(&self, other: &Term, k: &Kernel1D) -> f64 {
        debug_assert_eq!(self.u, other.u);
        self.atoms
            .iter()
            .zip(&other.atoms)
            .fold(self.coeff * other.coeff, |acc, (a, b)| acc * a.inner(b, k))
    }
}

/// `f = Σ_terms coeff · Π_{j ∈ u} atom_j(x_j)`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AnchoredFunction {
    pub terms: Vec<Term>,
}

impl AnchoredFunction {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn new(terms: Vec<Term>) -> Self {
        AnchoredFunction { terms }
    }

    pub fn constant(c: f64) -> Self {
        AnchoredFunction::new(vec![Term::constant(c)])
    }

    pub fn push(&mut self, term: Term) {
        self.terms.push(term);
    }

    /// Union of all term sets.
    pub fn support(&self) -> VariableSet {
        self.terms
            .iter()
            .fold(VariableSet::empty(), |acc, t| acc.union(&t.u))
    }

    pub fn eval(&self, k: &Kernel1D, x: &Point) -> f64 {
        self.terms.iter().map(|t| t.eval(k, x)).sum()
    }

    /// Exact `I(f)`.
    pub fn integral(&self, k: &Kernel1D) -> f64 {
        self.terms.iter().map(|t| t.integral(k)).sum()
    }

    /// Terms grouped by their set, i.e. the anchored components `f_u`.
    pub fn components(&self) -> BTreeMap<&VariableSet, Vec<&Term>> {
        let mut groups: BTreeMap<&VariableSet, Vec<&Term>> = BTreeMap::new();
        for t in &self.terms {
            groups.entry(&t.u).or_default().push(t);
        }
        groups
    }

    /// `‖f_u‖²_{H_u}` for every component.
    pub fn component_norms_sq(&self, k: &Kernel1D) -> BTreeMap<VariableSet, f64> {
        self.components()
            .into_iter()
            .map(|(u, terms)| {
                let mut s = 0.0;
                for a in &terms {
                    for b in &terms {
                        s += a.inner_same_set(b, k);
                    }
                }
                (u.clone(), s.max(0.0))
            })
            .collect()
    }

    /// `‖f‖_γ = (Σ_u γ_u⁻¹ ‖f_u‖²_{H_u})^{1/2}`.
    pub fn norm(&self, k: &Kernel1D, w: &WeightFamily) -> Result<f64> {
        let mut total = 0.0;
        for (u, nsq) in self.component_norms_sq(k) {
            let gamma = w.weight_of(&u);
            if gamma <= 0.0 {
                if self.terms.iter().any(|t| t.u == u && t.coeff != 0.0) {
                    return Err(Error::NotInSpace(format!("component on {u} has weight 0")));
                }
                continue;
            }
            total += nsq / gamma;
        }
        Ok(total.sqrt())
    }

    /// Multiplies every coefficient by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        AnchoredFunction::new(
            self.terms
                .iter()
                .map(|t| Term {
                    coeff: t.coeff * c,
                    ..t.clone()
                })
                .collect(),
        )
    }

    /// Rescales to unit `γ`-norm.
    pub fn normalized(&self, k: &Kernel1D, w: &WeightFamily) -> Result<Self> {
        let n = self.norm(k, w)?;
        if n == 0.0 {
            return Err(Error::DegenerateInput(
                "cannot normalize the zero function".into(),
            ));
        }
        Ok(self.scaled(1.0 / n))
    }

    /// `f - g` as a term list.
    pub fn minus(&self, other: &AnchoredFunction) -> Self {
        let mut terms = self.terms.clone();
        terms.extend(other.scaled(-1.0).terms);
        AnchoredFunction::new(terms)
    }

    pub fn bind<'a>(&'a self, kernel: &'a Kernel1D) -> BoundFunction<'a> {
        BoundFunction { f: self, kernel }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

/// A black-box integrand: anything that can be evaluated at a sparse point.
pub trait Integrand: Sync {
    fn eval(&self, x: &Point) -> f64;
}

impl<F> Integrand for F
where
    F: Fn(&Point) -> f64 + Sync,
{
    fn eval(&self, x: &Point) -> f64 {
        self(x)
    }
}

/// An [`AnchoredFunction`] paired with the kernel its atoms refer to.
#[derive(Clone, Copy, Debug)]
pub struct BoundFunction<'a> {
    pub f: &'a AnchoredFunction,
    pub kernel: &'a Kernel1D,
}

impl Integrand for BoundFunction<'_> {
    fn eval(&self, x: &Point) -> f64 {
        self.f.eval(self.kernel, x)
    }
}

/// The negation of an integrand.
pub struct Negated<'a>(pub &'a dyn Integrand);

impl Integrand for Negated<'_> {
    fn eval(&self, x: &Point) -> f64 {
        -self.0.eval(x)
    }
}
