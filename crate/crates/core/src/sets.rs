//! Finite coordinate sets and sparse points of `D^N`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite set of positive coordinate indices, stored strictly increasing.
///
/// The ordering is by cardinality first and then lexicographic on the
/// increasing index sequence, which is also the tie-break used when
/// enumerating weights.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct VariableSet(Vec<u32>);

impl VariableSet {
    pub fn empty() -> Self {
        VariableSet(Vec::new())
    }

    /// Builds a set from arbitrary indices, sorting and removing duplicates.
    pub fn new<I: IntoIterator<Item = u32>>(indices: I) -> Result<Self> {
        let mut v: Vec<u32> = indices.into_iter().collect();
        if v.contains(&0) {
            return Err(Error::Parameter("coordinate indices start at 1".into()));
        }
        v.sort_unstable();
        v.dedup();
        Ok(VariableSet(v))
    }

    /// `[n] = {1, ..., n}`.
    pub fn range(n: u32) -> Self {
        VariableSet((1..=n).collect())
    }

    pub(crate) fn from_sorted_unchecked(v: Vec<u32>) -> Self {
        debug_assert!(v.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(v.first().is_none_or(|&j| j > 0));
        VariableSet(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn indices(&self) -> &[u32] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        self.0.iter().copied()
    }

    pub fn max_index(&self) -> Option<u32> {
        self.0.last().copied()
    }

    pub fn contains(&self, j: u32) -> bool {
        self.0.binary_search(&j).is_ok()
    }

    pub fn is_subset(&self, other: &VariableSet) -> bool {
        if self.len() > other.len() {
            return false;
        }
        let mut it = other.0.iter();
        'outer: for &a in &self.0 {
            for &b in it.by_ref() {
                match b.cmp(&a) {
                    Ordering::Less => continue,
                    Ordering::Equal => continue 'outer,
                    Ordering::Greater => return false,
                }
            }
            return false;
        }
        true
    }

    pub fn intersects(&self, other: &VariableSet) -> bool {
        let (mut i, mut k) = (0, 0);
        while i < self.0.len() && k < other.0.len() {
            match self.0[i].cmp(&other.0[k]) {
                Ordering::Less => i += 1,
                Ordering::Greater => k += 1,
                Ordering::Equal => return true,
            }
        }
        false
    }

    pub fn union(&self, other: &VariableSet) -> VariableSet {
        let mut v = Vec::with_capacity(self.len() + other.len());
        let (mut i, mut k) = (0, 0);
        while i < self.0.len() || k < other.0.len() {
            let take_left = k >= other.0.len() || (i < self.0.len() && self.0[i] <= other.0[k]);
            if take_left {
                if k < other.0.len() && other.0[k] == self.0[i] {
                    k += 1;
                }
                v.push(self.0[i]);
                i += 1;
            } else {
                v.push(other.0[k]);
                k += 1;
            }
        }
        VariableSet(v)
    }

    pub fn intersection(&self, other: &VariableSet) -> VariableSet {
        VariableSet(
            self.0
                .iter()
                .copied()
                .filter(|&j| other.contains(j))
                .collect(),
        )
    }

    /// The subset selected by the bits of `mask` (bit `i` keeps the `i`-th smallest index).
    pub fn sub_by_mask(&self, mask: u64) -> VariableSet {
        VariableSet(
            self.0
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &j)| j)
                .collect(),
        )
    }

    /// All subsets, in mask order. Callers guard the cardinality.
    pub fn subsets(&self) -> impl Iterator<Item = VariableSet> + '_ {
        assert!(
            self.len() < 64,
            "subset enumeration limited to fewer than 64 indices"
        );
        (0..1u64 << self.len()).map(move |m| self.sub_by_mask(m))
    }
}

impl Ord for VariableSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for VariableSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl TryFrom<Vec<u32>> for VariableSet {
    type Error = Error;
    fn try_from(v: Vec<u32>) -> Result<Self> {
        VariableSet::new(v)
    }
}

impl From<VariableSet> for Vec<u32> {
    fn from(s: VariableSet) -> Self {
        s.0
    }
}

impl fmt::Display for VariableSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, j) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{j}")?;
        }
        write!(f, "}}")
    }
}

/// Parses `"1,2,5"`, `"{1,2}"`, `"1..4"` or the empty string / `"{}"` for the empty set.
impl FromStr for VariableSet {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s
            .trim()
            .trim_start_matches('{')
            .trim_end_matches('}')
            .trim();
        if s.is_empty() {
            return Ok(VariableSet::empty());
        }
        let mut out = Vec::new();
        for part in s.split(',') {
            let part = part.trim();
            if let Some((a, b)) = part.split_once("..") {
                let a: u32 = parse_index(a)?;
                let b: u32 = parse_index(b)?;
                out.extend(a..=b);
            } else {
                out.push(parse_index(part)?);
            }
        }
        VariableSet::new(out)
    }
}

fn parse_index(s: &str) -> Result<u32> {
    s.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("invalid coordinate index `{s}`")))
}

/// A point of `D^N` with finitely many explicitly stored coordinates.
///
/// Coordinates that are not stored equal the anchor.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Point {
    set: VariableSet,
    values: Vec<f64>,
}

impl Point {
    /// The anchor point `(a, a, ...)`.
    pub fn anchor() -> Self {
        Point::default()
    }

    pub fn new(set: VariableSet, values: Vec<f64>) -> Result<Self> {
        if set.len() != values.len() {
            return Err(Error::Shape(format!(
                "{} coordinates supplied for a set of {} indices",
                values.len(),
                set.len()
            )));
        }
        Ok(Point { set, values })
    }

    /// Dense prefix point `(x_1, ..., x_n, a, a, ...)`.
    pub fn dense(values: &[f64]) -> Self {
        Point {
            set: VariableSet::range(values.len() as u32),
            values: values.to_vec(),
        }
    }

    pub fn stored_set(&self) -> &VariableSet {
        &self.set
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, j: u32) -> Option<f64> {
        self.set.0.binary_search(&j).ok().map(|i| self.values[i])
    }

    pub fn coord(&self, j: u32, anchor: f64) -> f64 {
        self.get(j).unwrap_or(anchor)
    }

    /// The smallest `u` with the point in `X_{u,a}`: its non-anchor coordinates.
    pub fn active_set(&self, anchor: f64) -> VariableSet {
        VariableSet(
            self.set
                .0
                .iter()
                .zip(&self.values)
                .filter(|(_, &x)| x != anchor)
                .map(|(&j, _)| j)
                .collect(),
        )
    }

    /// `(x_v; a)`: keeps the coordinates in `v` and anchors all others.
    pub fn restrict(&self, v: &VariableSet) -> Point {
        let mut set = Vec::new();
        let mut values = Vec::new();
        for (&j, &x) in self.set.0.iter().zip(&self.values) {
            if v.contains(j) {
                set.push(j);
                values.push(x);
            }
        }
        Point {
            set: VariableSet(set),
            values,
        }
    }
}
