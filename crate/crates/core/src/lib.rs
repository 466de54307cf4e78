//! Randomized integration of functions of infinitely many variables on
//! weighted anchored reproducing kernel Hilbert spaces.

// `!(x > 0.0)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod cost;
pub mod error;
pub mod experiment;
pub mod quad;
pub mod rkhs;
pub mod serde_float;
pub mod sets;
pub mod stats;
pub mod weights;

pub use cost::{CostLedger, CostModel, DollarFunction, NestedChain};
pub use error::{Error, Result};
pub use rkhs::{AnchoredFunction, Atom, Integrand, Kernel1D, KernelSpec, Term};
pub use sets::{Point, VariableSet};
pub use weights::{Generator, WeightClass, WeightFamily, WeightedSet};
