//! Anchored kernels, product kernels and exactly integrable test functions.

mod decomposition;
mod function;
mod kernel;

pub use decomposition::{
    anchor_restrict, anchored_component_eval, kgamma_eval, ku_eval, KernelValue, MAX_COMPONENT_SET,
};
pub use function::{AnchoredFunction, Atom, BoundFunction, Integrand, Negated, Term};
pub use kernel::{Kernel1D, KernelSpec, SamplingSpace, DEFAULT_TABULATION_INTERVALS};
