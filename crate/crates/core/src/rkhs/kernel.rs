//! Univariate anchored reproducing kernels.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default number of Simpson intervals for tabulated kernels.
pub const DEFAULT_TABULATION_INTERVALS: usize = 1 << 14;

type KernelFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// The sampling measure `rho` is uniform on `[lo, hi]` for every kernel.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SamplingSpace {
    pub lo: f64,
    pub hi: f64,
    pub anchor: f64,
}

#[derive(Clone)]
enum Family {
    /// `scale * min(x, y)` on `[0, 1]`.
    Wiener { scale: f64 },
    /// An arbitrary anchored kernel whose constants come from composite
    /// Simpson quadrature on a uniform grid.
    Tabulated {
        func: KernelFn,
        intervals: usize,
        /// Mean function sampled on the grid nodes.
        mean_nodes: Arc<[f64]>,
        quadrature_error: f64,
    },
}

/// A univariate anchored kernel `k` together with `M = ∫ k(x,x) ρ(dx)` and
/// `C0 = ∬ k(x,y) ρ(dx) ρ(dy)`.
#[derive(Clone)]
pub struct Kernel1D {
    family: Family,
    lo: f64,
    hi: f64,
    anchor: f64,
    m: f64,
    c0: f64,
}

impl fmt::Debug for Kernel1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match &self.family {
            Family::Wiener { scale } => format!("Wiener(scale={scale})"),
            Family::Tabulated { intervals, .. } => format!("Tabulated(intervals={intervals})"),
        };
        f.debug_struct("Kernel1D")
            .field("family", &name)
            .field("domain", &(self.lo, self.hi))
            .field("anchor", &self.anchor)
            .field("M", &self.m)
            .field("C0", &self.c0)
            .finish()
    }
}

impl Kernel1D {
    /// The Wiener kernel `min(x, y)` on `[0, 1]`, anchored at 0.
    pub fn wiener() -> Self {
        Self::scaled_wiener(1.0).expect("unit scale is valid")
    }

    pub fn scaled_wiener(scale: f64) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::Parameter(format!(
                "Wiener scale must be positive, got {scale}"
            )));
        }
        Ok(Kernel1D {
            family: Family::Wiener { scale },
            lo: 0.0,
            hi: 1.0,
            anchor: 0.0,
            m: scale * 0.5,
            c0: scale / 3.0,
        })
    }

    /// Tabulates an arbitrary kernel on `[lo, hi]` with `intervals` Simpson
    /// intervals (rounded up to even). The kernel must vanish at `(anchor, anchor)`.
    pub fn tabulated<F>(lo: f64, hi: f64, anchor: f64, intervals: usize, func: F) -> Result<Self>
    where
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::Domain(format!("invalid interval [{lo}, {hi}]")));
        }
        if !(lo..=hi).contains(&anchor) {
            return Err(Error::Domain(format!(
                "anchor {anchor} outside [{lo}, {hi}]"
            )));
        }
        if intervals < 2 {
            return Err(Error::Parameter(
                "at least two Simpson intervals are required".into(),
            ));
        }
        let n = intervals + intervals % 2;
        let kaa = func(anchor, anchor);
        if kaa != 0.0 {
            return Err(Error::Domain(format!(
                "kernel is not anchored: k(a,a) = {kaa}"
            )));
        }
        let h = (hi - lo) / n as f64;
        let node = |i: usize| if i == n { hi } else { lo + i as f64 * h };
        // rho is the uniform probability measure on [lo, hi]
        let inv_len = 1.0 / (hi - lo);

        let diag: Vec<f64> = (0..=n).map(|i| func(node(i), node(i))).collect();
        let m = simpson(&diag, h) * inv_len;

        let mut mean_nodes = Vec::with_capacity(n + 1);
        let mut row = vec![0.0; n + 1];
        for i in 0..=n {
            let t = node(i);
            for (k, r) in row.iter_mut().enumerate() {
                *r = func(node(k), t);
            }
            mean_nodes.push(simpson(&row, h) * inv_len);
        }
        let c0 = simpson(&mean_nodes, h) * inv_len;

        // Richardson-style estimate: compare against the half-resolution rule.
        let coarse_m = simpson_stride(&diag, 2.0 * h, 2) * inv_len;
        let coarse_c0 = simpson_stride(&mean_nodes, 2.0 * h, 2) * inv_len;
        let quadrature_error = (m - coarse_m).abs().max((c0 - coarse_c0).abs());

        if !m.is_finite() || !c0.is_finite() || mean_nodes.iter().any(|v| !v.is_finite()) {
            return Err(Error::IntegrationFailure(
                "kernel quadrature is not finite".into(),
            ));
        }
        if c0 <= 0.0 {
            return Err(Error::Domain(format!("C0 must be positive, got {c0}")));
        }
        if c0 > m * (1.0 + 1e-9) + quadrature_error {
            return Err(Error::Domain(format!("C0 = {c0} exceeds M = {m}")));
        }
        Ok(Kernel1D {
            family: Family::Tabulated {
                func: Arc::new(func),
                intervals: n,
                mean_nodes: mean_nodes.into(),
                quadrature_error,
            },
            lo,
            hi,
            anchor,
            m,
            c0,
        })
    }

    pub fn anchor(&self) -> f64 {
        self.anchor
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn sampling_space(&self) -> SamplingSpace {
        SamplingSpace {
            lo: self.lo,
            hi: self.hi,
            anchor: self.anchor,
        }
    }

    /// `(M, C0)`.
    pub fn constants(&self) -> (f64, f64) {
        (self.m, self.c0)
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn c0(&self) -> f64 {
        self.c0
    }

    /// Estimated quadrature error of the constants; zero for closed forms.
    pub fn constants_error(&self) -> f64 {
        match &self.family {
            Family::Wiener { .. } => 0.0,
            Family::Tabulated {
                quadrature_error, ..
            } => *quadrature_error,
        }
    }

    pub fn is_closed_form(&self) -> bool {
        matches!(self.family, Family::Wiener { .. })
    }

    fn check(&self, x: f64) -> Result<()> {
        if (self.lo..=self.hi).contains(&x) {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "{x} outside [{}, {}]",
                self.lo, self.hi
            )))
        }
    }

    /// `k(x, y)` with domain checking.
    pub fn eval(&self, x: f64, y: f64) -> Result<f64> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.value(x, y))
    }

    /// `k(x, y)` without domain checking.
    #[inline]
    pub fn value(&self, x: f64, y: f64) -> f64 {
        match &self.family {
            Family::Wiener { scale } => scale * x.min(y),
            Family::Tabulated { func, .. } => func(x, y),
        }
    }

    /// The kernel mean embedding `m_k(t) = ∫ k(x, t) ρ(dx)`.
    pub fn mean_function(&self, t: f64) -> Result<f64> {
        self.check(t)?;
        Ok(self.mean_value(t))
    }

    #[inline]
    pub fn mean_value(&self, t: f64) -> f64 {
        match &self.family {
            Family::Wiener { scale } => scale * (t - 0.5 * t * t),
            Family::Tabulated {
                intervals,
                mean_nodes,
                ..
            } => {
                // linear interpolation between grid nodes
                let pos = (t - self.lo) / (self.hi - self.lo) * *intervals as f64;
                let i = (pos.floor() as usize).min(intervals - 1);
                let w = pos - i as f64;
                mean_nodes[i] * (1.0 - w) + mean_nodes[i + 1] * w
            }
        }
    }
}

fn simpson(values: &[f64], h: f64) -> f64 {
    simpson_stride(values, h, 1)
}

/// Composite Simpson rule over `values[0], values[stride], ...`.
fn simpson_stride(values: &[f64], h: f64, stride: usize) -> f64 {
    let pts: Vec<f64> = values.iter().step_by(stride).copied().collect();
    let n = pts.len() - 1;
    if n % 2 == 1 {
        // odd number of intervals after striding: trapezoid on the last one
        let head = simpson_even(&pts[..n], h);
        return head + 0.5 * h * (pts[n - 1] + pts[n]);
    }
    simpson_even(&pts, h)
}

fn simpson_even(pts: &[f64], h: f64) -> f64 {
    let n = pts.len() - 1;
    let mut acc = pts[0] + pts[n];
    for (i, v) in pts.iter().enumerate().take(n).skip(1) {
        acc += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
    }
    acc * h / 3.0
}

/// Serializable kernel description used in configuration files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum KernelSpec {
    Wiener {
        #[serde(default = "one")]
        scale: f64,
    },
    /// The Wiener kernel evaluated through the tabulated code path.
    TabulatedWiener {
        #[serde(default = "one")]
        scale: f64,
        #[serde(default = "default_intervals")]
        intervals: usize,
    },
}

fn one() -> f64 {
    1.0
}

fn default_intervals() -> usize {
    DEFAULT_TABULATION_INTERVALS
}

impl Default for KernelSpec {
    fn default() -> Self {
        KernelSpec::Wiener { scale: 1.0 }
    }
}

impl KernelSpec {
    pub fn build(&self) -> Result<Kernel1D> {
        match *self {
            KernelSpec::Wiener { scale } => Kernel1D::scaled_wiener(scale),
            KernelSpec::TabulatedWiener { scale, intervals } => {
                if !(scale > 0.0) {
                    return Err(Error::Parameter("scale must be positive".into()));
                }
                Kernel1D::tabulated(0.0, 1.0, 0.0, intervals, move |x, y| scale * x.min(y))
            }
        }
    }

    /// Parses `wiener`, `wiener:SCALE` or `tabulated-wiener[:SCALE[:INTERVALS]]`.
    pub fn parse(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |i: usize, default: f64| -> Result<f64> {
            parts.get(i).map_or(Ok(default), |p| {
                p.parse()
                    .map_err(|_| Error::Parse(format!("bad number `{p}` in kernel spec")))
            })
        };
        match parts[0] {
            "wiener" => Ok(KernelSpec::Wiener {
                scale: num(1, 1.0)?,
            }),
            "tabulated-wiener" => Ok(KernelSpec::TabulatedWiener {
                scale: num(1, 1.0)?,
                intervals: num(2, DEFAULT_TABULATION_INTERVALS as f64)? as usize,
            }),
            other => Err(Error::Parse(format!("unknown kernel `{other}`"))),
        }
    }
}
