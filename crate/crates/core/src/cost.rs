//! Dollar functions, nested and unrestricted sampling costs, cost ledgers and
//! algorithm-class certificates.

use std::io::Write;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sets::{Point, VariableSet};

/// The cost `$(ν)` of one evaluation in a subspace with `ν` active coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DollarFunction {
    /// `max(1, ν^s)`.
    Poly { s: f64 },
    /// `e^{rν}`.
    Exp { r: f64 },
    /// Values for `ν = 0..n`; beyond the table the last ratio repeats geometrically.
    Table { values: Vec<f64> },
}

impl DollarFunction {
    pub fn validate(&self) -> Result<()> {
        match self {
            DollarFunction::Poly { s } if !(*s > 0.0 && s.is_finite()) => Err(Error::Parameter(
                format!("polynomial cost exponent must be positive, got {s}"),
            )),
            DollarFunction::Exp { r } if !(*r >= 0.0 && r.is_finite()) => Err(Error::Parameter(
                format!("exponential cost rate must be >= 0, got {r}"),
            )),
            DollarFunction::Table { values } => {
                if values.is_empty() || values.iter().any(|v| !(*v >= 1.0)) {
                    return Err(Error::Parameter("cost table entries must be >= 1".into()));
                }
                if values.windows(2).any(|w| w[1] < w[0]) {
                    return Err(Error::Parameter("cost table must be non-decreasing".into()));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn eval(&self, nu: usize) -> f64 {
        match self {
            DollarFunction::Poly { s } => (nu as f64).powf(*s).max(1.0),
            DollarFunction::Exp { r } => (r * nu as f64).exp(),
            DollarFunction::Table { values } => {
                if let Some(&v) = values.get(nu) {
                    return v;
                }
                let last = values[values.len() - 1];
                let ratio = match values.len() {
                    1 => 1.0,
                    n => last / values[n - 2],
                };
                last * ratio.powi((nu + 1 - values.len()) as i32)
            }
        }
    }

    /// Largest `ν` with `$(ν) ≤ budget`, capped at `limit`.
    pub fn max_dim_within(&self, budget: f64, limit: usize) -> usize {
        let mut nu = 0;
        while nu < limit && self.eval(nu + 1) <= budget {
            nu += 1;
        }
        nu
    }
}

/// A strictly increasing chain `v_1 ⊂ v_2 ⊂ ...`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NestedChain {
    /// A finite explicit prefix with no extension.
    Explicit { sets: Vec<VariableSet> },
    /// `v_i = [base · 2^{i-1}]`.
    Doubling { base: u32 },
}

impl NestedChain {
    pub fn validate(&self) -> Result<()> {
        match self {
            NestedChain::Explicit { sets } => {
                if sets.is_empty() || sets[0].is_empty() {
                    return Err(Error::Parameter("chain sets must be non-empty".into()));
                }
                for w in sets.windows(2) {
                    if !(w[0].is_subset(&w[1]) && w[0].len() < w[1].len()) {
                        return Err(Error::Parameter(format!(
                            "chain is not strictly increasing at {} ⊂ {}",
                            w[0], w[1]
                        )));
                    }
                }
                Ok(())
            }
            NestedChain::Doubling { base } if *base == 0 => {
                Err(Error::Parameter("chain base must be >= 1".into()))
            }
            NestedChain::Doubling { .. } => Ok(()),
        }
    }

    /// 1-based index and set of the first member containing `active`.
    pub fn first_containing(&self, active: &VariableSet) -> Option<(usize, VariableSet)> {
        match self {
            NestedChain::Explicit { sets } => sets
                .iter()
                .position(|v| active.is_subset(v))
                .map(|i| (i + 1, sets[i].clone())),
            NestedChain::Doubling { base } => {
                let need = active.max_index().unwrap_or(0) as u64;
                let mut size = *base as u64;
                let mut i = 1;
                while size < need {
                    size *= 2;
                    i += 1;
                }
                let size = u32::try_from(size).ok()?;
                Some((i, VariableSet::range(size)))
            }
        }
    }

    /// The member `v_i`, `i ≥ 1`, if it exists.
    pub fn member(&self, i: usize) -> Option<VariableSet> {
        match self {
            NestedChain::Explicit { sets } => sets.get(i.checked_sub(1)?).cloned(),
            NestedChain::Doubling { base } => {
                let size = (*base as u64).checked_shl(i.checked_sub(1)? as u32)?;
                Some(VariableSet::range(u32::try_from(size).ok()?))
            }
        }
    }
}

/// A sampling regime together with its dollar function.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum CostModel {
    Nested {
        dollar: DollarFunction,
        chain: NestedChain,
    },
    Unrestricted {
        dollar: DollarFunction,
    },
}

impl CostModel {
    /// Parses `unrestricted:<dollar>` or `nested:<chain>:<dollar>`, where a
    /// dollar function is `poly:S`, `exp:R` or `table:V0,V1,...` and a chain
    /// is `doubling=BASE` or explicit sets `1;1,2,3;1..6`. Anything else is
    /// read as JSON.
    pub fn parse(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        let model = if let Some(rest) = spec.strip_prefix("unrestricted:") {
            CostModel::Unrestricted {
                dollar: parse_dollar(rest)?,
            }
        } else if let Some(rest) = spec.strip_prefix("nested:") {
            let (chain, dollar) = rest.split_once(':').ok_or_else(|| {
                Error::Parse(format!("expected nested:<chain>:<dollar>, got `{spec}`"))
            })?;
            let chain = match chain.strip_prefix("doubling=") {
                Some(b) => NestedChain::Doubling {
                    base: b
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad chain base `{b}`")))?,
                },
                None => NestedChain::Explicit {
                    sets: chain.split(';').map(str::parse).collect::<Result<_>>()?,
                },
            };
            CostModel::Nested {
                dollar: parse_dollar(dollar)?,
                chain,
            }
        } else {
            serde_json::from_str(spec)?
        };
        model.validate()?;
        Ok(model)
    }

    pub fn unrestricted(dollar: DollarFunction) -> Result<Self> {
        dollar.validate()?;
        Ok(CostModel::Unrestricted { dollar })
    }

    pub fn nested(chain: NestedChain, dollar: DollarFunction) -> Result<Self> {
        dollar.validate()?;
        chain.validate()?;
        Ok(CostModel::Nested { dollar, chain })
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            CostModel::Nested { dollar, chain } => {
                dollar.validate()?;
                chain.validate()
            }
            CostModel::Unrestricted { dollar } => dollar.validate(),
        }
    }

    pub fn dollar(&self) -> &DollarFunction {
        match self {
            CostModel::Nested { dollar, .. } | CostModel::Unrestricted { dollar } => dollar,
        }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            CostModel::Nested { .. } => "nested",
            CostModel::Unrestricted { .. } => "unrestricted",
        }
    }

    /// Cost of one evaluation at a point with the given active set.
    pub fn cost(&self, active: &VariableSet) -> f64 {
        match self {
            CostModel::Nested { dollar, chain } => nested_cost(chain, dollar, active),
            CostModel::Unrestricted { dollar } => unrestricted_cost(dollar, active),
        }
    }
}

fn parse_dollar(s: &str) -> Result<DollarFunction> {
    let num = |x: &str| -> Result<f64> {
        x.trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad number `{x}` in dollar function")))
    };
    match s.split_once(':') {
        Some(("poly", v)) => Ok(DollarFunction::Poly { s: num(v)? }),
        Some(("exp", v)) => Ok(DollarFunction::Exp { r: num(v)? }),
        Some(("table", v)) => Ok(DollarFunction::Table {
            values: v.split(',').map(num).collect::<Result<_>>()?,
        }),
        _ => Err(Error::Parse(format!(
            "expected poly:S, exp:R or table:V0,V1,..., got `{s}`"
        ))),
    }
}

/// `inf { $(|v_i|) : active ⊆ v_i }`, `∞` when no member contains `active`.
pub fn nested_cost(chain: &NestedChain, dollar: &DollarFunction, active: &VariableSet) -> f64 {
    chain
        .first_containing(active)
        .map_or(f64::INFINITY, |(_, v)| dollar.eval(v.len()))
}

/// `$(|active|)`.
pub fn unrestricted_cost(dollar: &DollarFunction, active: &VariableSet) -> f64 {
    dollar.eval(active.len())
}

/// Per-run record of every charged evaluation.
#[derive(Clone, Debug)]
pub struct CostLedger {
    model: Arc<CostModel>,
    entries: Vec<(VariableSet, f64)>,
    total: f64,
    infeasible: bool,
}

impl CostLedger {
    pub fn new(model: Arc<CostModel>) -> Self {
        CostLedger {
            model,
            entries: Vec::new(),
            total: 0.0,
            infeasible: false,
        }
    }

    pub fn model(&self) -> &CostModel {
        &self.model
    }

    /// Charges an evaluation at a point, by its non-anchor coordinates.
    pub fn charge(&mut self, point: &Point, anchor: f64) -> f64 {
        self.charge_set(point.active_set(anchor))
    }

    pub fn charge_set(&mut self, active: VariableSet) -> f64 {
        let c = self.model.cost(&active);
        if c.is_infinite() {
            self.infeasible = true;
        }
        self.total += c;
        self.entries.push((active, c));
        c
    }

    /// Appends another ledger of the same model.
    pub fn merge(&mut self, other: CostLedger) {
        self.total += other.total;
        self.infeasible |= other.infeasible;
        self.entries.extend(other.entries);
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_infeasible(&self) -> bool {
        self.infeasible
    }

    pub fn entries(&self) -> &[(VariableSet, f64)] {
        &self.entries
    }

    /// CSV with columns `eval_index,active_set,charged`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["eval_index", "active_set", "charged"])?;
        for (i, (set, c)) in self.entries.iter().enumerate() {
            w.write_record([(i + 1).to_string(), set.to_string(), c.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum AlgorithmClass {
    Ran,
    Res,
    ResOmega { omega: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassCertificate {
    pub class: AlgorithmClass,
    /// Evaluation count shared by all traces (restricted classes only).
    pub n: Option<usize>,
    /// `v_i`: union over traces of the `i`-th evaluation's active set.
    pub sets: Vec<VariableSet>,
}

/// Widest class certified by the traces: `res` needs identical evaluation
/// counts, `res-ω` additionally `|v_i| ≤ ω`.
pub fn certify_class(traces: &[CostLedger], omega: Option<usize>) -> Result<ClassCertificate> {
    let first = traces
        .first()
        .ok_or_else(|| Error::Parameter("at least one trace is required".into()))?;
    let n = first.len();
    if traces.iter().any(|t| t.len() != n) {
        return Ok(ClassCertificate {
            class: AlgorithmClass::Ran,
            n: None,
            sets: Vec::new(),
        });
    }
    let sets: Vec<VariableSet> = (0..n)
        .map(|i| {
            traces
                .iter()
                .fold(VariableSet::empty(), |acc, t| acc.union(&t.entries[i].0))
        })
        .collect();
    let class = match omega {
        Some(w) if sets.iter().all(|v| v.len() <= w) => AlgorithmClass::ResOmega { omega: w },
        _ => AlgorithmClass::Res,
    };
    Ok(ClassCertificate {
        class,
        n: Some(n),
        sets,
    })
}
