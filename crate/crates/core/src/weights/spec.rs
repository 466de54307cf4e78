//! Compact textual weight specifications.
//!
//! ```text
//! prod:pow:C:BETA            prod:list:0.5,0.25
//! fprod:pow:C:BETA:OMEGA     pod:pow:C:BETA:G0,G1,G2,...
//! lex:OMEGA:pow:C:BETA       explicit:{}=1;1=0.5;1,2=0.125
//! fi:DEGREE:1,2=0.5;3=0.25   cut:SIGMA:<spec>
//! ```
//!
//! Anything else is read as a JSON document, inline or from a file.

use std::path::Path;

use super::{Generator, WeightClass, WeightFamily, WeightedSet};
use crate::error::{Error, Result};
use crate::sets::VariableSet;

fn num<T: std::str::FromStr>(s: &str, what: &str) -> Result<T> {
    s.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("invalid {what} '{s}'")))
}

fn list(s: &str) -> Result<Vec<f64>> {
    s.split(',').map(|x| num(x, "number")).collect()
}

/// Parses a generator from the front of `parts`, returning it and the rest.
fn generator<'a>(parts: &'a [&'a str]) -> Result<(Generator, &'a [&'a str])> {
    match parts {
        ["pow", c, beta, rest @ ..] => Ok((
            Generator::Power {
                c: num(c, "constant")?,
                beta: num(beta, "exponent")?,
            },
            rest,
        )),
        ["list", values, rest @ ..] => Ok((Generator::List(list(values)?), rest)),
        _ => Err(Error::Parse(format!(
            "expected 'pow:C:BETA' or 'list:v1,v2,...', got '{}'",
            parts.join(":")
        ))),
    }
}

fn weighted_sets(s: &str) -> Result<Vec<WeightedSet>> {
    s.split(';')
        .filter(|e| !e.trim().is_empty())
        .map(|e| {
            let (set, g) = e
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected SET=VALUE, got '{e}'")))?;
            Ok(WeightedSet::new(
                set.trim().parse::<VariableSet>()?,
                num(g, "weight")?,
            ))
        })
        .collect()
}

fn no_rest(rest: &[&str]) -> Result<()> {
    if rest.is_empty() {
        Ok(())
    } else {
        Err(Error::Parse(format!(
            "unexpected trailing '{}'",
            rest.join(":")
        )))
    }
}

fn class(spec: &str) -> Result<WeightClass> {
    let (head, tail) = spec.split_once(':').unwrap_or((spec, ""));
    match head {
        "cut" => {
            let (sigma, inner) = tail
                .split_once(':')
                .ok_or_else(|| Error::Parse("expected cut:SIGMA:<spec>".into()))?;
            Ok(WeightClass::CutOff {
                base: Box::new(class(inner)?),
                sigma: num(sigma, "cut-off order")?,
            })
        }
        "explicit" => Ok(WeightClass::Explicit {
            sets: weighted_sets(tail)?,
        }),
        "fi" => {
            let (degree, sets) = tail
                .split_once(':')
                .ok_or_else(|| Error::Parse("expected fi:DEGREE:<sets>".into()))?;
            Ok(WeightClass::FiniteIntersection {
                sets: weighted_sets(sets)?,
                degree: num(degree, "intersection degree")?,
            })
        }
        _ => {
            let parts: Vec<&str> = tail.split(':').collect();
            match head {
                "prod" => {
                    let (generator, rest) = generator(&parts)?;
                    no_rest(rest)?;
                    Ok(WeightClass::Product { generator })
                }
                "fprod" => match generator(&parts)? {
                    (generator, [order]) => Ok(WeightClass::FiniteProduct {
                        generator,
                        order: num(order, "order")?,
                    }),
                    _ => Err(Error::Parse("expected fprod:<generator>:OMEGA".into())),
                },
                "pod" => match generator(&parts)? {
                    (generator, [gammas]) => Ok(WeightClass::Pod {
                        generator,
                        order_weights: list(gammas)?,
                    }),
                    _ => Err(Error::Parse("expected pod:<generator>:G0,G1,...".into())),
                },
                "lex" => match parts.as_slice() {
                    [order, rest @ ..] => {
                        let (generator, rest) = generator(rest)?;
                        no_rest(rest)?;
                        Ok(WeightClass::LexOrdered {
                            order: num(order, "order")?,
                            generator,
                        })
                    }
                    _ => Err(Error::Parse("expected lex:OMEGA:<generator>".into())),
                },
                _ => Err(Error::Parse(format!("unknown weight class '{head}'"))),
            }
        }
    }
}

/// Parses a compact specification, an inline JSON document, or a JSON file path.
pub fn parse_weights(spec: &str) -> Result<WeightFamily> {
    let spec = spec.trim();
    if spec.starts_with('{') {
        let w: WeightFamily = serde_json::from_str(spec)?;
        return WeightFamily::new(w.class().clone());
    }
    let known = ["prod", "fprod", "pod", "lex", "explicit", "fi", "cut"];
    let head = spec.split(':').next().unwrap_or("");
    if known.contains(&head) {
        return WeightFamily::new(class(spec)?);
    }
    let path = Path::new(spec);
    if path.exists() {
        let text = std::fs::read_to_string(path)?;
        let w: WeightFamily = serde_json::from_str(&text)?;
        return WeightFamily::new(w.class().clone());
    }
    Err(Error::Parse(format!(
        "unrecognized weight specification '{spec}'"
    )))
}
