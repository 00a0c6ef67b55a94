//! Parameter files for the topology comparison.
//!
//! ```text
//! [operating_point]
//! i_pri = 4.861 A
//! i_sec = 4.861 A
//! i_line = 4.861 A
//!
//! [entry proposed]
//! P_core = 2 W
//! R_T1 = 0.05 ohm
//! R_T2 = 0.05 ohm
//! V_igbt = 2 V
//! ```
//!
//! The unit of a symbol follows its first letter: `R`/`r` resistance,
//! `V` voltage, `I` current, `P` power.

use std::collections::BTreeMap;

use crate::analysis::{table_i, OperatingPoint, TopologyParams};
use crate::error::{Error, Result};
use crate::scenario::format::{quantity, tokenize, Item};
use crate::scenario::units::Dimension;

#[derive(Debug, Clone, PartialEq)]
pub struct TopologyInputs {
    pub operating_point: OperatingPoint,
    /// Keyed by entry label (`1`, `23`, ..., `proposed`).
    pub params: BTreeMap<String, TopologyParams>,
}

fn symbol_dimension(symbol: &str) -> Option<Dimension> {
    match symbol.chars().next()? {
        'R' | 'r' => Some(Dimension::Resistance),
        'V' => Some(Dimension::Voltage),
        'I' => Some(Dimension::Current),
        'P' => Some(Dimension::Power),
        _ => None,
    }
}

enum Target {
    None,
    OperatingPoint,
    Entry(String),
}

pub fn parse_topology_params(text: &str) -> Result<TopologyInputs> {
    let mut target = Target::None;
    let mut op: BTreeMap<String, f64> = BTreeMap::new();
    let mut params: BTreeMap<String, TopologyParams> = BTreeMap::new();
    for item in tokenize(text)? {
        match item {
            Item::Section { name, arg, line } => {
                target = match (name.as_str(), arg) {
                    ("operating_point", None) => Target::OperatingPoint,
                    ("entry", Some(label)) => {
                        let label = label.trim_start_matches('[').trim_end_matches(']').to_string();
                        if !table_i().iter().any(|e| e.label == label) {
                            return Err(Error::Parse {
                                line,
                                message: format!("unknown topology entry `{label}`"),
                            });
                        }
                        params.entry(label.clone()).or_default();
                        Target::Entry(label)
                    }
                    _ => {
                        return Err(Error::Parse {
                            line,
                            message: format!("unknown section `[{name}]`"),
                        })
                    }
                };
            }
            Item::Entry { key, value, line } => match &target {
                Target::None => {
                    return Err(Error::Parse {
                        line,
                        message: format!("`{key}` appears before any section"),
                    })
                }
                Target::OperatingPoint => {
                    if !matches!(key.as_str(), "i_pri" | "i_sec" | "i_line") {
                        return Err(Error::Parse {
                            line,
                            message: format!("unknown operating point key `{key}`"),
                        });
                    }
                    let v = quantity(&value, Dimension::Current, line)?;
                    if v < 0.0 {
                        return Err(Error::Parse { line, message: format!("`{key}` must be >= 0") });
                    }
                    if op.insert(key.clone(), v).is_some() {
                        return Err(Error::Parse { line, message: format!("duplicate key `{key}`") });
                    }
                }
                Target::Entry(label) => {
                    let entry = table_i().iter().find(|e| e.label == label).expect("checked above");
                    if !entry.formula.symbols().contains(&key.as_str()) {
                        return Err(Error::Parse {
                            line,
                            message: format!("`{key}` is not a parameter of entry {}", entry.display_name()),
                        });
                    }
                    let dim = symbol_dimension(&key).expect("known symbols have a dimension");
                    let v = quantity(&value, dim, line)?;
                    let map = params.get_mut(label).expect("created with the section");
                    if map.insert(key.clone(), v).is_some() {
                        return Err(Error::Parse { line, message: format!("duplicate key `{key}`") });
                    }
                }
            },
        }
    }
    let get = |k: &str| {
        op.get(k)
            .copied()
            .ok_or_else(|| Error::invalid("operating point", format!("missing `{k}`")))
    };
    Ok(TopologyInputs {
        operating_point: OperatingPoint {
            i_pri: get("i_pri")?,
            i_sec: get("i_sec")?,
            i_line: get("i_line")?,
        },
        params,
    })
}
