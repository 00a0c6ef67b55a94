//! Component counts and single-phase loss expressions of comparable
//! limiter/restorer topologies.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Line-side currents shared by every loss expression (RMS amperes).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatingPoint {
    pub i_pri: f64,
    /// Secondary current referred to the primary.
    pub i_sec: f64,
    pub i_line: f64,
}

/// Named per-topology parameters in SI units.
pub type TopologyParams = BTreeMap<String, f64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LossFormula {
    /// `(i_pri R_S1 + i_sec^2 R_S2) i_pri + (2 V_DF + V_SW + r_d I_d) I_DC`
    BridgeRectifier,
    /// `(i_pri R_S1 + i_sec^2 R_S2) i_pri + (sqrt2 I_N R_C + 2 V_D + V_igbt) I_DC`
    SingleSwitchDc,
    /// `P_core + (R_T1 i_pri^2 + R_T2,series i_sec^2) + V_igbt I_line`
    SeriesTransformer,
    /// `P_core,series + (R_T1,series i_pri^2 + R_T2,series i_sec^2)
    /// + P_loss,diode + V_igbt I_line + V_thyristor I_line`
    SeriesWithThyristor,
    /// No expression published.
    NotAvailable,
    /// `P_core + R_T1 i_pri^2 + R_T2 i_sec^2 + V_igbt I_line`
    Proposed,
}

impl LossFormula {
    /// Parameters the expression needs besides the operating point.
    pub fn symbols(self) -> &'static [&'static str] {
        match self {
            LossFormula::BridgeRectifier => &["R_S1", "R_S2", "V_DF", "V_SW", "r_d", "I_d", "I_DC"],
            LossFormula::SingleSwitchDc => &["R_S1", "R_S2", "I_N", "R_C", "V_D", "V_igbt", "I_DC"],
            LossFormula::SeriesTransformer => &["P_core", "R_T1", "R_T2_series", "V_igbt"],
            LossFormula::SeriesWithThyristor => &[
                "P_core_series",
                "R_T1_series",
                "R_T2_series",
                "P_loss_diode",
                "V_igbt",
                "V_thyristor",
            ],
            LossFormula::NotAvailable => &[],
            LossFormula::Proposed => &["P_core", "R_T1", "R_T2", "V_igbt"],
        }
    }

    pub fn text(self) -> &'static str {
        match self {
            LossFormula::BridgeRectifier => "(i_pri R_S1 + i_sec^2 R_S2) i_pri + (2 V_DF + V_SW + r_d I_d) I_DC",
            LossFormula::SingleSwitchDc => {
                "(i_pri R_S1 + i_sec^2 R_S2) i_pri + (sqrt(2) I_N R_C + 2 V_D + V_igbt) I_DC"
            }
            LossFormula::SeriesTransformer => "P_core + (R_T1 i_pri^2 + R_T2_series i_sec^2) + V_igbt I_line",
            LossFormula::SeriesWithThyristor => {
                "P_core_series + (R_T1_series i_pri^2 + R_T2_series i_sec^2) + P_loss_diode + V_igbt I_line + V_thyristor I_line"
            }
            LossFormula::NotAvailable => "N/A",
            LossFormula::Proposed => "P_core + R_T1 i_pri^2 + R_T2 i_sec^2 + V_igbt I_line",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopologyEntry {
    /// Key used in parameter files: the reference number, or `proposed`.
    pub label: &'static str,
    pub transformers: u32,
    /// Counted for three-phase operation.
    pub switches: u32,
    pub dc_sources: u32,
    pub compensates_sag: bool,
    pub limits_fault: bool,
    pub formula: LossFormula,
}

impl TopologyEntry {
    /// `[1]`, `[23]`, ... or `proposed`.
    pub fn display_name(&self) -> String {
        if self.label.chars().all(|c| c.is_ascii_digit()) {
            format!("[{}]", self.label)
        } else {
            self.label.to_string()
        }
    }
}

const fn entry(
    label: &'static str,
    transformers: u32,
    switches: u32,
    dc_sources: u32,
    compensates_sag: bool,
    limits_fault: bool,
    formula: LossFormula,
) -> TopologyEntry {
    TopologyEntry {
        label,
        transformers,
        switches,
        dc_sources,
        compensates_sag,
        limits_fault,
        formula,
    }
}

const TABLE_I: [TopologyEntry; 6] = [
    entry("1", 2, 1, 0, false, true, LossFormula::BridgeRectifier),
    entry("23", 1, 1, 1, false, true, LossFormula::SingleSwitchDc),
    entry("24", 1, 6, 0, false, true, LossFormula::SeriesTransformer),
    entry("22", 2, 24, 3, true, true, LossFormula::SeriesWithThyristor),
    entry("9", 2, 10, 0, true, true, LossFormula::NotAvailable),
    entry("proposed", 1, 6, 3, true, true, LossFormula::Proposed),
];

/// The six compared topologies, in published order.
pub fn table_i() -> &'static [TopologyEntry] {
    &TABLE_I
}

/// Loss of one entry at `op`; `None` when the entry has no expression.
pub fn evaluate_topology_loss(
    entry: &TopologyEntry,
    op: &OperatingPoint,
    params: &TopologyParams,
) -> Result<Option<f64>> {
    let get = |symbol: &str| {
        params.get(symbol).copied().ok_or_else(|| Error::MissingParameter {
            entry: entry.display_name(),
            symbol: symbol.to_string(),
        })
    };
    let OperatingPoint { i_pri, i_sec, i_line } = *op;
    let loss = match entry.formula {
        LossFormula::NotAvailable => return Ok(None),
        LossFormula::BridgeRectifier => {
            let transformer = (i_pri * get("R_S1")? + i_sec * i_sec * get("R_S2")?) * i_pri;
            let rectifier = (2.0 * get("V_DF")? + get("V_SW")? + get("r_d")? * get("I_d")?) * get("I_DC")?;
            transformer + rectifier
        }
        LossFormula::SingleSwitchDc => {
            let transformer = (i_pri * get("R_S1")? + i_sec * i_sec * get("R_S2")?) * i_pri;
            let dc = (std::f64::consts::SQRT_2 * get("I_N")? * get("R_C")? + 2.0 * get("V_D")? + get("V_igbt")?)
                * get("I_DC")?;
            transformer + dc
        }
        LossFormula::SeriesTransformer => {
            get("P_core")?
                + (get("R_T1")? * i_pri * i_pri + get("R_T2_series")? * i_sec * i_sec)
                + get("V_igbt")? * i_line
        }
        LossFormula::SeriesWithThyristor => {
            get("P_core_series")?
                + (get("R_T1_series")? * i_pri * i_pri + get("R_T2_series")? * i_sec * i_sec)
                + get("P_loss_diode")?
                + get("V_igbt")? * i_line
                + get("V_thyristor")? * i_line
        }
        LossFormula::Proposed => {
            get("P_core")? + (get("R_T1")? * i_pri * i_pri + get("R_T2")? * i_sec * i_sec) + get("V_igbt")? * i_line
        }
    };
    Ok(Some(loss))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TopologyRow {
    pub entry: TopologyEntry,
    pub loss: Option<f64>,
}

/// Evaluates every entry. `params` is keyed by entry label; entries without
/// an expression need no parameters.
pub fn topology_comparison(
    op: &OperatingPoint,
    params: &BTreeMap<String, TopologyParams>,
) -> Result<Vec<TopologyRow>> {
    let empty = TopologyParams::new();
    table_i()
        .iter()
        .map(|entry| {
            let p = params.get(entry.label).unwrap_or(&empty);
            Ok(TopologyRow {
                entry: *entry,
                loss: evaluate_topology_loss(entry, op, p)?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn proposed_params() -> TopologyParams {
        [("P_core", 2.0), ("R_T1", 0.05), ("R_T2", 0.05), ("V_igbt", 2.0)]
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect()
    }

    #[test]
    fn published_counts() {
        let rows: Vec<_> = table_i()
            .iter()
            .map(|e| (e.label, e.transformers, e.switches, e.dc_sources, e.compensates_sag, e.limits_fault))
            .collect();
        assert_eq!(
            rows,
            vec![
                ("1", 2, 1, 0, false, true),
                ("23", 1, 1, 1, false, true),
                ("24", 1, 6, 0, false, true),
                ("22", 2, 24, 3, true, true),
                ("9", 2, 10, 0, true, true),
                ("proposed", 1, 6, 3, true, true),
            ]
        );
    }

    #[test]
    fn proposed_example_point() {
        let i = 4.861;
        let op = OperatingPoint { i_pri: i, i_sec: i, i_line: i };
        let entry = table_i()[5];
        let loss = evaluate_topology_loss(&entry, &op, &proposed_params()).unwrap().unwrap();
        assert!((loss - 14.0849321).abs() < 1e-9 * 14.0849321);
    }

    #[test]
    fn missing_parameter_names_entry_and_symbol() {
        let op = OperatingPoint { i_pri: 1.0, i_sec: 1.0, i_line: 1.0 };
        let err = evaluate_topology_loss(&table_i()[0], &op, &TopologyParams::new()).unwrap_err();
        assert_eq!(
            err,
            Error::MissingParameter {
                entry: "[1]".into(),
                symbol: "R_S1".into()
            }
        );
    }

    #[test]
    fn unpublished_entry_has_no_loss() {
        let op = OperatingPoint { i_pri: 1.0, i_sec: 1.0, i_line: 1.0 };
        assert_eq!(evaluate_topology_loss(&table_i()[4], &op, &TopologyParams::new()), Ok(None));
    }

    #[test]
    fn literal_bridge_expression() {
        let p: TopologyParams = [
            ("R_S1", 0.1),
            ("R_S2", 0.2),
            ("V_DF", 0.7),
            ("V_SW", 1.5),
            ("r_d", 0.01),
            ("I_d", 3.0),
            ("I_DC", 4.0),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect();
        let op = OperatingPoint { i_pri: 2.0, i_sec: 3.0, i_line: 0.0 };
        let loss = evaluate_topology_loss(&table_i()[0], &op, &p).unwrap().unwrap();
        let expected = (2.0 * 0.1 + 9.0 * 0.2) * 2.0 + (1.4 + 1.5 + 0.03) * 4.0;
        assert!((loss - expected).abs() < 1e-12);
    }
}
