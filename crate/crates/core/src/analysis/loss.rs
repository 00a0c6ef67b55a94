//! Conduction and core loss of the series transformer and switch pair.

use serde::{Deserialize, Serialize};

use crate::circuit::{SwitchParams, TransformerParams};
use crate::sim::OperatingMode;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossBreakdown {
    pub p_core: f64,
    pub p_copper: f64,
    pub p_switch: f64,
    pub p_total: f64,
}

/// Loss at the given RMS currents (all `>= 0`). The switch conduction term
/// `V_igbt * I_line` applies while the switches carry current; in
/// FaultLimiting they are open and only transformer loss remains.
pub fn power_loss(
    mode: OperatingMode,
    xfmr: &TransformerParams,
    switches: &SwitchParams,
    i_primary_rms: f64,
    i_secondary_rms: f64,
    i_line_rms: f64,
) -> LossBreakdown {
    debug_assert!(i_primary_rms >= 0.0 && i_secondary_rms >= 0.0 && i_line_rms >= 0.0);
    let p_core = xfmr.p_core;
    let p_copper = xfmr.r_primary * i_primary_rms * i_primary_rms
        + xfmr.r_secondary_referred * i_secondary_rms * i_secondary_rms;
    let p_switch = match mode {
        OperatingMode::Normal | OperatingMode::Compensation => switches.v_on_drop * i_line_rms,
        OperatingMode::FaultLimiting => 0.0,
    };
    LossBreakdown {
        p_core,
        p_copper,
        p_switch,
        p_total: p_core + p_copper + p_switch,
    }
}
