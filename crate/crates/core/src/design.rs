//! Component sizing and rating calculations: magnetizing inductance, turns
//! ratios, transformer capacity, DC-link bound and switch voltage stress.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::OperatingMode;

/// Admissible DC-link voltage as a fraction of the IGBT blocking voltage.
pub const DC_LINK_FRACTION: f64 = 0.65;

fn positive(what: &'static str, fields: &[(&str, f64)]) -> Result<()> {
    for (name, v) in fields {
        if !(v.is_finite() && *v > 0.0) {
            return Err(Error::invalid(what, format!("{name} must be finite and > 0, got {v}")));
        }
    }
    Ok(())
}

/// Limiting requirements. The two `lambda` roles are kept apart: one is a
/// current multiple, the other a voltage ratio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FaultLimitSpec {
    /// Limited fault current as a multiple of rated load current.
    pub fault_multiple_lambda_i: f64,
    pub load_va: f64,
    /// Injected voltage as a fraction of line voltage.
    pub sag_ratio_lambda_v: f64,
}

impl FaultLimitSpec {
    pub fn validate(&self) -> Result<()> {
        let what = "fault limit spec";
        positive(what, &[("load_va", self.load_va)])?;
        if !(self.fault_multiple_lambda_i > 1.0 && self.fault_multiple_lambda_i.is_finite()) {
            return Err(Error::invalid(what, "fault_multiple_lambda_i must be > 1"));
        }
        if !(self.sag_ratio_lambda_v > 0.0 && self.sag_ratio_lambda_v < 1.0) {
            return Err(Error::invalid(what, "sag_ratio_lambda_v must lie in (0, 1)"));
        }
        Ok(())
    }
}

/// `I_L,max = S_load / V_s`.
pub fn rated_load_current(load_va: f64, v_source_rms: f64) -> Result<f64> {
    positive("rated current inputs", &[("load_va", load_va), ("v_source_rms", v_source_rms)])?;
    Ok(load_va / v_source_rms)
}

/// Largest magnetizing inductance that still lets `lambda * I_L,max` flow
/// through a bolted fault: `L_m,max = U_s / (omega * lambda * I_L,max)`.
pub fn size_magnetizing_inductance(
    v_source_rms: f64,
    omega: f64,
    lambda_i: f64,
    rated_current: f64,
) -> Result<f64> {
    positive("magnetizing sizing inputs", &[
        ("v_source_rms", v_source_rms),
        ("omega", omega),
        ("rated_current", rated_current),
    ])?;
    if !(lambda_i > 1.0 && lambda_i.is_finite()) {
        return Err(Error::invalid("magnetizing sizing inputs", "lambda_i must be > 1"));
    }
    Ok(v_source_rms / (omega * lambda_i * rated_current))
}

/// Fault current when the limiting reactance dominates the loop,
/// `I_F ~ U_s / (omega * L_m)`.
pub fn limited_fault_current(v_source_rms: f64, omega: f64, l_magnetizing: f64) -> Result<f64> {
    positive("limited current inputs", &[
        ("v_source_rms", v_source_rms),
        ("omega", omega),
        ("l_magnetizing", l_magnetizing),
    ])?;
    Ok(v_source_rms / (omega * l_magnetizing))
}

/// Magnetizing inductance to build so that leakage plus magnetizing
/// inductance equals the sized limiting inductance.
pub fn magnetizing_for_limiting_inductance(l_limiting: f64, l_leakage: f64) -> Result<f64> {
    let l_m = l_limiting - l_leakage;
    if !(l_m > l_leakage) {
        return Err(Error::invalid(
            "magnetizing inductance",
            format!("limiting inductance {l_limiting} H leaves no room above leakage {l_leakage} H"),
        ));
    }
    Ok(l_m)
}

/// Upper bound on the DC-link voltage, `0.65 * V_CES`.
pub fn dc_link_limit(v_ces: f64) -> f64 {
    DC_LINK_FRACTION * v_ces
}

/// Rejects a DC-link voltage above [`dc_link_limit`].
pub fn check_dc_link(v_dc: f64, v_ces: f64) -> Result<()> {
    let limit = dc_link_limit(v_ces);
    if v_dc > limit {
        return Err(Error::invalid(
            "switch parameters",
            format!("v_dc = {v_dc} V exceeds the DC-link limit {limit} V (0.65 * v_ces)"),
        ));
    }
    Ok(())
}

/// Injection transformer ratio `a = lambda_v * V_line / V_ac,inv`.
pub fn turns_ratio_for_sag(lambda_v: f64, v_line_rms: f64, v_ac_inv: f64) -> Result<f64> {
    positive("turns ratio inputs", &[
        ("lambda_v", lambda_v),
        ("v_line_rms", v_line_rms),
        ("v_ac_inv", v_ac_inv),
    ])?;
    Ok(lambda_v * v_line_rms / v_ac_inv)
}

/// Which form of the series-transformer ratio to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RatioForm {
    /// `k = sqrt(U_s / (lambda I omega L_sec))`, consistent with
    /// `I_F = U_s / (k^2 omega L_sec)`.
    #[default]
    SquareRoot,
    /// The same ratio without the square root, kept for comparison.
    Literal,
}

/// Series-transformer turns ratio `k` from the limiting requirement and the
/// secondary-referred magnetizing inductance `l_secondary`.
pub fn series_transformer_ratio(
    v_source_rms: f64,
    lambda_i: f64,
    rated_current: f64,
    omega: f64,
    l_secondary: f64,
    form: RatioForm,
) -> Result<f64> {
    positive("series ratio inputs", &[
        ("v_source_rms", v_source_rms),
        ("lambda_i", lambda_i),
        ("rated_current", rated_current),
        ("omega", omega),
        ("l_secondary", l_secondary),
    ])?;
    let x = v_source_rms / (lambda_i * rated_current * omega * l_secondary);
    Ok(match form {
        RatioForm::SquareRoot => x.sqrt(),
        RatioForm::Literal => x,
    })
}

/// `S_T = lambda * I_L,max * U_s`.
pub fn transformer_capacity(lambda_i: f64, rated_current: f64, v_source_rms: f64) -> Result<f64> {
    positive("capacity inputs", &[
        ("lambda_i", lambda_i),
        ("rated_current", rated_current),
        ("v_source_rms", v_source_rms),
    ])?;
    Ok(lambda_i * rated_current * v_source_rms)
}

/// Blocking voltage across each switch of the pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SwitchStress {
    pub positive_half: f64,
    pub negative_half: f64,
}

impl SwitchStress {
    /// The figure a device has to be rated for.
    pub fn rating(&self) -> f64 {
        self.positive_half
    }
}

/// Peak voltage stress on S1/S2.
///
/// Limiting: `+alpha V_m / a + V_dc` on the positive half cycle and
/// `-alpha V_m / a + V_dc` on the negative one. Compensation: `2 V_dc` on
/// both halves, independent of the other arguments.
pub fn switch_stress(
    mode: OperatingMode,
    alpha: f64,
    v_m_peak: f64,
    turns_ratio: f64,
    v_dc: f64,
) -> Result<SwitchStress> {
    match mode {
        OperatingMode::Normal => Err(Error::UnratedMode("normal")),
        OperatingMode::Compensation => {
            positive("stress inputs", &[("v_dc", v_dc)])?;
            Ok(SwitchStress {
                positive_half: 2.0 * v_dc,
                negative_half: 2.0 * v_dc,
            })
        }
        OperatingMode::FaultLimiting => {
            positive("stress inputs", &[
                ("v_m_peak", v_m_peak),
                ("turns_ratio", turns_ratio),
                ("v_dc", v_dc),
            ])?;
            if !(alpha > 0.0 && alpha <= 1.0) {
                return Err(Error::invalid("stress inputs", "alpha must lie in (0, 1]"));
            }
            let swing = alpha * v_m_peak / turns_ratio;
            Ok(SwitchStress {
                positive_half: swing + v_dc,
                negative_half: -swing + v_dc,
            })
        }
    }
}

/// Everything needed for a full sizing pass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DesignInputs {
    pub v_source_rms: f64,
    pub frequency: f64,
    pub limit: FaultLimitSpec,
    /// Inverter AC output voltage (RMS) available for injection.
    pub v_ac_inv: f64,
    /// Secondary-referred magnetizing inductance used for `k`.
    pub l_secondary: f64,
    pub v_ces: f64,
    pub v_dc: f64,
    /// Line-voltage variation used in the limiting-mode stress.
    pub alpha: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DesignReport {
    pub rated_current: f64,
    pub l_m_max: f64,
    pub dc_link_max: f64,
    pub turns_ratio: f64,
    pub series_ratio_k: f64,
    pub transformer_va: f64,
    pub stress_fault_pos: f64,
    pub stress_fault_neg: f64,
    pub stress_comp: f64,
}

pub fn design_report(inputs: &DesignInputs) -> Result<DesignReport> {
    inputs.limit.validate()?;
    positive("design inputs", &[("frequency", inputs.frequency), ("v_ces", inputs.v_ces)])?;
    check_dc_link(inputs.v_dc, inputs.v_ces)?;
    let omega = 2.0 * std::f64::consts::PI * inputs.frequency;
    let lambda_i = inputs.limit.fault_multiple_lambda_i;
    let rated_current = rated_load_current(inputs.limit.load_va, inputs.v_source_rms)?;
    let l_m_max = size_magnetizing_inductance(inputs.v_source_rms, omega, lambda_i, rated_current)?;
    let turns_ratio = turns_ratio_for_sag(inputs.limit.sag_ratio_lambda_v, inputs.v_source_rms, inputs.v_ac_inv)?;
    let series_ratio_k = series_transformer_ratio(
        inputs.v_source_rms,
        lambda_i,
        rated_current,
        omega,
        inputs.l_secondary,
        RatioForm::SquareRoot,
    )?;
    let transformer_va = transformer_capacity(lambda_i, rated_current, inputs.v_source_rms)?;
    let v_peak = inputs.v_source_rms * std::f64::consts::SQRT_2;
    let fault = switch_stress(OperatingMode::FaultLimiting, inputs.alpha, v_peak, turns_ratio, inputs.v_dc)?;
    let comp = switch_stress(OperatingMode::Compensation, inputs.alpha, v_peak, turns_ratio, inputs.v_dc)?;
    Ok(DesignReport {
        rated_current,
        l_m_max,
        dc_link_max: dc_link_limit(inputs.v_ces),
        turns_ratio,
        series_ratio_k,
        transformer_va,
        stress_fault_pos: fault.positive_half,
        stress_fault_neg: fault.negative_half,
        stress_comp: comp.positive_half,
    })
}
