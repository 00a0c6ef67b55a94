//! Post-processing of traces and parameter sets.

mod loss;
mod metrics;
mod signal;
mod topology;

pub use loss::{power_loss, LossBreakdown};
pub use metrics::{steady_fault_peak, scenario_metrics, MetricsConfig, ScenarioMetrics};
pub use signal::{
    fit_fundamental, harmonic_spectrum, rms, sliding_rms, thd, trace_rms, FundamentalFit, HarmonicSpectrum,
    DEFAULT_HARMONIC_CAP,
};
pub use topology::{
    evaluate_topology_loss, table_i, topology_comparison, LossFormula, OperatingPoint, TopologyEntry,
    TopologyParams, TopologyRow,
};
