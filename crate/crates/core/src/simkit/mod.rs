//! End-to-end Monte Carlo harness: configuration, the superframe engine,
//! aggregation with Wilson intervals and CSV output.

mod config;
mod engine;
mod report;

pub use config::{parse_grid, ExperimentConfig, LocationMode, NoisePath, PilotSearch, NYQUIST_SYMBOL_RATE};
pub use engine::{
    calibrate_detector, design_pilot, ebn0_to_sigma, run_experiment, run_mse_experiment, run_prepared,
    run_psli_experiment, run_superframe, superframe_signal, Prepared, SuperframeSignal, Tally,
};
pub use report::{channel_probe_csv, emit_csv, parse_csv, to_csv_string, CSV_HEADER};

/// Aggregates at one Eb/N0 point.
#[derive(Debug, Clone, PartialEq)]
pub struct PointResult {
    pub ebn0_db: f64,
    pub pslie: f64,
    pub pslie_ci_lo: f64,
    pub pslie_ci_hi: f64,
    /// Mean over frames of `sum_l |c^_l - c_l|^2`.
    pub mse: f64,
    pub trials: u64,
    pub errors: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub points: Vec<PointResult>,
    pub seed: u64,
    /// Full configuration echo in `key = value` form.
    pub config: Vec<(&'static str, String)>,
    pub wall_time_s: f64,
}

/// 95 % Wilson score interval for `k` successes in `n` trials.
pub fn wilson_interval(k: u64, n: u64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    const Z: f64 = 1.959_963_984_540_054;
    let n = n as f64;
    let p = k as f64 / n;
    let z2 = Z * Z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    let lo = if k == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if k as f64 == n { 1.0 } else { (center + half).min(1.0) };
    (lo, hi)
}
