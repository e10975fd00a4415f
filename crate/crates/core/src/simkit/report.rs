//! CSV output.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::channel::ChannelProcess;
use crate::{Error, Result};

use super::{ExperimentResult, PointResult};

pub const CSV_HEADER: &str = "ebn0_db,pslie,pslie_ci_lo,pslie_ci_hi,mse,trials,seed";

/// Results table; floats use the shortest round-tripping form.
pub fn to_csv_string(result: &ExperimentResult) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for p in &result.points {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            p.ebn0_db, p.pslie, p.pslie_ci_lo, p.pslie_ci_hi, p.mse, p.trials, result.seed
        );
    }
    out
}

pub fn emit_csv(result: &ExperimentResult, path: &Path) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, to_csv_string(result)).map_err(|e| Error::io(path, e))
}

/// Parses a results table back into points and the seed column. Error
/// counts are recovered from `pslie * trials`.
pub fn parse_csv(text: &str, path: &Path) -> Result<(Vec<PointResult>, Option<u64>)> {
    let err = |line: usize, reason: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        reason,
    };
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == CSV_HEADER => {}
        other => return Err(err(1, format!("unexpected header {other:?}"))),
    }
    let mut points = Vec::new();
    let mut seed = None;
    for (i, line) in lines.enumerate() {
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 7 {
            return Err(err(i + 2, format!("expected 7 columns, got {}", cols.len())));
        }
        let f = |j: usize| -> Result<f64> {
            cols[j]
                .parse()
                .map_err(|_| err(i + 2, format!("bad number `{}`", cols[j])))
        };
        let trials: u64 = cols[5]
            .parse()
            .map_err(|_| err(i + 2, format!("bad count `{}`", cols[5])))?;
        seed = Some(
            cols[6]
                .parse()
                .map_err(|_| err(i + 2, format!("bad seed `{}`", cols[6])))?,
        );
        let pslie = f(1)?;
        points.push(PointResult {
            ebn0_db: f(0)?,
            pslie,
            pslie_ci_lo: f(2)?,
            pslie_ci_hi: f(3)?,
            mse: f(4)?,
            trials,
            errors: (pslie * trials as f64).round() as u64,
        });
    }
    Ok((points, seed))
}

/// Tap matrix as `k,l,re,im` rows for the first `n` symbols.
pub fn channel_probe_csv(ch: &ChannelProcess, n: usize) -> String {
    let mut out = String::from("k,l,re,im\n");
    for k in 0..n.min(ch.n_symbols()) {
        for (l, c) in ch.taps_at(k).iter().enumerate() {
            let _ = writeln!(out, "{k},{l},{},{}", c.re, c.im);
        }
    }
    out
}
