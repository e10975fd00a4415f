//! Pilot sequence location identification.
//!
//! The receiver correlates one frame of whitened samples `r~` against the
//! whitened pilot `p~ = p * v` at every expected spike lag, shortlists lags
//! whose squared correlation is within `c1` of the peak, folds each onto the
//! allowed grid and keeps the pair `(d0, d0 + L_c)` whose joint spike stands
//! out most from its neighbourhood (the measure `mu`).

use crate::framing::PlacementSet;
use crate::waveform::TapSet;
use crate::{Error, Result, C64};

/// Pilot after ISI and whitening, with its squared autocorrelation.
#[derive(Debug, Clone, PartialEq)]
pub struct WhitenedPilot {
    p_tilde: Vec<C64>,
    autocorr_sq: Vec<f64>,
}

impl WhitenedPilot {
    pub fn p_tilde(&self) -> &[C64] {
        &self.p_tilde
    }

    /// `|R_{p~p~}(delta)|^2` for `delta = 0 .. N_p - 1`.
    pub fn autocorr_sq(&self) -> &[f64] {
        &self.autocorr_sq
    }

    pub fn len(&self) -> usize {
        self.p_tilde.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p_tilde.is_empty()
    }

    /// Local autocorrelation contrast `psi(delta)`; a diagnostic only.
    pub fn psi(&self, delta: usize, r0: usize) -> Result<f64> {
        let max = self.len().saturating_sub(1);
        if delta > max {
            return Err(Error::LagOutOfRange { delta, max });
        }
        let lambda = local_lambda(|j| self.autocorr_sq[j], delta, r0, 0, max)?;
        Ok(self.autocorr_sq[delta] / lambda)
    }
}

/// `p~_k = sum_j p_j v_{k-j}` over the first `N_p` outputs; `v` is causal.
pub fn whitened_pilot(p: &[C64], v: &TapSet) -> WhitenedPilot {
    let p_tilde: Vec<C64> = (0..p.len())
        .map(|k| {
            (0..=k)
                .map(|j| p[j] * v.lag((k - j) as isize))
                .sum()
        })
        .collect();
    let n = p_tilde.len();
    let autocorr_sq = (0..n)
        .map(|d| {
            (0..n - d)
                .map(|k| p_tilde[k + d] * p_tilde[k].conj())
                .sum::<C64>()
                .norm_sqr()
        })
        .collect();
    WhitenedPilot {
        p_tilde,
        autocorr_sq,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorConfig {
    /// Candidate threshold as a fraction of the peak.
    pub c1: f64,
    /// Factor applied to the best measure so far.
    pub c2: f64,
    /// Neighbourhood radius of the local measure.
    pub r0: usize,
}

impl DetectorConfig {
    pub const DEFAULT_C1: f64 = 0.5;
    pub const DEFAULT_C2: f64 = 1.0;

    /// Defaults for a channel of memory `l_c`: `r0 = L_c - 1`, at least 1.
    pub fn for_channel(l_c: usize) -> Self {
        Self {
            c1: Self::DEFAULT_C1,
            c2: Self::DEFAULT_C2,
            r0: l_c.saturating_sub(1).max(1),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c1 > 0.0 && self.c1 <= 1.0) {
            return Err(Error::invalid("c1", format!("{} not in (0, 1]", self.c1)));
        }
        if !(self.c2 > 0.0 && self.c2.is_finite()) {
            return Err(Error::invalid("c2", format!("{} must be positive", self.c2)));
        }
        if self.r0 == 0 {
            return Err(Error::invalid("r0", "must be at least 1"));
        }
        Ok(())
    }
}

/// `|sum_m r~_{delta+m} p~*_m|^2`.
pub fn cross_corr_at(r_tilde: &[C64], wp: &WhitenedPilot, delta: usize) -> Result<f64> {
    let n_p = wp.len();
    if delta + n_p > r_tilde.len() {
        return Err(Error::LagOutOfRange {
            delta,
            max: r_tilde.len().saturating_sub(n_p),
        });
    }
    Ok(r_tilde[delta..delta + n_p]
        .iter()
        .zip(&wp.p_tilde)
        .map(|(r, p)| r * p.conj())
        .sum::<C64>()
        .norm_sqr())
}

/// Squared cross-correlation at each lag in `deltas`, in the same order.
pub fn cross_corr_sq(r_tilde: &[C64], wp: &WhitenedPilot, deltas: &[usize]) -> Result<Vec<f64>> {
    deltas
        .iter()
        .map(|&d| cross_corr_at(r_tilde, wp, d))
        .collect()
}

/// Mean of `values` over the radius-`r0` window around `delta`, clipped to
/// `[delta_min, delta_max]`, excluding `delta` itself.
pub fn local_lambda<F: FnMut(usize) -> f64>(
    mut values: F,
    delta: usize,
    r0: usize,
    delta_min: usize,
    delta_max: usize,
) -> Result<f64> {
    if delta < delta_min || delta > delta_max {
        return Err(Error::LagOutOfRange {
            delta,
            max: delta_max,
        });
    }
    let lo = delta.saturating_sub(r0).max(delta_min);
    let hi = (delta + r0).min(delta_max);
    if hi == lo {
        return Err(Error::ZeroWidthWindow(delta));
    }
    let sum: f64 = (lo..=hi).map(&mut values).sum();
    Ok((sum - values(delta)) / (hi - lo) as f64)
}

/// Joint spike contrast of the pair `(d0, dl)`. A zero background gives
/// `+inf`, or `0` when the spikes are zero too.
pub fn measure_mu<F: FnMut(usize) -> f64>(
    mut values: F,
    d0: usize,
    dl: usize,
    r0: usize,
    bounds: (usize, usize),
) -> Result<f64> {
    let num = values(d0) + values(dl);
    let den = local_lambda(&mut values, d0, r0, bounds.0, bounds.1)?
        + local_lambda(&mut values, dl, r0, bounds.0, bounds.1)?;
    Ok(if den > 0.0 {
        num / den
    } else if num > 0.0 {
        f64::INFINITY
    } else {
        0.0
    })
}

/// Lazily evaluated `|R_{r~p~}|^2` over one frame.
pub struct CorrelationField<'a> {
    r_tilde: &'a [C64],
    wp: &'a WhitenedPilot,
    cache: Vec<Option<f64>>,
}

impl<'a> CorrelationField<'a> {
    pub fn new(r_tilde: &'a [C64], wp: &'a WhitenedPilot) -> Result<Self> {
        if r_tilde.len() < wp.len() || wp.is_empty() {
            return Err(Error::LengthMismatch {
                what: "received frame shorter than pilot",
                expected: wp.len(),
                actual: r_tilde.len(),
            });
        }
        Ok(Self {
            r_tilde,
            wp,
            cache: vec![None; r_tilde.len() - wp.len() + 1],
        })
    }

    /// `(delta_min, delta_max)` of the local windows.
    pub fn bounds(&self) -> (usize, usize) {
        (0, self.cache.len() - 1)
    }

    /// Panics if `delta` is past `bounds().1`.
    pub fn get(&mut self, delta: usize) -> f64 {
        if let Some(v) = self.cache[delta] {
            return v;
        }
        let n_p = self.wp.len();
        let v = self.r_tilde[delta..delta + n_p]
            .iter()
            .zip(&self.wp.p_tilde)
            .map(|(r, p)| r * p.conj())
            .sum::<C64>()
            .norm_sqr();
        self.cache[delta] = Some(v);
        v
    }
}

/// Decision of the identification algorithm with its intermediate values.
#[derive(Debug, Clone, PartialEq)]
pub struct Identification {
    pub location: usize,
    /// Largest squared correlation over the expected lags.
    pub peak: f64,
    /// Shortlisted lags with their folded location and measure, ascending.
    pub candidates: Vec<(usize, usize, f64)>,
}

/// Walks `(d0, mu)` candidates in the given order, accepting each whose
/// measure beats the running threshold and raising the threshold to
/// `c2 * mu`. With `c2 = 1` this is the first argmax.
pub fn threshold_scan<I: IntoIterator<Item = (usize, f64)>>(candidates: I, c2: f64) -> usize {
    let mut location = 0;
    let mut r_th2 = 0.0;
    for (d0, mu) in candidates {
        if mu > r_th2 {
            r_th2 = c2 * mu;
            location = d0;
        }
    }
    location
}

/// Runs the decision logic on any correlation field.
pub fn identify_from_values<F: FnMut(usize) -> f64>(
    mut values: F,
    bounds: (usize, usize),
    ps: &PlacementSet,
    cfg: &DetectorConfig,
) -> Result<Identification> {
    cfg.validate()?;
    let expected = ps.expected();
    if let Some(&last) = expected.last() {
        if last > bounds.1 {
            return Err(Error::LagOutOfRange {
                delta: last,
                max: bounds.1,
            });
        }
    }
    let field: Vec<f64> = expected.iter().map(|&d| values(d)).collect();
    let peak = field.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let threshold = cfg.c1 * peak;

    let mut candidates = Vec::new();
    for (&delta, &v) in expected.iter().zip(&field) {
        if !(v > threshold || v == peak) {
            continue;
        }
        let d0 = ps.modulo_correct(delta);
        let mu = measure_mu(&mut values, d0, d0 + ps.l_c(), cfg.r0, bounds)?;
        candidates.push((delta, d0, mu));
    }
    let location = threshold_scan(candidates.iter().map(|&(_, d0, mu)| (d0, mu)), cfg.c2);
    Ok(Identification {
        location,
        peak,
        candidates,
    })
}

pub fn identify_detailed(
    r_tilde: &[C64],
    wp: &WhitenedPilot,
    ps: &PlacementSet,
    cfg: &DetectorConfig,
) -> Result<Identification> {
    let mut field = CorrelationField::new(r_tilde, wp)?;
    let bounds = field.bounds();
    identify_from_values(|d| field.get(d), bounds, ps, cfg)
}

/// Estimated pilot location `n^_sp` of one whitened frame.
pub fn identify(
    r_tilde: &[C64],
    wp: &WhitenedPilot,
    ps: &PlacementSet,
    cfg: &DetectorConfig,
) -> Result<usize> {
    Ok(identify_detailed(r_tilde, wp, ps, cfg)?.location)
}
