//! HF channel realizations on the symbol grid.
//!
//! * Model 1: two equal-power Rayleigh paths at taps `0` and `L_c`, each a
//!   Watterson process with a Gaussian Doppler spectrum.
//! * Model 2: the same two taps, drawn once and held for the whole run.
//! * Model 3: `L_c + 1` Rayleigh taps held for two frames, then redrawn.
//!
//! The Doppler process is i.i.d. complex Gaussian noise at a low rate
//! (at least 32 samples per coherence time) shaped by a Gaussian FIR and
//! brought to the symbol rate with Catmull-Rom cubic interpolation.

use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::rng::{self, Stream};
use crate::{Error, Result, C64};

/// Low-rate samples per Doppler coherence time.
const DOPPLER_SAMPLES_PER_COHERENCE: f64 = 32.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ChannelModelId {
    /// ITU-R Poor, doubly selective.
    Model1,
    /// Static two-tap with the Model 1 delay spread.
    Model2,
    /// Static multi-tap, redrawn every two frames.
    Model3,
}

impl ChannelModelId {
    pub fn is_time_varying(self) -> bool {
        matches!(self, ChannelModelId::Model1)
    }
}

impl fmt::Display for ChannelModelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = match self {
            ChannelModelId::Model1 => 1,
            ChannelModelId::Model2 => 2,
            ChannelModelId::Model3 => 3,
        };
        write!(f, "model{n}")
    }
}

impl FromStr for ChannelModelId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().trim_start_matches("model") {
            "1" | "poor" => Ok(ChannelModelId::Model1),
            "2" => Ok(ChannelModelId::Model2),
            "3" => Ok(ChannelModelId::Model3),
            _ => Err(Error::invalid("channel_model", format!("unknown model `{s}` (1, 2, 3)"))),
        }
    }
}

/// How the configured Doppler figure maps onto the Gaussian spectrum's
/// standard deviation `sigma_d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DopplerConvention {
    /// The figure is the two-sided spread `2 sigma_d`.
    TwoSided,
    /// The figure is `sigma_d` itself.
    Sigma,
}

impl FromStr for DopplerConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "two-sided" | "two_sided" | "2sigma" => Ok(DopplerConvention::TwoSided),
            "sigma" => Ok(DopplerConvention::Sigma),
            _ => Err(Error::invalid("doppler_convention", format!("`{s}` (two-sided, sigma)"))),
        }
    }
}

impl fmt::Display for DopplerConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DopplerConvention::TwoSided => "two-sided",
            DopplerConvention::Sigma => "sigma",
        })
    }
}

/// Average tap powers for Model 3.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PowerProfile {
    Uniform,
    /// `p_l ~ exp(-decay * l)`.
    Exponential { decay: f64 },
}

impl PowerProfile {
    pub fn powers(self, taps: usize) -> Vec<f64> {
        let raw: Vec<f64> = match self {
            PowerProfile::Uniform => vec![1.0; taps],
            PowerProfile::Exponential { decay } => {
                (0..taps).map(|l| (-decay * l as f64).exp()).collect()
            }
        };
        let total: f64 = raw.iter().sum();
        raw.into_iter().map(|p| p / total).collect()
    }
}

/// Parameters shared by the three generators.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSpec {
    /// Channel memory of the two-path models (taps `0..=l_c`).
    pub l_c: usize,
    /// FTN symbol rate, symbols per second.
    pub symbol_rate: f64,
    pub doppler_hz: f64,
    pub doppler_convention: DopplerConvention,
    /// Number of taps of Model 3.
    pub model3_taps: usize,
    pub model3_profile: PowerProfile,
    /// Scale every static realization (Models 2 and 3) to unit total power,
    /// keeping the relative gains and phases random.
    pub normalize_static: bool,
}

impl ChannelSpec {
    /// ITU-R Poor defaults: 1 Hz Doppler, 7-tap uniform Model 3.
    pub fn hf(l_c: usize, symbol_rate: f64) -> Self {
        Self {
            l_c,
            symbol_rate,
            doppler_hz: 1.0,
            doppler_convention: DopplerConvention::TwoSided,
            model3_taps: 7,
            model3_profile: PowerProfile::Uniform,
            normalize_static: true,
        }
    }

    pub fn sigma_d(&self) -> f64 {
        match self.doppler_convention {
            DopplerConvention::TwoSided => self.doppler_hz / 2.0,
            DopplerConvention::Sigma => self.doppler_hz,
        }
    }

    /// Channel memory for `model`.
    pub fn l_c_for(&self, model: ChannelModelId) -> usize {
        match model {
            ChannelModelId::Model3 => self.model3_taps.saturating_sub(1),
            _ => self.l_c,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.symbol_rate > 0.0 && self.symbol_rate.is_finite()) {
            return Err(Error::invalid("symbol_rate", format!("{}", self.symbol_rate)));
        }
        if !(self.doppler_hz >= 0.0 && self.doppler_hz.is_finite()) {
            return Err(Error::invalid("doppler_hz", format!("{}", self.doppler_hz)));
        }
        if self.model3_taps == 0 {
            return Err(Error::invalid("model3_taps", "must be at least 1"));
        }
        Ok(())
    }

    /// Draws one realization of `model` covering `n_frames` frames of
    /// `frame_len` symbols plus `extra` trailing symbols.
    pub fn generate(
        &self,
        model: ChannelModelId,
        seed: u64,
        n_frames: usize,
        frame_len: usize,
        extra: usize,
    ) -> Result<ChannelProcess> {
        let n = n_frames * frame_len + extra;
        match model {
            ChannelModelId::Model1 => make_model1(self, seed, n),
            ChannelModelId::Model2 => make_model2(self, seed, n),
            ChannelModelId::Model3 => make_model3(self, seed, n_frames, frame_len, extra),
        }
    }
}

/// Time-varying tap matrix `c_{k,l}`; rows are held for `hold` symbols.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelProcess {
    rows: Vec<Vec<C64>>,
    hold: usize,
    n_symbols: usize,
    l_c: usize,
    delay_profile: Vec<usize>,
    doppler_hz: f64,
    symbol_rate: f64,
}

impl ChannelProcess {
    /// A channel whose taps never change.
    pub fn static_taps(taps: Vec<C64>, n_symbols: usize) -> Result<Self> {
        if taps.is_empty() {
            return Err(Error::invalid("taps", "need at least one tap"));
        }
        let delay_profile = taps
            .iter()
            .enumerate()
            .filter(|(_, t)| t.norm_sqr() > 0.0)
            .map(|(l, _)| l)
            .collect();
        Ok(Self {
            l_c: taps.len() - 1,
            rows: vec![taps],
            hold: n_symbols.max(1),
            n_symbols,
            delay_profile,
            doppler_hz: 0.0,
            symbol_rate: 0.0,
        })
    }

    /// Taps at symbol `k`. Indices past the end hold the last row.
    pub fn taps_at(&self, k: usize) -> &[C64] {
        let row = (k / self.hold).min(self.rows.len() - 1);
        &self.rows[row]
    }

    pub fn tap(&self, k: usize, l: usize) -> C64 {
        self.taps_at(k).get(l).copied().unwrap_or_default()
    }

    pub fn n_symbols(&self) -> usize {
        self.n_symbols
    }

    pub fn l_c(&self) -> usize {
        self.l_c
    }

    pub fn delay_profile(&self) -> &[usize] {
        &self.delay_profile
    }

    pub fn doppler_hz(&self) -> f64 {
        self.doppler_hz
    }

    pub fn symbol_rate(&self) -> f64 {
        self.symbol_rate
    }

    /// Holds the taps seen at the start of every `block` symbols.
    pub fn snapshot_per_block(&self, block: usize) -> Self {
        let block = block.max(1);
        let n_rows = self.n_symbols.div_ceil(block).max(1);
        Self {
            rows: (0..n_rows).map(|b| self.taps_at(b * block).to_vec()).collect(),
            hold: block,
            ..self.clone()
        }
    }
}

fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)) * FRAC_1_SQRT_2
}

/// `L_c` for a delay spread, rounded to whole FTN symbol intervals.
pub fn make_lc(delay_spread_ms: f64, symbol_rate: f64, tau: f64) -> Result<usize> {
    if !(delay_spread_ms >= 0.0 && delay_spread_ms.is_finite()) {
        return Err(Error::invalid("delay_spread_ms", format!("{delay_spread_ms}")));
    }
    if !(symbol_rate > 0.0) || !(tau > 0.0 && tau <= 1.0) {
        return Err(Error::invalid(
            "symbol_rate/tau",
            format!("{symbol_rate} symbols/s, tau {tau}"),
        ));
    }
    let intervals = delay_spread_ms / 1000.0 * symbol_rate / tau;
    let l_c = intervals.round();
    if (intervals - l_c).abs() > 0.05 {
        log::warn!(
            "delay spread {delay_spread_ms} ms spans {intervals:.3} symbol intervals at tau = {tau}; rounding to {l_c}"
        );
    }
    Ok(l_c as usize)
}

pub fn make_model2(spec: &ChannelSpec, seed: u64, n_symbols: usize) -> Result<ChannelProcess> {
    spec.validate()?;
    let mut rng = rng::stream(seed, Stream::Channel, &[2]);
    let mut taps = vec![C64::new(0.0, 0.0); spec.l_c + 1];
    let paths = two_path_indices(spec.l_c);
    let amp = (1.0 / paths.len() as f64).sqrt();
    for &l in &paths {
        taps[l] = complex_normal(&mut rng) * amp;
    }
    if spec.normalize_static {
        normalize(&mut taps);
    }
    Ok(ChannelProcess {
        rows: vec![taps],
        hold: n_symbols.max(1),
        n_symbols,
        l_c: spec.l_c,
        delay_profile: paths,
        doppler_hz: 0.0,
        symbol_rate: spec.symbol_rate,
    })
}

fn normalize(taps: &mut [C64]) {
    let norm = taps.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    if norm > 0.0 {
        taps.iter_mut().for_each(|c| *c /= norm);
    }
}

fn two_path_indices(l_c: usize) -> Vec<usize> {
    if l_c == 0 {
        vec![0]
    } else {
        vec![0, l_c]
    }
}

pub fn make_model1(spec: &ChannelSpec, seed: u64, n_symbols: usize) -> Result<ChannelProcess> {
    spec.validate()?;
    if n_symbols == 0 {
        return Err(Error::invalid("n_symbols", "must be at least 1"));
    }
    let sigma_d = spec.sigma_d();
    if sigma_d == 0.0 {
        let mut ch = make_model2(spec, seed, n_symbols)?;
        ch.doppler_hz = 0.0;
        return Ok(ch);
    }
    let paths = two_path_indices(spec.l_c);
    let amp = (1.0 / paths.len() as f64).sqrt();
    let processes: Vec<Vec<C64>> = paths
        .iter()
        .enumerate()
        .map(|(i, _)| {
            let mut rng = rng::stream(seed, Stream::Channel, &[1, i as u64]);
            gaussian_doppler_process(&mut rng, sigma_d, spec.symbol_rate, n_symbols)
        })
        .collect();
    let rows = (0..n_symbols)
        .map(|k| {
            let mut row = vec![C64::new(0.0, 0.0); spec.l_c + 1];
            for (p, &l) in processes.iter().zip(&paths) {
                row[l] = p[k] * amp;
            }
            row
        })
        .collect();
    Ok(ChannelProcess {
        rows,
        hold: 1,
        n_symbols,
        l_c: spec.l_c,
        delay_profile: paths,
        doppler_hz: spec.doppler_hz,
        symbol_rate: spec.symbol_rate,
    })
}

/// Unit-power complex Gaussian process with autocorrelation
/// `exp(-2 (pi sigma_d t)^2)`, sampled at `symbol_rate`.
pub fn gaussian_doppler_process<R: Rng + ?Sized>(
    rng: &mut R,
    sigma_d: f64,
    symbol_rate: f64,
    n: usize,
) -> Vec<C64> {
    let coherence = 1.0 / (SQRT_2 * PI * sigma_d);
    let decim = ((symbol_rate * coherence / DOPPLER_SAMPLES_PER_COHERENCE).floor() as usize).max(1);
    let fs_low = symbol_rate / decim as f64;

    // |H(f)|^2 = exp(-f^2 / (2 sigma_d^2))  <=>  h(t) = exp(-t^2 / (2 s^2)).
    let s = 1.0 / (2.0 * SQRT_2 * PI * sigma_d) * fs_low;
    let half = (4.0 * s).ceil() as usize;
    let mut h: Vec<f64> = (0..=2 * half)
        .map(|m| {
            let d = m as f64 - half as f64;
            (-d * d / (2.0 * s * s)).exp()
        })
        .collect();
    let norm = h.iter().map(|x| x * x).sum::<f64>().sqrt();
    h.iter_mut().for_each(|x| *x /= norm);

    let n_low = n / decim + 4;
    let white: Vec<C64> = (0..n_low + 2 * half).map(|_| complex_normal(rng)).collect();
    let low: Vec<C64> = (0..n_low)
        .map(|i| {
            h.iter()
                .enumerate()
                .map(|(m, &hm)| white[i + 2 * half - m] * hm)
                .sum()
        })
        .collect();

    (0..n)
        .map(|k| {
            // Low-rate sample 1 sits at symbol 0.
            let pos = k as f64 / decim as f64 + 1.0;
            let i = pos.floor() as usize;
            let t = pos - i as f64;
            let (p0, p1, p2, p3) = (low[i - 1], low[i], low[i + 1], low[i + 2]);
            let t2 = t * t;
            let t3 = t2 * t;
            (p1 * 2.0
                + (p2 - p0) * t
                + (p0 * 2.0 - p1 * 5.0 + p2 * 4.0 - p3) * t2
                + (p1 * 3.0 - p0 - p2 * 3.0 + p3) * t3)
                * 0.5
        })
        .collect()
}

/// Model 3 over `n_frames` frames; taps change only at even frame indices.
pub fn make_model3(
    spec: &ChannelSpec,
    seed: u64,
    n_frames: usize,
    frame_len: usize,
    extra: usize,
) -> Result<ChannelProcess> {
    spec.validate()?;
    if frame_len == 0 {
        return Err(Error::invalid("frame_len", "must be positive"));
    }
    let taps = spec.model3_taps;
    let powers = spec.model3_profile.powers(taps);
    let n_symbols = n_frames * frame_len + extra;
    let n_rows = n_symbols.div_ceil(2 * frame_len).max(1);
    let mut rng = rng::stream(seed, Stream::Channel, &[3]);
    let rows = (0..n_rows)
        .map(|_| {
            let mut row: Vec<C64> = powers
                .iter()
                .map(|p| complex_normal(&mut rng) * p.sqrt())
                .collect();
            if spec.normalize_static {
                normalize(&mut row);
            }
            row
        })
        .collect();
    Ok(ChannelProcess {
        rows,
        hold: 2 * frame_len,
        n_symbols,
        l_c: taps - 1,
        delay_profile: (0..taps).collect(),
        doppler_hz: 0.0,
        symbol_rate: spec.symbol_rate,
    })
}

/// Noiseless `y_k = sum_l c_{k,l} x_{k-l}` with `x_k = 0` for `k < 0`.
pub fn convolve_channel(x: &[C64], ch: &ChannelProcess) -> Result<Vec<C64>> {
    if x.len() > ch.n_symbols() {
        return Err(Error::LengthMismatch {
            what: "input longer than channel realization",
            expected: ch.n_symbols(),
            actual: x.len(),
        });
    }
    Ok((0..x.len())
        .map(|k| {
            ch.taps_at(k)
                .iter()
                .enumerate()
                .take(k + 1)
                .map(|(l, &c)| c * x[k - l])
                .sum()
        })
        .collect())
}

/// Time-varying convolution plus circular complex Gaussian noise of
/// per-sample variance `noise_sigma^2`.
pub fn apply_channel<R: Rng + ?Sized>(
    x: &[C64],
    ch: &ChannelProcess,
    noise_sigma: f64,
    rng: &mut R,
) -> Result<Vec<C64>> {
    let mut y = convolve_channel(x, ch)?;
    if noise_sigma > 0.0 {
        for v in &mut y {
            *v += complex_normal(rng) * noise_sigma;
        }
    }
    Ok(y)
}
