//! Symbol-spaced FTN intersymbol-interference model.
//!
//! With unit-energy root-raised-cosine pulses sent every `tau` (T = 1), the
//! matched-filter output sampled at the symbol rate sees the raised-cosine
//! autocorrelation `h_k = RC(k tau)` as ISI, and its noise has the same
//! covariance. [`rc_isi_taps`] gives the truncated ISI taps, [`Whitening`]
//! the causal minimum-phase factor `v` of that spectrum (so the whitened
//! channel is `s * c * v` plus white noise) together with the anticausal
//! receiver filter that produces it, and [`ColoredNoise`] draws matched-filter
//! noise directly from the covariance.
//!
//! For `tau < 1 / (1 + beta)` the folded RC spectrum has a band of exact
//! zeros, so the spectrum is floored at a small fraction of its peak before
//! factorization. The whitened noise is then slightly attenuated inside that
//! band, which is where the signal has no energy either.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::StandardNormal;
use rustfft::FftPlanner;

use crate::{Error, Result, C64};

/// FFT size used for spectral factorization.
pub const FACTOR_FFT_LEN: usize = 4096;

/// Spectral floor relative to the spectrum peak.
pub const DEFAULT_SPECTRAL_FLOOR: f64 = 1e-3;

/// Fraction of `sum h_k^2` the default truncation keeps.
pub const DEFAULT_ISI_ENERGY: f64 = 0.9999;

/// Receiver filter taps are kept until this fraction of energy remains.
const RECEIVER_TAIL_ENERGY: f64 = 1e-6;
const RECEIVER_MAX_TAPS: usize = 1024;

/// Negative spectral samples below `-NEGATIVE_TOLERANCE * peak` mean the
/// input is not an autocorrelation at all.
const NEGATIVE_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseConfig {
    /// Roll-off factor of the RRC pulse.
    pub beta: f64,
    /// FTN packing ratio.
    pub tau: f64,
    /// Half-length of the truncated ISI (`2 l_h + 1` taps).
    pub l_h: usize,
}

impl PulseConfig {
    pub fn new(beta: f64, tau: f64, l_h: usize) -> Result<Self> {
        let cfg = Self { beta, tau, l_h };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Uses [`default_isi_half_length`] for `l_h`.
    pub fn with_default_lh(beta: f64, tau: f64) -> Result<Self> {
        Self::new(beta, tau, 1)?;
        Self::new(beta, tau, default_isi_half_length(beta, tau))
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau > 0.0 && self.tau <= 1.0) {
            return Err(Error::invalid("tau", format!("{} not in (0, 1]", self.tau)));
        }
        if !(0.0..=1.0).contains(&self.beta) {
            return Err(Error::invalid("beta", format!("{} not in [0, 1]", self.beta)));
        }
        if self.l_h == 0 {
            return Err(Error::invalid("l_h", "must be at least 1"));
        }
        Ok(())
    }
}

/// Finite complex taps with a designated zero-lag index.
///
/// Tap `i` acts at lag `i - center`, so a causal filter has `center == 0`
/// and a filter with `center == len - 1` is purely anticausal.
#[derive(Debug, Clone, PartialEq)]
pub struct TapSet {
    taps: Vec<C64>,
    center: usize,
}

impl TapSet {
    pub fn new(taps: Vec<C64>, center: usize) -> Result<Self> {
        if taps.is_empty() {
            return Err(Error::invalid("taps", "tap set must not be empty"));
        }
        if center >= taps.len() {
            return Err(Error::invalid(
                "center",
                format!("{center} outside {} taps", taps.len()),
            ));
        }
        if taps.iter().any(|t| !t.re.is_finite() || !t.im.is_finite()) {
            return Err(Error::invalid("taps", "non-finite tap value"));
        }
        Ok(Self { taps, center })
    }

    pub fn causal(taps: Vec<C64>) -> Result<Self> {
        Self::new(taps, 0)
    }

    pub fn from_real(taps: &[f64], center: usize) -> Result<Self> {
        Self::new(taps.iter().map(|&t| C64::new(t, 0.0)).collect(), center)
    }

    pub fn impulse() -> Self {
        Self {
            taps: vec![C64::new(1.0, 0.0)],
            center: 0,
        }
    }

    pub fn taps(&self) -> &[C64] {
        &self.taps
    }

    pub fn center(&self) -> usize {
        self.center
    }

    pub fn len(&self) -> usize {
        self.taps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taps.is_empty()
    }

    /// Tap at signed lag `k`, zero outside the support.
    pub fn lag(&self, k: isize) -> C64 {
        let i = k + self.center as isize;
        if i < 0 || i as usize >= self.taps.len() {
            C64::new(0.0, 0.0)
        } else {
            self.taps[i as usize]
        }
    }

    /// Lowest and highest lag with a stored tap.
    pub fn lag_range(&self) -> (isize, isize) {
        let lo = -(self.center as isize);
        (lo, lo + self.taps.len() as isize - 1)
    }
}

fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else if x.fract() == 0.0 {
        // sin(pi k) is not exactly zero in floating point.
        0.0
    } else {
        (PI * x).sin() / (PI * x)
    }
}

/// Raised-cosine pulse (autocorrelation of the unit-energy RRC) at `t`,
/// in units of the Nyquist period.
pub fn raised_cosine(t: f64, beta: f64) -> f64 {
    if beta > 0.0 {
        let d = 1.0 - (2.0 * beta * t).powi(2);
        if d.abs() < 1e-10 {
            return PI / 4.0 * sinc(1.0 / (2.0 * beta));
        }
        sinc(t) * (PI * beta * t).cos() / d
    } else {
        sinc(t)
    }
}

/// Smallest `l_h` whose taps hold [`DEFAULT_ISI_ENERGY`] of `sum_k RC(k tau)^2`.
pub fn default_isi_half_length(beta: f64, tau: f64) -> usize {
    const SPAN: usize = 1 << 14;
    let energy: Vec<f64> = (0..=SPAN)
        .map(|k| raised_cosine(k as f64 * tau, beta).powi(2))
        .collect();
    let total = energy[0] + 2.0 * energy[1..].iter().sum::<f64>();
    let mut kept = energy[0];
    for (l, e) in energy.iter().enumerate().skip(1) {
        kept += 2.0 * e;
        if kept >= DEFAULT_ISI_ENERGY * total {
            return l;
        }
    }
    SPAN
}

/// Truncated symbol-spaced ISI taps `h_{-l_h} .. h_{l_h}`, centered.
pub fn rc_isi_taps(cfg: &PulseConfig) -> Result<TapSet> {
    cfg.validate()?;
    let l = cfg.l_h as isize;
    let taps: Vec<f64> = (-l..=l)
        .map(|k| raised_cosine(k as f64 * cfg.tau, cfg.beta))
        .collect();
    TapSet::from_real(&taps, cfg.l_h)
}

/// Minimum-phase factor of a real, even autocorrelation sequence.
#[derive(Debug, Clone)]
pub struct SpectralFactor {
    /// Causal factor `v` (length `n_fft`) with `sum_j v_j v_{j+k} ~ acf_k`.
    pub factor: Vec<f64>,
    /// Causal inverse of the factor (length `n_fft`).
    pub inverse: Vec<f64>,
    /// Sampled spectrum before flooring.
    pub spectrum: Vec<f64>,
}

fn fft(data: &mut [C64], inverse: bool) {
    let mut planner = FftPlanner::new();
    let n = data.len();
    if inverse {
        planner.plan_fft_inverse(n).process(data);
        let scale = 1.0 / n as f64;
        data.iter_mut().for_each(|x| *x *= scale);
    } else {
        planner.plan_fft_forward(n).process(data);
    }
}

/// Cepstral minimum-phase spectral factorization.
///
/// `acf[k]` holds lag `k >= 0`; negative lags mirror it. Spectral samples are
/// clamped to `floor * peak`. Returns [`Error::NonFactorizable`] if the
/// spectrum goes clearly negative, or touches zero with `floor == 0`.
pub fn spectral_factor(acf: &[f64], n_fft: usize, floor: f64) -> Result<SpectralFactor> {
    if acf.is_empty() || acf.len() > n_fft / 2 {
        return Err(Error::invalid(
            "acf",
            format!("need 1..={} lags, got {}", n_fft / 2, acf.len()),
        ));
    }
    if !(0.0..1.0).contains(&floor) {
        return Err(Error::invalid("floor", format!("{floor} not in [0, 1)")));
    }
    let mut buf = vec![C64::new(0.0, 0.0); n_fft];
    for (k, &a) in acf.iter().enumerate() {
        buf[k] = C64::new(a, 0.0);
        if k > 0 {
            buf[n_fft - k] = C64::new(a, 0.0);
        }
    }
    fft(&mut buf, false);
    let spectrum: Vec<f64> = buf.iter().map(|x| x.re).collect();
    let peak = spectrum.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let low = spectrum.iter().cloned().fold(f64::INFINITY, f64::min);
    if !peak.is_finite() || !low.is_finite() || peak <= 0.0 {
        return Err(Error::NonFactorizable(format!(
            "spectrum range [{low}, {peak}] has no positive peak"
        )));
    }
    if low < -NEGATIVE_TOLERANCE * peak {
        return Err(Error::NonFactorizable(format!(
            "spectrum dips to {low:.3e} (peak {peak:.3e})"
        )));
    }
    if floor == 0.0 && low <= 0.0 {
        return Err(Error::NonFactorizable(
            "spectrum has numerically zero samples and no floor".into(),
        ));
    }
    let min_level = floor * peak;

    // Real cepstrum of sqrt(S), folded onto non-negative quefrencies.
    let mut cep: Vec<C64> = spectrum
        .iter()
        .map(|&s| C64::new(0.5 * s.max(min_level).ln(), 0.0))
        .collect();
    fft(&mut cep, true);
    let half = n_fft / 2;
    for (q, c) in cep.iter_mut().enumerate() {
        let re = c.re;
        *c = match q {
            0 => C64::new(re, 0.0),
            q if q < half => C64::new(2.0 * re, 0.0),
            q if q == half => C64::new(re, 0.0),
            _ => C64::new(0.0, 0.0),
        };
    }
    fft(&mut cep, false);
    let spec_v: Vec<C64> = cep.iter().map(|c| c.exp()).collect();

    let mut v = spec_v.clone();
    fft(&mut v, true);
    let mut w: Vec<C64> = spec_v.iter().map(|x| x.inv()).collect();
    fft(&mut w, true);

    Ok(SpectralFactor {
        factor: v.iter().map(|x| x.re).collect(),
        inverse: w.iter().map(|x| x.re).collect(),
        spectrum,
    })
}

/// Whitening pair for one pulse configuration.
#[derive(Debug, Clone)]
pub struct Whitening {
    /// Causal factor `v = [v_0 .. v_{l_h - 1}]` of the ISI spectrum.
    pub factor: TapSet,
    /// Anticausal FIR approximating the inverse of the conjugate-reversed
    /// factor; applied to matched-filter samples it leaves `s * c * v` plus
    /// white noise.
    pub receiver: TapSet,
}

impl Whitening {
    pub fn design(cfg: &PulseConfig) -> Result<Self> {
        Self::design_with_floor(cfg, DEFAULT_SPECTRAL_FLOOR)
    }

    pub fn design_with_floor(cfg: &PulseConfig, floor: f64) -> Result<Self> {
        cfg.validate()?;
        // The full sampled RC sequence, aliased onto the FFT grid.
        let acf: Vec<f64> = (0..FACTOR_FFT_LEN / 2)
            .map(|k| raised_cosine(k as f64 * cfg.tau, cfg.beta))
            .collect();
        let sf = spectral_factor(&acf, FACTOR_FFT_LEN, floor)?;

        let factor = TapSet::from_real(&sf.factor[..cfg.l_h], 0)?;

        let total: f64 = sf.inverse.iter().map(|x| x * x).sum();
        let mut tail = total;
        let mut len = 1;
        for (i, x) in sf.inverse.iter().enumerate() {
            tail -= x * x;
            len = i + 1;
            if tail <= RECEIVER_TAIL_ENERGY * total || len == RECEIVER_MAX_TAPS {
                break;
            }
        }
        // conj(w_j) acting at lag -j.
        let rev: Vec<f64> = sf.inverse[..len].iter().rev().cloned().collect();
        let receiver = TapSet::from_real(&rev, len - 1)?;
        Ok(Self { factor, receiver })
    }

    /// Samples past the end of a block the receiver filter looks ahead.
    pub fn lookahead(&self) -> usize {
        self.receiver.center()
    }
}

/// Causal minimum-phase whitening factor `v` of length `l_h`.
pub fn whitening_filter(cfg: &PulseConfig) -> Result<TapSet> {
    Ok(Whitening::design(cfg)?.factor)
}

/// Same-length filtering: `y_k = sum_j f_j x_{k - j}` over the lags of `f`,
/// with `x` taken as zero outside `0..len(x)`.
pub fn apply_fir(x: &[C64], f: &TapSet) -> Vec<C64> {
    let n = x.len() as isize;
    let (lo, hi) = f.lag_range();
    let c = f.center() as isize;
    (0..n)
        .map(|k| {
            let (j0, j1) = (lo.max(k - n + 1), hi.min(k));
            if j0 > j1 {
                return C64::new(0.0, 0.0);
            }
            let taps = &f.taps()[(j0 + c) as usize..=(j1 + c) as usize];
            let xs = &x[(k - j1) as usize..=(k - j0) as usize];
            taps.iter().zip(xs.iter().rev()).map(|(a, b)| a * b).sum()
        })
        .collect()
}

/// Matched-filter noise with covariance `G_{mn} = sigma^2 RC((m - n) tau)`,
/// drawn through a Cholesky factor of the Toeplitz covariance.
#[derive(Debug, Clone)]
pub struct ColoredNoise {
    n: usize,
    /// Row-major lower-triangular factor.
    chol: Vec<f64>,
}

impl ColoredNoise {
    /// Relative diagonal loading that keeps near-singular covariances
    /// (spectral nulls) factorizable.
    const JITTER: f64 = 1e-10;

    pub fn new(cfg: &PulseConfig, n: usize) -> Result<Self> {
        cfg.validate()?;
        if n == 0 {
            return Err(Error::invalid("n", "block length must be positive"));
        }
        let acf: Vec<f64> = (0..n)
            .map(|k| raised_cosine(k as f64 * cfg.tau, cfg.beta))
            .collect();
        let mut l = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let mut s = acf[i - j];
                if i == j {
                    s += Self::JITTER * acf[0];
                }
                s -= l[i * n..i * n + j]
                    .iter()
                    .zip(&l[j * n..j * n + j])
                    .map(|(a, b)| a * b)
                    .sum::<f64>();
                if i == j {
                    if s <= 0.0 {
                        return Err(Error::NonFactorizable(format!(
                            "noise covariance not positive definite at row {i}"
                        )));
                    }
                    l[i * n + i] = s.sqrt();
                } else {
                    l[i * n + j] = s / l[j * n + j];
                }
            }
        }
        Ok(Self { n, chol: l })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// One block of circular complex noise with per-sample variance `sigma^2`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, sigma: f64) -> Vec<C64> {
        let scale = sigma * std::f64::consts::FRAC_1_SQRT_2;
        let xi: Vec<C64> = (0..self.n)
            .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        (0..self.n)
            .map(|i| {
                let row = &self.chol[i * self.n..i * self.n + i + 1];
                let acc: C64 = row.iter().zip(&xi).map(|(&l, &x)| x * l).sum();
                acc * scale
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn brute_conv(x: &[C64], f: &TapSet) -> Vec<C64> {
        let mut y = vec![C64::new(0.0, 0.0); x.len()];
        for (k, yk) in y.iter_mut().enumerate() {
            for (i, &t) in f.taps().iter().enumerate() {
                let src = k as isize - (i as isize - f.center() as isize);
                if src >= 0 && (src as usize) < x.len() {
                    *yk += t * x[src as usize];
                }
            }
        }
        y
    }

    #[test]
    fn rejects_bad_tau() {
        assert!(PulseConfig::new(0.35, 0.0, 4).is_err());
        assert!(PulseConfig::new(0.35, 1.2, 4).is_err());
        assert!(PulseConfig::new(0.35, -0.5, 4).is_err());
        assert!(PulseConfig::new(1.5, 0.8, 4).is_err());
        assert!(PulseConfig::new(0.35, 0.8, 0).is_err());
    }

    #[test]
    fn nyquist_taps_are_an_impulse() {
        for beta in [0.0, 0.25, 0.35, 0.5, 1.0] {
            let h = rc_isi_taps(&PulseConfig::new(beta, 1.0, 4).unwrap()).unwrap();
            for k in -4..=4isize {
                let want = if k == 0 { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(h.lag(k).re, want, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn taps_are_even() {
        let h = rc_isi_taps(&PulseConfig::new(0.35, 0.8, 4).unwrap()).unwrap();
        for k in 1..=4 {
            assert_eq!(h.lag(k), h.lag(-k));
        }
        assert_eq!(h.lag(0).re, 1.0);
    }

    #[test]
    fn taps_match_textbook_formula() {
        // Direct evaluation of sinc(t) cos(pi beta t) / (1 - 4 beta^2 t^2).
        let (beta, tau) = (0.35f64, 0.72f64);
        let h = rc_isi_taps(&PulseConfig::new(beta, tau, 4).unwrap()).unwrap();
        for k in -4..=4isize {
            let t = tau * k as f64;
            let want = if k == 0 {
                1.0
            } else {
                (PI * t).sin() / (PI * t) * (PI * beta * t).cos()
                    / (1.0 - 4.0 * beta * beta * t * t)
            };
            assert_abs_diff_eq!(h.lag(k).re, want, epsilon = 1e-14);
        }
    }

    #[test]
    fn raised_cosine_singular_point_is_continuous() {
        let beta = 0.25;
        let t0 = 1.0 / (2.0 * beta);
        let at = raised_cosine(t0, beta);
        let near = raised_cosine(t0 + 1e-6, beta);
        assert_abs_diff_eq!(at, near, epsilon = 1e-5);
    }

    #[test]
    fn default_lh_grows_as_tau_shrinks() {
        let l84 = default_isi_half_length(0.35, 0.84);
        let l72 = default_isi_half_length(0.35, 0.72);
        assert!(l72 >= l84);
        assert_eq!(default_isi_half_length(0.35, 1.0), 1);
    }

    #[test]
    fn nyquist_whitening_is_identity() {
        for beta in [0.2, 0.35, 0.5] {
            let w = Whitening::design(&PulseConfig::new(beta, 1.0, 4).unwrap()).unwrap();
            let v = w.factor.taps();
            assert_eq!(v.len(), 4);
            assert_abs_diff_eq!(v[0].re, 1.0, epsilon = 1e-12);
            for t in &v[1..] {
                assert!(t.norm() < 1e-12);
            }
            assert_abs_diff_eq!(w.receiver.lag(0).re, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn factor_reproduces_isi_taps() {
        let cfg = PulseConfig::new(0.35, 0.84, 8).unwrap();
        let v = whitening_filter(&cfg).unwrap();
        let h = rc_isi_taps(&cfg).unwrap();
        let l = cfg.l_h as isize;
        for k in -(l - 1)..=(l - 1) {
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..l {
                acc += v.lag(j) * v.lag(j + k).conj();
            }
            assert!((acc - h.lag(k)).norm() < 1e-3, "lag {k}: {acc} vs {}", h.lag(k));
        }
    }

    #[test]
    fn receiver_filter_inverts_factor() {
        // conj-reversed factor convolved with the receiver filter ~ impulse.
        let cfg = PulseConfig::new(0.35, 0.84, 8).unwrap();
        let w = Whitening::design(&cfg).unwrap();
        let sf = {
            let acf: Vec<f64> = (0..FACTOR_FFT_LEN / 2)
                .map(|k| raised_cosine(k as f64 * cfg.tau, cfg.beta))
                .collect();
            spectral_factor(&acf, FACTOR_FFT_LEN, DEFAULT_SPECTRAL_FLOOR).unwrap()
        };
        // h * u should reproduce v (the causal factor).
        let h_long: Vec<f64> = (-200..=200)
            .map(|k: i32| raised_cosine(k as f64 * cfg.tau, cfg.beta))
            .collect();
        let (lo, hi) = w.receiver.lag_range();
        for out in 0..6isize {
            let mut acc = 0.0;
            for j in lo..=hi {
                let hk = out - j;
                if hk.abs() <= 200 {
                    acc += w.receiver.lag(j).re * h_long[(hk + 200) as usize];
                }
            }
            assert_abs_diff_eq!(acc, sf.factor[out as usize], epsilon = 1e-4);
        }
    }

    #[test]
    fn non_psd_sequence_is_rejected() {
        let err = spectral_factor(&[1.0, 1.0, 1.0], 64, 1e-3).unwrap_err();
        assert!(matches!(err, Error::NonFactorizable(_)));
        // A spectral zero without a floor.
        let err = spectral_factor(&[1.0, 0.5], 64, 0.0).unwrap_err();
        assert!(matches!(err, Error::NonFactorizable(_)));
        assert!(spectral_factor(&[1.0, 0.5], 64, 1e-6).is_ok());
    }

    #[test]
    fn fir_identity_and_impulse() {
        let x = vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)];
        assert_eq!(apply_fir(&x, &TapSet::impulse()), x);

        let f = TapSet::causal(vec![
            C64::new(0.5, 0.1),
            C64::new(-0.2, 0.3),
            C64::new(0.05, 0.0),
        ])
        .unwrap();
        let mut d = vec![C64::new(0.0, 0.0); 6];
        d[0] = C64::new(1.0, 0.0);
        let y = apply_fir(&d, &f);
        assert_eq!(&y[..3], f.taps());
        assert!(y[3..].iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn fir_matches_brute_force() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let x: Vec<C64> = (0..64)
            .map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect();
        let taps: Vec<C64> = (0..8)
            .map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect();
        for center in [0, 3, 7] {
            let f = TapSet::new(taps.clone(), center).unwrap();
            assert_eq!(apply_fir(&x, &f), brute_conv(&x, &f));
        }
    }

    #[test]
    fn colored_noise_has_requested_variance() {
        use rand::SeedableRng;
        let cfg = PulseConfig::new(0.35, 0.84, 4).unwrap();
        let gen = ColoredNoise::new(&cfg, 64).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let mut p0 = 0.0;
        let mut p1 = C64::new(0.0, 0.0);
        let blocks = 2000;
        for _ in 0..blocks {
            let z = gen.sample(&mut rng, 2.0);
            p0 += z.iter().map(|v| v.norm_sqr()).sum::<f64>() / 64.0;
            p1 += z.windows(2).map(|w| w[1] * w[0].conj()).sum::<C64>() / 63.0;
        }
        p0 /= blocks as f64;
        p1 /= blocks as f64;
        assert!((p0 - 4.0).abs() < 0.05 * 4.0, "{p0}");
        let want = 4.0 * raised_cosine(0.84, 0.35);
        assert!((p1.re - want).abs() < 0.05 * 4.0, "{p1} vs {want}");
    }
}
