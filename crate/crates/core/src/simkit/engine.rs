//! Monte Carlo engine. Superframes are independent tasks; each draws its
//! channel, data and unit-variance noise once and reuses them across the
//! whole Eb/N0 grid (common random numbers). Per-superframe tallies are
//! folded in superframe order, so results do not depend on worker count.

use std::time::Instant;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::channel::{convolve_channel, ChannelModelId, ChannelProcess, ChannelSpec};
use crate::estimator::{
    design_from_labels, interpolate, load_pilot, lsse_estimate, pilot_search_exhaustive,
    pilot_search_relaxed, DesignCache, DesignKey, PilotDesign,
};
use crate::framing::{build_frame, FrameConfig, PlacementSet};
use crate::modem::{modulate, Constellation};
use crate::par::{self, Exec};
use crate::psli::{identify_from_values, whitened_pilot, CorrelationField, DetectorConfig, WhitenedPilot};
use crate::rng::{self, derive_seed, Stream};
use crate::waveform::{apply_fir, rc_isi_taps, ColoredNoise, PulseConfig, TapSet, Whitening};
use crate::{Error, Result, C64};

use super::config::{ExperimentConfig, LocationMode, NoisePath, PilotSearch};
use super::{wilson_interval, ExperimentResult, PointResult};

/// Per-sample complex noise standard deviation for unit-energy symbols:
/// `sigma^2 = 1 / (r_c log2(M) 10^(EbN0/10))`.
pub fn ebn0_to_sigma(ebn0_db: f64, m: usize, r_c: f64) -> f64 {
    let bits = (m as f64).log2();
    (1.0 / (r_c * bits * 10f64.powf(ebn0_db / 10.0))).sqrt()
}

/// Pilot design for `cfg`: the pilot file if given, else the cache, else a
/// fresh search (stored back to the cache when one is configured).
pub fn design_pilot(cfg: &ExperimentConfig, exec: Exec) -> Result<PilotDesign> {
    let pulse = cfg.pulse()?;
    let v = Whitening::design(&pulse)?.factor;
    let l_c = cfg.effective_l_c()?;
    if let Some(path) = &cfg.pilot_file {
        let (c, labels) = load_pilot(path, cfg.pilot_constellation)?;
        if labels.len() != cfg.n_p {
            return Err(Error::LengthMismatch {
                what: "pilot file length vs n_p",
                expected: cfg.n_p,
                actual: labels.len(),
            });
        }
        return design_from_labels(c, labels, &v, pulse.l_h, l_c);
    }
    let key = DesignKey {
        constellation: cfg.pilot_constellation,
        n_p: cfg.n_p,
        tau: cfg.tau,
        beta: cfg.beta,
        l_h: pulse.l_h,
        l_c,
    };
    let cache = cfg.pilot_cache.as_ref().map(DesignCache::new);
    if let Some(cache) = &cache {
        if let Some(labels) = cache.load(&key)? {
            log::info!("using cached pilot {}", cache.path(&key).display());
            return design_from_labels(cfg.pilot_constellation, labels, &v, pulse.l_h, l_c);
        }
    }
    let design = match cfg.pilot_search {
        PilotSearch::Exhaustive => pilot_search_exhaustive(
            cfg.pilot_constellation,
            cfg.n_p,
            &v,
            pulse.l_h,
            l_c,
            cfg.exhaustive_limit,
            exec,
        )?,
        PilotSearch::Relaxed => pilot_search_relaxed(
            cfg.pilot_constellation,
            cfg.n_p,
            &v,
            pulse.l_h,
            l_c,
            cfg.pilot_restarts,
            cfg.pilot_search_seed,
            exec,
        )?,
    };
    if let (Some(cache), Some((_, labels))) = (&cache, design.labels()) {
        let path = cache.store(&key, labels, design.predicted_mse())?;
        log::info!("cached pilot design at {}", path.display());
    }
    Ok(design)
}

/// Everything derived from a config that is shared by all superframes.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub cfg: ExperimentConfig,
    pub pulse: PulseConfig,
    pub h: TapSet,
    pub whitening: Whitening,
    pub spec: ChannelSpec,
    pub frame: FrameConfig,
    pub placement: PlacementSet,
    pub design: PilotDesign,
    pub wp: WhitenedPilot,
    colored: Option<ColoredNoise>,
}

impl Prepared {
    pub fn new(cfg: &ExperimentConfig, design: PilotDesign) -> Result<Self> {
        cfg.validate()?;
        let pulse = cfg.pulse()?;
        let whitening = Whitening::design(&pulse)?;
        let frame = cfg.frame()?;
        if design.n_p() != frame.n_p || design.l_h() != frame.l_h || design.l_c() != frame.l_c {
            return Err(Error::invalid(
                "pilot",
                format!(
                    "design is for N_p = {}, L_h = {}, L_c = {}; experiment needs {}, {}, {}",
                    design.n_p(),
                    design.l_h(),
                    design.l_c(),
                    frame.n_p,
                    frame.l_h,
                    frame.l_c
                ),
            ));
        }
        let colored = match cfg.noise_path {
            NoisePath::Fast => None,
            NoisePath::Colored => Some(ColoredNoise::new(&pulse, frame.n() + whitening.lookahead())?),
        };
        Ok(Self {
            cfg: cfg.clone(),
            pulse,
            h: rc_isi_taps(&pulse)?,
            wp: whitened_pilot(design.pilot(), &whitening.factor),
            spec: cfg.channel_spec()?,
            placement: cfg.placement()?,
            whitening,
            frame,
            design,
            colored,
        })
    }

    fn extra(&self) -> usize {
        match self.cfg.noise_path {
            NoisePath::Fast => 0,
            NoisePath::Colored => self.whitening.lookahead(),
        }
    }

    fn time_varying(&self) -> bool {
        self.cfg.channel_model == ChannelModelId::Model1 && !self.cfg.snapshot && self.spec.sigma_d() > 0.0
    }

    /// Channel realization of superframe `sf`.
    pub fn channel(&self, sf: usize) -> Result<ChannelProcess> {
        let ch = self.spec.generate(
            self.cfg.channel_model,
            derive_seed(self.cfg.seed, &[sf as u64]),
            self.cfg.frames_per_superframe,
            self.frame.n(),
            self.extra(),
        )?;
        Ok(if self.cfg.snapshot {
            ch.snapshot_per_block(self.frame.n())
        } else {
            ch
        })
    }
}

/// Frames of one superframe after the noiseless part of the chain.
pub struct SuperframeSignal {
    pub channel: ChannelProcess,
    pub locations: Vec<usize>,
    /// Noiseless detector input (`Fast`) or matched-filter output (`Colored`).
    pub clean: Vec<C64>,
    noise: Vec<Vec<C64>>,
}

pub fn superframe_signal(prep: &Prepared, sf: usize) -> Result<SuperframeSignal> {
    let cfg = &prep.cfg;
    let n = prep.frame.n();
    let frames = cfg.frames_per_superframe;
    let channel = prep.channel(sf)?;
    let ps = &prep.placement;
    let data_c: Constellation = cfg.data_constellation;

    let mut s = Vec::with_capacity(frames * n + prep.extra());
    let mut locations = Vec::with_capacity(frames);
    for f in 0..frames {
        let mut rng = rng::stream(cfg.seed, Stream::Data, &[sf as u64, f as u64]);
        let im_bits: Vec<u8> = (0..ps.n_b()).map(|_| rng.random_range(0..2u8)).collect();
        let data_bits: Vec<u8> = (0..prep.frame.n_s * data_c.bits_per_symbol())
            .map(|_| rng.random_range(0..2u8))
            .collect();
        let data = modulate(&data_bits, data_c)?;
        let frame = build_frame(&im_bits, prep.design.pilot(), &data, ps, &prep.frame)?;
        locations.push(frame.pilot_location);
        s.extend_from_slice(&frame.symbols);
    }
    s.resize(frames * n + prep.extra(), C64::new(0.0, 0.0));

    let shaped = match cfg.noise_path {
        NoisePath::Fast => apply_fir(&s, &prep.whitening.factor),
        NoisePath::Colored => apply_fir(&s, &prep.h),
    };
    let clean = convolve_channel(&shaped, &channel)?;

    let noise = (0..frames)
        .map(|f| {
            let mut rng = rng::stream(cfg.seed, Stream::Noise, &[sf as u64, f as u64]);
            match &prep.colored {
                None => (0..n)
                    .map(|_| {
                        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
                            * std::f64::consts::FRAC_1_SQRT_2
                    })
                    .collect(),
                Some(cn) => cn.sample(&mut rng, 1.0),
            }
        })
        .collect();
    Ok(SuperframeSignal {
        channel,
        locations,
        clean,
        noise,
    })
}

impl SuperframeSignal {
    /// Whitened samples of frame `f` at noise level `sigma`.
    pub fn frame_samples(&self, prep: &Prepared, f: usize, sigma: f64) -> Vec<C64> {
        let n = prep.frame.n();
        let start = f * n;
        match prep.cfg.noise_path {
            NoisePath::Fast => self.clean[start..start + n]
                .iter()
                .zip(&self.noise[f])
                .map(|(&y, &w)| y + w * sigma)
                .collect(),
            NoisePath::Colored => {
                let window: Vec<C64> = self.clean[start..start + self.noise[f].len()]
                    .iter()
                    .zip(&self.noise[f])
                    .map(|(&y, &w)| y + w * sigma)
                    .collect();
                let mut out = apply_fir(&window, &prep.whitening.receiver);
                out.truncate(n);
                out
            }
        }
    }
}

/// Additive per-point tallies.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Tally {
    pub frames: u64,
    pub errors: u64,
    pub mse_sum: f64,
    pub mse_frames: u64,
}

impl Tally {
    pub fn merge(&mut self, other: &Tally) {
        self.frames += other.frames;
        self.errors += other.errors;
        self.mse_sum += other.mse_sum;
        self.mse_frames += other.mse_frames;
    }
}

fn sq_err(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum()
}

/// Tallies of one superframe, indexed `[detector][ebn0]`.
pub fn run_superframe(
    prep: &Prepared,
    sf: usize,
    detectors: &[DetectorConfig],
    sigmas: &[f64],
) -> Result<Vec<Vec<Tally>>> {
    let sig = superframe_signal(prep, sf)?;
    let frames = prep.cfg.frames_per_superframe;
    let n = prep.frame.n();
    let n_s = prep.frame.n_s;
    let design = &prep.design;
    let time_varying = prep.time_varying();
    // Reference instant of each frame's estimate: centre of the useful pilot.
    let t_ref: Vec<usize> = sig
        .locations
        .iter()
        .enumerate()
        .map(|(f, &loc)| f * n + loc + design.useful_offset() + (design.useful_len() - 1) / 2)
        .collect();

    let mut out = vec![vec![Tally::default(); sigmas.len()]; detectors.len()];
    for (si, &sigma) in sigmas.iter().enumerate() {
        let mut estimates: Vec<Vec<Vec<C64>>> = vec![Vec::with_capacity(frames); detectors.len()];
        for f in 0..frames {
            let r = sig.frame_samples(prep, f, sigma);
            let mut field = CorrelationField::new(&r, &prep.wp)?;
            let bounds = field.bounds();
            for (di, det) in detectors.iter().enumerate() {
                let found = identify_from_values(|d| field.get(d), bounds, &prep.placement, det)?;
                let tally = &mut out[di][si];
                tally.frames += 1;
                if found.location != sig.locations[f] {
                    tally.errors += 1;
                }
                let loc = match prep.cfg.location {
                    LocationMode::Known => sig.locations[f],
                    LocationMode::Identified => found.location,
                };
                let seg = design.useful_segment(&r, loc)?;
                estimates[di].push(lsse_estimate(seg, design)?.c_hat);
            }
        }
        for (di, est) in estimates.iter().enumerate() {
            let tally = &mut out[di][si];
            if time_varying {
                for f in 0..frames.saturating_sub(1) {
                    let track = if prep.cfg.interpolate {
                        interpolate(&est[f], &est[f + 1], n_s)?
                    } else {
                        vec![est[f].clone(); n_s + 1]
                    };
                    let span = (t_ref[f + 1] - t_ref[f]) as f64;
                    let err: f64 = (0..n_s)
                        .map(|k| {
                            let t = t_ref[f] + (k as f64 * span / n_s as f64).round() as usize;
                            sq_err(&track[k], sig.channel.taps_at(t))
                        })
                        .sum();
                    tally.mse_sum += err / n_s as f64;
                    tally.mse_frames += 1;
                }
            } else {
                for f in 0..frames {
                    tally.mse_sum += sq_err(&est[f], sig.channel.taps_at(t_ref[f]));
                    tally.mse_frames += 1;
                }
            }
        }
    }
    Ok(out)
}

fn finish(prep: &Prepared, det: &DetectorConfig, tallies: &[Tally], wall: f64) -> ExperimentResult {
    let points = prep
        .cfg
        .ebn0_grid_db
        .iter()
        .zip(tallies)
        .map(|(&ebn0_db, t)| {
            let (lo, hi) = wilson_interval(t.errors, t.frames);
            PointResult {
                ebn0_db,
                pslie: if t.frames > 0 { t.errors as f64 / t.frames as f64 } else { 0.0 },
                pslie_ci_lo: lo,
                pslie_ci_hi: hi,
                mse: if t.mse_frames > 0 { t.mse_sum / t.mse_frames as f64 } else { f64::NAN },
                trials: t.frames,
                errors: t.errors,
            }
        })
        .collect();
    let mut config = prep.cfg.to_pairs();
    for (k, v) in config.iter_mut() {
        match *k {
            "c1" => *v = det.c1.to_string(),
            "c2" => *v = det.c2.to_string(),
            "r0" => *v = det.r0.to_string(),
            _ => {}
        }
    }
    ExperimentResult {
        points,
        seed: prep.cfg.seed,
        config,
        wall_time_s: wall,
    }
}

/// One pass over all superframes, evaluating every detector on the same
/// received samples.
pub fn run_prepared(
    prep: &Prepared,
    detectors: &[DetectorConfig],
    exec: Exec,
) -> Result<Vec<ExperimentResult>> {
    for d in detectors {
        d.validate()?;
    }
    let start = Instant::now();
    let sigmas: Vec<f64> = prep
        .cfg
        .ebn0_grid_db
        .iter()
        .map(|&e| ebn0_to_sigma(e, prep.cfg.data_constellation.order(), prep.cfg.rate_rc))
        .collect();
    let per_sf = par::map_ordered(exec, (0..prep.cfg.superframes).collect(), |sf| {
        run_superframe(prep, sf, detectors, &sigmas)
    });
    let mut totals = vec![vec![Tally::default(); sigmas.len()]; detectors.len()];
    for sf in per_sf {
        for (acc, part) in totals.iter_mut().zip(sf?) {
            for (a, p) in acc.iter_mut().zip(&part) {
                a.merge(p);
            }
        }
    }
    let wall = start.elapsed().as_secs_f64();
    Ok(detectors
        .iter()
        .zip(&totals)
        .map(|(d, t)| finish(prep, d, t, wall))
        .collect())
}

/// Designs (or loads) the pilot and runs the experiment.
pub fn run_experiment(cfg: &ExperimentConfig, exec: Exec) -> Result<ExperimentResult> {
    let prep = Prepared::new(cfg, design_pilot(cfg, exec)?)?;
    let det = cfg.detector()?;
    Ok(run_prepared(&prep, &[det], exec)?.remove(0))
}

/// PSLIE sweep; also reports the estimation MSE of the identified pilots.
pub fn run_psli_experiment(cfg: &ExperimentConfig, exec: Exec) -> Result<ExperimentResult> {
    run_experiment(cfg, exec)
}

/// MSE sweep; `cfg.location` picks known or identified pilot locations and
/// `cfg.interpolate` toggles interpolation on time-varying channels.
pub fn run_mse_experiment(cfg: &ExperimentConfig, exec: Exec) -> Result<ExperimentResult> {
    run_experiment(cfg, exec)
}

/// PSLIE for every `(c1, c2)` pair, sharing one pass over the data.
pub fn calibrate_detector(
    cfg: &ExperimentConfig,
    c1s: &[f64],
    c2s: &[f64],
    exec: Exec,
) -> Result<Vec<(DetectorConfig, ExperimentResult)>> {
    let prep = Prepared::new(cfg, design_pilot(cfg, exec)?)?;
    let base = cfg.detector()?;
    let detectors: Vec<DetectorConfig> = c1s
        .iter()
        .flat_map(|&c1| c2s.iter().map(move |&c2| DetectorConfig { c1, c2, ..base }))
        .collect();
    let results = run_prepared(&prep, &detectors, exec)?;
    Ok(detectors.into_iter().zip(results).collect())
}
