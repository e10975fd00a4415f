//! Experiment configuration: typed fields plus a flat `key = value` form
//! shared by config files and command-line overrides.

use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::channel::{make_lc, ChannelModelId, ChannelSpec, DopplerConvention, PowerProfile};
use crate::framing::{placement_set, FrameConfig, PlacementSet};
use crate::modem::Constellation;
use crate::psli::DetectorConfig;
use crate::waveform::{default_isi_half_length, PulseConfig};
use crate::{Error, Result};

/// How the matched-filter noise reaches the detector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoisePath {
    /// White noise added after the causal factor `v`.
    Fast,
    /// Colored noise added to `s * h`, then the receiver whitening filter.
    Colored,
}

impl FromStr for NoisePath {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fast" | "white" => Ok(NoisePath::Fast),
            "colored" | "coloured" => Ok(NoisePath::Colored),
            _ => Err(Error::invalid("noise_path", format!("`{s}` (fast, colored)"))),
        }
    }
}

impl Display for NoisePath {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            NoisePath::Fast => "fast",
            NoisePath::Colored => "colored",
        })
    }
}

/// Where the estimator takes the pilot location from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LocationMode {
    Known,
    Identified,
}

impl FromStr for LocationMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "known" => Ok(LocationMode::Known),
            "identified" => Ok(LocationMode::Identified),
            _ => Err(Error::invalid("location", format!("`{s}` (known, identified)"))),
        }
    }
}

impl Display for LocationMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            LocationMode::Known => "known",
            LocationMode::Identified => "identified",
        })
    }
}

/// Pilot designer used when no pilot file is given.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PilotSearch {
    Relaxed,
    Exhaustive,
}

impl FromStr for PilotSearch {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "relaxed" => Ok(PilotSearch::Relaxed),
            "exhaustive" => Ok(PilotSearch::Exhaustive),
            _ => Err(Error::invalid("pilot_search", format!("`{s}` (relaxed, exhaustive)"))),
        }
    }
}

impl Display for PilotSearch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            PilotSearch::Relaxed => "relaxed",
            PilotSearch::Exhaustive => "exhaustive",
        })
    }
}

/// Nyquist symbol rate of the HF modem.
pub const NYQUIST_SYMBOL_RATE: f64 = 2400.0;

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub channel_model: ChannelModelId,
    pub tau: f64,
    pub beta: f64,
    /// `None` picks the 99.99 % energy default.
    pub l_h: Option<usize>,
    /// `None` derives it from the delay spread.
    pub l_c: Option<usize>,
    pub delay_spread_ms: f64,
    pub doppler_hz: f64,
    pub doppler_convention: DopplerConvention,
    pub model3_taps: usize,
    pub model3_decay: Option<f64>,
    /// Unit total power per static realization (Models 2 and 3).
    pub normalize_static: bool,
    pub n_p: usize,
    pub n_s: usize,
    pub pilot_constellation: Constellation,
    pub data_constellation: Constellation,
    pub c1: f64,
    pub c2: f64,
    /// `None` uses `max(L_c - 1, 1)`.
    pub r0: Option<usize>,
    pub ebn0_grid_db: Vec<f64>,
    pub frames_per_superframe: usize,
    pub superframes: usize,
    pub seed: u64,
    pub rate_rc: f64,
    pub noise_path: NoisePath,
    pub location: LocationMode,
    pub interpolate: bool,
    /// Hold Model 1 taps constant within each frame.
    pub snapshot: bool,
    pub pilot_file: Option<PathBuf>,
    pub pilot_cache: Option<PathBuf>,
    pub pilot_search: PilotSearch,
    pub pilot_restarts: usize,
    pub pilot_search_seed: u64,
    pub exhaustive_limit: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            channel_model: ChannelModelId::Model2,
            tau: 0.84,
            beta: 0.35,
            l_h: None,
            l_c: None,
            delay_spread_ms: 2.1,
            doppler_hz: 1.0,
            doppler_convention: DopplerConvention::TwoSided,
            model3_taps: 7,
            model3_decay: None,
            normalize_static: true,
            n_p: 32,
            n_s: 256,
            pilot_constellation: Constellation::Bpsk,
            data_constellation: Constellation::Qpsk,
            c1: DetectorConfig::DEFAULT_C1,
            c2: DetectorConfig::DEFAULT_C2,
            r0: None,
            ebn0_grid_db: vec![0.0, 2.0, 4.0, 6.0, 8.0],
            frames_per_superframe: 144,
            superframes: 10,
            seed: 1,
            rate_rc: 0.75,
            noise_path: NoisePath::Fast,
            location: LocationMode::Identified,
            interpolate: true,
            snapshot: false,
            pilot_file: None,
            pilot_cache: None,
            pilot_search: PilotSearch::Relaxed,
            pilot_restarts: 100,
            pilot_search_seed: 7,
            exhaustive_limit: 1 << 20,
        }
    }
}

fn parse<T: FromStr>(key: &'static str, value: &str) -> Result<T>
where
    T::Err: Display,
{
    value
        .trim()
        .parse()
        .map_err(|e| Error::invalid(key, format!("`{value}`: {e}")))
}

fn parse_opt<T: FromStr>(key: &'static str, value: &str) -> Result<Option<T>>
where
    T::Err: Display,
{
    match value.trim() {
        "" | "auto" | "default" => Ok(None),
        v => parse(key, v).map(Some),
    }
}

fn show_opt<T: Display>(v: &Option<T>) -> String {
    v.as_ref().map_or_else(|| "auto".to_string(), |x| x.to_string())
}

/// Parses `0,2,4` or `start:step:stop` (inclusive).
pub fn parse_grid(value: &str) -> Result<Vec<f64>> {
    let value = value.trim();
    if value.is_empty() {
        return Ok(Vec::new());
    }
    if value.contains(':') {
        let parts: Vec<f64> = value
            .split(':')
            .map(|p| parse("ebn0_db", p))
            .collect::<Result<_>>()?;
        let [start, step, stop] = parts[..] else {
            return Err(Error::invalid("ebn0_db", "range form is start:step:stop"));
        };
        if !(step > 0.0) || stop < start {
            return Err(Error::invalid("ebn0_db", format!("empty range `{value}`")));
        }
        let n = ((stop - start) / step + 1e-9).floor() as usize;
        return Ok((0..=n).map(|i| start + i as f64 * step).collect());
    }
    value.split(',').map(|p| parse("ebn0_db", p)).collect()
}

impl ExperimentConfig {
    /// Sets one field from its textual form.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match key.trim() {
            "channel_model" | "channel" => self.channel_model = v.parse()?,
            "tau" => self.tau = parse("tau", v)?,
            "beta" => self.beta = parse("beta", v)?,
            "l_h" => self.l_h = parse_opt("l_h", v)?,
            "l_c" => self.l_c = parse_opt("l_c", v)?,
            "delay_spread_ms" => self.delay_spread_ms = parse("delay_spread_ms", v)?,
            "doppler_hz" => self.doppler_hz = parse("doppler_hz", v)?,
            "doppler_convention" => self.doppler_convention = v.parse()?,
            "model3_taps" => self.model3_taps = parse("model3_taps", v)?,
            "model3_decay" => self.model3_decay = parse_opt("model3_decay", v)?,
            "normalize_static" => self.normalize_static = parse("normalize_static", v)?,
            "n_p" => self.n_p = parse("n_p", v)?,
            "n_s" => self.n_s = parse("n_s", v)?,
            "pilot_constellation" => self.pilot_constellation = v.parse()?,
            "data_constellation" => self.data_constellation = v.parse()?,
            "c1" => self.c1 = parse("c1", v)?,
            "c2" => self.c2 = parse("c2", v)?,
            "r0" => self.r0 = parse_opt("r0", v)?,
            "ebn0_db" => self.ebn0_grid_db = parse_grid(v)?,
            "frames_per_superframe" => {
                self.frames_per_superframe = parse("frames_per_superframe", v)?
            }
            "superframes" => self.superframes = parse("superframes", v)?,
            "seed" => self.seed = parse("seed", v)?,
            "rate_rc" => self.rate_rc = parse("rate_rc", v)?,
            "noise_path" => self.noise_path = v.parse()?,
            "location" => self.location = v.parse()?,
            "interpolate" => self.interpolate = parse("interpolate", v)?,
            "snapshot" => self.snapshot = parse("snapshot", v)?,
            "pilot_file" => self.pilot_file = parse_opt("pilot_file", v)?,
            "pilot_cache" => self.pilot_cache = parse_opt("pilot_cache", v)?,
            "pilot_search" => self.pilot_search = v.parse()?,
            "pilot_restarts" => self.pilot_restarts = parse("pilot_restarts", v)?,
            "pilot_search_seed" => self.pilot_search_seed = parse("pilot_search_seed", v)?,
            "exhaustive_limit" => self.exhaustive_limit = parse("exhaustive_limit", v)?,
            other => {
                return Err(Error::InvalidParameter {
                    name: "config",
                    reason: format!("unknown key `{other}`"),
                })
            }
        }
        Ok(())
    }

    /// Reads `key = value` lines; `#` starts a comment.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::default();
        cfg.apply_text(&text).map_err(|(line, e)| Error::Parse {
            path: path.to_path_buf(),
            line,
            reason: e.to_string(),
        })?;
        Ok(cfg)
    }

    fn apply_text(&mut self, text: &str) -> std::result::Result<(), (usize, Error)> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err((i + 1, Error::invalid("config", format!("expected key = value, got `{line}`"))));
            };
            self.set(k, v).map_err(|e| (i + 1, e))?;
        }
        Ok(())
    }

    /// Every field in `set` syntax, in a fixed order.
    pub fn to_pairs(&self) -> Vec<(&'static str, String)> {
        let grid = self
            .ebn0_grid_db
            .iter()
            .map(|x| x.to_string())
            .collect::<Vec<_>>()
            .join(",");
        vec![
            ("channel_model", self.channel_model.to_string()),
            ("tau", self.tau.to_string()),
            ("beta", self.beta.to_string()),
            ("l_h", show_opt(&self.l_h)),
            ("l_c", show_opt(&self.l_c)),
            ("delay_spread_ms", self.delay_spread_ms.to_string()),
            ("doppler_hz", self.doppler_hz.to_string()),
            ("doppler_convention", self.doppler_convention.to_string()),
            ("model3_taps", self.model3_taps.to_string()),
            ("model3_decay", show_opt(&self.model3_decay)),
            ("normalize_static", self.normalize_static.to_string()),
            ("n_p", self.n_p.to_string()),
            ("n_s", self.n_s.to_string()),
            ("pilot_constellation", self.pilot_constellation.to_string()),
            ("data_constellation", self.data_constellation.to_string()),
            ("c1", self.c1.to_string()),
            ("c2", self.c2.to_string()),
            ("r0", show_opt(&self.r0)),
            ("ebn0_db", grid),
            ("frames_per_superframe", self.frames_per_superframe.to_string()),
            ("superframes", self.superframes.to_string()),
            ("seed", self.seed.to_string()),
            ("rate_rc", self.rate_rc.to_string()),
            ("noise_path", self.noise_path.to_string()),
            ("location", self.location.to_string()),
            ("interpolate", self.interpolate.to_string()),
            ("snapshot", self.snapshot.to_string()),
            (
                "pilot_file",
                show_opt(&self.pilot_file.as_ref().map(|p| p.display().to_string())),
            ),
            (
                "pilot_cache",
                show_opt(&self.pilot_cache.as_ref().map(|p| p.display().to_string())),
            ),
            ("pilot_search", self.pilot_search.to_string()),
            ("pilot_restarts", self.pilot_restarts.to_string()),
            ("pilot_search_seed", self.pilot_search_seed.to_string()),
            ("exhaustive_limit", self.exhaustive_limit.to_string()),
        ]
    }

    pub fn pulse(&self) -> Result<PulseConfig> {
        let l_h = self
            .l_h
            .unwrap_or_else(|| default_isi_half_length(self.beta, self.tau));
        PulseConfig::new(self.beta, self.tau, l_h)
    }

    pub fn symbol_rate(&self) -> f64 {
        NYQUIST_SYMBOL_RATE / self.tau
    }

    pub fn channel_spec(&self) -> Result<ChannelSpec> {
        let l_c = match self.l_c {
            Some(l) => l,
            None => make_lc(self.delay_spread_ms, NYQUIST_SYMBOL_RATE, self.tau)?,
        };
        let spec = ChannelSpec {
            l_c,
            symbol_rate: self.symbol_rate(),
            doppler_hz: self.doppler_hz,
            doppler_convention: self.doppler_convention,
            model3_taps: self.model3_taps,
            model3_profile: match self.model3_decay {
                Some(decay) => PowerProfile::Exponential { decay },
                None => PowerProfile::Uniform,
            },
            normalize_static: self.normalize_static,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Channel memory seen by framing, detection and estimation.
    pub fn effective_l_c(&self) -> Result<usize> {
        Ok(self.channel_spec()?.l_c_for(self.channel_model))
    }

    pub fn frame(&self) -> Result<FrameConfig> {
        FrameConfig::new(self.n_p, self.n_s, self.effective_l_c()?, self.pulse()?.l_h)
    }

    pub fn placement(&self) -> Result<PlacementSet> {
        placement_set(self.n_s, self.effective_l_c()?)
    }

    pub fn detector(&self) -> Result<DetectorConfig> {
        let l_c = self.effective_l_c()?;
        let mut d = DetectorConfig::for_channel(l_c);
        d.c1 = self.c1;
        d.c2 = self.c2;
        if let Some(r0) = self.r0 {
            d.r0 = r0;
        }
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        self.pulse()?;
        self.frame()?;
        self.placement()?;
        self.detector()?;
        if self.frames_per_superframe == 0 {
            return Err(Error::invalid("frames_per_superframe", "must be positive"));
        }
        if self.superframes == 0 {
            return Err(Error::invalid("superframes", "must be positive"));
        }
        if !(self.rate_rc > 0.0 && self.rate_rc <= 1.0) {
            return Err(Error::invalid("rate_rc", format!("{} not in (0, 1]", self.rate_rc)));
        }
        if self.ebn0_grid_db.is_empty() {
            return Err(Error::invalid("ebn0_db", "grid is empty"));
        }
        if self.ebn0_grid_db.iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid("ebn0_db", "non-finite grid point"));
        }
        if self.pilot_restarts == 0 {
            return Err(Error::invalid("pilot_restarts", "must be at least 1"));
        }
        Ok(())
    }
}
