//! `imftn` command-line front end.
//!
//! Every simulation subcommand reads an optional `key = value` config file,
//! then applies `--set key=value` overrides, then `--seed`. Results go to
//! `--out` (or stdout); runs also write the effective config next to the
//! CSV so they can be repeated with `--config`.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use imftn::channel::make_lc;
use imftn::estimator::save_pilot;
use imftn::framing::{placement_set, se_figures};
use imftn::par::Exec;
use imftn::psli::identify_detailed;
use imftn::simkit::{
    calibrate_detector, channel_probe_csv, design_pilot, ebn0_to_sigma, emit_csv, run_mse_experiment,
    run_psli_experiment, superframe_signal, to_csv_string, ExperimentConfig, ExperimentResult, LocationMode,
    Prepared,
};

#[derive(Parser)]
#[command(name = "imftn", version, about = "Index-modulated pilot placement and channel estimation for FTN over HF channels")]
struct Cli {
    /// More log output (-v info, -vv debug). RUST_LOG overrides.
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Config file of `key = value` lines.
    #[arg(short, long)]
    config: Option<PathBuf>,
    /// Override one config key; repeatable.
    #[arg(short = 's', long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (0 = one per core, 1 = sequential).
    #[arg(short, long, default_value_t = 0)]
    workers: usize,
    /// Output file; stdout when omitted.
    #[arg(short, long)]
    out: Option<PathBuf>,
}

impl Common {
    fn config(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::from_file(path)?,
            None => ExperimentConfig::default(),
        };
        for kv in &self.set {
            let Some((k, v)) = kv.split_once('=') else {
                bail!("--set expects KEY=VALUE, got `{kv}`");
            };
            cfg.set(k, v).with_context(|| format!("--set {kv}"))?;
        }
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn exec(&self) -> Exec {
        Exec::from_workers(self.workers)
    }

    fn write(&self, text: &str) -> Result<()> {
        match &self.out {
            Some(path) => write_file(path, text),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn sidecar(path: &Path) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".cfg");
    path.with_file_name(name)
}

fn config_text(pairs: &[(&'static str, String)], seed: u64, wall: f64) -> String {
    let mut out = format!("# seed = {seed}, wall time {wall:.2} s\n");
    for (k, v) in pairs {
        let _ = writeln!(out, "{k} = {v}");
    }
    out
}

#[derive(Subcommand)]
enum Command {
    /// Search for an MSE-optimal pilot and write it as a pilot file.
    DesignPilot {
        #[command(flatten)]
        common: Common,
    },
    /// Pilot location identification error rate over the Eb/N0 grid.
    SimulatePsli {
        #[command(flatten)]
        common: Common,
    },
    /// Channel estimation MSE over the Eb/N0 grid.
    SimulateMse {
        #[command(flatten)]
        common: Common,
        /// Estimate at the true pilot locations instead of identified ones.
        #[arg(long)]
        known_location: bool,
        /// Hold each frame's estimate instead of interpolating (Model 1).
        #[arg(long)]
        no_interpolate: bool,
    },
    /// Spectral-efficiency table as CSV.
    SeTable {
        /// Frame shapes as N_PxN_S; repeatable.
        #[arg(long = "frame", value_name = "NPxNS", default_values_t = ["48x48".to_string(), "32x96".to_string(), "32x256".to_string()])]
        frames: Vec<String>,
        /// Constellation orders.
        #[arg(short, long, value_delimiter = ',', default_values_t = [2usize, 4])]
        m: Vec<usize>,
        #[arg(long, default_value_t = 0.72)]
        tau: f64,
        #[arg(long, default_value_t = 0.35)]
        beta: f64,
        #[arg(long, default_value_t = 0.75)]
        rate_rc: f64,
        /// Channel memory; derived from the delay spread when omitted.
        #[arg(long)]
        l_c: Option<usize>,
        #[arg(long, default_value_t = 2.1)]
        delay_spread_ms: f64,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Dump one superframe's channel taps as `k,l,re,im`.
    ChannelProbe {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0)]
        superframe: usize,
        /// Symbols to dump (default: the whole superframe).
        #[arg(long)]
        symbols: Option<usize>,
    },
    /// Sweep the detector thresholds c1 and c2 on shared data.
    CalibrateDetector {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', default_values_t = [0.3, 0.4, 0.5, 0.6, 0.7])]
        c1: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_values_t = [1.0, 1.1, 1.25])]
        c2: Vec<f64>,
    },
    /// Squared pilot correlation over one received frame.
    CorrelationDump {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0)]
        superframe: usize,
        #[arg(long, default_value_t = 0)]
        frame: usize,
        /// Eb/N0 in dB; noiseless when omitted.
        #[arg(long)]
        ebn0: Option<f64>,
    },
}

fn report(common: &Common, res: &ExperimentResult) -> Result<()> {
    for p in &res.points {
        log::info!(
            "Eb/N0 {:>5} dB: PSLIE {:.3e} ({}/{}), MSE {:.4e}",
            p.ebn0_db,
            p.pslie,
            p.errors,
            p.trials,
            p.mse
        );
    }
    match &common.out {
        Some(path) => {
            emit_csv(res, path)?;
            write_file(&sidecar(path), &config_text(&res.config, res.seed, res.wall_time_s))?;
            eprintln!("wrote {} ({:.1} s)", path.display(), res.wall_time_s);
        }
        None => print!("{}", to_csv_string(res)),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::DesignPilot { common } => {
            let cfg = common.config()?;
            let design = design_pilot(&cfg, common.exec())?;
            let Some((c, labels)) = design.labels() else {
                bail!("pilot design carries no constellation labels");
            };
            let header = vec![
                format!("tau={} beta={} l_h={} l_c={}", cfg.tau, cfg.beta, design.l_h(), design.l_c()),
                format!("predicted_mse_factor={}", design.predicted_mse()),
            ];
            let path = common.out.clone().unwrap_or_else(|| PathBuf::from("pilot.txt"));
            save_pilot(&path, *c, labels, &header)?;
            eprintln!(
                "wrote {} ({} {} symbols, tr((A^H A)^-1) = {:.6})",
                path.display(),
                labels.len(),
                c,
                design.predicted_mse()
            );
        }
        Command::SimulatePsli { common } => {
            let cfg = common.config()?;
            report(&common, &run_psli_experiment(&cfg, common.exec())?)?;
        }
        Command::SimulateMse {
            common,
            known_location,
            no_interpolate,
        } => {
            let mut cfg = common.config()?;
            if known_location {
                cfg.location = LocationMode::Known;
            }
            if no_interpolate {
                cfg.interpolate = false;
            }
            report(&common, &run_mse_experiment(&cfg, common.exec())?)?;
        }
        Command::SeTable {
            frames,
            m,
            tau,
            beta,
            rate_rc,
            l_c,
            delay_spread_ms,
            out,
        } => {
            let l_c = match l_c {
                Some(l) => l,
                None => make_lc(delay_spread_ms, imftn::simkit::NYQUIST_SYMBOL_RATE, tau)?,
            };
            let mut text = String::from(
                "n_p,n_s,m,tau,beta,r_c,n_b,gamma_nyq,gamma_ftn,gamma_im_ftn,gain_vs_nyq_pct,gain_vs_ftn_pct\n",
            );
            for f in &frames {
                let Some((a, b)) = f.split_once('x') else {
                    bail!("--frame expects N_PxN_S, got `{f}`");
                };
                let n_p: usize = a.trim().parse().with_context(|| format!("--frame {f}"))?;
                let n_s: usize = b.trim().parse().with_context(|| format!("--frame {f}"))?;
                let n_b = placement_set(n_s, l_c)?.n_b();
                for &order in &m {
                    if !order.is_power_of_two() || order < 2 {
                        bail!("constellation order {order} is not a power of two >= 2");
                    }
                    let se = se_figures(n_p, n_s, order, tau, beta, rate_rc, n_b);
                    let _ = writeln!(
                        text,
                        "{n_p},{n_s},{order},{tau},{beta},{rate_rc},{n_b},{:.4},{:.4},{:.4},{:.2},{:.2}",
                        se.gamma_nyq, se.gamma_ftn, se.gamma_im_ftn, se.gain_vs_nyq_pct, se.gain_vs_ftn_pct
                    );
                }
            }
            match out {
                Some(path) => write_file(&path, &text)?,
                None => print!("{text}"),
            }
        }
        Command::ChannelProbe {
            common,
            superframe,
            symbols,
        } => {
            let cfg = common.config()?;
            let spec = cfg.channel_spec()?;
            let frame = cfg.frame()?;
            let seed = imftn::rng::derive_seed(cfg.seed, &[superframe as u64]);
            let mut ch = spec.generate(cfg.channel_model, seed, cfg.frames_per_superframe, frame.n(), 0)?;
            if cfg.snapshot {
                ch = ch.snapshot_per_block(frame.n());
            }
            common.write(&channel_probe_csv(&ch, symbols.unwrap_or(ch.n_symbols())))?;
        }
        Command::CalibrateDetector { common, c1, c2 } => {
            let cfg = common.config()?;
            let sweep = calibrate_detector(&cfg, &c1, &c2, common.exec())?;
            let mut text = String::from("c1,c2,r0,ebn0_db,pslie,pslie_ci_lo,pslie_ci_hi,errors,trials\n");
            for (d, res) in &sweep {
                for p in &res.points {
                    let _ = writeln!(
                        text,
                        "{},{},{},{},{},{},{},{},{}",
                        d.c1, d.c2, d.r0, p.ebn0_db, p.pslie, p.pslie_ci_lo, p.pslie_ci_hi, p.errors, p.trials
                    );
                }
            }
            for (i, &e) in cfg.ebn0_grid_db.iter().enumerate() {
                if let Some((d, r)) = sweep
                    .iter()
                    .min_by(|a, b| a.1.points[i].pslie.total_cmp(&b.1.points[i].pslie))
                {
                    eprintln!("{e} dB: best c1={} c2={} (PSLIE {:.3e})", d.c1, d.c2, r.points[i].pslie);
                }
            }
            common.write(&text)?;
        }
        Command::CorrelationDump {
            common,
            superframe,
            frame,
            ebn0,
        } => {
            let cfg = common.config()?;
            if frame >= cfg.frames_per_superframe {
                bail!("frame {frame} is outside a superframe of {} frames", cfg.frames_per_superframe);
            }
            let prep = Prepared::new(&cfg, design_pilot(&cfg, common.exec())?)?;
            let sig = superframe_signal(&prep, superframe)?;
            let sigma = ebn0.map_or(0.0, |e| ebn0_to_sigma(e, cfg.data_constellation.order(), cfg.rate_rc));
            let r = sig.frame_samples(&prep, frame, sigma);
            let det = cfg.detector()?;
            let id = identify_detailed(&r, &prep.wp, &prep.placement, &det)?;
            let mut text = String::from("delta,corr_sq,expected\n");
            for delta in 0..=r.len() - prep.wp.len() {
                let v = imftn::psli::cross_corr_at(&r, &prep.wp, delta)?;
                let expected = prep.placement.expected().contains(&delta) as u8;
                let _ = writeln!(text, "{delta},{v},{expected}");
            }
            eprintln!("true location {}, identified {}", sig.locations[frame], id.location);
            common.write(&text)?;
        }
    }
    Ok(())
}

fn main() -> std::process::ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(()) => std::process::ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::ExitCode::FAILURE
        }
    }
}
