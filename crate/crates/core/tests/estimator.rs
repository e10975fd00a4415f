mod common;

use imftn::estimator::{
    build_design, load_pilot, lsse_estimate, mse_predict, pilot_search_exhaustive, pilot_search_relaxed, save_pilot,
};
use imftn::modem::Constellation;
use imftn::par::Exec;
use imftn::simkit::{design_pilot, ExperimentConfig, PilotSearch};
use imftn::waveform::{PulseConfig, TapSet, Whitening};
use imftn::C64;
use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{bpsk, cn, lsse_trace};

fn factor(tau: f64, l_h: usize) -> TapSet {
    Whitening::design(&PulseConfig::new(0.35, tau, l_h).unwrap()).unwrap().factor
}

#[test]
fn pinv_solves_the_normal_equations() {
    let (n_p, l_h, l_c) = (12, 3, 2);
    let v = factor(0.84, l_h);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let p: Vec<C64> = (0..n_p).map(|_| cn(&mut rng)).collect();
    let d = build_design(&p, &v, l_h, l_c).unwrap();

    let width = l_h + l_c;
    let t = DMatrix::from_fn(n_p + 1 - width, width, |r, a| p[width - 1 + r - a]);
    let vm = DMatrix::from_fn(width, l_c + 1, |a, l| if a >= l && a - l < l_h { v.lag((a - l) as isize) } else { C64::new(0.0, 0.0) });
    let a = t * vm;
    let normal = (a.adjoint() * &a).try_inverse().unwrap() * a.adjoint();
    assert!((d.pinv() - &normal).norm() < 1e-9 * normal.norm());
    assert!((d.predicted_mse() - lsse_trace(&p, v.taps(), l_h, l_c)).abs() < 1e-9);
}

#[test]
fn estimate_is_unbiased_with_predicted_mse() {
    let (n_p, l_h, l_c) = (24, 4, 3);
    let v = factor(0.84, l_h);
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let d = build_design(&bpsk(&mut rng, n_p), &v, l_h, l_c).unwrap();
    let c: Vec<C64> = (0..=l_c).map(|_| cn(&mut rng)).collect();
    // Noiseless useful samples straight from A = T V.
    let clean: Vec<C64> = (0..d.useful_len())
        .map(|r| (0..=l_c).map(|l| (d.t_matrix().row(r) * d.v_matrix().column(l))[(0, 0)] * c[l]).sum())
        .collect();
    let sigma: f64 = 0.3;
    let trials = 10_000;
    let mut bias = vec![C64::new(0.0, 0.0); l_c + 1];
    let mut sq = 0.0;
    for _ in 0..trials {
        let r: Vec<C64> = clean.iter().map(|&x| x + cn(&mut rng) * sigma).collect();
        let est = lsse_estimate(&r, &d).unwrap().c_hat;
        for l in 0..=l_c {
            bias[l] += est[l] - c[l];
            sq += (est[l] - c[l]).norm_sqr();
        }
    }
    let mse = sq / trials as f64;
    let want = mse_predict(&d, sigma * sigma);
    assert!((mse / want - 1.0).abs() < 0.05, "{mse} vs {want}");
    let se = (want / trials as f64).sqrt();
    for b in bias {
        assert!((b / trials as f64).norm() < 3.0 * se);
    }
}

#[test]
fn orthonormal_columns_give_the_floor() {
    // Impulse whitening and a unit pilot spike: A has orthonormal columns.
    let (n_p, l_c) = (10, 2);
    let mut p = vec![C64::new(0.0, 0.0); n_p];
    p[5] = C64::new(1.0, 0.0);
    let d = build_design(&p, &TapSet::impulse(), 1, l_c).unwrap();
    assert!((mse_predict(&d, 0.2) - 0.2 * (l_c + 1) as f64).abs() < 1e-12);
}

#[test]
fn designed_pilot_beats_random_pilots() {
    let (n_p, l_h, l_c) = (32, 4, 6);
    let v = factor(0.84, l_h);
    let design = pilot_search_relaxed(Constellation::Bpsk, n_p, &v, l_h, l_c, 30, 7, Exec::Parallel(0)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let best_random = (0..100)
        .map(|_| lsse_trace(&bpsk(&mut rng, n_p), v.taps(), l_h, l_c))
        .fold(f64::INFINITY, f64::min);
    assert!(design.predicted_mse() < best_random, "{} vs {best_random}", design.predicted_mse());
}

#[test]
fn exhaustive_and_relaxed_agree_on_small_pilots() {
    let (l_h, l_c) = (3, 2);
    let v = factor(0.84, l_h);
    for n_p in [6, 8, 10] {
        let ex = pilot_search_exhaustive(Constellation::Bpsk, n_p, &v, l_h, l_c, 1 << 20, Exec::Parallel(0)).unwrap();
        let rx = pilot_search_relaxed(Constellation::Bpsk, n_p, &v, l_h, l_c, 100, 7, Exec::Parallel(0)).unwrap();
        assert!(rx.predicted_mse() <= 1.05 * ex.predicted_mse());
        assert!(rx.predicted_mse() >= ex.predicted_mse() * (1.0 - 1e-12));
    }
}

#[test]
fn qpsk_search_space_limit() {
    let v = factor(0.84, 3);
    assert!(pilot_search_exhaustive(Constellation::Qpsk, 16, &v, 3, 2, 1 << 20, Exec::Sequential).is_err());
    assert!(pilot_search_exhaustive(Constellation::Qpsk, 8, &v, 3, 2, 1 << 20, Exec::Sequential).is_ok());
}

#[test]
fn pilot_files_and_cache() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.txt");
    save_pilot(&path, Constellation::Qpsk, &[0, 3, 1, 2], &["note".into()]).unwrap();
    assert_eq!(load_pilot(&path, Constellation::Bpsk).unwrap(), (Constellation::Qpsk, vec![0, 3, 1, 2]));

    std::fs::write(&path, "0\n1\nx\n").unwrap();
    assert!(load_pilot(&path, Constellation::Bpsk).is_err());
    std::fs::write(&path, "0\n2\n").unwrap();
    assert!(load_pilot(&path, Constellation::Bpsk).is_err());

    let cfg = ExperimentConfig {
        n_p: 16,
        pilot_search: PilotSearch::Relaxed,
        pilot_restarts: 4,
        pilot_cache: Some(dir.path().join("cache")),
        ..ExperimentConfig::default()
    };
    let first = design_pilot(&cfg, Exec::Sequential).unwrap();
    assert_eq!(std::fs::read_dir(dir.path().join("cache")).unwrap().count(), 1);
    let again = design_pilot(&ExperimentConfig { pilot_restarts: 1, ..cfg.clone() }, Exec::Sequential).unwrap();
    assert_eq!(first.pilot(), again.pilot());

    let file_cfg = ExperimentConfig { pilot_file: Some(dir.path().join("missing.txt")), ..cfg };
    assert!(design_pilot(&file_cfg, Exec::Sequential).is_err());
}
