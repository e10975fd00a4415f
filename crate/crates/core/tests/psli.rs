mod common;

use imftn::framing::placement_set;
use imftn::psli::{
    identify, identify_from_values, measure_mu, threshold_scan, whitened_pilot, DetectorConfig,
};
use imftn::waveform::{PulseConfig, Whitening};
use imftn::C64;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{bpsk, causal_conv, cn};

fn field(n: usize, background: f64, spikes: &[(usize, f64)]) -> Vec<f64> {
    let mut v = vec![background; n];
    for &(d, x) in spikes {
        v[d] = x;
    }
    v
}

#[test]
fn weaker_spike_pair_beats_isolated_global_peak() {
    // Pilot at 232 with |c|^2 = [0.655, .., 0.345]; a noise burst around
    // 200..206 carries the global peak at 206.
    let ps = placement_set(256, 6).unwrap();
    let mut v = field(257, 1.0, &[(232, 50.0), (238, 30.0)]);
    for d in 195..=211 {
        v[d] = 10.0;
    }
    v[206] = 60.0;
    v[200] = 5.0;
    let cfg = DetectorConfig { c1: 0.5, c2: 1.0, r0: 5 };
    let bounds = (0, 256);
    let id = identify_from_values(|d| v[d], bounds, &ps, &cfg).unwrap();
    assert_eq!(id.peak, 60.0);
    assert_eq!(id.location, 232);
    let mu = |d0| measure_mu(|d| v[d], d0, d0 + 6, 5, bounds).unwrap();
    assert!(mu(232) > mu(200));
}

#[test]
fn strong_last_tap_is_folded_back() {
    // |c|^2 = [0.30, .., 0.699]: the peak sits at 118 and folds to 112.
    let ps = placement_set(256, 6).unwrap();
    let v = field(257, 1.0, &[(112, 30.0), (118, 70.0)]);
    let cfg = DetectorConfig { c1: 0.5, c2: 1.0, r0: 5 };
    let id = identify_from_values(|d| v[d], (0, 256), &ps, &cfg).unwrap();
    assert_eq!(id.candidates.len(), 1);
    assert_eq!(id.candidates[0].0, 118);
    assert_eq!(id.location, 112);
}

#[test]
fn mu_limits() {
    let flat = vec![3.0; 64];
    assert_eq!(measure_mu(|d| flat[d], 10, 16, 4, (0, 63)).unwrap(), 1.0);
    let spikes = field(64, 0.0, &[(10, 5.0), (16, 5.0)]);
    assert_eq!(measure_mu(|d| spikes[d], 10, 16, 4, (0, 63)).unwrap(), f64::INFINITY);
    let zero = vec![0.0; 64];
    assert_eq!(measure_mu(|d| zero[d], 10, 16, 4, (0, 63)).unwrap(), 0.0);
}

#[test]
fn noiseless_single_tap_recovers_every_location() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let v = Whitening::design(&PulseConfig::with_default_lh(0.35, 0.84).unwrap()).unwrap().factor;
    let pilot = bpsk(&mut rng, 32);
    let wp = whitened_pilot(&pilot, &v);
    let ps = placement_set(256, 6).unwrap();
    let cfg = DetectorConfig::for_channel(6);
    let gain = cn(&mut rng);
    for &n_sp in ps.allowed() {
        let mut s = vec![C64::new(0.0, 0.0); 288];
        s[n_sp..n_sp + 32].copy_from_slice(&pilot);
        let r: Vec<C64> = causal_conv(&s, v.taps()).into_iter().map(|x| x * gain).collect();
        assert_eq!(identify(&r, &wp, &ps, &cfg).unwrap(), n_sp);
    }
}

#[test]
fn candidates_are_scanned_in_ascending_order() {
    let ps = placement_set(256, 6).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let v: Vec<f64> = (0..257).map(|_| rng.random_range(0.0..1.0)).collect();
    let cfg = DetectorConfig { c1: 1e-9, c2: 1.0, r0: 5 };
    let id = identify_from_values(|d| v[d], (0, 256), &ps, &cfg).unwrap();
    assert_eq!(id.candidates.len(), ps.expected().len());
    assert!(id.candidates.windows(2).all(|w| w[0].0 < w[1].0));
}

#[test]
fn literal_threshold_update_with_inflated_c2() {
    // With c2 > 1 a later candidate must beat c2 times the last accepted one.
    let c = [(0, 1.0), (8, 1.5), (16, 1.9)];
    assert_eq!(threshold_scan(c, 1.0), 16);
    assert_eq!(threshold_scan(c, 1.4), 8);
}

proptest! {
    #[test]
    fn argmax_is_order_independent(mus in prop::collection::btree_set(1u32..1_000_000, 1..20), seed in 0u64..1000) {
        let cands: Vec<(usize, f64)> = mus.iter().enumerate().map(|(i, &m)| (8 * i, m as f64)).collect();
        let best = cands.iter().cloned().fold((0, 0.0), |a, b| if b.1 > a.1 { b } else { a }).0;
        let mut shuffled = cands.clone();
        shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert_eq!(threshold_scan(cands, 1.0), best);
        prop_assert_eq!(threshold_scan(shuffled, 1.0), best);
    }
}
