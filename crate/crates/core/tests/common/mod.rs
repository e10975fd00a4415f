//! Small reference implementations shared by the integration tests. They
//! are written from the definitions, not from the library code.

#![allow(dead_code)]

use imftn::C64;
use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

/// Circular complex Gaussian with unit variance.
pub fn cn<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn bpsk<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<C64> {
    (0..n)
        .map(|_| C64::new(if rng.random::<bool>() { 1.0 } else { -1.0 }, 0.0))
        .collect()
}

/// `y_k = sum_j x_j f_{k-j}` for `k < x.len()` with a causal `f`.
pub fn causal_conv(x: &[C64], f: &[C64]) -> Vec<C64> {
    (0..x.len())
        .map(|k| {
            let mut acc = C64::new(0.0, 0.0);
            for (j, &fj) in f.iter().enumerate() {
                if j <= k {
                    acc += x[k - j] * fj;
                }
            }
            acc
        })
        .collect()
}

/// `tr((A^H A)^-1)` with `A = T V` built entry by entry from the pilot and
/// the first `l_h` whitening taps.
pub fn lsse_trace(p: &[C64], v: &[C64], l_h: usize, l_c: usize) -> f64 {
    let width = l_h + l_c;
    let rows = p.len() + 1 - width;
    let t = DMatrix::from_fn(rows, width, |r, a| p[width - 1 + r - a]);
    let vm = DMatrix::from_fn(width, l_c + 1, |a, l| {
        if a >= l && a - l < l_h {
            v[a - l]
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let a = t * vm;
    let gram = a.adjoint() * &a;
    match gram.try_inverse() {
        Some(inv) => inv.trace().re,
        None => f64::INFINITY,
    }
}

/// Sample autocorrelation `sum_k x_{k+d} x_k^*` summed over blocks.
pub fn block_acf(blocks: &[Vec<C64>], max_lag: usize) -> Vec<C64> {
    let mut acf = vec![C64::new(0.0, 0.0); max_lag + 1];
    for b in blocks {
        for (d, slot) in acf.iter_mut().enumerate() {
            for k in 0..b.len().saturating_sub(d) {
                *slot += b[k + d] * b[k].conj();
            }
        }
    }
    acf
}
