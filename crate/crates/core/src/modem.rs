//! Gray-mapped PSK constellations for pilot and data symbols.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;
use std::str::FromStr;

use crate::{Error, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Constellation {
    Bpsk,
    Qpsk,
    Psk8,
}

impl Constellation {
    pub fn bits_per_symbol(self) -> usize {
        match self {
            Constellation::Bpsk => 1,
            Constellation::Qpsk => 2,
            Constellation::Psk8 => 3,
        }
    }

    pub fn order(self) -> usize {
        1 << self.bits_per_symbol()
    }

    /// Point for a bit label (MSB first), so `points()[label]`.
    pub fn point(self, label: usize) -> C64 {
        match self {
            Constellation::Bpsk => {
                if label & 1 == 0 {
                    C64::new(1.0, 0.0)
                } else {
                    C64::new(-1.0, 0.0)
                }
            }
            Constellation::Qpsk => {
                let i = if label & 0b10 == 0 { 1.0 } else { -1.0 };
                let q = if label & 0b01 == 0 { 1.0 } else { -1.0 };
                C64::new(i * FRAC_1_SQRT_2, q * FRAC_1_SQRT_2)
            }
            Constellation::Psk8 => {
                // Gray label g sits at position k where gray(k) = g.
                let mut k = label & 0b111;
                let mut shift = k >> 1;
                while shift != 0 {
                    k ^= shift;
                    shift >>= 1;
                }
                C64::from_polar(1.0, k as f64 * PI / 4.0)
            }
        }
    }

    pub fn points(self) -> Vec<C64> {
        (0..self.order()).map(|i| self.point(i)).collect()
    }

    /// Label of the nearest point.
    pub fn nearest(self, z: C64) -> usize {
        (0..self.order())
            .min_by(|&a, &b| {
                (z - self.point(a))
                    .norm_sqr()
                    .total_cmp(&(z - self.point(b)).norm_sqr())
            })
            .unwrap_or(0)
    }

    pub fn name(self) -> &'static str {
        match self {
            Constellation::Bpsk => "bpsk",
            Constellation::Qpsk => "qpsk",
            Constellation::Psk8 => "psk8",
        }
    }
}

impl fmt::Display for Constellation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Constellation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bpsk" => Ok(Constellation::Bpsk),
            "qpsk" => Ok(Constellation::Qpsk),
            "psk8" | "8psk" | "8-psk" => Ok(Constellation::Psk8),
            other => Err(Error::invalid(
                "constellation",
                format!("unknown constellation `{other}` (bpsk, qpsk, psk8)"),
            )),
        }
    }
}

/// Maps bits (0/1, MSB first within each symbol) onto unit-energy points.
pub fn modulate(bits: &[u8], c: Constellation) -> Result<Vec<C64>> {
    let k = c.bits_per_symbol();
    if bits.len() % k != 0 {
        return Err(Error::LengthMismatch {
            what: "bits per symbol",
            expected: bits.len().div_ceil(k) * k,
            actual: bits.len(),
        });
    }
    Ok(bits
        .chunks(k)
        .map(|chunk| {
            let label = chunk.iter().fold(0usize, |acc, &b| (acc << 1) | (b & 1) as usize);
            c.point(label)
        })
        .collect())
}

/// Nearest-point decisions back to bits.
pub fn demodulate_hard(symbols: &[C64], c: Constellation) -> Vec<u8> {
    let k = c.bits_per_symbol();
    let mut out = Vec::with_capacity(symbols.len() * k);
    for &s in symbols {
        let label = c.nearest(s);
        out.extend((0..k).rev().map(|i| ((label >> i) & 1) as u8));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    const ALL: [Constellation; 3] = [Constellation::Bpsk, Constellation::Qpsk, Constellation::Psk8];

    #[test]
    fn bpsk_is_antipodal() {
        assert_eq!(modulate(&[0], Constellation::Bpsk).unwrap(), vec![C64::new(1.0, 0.0)]);
        assert_eq!(modulate(&[1], Constellation::Bpsk).unwrap(), vec![C64::new(-1.0, 0.0)]);
    }

    #[test]
    fn qpsk_corner() {
        let s = modulate(&[0, 0], Constellation::Qpsk).unwrap()[0];
        assert_abs_diff_eq!(s.re, FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(s.im, FRAC_1_SQRT_2, epsilon = 1e-15);
    }

    #[test]
    fn psk8_points_on_circle() {
        let bits: Vec<u8> = (0..8usize).flat_map(|l| [(l >> 2) as u8 & 1, (l >> 1) as u8 & 1, l as u8 & 1]).collect();
        let syms = modulate(&bits, Constellation::Psk8).unwrap();
        let mut angles: Vec<i64> = syms
            .iter()
            .map(|s| {
                assert_abs_diff_eq!(s.norm(), 1.0, epsilon = 1e-12);
                let k = s.arg().rem_euclid(2.0 * PI) / (PI / 4.0);
                assert_abs_diff_eq!(k, k.round(), epsilon = 1e-9);
                k.round() as i64 % 8
            })
            .collect();
        angles.sort();
        assert_eq!(angles, (0..8).collect::<Vec<_>>());
    }

    #[test]
    fn gray_neighbours_differ_in_one_bit() {
        for c in [Constellation::Qpsk, Constellation::Psk8] {
            let pts = c.points();
            let dmin = pts
                .iter()
                .enumerate()
                .flat_map(|(i, a)| pts.iter().skip(i + 1).map(move |b| (a - b).norm()))
                .fold(f64::INFINITY, f64::min);
            for (i, a) in pts.iter().enumerate() {
                for (j, b) in pts.iter().enumerate() {
                    if i != j && ((a - b).norm() - dmin).abs() < 1e-9 {
                        assert_eq!((i ^ j).count_ones(), 1, "{c}: {i} vs {j}");
                    }
                }
            }
        }
    }

    #[test]
    fn unit_average_energy() {
        for c in ALL {
            let e: f64 = c.points().iter().map(|p| p.norm_sqr()).sum::<f64>() / c.order() as f64;
            assert_abs_diff_eq!(e, 1.0, epsilon = 1e-12);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for c in ALL {
            let bits: Vec<u8> = (0..100_000 * c.bits_per_symbol()).map(|_| rng.random_range(0..2)).collect();
            let s = modulate(&bits, c).unwrap();
            let e = s.iter().map(|x| x.norm_sqr()).sum::<f64>() / s.len() as f64;
            assert!((e - 1.0).abs() < 0.01);
        }
    }

    #[test]
    fn length_mismatch_rejected() {
        assert!(modulate(&[0, 1, 1], Constellation::Qpsk).is_err());
        assert!(modulate(&[0, 1], Constellation::Psk8).is_err());
    }

    #[test]
    fn nearest_point_decision() {
        assert_eq!(demodulate_hard(&[C64::new(0.9, 0.1)], Constellation::Bpsk), vec![0]);
        assert_eq!(demodulate_hard(&[C64::new(-0.2, 0.9)], Constellation::Bpsk), vec![1]);
    }

    #[test]
    fn round_trip_and_tiny_noise() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for c in ALL {
            let bits: Vec<u8> = (0..3000 * c.bits_per_symbol()).map(|_| rng.random_range(0..2)).collect();
            assert_eq!(demodulate_hard(&modulate(&bits, c).unwrap(), c), bits);
        }
        let bits: Vec<u8> = (0..20_000).map(|_| rng.random_range(0..2)).collect();
        let noisy: Vec<C64> = modulate(&bits, Constellation::Qpsk)
            .unwrap()
            .into_iter()
            .map(|s| {
                s + C64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal)) * 1e-3
            })
            .collect();
        assert_eq!(demodulate_hard(&noisy, Constellation::Qpsk), bits);
    }

    #[test]
    fn parses_names() {
        assert_eq!("BPSK".parse::<Constellation>().unwrap(), Constellation::Bpsk);
        assert_eq!("8psk".parse::<Constellation>().unwrap(), Constellation::Psk8);
        assert!("qam16".parse::<Constellation>().is_err());
    }
}
