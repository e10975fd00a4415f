//! Pilot sequence placement: location sets, bit/location mapping, frame
//! assembly and spectral-efficiency figures.

use crate::{Error, Result, C64};

/// Frame geometry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrameConfig {
    pub n_p: usize,
    pub n_s: usize,
    pub l_c: usize,
    pub l_h: usize,
}

impl FrameConfig {
    pub fn new(n_p: usize, n_s: usize, l_c: usize, l_h: usize) -> Result<Self> {
        let fc = Self { n_p, n_s, l_c, l_h };
        fc.validate()?;
        Ok(fc)
    }

    pub fn n(&self) -> usize {
        self.n_p + self.n_s
    }

    /// Pilot samples that survive inter-frame interference.
    pub fn useful_pilot_len(&self) -> usize {
        self.n_p + 1 - (self.l_h + self.l_c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_s == 0 {
            return Err(Error::invalid("n_s", "must be positive"));
        }
        if self.l_h == 0 {
            return Err(Error::invalid("l_h", "must be at least 1"));
        }
        if self.n_p + 1 <= self.l_h + self.l_c {
            return Err(Error::invalid(
                "n_p",
                format!(
                    "N_p = {} leaves no useful pilot samples with L_h = {}, L_c = {}",
                    self.n_p, self.l_h, self.l_c
                ),
            ));
        }
        Ok(())
    }
}

fn ceil_log2(x: usize) -> u32 {
    x.next_power_of_two().trailing_zeros()
}

fn floor_log2(x: usize) -> u32 {
    usize::BITS - 1 - x.leading_zeros()
}

/// Allowed transmitter locations and the spikes they produce at the receiver.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlacementSet {
    allowed: Vec<usize>,
    expected: Vec<usize>,
    n_b: usize,
    stride: usize,
    l_c: usize,
}

impl PlacementSet {
    pub fn allowed(&self) -> &[usize] {
        &self.allowed
    }

    /// Sorted receiver lags `{p, p + L_c}` over all allowed `p`.
    pub fn expected(&self) -> &[usize] {
        &self.expected
    }

    pub fn n_b(&self) -> usize {
        self.n_b
    }

    pub fn stride(&self) -> usize {
        self.stride
    }

    pub fn l_c(&self) -> usize {
        self.l_c
    }

    pub fn contains(&self, n_sp: usize) -> bool {
        n_sp % self.stride == 0 && n_sp / self.stride < self.allowed.len()
    }

    /// Folds a spike lag back onto the allowed grid.
    pub fn modulo_correct(&self, delta: usize) -> usize {
        delta - delta % self.stride
    }
}

pub fn placement_set(n_s: usize, l_c: usize) -> Result<PlacementSet> {
    if n_s == 0 {
        return Err(Error::invalid("n_s", "must be positive"));
    }
    let n_b = floor_log2(n_s + 1) as i64 - ceil_log2(l_c + 1) as i64;
    if n_b <= 0 {
        return Err(Error::NoImCapacity { n_s, l_c, n_b });
    }
    let n_b = n_b as usize;
    let stride = 1usize << ceil_log2(l_c + 1);
    let allowed: Vec<usize> = (0..1usize << n_b).map(|i| i * stride).collect();
    let mut expected: Vec<usize> = allowed.iter().flat_map(|&p| [p, p + l_c]).collect();
    expected.sort_unstable();
    expected.dedup();
    Ok(PlacementSet {
        allowed,
        expected,
        n_b,
        stride,
        l_c,
    })
}

/// MSB-first bits to pilot location.
pub fn encode_location(bits: &[u8], ps: &PlacementSet) -> Result<usize> {
    if bits.len() != ps.n_b {
        return Err(Error::LengthMismatch {
            what: "location bits",
            expected: ps.n_b,
            actual: bits.len(),
        });
    }
    let mut word = 0usize;
    for &b in bits {
        if b > 1 {
            return Err(Error::invalid("bits", format!("bit value {b}")));
        }
        word = (word << 1) | b as usize;
    }
    Ok(word * ps.stride)
}

pub fn decode_location(n_sp: usize, ps: &PlacementSet) -> Result<Vec<u8>> {
    if !ps.contains(n_sp) {
        return Err(Error::NotAPilotLocation(n_sp));
    }
    let word = n_sp / ps.stride;
    Ok((0..ps.n_b)
        .rev()
        .map(|i| ((word >> i) & 1) as u8)
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymbolFrame {
    pub symbols: Vec<C64>,
    pub pilot_location: usize,
    pub im_bits: Vec<u8>,
}

/// Data positions of a frame whose pilot starts at `n_sp`, ascending.
pub fn data_positions(n_sp: usize, fc: &FrameConfig) -> impl Iterator<Item = usize> {
    let (n_p, n) = (fc.n_p, fc.n());
    (0..n).filter(move |&k| k < n_sp || k >= n_sp + n_p)
}

pub fn build_frame(
    bits: &[u8],
    pilot: &[C64],
    data: &[C64],
    ps: &PlacementSet,
    fc: &FrameConfig,
) -> Result<SymbolFrame> {
    if pilot.len() != fc.n_p {
        return Err(Error::LengthMismatch {
            what: "pilot",
            expected: fc.n_p,
            actual: pilot.len(),
        });
    }
    if data.len() != fc.n_s {
        return Err(Error::LengthMismatch {
            what: "data symbols",
            expected: fc.n_s,
            actual: data.len(),
        });
    }
    let n_sp = encode_location(bits, ps)?;
    if n_sp + fc.n_p > fc.n() {
        return Err(Error::invalid(
            "pilot_location",
            format!("pilot at {n_sp} overruns a frame of {}", fc.n()),
        ));
    }
    let mut symbols = vec![C64::new(0.0, 0.0); fc.n()];
    symbols[n_sp..n_sp + fc.n_p].copy_from_slice(pilot);
    for (k, &d) in data_positions(n_sp, fc).zip(data) {
        symbols[k] = d;
    }
    Ok(SymbolFrame {
        symbols,
        pilot_location: n_sp,
        im_bits: bits.to_vec(),
    })
}

/// Spectral efficiencies in bits/s/Hz and the two gains in percent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeFigures {
    pub gamma_nyq: f64,
    pub gamma_ftn: f64,
    pub gamma_im_ftn: f64,
    pub gain_vs_nyq_pct: f64,
    pub gain_vs_ftn_pct: f64,
}

pub fn se_figures(
    n_p: usize,
    n_s: usize,
    m: usize,
    tau: f64,
    beta: f64,
    r_c: f64,
    n_b: usize,
) -> SeFigures {
    let (n_p, n_s, n_b) = (n_p as f64, n_s as f64, n_b as f64);
    let bits = (m as f64).log2();
    let frame = n_s / (n_s + n_p);
    let gamma_nyq = frame * bits / (1.0 + beta) * r_c;
    let gamma_ftn = gamma_nyq / tau;
    let gamma_im_ftn = (n_s * r_c * bits + n_b) / (n_s + n_p) / (tau * (1.0 + beta));
    SeFigures {
        gamma_nyq,
        gamma_ftn,
        gamma_im_ftn,
        gain_vs_nyq_pct: (gamma_im_ftn - gamma_nyq) / gamma_nyq * 100.0,
        gain_vs_ftn_pct: (gamma_im_ftn - gamma_ftn) / gamma_ftn * 100.0,
    }
}
