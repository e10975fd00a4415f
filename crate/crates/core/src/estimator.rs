//! Least-squares channel estimation from the useful pilot segment, pilot
//! design (exhaustive and phase-relaxed search) and linear interpolation of
//! estimates between consecutive pilots.
//!
//! With `k_r = L_h + L_c - 1 + r` the useful samples obey
//! `r~_{n_sp + k_r} = sum_a T[r][a] sum_l V[a][l] c_l`, where
//! `T[r][a] = p_{k_r - a}` and `V[a][l] = v_{a - l}`. Since the product `T V`
//! is tall, the estimate uses its left pseudo-inverse.

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use argmin::core::{CostFunction, Executor, Gradient, State};
use argmin::solver::linesearch::MoreThuenteLineSearch;
use argmin::solver::quasinewton::LBFGS;
use nalgebra::DMatrix;
use rand::Rng;

use crate::modem::Constellation;
use crate::par::{self, Exec};
use crate::rng::{self, Stream};
use crate::waveform::TapSet;
use crate::{Error, Result, C64};

/// Singular-value ratio below which `T V` counts as rank deficient.
const RANK_TOL: f64 = 1e-10;

/// Pilot sequence with its precomputed estimator.
#[derive(Debug, Clone)]
pub struct PilotDesign {
    pilot: Vec<C64>,
    labels: Option<(Constellation, Vec<usize>)>,
    l_h: usize,
    l_c: usize,
    t_matrix: DMatrix<C64>,
    v_matrix: DMatrix<C64>,
    pinv: DMatrix<C64>,
    predicted_mse: f64,
}

impl PilotDesign {
    pub fn pilot(&self) -> &[C64] {
        &self.pilot
    }

    /// Constellation indices, when the design came from a search or a file.
    pub fn labels(&self) -> Option<&(Constellation, Vec<usize>)> {
        self.labels.as_ref()
    }

    pub fn n_p(&self) -> usize {
        self.pilot.len()
    }

    pub fn l_h(&self) -> usize {
        self.l_h
    }

    pub fn l_c(&self) -> usize {
        self.l_c
    }

    pub fn t_matrix(&self) -> &DMatrix<C64> {
        &self.t_matrix
    }

    pub fn v_matrix(&self) -> &DMatrix<C64> {
        &self.v_matrix
    }

    pub fn pinv(&self) -> &DMatrix<C64> {
        &self.pinv
    }

    /// Estimation MSE at unit noise variance.
    pub fn predicted_mse(&self) -> f64 {
        self.predicted_mse
    }

    /// Offset of the first useful pilot sample from the pilot start.
    pub fn useful_offset(&self) -> usize {
        self.l_h + self.l_c - 1
    }

    pub fn useful_len(&self) -> usize {
        self.t_matrix.nrows()
    }

    /// The useful segment of a pilot starting at `n_sp` in `r_tilde`.
    pub fn useful_segment<'a>(&self, r_tilde: &'a [C64], n_sp: usize) -> Result<&'a [C64]> {
        let start = n_sp + self.useful_offset();
        let end = n_sp + self.n_p();
        if end > r_tilde.len() {
            return Err(Error::LengthMismatch {
                what: "received samples for the pilot segment",
                expected: end,
                actual: r_tilde.len(),
            });
        }
        Ok(&r_tilde[start..end])
    }

    fn with_labels(mut self, c: Constellation, labels: Vec<usize>) -> Self {
        self.labels = Some((c, labels));
        self
    }
}

fn check_dims(n_p: usize, l_h: usize, l_c: usize) -> Result<()> {
    if l_h == 0 {
        return Err(Error::invalid("l_h", "must be at least 1"));
    }
    if n_p + 1 <= l_h + l_c {
        return Err(Error::invalid(
            "n_p",
            format!("N_p = {n_p} must exceed L_h + L_c - 1 = {}", l_h + l_c - 1),
        ));
    }
    Ok(())
}

pub fn build_design(pilot: &[C64], v: &TapSet, l_h: usize, l_c: usize) -> Result<PilotDesign> {
    let n_p = pilot.len();
    check_dims(n_p, l_h, l_c)?;
    let width = l_h + l_c;
    let rows = n_p + 1 - width;
    let t_matrix = DMatrix::from_fn(rows, width, |r, a| pilot[width - 1 + r - a]);
    let v_matrix = DMatrix::from_fn(width, l_c + 1, |a, l| {
        if a >= l && a - l < l_h {
            v.lag((a - l) as isize)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let tv = &t_matrix * &v_matrix;
    let svd = tv.svd(true, true);
    let s_max = svd.singular_values.max();
    let s_min = svd.singular_values.min();
    if !(s_min > RANK_TOL * s_max) {
        return Err(Error::RankDeficient(s_max / s_min));
    }
    let pinv = svd
        .pseudo_inverse(RANK_TOL * s_max)
        .map_err(|e| Error::invalid("pilot", e))?;
    let predicted_mse = pinv.iter().map(|x| x.norm_sqr()).sum();
    Ok(PilotDesign {
        pilot: pilot.to_vec(),
        labels: None,
        l_h,
        l_c,
        t_matrix,
        v_matrix,
        pinv,
        predicted_mse,
    })
}

/// Channel estimate of one frame, optionally expanded per data symbol.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelEstimate {
    pub c_hat: Vec<C64>,
    pub frame_index: usize,
    pub per_symbol: Option<Vec<Vec<C64>>>,
}

pub fn lsse_estimate(r_p: &[C64], design: &PilotDesign) -> Result<ChannelEstimate> {
    if r_p.len() != design.useful_len() {
        return Err(Error::LengthMismatch {
            what: "useful pilot samples",
            expected: design.useful_len(),
            actual: r_p.len(),
        });
    }
    let c_hat = (0..design.pinv.nrows())
        .map(|l| {
            design
                .pinv
                .row(l)
                .iter()
                .zip(r_p)
                .map(|(a, b)| a * b)
                .sum()
        })
        .collect();
    Ok(ChannelEstimate {
        c_hat,
        frame_index: 0,
        per_symbol: None,
    })
}

/// `sigma^2 tr(pinv pinv^H)`.
pub fn mse_predict(design: &PilotDesign, sigma_sq: f64) -> f64 {
    sigma_sq * design.predicted_mse
}

/// `c^_{i,k}` for `k = 0 ..= n_s`, stepping linearly from `c_i` to `c_next`.
pub fn interpolate(c_i: &[C64], c_next: &[C64], n_s: usize) -> Result<Vec<Vec<C64>>> {
    if c_i.len() != c_next.len() {
        return Err(Error::LengthMismatch {
            what: "interpolation endpoints",
            expected: c_i.len(),
            actual: c_next.len(),
        });
    }
    if n_s == 0 {
        return Err(Error::invalid("n_s", "must be positive"));
    }
    Ok((0..=n_s)
        .map(|k| {
            let t = k as f64 / n_s as f64;
            c_i.iter()
                .zip(c_next)
                .map(|(&a, &b)| a * (1.0 - t) + b * t)
                .collect()
        })
        .collect())
}

/// Objective of the pilot search: `tr((A^H A)^-1)` with `A = T V`.
///
/// `A[r][l] = (p * v)_{L_h + L_c - 1 + r - l}`, so only the causal
/// convolution of the pilot with the first `L_h` whitening taps is needed.
struct MseObjective {
    v: Vec<C64>,
    n_p: usize,
    l_h: usize,
    l_c: usize,
}

impl MseObjective {
    fn new(v: &TapSet, n_p: usize, l_h: usize, l_c: usize) -> Self {
        Self {
            v: (0..l_h).map(|j| v.lag(j as isize)).collect(),
            n_p,
            l_h,
            l_c,
        }
    }

    fn rows(&self) -> usize {
        self.n_p + 1 - self.l_h - self.l_c
    }

    fn a_matrix(&self, p: &[C64]) -> DMatrix<C64> {
        let width = self.l_h + self.l_c;
        DMatrix::from_fn(self.rows(), self.l_c + 1, |r, l| {
            let k = width - 1 + r - l;
            self.v
                .iter()
                .enumerate()
                .map(|(j, &vj)| vj * p[k - j])
                .sum()
        })
    }

    /// `(tr(G^-1), G^-1, A)`, or `None` when `G` is singular.
    fn eval(&self, p: &[C64]) -> Option<(f64, DMatrix<C64>, DMatrix<C64>)> {
        let a = self.a_matrix(p);
        let g = a.adjoint() * &a;
        let scale = g.diagonal().iter().map(|x| x.re).fold(0.0, f64::max);
        let chol = g.cholesky()?;
        let g_inv = chol.inverse();
        let tr: f64 = g_inv.diagonal().iter().map(|x| x.re).sum();
        if !tr.is_finite() || tr * scale * RANK_TOL > 1.0 / RANK_TOL {
            return None;
        }
        Some((tr, g_inv, a))
    }

    fn mse(&self, p: &[C64]) -> f64 {
        self.eval(p).map_or(f64::INFINITY, |(tr, _, _)| tr)
    }

    fn phase_cost(&self, theta: &[f64]) -> Option<f64> {
        let p: Vec<C64> = theta.iter().map(|&t| C64::from_polar(1.0, t)).collect();
        self.eval(&p).map(|(tr, _, _)| tr)
    }

    /// Gradient of `tr(G^-1)` with respect to the pilot phases.
    fn phase_gradient(&self, theta: &[f64]) -> Option<Vec<f64>> {
        let p: Vec<C64> = theta.iter().map(|&t| C64::from_polar(1.0, t)).collect();
        let (_, g_inv, a) = self.eval(&p)?;
        // d tr(G^-1) = -2 Re tr(G^-2 A^H dA).
        let b = &g_inv * &g_inv * a.adjoint();
        let width = self.l_h + self.l_c;
        let mut grad = vec![0.0; self.n_p];
        for r in 0..self.rows() {
            for l in 0..=self.l_c {
                let k = width - 1 + r - l;
                let blr = b[(l, r)];
                for (j, &vj) in self.v.iter().enumerate() {
                    let i = k - j;
                    let da = vj * p[i] * C64::i();
                    grad[i] -= 2.0 * (blr * da).re;
                }
            }
        }
        Some(grad)
    }
}

impl CostFunction for MseObjective {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, theta: &Self::Param) -> std::result::Result<f64, argmin::core::Error> {
        self.phase_cost(theta)
            .ok_or_else(|| argmin::core::Error::msg("singular pilot Gram matrix"))
    }
}

impl Gradient for MseObjective {
    type Param = Vec<f64>;
    type Gradient = Vec<f64>;

    fn gradient(&self, theta: &Self::Param) -> std::result::Result<Vec<f64>, argmin::core::Error> {
        self.phase_gradient(theta)
            .ok_or_else(|| argmin::core::Error::msg("singular pilot Gram matrix"))
    }
}

/// Number of candidate sequences `M^N_p`.
pub fn search_space(constellation: Constellation, n_p: usize) -> f64 {
    (constellation.order() as f64).powi(n_p as i32)
}

fn index_to_labels(mut idx: u64, m: usize, n_p: usize) -> Vec<usize> {
    let mut labels = vec![0; n_p];
    for slot in labels.iter_mut().rev() {
        *slot = (idx % m as u64) as usize;
        idx /= m as u64;
    }
    labels
}

fn labels_to_symbols(c: Constellation, labels: &[usize]) -> Vec<C64> {
    labels.iter().map(|&i| c.point(i)).collect()
}

/// MSE-optimal pilot by enumeration of all `M^N_p` sequences. The first
/// sequence in lexicographic label order wins ties.
#[allow(clippy::too_many_arguments)]
pub fn pilot_search_exhaustive(
    constellation: Constellation,
    n_p: usize,
    v: &TapSet,
    l_h: usize,
    l_c: usize,
    limit: u64,
    exec: Exec,
) -> Result<PilotDesign> {
    check_dims(n_p, l_h, l_c)?;
    let total = search_space(constellation, n_p);
    if total > limit as f64 {
        return Err(Error::SearchSpaceTooLarge {
            candidates: total,
            limit,
        });
    }
    let total = total as u64;
    let m = constellation.order();
    let obj = MseObjective::new(v, n_p, l_h, l_c);
    let chunk = total.div_ceil(256).max(1);
    let ranges: Vec<(u64, u64)> = (0..total)
        .step_by(chunk as usize)
        .map(|s| (s, (s + chunk).min(total)))
        .collect();
    let bests = par::map_ordered(exec, ranges, |(lo, hi)| {
        let mut best = (f64::INFINITY, u64::MAX);
        for idx in lo..hi {
            let p = labels_to_symbols(constellation, &index_to_labels(idx, m, n_p));
            let mse = obj.mse(&p);
            if mse < best.0 {
                best = (mse, idx);
            }
        }
        best
    });
    let (_, idx) = bests
        .into_iter()
        .fold((f64::INFINITY, u64::MAX), |acc, b| if b.0 < acc.0 { b } else { acc });
    if idx == u64::MAX {
        return Err(Error::SearchFailed);
    }
    let labels = index_to_labels(idx, m, n_p);
    let design = build_design(&labels_to_symbols(constellation, &labels), v, l_h, l_c)?;
    Ok(design.with_labels(constellation, labels))
}

/// Uniform starting phases of restart `restart`.
pub fn relaxed_initial_phases(n_p: usize, seed: u64, restart: usize) -> Vec<f64> {
    let mut rng = rng::stream(seed, Stream::PilotSearch, &[restart as u64]);
    (0..n_p).map(|_| rng.random_range(0.0..2.0 * PI)).collect()
}

fn round_phases(c: Constellation, theta: &[f64]) -> Vec<usize> {
    theta
        .iter()
        .map(|&t| c.nearest(C64::from_polar(1.0, t)))
        .collect()
}

/// Multi-start phase relaxation of the pilot search: each restart runs
/// L-BFGS on the per-symbol phases from a random start, rounds the result to
/// the constellation, and the best rounded sequence (including the rounded
/// start) over all restarts is returned.
#[allow(clippy::too_many_arguments)]
pub fn pilot_search_relaxed(
    constellation: Constellation,
    n_p: usize,
    v: &TapSet,
    l_h: usize,
    l_c: usize,
    restarts: usize,
    seed: u64,
    exec: Exec,
) -> Result<PilotDesign> {
    check_dims(n_p, l_h, l_c)?;
    if restarts == 0 {
        return Err(Error::invalid("restarts", "must be at least 1"));
    }
    let results = par::map_ordered(exec, (0..restarts).collect(), |restart| {
        let obj = MseObjective::new(v, n_p, l_h, l_c);
        let init = relaxed_initial_phases(n_p, seed, restart);
        let mut best = {
            let labels = round_phases(constellation, &init);
            (obj.mse(&labels_to_symbols(constellation, &labels)), labels)
        };
        match optimize_phases(MseObjective::new(v, n_p, l_h, l_c), init) {
            Ok(theta) => {
                let labels = round_phases(constellation, &theta);
                let mse = obj.mse(&labels_to_symbols(constellation, &labels));
                if mse < best.0 {
                    best = (mse, labels);
                }
            }
            Err(e) => log::debug!("relaxed pilot search restart {restart} skipped: {e}"),
        }
        best
    });
    let (mse, labels) = results
        .into_iter()
        .fold((f64::INFINITY, Vec::new()), |acc, b| if b.0 < acc.0 { b } else { acc });
    if !mse.is_finite() {
        return Err(Error::SearchFailed);
    }
    let design = build_design(&labels_to_symbols(constellation, &labels), v, l_h, l_c)?;
    Ok(design.with_labels(constellation, labels))
}

fn optimize_phases(
    obj: MseObjective,
    init: Vec<f64>,
) -> std::result::Result<Vec<f64>, argmin::core::Error> {
    let solver = LBFGS::new(MoreThuenteLineSearch::new(), 7)
        .with_tolerance_grad(1e-9)?
        .with_tolerance_cost(1e-12)?;
    let res = Executor::new(obj, solver)
        .configure(|s| s.param(init).max_iters(300))
        .run()?;
    res.state()
        .get_best_param()
        .cloned()
        .ok_or_else(|| argmin::core::Error::msg("optimizer returned no parameters"))
}

/// Writes a pilot as one constellation index per line under a `#` header.
pub fn save_pilot(
    path: &Path,
    constellation: Constellation,
    labels: &[usize],
    header: &[String],
) -> Result<()> {
    let mut out = format!("# constellation={constellation}\n# n_p={}\n", labels.len());
    for h in header {
        out.push_str("# ");
        out.push_str(h);
        out.push('\n');
    }
    for l in labels {
        out.push_str(&l.to_string());
        out.push('\n');
    }
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Reads a pilot file. The constellation comes from the header when
/// present, otherwise from `default`.
pub fn load_pilot(path: &Path, default: Constellation) -> Result<(Constellation, Vec<usize>)> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut constellation = default;
    let mut labels = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        let parse_err = |reason: String| Error::Parse {
            path: path.to_path_buf(),
            line: i + 1,
            reason,
        };
        if let Some(comment) = line.strip_prefix('#') {
            if let Some(name) = comment.trim().strip_prefix("constellation=") {
                constellation = name.trim().parse().map_err(|e: Error| parse_err(e.to_string()))?;
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let idx: usize = line
            .parse()
            .map_err(|_| parse_err(format!("`{line}` is not a constellation index")))?;
        if idx >= constellation.order() {
            return Err(parse_err(format!("index {idx} outside {constellation}")));
        }
        labels.push(idx);
    }
    if labels.is_empty() {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            line: 0,
            reason: "no pilot symbols".into(),
        });
    }
    Ok((constellation, labels))
}

/// Design from constellation indices.
pub fn design_from_labels(
    constellation: Constellation,
    labels: Vec<usize>,
    v: &TapSet,
    l_h: usize,
    l_c: usize,
) -> Result<PilotDesign> {
    let design = build_design(&labels_to_symbols(constellation, &labels), v, l_h, l_c)?;
    Ok(design.with_labels(constellation, labels))
}

/// Cache key of a pilot design.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DesignKey {
    pub constellation: Constellation,
    pub n_p: usize,
    pub tau: f64,
    pub beta: f64,
    pub l_h: usize,
    pub l_c: usize,
}

impl DesignKey {
    pub fn file_name(&self) -> String {
        format!(
            "pilot_{}_np{}_tau{}_beta{}_lh{}_lc{}.txt",
            self.constellation.name().to_ascii_lowercase(),
            self.n_p,
            self.tau,
            self.beta,
            self.l_h,
            self.l_c
        )
    }
}

/// Directory of pilot files named by [`DesignKey::file_name`].
#[derive(Debug, Clone)]
pub struct DesignCache {
    dir: PathBuf,
}

impl DesignCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    pub fn path(&self, key: &DesignKey) -> PathBuf {
        self.dir.join(key.file_name())
    }

    pub fn load(&self, key: &DesignKey) -> Result<Option<Vec<usize>>> {
        let path = self.path(key);
        if !path.exists() {
            return Ok(None);
        }
        let (c, labels) = load_pilot(&path, key.constellation)?;
        if c != key.constellation || labels.len() != key.n_p {
            log::warn!("ignoring mismatched cached pilot {}", path.display());
            return Ok(None);
        }
        Ok(Some(labels))
    }

    pub fn store(&self, key: &DesignKey, labels: &[usize], mse: f64) -> Result<PathBuf> {
        let path = self.path(key);
        let header = vec![
            format!("tau={} beta={} l_h={} l_c={}", key.tau, key.beta, key.l_h, key.l_c),
            format!("predicted_mse={mse}"),
        ];
        save_pilot(&path, key.constellation, labels, &header)?;
        Ok(path)
    }
}
