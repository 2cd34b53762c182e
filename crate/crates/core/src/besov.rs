//! Besov sequence norms read off a pyramid, and the probes built on them.
//!
//! Coefficient norm:
//!
//! ```text
//! ‖c_{j0}‖_p + ‖ (2^{(σ - n/p) j} ‖d_j‖_p)_{j >= j0} ‖_q
//! ```
//!
//! where `d_j` pools every orientation and position at level `j`.
//! Wavelet norm: `‖P_{j0} f‖_p + ‖ (2^{jσ} ‖Δ_j f‖_p)_j ‖_q` with the `L^p`
//! norms replaced by lattice quadratures.

use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::filters::FilterBank;
use crate::grid::{sample_grid, GridFunction, IndexBox};
use crate::scaling::{cover_number, refine_scaling, tensor_point_eval, ScalingEvaluator};
use crate::tensor::{orientations, Orientation};
use crate::transform::{decompose, interior_detail_box, natural_fine_box, reconstruct, subdivide, synthesize_channels, WaveletPyramid};

/// `(σ, p, q, j0)`; `p` and `q` may be `f64::INFINITY`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BesovParams {
    pub sigma: f64,
    pub p: f64,
    pub q: f64,
    pub j0: i32,
}

impl BesovParams {
    pub fn new(sigma: f64, p: f64, q: f64, j0: i32) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::Parameter("sigma must be positive and finite"));
        }
        if !(p >= 1.0) || p.is_nan() {
            return Err(Error::Parameter("p must lie in [1, inf]"));
        }
        if !(q >= 1.0) || q.is_nan() {
            return Err(Error::Parameter("q must lie in [1, inf]"));
        }
        Ok(BesovParams { sigma, p, q, j0 })
    }

    /// `n/p`, zero for `p = ∞`.
    pub fn n_over_p(&self, n: usize) -> f64 {
        if self.p.is_infinite() { 0.0 } else { n as f64 / self.p }
    }

    /// The equivalence theorems assume `n/p < σ`.
    pub fn in_regime(&self, n: usize) -> bool {
        self.n_over_p(n) < self.sigma
    }
}

/// Regime and truncation flags attached to a norm.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct NormFlags {
    /// `σ <= n/p`: outside the range where the norms are known equivalent.
    pub outside_regime: bool,
    /// The `ℓ^q` sum stops at the pyramid's finest level.
    pub truncated: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NormReport {
    pub coarse_term: f64,
    /// `(j, weighted level term)`, ascending in `j`.
    pub level_terms: Vec<(i32, f64)>,
    /// `ℓ^q` norm of the level terms.
    pub aggregate: f64,
    /// `coarse_term + aggregate`.
    pub total: f64,
    /// Geometric extrapolation of the missing levels, when the last two
    /// terms decay.
    pub tail_estimate: Option<f64>,
    pub flags: NormFlags,
}

/// `ℓ^p` norm of a sequence, `p = ∞` giving the max. Scaled by the max
/// entry to avoid overflow.
pub fn lp_norm(values: impl Iterator<Item = f64> + Clone, p: f64) -> f64 {
    let m = values.clone().fold(0.0f64, |m, v| m.max(v.abs()));
    if m == 0.0 || p.is_infinite() {
        return m;
    }
    let s: f64 = values.map(|v| libm::pow(v.abs() / m, p)).sum();
    m * libm::pow(s, 1.0 / p)
}

fn tail(terms: &[(i32, f64)], q: f64) -> Option<f64> {
    let k = terms.len();
    if k < 2 {
        return None;
    }
    let (a, b) = (terms[k - 2].1, terms[k - 1].1);
    if a <= 0.0 || b <= 0.0 || b >= a {
        return None;
    }
    let rho = b / a;
    if q.is_infinite() {
        Some(b * rho)
    } else {
        let rq = libm::pow(rho, q);
        Some(b * libm::pow(rq / (1.0 - rq), 1.0 / q))
    }
}

fn assemble(coarse_term: f64, level_terms: Vec<(i32, f64)>, params: &BesovParams, n: usize) -> NormReport {
    let aggregate = lp_norm(level_terms.iter().map(|t| t.1), params.q);
    let tail_estimate = tail(&level_terms, params.q);
    NormReport {
        coarse_term,
        aggregate,
        total: coarse_term + aggregate,
        tail_estimate,
        flags: NormFlags { outside_regime: !params.in_regime(n), truncated: true },
        level_terms,
    }
}

fn check_j0(pyr: &WaveletPyramid, params: &BesovParams) -> Result<()> {
    if pyr.j0 != params.j0 {
        return Err(Error::Parameter("params.j0 differs from the pyramid's coarsest level"));
    }
    Ok(())
}

/// The coefficient norm.
pub fn coeff_norm(pyr: &WaveletPyramid, params: &BesovParams) -> Result<NormReport> {
    check_j0(pyr, params)?;
    let n = pyr.dim;
    let coarse_term = lp_norm(pyr.coarse.values().iter().copied(), params.p);
    let w = params.sigma - params.n_over_p(n);
    let level_terms = pyr
        .levels
        .iter()
        .map(|l| {
            let norm = lp_norm(l.channels.iter().flat_map(|c| c.values().iter().copied()), params.p);
            (l.level, libm::exp2(w * l.level as f64) * norm)
        })
        .collect();
    Ok(assemble(coarse_term, level_terms, params, n))
}

/// `(2^{-n j} Σ |g_ν|^p)^{1/p}`, or the max for `p = ∞`.
pub fn lattice_lp(grid: &GridFunction, p: f64) -> f64 {
    let norm = lp_norm(grid.values().iter().copied(), p);
    if p.is_infinite() {
        norm
    } else {
        norm * libm::exp2(-(grid.dim() as f64) * grid.level() as f64 / p)
    }
}

/// The wavelet norm. `P_{j0} f` and each `Δ_j f` are synthesized onto
/// their full support at level `j + 1 + quadrature_refine` and measured by
/// [`lattice_lp`].
pub fn wavelet_norm(bank: &FilterBank, pyr: &WaveletPyramid, params: &BesovParams, quadrature_refine: u32) -> Result<NormReport> {
    check_j0(pyr, params)?;
    let n = pyr.dim;
    let p_j0 = subdivide(bank, &pyr.coarse, 1 + quadrature_refine)?;
    let coarse_term = lattice_lp(&p_j0, params.p);
    let mut level_terms = Vec::with_capacity(pyr.levels.len());
    for l in &pyr.levels {
        let mut ch: Vec<Option<&GridFunction>> = vec![None];
        ch.extend(l.channels.iter().map(Some));
        let fb = natural_fine_box(bank, &ch)?;
        let delta = synthesize_channels(bank, l.level, &ch, &fb)?;
        let delta = subdivide(bank, &delta, quadrature_refine)?;
        level_terms.push((l.level, libm::exp2(params.sigma * l.level as f64) * lattice_lp(&delta, params.p)));
    }
    Ok(assemble(coarse_term, level_terms, params, n))
}

#[derive(Clone, Debug, PartialEq)]
pub struct EquivalenceRow {
    pub finest_level: i32,
    pub coeff: f64,
    pub wavelet: f64,
    /// `wavelet / coeff`; `None` when the coefficient norm is zero.
    pub ratio: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EquivalenceReport {
    pub rows: Vec<EquivalenceRow>,
    /// `max ratio / min ratio`; `None` if any ratio is undefined.
    pub spread: Option<f64>,
}

/// Samples `f` on `[a, b]^n` at each finest level, decomposes to
/// `params.j0`, and compares the two norms.
pub fn equivalence_probe(
    bank: &FilterBank,
    f: &dyn Fn(&[f64]) -> f64,
    n: usize,
    domain: (f64, f64),
    params: &BesovParams,
    resolutions: &[i32],
    quadrature_refine: u32,
) -> Result<EquivalenceReport> {
    if resolutions.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Parameter("resolutions must increase"));
    }
    let mut rows = Vec::with_capacity(resolutions.len());
    for &jj in resolutions {
        let s = libm::exp2(jj as f64);
        let bbox = IndexBox::cube(n, libm::ceil(domain.0 * s) as i64, libm::floor(domain.1 * s) as i64)?;
        let grid = sample_grid(f, jj, &bbox)?;
        let pyr = decompose(bank, &grid, params.j0)?;
        let coeff = coeff_norm(&pyr, params)?.total;
        let wavelet = wavelet_norm(bank, &pyr, params, quadrature_refine)?.total;
        let ratio = (coeff > 0.0).then(|| wavelet / coeff);
        rows.push(EquivalenceRow { finest_level: jj, coeff, wavelet, ratio });
    }
    let spread = if rows.iter().all(|r| r.ratio.is_some()) && !rows.is_empty() {
        let it = rows.iter().map(|r| r.ratio.unwrap());
        let hi = it.clone().fold(f64::MIN, f64::max);
        let lo = it.fold(f64::MAX, f64::min);
        Some(hi / lo)
    } else {
        None
    };
    Ok(EquivalenceReport { rows, spread })
}

#[derive(Clone, Debug, PartialEq)]
pub struct HolderEstimate {
    /// Least-squares slope; `None` with `infinite_smoothness` set when
    /// fewer than two levels carry nonzero details.
    pub exponent: Option<f64>,
    pub infinite_smoothness: bool,
    /// `(j, -log2 max_s ‖d^s_j‖_∞)` over the levels used in the fit.
    pub points: Vec<(i32, f64)>,
}

/// Details below `HOLDER_ZERO_CUTOFF * max|f|` count as zero.
pub const HOLDER_ZERO_CUTOFF: f64 = 1e-12;

/// Slope of `-log2 max_s ‖d^s_j‖_∞` against `j`, using only coefficients
/// whose stencils stay inside the sampled box.
pub fn holder_estimate(bank: &FilterBank, grid: &GridFunction, j0: i32) -> Result<HolderEstimate> {
    if grid.level() - j0 < 3 {
        return Err(Error::Parameter("need at least 3 detail levels"));
    }
    let pyr = decompose(bank, grid, j0)?;
    let finest = grid.level();
    let cutoff = HOLDER_ZERO_CUTOFF * grid.sup_abs();
    let orients = orientations(grid.dim())?;
    let mut points = Vec::new();
    for l in &pyr.levels {
        let mut m: f64 = 0.0;
        for s in orients.iter().skip(1) {
            let inner = interior_detail_box(bank, grid.bbox(), finest, l.level, *s)?;
            let ch = l.channel(*s).unwrap();
            inner.for_each_point(|_, p| m = m.max(ch.get(p).abs()));
        }
        if m > cutoff {
            points.push((l.level, -libm::log2(m)));
        }
    }
    if points.len() < 2 {
        return Ok(HolderEstimate { exponent: None, infinite_smoothness: true, points });
    }
    Ok(HolderEstimate { exponent: Some(ls_slope(&points)), infinite_smoothness: false, points })
}

fn ls_slope(pts: &[(i32, f64)]) -> f64 {
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0 as f64).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 as f64 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 as f64 - mx) * (p.0 as f64 - mx)).sum();
    sxy / sxx
}

/// Visits integer shifts `h` with `‖h‖_2 <= r` and first nonzero entry
/// positive (one of each `±h` pair).
fn for_each_half_shift(n: usize, r: f64, mut f: impl FnMut(&[i64])) {
    let big = libm::floor(r) as i64;
    let mut h = vec![-big; n];
    if big == 0 {
        return;
    }
    loop {
        let first = h.iter().find(|&&v| v != 0);
        if matches!(first, Some(&v) if v > 0) {
            let norm2: i64 = h.iter().map(|v| v * v).sum();
            if (norm2 as f64) <= r * r {
                f(&h);
            }
        }
        let mut l = n;
        loop {
            if l == 0 {
                return;
            }
            l -= 1;
            if h[l] < big {
                h[l] += 1;
                break;
            }
            h[l] = -big;
        }
    }
}

/// `max |g(x + h) - g(x)|` over lattice shifts with `‖h‖_2 <= t` and sites
/// where both values are stored. A lower bound for `ω(g; t)`.
pub fn modulus_of_continuity(g: &GridFunction, t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::Parameter("t must be nonnegative"));
    }
    let r = t * libm::exp2(g.level() as f64);
    let n = g.dim();
    let bbox = g.bbox();
    let mut worst: f64 = 0.0;
    let mut q = vec![0i64; n];
    for_each_half_shift(n, r, |h| {
        let lo: Vec<i64> = (0..n).map(|l| bbox.lo()[l].max(bbox.lo()[l] - h[l])).collect();
        let hi: Vec<i64> = (0..n).map(|l| bbox.hi()[l].min(bbox.hi()[l] - h[l])).collect();
        let Ok(region) = IndexBox::new(lo, hi) else { return };
        region.for_each_point(|_, p| {
            for l in 0..n {
                q[l] = p[l] + h[l];
            }
            worst = worst.max((g.get(&q) - g.get(p)).abs());
        });
    });
    Ok(worst)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProjectionRow {
    pub level: i32,
    /// `max |f - P_j f|` over the reference lattice points of the domain.
    pub measured: f64,
    /// Lattice modulus of continuity `ω(f; 2^{-j} c2)`.
    pub omega: f64,
    pub bound: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProjectionReport {
    pub c1: f64,
    pub c2: f64,
    pub reference_level: i32,
    pub rows: Vec<ProjectionRow>,
    /// `measured` is nonincreasing in `j`.
    pub monotone: bool,
}

impl ProjectionReport {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }
}

/// Checks `‖f - P_j f‖_∞ <= c1 ω(f; 2^{-j} c2)` on `[a, b]^n`.
///
/// `c1 = N(φ^{[n]}) ‖φ^{[n]}‖_∞` and `c2 = R √n` with `R` the support
/// radius. `P_j f` is evaluated exactly on the level-`reference_level`
/// lattice by subdividing the level-`j` samples. `ω` is taken over the same
/// lattice, with `x` in the domain and `x + h` evaluated directly from `f`;
/// every difference `f(x) - f(λ/2^j)` in the error sum is such a lattice
/// difference, so the check is a strict consequence of the theorem.
pub fn projection_error_check(
    bank: &FilterBank,
    f: &dyn Fn(&[f64]) -> f64,
    n: usize,
    domain: (f64, f64),
    levels: core::ops::RangeInclusive<i32>,
    reference_level: i32,
) -> Result<ProjectionReport> {
    let (jlo, jhi) = (*levels.start(), *levels.end());
    if jhi > reference_level || jlo > jhi {
        return Err(Error::Parameter("levels must lie below the reference level"));
    }
    let res = (reference_level - jlo) as u32;
    let phi_sup = refine_scaling(bank, res)?.sup_abs();
    let cover = cover_number(bank, n)?;
    let n1 = if cover.confirmed() { cover.sampled_1d } else { cover.support_bound_1d };
    let c1 = libm::pow(n1 as f64, n as f64) * libm::pow(phi_sup, n as f64);
    let c2 = bank.support_radius() as f64 * libm::sqrt(n as f64);
    let (slo, shi) = bank.phi_support();

    let sref = libm::exp2(reference_level as f64);
    let dom = IndexBox::cube(n, libm::ceil(domain.0 * sref) as i64, libm::floor(domain.1 * sref) as i64)?;
    if dom.is_empty() {
        return Err(Error::EmptyBox);
    }
    let truth = sample_grid(f, reference_level, &dom)?;

    let mut rows = Vec::new();
    for j in jlo..=jhi {
        let sj = libm::exp2(j as f64);
        let lam = IndexBox::cube(n, libm::floor(domain.0 * sj) as i64 - shi, libm::ceil(domain.1 * sj) as i64 - slo)?;
        let samples = sample_grid(f, j, &lam)?;
        let pj = subdivide(bank, &samples, (reference_level - j) as u32)?;
        let mut measured: f64 = 0.0;
        dom.for_each_point(|i, p| measured = measured.max((truth.values()[i] - pj.get(p)).abs()));

        let r = libm::exp2((reference_level - j) as f64) * c2;
        let pad = libm::ceil(r) as i64;
        let ext = IndexBox::new(dom.lo().iter().map(|v| v - pad).collect(), dom.hi().iter().map(|v| v + pad).collect())?;
        let fe = sample_grid(f, reference_level, &ext)?;
        let mut omega: f64 = 0.0;
        let mut q = vec![0i64; n];
        for_each_half_shift(n, r, |h| {
            dom.for_each_point(|i, p| {
                let fx = truth.values()[i];
                for l in 0..n {
                    q[l] = p[l] + h[l];
                }
                omega = omega.max((fe.get(&q) - fx).abs());
                for l in 0..n {
                    q[l] = p[l] - h[l];
                }
                omega = omega.max((fe.get(&q) - fx).abs());
            });
        });
        let bound = c1 * omega;
        rows.push(ProjectionRow { level: j, measured, omega, bound, pass: measured <= bound * (1.0 + 1e-9) });
    }
    let monotone = rows.windows(2).all(|w| w[1].measured <= w[0].measured);
    Ok(ProjectionReport { c1, c2, reference_level, rows, monotone })
}

#[derive(Clone, Debug, PartialEq)]
pub struct PointProbe {
    pub point: Vec<Dyadic>,
    /// Sum of all expansion terms in level order.
    pub value: f64,
    /// `Σ |c| |basis(x)|`.
    pub abs_sum: f64,
    /// Largest deviation from `value` over permuted and sign-split sums.
    pub max_deviation: f64,
    /// `|value - reconstruct(pyr)(x)|` when `x` is a stored finest-level site.
    pub reconstruction_deviation: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct UnconditionalityReport {
    pub trials: usize,
    pub points: Vec<PointProbe>,
}

impl UnconditionalityReport {
    pub fn max_deviation(&self) -> f64 {
        self.points.iter().fold(0.0, |m, p| m.max(p.max_deviation).max(p.reconstruction_deviation.unwrap_or(0.0)))
    }

    pub fn abs_dominates(&self) -> bool {
        self.points.iter().all(|p| p.abs_sum.is_finite() && p.abs_sum >= p.value.abs())
    }
}

/// Nonzero terms `c · basis(x)` of the pyramid's expansion at `x`.
fn expansion_terms(eval: &ScalingEvaluator, pyr: &WaveletPyramid, x: &[Dyadic]) -> Result<Vec<f64>> {
    let n = pyr.dim;
    let mut out = Vec::new();
    let (slo, shi) = eval.bank().phi_support();
    let push_grid = |g: &GridFunction, s: Orientation, out: &mut Vec<f64>| -> Result<()> {
        // candidate translates: 2^j x - λ within the factor's support
        let j = g.level();
        let mut lo = vec![0; n];
        let mut hi = vec![0; n];
        for l in 0..n {
            let y = x[l].scale_pow2(j).ok_or(Error::Overflow)?;
            let (a, b) = if s.bit(l) == 0 { (slo, shi) } else { (div2_down(slo + 1), div2_up(shi + 1)) };
            lo[l] = (y.ceil() as i64 - b).max(g.bbox().lo()[l]);
            hi[l] = (y.floor() as i64 - a).min(g.bbox().hi()[l]);
        }
        let region = IndexBox::new(lo, hi)?;
        let mut err = None;
        region.for_each_point(|_, p| {
            let c = g.get(p);
            if c == 0.0 || err.is_some() {
                return;
            }
            match tensor_point_eval(eval, &s, j, p, x) {
                Ok(v) if v != 0.0 => out.push(c * v),
                Ok(_) => {}
                Err(e) => err = Some(e),
            }
        });
        err.map_or(Ok(()), Err)
    };
    push_grid(&pyr.coarse, Orientation::scaling(n)?, &mut out)?;
    for l in &pyr.levels {
        for (i, ch) in l.channels.iter().enumerate() {
            push_grid(ch, Orientation::new(n, i + 1)?, &mut out)?;
        }
    }
    Ok(out)
}

fn div2_up(v: i64) -> i64 {
    -(-v).div_euclid(2)
}

fn div2_down(v: i64) -> i64 {
    v.div_euclid(2)
}

/// Absolute convergence and order independence of the expansion at each
/// point. Each trial sums the terms in a random order, then splits them by
/// a random sign pattern into two sub-series summed in independent random
/// orders and recombines them.
pub fn unconditionality_probe<R: Rng + ?Sized>(bank: &FilterBank, pyr: &WaveletPyramid, trials: usize, points: &[Vec<Dyadic>], rng: &mut R) -> Result<UnconditionalityReport> {
    if trials == 0 {
        return Err(Error::Parameter("trials must be at least 1"));
    }
    let finest = pyr.finest_level();
    let res = points
        .iter()
        .flatten()
        .map(|d| d.exponent() as i64 - pyr.j0 as i64 + 1)
        .max()
        .unwrap_or(1)
        .max(1);
    let eval = ScalingEvaluator::new(bank, res as u32)?;
    let recon = reconstruct(bank, pyr)?;
    let mut out = Vec::with_capacity(points.len());
    for x in points {
        if x.len() != pyr.dim {
            return Err(Error::DimensionMismatch { expected: pyr.dim, got: x.len() });
        }
        let terms = expansion_terms(&eval, pyr, x)?;
        let value: f64 = terms.iter().sum();
        let abs_sum: f64 = terms.iter().map(|t| t.abs()).sum();
        let mut dev: f64 = 0.0;
        let mut order: Vec<usize> = (0..terms.len()).collect();
        for _ in 0..trials {
            order.shuffle(rng);
            let permuted: f64 = order.iter().map(|&i| terms[i]).sum();
            dev = dev.max((permuted - value).abs());
            let signs: Vec<bool> = (0..terms.len()).map(|_| rng.random()).collect();
            let mut plus: Vec<f64> = terms.iter().zip(&signs).filter(|(_, s)| **s).map(|(t, _)| *t).collect();
            let mut minus: Vec<f64> = terms.iter().zip(&signs).filter(|(_, s)| !**s).map(|(t, _)| -*t).collect();
            plus.shuffle(rng);
            minus.shuffle(rng);
            let signed = plus.iter().sum::<f64>() - minus.iter().sum::<f64>();
            dev = dev.max((signed - value).abs());
        }
        let lattice: Option<Vec<i64>> = x.iter().map(|d| d.scale_pow2(finest).filter(|y| y.is_integer()).map(|y| y.numerator() as i64)).collect();
        let reconstruction_deviation = lattice.filter(|p| recon.bbox().contains(p)).map(|p| (recon.get(&p) - value).abs());
        out.push(PointProbe { point: x.clone(), value, abs_sum, max_deviation: dev, reconstruction_deviation });
    }
    Ok(UnconditionalityReport { trials, points: out })
}

#[derive(Clone, Debug, PartialEq)]
pub struct GeometricTailReport {
    /// `S_J`, the sum of the first `J` levels, for `J = 0..=levels`.
    pub partial_sums: Vec<f64>,
    /// `C` in `|S_M - S_J| <= C 2^{-Jσ}`.
    pub constant: f64,
    /// `max |S_M - S_J| / (C 2^{-Jσ})` over `J < M`.
    pub worst_ratio: f64,
}

impl GeometricTailReport {
    pub fn pass(&self) -> bool {
        self.worst_ratio <= 1.0 + 1e-12
    }
}

/// One-dimensional series with coefficient `2^{-jσ}` on the level-`j`
/// wavelet nearest `x`, for `j = 0..levels`. Partial sums form a Cauchy
/// sequence with rate `‖φ‖_∞ 2^{-Jσ} / (1 - 2^{-σ})`.
pub fn geometric_tail_probe(bank: &FilterBank, sigma: f64, levels: u32, x: Dyadic) -> Result<GeometricTailReport> {
    if !(sigma > 0.0) {
        return Err(Error::Parameter("sigma must be positive"));
    }
    let res = x.exponent().max(1);
    let eval = ScalingEvaluator::new(bank, res)?;
    let s = Orientation::new(1, 1)?;
    let mut partial_sums = vec![0.0];
    let mut acc = 0.0;
    for j in 0..levels as i32 {
        let y = x.scale_pow2(j).ok_or(Error::Overflow)?;
        let mu = y.floor() as i64;
        acc += libm::exp2(-sigma * j as f64) * tensor_point_eval(&eval, &s, j, &[mu], &[x])?;
        partial_sums.push(acc);
    }
    let constant = eval.phi_sup() / (1.0 - libm::exp2(-sigma));
    let mut worst: f64 = 0.0;
    for jj in 0..partial_sums.len() {
        let scale = constant * libm::exp2(-sigma * jj as f64);
        for m in jj + 1..partial_sums.len() {
            worst = worst.max((partial_sums[m] - partial_sums[jj]).abs() / scale);
        }
    }
    Ok(GeometricTailReport { partial_sums, constant, worst_ratio: worst })
}
