//! Separable forward and inverse interpolating wavelet transforms.
//!
//! One analysis step maps samples at level `j+1` to coarse samples at level
//! `j` (`c_λ = f_{2λ}`, since `h̃ = δ`) and detail coefficients
//! `d^s_μ = Σ_ν g̃^{[n]}_{s,ν-2μ} f_ν`. Data outside a grid box are taken to
//! be zero. Axes are processed in ascending order for analysis and in
//! descending order for synthesis.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::filters::{FilterBank, IndexedFilter};
use crate::grid::{GridFunction, IndexBox};
use crate::scaling::ScalingEvaluator;
use crate::tensor::{orientations, Orientation};

fn taps(f: &IndexedFilter) -> Vec<(i64, f64)> {
    f.iter_f64().collect()
}

fn div_floor2(v: i64) -> i64 {
    v.div_euclid(2)
}

fn div_ceil2(v: i64) -> i64 {
    -(-v).div_euclid(2)
}

/// Coarse index range produced from a fine range on one axis.
pub fn coarse_range(lo: i64, hi: i64) -> (i64, i64) {
    (div_ceil2(lo), div_floor2(hi))
}

/// Detail index range: all `μ` whose `g̃` stencil touches `[lo, hi]`.
pub fn detail_range(bank: &FilterBank, lo: i64, hi: i64) -> (i64, i64) {
    let (a, b) = bank.gdual().support();
    (div_ceil2(lo - b), div_floor2(hi - a))
}

#[derive(Clone, Debug)]
struct Chan {
    lo: Vec<i64>,
    hi: Vec<i64>,
    values: Vec<f64>,
}

impl Chan {
    fn extent(&self, l: usize) -> usize {
        (self.hi[l] - self.lo[l] + 1) as usize
    }

    fn strides(&self, axis: usize) -> (usize, usize) {
        let n = self.lo.len();
        let outer: usize = (0..axis).map(|l| self.extent(l)).product();
        let inner: usize = (axis + 1..n).map(|l| self.extent(l)).product();
        (outer, inner)
    }

    fn from_grid(g: &GridFunction) -> Self {
        Chan { lo: g.bbox().lo().to_vec(), hi: g.bbox().hi().to_vec(), values: g.values().to_vec() }
    }

    fn into_grid(self, level: i32) -> Result<GridFunction> {
        let bbox = IndexBox::new(self.lo, self.hi)?;
        Ok(GridFunction::from_parts(level, bbox, self.values))
    }
}

/// Applies `kernel(input_line, output_line)` to every line along `axis`.
fn map_axis(c: &Chan, axis: usize, out_lo: i64, out_hi: i64, mut kernel: impl FnMut(&[f64], &mut [f64])) -> Chan {
    let m = c.extent(axis);
    let out_len = (out_hi - out_lo + 1) as usize;
    let (outer, inner) = c.strides(axis);
    let mut out = vec![0.0; outer * out_len * inner];
    let mut line = vec![0.0; m];
    let mut res = vec![0.0; out_len];
    for o in 0..outer {
        for i in 0..inner {
            let base = o * m * inner + i;
            for (k, v) in line.iter_mut().enumerate() {
                *v = c.values[base + k * inner];
            }
            kernel(&line, &mut res);
            let obase = o * out_len * inner + i;
            for (k, v) in res.iter().enumerate() {
                out[obase + k * inner] = *v;
            }
        }
    }
    let mut lo = c.lo.clone();
    let mut hi = c.hi.clone();
    lo[axis] = out_lo;
    hi[axis] = out_hi;
    Chan { lo, hi, values: out }
}

fn analyze_axis(bank: &FilterBank, gd: &[(i64, f64)], c: &Chan, axis: usize, level: i32) -> Result<(Chan, Chan)> {
    let (lo, hi) = (c.lo[axis], c.hi[axis]);
    let (clo, chi) = coarse_range(lo, hi);
    let (dlo, dhi) = detail_range(bank, lo, hi);
    if clo > chi {
        return Err(Error::LevelTooDeep { axis, level });
    }
    if dlo > dhi {
        return Err(Error::Shape { axis, reason: "detail box empty" });
    }
    let low = map_axis(c, axis, clo, chi, |x, out| {
        for (i, o) in out.iter_mut().enumerate() {
            *o = x[(2 * (clo + i as i64) - lo) as usize];
        }
    });
    let high = map_axis(c, axis, dlo, dhi, |x, out| {
        for (i, o) in out.iter_mut().enumerate() {
            let base = 2 * (dlo + i as i64) - lo;
            let mut acc = 0.0;
            for &(k, w) in gd {
                let t = base + k;
                if t >= 0 && (t as usize) < x.len() {
                    acc += w * x[t as usize];
                }
            }
            *o = acc;
        }
    });
    Ok((low, high))
}

/// `fine_ν = Σ_m c_m h_{ν-2m} + Σ_μ d_μ g_{ν-2μ}` on one axis.
fn synthesize_axis(h: &[(i64, f64)], g: &[(i64, f64)], low: Option<&Chan>, high: Option<&Chan>, axis: usize, flo: i64, fhi: i64) -> Result<Option<Chan>> {
    let (low, high) = match (low, high) {
        (None, None) => return Ok(None),
        pair => pair,
    };
    if let (Some(a), Some(b)) = (low, high) {
        for l in 0..a.lo.len() {
            if l != axis && (a.lo[l] != b.lo[l] || a.hi[l] != b.hi[l]) {
                return Err(Error::Shape { axis: l, reason: "channel boxes disagree" });
            }
        }
    }
    let mut acc: Option<Chan> = None;
    for (src, taps) in [(low, h), (high, g)] {
        let Some(src) = src else { continue };
        let slo = src.lo[axis];
        let part = map_axis(src, axis, flo, fhi, |x, out| {
            let shi = slo + x.len() as i64 - 1;
            for (i, o) in out.iter_mut().enumerate() {
                let nu = flo + i as i64;
                let mut s = 0.0;
                for &(k, w) in taps {
                    let t = nu - k;
                    if t.rem_euclid(2) != 0 {
                        continue;
                    }
                    let m = t.div_euclid(2);
                    if m >= slo && m <= shi {
                        s += w * x[(m - slo) as usize];
                    }
                }
                *o = s;
            }
        });
        acc = Some(match acc {
            None => part,
            Some(mut a) => {
                for (x, y) in a.values.iter_mut().zip(&part.values) {
                    *x += y;
                }
                a
            }
        });
    }
    Ok(acc)
}

/// One analysis step: returns the coarse grid and the `2^n - 1` detail
/// grids in orientation order, all at level `fine.level() - 1`.
pub fn analyze_level(bank: &FilterBank, fine: &GridFunction) -> Result<(GridFunction, Vec<GridFunction>)> {
    let n = fine.dim();
    let level = fine.level() - 1;
    let gd = taps(bank.gdual());
    let mut chans = vec![Chan::from_grid(fine)];
    for axis in 0..n {
        let mut next = Vec::with_capacity(chans.len() * 2);
        for c in &chans {
            let (lo, hi) = analyze_axis(bank, &gd, c, axis, level)?;
            next.push(lo);
            next.push(hi);
        }
        chans = next;
    }
    let mut it = chans.into_iter();
    let coarse = it.next().unwrap().into_grid(level)?;
    let details = it.map(|c| c.into_grid(level)).collect::<Result<Vec<_>>>()?;
    Ok((coarse, details))
}

/// Inverse of one analysis step onto an explicit fine box. `channels` holds
/// `2^n` entries in orientation order, `None` meaning identically zero.
pub fn synthesize_channels(bank: &FilterBank, level: i32, channels: &[Option<&GridFunction>], fine_box: &IndexBox) -> Result<GridFunction> {
    let n = fine_box.dim();
    if channels.len() != 1 << n {
        return Err(Error::LengthMismatch { expected: 1 << n, got: channels.len() });
    }
    for c in channels.iter().flatten() {
        if c.dim() != n {
            return Err(Error::DimensionMismatch { expected: n, got: c.dim() });
        }
        if c.level() != level {
            return Err(Error::Shape { axis: 0, reason: "channel level differs from coarse level" });
        }
    }
    let h = taps(bank.h());
    let g = taps(bank.g());
    let mut chans: Vec<Option<Chan>> = channels.iter().map(|c| c.map(Chan::from_grid)).collect();
    for axis in (0..n).rev() {
        let mut next = Vec::with_capacity(chans.len() / 2);
        for pair in chans.chunks(2) {
            next.push(synthesize_axis(&h, &g, pair[0].as_ref(), pair[1].as_ref(), axis, fine_box.lo()[axis], fine_box.hi()[axis])?);
        }
        chans = next;
    }
    match chans.pop().flatten() {
        Some(c) => c.into_grid(level + 1),
        None => GridFunction::zeros(level + 1, fine_box.clone()),
    }
}

/// One synthesis step from a coarse grid and its `2^n - 1` detail grids.
pub fn synthesize_level(bank: &FilterBank, coarse: &GridFunction, details: &[GridFunction], fine_box: &IndexBox) -> Result<GridFunction> {
    let mut ch: Vec<Option<&GridFunction>> = vec![Some(coarse)];
    ch.extend(details.iter().map(Some));
    synthesize_channels(bank, coarse.level(), &ch, fine_box)
}

/// Smallest fine box holding every nonzero value the channels can produce.
pub fn natural_fine_box(bank: &FilterBank, channels: &[Option<&GridFunction>]) -> Result<IndexBox> {
    let first = channels.iter().flatten().next().ok_or(Error::EmptyBox)?;
    let n = first.dim();
    let mut lo = vec![i64::MAX; n];
    let mut hi = vec![i64::MIN; n];
    for (idx, c) in channels.iter().enumerate() {
        let Some(c) = c else { continue };
        let s = Orientation::new(n, idx)?;
        for l in 0..n {
            let (a, b) = bank.primal(s.bit(l)).support();
            lo[l] = lo[l].min(2 * c.bbox().lo()[l] + a);
            hi[l] = hi[l].max(2 * c.bbox().hi()[l] + b);
        }
    }
    IndexBox::new(lo, hi)
}

/// Interpolating subdivision: `levels` synthesis steps with zero details,
/// each onto its natural box. The result samples `Σ_λ c_λ φ^{[n]}(2^j x - λ)`
/// exactly on the finer lattice.
pub fn subdivide(bank: &FilterBank, coarse: &GridFunction, levels: u32) -> Result<GridFunction> {
    let n = coarse.dim();
    let mut cur = coarse.clone();
    for _ in 0..levels {
        let mut ch: Vec<Option<&GridFunction>> = vec![None; 1 << n];
        ch[0] = Some(&cur);
        let fb = natural_fine_box(bank, &ch)?;
        cur = synthesize_channels(bank, cur.level(), &ch, &fb)?;
    }
    Ok(cur)
}

/// Detail grids of one level `j`, plus the level-`j+1` box they reconstruct onto.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelDetails {
    pub level: i32,
    pub fine_box: IndexBox,
    /// `2^n - 1` grids in orientation order (orientation index `i + 1`).
    pub channels: Vec<GridFunction>,
}

impl LevelDetails {
    pub fn channel(&self, s: Orientation) -> Option<&GridFunction> {
        if s.is_scaling() {
            return None;
        }
        self.channels.get(s.index() - 1)
    }
}

/// Coarse samples at `j0` and detail coefficients for levels `j0..J`.
#[derive(Clone, Debug, PartialEq)]
pub struct WaveletPyramid {
    pub dim: usize,
    pub bank_id: String,
    pub j0: i32,
    pub coarse: GridFunction,
    /// Ascending in level.
    pub levels: Vec<LevelDetails>,
}

impl WaveletPyramid {
    /// Finest level `J`.
    pub fn finest_level(&self) -> i32 {
        self.j0 + self.levels.len() as i32
    }

    pub fn level(&self, j: i32) -> Option<&LevelDetails> {
        if j < self.j0 {
            return None;
        }
        self.levels.get((j - self.j0) as usize)
    }

    /// Number of stored detail coefficients.
    pub fn detail_count(&self) -> usize {
        self.levels.iter().flat_map(|l| &l.channels).map(|g| g.values().len()).sum()
    }

    /// Same boxes, every value zero.
    pub fn zeroed(&self) -> WaveletPyramid {
        let mut p = self.clone();
        p.coarse.values_mut().fill(0.0);
        for l in &mut p.levels {
            for c in &mut l.channels {
                c.values_mut().fill(0.0);
            }
        }
        p
    }

    /// Zeroes every detail at level `>= j`.
    pub fn without_details_from(&self, j: i32) -> WaveletPyramid {
        let mut p = self.clone();
        for l in &mut p.levels {
            if l.level >= j {
                for c in &mut l.channels {
                    c.values_mut().fill(0.0);
                }
            }
        }
        p
    }

    /// Drops the levels `>= j`, so the pyramid reconstructs to level `j`.
    pub fn truncated(&self, j: i32) -> Result<WaveletPyramid> {
        if j < self.j0 || j > self.finest_level() {
            return Err(Error::LevelOutOfRange(j));
        }
        let mut p = self.clone();
        p.levels.truncate((j - self.j0) as usize);
        Ok(p)
    }

    /// `α self + β other`, coefficientwise; boxes must match.
    pub fn lin_comb(&self, alpha: f64, other: &WaveletPyramid, beta: f64) -> Result<WaveletPyramid> {
        if self.levels.len() != other.levels.len() || self.j0 != other.j0 {
            return Err(Error::Shape { axis: 0, reason: "pyramids differ in levels" });
        }
        let mut p = self.clone();
        p.coarse = self.coarse.lin_comb(alpha, &other.coarse, beta)?;
        for (a, b) in p.levels.iter_mut().zip(&other.levels) {
            for (x, y) in a.channels.iter_mut().zip(&b.channels) {
                *x = x.lin_comb(alpha, y, beta)?;
            }
        }
        Ok(p)
    }

    /// Applies `f` to every coefficient (coarse and detail).
    pub fn map_coeffs(&self, mut f: impl FnMut(f64) -> f64) -> WaveletPyramid {
        let mut p = self.clone();
        for v in p.coarse.values_mut() {
            *v = f(*v);
        }
        for l in &mut p.levels {
            for c in &mut l.channels {
                for v in c.values_mut() {
                    *v = f(*v);
                }
            }
        }
        p
    }
}

/// Repeated [`analyze_level`] from `fine.level()` down to `j0`.
pub fn decompose(bank: &FilterBank, fine: &GridFunction, j0: i32) -> Result<WaveletPyramid> {
    if j0 >= fine.level() {
        return Err(Error::LevelOutOfRange(j0));
    }
    let mut cur = fine.clone();
    let mut levels = Vec::with_capacity((fine.level() - j0) as usize);
    while cur.level() > j0 {
        let fine_box = cur.bbox().clone();
        let (c, d) = analyze_level(bank, &cur)?;
        levels.push(LevelDetails { level: c.level(), fine_box, channels: d });
        cur = c;
    }
    levels.reverse();
    Ok(WaveletPyramid { dim: fine.dim(), bank_id: bank.id(), j0, coarse: cur, levels })
}

fn check_bank(bank: &FilterBank, pyr: &WaveletPyramid) -> Result<()> {
    if bank.id() != pyr.bank_id {
        return Err(Error::Parameter("pyramid was built with a different filter bank"));
    }
    Ok(())
}

/// Inverse of [`decompose`]: the level-`J` grid on the recorded finest box.
pub fn reconstruct(bank: &FilterBank, pyr: &WaveletPyramid) -> Result<GridFunction> {
    check_bank(bank, pyr)?;
    let mut cur = pyr.coarse.clone();
    for l in &pyr.levels {
        cur = synthesize_level(bank, &cur, &l.channels, &l.fine_box)?;
    }
    Ok(cur)
}

/// `(P_j f)(x) = Σ_λ f(λ/2^j) φ^{[n]}(2^j x - λ)` for a level-`j` grid,
/// using a prebuilt evaluator whose table is at least as fine as `2^j x`.
pub fn project_eval_with(eval: &ScalingEvaluator, grid: &GridFunction, x: &[Dyadic]) -> Result<f64> {
    let n = grid.dim();
    if x.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: x.len() });
    }
    let (slo, shi) = eval.bank().phi_support();
    // per-axis candidate λ with their φ factor
    let mut axes: Vec<Vec<(i64, f64)>> = Vec::with_capacity(n);
    for l in 0..n {
        let y = x[l].scale_pow2(grid.level()).ok_or(Error::Overflow)?;
        let a = (y.ceil() as i64 - shi).max(grid.bbox().lo()[l]);
        let b = (y.floor() as i64 - slo).min(grid.bbox().hi()[l]);
        let mut v = Vec::new();
        for lam in a..=b {
            let w = eval.phi(y - Dyadic::from_int(lam))?;
            if w != 0.0 {
                v.push((lam, w));
            }
        }
        if v.is_empty() {
            return Ok(0.0);
        }
        axes.push(v);
    }
    let mut idx = vec![0usize; n];
    let mut lam = vec![0i64; n];
    let mut acc = 0.0;
    loop {
        let mut w = 1.0;
        for l in 0..n {
            let (k, f) = axes[l][idx[l]];
            lam[l] = k;
            w *= f;
        }
        acc += w * grid.get(&lam);
        let mut l = n;
        loop {
            if l == 0 {
                return Ok(acc);
            }
            l -= 1;
            idx[l] += 1;
            if idx[l] < axes[l].len() {
                break;
            }
            idx[l] = 0;
        }
    }
}

/// [`project_eval_with`] with an evaluator sized for `x`.
pub fn project_eval(bank: &FilterBank, grid: &GridFunction, x: &[Dyadic]) -> Result<f64> {
    let res = x.iter().map(|d| d.exponent() as i64 - grid.level() as i64).max().unwrap_or(0).max(0);
    let eval = ScalingEvaluator::new(bank, res as u32)?;
    project_eval_with(&eval, grid, x)
}

/// Half-width of the `g̃` stencil around its centre tap at 1.
pub fn dual_wavelet_radius(bank: &FilterBank) -> i64 {
    let (a, b) = bank.gdual().support();
    (1 - a).max(b - 1)
}

/// Sub-box of a finest-level box that zero extension cannot reach after
/// `levels` analysis steps: each step at scale `2^k` shrinks by
/// `2^k (r_h + r_g̃)`. May be empty.
pub fn interior_box(bbox: &IndexBox, levels: u32, bank: &FilterBank) -> IndexBox {
    let r = bank.support_radius() + dual_wavelet_radius(bank);
    bbox.shrink(r * ((1i64 << levels) - 1))
}

/// Level-`j` coefficients of orientation `s` whose analysis stencil only
/// reads finest-level samples inside `fine_box` (level `finest`). Coarse
/// values are plain subsamples, so a detail at `μ` reads the finest samples
/// at `2^{J-j-1}(2μ + k)`, `k ∈ supp g̃`, along each axis with `s_l = 1`.
pub fn interior_detail_box(bank: &FilterBank, fine_box: &IndexBox, finest: i32, j: i32, s: Orientation) -> Result<IndexBox> {
    if j >= finest || finest - j > 40 {
        return Err(Error::LevelOutOfRange(j));
    }
    let n = fine_box.dim();
    let (ga, gb) = bank.gdual().support();
    let step = 1i64 << (finest - j);
    let half = step / 2;
    let mut lo = vec![0; n];
    let mut hi = vec![0; n];
    for l in 0..n {
        let (a, b) = (fine_box.lo()[l], fine_box.hi()[l]);
        if s.bit(l) == 0 {
            lo[l] = (a + step - 1).div_euclid(step);
            hi[l] = b.div_euclid(step);
        } else {
            // half (2μ + ga) >= a  and  half (2μ + gb) <= b
            lo[l] = div_ceil2(div_ceil_i(a, half) - ga);
            hi[l] = div_floor2(b.div_euclid(half) - gb);
        }
    }
    IndexBox::new(lo, hi)
}

fn div_ceil_i(a: i64, b: i64) -> i64 {
    -((-a).div_euclid(b))
}

/// Result of [`threshold`].
#[derive(Clone, Debug, PartialEq)]
pub struct Thresholded {
    pub pyramid: WaveletPyramid,
    pub kept: usize,
    pub dropped: usize,
    /// `Σ |dropped coefficient|` over all levels.
    pub dropped_mass: f64,
    /// Dropped mass per level, ascending.
    pub level_mass: Vec<f64>,
}

/// Zeroes every detail coefficient with `|c| <= tau`; the coarse grid is
/// untouched.
pub fn threshold(pyr: &WaveletPyramid, tau: f64) -> Result<Thresholded> {
    if !(tau >= 0.0) {
        return Err(Error::Parameter("threshold must be nonnegative"));
    }
    let mut p = pyr.clone();
    let (mut kept, mut dropped) = (0, 0);
    let mut level_mass = Vec::with_capacity(p.levels.len());
    for l in &mut p.levels {
        let mut mass = 0.0;
        for c in &mut l.channels {
            for v in c.values_mut() {
                if v.abs() <= tau {
                    if *v != 0.0 {
                        mass += v.abs();
                    }
                    *v = 0.0;
                    dropped += 1;
                } else {
                    kept += 1;
                }
            }
        }
        level_mass.push(mass);
    }
    let dropped_mass = level_mass.iter().sum();
    Ok(Thresholded { pyramid: p, kept, dropped, dropped_mass, level_mass })
}

/// Sup-norm bound on `reconstruct(pyr) - reconstruct(thresholded)` on the
/// finest box. A synthesis step along one axis maps `(c, d)` to values
/// bounded by `A max|c| + max|d|` with `A = max(1, Σ_k |h_{2k+1}|)`, so a
/// unit coefficient at level `j` contributes at most `A^{n(J-j)}`.
pub fn threshold_error_bound(bank: &FilterBank, t: &Thresholded) -> f64 {
    let odd: f64 = bank.h().iter_f64().filter(|(k, _)| k.rem_euclid(2) == 1).map(|(_, c)| c.abs()).sum();
    let a = odd.max(1.0);
    let n = t.pyramid.dim as i32;
    let levels = t.level_mass.len() as i32;
    t.level_mass.iter().enumerate().map(|(i, m)| m * libm::pow(a, (n * (levels - i as i32)) as f64)).sum()
}

/// All orientations of a pyramid's dimension, scaling first.
pub fn pyramid_orientations(pyr: &WaveletPyramid) -> Result<Vec<Orientation>> {
    orientations(pyr.dim)
}
