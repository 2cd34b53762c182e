//! Integer boxes and sampled functions on the dyadic lattice `2^{-j} Z^n`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::tensor::MAX_DIM;

/// Closed integer box `[lo_0, hi_0] x ... x [lo_{n-1}, hi_{n-1}]`.
///
/// A box with `hi_l < lo_l` on some axis is empty; it can be represented
/// (e.g. as the result of shrinking) but holds no points.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IndexBox {
    lo: Vec<i64>,
    hi: Vec<i64>,
}

impl IndexBox {
    pub fn new(lo: Vec<i64>, hi: Vec<i64>) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::DimensionMismatch { expected: lo.len(), got: hi.len() });
        }
        if lo.is_empty() || lo.len() > MAX_DIM {
            return Err(Error::DimensionOutOfRange(lo.len()));
        }
        Ok(IndexBox { lo, hi })
    }

    /// `[lo, hi]^n`.
    pub fn cube(n: usize, lo: i64, hi: i64) -> Result<Self> {
        Self::new(vec![lo; n], vec![hi; n])
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[i64] {
        &self.lo
    }

    pub fn hi(&self) -> &[i64] {
        &self.hi
    }

    /// Number of lattice points along `axis` (0 when empty).
    pub fn extent(&self, axis: usize) -> usize {
        (self.hi[axis] - self.lo[axis] + 1).max(0) as usize
    }

    pub fn extents(&self) -> Vec<usize> {
        (0..self.dim()).map(|l| self.extent(l)).collect()
    }

    pub fn len(&self) -> usize {
        (0..self.dim()).map(|l| self.extent(l)).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, p: &[i64]) -> bool {
        p.len() == self.dim() && p.iter().zip(self.lo.iter().zip(&self.hi)).all(|(&x, (&a, &b))| x >= a && x <= b)
    }

    /// Row-major flat index, last axis fastest.
    pub fn flat_index(&self, p: &[i64]) -> Option<usize> {
        if !self.contains(p) {
            return None;
        }
        let mut idx = 0usize;
        for l in 0..self.dim() {
            idx = idx * self.extent(l) + (p[l] - self.lo[l]) as usize;
        }
        Some(idx)
    }

    /// Inverse of [`flat_index`](Self::flat_index).
    pub fn point_at(&self, mut idx: usize, out: &mut [i64]) {
        for l in (0..self.dim()).rev() {
            let e = self.extent(l);
            out[l] = self.lo[l] + (idx % e) as i64;
            idx /= e;
        }
    }

    /// Shrinks every axis by `by` on both sides.
    pub fn shrink(&self, by: i64) -> IndexBox {
        IndexBox { lo: self.lo.iter().map(|v| v + by).collect(), hi: self.hi.iter().map(|v| v - by).collect() }
    }

    pub fn intersect(&self, other: &IndexBox) -> Result<IndexBox> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: other.dim() });
        }
        Ok(IndexBox {
            lo: self.lo.iter().zip(&other.lo).map(|(a, b)| *a.max(b)).collect(),
            hi: self.hi.iter().zip(&other.hi).map(|(a, b)| *a.min(b)).collect(),
        })
    }

    /// Visits every point in row-major order.
    pub fn for_each_point(&self, mut f: impl FnMut(usize, &[i64])) {
        if self.is_empty() {
            return;
        }
        let n = self.dim();
        let mut p = self.lo.clone();
        let mut idx = 0usize;
        loop {
            f(idx, &p);
            idx += 1;
            let mut l = n;
            loop {
                if l == 0 {
                    return;
                }
                l -= 1;
                if p[l] < self.hi[l] {
                    p[l] += 1;
                    break;
                }
                p[l] = self.lo[l];
            }
        }
    }
}

/// Samples `f(λ / 2^j)` on a box, zero outside it.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    level: i32,
    bbox: IndexBox,
    values: Vec<f64>,
}

/// Levels accepted for sampling.
pub const LEVEL_RANGE: core::ops::RangeInclusive<i32> = -20..=40;

impl GridFunction {
    /// Wraps a value array; rejects length mismatches, empty boxes and
    /// non-finite values.
    pub fn new(level: i32, bbox: IndexBox, values: Vec<f64>) -> Result<Self> {
        if bbox.is_empty() {
            return Err(Error::EmptyBox);
        }
        if values.len() != bbox.len() {
            return Err(Error::LengthMismatch { expected: bbox.len(), got: values.len() });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(GridFunction { level, bbox, values })
    }

    pub fn zeros(level: i32, bbox: IndexBox) -> Result<Self> {
        let len = bbox.len();
        Self::new(level, bbox, vec![0.0; len])
    }

    pub(crate) fn from_parts(level: i32, bbox: IndexBox, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), bbox.len());
        GridFunction { level, bbox, values }
    }

    pub fn dim(&self) -> usize {
        self.bbox.dim()
    }

    pub fn level(&self) -> i32 {
        self.level
    }

    pub fn bbox(&self) -> &IndexBox {
        &self.bbox
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Value at `λ`; zero outside the box.
    pub fn get(&self, p: &[i64]) -> f64 {
        self.bbox.flat_index(p).map_or(0.0, |i| self.values[i])
    }

    pub fn set(&mut self, p: &[i64], v: f64) -> Result<()> {
        let i = self.bbox.flat_index(p).ok_or(Error::Parameter("point outside the grid box"))?;
        self.values[i] = v;
        Ok(())
    }

    pub fn sup_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `α self + β other` over the common box; errors on box mismatch.
    pub fn lin_comb(&self, alpha: f64, other: &GridFunction, beta: f64) -> Result<GridFunction> {
        if self.bbox != other.bbox || self.level != other.level {
            return Err(Error::Shape { axis: 0, reason: "grids differ in box or level" });
        }
        let values = self.values.iter().zip(&other.values).map(|(a, b)| alpha * a + beta * b).collect();
        Ok(GridFunction::from_parts(self.level, self.bbox.clone(), values))
    }

    /// Max absolute difference over the points of `region`, reading both
    /// grids with zero extension.
    pub fn max_abs_diff_on(&self, other: &GridFunction, region: &IndexBox) -> f64 {
        let mut worst: f64 = 0.0;
        region.for_each_point(|_, p| worst = worst.max((self.get(p) - other.get(p)).abs()));
        worst
    }
}

/// `f(λ / 2^j)` for `λ` in `bbox`. The closure receives real coordinates.
pub fn sample_grid(mut f: impl FnMut(&[f64]) -> f64, level: i32, bbox: &IndexBox) -> Result<GridFunction> {
    if !LEVEL_RANGE.contains(&level) {
        return Err(Error::LevelOutOfRange(level));
    }
    if bbox.is_empty() {
        return Err(Error::EmptyBox);
    }
    let scale = libm::exp2(-(level as f64));
    let mut x = vec![0.0; bbox.dim()];
    let mut values = Vec::with_capacity(bbox.len());
    let mut bad = None;
    bbox.for_each_point(|i, p| {
        for (xl, &pl) in x.iter_mut().zip(p) {
            *xl = pl as f64 * scale;
        }
        let v = f(&x);
        if !v.is_finite() && bad.is_none() {
            bad = Some(i);
        }
        values.push(v);
    });
    if let Some(i) = bad {
        return Err(Error::Evaluation(i));
    }
    Ok(GridFunction::from_parts(level, bbox.clone(), values))
}

/// Restricts a level-`J` grid to the coarser lattice at level `j <= J`:
/// the value at `λ` is the fine value at `2^{J-j} λ`.
pub fn downsample(fine: &GridFunction, level: i32) -> Result<GridFunction> {
    let shift = fine.level - level;
    if shift < 0 || shift > 62 {
        return Err(Error::LevelOutOfRange(level));
    }
    let n = fine.dim();
    let lo: Vec<i64> = (0..n).map(|l| div_ceil_pow2(fine.bbox.lo[l], shift as u32)).collect();
    let hi: Vec<i64> = (0..n).map(|l| fine.bbox.hi[l] >> shift).collect();
    let bbox = IndexBox::new(lo, hi)?;
    if bbox.is_empty() {
        let axis = (0..n).find(|&l| bbox.extent(l) == 0).unwrap_or(0);
        return Err(Error::LevelTooDeep { axis, level });
    }
    let mut q = vec![0i64; n];
    let mut values = Vec::with_capacity(bbox.len());
    bbox.for_each_point(|_, p| {
        for l in 0..n {
            q[l] = p[l] << shift;
        }
        values.push(fine.get(&q));
    });
    Ok(GridFunction::from_parts(level, bbox, values))
}

pub(crate) fn div_ceil_pow2(v: i64, shift: u32) -> i64 {
    -((-v) >> shift)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_index_roundtrip() {
        let b = IndexBox::new(vec![-1, 2], vec![1, 5]).unwrap();
        assert_eq!(b.len(), 12);
        let mut p = [0i64; 2];
        for i in 0..b.len() {
            b.point_at(i, &mut p);
            assert_eq!(b.flat_index(&p), Some(i));
        }
        let mut seen = 0;
        b.for_each_point(|i, q| {
            assert_eq!(b.flat_index(q), Some(i));
            seen += 1;
        });
        assert_eq!(seen, 12);
    }

    #[test]
    fn sampling_linear() {
        let b = IndexBox::new(vec![0], vec![4]).unwrap();
        let g = sample_grid(|x| x[0], 1, &b).unwrap();
        assert_eq!(g.values(), &[0.0, 0.5, 1.0, 1.5, 2.0]);
        let bad = sample_grid(|x| if x[0] > 1.0 { f64::NAN } else { 0.0 }, 1, &b);
        assert_eq!(bad, Err(Error::Evaluation(3)));
    }

    #[test]
    fn downsample_takes_even_sites() {
        let b = IndexBox::new(vec![-3], vec![5]).unwrap();
        let g = sample_grid(|x| x[0], 3, &b).unwrap();
        let c = downsample(&g, 2).unwrap();
        assert_eq!(c.bbox().lo(), &[-1]);
        assert_eq!(c.bbox().hi(), &[2]);
        assert_eq!(c.values(), &[-0.25, 0.0, 0.25, 0.5]);
    }

    #[test]
    fn rejects_bad_payloads() {
        let b = IndexBox::cube(2, 0, 1).unwrap();
        assert_eq!(GridFunction::new(0, b.clone(), vec![0.0; 3]), Err(Error::LengthMismatch { expected: 4, got: 3 }));
        assert_eq!(GridFunction::new(0, b, vec![0.0, 1.0, f64::INFINITY, 0.0]), Err(Error::NonFinite(2)));
    }
}
