//! Scaling function and mother wavelet at dyadic points.
//!
//! Values come from the refinement relation: start from `φ(k) = δ_{k,0}`
//! and refine one dyadic level at a time, copying even points and
//! predicting odd points with the mask `h`.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Mul};

use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::filters::{FilterBank, IndexedFilter};
use crate::tensor::Orientation;

/// Finest resolution a table may be refined to.
pub const MAX_RESOLUTION: u32 = 24;

/// Cap on stored table entries (about 1 GiB of binary64).
pub const MAX_TABLE_ENTRIES: u64 = 1 << 27;

/// Values usable in refinement tables: binary64 or exact dyadics.
pub trait Scalar: Copy + PartialEq + Add<Output = Self> + Mul<Output = Self> {
    const ZERO: Self;
    const ONE: Self;
    fn from_dyadic(d: Dyadic) -> Self;
    fn checked_mul_add(self, a: Self, b: Self) -> Option<Self>;
}

impl Scalar for f64 {
    const ZERO: f64 = 0.0;
    const ONE: f64 = 1.0;
    fn from_dyadic(d: Dyadic) -> f64 {
        d.to_f64()
    }
    fn checked_mul_add(self, a: f64, b: f64) -> Option<f64> {
        Some(self + a * b)
    }
}

impl Scalar for Dyadic {
    const ZERO: Dyadic = Dyadic::ZERO;
    const ONE: Dyadic = Dyadic::ONE;
    fn from_dyadic(d: Dyadic) -> Dyadic {
        d
    }
    fn checked_mul_add(self, a: Dyadic, b: Dyadic) -> Option<Dyadic> {
        self.checked_add(a.checked_mul(b)?)
    }
}

/// Samples of a compactly supported function on `2^{-r} Z`.
///
/// Entry `i` holds the value at `(lo + i) / 2^r`; everything outside
/// `[lo, hi] / 2^r` is zero.
#[derive(Clone, Debug, PartialEq)]
pub struct DyadicFunctionTable<T> {
    pub resolution: u32,
    pub lo: i64,
    pub hi: i64,
    pub values: Vec<T>,
}

impl<T: Scalar> DyadicFunctionTable<T> {
    /// Value at `k / 2^resolution`.
    pub fn get(&self, k: i64) -> T {
        if k < self.lo || k > self.hi {
            T::ZERO
        } else {
            self.values[(k - self.lo) as usize]
        }
    }

    /// Value at a dyadic point, when the point lies on this table's lattice.
    pub fn at(&self, x: Dyadic) -> Option<T> {
        if x.exponent() > self.resolution {
            return None;
        }
        let k = x.scale_pow2(self.resolution as i32)?.numerator();
        if k < self.lo as i128 || k > self.hi as i128 {
            return Some(T::ZERO);
        }
        Some(self.get(k as i64))
    }

    /// `(k / 2^r as exact dyadic, value)` pairs.
    pub fn points(&self) -> impl Iterator<Item = (Dyadic, T)> + '_ {
        self.values.iter().enumerate().map(move |(i, v)| (Dyadic::new((self.lo + i as i64) as i128, self.resolution), *v))
    }
}

impl DyadicFunctionTable<f64> {
    pub fn sup_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

fn entries_for(radius: i64, resolution: u32) -> u64 {
    (2 * radius as u64) * (1u64 << resolution) + 1
}

/// One interpolating refinement step on a line: `out[2i] = v[i]`,
/// `out[2i+1] = Σ_k h_{2i+1-2k} v[k]`. Input indices `lo..=lo+len-1`;
/// output indices `out_lo..=out_hi`.
fn refine_line<T: Scalar>(h: &[(i64, T)], v: &[T], lo: i64, out_lo: i64, out_hi: i64) -> Option<Vec<T>> {
    let mut out = vec![T::ZERO; (out_hi - out_lo + 1) as usize];
    let hi = lo + v.len() as i64 - 1;
    for (i, slot) in out.iter_mut().enumerate() {
        let nu = out_lo + i as i64;
        let mut acc = T::ZERO;
        for &(m, c) in h {
            let t = nu - m;
            if t.rem_euclid(2) != 0 {
                continue;
            }
            let k = t.div_euclid(2);
            if k >= lo && k <= hi {
                acc = acc.checked_mul_add(c, v[(k - lo) as usize])?;
            }
        }
        *slot = acc;
    }
    Some(out)
}

fn refine_generic<T: Scalar>(h: &IndexedFilter, resolution: u32) -> Result<DyadicFunctionTable<T>> {
    if resolution > MAX_RESOLUTION {
        return Err(Error::ResolutionTooLarge { resolution, max: MAX_RESOLUTION });
    }
    let (slo, shi) = h.support();
    let radius = slo.abs().max(shi.abs());
    let entries = entries_for(radius, resolution);
    if entries > MAX_TABLE_ENTRIES {
        return Err(Error::Resource { resolution, entries });
    }
    let taps: Vec<(i64, T)> = h.iter().map(|(k, c)| (k, T::from_dyadic(c))).collect();
    // level 0: φ(k) = δ_{k,0} on the support interval
    let mut lo = slo;
    let mut values: Vec<T> = (slo..=shi).map(|k| if k == 0 { T::ONE } else { T::ZERO }).collect();
    for r in 1..=resolution {
        let out_lo = slo << r;
        let out_hi = shi << r;
        values = refine_line(&taps, &values, lo, out_lo, out_hi).ok_or(Error::Overflow)?;
        lo = out_lo;
    }
    Ok(DyadicFunctionTable { resolution, lo: slo << resolution, hi: shi << resolution, values })
}

/// `φ(k / 2^r)` over the support, binary64.
pub fn refine_scaling(bank: &FilterBank, resolution: u32) -> Result<DyadicFunctionTable<f64>> {
    refine_generic(bank.h(), resolution)
}

/// `φ(k / 2^r)` over the support, exact. Fails with [`Error::Overflow`]
/// when the dyadic denominators outgrow i128.
pub fn refine_scaling_exact(bank: &FilterBank, resolution: u32) -> Result<DyadicFunctionTable<Dyadic>> {
    refine_generic(bank.h(), resolution)
}

fn wavelet_from_phi<T: Scalar>(phi: DyadicFunctionTable<T>) -> DyadicFunctionTable<T> {
    // ψ(k/2^r) = φ((k - 2^{r-1}) / 2^{r-1})
    let shift = 1i64 << phi.resolution;
    DyadicFunctionTable { resolution: phi.resolution + 1, lo: phi.lo + shift, hi: phi.hi + shift, values: phi.values }
}

/// `ψ(k / 2^r)` with `ψ(x) = φ(2x - 1)`, binary64. Needs `r >= 1`.
pub fn refine_wavelet(bank: &FilterBank, resolution: u32) -> Result<DyadicFunctionTable<f64>> {
    if resolution == 0 {
        return Err(Error::Resolution("ψ at integers needs φ at half-integers; use resolution >= 1"));
    }
    Ok(wavelet_from_phi(refine_scaling(bank, resolution - 1)?))
}

/// Exact variant of [`refine_wavelet`].
pub fn refine_wavelet_exact(bank: &FilterBank, resolution: u32) -> Result<DyadicFunctionTable<Dyadic>> {
    if resolution == 0 {
        return Err(Error::Resolution("ψ at integers needs φ at half-integers; use resolution >= 1"));
    }
    Ok(wavelet_from_phi(refine_scaling_exact(bank, resolution - 1)?))
}

/// Point evaluator for `φ`, `ψ` and their tensor products, backed by one
/// binary64 table at a fixed resolution.
#[derive(Clone, Debug)]
pub struct ScalingEvaluator {
    bank: FilterBank,
    phi: DyadicFunctionTable<f64>,
}

impl ScalingEvaluator {
    pub fn new(bank: &FilterBank, resolution: u32) -> Result<Self> {
        Ok(ScalingEvaluator { bank: bank.clone(), phi: refine_scaling(bank, resolution)? })
    }

    pub fn bank(&self) -> &FilterBank {
        &self.bank
    }

    pub fn resolution(&self) -> u32 {
        self.phi.resolution
    }

    pub fn phi_table(&self) -> &DyadicFunctionTable<f64> {
        &self.phi
    }

    /// `φ(x)`; errors when `x` is finer than the table.
    pub fn phi(&self, x: Dyadic) -> Result<f64> {
        self.phi.at(x).ok_or(Error::Resolution("point finer than the evaluator's table"))
    }

    /// `ψ(x) = φ(2x - 1)`.
    pub fn psi(&self, x: Dyadic) -> Result<f64> {
        let y = x.scale_pow2(1).ok_or(Error::Overflow)? - Dyadic::ONE;
        self.phi(y)
    }

    /// `φ` or `ψ` by orientation bit.
    pub fn factor(&self, bit: u8, x: Dyadic) -> Result<f64> {
        if bit == 0 { self.phi(x) } else { self.psi(x) }
    }

    /// `sup |φ|` over the table.
    pub fn phi_sup(&self) -> f64 {
        self.phi.sup_abs()
    }
}

/// `ψ^{[n]}_s(2^j x - λ)`: product over axes of `φ` (bit 0) or `ψ` (bit 1).
pub fn tensor_point_eval(eval: &ScalingEvaluator, s: &Orientation, j: i32, lambda: &[i64], x: &[Dyadic]) -> Result<f64> {
    let n = s.dim();
    if lambda.len() != n || x.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: lambda.len().min(x.len()) });
    }
    let mut acc = 1.0;
    for l in 0..n {
        let y = x[l].scale_pow2(j).ok_or(Error::Overflow)? - Dyadic::from_int(lambda[l]);
        let v = eval.factor(s.bit(l), y)?;
        if v == 0.0 {
            return Ok(0.0);
        }
        acc *= v;
    }
    Ok(acc)
}

/// Cover number of `φ^{[n]}`: the largest count of integer translates
/// simultaneously nonzero at one point.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CoverNumber {
    /// One-dimensional count from dense sampling.
    pub sampled_1d: u64,
    /// One-dimensional upper bound from the support interval.
    pub support_bound_1d: u64,
    pub dim: usize,
}

impl CoverNumber {
    /// `N(φ^{[n]}) = N(φ)^n`.
    pub fn value(&self) -> u64 {
        self.sampled_1d.pow(self.dim as u32)
    }

    /// Sampling reached the support bound, so the count is certified.
    pub fn confirmed(&self) -> bool {
        self.sampled_1d == self.support_bound_1d
    }
}

/// Resolution used to sample one period in [`cover_number`].
pub const COVER_RESOLUTION: u32 = 8;

pub fn cover_number(bank: &FilterBank, n: usize) -> Result<CoverNumber> {
    if !(1..=4).contains(&n) {
        return Err(Error::DimensionOutOfRange(n));
    }
    let table = refine_scaling(bank, COVER_RESOLUTION)?;
    let period = 1i64 << COVER_RESOLUTION;
    let mut best = 0u64;
    for m in 0..period {
        // count λ with φ(m/2^r - λ) != 0
        let count = (table.lo..=table.hi)
            .filter(|k| (m - k).rem_euclid(period) == 0)
            .filter(|&k| table.get(k) != 0.0)
            .count() as u64;
        best = best.max(count);
    }
    // At non-integer x the translates with x - λ inside the open interval (lo, hi).
    let (lo, hi) = bank.phi_support();
    let bound = (hi - lo) as u64;
    Ok(CoverNumber { sampled_1d: best, support_bound_1d: bound.max(1), dim: n })
}

/// Max over the window grid `[lo, hi]` at spacing `2^{-resolution}` of
/// `|Σ_λ λ^d φ(x - λ) - x^d|`, for every monomial degree `d <= degree`.
pub fn polynomial_reproduction_check(bank: &FilterBank, degree: u32, window: (i64, i64), resolution: u32) -> Result<f64> {
    let eval = ScalingEvaluator::new(bank, resolution)?;
    let (slo, shi) = bank.phi_support();
    let step = 1i64 << resolution;
    let mut worst: f64 = 0.0;
    for m in (window.0 * step)..=(window.1 * step) {
        let x = Dyadic::new(m as i128, resolution);
        let xf = x.to_f64();
        let lam_lo = x.floor() as i64 - shi;
        let lam_hi = x.ceil() as i64 - slo;
        for d in 0..=degree {
            let mut acc = 0.0;
            for lam in lam_lo..=lam_hi {
                let v = eval.phi(x - Dyadic::from_int(lam))?;
                if v != 0.0 {
                    acc += libm::pow(lam as f64, d as f64) * v;
                }
            }
            worst = worst.max((acc - libm::pow(xf, d as f64)).abs());
        }
    }
    Ok(worst)
}

/// Exact check of `φ(x) = Σ_k h_k φ(2x - k)` at every stored point of the
/// resolution-`r` table. Returns the first failing point, if any.
pub fn verify_refinement_exact(bank: &FilterBank, resolution: u32) -> Result<Option<Dyadic>> {
    if resolution == 0 {
        return Ok(None);
    }
    let fine = refine_scaling_exact(bank, resolution)?;
    let coarse = refine_scaling_exact(bank, resolution - 1)?;
    for (x, v) in fine.points() {
        let mut acc = Dyadic::ZERO;
        for (k, c) in bank.h().iter() {
            // 2x - k lives on the resolution r-1 lattice
            let y = x.scale_pow2(1).ok_or(Error::Overflow)? - Dyadic::from_int(k);
            let phi = coarse.at(y).ok_or(Error::Overflow)?;
            acc = acc.checked_add(c.checked_mul(phi).ok_or(Error::Overflow)?).ok_or(Error::Overflow)?;
        }
        if acc != v {
            return Ok(Some(x));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dd(l: u32) -> FilterBank {
        FilterBank::deslauriers_dubuc(l).unwrap()
    }

    #[test]
    fn hat_at_half_integers() {
        let t = refine_scaling_exact(&dd(1), 1).unwrap();
        assert_eq!(t.at(Dyadic::new(-1, 1)), Some(Dyadic::new(1, 1)));
        assert_eq!(t.at(Dyadic::ZERO), Some(Dyadic::ONE));
        assert_eq!(t.at(Dyadic::new(1, 1)), Some(Dyadic::new(1, 1)));
    }

    #[test]
    fn resolution_zero_is_delta() {
        for l in 1..=4 {
            let t = refine_scaling_exact(&dd(l), 0).unwrap();
            for (x, v) in t.points() {
                assert_eq!(v, if x.is_zero() { Dyadic::ONE } else { Dyadic::ZERO });
            }
        }
    }

    #[test]
    fn dd2_half_integers_are_the_mask() {
        let t = refine_scaling_exact(&dd(2), 1).unwrap();
        assert_eq!(t.at(Dyadic::new(1, 1)), Some(Dyadic::new(9, 4)));
        assert_eq!(t.at(Dyadic::new(-1, 1)), Some(Dyadic::new(9, 4)));
        assert_eq!(t.at(Dyadic::new(3, 1)), Some(Dyadic::new(-1, 4)));
        assert_eq!(t.at(Dyadic::new(-3, 1)), Some(Dyadic::new(-1, 4)));
    }

    #[test]
    fn wavelet_tables() {
        let w = refine_wavelet_exact(&dd(1), 1).unwrap();
        assert_eq!(w.at(Dyadic::new(1, 1)), Some(Dyadic::ONE));
        let w = refine_wavelet_exact(&dd(2), 2).unwrap();
        assert_eq!(w.at(Dyadic::new(1, 2)), Some(Dyadic::new(9, 4)));
        assert!(matches!(refine_wavelet(&dd(1), 0), Err(Error::Resolution(_))));
    }

    #[test]
    fn resolution_limits() {
        assert!(matches!(refine_scaling(&dd(1), 25), Err(Error::ResolutionTooLarge { .. })));
        assert!(matches!(refine_scaling(&dd(16), 24), Err(Error::Resource { .. })));
    }

    #[test]
    fn tensor_eval_examples() {
        let eval = ScalingEvaluator::new(&dd(1), 4).unwrap();
        let zero = Orientation::from_bits(&[0, 0]).unwrap();
        let x0 = [Dyadic::ZERO, Dyadic::ZERO];
        assert_eq!(tensor_point_eval(&eval, &zero, 0, &[0, 0], &x0).unwrap(), 1.0);
        let s10 = Orientation::from_bits(&[1, 0]).unwrap();
        let x = [Dyadic::new(1, 1), Dyadic::ZERO];
        assert_eq!(tensor_point_eval(&eval, &s10, 0, &[0, 0], &x).unwrap(), 1.0);
        let x = [Dyadic::new(1, 1), Dyadic::new(1, 1)];
        assert_eq!(tensor_point_eval(&eval, &zero, 0, &[0, 0], &x).unwrap(), 0.25);
    }

    #[test]
    fn psi_at_integers_vanishes() {
        let eval = ScalingEvaluator::new(&dd(2), 3).unwrap();
        for k in -6..=6 {
            assert_eq!(eval.psi(Dyadic::from_int(k)).unwrap(), 0.0);
        }
    }

    #[test]
    fn cover_numbers() {
        let c = cover_number(&dd(1), 1).unwrap();
        assert_eq!(c.value(), 2);
        assert!(c.confirmed());
        assert_eq!(cover_number(&dd(1), 2).unwrap().value(), 4);
        assert_eq!(cover_number(&dd(2), 1).unwrap().value(), 6);
        assert!(cover_number(&dd(1), 5).is_err());
    }

    #[test]
    fn polynomial_reproduction() {
        assert_eq!(polynomial_reproduction_check(&dd(1), 0, (-3, 3), 5).unwrap(), 0.0);
        assert!(polynomial_reproduction_check(&dd(2), 3, (-3, 3), 6).unwrap() < 1e-12);
        let r = polynomial_reproduction_check(&dd(1), 2, (-3, 3), 4).unwrap();
        assert!(r > 0.01);
        assert_eq!(r, 0.25);
    }

    #[test]
    fn refinement_identity_exact() {
        for l in 1..=4 {
            for r in 1..=6 {
                assert_eq!(verify_refinement_exact(&dd(l), r).unwrap(), None, "L={l} r={r}");
            }
        }
    }
}
