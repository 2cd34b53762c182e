//! Orientations `s ∈ {0,1}^n` and tensor-product filters as axis products.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::filters::FilterBank;
use crate::scaling::refine_scaling_exact;

/// Largest ambient dimension handled by the library.
pub const MAX_DIM: usize = 4;

/// An axis pattern choosing `φ` (0) or `ψ` (1) per coordinate.
///
/// Orientations are ordered lexicographically with axis 0 most
/// significant, so `index()` runs over `0..2^n` in that order.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Orientation {
    dim: u8,
    index: u8,
}

impl Orientation {
    pub fn new(dim: usize, index: usize) -> Result<Self> {
        if !(1..=MAX_DIM).contains(&dim) {
            return Err(Error::DimensionOutOfRange(dim));
        }
        if index >= 1 << dim {
            return Err(Error::Parameter("orientation index out of range"));
        }
        Ok(Orientation { dim: dim as u8, index: index as u8 })
    }

    pub fn scaling(dim: usize) -> Result<Self> {
        Self::new(dim, 0)
    }

    pub fn from_bits(bits: &[u8]) -> Result<Self> {
        let mut index = 0usize;
        for &b in bits {
            if b > 1 {
                return Err(Error::Parameter("orientation bits must be 0 or 1"));
            }
            index = (index << 1) | b as usize;
        }
        Self::new(bits.len(), index)
    }

    /// Parses a bit string such as `"01"`.
    pub fn parse(s: &str) -> Result<Self> {
        let bits: Vec<u8> = s
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                _ => Err(Error::Parse { what: "orientation", input: s.into() }),
            })
            .collect::<Result<_>>()?;
        Self::from_bits(&bits)
    }

    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    pub fn index(&self) -> usize {
        self.index as usize
    }

    /// Bit for `axis` (axis 0 first).
    pub fn bit(&self, axis: usize) -> u8 {
        (self.index >> (self.dim as usize - 1 - axis)) & 1
    }

    pub fn bits(&self) -> Vec<u8> {
        (0..self.dim()).map(|l| self.bit(l)).collect()
    }

    pub fn is_scaling(&self) -> bool {
        self.index == 0
    }

    /// `"0110"`-style bit string, used in file names.
    pub fn bit_string(&self) -> String {
        self.bits().iter().map(|&b| if b == 0 { '0' } else { '1' }).collect()
    }
}

impl fmt::Debug for Orientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "s{}", self.bit_string())
    }
}

impl fmt::Display for Orientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.bit_string())
    }
}

/// All `2^n` orientations, scaling orientation first.
pub fn orientations(n: usize) -> Result<Vec<Orientation>> {
    if !(1..=MAX_DIM).contains(&n) {
        return Err(Error::DimensionOutOfRange(n));
    }
    (0..1usize << n).map(|i| Orientation::new(n, i)).collect()
}

/// The `2^n - 1` detail orientations.
pub fn detail_orientations(n: usize) -> Result<Vec<Orientation>> {
    Ok(orientations(n)?.into_iter().skip(1).collect())
}

/// `g^{[n]}_{s,t}` / `g̃^{[n]}_{s,t}` for one orientation, evaluated as an
/// axis product on demand.
#[derive(Clone, Copy, Debug)]
pub struct TensorFilterView<'a> {
    bank: &'a FilterBank,
    orientation: Orientation,
}

impl<'a> TensorFilterView<'a> {
    pub fn new(bank: &'a FilterBank, orientation: Orientation) -> Self {
        TensorFilterView { bank, orientation }
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    /// Per-axis index range of the primal or dual filter.
    pub fn axis_support(&self, axis: usize, dual: bool) -> (i64, i64) {
        let bit = self.orientation.bit(axis);
        if dual { self.bank.dual(bit).support() } else { self.bank.primal(bit).support() }
    }

    /// Exact coefficient at `t`; zero outside the product of axis supports.
    pub fn coeff(&self, t: &[i64], dual: bool) -> Result<Dyadic> {
        let n = self.orientation.dim();
        if t.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: t.len() });
        }
        let mut acc = Dyadic::ONE;
        for (l, &tl) in t.iter().enumerate() {
            let bit = self.orientation.bit(l);
            let c = if dual { self.bank.dual(bit).get(tl) } else { self.bank.primal(bit).get(tl) };
            if c.is_zero() {
                return Ok(Dyadic::ZERO);
            }
            acc = acc.checked_mul(c).ok_or(Error::Overflow)?;
        }
        Ok(acc)
    }
}

/// `tensor_coeff(view, t, dual)`.
pub fn tensor_coeff(view: &TensorFilterView<'_>, t: &[i64], dual: bool) -> Result<Dyadic> {
    view.coeff(t, dual)
}

/// Exact `max |Σ_s Σ_z g̃^{[n]}_{s,λ-2z} g^{[n]}_{s,μ-2z} - δ_{λμ}|` over
/// `λ, μ ∈ [-window, window]^n`.
///
/// For each `λ` only the `(s, z, μ)` with nonzero tensor coefficients are
/// visited; every other `(λ, μ)` pair has an identically empty sum. Terms are
/// accumulated as integers over a common power-of-two denominator.
pub fn filter_duality_check(bank: &FilterBank, n: usize, window: i64) -> Result<Dyadic> {
    if !(1..=3).contains(&n) {
        return Err(Error::DimensionOutOfRange(n));
    }
    if window < 0 {
        return Err(Error::Parameter("window must be nonnegative"));
    }
    // every filter as integers over one power of two per family
    let e_dual = (0..=1u8).flat_map(|b| bank.dual(b).iter().map(|(_, c)| c.exponent())).max().unwrap_or(0);
    let e_prim = (0..=1u8).flat_map(|b| bank.primal(b).iter().map(|(_, c)| c.exponent())).max().unwrap_or(0);
    let total_exp = (e_dual + e_prim) * n as u32;
    if total_exp > 120 {
        return Err(Error::Overflow);
    }
    let scaled = |f: &crate::filters::IndexedFilter, e: u32| -> Vec<(i64, i128)> {
        f.iter().filter(|(_, c)| !c.is_zero()).map(|(k, c)| (k, c.numerator() << (e - c.exponent()))).collect()
    };
    let dual = [scaled(bank.dual(0), e_dual), scaled(bank.dual(1), e_dual)];
    let prim = [scaled(bank.primal(0), e_prim), scaled(bank.primal(1), e_prim)];

    let width = (2 * window + 1) as usize;
    let cells = width.pow(n as u32);
    let mut acc = alloc::vec![0i128; cells];
    let mut touched: Vec<usize> = Vec::new();
    let mut worst: i128 = 0;
    let one_scaled = 1i128 << total_exp;
    let strides: [usize; 3] = core::array::from_fn(|l| if l < n { width.pow((n - 1 - l) as u32) } else { 0 });

    // per axis: nonzero (z, d) pairs, then for each z the (flat offset, p) pairs
    type Axis = Vec<(i128, Vec<(usize, i128)>)>;
    let unit: Axis = alloc::vec![(1, alloc::vec![(0, 1)])];
    let mut lambda = alloc::vec![-window; n];
    loop {
        let mut lam_flat = 0usize;
        for l in 0..n {
            lam_flat += (lambda[l] + window) as usize * strides[l];
        }
        for s in orientations(n)? {
            let axes: [Axis; 3] = core::array::from_fn(|l| {
                if l >= n {
                    return unit.clone();
                }
                let b = s.bit(l) as usize;
                let mut out = Vec::new();
                for &(t, d) in &dual[b] {
                    // λ_l - 2 z = t
                    let diff = lambda[l] - t;
                    if diff.rem_euclid(2) != 0 {
                        continue;
                    }
                    let z = diff / 2;
                    let mus: Vec<(usize, i128)> = prim[b]
                        .iter()
                        .map(|&(u, p)| (2 * z + u, p))
                        .filter(|&(mu, _)| mu >= -window && mu <= window)
                        .map(|(mu, p)| ((mu + window) as usize * strides[l], p))
                        .collect();
                    out.push((d, mus));
                }
                out
            });
            for (d0, m0) in &axes[0] {
                for (d1, m1) in &axes[1] {
                    for (d2, m2) in &axes[2] {
                        let d = d0 * d1 * d2;
                        for &(f0, p0) in m0 {
                            for &(f1, p1) in m1 {
                                for &(f2, p2) in m2 {
                                    let flat = f0 + f1 + f2;
                                    if acc[flat] == 0 {
                                        touched.push(flat);
                                    }
                                    acc[flat] += d * p0 * p1 * p2;
                                }
                            }
                        }
                    }
                }
            }
        }
        if !touched.contains(&lam_flat) {
            worst = worst.max(one_scaled);
        }
        for &f in &touched {
            let want = if f == lam_flat { one_scaled } else { 0 };
            worst = worst.max((acc[f] - want).abs());
            acc[f] = 0;
        }
        touched.clear();
        let bounds: Vec<(i64, i64)> = (0..n).map(|_| (-window, window)).collect();
        if !advance(&mut lambda, &bounds) {
            break;
        }
    }
    Ok(Dyadic::new(worst, total_exp))
}

/// Odometer increment over the inclusive box `bounds`; false when exhausted.
fn advance(p: &mut [i64], bounds: &[(i64, i64)]) -> bool {
    for l in (0..p.len()).rev() {
        if p[l] < bounds[l].1 {
            p[l] += 1;
            return true;
        }
        p[l] = bounds[l].0;
    }
    false
}

/// Exact deviations of the four one-level biorthogonality relations
/// `⟨φ̃_{j,k}, φ_{j,l}⟩ = δ`, `⟨φ̃_{j,k}, ψ_{j,l}⟩ = 0`,
/// `⟨ψ̃_{j,k}, φ_{j,l}⟩ = 0`, `⟨ψ̃_{j,k}, ψ_{j,l}⟩ = δ`
/// over `|k|, |l| <= radius`.
///
/// The dual functionals are Dirac combinations, so each pairing reduces to
/// point values of `φ` at integers and half-integers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BiorthogonalityReport {
    pub phi_phi: Dyadic,
    pub phi_psi: Dyadic,
    pub psi_phi: Dyadic,
    pub psi_psi: Dyadic,
}

impl BiorthogonalityReport {
    pub fn exact(&self) -> bool {
        [self.phi_phi, self.phi_psi, self.psi_phi, self.psi_psi].iter().all(|d| d.is_zero())
    }
}

pub fn biorthogonality_check(bank: &FilterBank, radius: i64) -> Result<BiorthogonalityReport> {
    let phi = refine_scaling_exact(bank, 1)?;
    // φ at y/2 for integer y
    let half = |y: i64| phi.get(y);
    let gd = bank.gdual();
    let mut rep = BiorthogonalityReport { phi_phi: Dyadic::ZERO, phi_psi: Dyadic::ZERO, psi_phi: Dyadic::ZERO, psi_psi: Dyadic::ZERO };
    for k in -radius..=radius {
        for l in -radius..=radius {
            let d = k - l;
            let delta = if d == 0 { Dyadic::ONE } else { Dyadic::ZERO };
            // ⟨δ(· - k/2^j), φ(2^j · - l)⟩ = φ(k - l)
            let pp = half(2 * d);
            // ψ(k - l) = φ(2(k - l) - 1)
            let ps = half(4 * d - 2);
            // ⟨ψ̃_{j,k}, f(2^j · - l)⟩ = Σ_ν g̃_ν f(k - l + ν/2)
            let mut sp = Dyadic::ZERO;
            let mut ss = Dyadic::ZERO;
            for (nu, c) in gd.iter() {
                // φ((2d + ν)/2)
                sp = sp + c * half(2 * d + nu);
                // ψ((2d + ν)/2) = φ(2d + ν - 1)
                ss = ss + c * half(2 * (2 * d + nu - 1));
            }
            rep.phi_phi = rep.phi_phi.max((pp - delta).abs());
            rep.phi_psi = rep.phi_psi.max(ps.abs());
            rep.psi_phi = rep.psi_phi.max(sp.abs());
            rep.psi_psi = rep.psi_psi.max((ss - delta).abs());
        }
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dd(l: u32) -> FilterBank {
        FilterBank::deslauriers_dubuc(l).unwrap()
    }

    #[test]
    fn orientation_enumeration() {
        let o1: Vec<_> = orientations(1).unwrap().iter().map(|o| o.bits()).collect();
        assert_eq!(o1, [[0], [1]]);
        let o2: Vec<_> = orientations(2).unwrap().iter().map(|o| o.bits()).collect();
        assert_eq!(o2, [[0, 0], [0, 1], [1, 0], [1, 1]]);
        assert_eq!(orientations(3).unwrap().len(), 8);
        assert_eq!(detail_orientations(3).unwrap().len(), 7);
        assert!(orientations(0).is_err());
        assert!(orientations(5).is_err());
    }

    #[test]
    fn orientation_parse_roundtrip() {
        let s = Orientation::parse("101").unwrap();
        assert_eq!(s.bits(), [1, 0, 1]);
        assert_eq!(s.bit_string(), "101");
        assert!(Orientation::parse("12").is_err());
    }

    #[test]
    fn coefficient_examples() {
        let bank = dd(1);
        let s00 = Orientation::from_bits(&[0, 0]).unwrap();
        let v = TensorFilterView::new(&bank, s00);
        assert_eq!(tensor_coeff(&v, &[0, 0], false).unwrap(), Dyadic::ONE);
        let s11 = Orientation::from_bits(&[1, 1]).unwrap();
        let v = TensorFilterView::new(&bank, s11);
        assert_eq!(tensor_coeff(&v, &[1, 1], false).unwrap(), Dyadic::ONE);
        let s01 = Orientation::from_bits(&[0, 1]).unwrap();
        let v = TensorFilterView::new(&bank, s01);
        assert_eq!(tensor_coeff(&v, &[1, 0], true).unwrap(), Dyadic::ZERO);
        assert!(tensor_coeff(&v, &[1], true).is_err());
    }

    #[test]
    fn duality_small_cases() {
        assert_eq!(filter_duality_check(&dd(1), 1, 4).unwrap(), Dyadic::ZERO);
        assert_eq!(filter_duality_check(&dd(2), 2, 8).unwrap(), Dyadic::ZERO);
    }

    #[test]
    fn duality_detects_a_broken_bank() {
        let good = dd(2);
        let wrong_gd = dd(1).gdual().clone();
        let bad = FilterBank::from_parts_unchecked(0, good.h().clone(), good.g().clone(), good.hdual().clone(), wrong_gd);
        assert!(!filter_duality_check(&bad, 1, 8).unwrap().is_zero());
        assert!(!biorthogonality_check(&bad, 8).unwrap().exact());
    }

    #[test]
    fn biorthogonality_exact() {
        for l in 1..=4 {
            let rep = biorthogonality_check(&dd(l), 8).unwrap();
            assert!(rep.exact(), "L={l}: {rep:?}");
        }
    }
}
