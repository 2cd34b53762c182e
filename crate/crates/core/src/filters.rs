//! One-dimensional interpolating filter banks.
//!
//! An interpolating scaling function with mask `h_k = φ(k/2)` determines the
//! other three filters completely:
//!
//! ```text
//! g_k  = δ_{k,1}
//! h̃_k = δ_{k,0}
//! g̃_k = (-1)^(k-1) h_{1-k}
//! ```
//!
//! Deslauriers-Dubuc masks of order `L` are generated from midpoint
//! Lagrange interpolation through the `2L` nearest coarse samples.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use crate::dyadic::Dyadic;
use crate::error::{Error, Result};

/// Largest supported Deslauriers-Dubuc order.
pub const MAX_DD_ORDER: u32 = 16;

/// A finitely supported filter `k -> c_k` with exact dyadic coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexedFilter {
    offset: i64,
    coeffs: Vec<Dyadic>,
}

impl IndexedFilter {
    /// Builds a filter from the coefficient at `offset` onward. Leading and
    /// trailing zeros are trimmed; an all-zero filter is rejected.
    pub fn new(offset: i64, coeffs: Vec<Dyadic>) -> Result<Self> {
        let first = coeffs.iter().position(|c| !c.is_zero()).ok_or(Error::InvalidFilter("filter has no nonzero coefficient"))?;
        let last = coeffs.iter().rposition(|c| !c.is_zero()).unwrap();
        Ok(IndexedFilter { offset: offset + first as i64, coeffs: coeffs[first..=last].to_vec() })
    }

    /// Builds a filter from sparse `(index, value)` pairs.
    pub fn from_pairs(pairs: &[(i64, Dyadic)]) -> Result<Self> {
        let lo = pairs.iter().map(|p| p.0).min().ok_or(Error::InvalidFilter("filter has no coefficients"))?;
        let hi = pairs.iter().map(|p| p.0).max().unwrap();
        let mut coeffs = alloc::vec![Dyadic::ZERO; (hi - lo + 1) as usize];
        for &(k, v) in pairs {
            let slot = &mut coeffs[(k - lo) as usize];
            *slot = *slot + v;
        }
        Self::new(lo, coeffs)
    }

    pub fn unit(index: i64) -> Self {
        IndexedFilter { offset: index, coeffs: alloc::vec![Dyadic::ONE] }
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    pub fn coeffs(&self) -> &[Dyadic] {
        &self.coeffs
    }

    /// Lowest and highest index with a nonzero coefficient.
    pub fn support(&self) -> (i64, i64) {
        (self.offset, self.offset + self.coeffs.len() as i64 - 1)
    }

    pub fn get(&self, k: i64) -> Dyadic {
        let i = k - self.offset;
        if i < 0 || i >= self.coeffs.len() as i64 {
            Dyadic::ZERO
        } else {
            self.coeffs[i as usize]
        }
    }

    pub fn get_f64(&self, k: i64) -> f64 {
        self.get(k).to_f64()
    }

    /// Nonzero `(index, value)` pairs in ascending index order.
    pub fn iter(&self) -> impl Iterator<Item = (i64, Dyadic)> + '_ {
        self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(move |(i, c)| (self.offset + i as i64, *c))
    }

    pub fn iter_f64(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.iter().map(|(k, c)| (k, c.to_f64()))
    }

    pub fn sum(&self) -> Dyadic {
        self.coeffs.iter().copied().sum()
    }

    /// `k -> c_k * factor`, exact.
    pub fn scaled(&self, factor: Dyadic) -> Result<Self> {
        let coeffs = self.coeffs.iter().map(|c| c.checked_mul(factor).ok_or(Error::Overflow)).collect::<Result<Vec<_>>>()?;
        Self::new(self.offset, coeffs)
    }

    fn write_line(&self, name: &str, out: &mut String) {
        out.push_str(name);
        out.push(':');
        for (k, c) in self.iter() {
            let _ = write!(out, " {k}:{c}");
        }
        out.push('\n');
    }
}

/// The four filters `h, g, h̃, g̃` of one interpolating MRA.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FilterBank {
    order: u32,
    h: IndexedFilter,
    g: IndexedFilter,
    hdual: IndexedFilter,
    gdual: IndexedFilter,
}

impl FilterBank {
    /// Deslauriers-Dubuc bank of the given order.
    pub fn deslauriers_dubuc(order: u32) -> Result<Self> {
        let mut bank = derive_bank(dd_scaling_filter(order)?)?;
        bank.order = order;
        Ok(bank)
    }

    /// Assembles a bank without checking the filter relations. Meant for
    /// fault-injection tests of the identity checkers.
    #[doc(hidden)]
    pub fn from_parts_unchecked(order: u32, h: IndexedFilter, g: IndexedFilter, hdual: IndexedFilter, gdual: IndexedFilter) -> Self {
        FilterBank { order, h, g, hdual, gdual }
    }

    /// Deslauriers-Dubuc order, 0 for a custom bank.
    pub fn order(&self) -> u32 {
        self.order
    }

    /// `ddL` for Deslauriers-Dubuc banks, `custom` otherwise.
    pub fn id(&self) -> String {
        if self.order == 0 {
            "custom".into()
        } else {
            format!("dd{}", self.order)
        }
    }

    pub fn h(&self) -> &IndexedFilter {
        &self.h
    }

    pub fn g(&self) -> &IndexedFilter {
        &self.g
    }

    pub fn hdual(&self) -> &IndexedFilter {
        &self.hdual
    }

    pub fn gdual(&self) -> &IndexedFilter {
        &self.gdual
    }

    /// Primal filter for one axis bit: `h` for 0, `g` for 1.
    pub fn primal(&self, bit: u8) -> &IndexedFilter {
        if bit == 0 { &self.h } else { &self.g }
    }

    /// Dual filter for one axis bit: `h̃` for 0, `g̃` for 1.
    pub fn dual(&self, bit: u8) -> &IndexedFilter {
        if bit == 0 { &self.hdual } else { &self.gdual }
    }

    /// `supp φ ⊂ [lo, hi]`, read off the refinement mask.
    pub fn phi_support(&self) -> (i64, i64) {
        self.h.support()
    }

    /// Radius of the smallest origin-centred interval containing `supp φ`.
    pub fn support_radius(&self) -> i64 {
        let (lo, hi) = self.phi_support();
        lo.abs().max(hi.abs())
    }

    /// Serialises the bank as four lines `name: index:num/den ...`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        self.h.write_line("h", &mut out);
        self.g.write_line("g", &mut out);
        self.hdual.write_line("hd", &mut out);
        self.gdual.write_line("gd", &mut out);
        out
    }

    /// Parses the text form. `h` must be present; `g`, `hd`, `gd` are
    /// optional but must agree with the ones derived from `h` when given.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut filters: [Option<IndexedFilter>; 4] = [None, None, None, None];
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (name, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
            let slot = match name.trim_end_matches(':') {
                "h" => 0,
                "g" => 1,
                "hd" => 2,
                "gd" => 3,
                _ => return Err(Error::Parse { what: "filter name", input: name.into() }),
            };
            let mut pairs = Vec::new();
            for tok in rest.split_whitespace() {
                let (k, v) = tok.split_once(':').ok_or_else(|| Error::Parse { what: "filter entry", input: tok.into() })?;
                let k: i64 = k.parse().map_err(|_| Error::Parse { what: "filter index", input: tok.into() })?;
                pairs.push((k, Dyadic::parse(v)?));
            }
            filters[slot] = Some(IndexedFilter::from_pairs(&pairs)?);
        }
        let h = filters[0].take().ok_or(Error::InvalidFilter("text has no h line"))?;
        let mut bank = derive_bank(h)?;
        let derived = [&bank.g, &bank.hdual, &bank.gdual];
        for (given, want) in filters[1..].iter().zip(derived) {
            if let Some(f) = given {
                if f != want {
                    return Err(Error::InvalidFilter("g/hd/gd line disagrees with the filters derived from h"));
                }
            }
        }
        bank.order = detect_dd_order(&bank.h);
        Ok(bank)
    }
}

fn detect_dd_order(h: &IndexedFilter) -> u32 {
    let (lo, hi) = h.support();
    if lo != -hi || hi % 2 == 0 {
        return 0;
    }
    let order = ((hi + 1) / 2) as u32;
    match dd_scaling_filter(order) {
        Ok(dd) if &dd == h => order,
        _ => 0,
    }
}

const PRIMES: [u64; 18] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61];

/// Adds the prime exponents of `v` (scaled by `sign`) into `exps`.
fn factor_into(mut v: u64, sign: i32, exps: &mut [i32; 18]) {
    for (i, &p) in PRIMES.iter().enumerate() {
        while v % p == 0 {
            v /= p;
            exps[i] += sign;
        }
    }
    debug_assert_eq!(v, 1, "factor outside the prime table");
}

/// Deslauriers-Dubuc refinement mask of order `order` (support `±(2L-1)`).
///
/// The odd coefficient `h_m` is the weight of node `m` in the Lagrange
/// interpolant through the odd nodes `±1, ±3, …, ±(2L-1)` evaluated at 0.
pub fn dd_scaling_filter(order: u32) -> Result<IndexedFilter> {
    if !(1..=MAX_DD_ORDER).contains(&order) {
        return Err(Error::OrderUnsupported(order));
    }
    let r = 2 * order as i64 - 1;
    let nodes: Vec<i64> = (-(order as i64)..order as i64).map(|i| 2 * i + 1).collect();
    let mut coeffs = alloc::vec![Dyadic::ZERO; (2 * r + 1) as usize];
    coeffs[r as usize] = Dyadic::ONE;
    for &a in &nodes {
        // w_a = Π_{b≠a} (0 - b) / (a - b), kept as a prime-exponent vector
        let mut exps = [0i32; 18];
        let mut negative = false;
        for &b in &nodes {
            if b == a {
                continue;
            }
            let num = -b;
            let den = a - b;
            negative ^= (num < 0) != (den < 0);
            factor_into(num.unsigned_abs(), 1, &mut exps);
            factor_into(den.unsigned_abs(), -1, &mut exps);
        }
        let mut num: i128 = 1;
        for (i, &e) in exps.iter().enumerate().skip(1) {
            assert!(e >= 0, "odd prime left in a Deslauriers-Dubuc denominator");
            for _ in 0..e {
                num = num.checked_mul(PRIMES[i] as i128).ok_or(Error::Overflow)?;
            }
        }
        if negative {
            num = -num;
        }
        let two = exps[0];
        let w = if two >= 0 {
            Dyadic::new(num, 0).scale_pow2(two).ok_or(Error::Overflow)?
        } else {
            Dyadic::new(num, (-two) as u32)
        };
        coeffs[(a + r) as usize] = w;
    }
    IndexedFilter::new(-r, coeffs)
}

/// Completes a bank from an interpolating mask `h`.
pub fn derive_bank(h: IndexedFilter) -> Result<FilterBank> {
    let (lo, hi) = h.support();
    for k in lo..=hi {
        if k % 2 == 0 {
            let want = if k == 0 { Dyadic::ONE } else { Dyadic::ZERO };
            if h.get(k) != want {
                return Err(Error::InvalidFilterAt { index: k, reason: "even coefficient must equal δ_{k,0}" });
            }
        }
    }
    if h.get(0) != Dyadic::ONE {
        return Err(Error::InvalidFilterAt { index: 0, reason: "h_0 must equal 1" });
    }
    if h.sum() != Dyadic::from_int(2) {
        return Err(Error::InvalidFilter("coefficients must sum to 2"));
    }
    let pairs: Vec<(i64, Dyadic)> = h
        .iter()
        .map(|(m, c)| {
            let k = 1 - m;
            // (-1)^(k-1) = (-1)^m
            (k, if m.rem_euclid(2) == 0 { c } else { -c })
        })
        .collect();
    let gdual = IndexedFilter::from_pairs(&pairs)?;
    Ok(FilterBank { order: 0, h, g: IndexedFilter::unit(1), hdual: IndexedFilter::unit(0), gdual })
}

/// Outcome of one validation check.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckStatus {
    Pass,
    Fail,
    Warn,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub status: CheckStatus,
    pub detail: String,
}

/// Validation report for a user-supplied mask.
#[derive(Clone, Debug, PartialEq)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    /// True when no check failed (warnings allowed).
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != CheckStatus::Fail)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Gate for user-supplied masks: even-index cardinality, unit sum two,
/// symmetry (warning only), finite support.
pub fn custom_bank_validate(h: &IndexedFilter) -> ValidationReport {
    let (lo, hi) = h.support();
    let mut checks = Vec::new();

    let bad_even = (lo..=hi).find(|&k| k % 2 == 0 && h.get(k) != if k == 0 { Dyadic::ONE } else { Dyadic::ZERO });
    checks.push(match bad_even {
        None => Check { name: "even-cardinality", status: CheckStatus::Pass, detail: "h_{2k} = δ_{k,0}".into() },
        Some(k) => Check { name: "even-cardinality", status: CheckStatus::Fail, detail: format!("h_{k} = {}", h.get(k)) },
    });

    let s = h.sum();
    checks.push(Check {
        name: "sum",
        status: if s == Dyadic::from_int(2) { CheckStatus::Pass } else { CheckStatus::Fail },
        detail: format!("sum = {s} ({})", s.to_f64()),
    });

    let asym = (lo..=hi).find(|&k| h.get(k) != h.get(-k));
    checks.push(match asym {
        None => Check { name: "symmetry", status: CheckStatus::Pass, detail: "h_k = h_{-k}".into() },
        Some(k) => Check { name: "symmetry", status: CheckStatus::Warn, detail: format!("h_{k} != h_{}", -k) },
    });

    checks.push(Check {
        name: "finite-support",
        status: CheckStatus::Pass,
        detail: format!("support [{lo}, {hi}]"),
    });
    ValidationReport { checks }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(n: i128, e: u32) -> Dyadic {
        Dyadic::new(n, e)
    }

    #[test]
    fn dd1_is_the_hat_mask() {
        let h = dd_scaling_filter(1).unwrap();
        assert_eq!(h.support(), (-1, 1));
        assert_eq!(h.get(-1), d(1, 1));
        assert_eq!(h.get(0), Dyadic::ONE);
        assert_eq!(h.get(1), d(1, 1));
    }

    #[test]
    fn order_out_of_range() {
        assert_eq!(dd_scaling_filter(0), Err(Error::OrderUnsupported(0)));
        assert_eq!(dd_scaling_filter(17), Err(Error::OrderUnsupported(17)));
    }

    #[test]
    fn every_order_up_to_16_builds() {
        for l in 1..=MAX_DD_ORDER {
            let bank = FilterBank::deslauriers_dubuc(l).unwrap();
            assert_eq!(bank.support_radius(), 2 * l as i64 - 1);
            assert_eq!(bank.h().sum(), Dyadic::from_int(2));
            assert_eq!(bank.order(), l);
        }
    }

    #[test]
    fn dd1_dual_wavelet_filter() {
        let bank = FilterBank::deslauriers_dubuc(1).unwrap();
        let gd = bank.gdual();
        assert_eq!(gd.support(), (0, 2));
        assert_eq!(gd.get(0), d(-1, 1));
        assert_eq!(gd.get(1), Dyadic::ONE);
        assert_eq!(gd.get(2), d(-1, 1));
        assert_eq!(bank.g().support(), (1, 1));
        assert_eq!(bank.g().get(1), Dyadic::ONE);
    }

    #[test]
    fn derive_rejects_bad_even_entry() {
        let mut c = dd_scaling_filter(2).unwrap().coeffs().to_vec();
        c[3 + 2] = d(1, 3);
        let h = IndexedFilter::new(-3, c).unwrap();
        assert!(matches!(derive_bank(h), Err(Error::InvalidFilterAt { index: 2, .. })));
    }

    #[test]
    fn derive_rejects_bad_sum() {
        let h = dd_scaling_filter(2).unwrap();
        let pairs: Vec<_> = h.iter().map(|(k, c)| (k, if k == 0 { c } else { c * d(1, 1) })).collect();
        let h = IndexedFilter::from_pairs(&pairs).unwrap();
        assert_eq!(derive_bank(h), Err(Error::InvalidFilter("coefficients must sum to 2")));
    }

    #[test]
    fn validation_report_cases() {
        let h = dd_scaling_filter(2).unwrap();
        let rep = custom_bank_validate(&h);
        assert!(rep.passed());
        assert!(rep.checks.iter().all(|c| c.status == CheckStatus::Pass));

        let mut pairs: Vec<_> = h.iter().collect();
        pairs.push((2, Dyadic::from_f64_exact(0.1).unwrap()));
        let rep = custom_bank_validate(&IndexedFilter::from_pairs(&pairs).unwrap());
        let c = rep.check("even-cardinality").unwrap();
        assert_eq!(c.status, CheckStatus::Fail);
        assert!(c.detail.starts_with("h_2"));

        let scaled = h.scaled(Dyadic::from_f64_exact(0.9).unwrap()).unwrap();
        let rep = custom_bank_validate(&scaled);
        let sum = rep.check("sum").unwrap();
        assert_eq!(sum.status, CheckStatus::Fail);
        assert!(sum.detail.contains("(1.8"), "{}", sum.detail);
    }

    #[test]
    fn asymmetric_mask_only_warns_symmetry() {
        let h = IndexedFilter::from_pairs(&[(-1, d(3, 2)), (0, Dyadic::ONE), (1, d(1, 1)), (3, d(-1, 2))]).unwrap();
        let rep = custom_bank_validate(&h);
        assert_eq!(rep.check("symmetry").unwrap().status, CheckStatus::Warn);
        assert!(rep.passed());
    }

    #[test]
    fn text_format() {
        let bank = FilterBank::deslauriers_dubuc(1).unwrap();
        let text = bank.to_text();
        assert_eq!(text, "h: -1:1/2 0:1 1:1/2\ng: 1:1\nhd: 0:1\ngd: 0:-1/2 1:1 2:-1/2\n");
        let back = FilterBank::from_text(&text).unwrap();
        assert_eq!(back, bank);
        assert_eq!(back.id(), "dd1");
        let only_h = FilterBank::from_text("h -1:1/2 0:1/1 1:1/2").unwrap();
        assert_eq!(only_h, bank);
        assert!(FilterBank::from_text("h: 0:1\ng: 1:1\nhd: 0:1\ngd: 1:2\n").is_err());
    }
}
