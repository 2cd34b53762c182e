use imra_core::dyadic::Dyadic;
use imra_core::filters::{custom_bank_validate, derive_bank, dd_scaling_filter, CheckStatus, FilterBank, IndexedFilter};
use imra_core::scaling::{
    cover_number, polynomial_reproduction_check, refine_scaling, refine_scaling_exact, refine_wavelet, refine_wavelet_exact, tensor_point_eval,
    verify_refinement_exact, ScalingEvaluator,
};
use imra_core::tensor::Orientation;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn to_rat(d: Dyadic) -> BigRational {
    BigRational::new(BigInt::from(d.numerator()), BigInt::from(d.denominator()))
}

/// Lagrange weights at 0 for nodes ±1, ±3, ..., ±(2L-1).
fn lagrange_oracle(l: i64) -> Vec<(i64, BigRational)> {
    let nodes: Vec<i64> = (1..=l).flat_map(|j| [-(2 * j - 1), 2 * j - 1]).collect();
    nodes
        .iter()
        .map(|&xi| {
            let mut w = BigRational::one();
            for &xj in &nodes {
                if xj != xi {
                    w *= rat(-xj, xi - xj);
                }
            }
            (xi, w)
        })
        .collect()
}

#[test]
fn dd_masks_match_lagrange_oracle() {
    for l in 1..=16i64 {
        let h = dd_scaling_filter(l as u32).unwrap();
        assert_eq!(h.support(), (-(2 * l - 1), 2 * l - 1));
        assert_eq!(h.get(0), Dyadic::ONE);
        for k in (-(2 * l - 1)..=2 * l - 1).filter(|k| k % 2 == 0 && *k != 0) {
            assert!(h.get(k).is_zero());
        }
        for (k, w) in lagrange_oracle(l) {
            assert_eq!(to_rat(h.get(k)), w, "L={l} k={k}");
        }
    }
}

#[test]
fn dd_worked_values() {
    let h2 = dd_scaling_filter(2).unwrap();
    assert_eq!(h2.get(1), Dyadic::parse("9/16").unwrap());
    assert_eq!(h2.get(-3), Dyadic::parse("-1/16").unwrap());
    let h3 = dd_scaling_filter(3).unwrap();
    assert_eq!(h3.get(-1), Dyadic::parse("150/256").unwrap());
    assert_eq!(h3.get(3), Dyadic::parse("-25/256").unwrap());
    assert_eq!(h3.get(-5), Dyadic::parse("3/256").unwrap());
}

#[test]
fn derived_dual_wavelet_filter_dd2() {
    let bank = FilterBank::deslauriers_dubuc(2).unwrap();
    let gd = bank.gdual();
    let expect = [(-2, "1/16"), (0, "-9/16"), (1, "1"), (2, "-9/16"), (4, "1/16")];
    for (k, v) in expect {
        assert_eq!(gd.get(k), Dyadic::parse(v).unwrap(), "k={k}");
    }
    assert_eq!(gd.iter().count(), 5);
}

#[test]
fn bank_invariants_orders_1_to_8() {
    for l in 1..=8 {
        let bank = derive_bank(dd_scaling_filter(l).unwrap()).unwrap();
        let h = bank.h();
        let (lo, hi) = h.support();
        for k in lo..=hi {
            if k % 2 == 0 {
                assert_eq!(h.get(k), if k == 0 { Dyadic::ONE } else { Dyadic::ZERO });
            }
            // g̃_k = (-1)^{k-1} h_{1-k}, reindexed as g̃_{1-k}
            let m = 1 - k;
            let sign = if (m - 1).rem_euclid(2) == 0 { Dyadic::ONE } else { -Dyadic::ONE };
            assert_eq!(bank.gdual().get(m), sign * h.get(k));
        }
        assert_eq!(h.sum(), Dyadic::from_int(2));
        assert_eq!(bank.g(), &IndexedFilter::unit(1));
        assert_eq!(bank.hdual(), &IndexedFilter::unit(0));
        let (a, b) = bank.gdual().support();
        assert_eq!((a, b), (1 - hi, 1 - lo));
        assert_eq!(bank.gdual().coeffs().len(), h.coeffs().len());
    }
}

#[test]
fn one_d_duality_hand_expansion() {
    // Σ_s Σ_z g̃^{(s)}_{λ-2z} g^{(s)}_{μ-2z} for DD1, λ = 0
    let bank = FilterBank::deslauriers_dubuc(1).unwrap();
    let inner = |lambda: i64, mu: i64| -> BigRational {
        let mut acc = BigRational::zero();
        for s in 0..=1u8 {
            for z in -10..=10 {
                acc += to_rat(bank.dual(s).get(lambda - 2 * z)) * to_rat(bank.primal(s).get(mu - 2 * z));
            }
        }
        acc
    };
    assert_eq!(inner(0, 0), BigRational::one());
    assert_eq!(inner(0, 1), BigRational::zero());
    assert_eq!(to_rat(bank.h().get(1)) + to_rat(bank.gdual().get(0)), BigRational::zero());
}

#[test]
fn validation_reports() {
    let h = dd_scaling_filter(2).unwrap();
    assert!(custom_bank_validate(&h).checks.iter().all(|c| c.status == CheckStatus::Pass));
    let bad: Vec<_> = h.iter().chain([(2, Dyadic::from_f64_exact(0.1).unwrap())]).collect();
    let rep = custom_bank_validate(&IndexedFilter::from_pairs(&bad).unwrap());
    assert_eq!(rep.check("even-cardinality").unwrap().status, CheckStatus::Fail);
    let scaled = h.scaled(Dyadic::from_f64_exact(0.9).unwrap()).unwrap();
    assert_eq!(custom_bank_validate(&scaled).check("sum").unwrap().status, CheckStatus::Fail);
}

proptest! {
    #[test]
    fn text_roundtrip_is_exact(l in 1u32..=16) {
        let bank = FilterBank::deslauriers_dubuc(l).unwrap();
        let back = FilterBank::from_text(&bank.to_text()).unwrap();
        prop_assert_eq!(back.to_text(), bank.to_text());
        prop_assert_eq!(back, bank);
    }

    #[test]
    fn dyadic_add_mul_match_rationals(a in -1_000_000i64..1_000_000, ea in 0u32..30, b in -1_000_000i64..1_000_000, eb in 0u32..30) {
        let x = Dyadic::new(a as i128, ea);
        let y = Dyadic::new(b as i128, eb);
        prop_assert_eq!(to_rat(x + y), to_rat(x) + to_rat(y));
        prop_assert_eq!(to_rat(x * y), to_rat(x) * to_rat(y));
        prop_assert_eq!(x.cmp(&y), to_rat(x).cmp(&to_rat(y)));
        prop_assert_eq!(Dyadic::parse(&x.to_string()).unwrap(), x);
    }

    #[test]
    fn binary64_view_agrees(l in 1u32..=16) {
        let h = dd_scaling_filter(l).unwrap();
        for (k, c) in h.iter() {
            let f = h.get_f64(k);
            let err = (BigRational::from_float(f).unwrap() - to_rat(c)).abs();
            let ulp = BigRational::from_float(f.abs() * f64::EPSILON).unwrap();
            prop_assert!(err <= ulp);
        }
    }
}

#[test]
fn refinement_examples() {
    let b1 = FilterBank::deslauriers_dubuc(1).unwrap();
    let t = refine_scaling(&b1, 1).unwrap();
    assert_eq!((t.get(-1), t.get(0), t.get(1)), (0.5, 1.0, 0.5));
    let b2 = FilterBank::deslauriers_dubuc(2).unwrap();
    let t = refine_scaling_exact(&b2, 1).unwrap();
    assert_eq!(t.get(1), Dyadic::parse("9/16").unwrap());
    assert_eq!(t.get(-3), Dyadic::parse("-1/16").unwrap());
    let w = refine_wavelet(&b1, 1).unwrap();
    assert_eq!(w.get(1), 1.0);
    let w = refine_wavelet_exact(&b2, 2).unwrap();
    assert_eq!(w.get(1), Dyadic::parse("9/16").unwrap());
    assert!(refine_wavelet(&b1, 0).is_err());
    assert!(refine_scaling(&b1, 25).is_err());
}

#[test]
fn interpolation_and_refinement_exact() {
    for l in 1..=4 {
        let bank = FilterBank::deslauriers_dubuc(l).unwrap();
        let t0 = refine_scaling_exact(&bank, 0).unwrap();
        for k in t0.lo..=t0.hi {
            assert_eq!(t0.get(k), if k == 0 { Dyadic::ONE } else { Dyadic::ZERO });
        }
        for r in 0..=6 {
            assert_eq!(verify_refinement_exact(&bank, r).unwrap(), None, "L={l} r={r}");
            let t = refine_scaling_exact(&bank, r).unwrap();
            for k in (t.lo >> r)..=(t.hi >> r) {
                assert_eq!(t.get(k << r), if k == 0 { Dyadic::ONE } else { Dyadic::ZERO });
            }
        }
        // ψ(k + 1/2) = δ_{k,0}
        let w = refine_wavelet_exact(&bank, 3).unwrap();
        for k in -8..=8i64 {
            let x = Dyadic::new((2 * k + 1) as i128, 1);
            assert_eq!(w.at(x).unwrap(), if k == 0 { Dyadic::ONE } else { Dyadic::ZERO });
        }
    }
}

#[test]
fn partition_of_unity_exact() {
    for l in 1..=3 {
        let bank = FilterBank::deslauriers_dubuc(l).unwrap();
        let t = refine_scaling_exact(&bank, 5).unwrap();
        let step = 1i64 << 5;
        for m in 0..step {
            // Σ_λ φ(m/32 - λ)
            let s: Dyadic = (-8..=8).map(|lam| t.get(m - lam * step)).sum();
            assert_eq!(s, Dyadic::ONE, "L={l} m={m}");
        }
    }
    // n-dimensional sums factor, check n=2 directly at a few points
    let bank = FilterBank::deslauriers_dubuc(2).unwrap();
    let t = refine_scaling_exact(&bank, 5).unwrap();
    for (a, b) in [(3i64, 17i64), (0, 31), (12, 12)] {
        let mut s = Dyadic::ZERO;
        for l0 in -4..=4i64 {
            for l1 in -4..=4i64 {
                s = s + t.get(a - 32 * l0) * t.get(b - 32 * l1);
            }
        }
        assert_eq!(s, Dyadic::ONE);
    }
}

#[test]
fn tensor_point_examples() {
    let b2 = FilterBank::deslauriers_dubuc(2).unwrap();
    let e = ScalingEvaluator::new(&b2, 4).unwrap();
    let s00 = Orientation::parse("00").unwrap();
    assert_eq!(tensor_point_eval(&e, &s00, 0, &[0, 0], &[Dyadic::ZERO, Dyadic::ZERO]).unwrap(), 1.0);
    let s10 = Orientation::parse("10").unwrap();
    assert_eq!(tensor_point_eval(&e, &s10, 0, &[0, 0], &[Dyadic::new(1, 1), Dyadic::ZERO]).unwrap(), 1.0);
    let b1 = FilterBank::deslauriers_dubuc(1).unwrap();
    let e1 = ScalingEvaluator::new(&b1, 2).unwrap();
    let half = Dyadic::new(1, 1);
    assert_eq!(tensor_point_eval(&e1, &s00, 0, &[0, 0], &[half, half]).unwrap(), 0.25);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]
    #[test]
    fn tensor_eval_factorises(
        n in 1usize..=3, sidx in 0usize..8, j in 0i32..=2,
        lam in proptest::collection::vec(-3i64..=3, 3),
        xs in proptest::collection::vec(-200i128..=200, 3),
    ) {
        let bank = FilterBank::deslauriers_dubuc(2).unwrap();
        let e = ScalingEvaluator::new(&bank, 4).unwrap();
        let phi = refine_scaling_exact(&bank, 4).unwrap();
        let psi = refine_wavelet_exact(&bank, 4).unwrap();
        let s = Orientation::new(n, sidx % (1 << n)).unwrap();
        let x: Vec<Dyadic> = xs[..n].iter().map(|&v| Dyadic::new(v, (4 - j) as u32)).collect();
        let got = tensor_point_eval(&e, &s, j, &lam[..n], &x).unwrap();
        let mut exact = Dyadic::ONE;
        for l in 0..n {
            let y = x[l].scale_pow2(j).unwrap() - Dyadic::from_int(lam[l]);
            let v = if s.bit(l) == 0 { phi.at(y).unwrap() } else { psi.at(y).unwrap() };
            exact = exact * v;
        }
        prop_assert_eq!(got, exact.to_f64());
    }
}

#[test]
fn cover_number_matches_brute_force() {
    for l in 1..=4u32 {
        let bank = FilterBank::deslauriers_dubuc(l).unwrap();
        let t = refine_scaling(&bank, 6).unwrap();
        let step = 64i64;
        let mut best = 0;
        for m in 0..step {
            let c = (-20..=20i64).filter(|lam| t.get(m - lam * step) != 0.0).count();
            best = best.max(c);
        }
        // at integers only one translate survives
        assert_eq!((-20..=20i64).filter(|lam| t.get(-lam * step) != 0.0).count(), 1);
        let c1 = cover_number(&bank, 1).unwrap();
        assert_eq!(c1.value(), best as u64, "L={l}");
        assert!(c1.confirmed());
        assert_eq!(cover_number(&bank, 2).unwrap().value(), (best * best) as u64);
    }
    let b1 = FilterBank::deslauriers_dubuc(1).unwrap();
    assert_eq!(cover_number(&b1, 1).unwrap().value(), 2);
    assert_eq!(cover_number(&b1, 2).unwrap().value(), 4);
}

#[test]
fn polynomial_reproduction_examples() {
    let b1 = FilterBank::deslauriers_dubuc(1).unwrap();
    assert_eq!(polynomial_reproduction_check(&b1, 0, (-2, 2), 4).unwrap(), 0.0);
    assert!(polynomial_reproduction_check(&b1, 2, (-2, 2), 4).unwrap() > 0.01);
    let b2 = FilterBank::deslauriers_dubuc(2).unwrap();
    assert!(polynomial_reproduction_check(&b2, 3, (-2, 2), 6).unwrap() < 1e-12);
}
