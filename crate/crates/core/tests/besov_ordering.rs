use imra_core::besov::{
    coeff_norm, equivalence_probe, geometric_tail_probe, holder_estimate, lp_norm, modulus_of_continuity, projection_error_check,
    lattice_lp, unconditionality_probe, wavelet_norm, BesovParams,
};
use imra_core::dyadic::Dyadic;
use imra_core::filters::FilterBank;
use imra_core::grid::{sample_grid, GridFunction, IndexBox};
use imra_core::ordering::{cube_ordering_iter, plane_ordering, shell_len, verify_ordering, verify_sequence, ShellCache};
use imra_core::transform::{decompose, reconstruct, subdivide, WaveletPyramid};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn dd(l: u32) -> FilterBank {
    FilterBank::deslauriers_dubuc(l).unwrap()
}

fn random_pyramid(rng: &mut ChaCha8Rng, n: usize) -> WaveletPyramid {
    let bank = dd(2);
    let b = IndexBox::cube(n, 0, 16).unwrap();
    let v = (0..b.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
    decompose(&bank, &GridFunction::new(4, b, v).unwrap(), 1).unwrap()
}

fn all_coeffs(p: &WaveletPyramid) -> Vec<f64> {
    let mut out: Vec<f64> = p.coarse.values().to_vec();
    for l in &p.levels {
        for c in &l.channels {
            out.extend_from_slice(c.values());
        }
    }
    out
}

#[test]
fn homogeneity_and_triangle_inequality() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let params = [
        BesovParams::new(1.5, 2.0, 1.0, 1).unwrap(),
        BesovParams::new(0.7, 1.0, f64::INFINITY, 1).unwrap(),
        BesovParams::new(2.0, f64::INFINITY, 2.0, 1).unwrap(),
    ];
    for i in 0..100 {
        let n = 1 + i % 2;
        let a = random_pyramid(&mut rng, n);
        let b = random_pyramid(&mut rng, n);
        let lam = rng.random_range(-3.0..3.0);
        let pr = &params[i % 3];
        let na = coeff_norm(&a, pr).unwrap().total;
        let nb = coeff_norm(&b, pr).unwrap().total;
        let nla = coeff_norm(&a.lin_comb(lam, &a, 0.0).unwrap(), pr).unwrap().total;
        assert!((nla - lam.abs() * na).abs() <= 1e-9 * (1.0 + na));
        let nab = coeff_norm(&a.lin_comb(1.0, &b, 1.0).unwrap(), pr).unwrap().total;
        assert!(nab <= na + nb + 1e-9);
    }
}

#[test]
fn monotone_under_domination() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let pr = BesovParams::new(1.2, 2.0, 3.0, 1).unwrap();
    for _ in 0..20 {
        let a = random_pyramid(&mut rng, 2);
        let shrink: Vec<f64> = (0..all_coeffs(&a).len()).map(|_| rng.random_range(-1.0..=1.0)).collect();
        let mut k = 0;
        let b = a.map_coeffs(|v| {
            k += 1;
            v * shrink[k - 1]
        });
        assert!(coeff_norm(&b, &pr).unwrap().total <= coeff_norm(&a, &pr).unwrap().total + 1e-12);
    }
}

#[test]
fn sup_norm_formula() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let a = random_pyramid(&mut rng, 2);
    let sigma = 1.3;
    let r = coeff_norm(&a, &BesovParams::new(sigma, f64::INFINITY, f64::INFINITY, 1).unwrap()).unwrap();
    let coarse = a.coarse.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut levels: f64 = 0.0;
    for l in &a.levels {
        let m = l.channels.iter().flat_map(|c| c.values()).fold(0.0f64, |m, v| m.max(v.abs()));
        levels = levels.max(libm::exp2(sigma * l.level as f64) * m);
    }
    assert_eq!(r.coarse_term, coarse);
    assert_eq!(r.aggregate, levels);
    assert_eq!(r.total, coarse + levels);
}

#[test]
fn single_coefficient_values() {
    let bank = dd(1);
    let b = IndexBox::new(vec![0], vec![32]).unwrap();
    let zero = decompose(&bank, &GridFunction::zeros(5, b).unwrap(), 0).unwrap();
    for (j, sigma, p, q, n_over) in [(2, 1.5, 2.0, 1.0, 0.5), (4, 0.8, 1.0, 2.0, 1.0), (3, 2.5, f64::INFINITY, 1.0, 0.0)] {
        let mut k = 0usize;
        let target = zero.coarse.values().len() + zero.levels.iter().take_while(|l| l.level < j).map(|l| l.channels[0].values().len()).sum::<usize>() + 1;
        let pyr = zero.map_coeffs(|_| {
            k += 1;
            if k == target { 1.0 } else { 0.0 }
        });
        let r = coeff_norm(&pyr, &BesovParams::new(sigma, p, q, 0).unwrap()).unwrap();
        let want = libm::exp2((sigma - n_over) * j as f64);
        assert!((r.total - want).abs() <= 1e-12 * want, "{} {}", r.total, want);
    }
    assert_eq!(coeff_norm(&zero, &BesovParams::new(1.0, 2.0, 2.0, 0).unwrap()).unwrap().total, 0.0);
}

#[test]
fn lp_norm_matches_direct_sum() {
    let v = [3.0, -4.0, 0.0];
    assert!((lp_norm(v.iter().copied(), 2.0) - 5.0).abs() < 1e-15);
    assert_eq!(lp_norm(v.iter().copied(), 1.0), 7.0);
    assert_eq!(lp_norm(v.iter().copied(), f64::INFINITY), 4.0);
}

#[test]
fn wavelet_norm_without_details_is_projection_norm() {
    let bank = dd(2);
    let b = IndexBox::cube(2, -8, 8).unwrap();
    let g = sample_grid(|x| libm::exp(-(x[0] * x[0] + x[1] * x[1])), 4, &b).unwrap();
    let pyr = decompose(&bank, &g, 2).unwrap().without_details_from(2);
    for p in [1.0, 2.0, f64::INFINITY] {
        let pr = BesovParams::new(1.0, p, 1.0, 2).unwrap();
        let r = wavelet_norm(&bank, &pyr, &pr, 0).unwrap();
        let p0 = subdivide(&bank, &pyr.coarse, 1).unwrap();
        assert_eq!(r.coarse_term, lattice_lp(&p0, p));
        assert!(r.level_terms.iter().all(|t| t.1 == 0.0));
        assert_eq!(r.total, r.coarse_term);
    }
}

fn power_grid(alpha: f64, level: i32) -> GridFunction {
    let s = 1 << level;
    let b = IndexBox::new(vec![-s], vec![s]).unwrap();
    sample_grid(|x| libm::pow(libm::fabs(x[0]), alpha), level, &b).unwrap()
}

#[test]
fn holder_exponent_recovered() {
    for (alpha, l) in [(0.5, 2), (1.0, 2), (0.5, 1), (1.0, 3)] {
        let g = power_grid(alpha, 10);
        let est = holder_estimate(&dd(l), &g, 3).unwrap();
        assert!(est.points.len() >= 5);
        let a = est.exponent.unwrap();
        assert!((a - alpha).abs() <= 0.1, "alpha={alpha} L={l} got {a}");
    }
}

#[test]
fn holder_flags_smooth_input() {
    let b = IndexBox::new(vec![-64], vec![64]).unwrap();
    let g = sample_grid(|x| 2.0 * x[0] + 1.0, 6, &b).unwrap();
    let est = holder_estimate(&dd(1), &g, 1).unwrap();
    assert!(est.infinite_smoothness);
    assert!(est.exponent.is_none());
    assert!(holder_estimate(&dd(1), &g, 4).is_err());
}

#[test]
fn modulus_examples() {
    let b = IndexBox::new(vec![0], vec![16]).unwrap();
    let g = sample_grid(|x| x[0], 3, &b).unwrap();
    assert_eq!(modulus_of_continuity(&g, 0.25).unwrap(), 0.25);
    let c = sample_grid(|_| 4.0, 3, &b).unwrap();
    assert_eq!(modulus_of_continuity(&c, 1.0).unwrap(), 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn modulus_is_monotone(vals in proptest::collection::vec(-5.0f64..5.0, 49), t1 in 0.0f64..2.0, dt in 0.0f64..2.0) {
        let g = GridFunction::new(2, IndexBox::cube(2, 0, 6).unwrap(), vals).unwrap();
        prop_assert!(modulus_of_continuity(&g, t1).unwrap() <= modulus_of_continuity(&g, t1 + dt).unwrap());
    }
}

fn sin_window(x: &[f64]) -> f64 {
    x.iter().map(|&t| libm::sin(t) * libm::exp(-t * t / 8.0)).product()
}

fn gaussian(x: &[f64]) -> f64 {
    libm::exp(-x.iter().map(|t| t * t).sum::<f64>())
}

#[test]
fn projection_bound_holds() {
    for l in [1, 2] {
        for f in [&sin_window as &dyn Fn(&[f64]) -> f64, &gaussian] {
            let r = projection_error_check(&dd(l), f, 1, (-3.0, 3.0), 0..=5, 8).unwrap();
            assert!(r.all_pass(), "L={l}: {:?}", r.rows);
            assert!(r.monotone);
            assert!(r.rows.last().unwrap().measured < 1e-3);
        }
    }
}

#[test]
fn projection_bound_holds_2d() {
    let r = projection_error_check(&dd(1), &gaussian, 2, (-1.5, 1.5), 0..=3, 5).unwrap();
    assert!(r.all_pass(), "{:?}", r.rows);
    assert!(r.monotone);
}

#[test]
fn projection_of_constant_and_phi() {
    let r = projection_error_check(&dd(1), &|_| 1.5, 1, (-2.0, 2.0), 0..=3, 6).unwrap();
    assert!(r.rows.iter().all(|row| row.measured == 0.0));
    let r = projection_error_check(&dd(1), &|x| (1.0 - libm::fabs(x[0])).max(0.0), 1, (-2.0, 2.0), 0..=0, 6).unwrap();
    assert!(r.rows[0].measured < 1e-15);
}

// off-lattice centre and radius, so no sample sits at the peak
fn bump(x: &[f64]) -> f64 {
    let r2: f64 = x.iter().map(|t| (t - 0.3) * (t - 0.3)).sum::<f64>() / (1.3 * 1.3);
    if r2 < 1.0 {
        libm::exp(1.0 - 1.0 / (1.0 - r2))
    } else {
        0.0
    }
}

#[test]
fn norm_equivalence_is_stable() {
    let pr = BesovParams::new(1.2, f64::INFINITY, f64::INFINITY, 0).unwrap();
    for (n, res) in [(1, [4, 5, 6, 7]), (2, [3, 4, 5, 6])] {
        let r = equivalence_probe(&dd(2), &bump, n, (-2.0, 2.0), &pr, &res, 3).unwrap();
        let spread = r.spread.unwrap();
        assert!(spread < 4.0, "n={n} {spread} {:?}", r.rows);
    }
}

#[test]
fn unconditionality_at_probe_points() {
    let bank = dd(2);
    let b = IndexBox::cube(2, -12, 12).unwrap();
    let g = sample_grid(|x| libm::sin(x[0]) * libm::cos(2.0 * x[1]), 3, &b).unwrap();
    let pyr = decompose(&bank, &g, 0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let points: Vec<Vec<Dyadic>> = (0..50)
        .map(|i| {
            let e = if i % 2 == 0 { 3 } else { 5 };
            (0..2).map(|_| Dyadic::new(rng.random_range(-10i128 << e..=10i128 << e) / 8, e)).collect()
        })
        .collect();
    let r = unconditionality_probe(&bank, &pyr, 20, &points, &mut rng).unwrap();
    assert!(r.max_deviation() < 1e-9);
    assert!(r.abs_dominates());
    let recon = reconstruct(&bank, &pyr).unwrap();
    let mut on_lattice = 0;
    for p in &r.points {
        assert!(p.abs_sum.is_finite());
        if let Some(d) = p.reconstruction_deviation {
            on_lattice += 1;
            assert!(d < 1e-9);
        }
    }
    assert!(on_lattice >= 25);
    assert_eq!(recon.level(), 3);
}

#[test]
fn geometric_tail_is_cauchy() {
    for l in [1, 2, 3] {
        let r = geometric_tail_probe(&dd(l), 0.75, 20, Dyadic::new(5, 7)).unwrap();
        assert!(r.pass(), "{}", r.worst_ratio);
        assert_eq!(r.partial_sums.len(), 21);
    }
}

fn spiral(count: usize) -> Vec<(i64, i64)> {
    // turtle walk around each ring, from just right of its bottom-left corner back to it
    let mut out = vec![(0, 0)];
    let mut m = 0i64;
    while out.len() < count {
        let mut p = (-m - 1, -m - 1);
        for (dx, dy, steps) in [(1, 0, 2 * m + 2), (0, 1, 2 * m + 2), (-1, 0, 2 * m + 2), (0, -1, 2 * m + 2)] {
            for _ in 0..steps {
                p = (p.0 + dx, p.1 + dy);
                out.push(p);
            }
        }
        m += 1;
    }
    out.truncate(count);
    out
}

#[test]
fn plane_ordering_matches_turtle() {
    let s = spiral(10_000);
    for (k, &p) in s.iter().enumerate() {
        assert_eq!(plane_ordering(k as u64), p, "k={k}");
    }
}

#[test]
fn verify_acceptance_cases() {
    for (n, k) in [(1, 100), (2, 20), (3, 6), (4, 3)] {
        let r = verify_ordering(n, k).unwrap();
        assert!(r.passed(), "n={n}: {:?}", r.first_violation);
        assert!(r.bijection && r.shell_monotone);
        assert_eq!(r.neighbours.is_some(), n >= 2);
    }
}

#[test]
fn shells_have_expected_shape() {
    let mut cache = ShellCache::new();
    for n in 2..=4 {
        for k in 0..3 {
            let sh = cache.shell(n, k).unwrap().to_vec();
            assert_eq!(sh.len() as u64, shell_len(n, k as u64) * n as u64);
            for p in sh.chunks(n) {
                assert_eq!(p.iter().map(|v| v.abs()).max().unwrap(), k as i64 + 1);
            }
            assert!(sh[sh.len() - n..].iter().all(|&v| v == -(k as i64) - 1));
        }
    }
    let s3 = cache.shell(3, 0).unwrap();
    assert_eq!(&s3[s3.len() - 3..], &[-1, -1, -1]);
}

#[test]
fn ordering_is_deterministic_and_checked() {
    let a: Vec<Vec<i64>> = cube_ordering_iter(3).unwrap().take(500).collect();
    let b: Vec<Vec<i64>> = cube_ordering_iter(3).unwrap().take(500).collect();
    assert_eq!(a, b);
    let mut bad: Vec<Vec<i64>> = cube_ordering_iter(2).unwrap().take(25).collect();
    bad.swap(3, 7);
    assert!(!verify_sequence(2, 2, bad).unwrap().passed());
}
