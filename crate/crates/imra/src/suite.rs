//! The identity suite behind `imra verify`. Every check is independent, so
//! they run in parallel; results come back in a fixed order.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use imra_core::besov::{
    coeff_norm, equivalence_probe, geometric_tail_probe, holder_estimate, projection_error_check, unconditionality_probe, BesovParams,
};
use imra_core::dyadic::Dyadic;
use imra_core::filters::{custom_bank_validate, FilterBank};
use imra_core::grid::{sample_grid, GridFunction, IndexBox};
use imra_core::ordering::verify_ordering;
use imra_core::scaling::{polynomial_reproduction_check, refine_scaling_exact, verify_refinement_exact};
use imra_core::tensor::{biorthogonality_check, detail_orientations, filter_duality_check, orientations};
use imra_core::transform::{
    analyze_level, decompose, interior_box, interior_detail_box, project_eval, reconstruct, synthesize_channels, threshold,
    threshold_error_bound, WaveletPyramid,
};

use crate::io::{decode_grid, encode_grid};
use crate::pyramid::{read_pyramid, write_pyramid};
use crate::Result;

pub const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Clone, Debug)]
pub struct SuiteConfig {
    /// Dimensions for grid checks; orderings also run `n = 4` when no
    /// dimension was requested.
    pub dims: Vec<usize>,
    pub dim_given: bool,
    /// Orders for exact filter-level checks.
    pub filter_orders: Vec<u32>,
    /// Orders for floating-point grid checks.
    pub grid_orders: Vec<u32>,
    pub seed: u64,
}

impl SuiteConfig {
    pub fn new(dim: Option<usize>, order: Option<u32>, seed: u64) -> Self {
        SuiteConfig {
            dims: dim.map_or(vec![1, 2, 3], |n| vec![n]),
            dim_given: dim.is_some(),
            filter_orders: order.map_or(vec![1, 2, 3, 4], |l| vec![l]),
            grid_orders: order.map_or(vec![1, 2], |l| vec![l]),
            seed,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}  {}  {}", if self.pass { "PASS" } else { "FAIL" }, self.name, self.detail)
    }
}

type Check = Box<dyn Fn() -> Result<(bool, String)> + Send + Sync>;

fn dd(l: u32) -> Result<FilterBank> {
    Ok(FilterBank::deslauriers_dubuc(l)?)
}

fn rng_for(seed: u64, tag: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ tag.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

fn random_grid(rng: &mut ChaCha8Rng, n: usize, level: i32, side: i64) -> Result<GridFunction> {
    let b = IndexBox::cube(n, 0, side - 1)?;
    let v = (0..b.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
    Ok(GridFunction::new(level, b, v)?)
}

fn side_for(n: usize) -> i64 {
    match n {
        1 => 65,
        2 => 33,
        3 => 17,
        _ => 9,
    }
}

/// Builds the check list for `cfg`.
pub fn checks(cfg: &SuiteConfig) -> Vec<(String, Check)> {
    let mut out: Vec<(String, Check)> = Vec::new();
    let seed = cfg.seed;

    for &l in &cfg.filter_orders {
        out.push((
            format!("filters/bank L={l}"),
            Box::new(move || {
                let bank = dd(l)?;
                let r = custom_bank_validate(bank.h());
                let failed: Vec<&str> = r.checks.iter().filter(|c| c.status == imra_core::filters::CheckStatus::Fail).map(|c| c.name).collect();
                Ok((r.passed(), if failed.is_empty() { "all conditions hold".into() } else { format!("failed: {}", failed.join(",")) }))
            }),
        ));
        out.push((
            format!("scaling/interpolation+refinement L={l}"),
            Box::new(move || {
                let bank = dd(l)?;
                let rmax = if l <= 4 { 6 } else { 3 };
                let t = refine_scaling_exact(&bank, rmax)?;
                let (lo, hi) = bank.phi_support();
                let step = 1i64 << rmax;
                let cardinal = (lo..=hi).all(|k| t.get(k * step) == if k == 0 { Dyadic::ONE } else { Dyadic::ZERO });
                let mut first_bad = None;
                for r in 1..=rmax {
                    if let Some(x) = verify_refinement_exact(&bank, r)? {
                        first_bad = Some(x);
                        break;
                    }
                }
                let ok = cardinal && first_bad.is_none();
                Ok((ok, format!("exact through resolution {rmax}{}", first_bad.map_or(String::new(), |x| format!(", fails at {x}")))))
            }),
        ));
        out.push((
            format!("scaling/polynomial-reproduction L={l}"),
            Box::new(move || {
                let bank = dd(l)?;
                let r = polynomial_reproduction_check(&bank, 2 * l - 1, (-2, 2), 4)?;
                Ok((r < 1e-9, format!("degree {} residual {r:.2e}", 2 * l - 1)))
            }),
        ));
        out.push((
            format!("tensor/biorthogonality L={l}"),
            Box::new(move || {
                let r = biorthogonality_check(&dd(l)?, 8)?;
                Ok((r.exact(), "four relations exact on |k|,|l| <= 8".into()))
            }),
        ));
        for &n in cfg.dims.iter().filter(|&&n| n <= 3) {
            out.push((
                format!("tensor/duality n={n} L={l}"),
                Box::new(move || {
                    let d = filter_duality_check(&dd(l)?, n, 4 * l as i64)?;
                    Ok((d.is_zero(), format!("max deviation {d} on window {}", 4 * l)))
                }),
            ));
        }
    }

    for &l in &cfg.grid_orders {
        for &n in &cfg.dims {
            let tag = (n as u64) << 8 | l as u64;
            out.push((
                format!("transform/roundtrip n={n} L={l}"),
                Box::new(move || {
                    let bank = dd(l)?;
                    let mut rng = rng_for(seed, tag);
                    let g = random_grid(&mut rng, n, 3, side_for(n))?;
                    let r = reconstruct(&bank, &decompose(&bank, &g, 0)?)?;
                    let err = r.max_abs_diff_on(&g, &interior_box(g.bbox(), 3, &bank));
                    Ok((err < 1e-10, format!("3 levels, side {}, interior error {err:.2e}", side_for(n))))
                }),
            ));
            out.push((
                format!("transform/impulse-biorthogonality n={n} L={l}"),
                Box::new(move || impulse_check(n, l, seed ^ tag)),
            ));
            out.push((
                format!("transform/polynomial-details n={n} L={l}"),
                Box::new(move || {
                    let bank = dd(l)?;
                    let deg = 2 * l as i32 - 1;
                    let b = IndexBox::cube(n, -32, 32)?;
                    let g = sample_grid(|x| x.iter().enumerate().map(|(i, &t)| (i as f64 + 1.0) * t.powi(deg) - t).sum::<f64>() + x.iter().product::<f64>() + 0.5, 4, &b)?;
                    let pyr = decompose(&bank, &g, 2)?;
                    let mut worst: f64 = 0.0;
                    let mut count = 0usize;
                    for lv in &pyr.levels {
                        for s in detail_orientations(n)? {
                            let inner = interior_detail_box(&bank, &b, 4, lv.level, s)?;
                            let ch = lv.channel(s).unwrap();
                            inner.for_each_point(|_, p| {
                                count += 1;
                                worst = worst.max(ch.get(p).abs());
                            });
                        }
                    }
                    Ok((worst < 1e-9 && count > 0, format!("degree {deg}, {count} interior details, max {worst:.2e}")))
                }),
            ));
        }
    }

    for &n in &cfg.dims {
        out.push((
            format!("transform/linearity n={n}"),
            Box::new(move || {
                let bank = dd(2)?;
                let mut rng = rng_for(seed, 0x11 + n as u64);
                let side = side_for(n);
                let f = random_grid(&mut rng, n, 3, side)?;
                let g = random_grid(&mut rng, n, 3, side)?;
                let (a, b) = (rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
                let lhs = decompose(&bank, &f.lin_comb(a, &g, b)?, 0)?;
                let rhs = decompose(&bank, &f, 0)?.lin_comb(a, &decompose(&bank, &g, 0)?, b)?;
                let worst = pyramid_sup(&lhs.lin_comb(1.0, &rhs, -1.0)?);
                Ok((worst < 1e-12, format!("max coefficient difference {worst:.2e}")))
            }),
        ));
        out.push((
            format!("transform/two-scale n={n}"),
            Box::new(move || {
                let bank = dd(2)?;
                let mut rng = rng_for(seed, 0x21 + n as u64);
                let f = random_grid(&mut rng, n, 3, side_for(n))?;
                let pyr = decompose(&bank, &f, 0)?;
                let mut ok = true;
                let mut checked = 0usize;
                for j in 0..3 {
                    let coarse = reconstruct(&bank, &pyr.truncated(j)?)?;
                    let full = reconstruct(&bank, &pyr.without_details_from(j))?;
                    let shift = 3 - j as u32;
                    coarse.bbox().for_each_point(|_, p| {
                        let x: Vec<Dyadic> = p.iter().map(|&v| Dyadic::new(v as i128, j as u32)).collect();
                        let q: Vec<i64> = p.iter().map(|&v| v << shift).collect();
                        let pj = project_eval(&bank, &coarse, &x).unwrap_or(f64::NAN);
                        if full.bbox().contains(&q) {
                            ok &= pj == coarse.get(p) && pj == full.get(&q);
                            checked += 1;
                        }
                    });
                }
                Ok((ok && checked > 0, format!("{checked} lattice points agree exactly")))
            }),
        ));
        if n <= 2 {
            out.push((
                format!("transform/threshold n={n}"),
                Box::new(move || {
                    let bank = dd(2)?;
                    let half = if n == 1 { 1024 } else { 160 };
                    let b = IndexBox::cube(n, -half, half)?;
                    let g = sample_grid(|x| (-x.iter().map(|t| t * t).sum::<f64>()).exp(), 6, &b)?;
                    let pyr = decompose(&bank, &g, 2)?;
                    let t = threshold(&pyr, 1e-6)?;
                    let frac = t.dropped as f64 / pyr.detail_count() as f64;
                    let err = reconstruct(&bank, &t.pyramid)?.max_abs_diff_on(&g, &b);
                    let bound = threshold_error_bound(&bank, &t);
                    Ok((frac > 0.9 && err <= bound, format!("tau 1e-6: dropped {:.1}%, error {err:.2e} <= bound {bound:.2e}", 100.0 * frac)))
                }),
            ));
        }
    }

    out.push((
        "besov/norm-axioms".into(),
        Box::new(move || {
            let mut rng = rng_for(seed, 0x31);
            let params = [BesovParams::new(1.5, 2.0, 1.0, 0)?, BesovParams::new(0.8, 1.0, f64::INFINITY, 0)?, BesovParams::new(2.0, f64::INFINITY, 2.0, 0)?];
            let mut worst: f64 = 0.0;
            for i in 0..100 {
                let bank = dd(1 + (i % 2) as u32)?;
                let a = decompose(&bank, &random_grid(&mut rng, 1 + i % 2, 3, 17)?, 0)?;
                let b = decompose(&bank, &random_grid(&mut rng, 1 + i % 2, 3, 17)?, 0)?;
                let lam: f64 = rng.random_range(-3.0..3.0);
                let pr = &params[i % 3];
                let (na, nb) = (coeff_norm(&a, pr)?.total, coeff_norm(&b, pr)?.total);
                let hom = (coeff_norm(&a.lin_comb(lam, &a, 0.0)?, pr)?.total - lam.abs() * na).abs() / (1.0 + na);
                let tri = coeff_norm(&a.lin_comb(1.0, &b, 1.0)?, pr)?.total - na - nb;
                worst = worst.max(hom).max(tri);
            }
            Ok((worst <= 1e-9, format!("100 pairs, worst violation {worst:.2e}")))
        }),
    ));
    out.push((
        "besov/single-coefficient".into(),
        Box::new(move || {
            let bank = dd(1)?;
            let zero = decompose(&bank, &GridFunction::zeros(4, IndexBox::new(vec![0], vec![16])?)?, 0)?;
            let mut k = 0usize;
            let target = zero.coarse.values().len() + zero.levels[0].channels[0].values().len() + zero.levels[1].channels[0].values().len() + 1;
            let pyr = zero.map_coeffs(|_| {
                k += 1;
                if k == target { 1.0 } else { 0.0 }
            });
            let got = coeff_norm(&pyr, &BesovParams::new(1.5, 2.0, 1.0, 0)?)?.total;
            Ok(((got - 4.0).abs() <= 1e-12, format!("sigma 1.5, p 2, q 1, j 2: {got} (want 4)")))
        }),
    ));
    out.push((
        "besov/holder".into(),
        Box::new(move || {
            let mut parts = Vec::new();
            let mut ok = true;
            for alpha in [0.5, 1.0] {
                let g = sample_grid(|x| x[0].abs().powf(alpha), 10, &IndexBox::new(vec![-1024], vec![1024])?)?;
                let est = holder_estimate(&dd(2)?, &g, 3)?;
                let a = est.exponent.unwrap_or(f64::INFINITY);
                ok &= (a - alpha).abs() <= 0.1 && est.points.len() >= 5;
                parts.push(format!("|x|^{alpha} -> {a:.3} ({} levels)", est.points.len()));
            }
            Ok((ok, parts.join(", ")))
        }),
    ));
    for &l in &cfg.grid_orders {
        out.push((
            format!("besov/projection-bound L={l}"),
            Box::new(move || {
                let bank = dd(l)?;
                let mut ok = true;
                let mut parts = Vec::new();
                for (name, f) in [("sin-window", &sin_window as &(dyn Fn(&[f64]) -> f64 + Sync)), ("gaussian", &gaussian)] {
                    let r = projection_error_check(&bank, f, 1, (-3.0, 3.0), 0..=5, 8)?;
                    let last = r.rows.last().unwrap().measured;
                    ok &= r.all_pass() && r.monotone && last < 1e-3;
                    parts.push(format!("{name}: j=5 error {last:.2e}"));
                }
                Ok((ok, parts.join(", ")))
            }),
        ));
    }
    out.push((
        "besov/equivalence".into(),
        Box::new(move || {
            let pr = BesovParams::new(1.2, f64::INFINITY, f64::INFINITY, 0)?;
            let r = equivalence_probe(&dd(2)?, &bump, 1, (-2.0, 2.0), &pr, &[4, 5, 6, 7], 3)?;
            let spread = r.spread.unwrap_or(f64::INFINITY);
            let ratios: Vec<String> = r.rows.iter().map(|row| row.ratio.map_or("-".into(), |v| format!("{v:.4}"))).collect();
            Ok((spread < 4.0, format!("wavelet/coefficient ratios {} at J=4..7, spread {spread:.3}", ratios.join(" "))))
        }),
    ));
    out.push((
        "besov/unconditionality".into(),
        Box::new(move || {
            let bank = dd(2)?;
            let b = IndexBox::cube(2, -12, 12)?;
            let g = sample_grid(|x| x[0].sin() * (2.0 * x[1]).cos(), 3, &b)?;
            let pyr = decompose(&bank, &g, 0)?;
            let mut rng = rng_for(seed, 0x41);
            let pts: Vec<Vec<Dyadic>> = (0..50).map(|_| (0..2).map(|_| Dyadic::new(rng.random_range(-80i128..=80), 3)).collect()).collect();
            let r = unconditionality_probe(&bank, &pyr, 20, &pts, &mut rng)?;
            let recon = r.points.iter().filter_map(|p| p.reconstruction_deviation).fold(0.0f64, f64::max);
            let tail = geometric_tail_probe(&bank, 0.75, 20, Dyadic::new(5, 7))?;
            let ok = r.max_deviation() < 1e-9 && recon < 1e-9 && r.abs_dominates() && tail.pass();
            Ok((ok, format!("50 points: reorder deviation {:.2e}, vs reconstruction {recon:.2e}; tail ratio {:.3}", r.max_deviation(), tail.worst_ratio)))
        }),
    ));

    let mut ordering_cases = vec![(1usize, 100u64), (2, 20), (3, 6), (4, 3)];
    if cfg.dim_given {
        ordering_cases.retain(|c| cfg.dims.contains(&c.0));
    }
    for (n, k) in ordering_cases {
        out.push((
            format!("ordering/verify n={n} K={k}"),
            Box::new(move || {
                let r = verify_ordering(n, k)?;
                let detail = match &r.first_violation {
                    Some(v) => format!("{:?} at index {} point {:?}", v.kind, v.index, v.point),
                    None => format!("{} points in {} shells", r.points, r.shells),
                };
                Ok((r.passed(), detail))
            }),
        ));
    }

    for &n in &cfg.dims {
        out.push((
            format!("io/roundtrip n={n}"),
            Box::new(move || {
                let mut rng = rng_for(seed, 0x51 + n as u64);
                let g = random_grid(&mut rng, n, 3, side_for(n).min(17))?;
                let bytes = encode_grid(&g);
                let grid_ok = encode_grid(&decode_grid(&bytes)?) == bytes;
                let bank = dd(2)?;
                let pyr = decompose(&bank, &g, 1)?;
                let base = std::env::temp_dir().join(format!("imra-verify-{}-{n}-{seed}", std::process::id()));
                let (a, b) = (base.join("a"), base.join("b"));
                write_pyramid(&a, &pyr, &bank)?;
                let (back, bank2) = read_pyramid(&a)?;
                write_pyramid(&b, &back, &bank2)?;
                let pyr_ok = back == pyr && dirs_identical(&a, &b)?;
                let _ = std::fs::remove_dir_all(&base);
                Ok((grid_ok && pyr_ok, format!("grid {} bytes, pyramid {} files byte-identical", bytes.len(), 2 + pyr.levels.iter().map(|l| l.channels.len()).sum::<usize>())))
            }),
        ));
    }
    out
}

fn dirs_identical(a: &std::path::Path, b: &std::path::Path) -> Result<bool> {
    let list = |d: &std::path::Path| -> Result<Vec<(std::ffi::OsString, Vec<u8>)>> {
        let mut v = Vec::new();
        for e in std::fs::read_dir(d).map_err(|e| crate::ImraError::io(d, e))? {
            let e = e.map_err(|e| crate::ImraError::io(d, e))?;
            let bytes = std::fs::read(e.path()).map_err(|err| crate::ImraError::io(e.path(), err))?;
            v.push((e.file_name(), bytes));
        }
        v.sort();
        Ok(v)
    };
    Ok(list(a)? == list(b)?)
}

fn pyramid_sup(p: &WaveletPyramid) -> f64 {
    p.levels.iter().flat_map(|l| &l.channels).map(|c| c.sup_abs()).fold(p.coarse.sup_abs(), f64::max)
}

fn impulse_check(n: usize, l: u32, seed: u64) -> Result<(bool, String)> {
    let bank = dd(l)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fine_box = IndexBox::cube(n, -24, 24)?;
    let (c0, d0) = analyze_level(&bank, &GridFunction::zeros(1, fine_box.clone())?)?;
    let orients = orientations(n)?;
    let mut worst: f64 = 0.0;
    let mut count = 0usize;
    for s in &orients {
        for _ in 0..20 {
            let mu: Vec<i64> = (0..n).map(|_| rng.random_range(-4..=4)).collect();
            let mut chans: Vec<GridFunction> = std::iter::once(c0.clone()).chain(d0.iter().cloned()).collect();
            chans[s.index()].set(&mu, 1.0)?;
            let refs: Vec<Option<&GridFunction>> = chans.iter().map(Some).collect();
            let fine = synthesize_channels(&bank, 0, &refs, &fine_box)?;
            let (c, d) = analyze_level(&bank, &fine)?;
            let got: Vec<&GridFunction> = std::iter::once(&c).chain(d.iter()).collect();
            for t in &orients {
                let inner = interior_detail_box(&bank, &fine_box, 1, 0, *t)?;
                inner.for_each_point(|_, p| {
                    let want = if t == s && p == &mu[..] { 1.0 } else { 0.0 };
                    worst = worst.max((got[t.index()].get(p) - want).abs());
                    count += 1;
                });
            }
        }
    }
    Ok((worst == 0.0, format!("{} channels x 20 impulses, {count} coefficients, max deviation {worst:e}", orients.len())))
}

fn sin_window(x: &[f64]) -> f64 {
    x.iter().map(|&t| t.sin() * (-t * t / 8.0).exp()).product()
}

fn gaussian(x: &[f64]) -> f64 {
    (-x.iter().map(|t| t * t).sum::<f64>()).exp()
}

/// `exp(1 - 1/(1 - r^2))` with `r = |x - c| / 1.3` and `c = (0.3, ..., 0.3)`;
/// the centre and radius keep the peak off every dyadic lattice.
pub fn bump(x: &[f64]) -> f64 {
    let r2: f64 = x.iter().map(|t| (t - 0.3) * (t - 0.3)).sum::<f64>() / (1.3 * 1.3);
    if r2 < 1.0 {
        (1.0 - 1.0 / (1.0 - r2)).exp()
    } else {
        0.0
    }
}

/// Runs every check of `cfg` on the current rayon pool.
pub fn run(cfg: &SuiteConfig) -> Vec<Outcome> {
    checks(cfg)
        .into_par_iter()
        .map(|(name, check)| match check() {
            Ok((pass, detail)) => Outcome { name, pass, detail },
            Err(e) => Outcome { name, pass: false, detail: format!("error: {e}") },
        })
        .collect()
}
