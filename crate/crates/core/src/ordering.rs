//! Neighbour-preserving enumerations of `Z^n` that exhaust the cubes
//! `[-k, k]^n` one after another.
//!
//! Shell `k` is the set of points with sup-norm `k + 1`. The plane uses a
//! closed-form square spiral. In dimension `n + 1` a shell is assembled from
//! the `n`-dimensional shells in the order
//!
//! ```text
//! V, R', S'(-k), ..., S'(k), Y, T', W, Q
//! ```
//!
//! where `V`/`Y` walk the first points of the lower shells on the faces
//! `x_0 = -k-1` / `x_0 = k+1`, `R'`/`T'` traverse those faces by the
//! `n`-dimensional cube ordering, `S'(t)` copies shell `k` at height `t`,
//! and `W`, `Q` finish along the diagonal edge so that every shell ends at
//! `(-k-1, ..., -k-1)`.
//!
//! In one dimension no ordering can preserve neighbours; the zigzag
//! `0, -1, 1, -2, 2, ...` is provided and only bijection and shell
//! monotonicity are checked for it.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::tensor::MAX_DIM;

/// `σ_pl(k)`: the square spiral through `Z^2`.
pub fn plane_ordering(k: u64) -> (i64, i64) {
    if k == 0 {
        return (0, 0);
    }
    // largest m with (2m+1)^2 <= k
    let m = ((k.isqrt() - 1) / 2) as i64;
    let r = (k - ((2 * m + 1) * (2 * m + 1)) as u64) as i64;
    if r <= 2 * m + 1 {
        (-m + r, -m - 1)
    } else if r <= 4 * m + 3 {
        let a = r - (2 * m + 1);
        (m + 1, -m - 1 + a)
    } else if r <= 6 * m + 5 {
        let a = r - (4 * m + 3);
        (m + 1 - a, m + 1)
    } else {
        let a = r - (6 * m + 5);
        (-m - 1, m + 1 - a)
    }
}

/// Number of points in shell `k` of dimension `n`.
pub fn shell_len(n: usize, k: u64) -> u64 {
    (2 * k + 3).pow(n as u32) - (2 * k + 1).pow(n as u32)
}

/// Memoised shell orderings, keyed by `(n, k)`. Each shell is stored
/// flattened, `n` coordinates per point.
#[derive(Clone, Debug, Default)]
pub struct ShellCache {
    shells: Vec<Vec<Vec<i64>>>,
}

impl ShellCache {
    pub fn new() -> Self {
        ShellCache { shells: vec![Vec::new(); MAX_DIM + 1] }
    }

    /// Shell `k` of dimension `n` (`2 <= n <= 4`), flattened.
    pub fn shell(&mut self, n: usize, k: usize) -> Result<&[i64]> {
        if !(2..=MAX_DIM).contains(&n) {
            return Err(Error::DimensionOutOfRange(n));
        }
        self.ensure(n, k);
        Ok(&self.shells[n][k])
    }

    fn ensure(&mut self, n: usize, k: usize) {
        while self.shells[n].len() <= k {
            let t = self.shells[n].len();
            let s = if n == 2 { plane_shell(t) } else { self.build(n, t) };
            self.shells[n].push(s);
        }
    }

    fn build(&mut self, n: usize, k: usize) -> Vec<i64> {
        let m = n - 1;
        self.ensure(m, k);
        let lower = &self.shells[m];
        let kk = k as i64;
        let edge = -kk - 1;
        let mut out = Vec::with_capacity(shell_len(n, k as u64) as usize * n);
        let mut push = |head: i64, tail: &[i64]| {
            out.push(head);
            out.extend_from_slice(tail);
        };
        let first = |t: usize| &lower[t][..m];
        let origin = vec![0i64; m];
        let corner = vec![edge; m];

        // V
        for l in 0..=k {
            push(edge, first(k - l));
        }
        // R': face x_0 = -k-1 by the cube ordering, minus V and the corner
        push(edge, &origin);
        for t in 0..=k {
            let pts = lower[t].chunks(m);
            let cnt = lower[t].len() / m;
            for (i, p) in pts.enumerate() {
                if i == 0 || (t == k && i == cnt - 1) {
                    continue;
                }
                push(edge, p);
            }
        }
        // S'(t)
        let cnt_k = lower[k].len() / m;
        for t in -kk..=kk {
            for p in lower[k].chunks(m).take(cnt_k - 1) {
                push(t, p);
            }
        }
        // Y
        for l in 0..=k {
            push(kk + 1, first(k - l));
        }
        // T': face x_0 = k+1 minus Y
        push(kk + 1, &origin);
        for t in 0..=k {
            for p in lower[t].chunks(m).skip(1) {
                push(kk + 1, p);
            }
        }
        // W
        for l in 0..=2 * kk {
            push(kk - l, &corner);
        }
        // Q
        push(edge, &corner);
        out
    }
}

fn plane_shell(k: usize) -> Vec<i64> {
    let start = ((2 * k + 1) * (2 * k + 1)) as u64;
    let len = shell_len(2, k as u64);
    let mut out = Vec::with_capacity(2 * len as usize);
    for i in 0..len {
        let (x, y) = plane_ordering(start + i);
        out.push(x);
        out.push(y);
    }
    out
}

/// Streaming cube ordering of `Z^n`, `1 <= n <= 4`.
#[derive(Clone, Debug)]
pub struct CubeOrdering {
    dim: usize,
    index: u64,
    cache: ShellCache,
    /// `None` before the origin has been emitted.
    shell: Option<usize>,
    pos: usize,
}

impl CubeOrdering {
    pub fn new(dim: usize) -> Result<Self> {
        if !(1..=MAX_DIM).contains(&dim) {
            return Err(Error::DimensionOutOfRange(dim));
        }
        Ok(CubeOrdering { dim, index: 0, cache: ShellCache::new(), shell: None, pos: 0 })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

impl Iterator for CubeOrdering {
    type Item = Vec<i64>;

    fn next(&mut self) -> Option<Vec<i64>> {
        let i = self.index;
        self.index += 1;
        if self.dim == 1 {
            let v = if i % 2 == 1 { -(i.div_ceil(2) as i64) } else { (i / 2) as i64 };
            return Some(vec![v]);
        }
        let Some(k) = self.shell else {
            self.shell = Some(0);
            return Some(vec![0; self.dim]);
        };
        let n = self.dim;
        let sh = self.cache.shell(n, k).ok()?;
        let p = sh[self.pos * n..(self.pos + 1) * n].to_vec();
        self.pos += 1;
        if self.pos * n == sh.len() {
            self.shell = Some(k + 1);
            self.pos = 0;
        }
        Some(p)
    }
}

/// `cube_ordering_iter(n)`.
pub fn cube_ordering_iter(n: usize) -> Result<CubeOrdering> {
    CubeOrdering::new(n)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ViolationKind {
    /// Point outside `[-K, K]^n`.
    OutOfRange,
    /// Point emitted twice.
    Repeated,
    /// Consecutive points not at sup-norm distance 1.
    NotNeighbours,
    /// Sup-norm decreased.
    ShellOrder,
    /// A shell did not end at `(-k-1, ..., -k-1)`.
    ShellEnd,
    /// Stream ended early.
    Exhausted,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub index: u64,
    pub kind: ViolationKind,
    pub point: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderingReport {
    pub dim: usize,
    pub shells: u64,
    pub points: u64,
    pub bijection: bool,
    /// `None` in one dimension, where the property cannot hold.
    pub neighbours: Option<bool>,
    pub shell_monotone: bool,
    /// `None` in one dimension.
    pub shell_ends: Option<bool>,
    pub first_violation: Option<Violation>,
}

impl OrderingReport {
    pub fn passed(&self) -> bool {
        self.bijection && self.neighbours != Some(false) && self.shell_monotone && self.shell_ends != Some(false)
    }
}

/// Upper limit on `(2K+1)^n` for verification.
pub const MAX_VERIFY_POINTS: u64 = 10_000_000;

fn sup_norm(p: &[i64]) -> i64 {
    p.iter().map(|v| v.abs()).max().unwrap_or(0)
}

/// Checks the first `(2K+1)^n` points of `seq`.
pub fn verify_sequence(n: usize, big_k: u64, seq: impl IntoIterator<Item = Vec<i64>>) -> Result<OrderingReport> {
    if !(1..=MAX_DIM).contains(&n) {
        return Err(Error::DimensionOutOfRange(n));
    }
    let side = 2 * big_k + 1;
    let total = side.checked_pow(n as u32).filter(|t| *t <= MAX_VERIFY_POINTS).ok_or(Error::Parameter("(2K+1)^n exceeds the verification limit"))?;
    let mut seen = vec![false; total as usize];
    let mut rep = OrderingReport {
        dim: n,
        shells: big_k,
        points: 0,
        bijection: true,
        neighbours: (n >= 2).then_some(true),
        shell_monotone: true,
        shell_ends: (n >= 2).then_some(true),
        first_violation: None,
    };
    let note = |rep: &mut OrderingReport, index: u64, kind: ViolationKind, p: &[i64]| {
        if rep.first_violation.is_none() {
            rep.first_violation = Some(Violation { index, kind, point: p.to_vec() });
        }
    };
    let mut prev: Option<Vec<i64>> = None;
    let mut it = seq.into_iter();
    for idx in 0..total {
        let Some(p) = it.next() else {
            rep.bijection = false;
            note(&mut rep, idx, ViolationKind::Exhausted, &[]);
            break;
        };
        if p.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: p.len() });
        }
        rep.points += 1;
        let r = sup_norm(&p);
        if r as u64 > big_k {
            rep.bijection = false;
            note(&mut rep, idx, ViolationKind::OutOfRange, &p);
        } else {
            let flat = p.iter().fold(0u64, |a, &v| a * side + (v + big_k as i64) as u64) as usize;
            if seen[flat] {
                rep.bijection = false;
                note(&mut rep, idx, ViolationKind::Repeated, &p);
            }
            seen[flat] = true;
        }
        if let Some(q) = &prev {
            let rq = sup_norm(q);
            if n >= 2 {
                let step = p.iter().zip(q).map(|(a, b)| (a - b).abs()).max().unwrap_or(0);
                if step != 1 {
                    rep.neighbours = Some(false);
                    note(&mut rep, idx, ViolationKind::NotNeighbours, &p);
                }
                if r > rq && rq > 0 && q.iter().any(|&v| v != -rq) {
                    rep.shell_ends = Some(false);
                    note(&mut rep, idx - 1, ViolationKind::ShellEnd, q);
                }
            }
            if r < rq {
                rep.shell_monotone = false;
                note(&mut rep, idx, ViolationKind::ShellOrder, &p);
            }
        }
        prev = Some(p);
    }
    if let (Some(q), true) = (&prev, n >= 2 && rep.points == total) {
        let rq = sup_norm(q);
        if rq > 0 && q.iter().any(|&v| v != -rq) {
            rep.shell_ends = Some(false);
            note(&mut rep, total - 1, ViolationKind::ShellEnd, q);
        }
    }
    Ok(rep)
}

/// [`verify_sequence`] applied to [`CubeOrdering`].
pub fn verify_ordering(n: usize, big_k: u64) -> Result<OrderingReport> {
    verify_sequence(n, big_k, CubeOrdering::new(n)?)
}
