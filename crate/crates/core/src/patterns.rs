//! Pattern occurrence counts, profile vectors, and the inclusion matrices
//! `B_m` (patterns of length m inside patterns of length m+1) and `A_m = BᵀB`.
//!
//! Patterns of length m are indexed by the lexicographic rank of their
//! one-line notation, on every axis.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::zn::Permutation;

/// A pattern is a permutation of `[0, m)`; the type is shared.
pub type Pattern = Permutation;

/// Largest order for which full profiles are computed.
pub const MAX_PROFILE_ORDER: usize = 6;
/// Largest order for which `B_m` and `A_m` are built.
pub const MAX_MATRIX_ORDER: usize = 5;
/// Largest order for the exact rank computation.
pub const MAX_RANK_ORDER: usize = 4;
/// Iteration cap for [`top_eigenvalue`].
pub const POWER_ITERATION_CAP: usize = 10_000;

pub fn factorial(m: usize) -> u64 {
    (1..=m as u64).product()
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Lexicographic rank of a sequence of distinct values, by its Lehmer code.
pub fn pattern_rank(values: &[usize]) -> usize {
    let m = values.len();
    let mut rank = 0;
    for i in 0..m {
        let smaller = values[i + 1..].iter().filter(|&&v| v < values[i]).count();
        rank += smaller * factorial(m - 1 - i) as usize;
    }
    rank
}

pub fn pattern_unrank(m: usize, mut rank: usize) -> Pattern {
    let mut pool: Vec<usize> = (0..m).collect();
    let mut images = Vec::with_capacity(m);
    for i in 0..m {
        let f = factorial(m - 1 - i) as usize;
        images.push(pool.remove(rank / f));
        rank %= f;
    }
    Permutation::from_images_unchecked(images)
}

/// All of `S_m` in lexicographic order.
pub fn all_patterns(m: usize) -> impl Iterator<Item = Pattern> {
    (0..factorial(m) as usize).map(move |r| pattern_unrank(m, r))
}

/// Compact label: digits run together when every image is a single digit.
pub fn pattern_label(p: &Pattern) -> String {
    if p.n() <= 10 {
        p.images().iter().fold(String::new(), |mut s, d| {
            let _ = write!(s, "{d}");
            s
        })
    } else {
        p.to_string()
    }
}

/// Whether `σ` restricted to the positions `a` is order-isomorphic to `τ`.
pub fn occurs_at(sigma: &Permutation, a: &[usize], tau: &Pattern) -> Result<bool> {
    let m = tau.n();
    if a.len() != m {
        return Err(Error::IndexSetSize { got: a.len(), expected: m });
    }
    let n = sigma.n();
    if a.windows(2).any(|w| w[0] >= w[1]) || a.iter().any(|&x| x >= n) {
        return Err(Error::BadIndexSet { n });
    }
    let (s, t) = (sigma.images(), tau.images());
    for i in 0..m {
        for j in i + 1..m {
            if (s[a[i]] < s[a[j]]) != (t[i] < t[j]) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Binary indexed tree over `[0, n)` counting inserted values.
pub(crate) struct Fenwick {
    tree: Vec<u32>,
}

impl Fenwick {
    pub(crate) fn new(n: usize) -> Self {
        Fenwick { tree: vec![0; n + 1] }
    }

    pub(crate) fn insert(&mut self, v: usize) {
        let mut i = v + 1;
        while i < self.tree.len() {
            self.tree[i] += 1;
            i += i & i.wrapping_neg();
        }
    }

    /// Number of inserted values `< v`.
    pub(crate) fn below(&self, v: usize) -> u64 {
        let (mut i, mut acc) = (v, 0u64);
        while i > 0 {
            acc += self.tree[i] as u64;
            i &= i - 1;
        }
        acc
    }
}

/// Number of pairs `i < j` with `values[i] > values[j]`, in O(n log n).
/// Values must be distinct.
pub fn count_inversions(values: &[usize]) -> u64 {
    let mut fw = Fenwick::new(values.iter().max().map_or(0, |&v| v + 1));
    let mut inv = 0;
    for (seen, &v) in values.iter().enumerate() {
        inv += seen as u64 - fw.below(v);
        fw.insert(v);
    }
    inv
}

/// `X^τ(σ)`: the number of index sets on which `σ` has pattern `τ`.
pub fn count_pattern(sigma: &Permutation, tau: &Pattern) -> Result<u128> {
    let (n, m) = (sigma.n(), tau.n());
    if m > n {
        return Err(Error::PatternTooLong { m, n });
    }
    match m {
        1 => Ok(n as u128),
        2 => {
            let inv = count_inversions(sigma.images()) as u128;
            Ok(if tau.images()[0] == 0 { binomial(n, 2) - inv } else { inv })
        }
        _ => Ok(profile(sigma, m)?.counts[pattern_rank(tau.images())] as u128),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProfileVector {
    pub m: usize,
    pub n: usize,
    /// Indexed by lexicographic pattern rank.
    pub counts: Vec<u64>,
}

impl ProfileVector {
    pub fn total(&self) -> u128 {
        self.counts.iter().map(|&c| c as u128).sum()
    }

    /// `m!·ṽ_m = m!·v_m − C(n, m)`, which stays integral.
    pub fn centered_scaled(&self) -> Vec<BigInt> {
        let f = BigInt::from(factorial(self.m));
        let c = BigInt::from(binomial(self.n, self.m));
        self.counts.iter().map(|&x| &f * BigInt::from(x) - &c).collect()
    }

    /// `ṽ_m = v_m − C(n, m)/m!`.
    pub fn centered(&self) -> Vec<BigRational> {
        let f = BigInt::from(factorial(self.m));
        self.centered_scaled().into_iter().map(|x| BigRational::new(x, f.clone())).collect()
    }

    /// `|ṽ_m|²`, exact.
    pub fn centered_norm_sq(&self) -> BigRational {
        let f = BigInt::from(factorial(self.m));
        let num: BigInt = self.centered_scaled().iter().map(|x| x * x).sum();
        BigRational::new(num, &f * &f)
    }

    pub fn count_of(&self, tau: &Pattern) -> Option<u64> {
        (tau.n() == self.m).then(|| self.counts[pattern_rank(tau.images())])
    }
}

/// Counts every pattern of length `m` in one pass over the `C(n, m)` index sets.
pub fn profile(sigma: &Permutation, m: usize) -> Result<ProfileVector> {
    let n = sigma.n();
    if m > n {
        return Err(Error::PatternTooLong { m, n });
    }
    Ok(ProfileVector { m, n, counts: profile_of_values(sigma.images(), m)? })
}

/// Pattern counts of any sequence of distinct values (no standardisation
/// needed). Sequences shorter than `m` give all zeros.
///
/// The rank of each standardisation is built incrementally: appending value
/// `v` raises the Lehmer digit of every earlier entry above `v`.
pub fn profile_of_values(values: &[usize], m: usize) -> Result<Vec<u64>> {
    if !(1..=MAX_PROFILE_ORDER).contains(&m) {
        return Err(Error::OrderOutOfRange { m, min: 1, max: MAX_PROFILE_ORDER });
    }
    let size = factorial(m) as usize;
    if values.len() < m {
        return Ok(vec![0; size]);
    }
    let fact: Vec<usize> = (0..m).map(|i| factorial(i) as usize).collect();
    let n = values.len();
    Ok((0..=n - m)
        .into_par_iter()
        .map(|first| {
            let mut counts = vec![0u64; size];
            let mut chosen = [0usize; MAX_PROFILE_ORDER];
            chosen[0] = values[first];
            descend(values, m, &fact, &mut chosen, 1, first + 1, 0, &mut counts);
            counts
        })
        .reduce(
            || vec![0u64; size],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        ))
}

#[allow(clippy::too_many_arguments)]
fn descend(
    s: &[usize],
    m: usize,
    fact: &[usize],
    chosen: &mut [usize; MAX_PROFILE_ORDER],
    depth: usize,
    from: usize,
    rank: usize,
    counts: &mut [u64],
) {
    if depth == m {
        counts[rank] += 1;
        return;
    }
    for pos in from..=s.len() - (m - depth) {
        let v = s[pos];
        let mut r = rank;
        for (i, &c) in chosen[..depth].iter().enumerate() {
            if c > v {
                r += fact[m - 1 - i];
            }
        }
        chosen[depth] = v;
        descend(s, m, fact, chosen, depth + 1, pos + 1, r, counts);
    }
}

/// `B_m` (m! × (m+1)!) and `A_m = B_mᵀ B_m`, stored row-major.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PatternMatrix {
    pub m: usize,
    pub rows: usize,
    pub cols: usize,
    pub b: Vec<u64>,
    pub a: Vec<u64>,
}

impl PatternMatrix {
    pub fn b_at(&self, tau: usize, tau_up: usize) -> u64 {
        self.b[tau * self.cols + tau_up]
    }

    pub fn a_at(&self, i: usize, j: usize) -> u64 {
        self.a[i * self.cols + j]
    }

    pub fn b_rows(&self) -> Vec<Vec<u64>> {
        self.b.chunks(self.cols).map(<[u64]>::to_vec).collect()
    }

    pub fn a_rows(&self) -> Vec<Vec<u64>> {
        self.a.chunks(self.cols).map(<[u64]>::to_vec).collect()
    }

    pub fn b_row_sums(&self) -> Vec<u64> {
        self.b.chunks(self.cols).map(|r| r.iter().sum()).collect()
    }

    pub fn b_column_sums(&self) -> Vec<u64> {
        (0..self.cols).map(|j| (0..self.rows).map(|i| self.b_at(i, j)).sum()).collect()
    }

    pub fn a_row_sums(&self) -> Vec<u64> {
        self.a.chunks(self.cols).map(|r| r.iter().sum()).collect()
    }

    /// `B_m v` for a vector indexed by `S_{m+1}`.
    pub fn apply_b(&self, v: &[u64]) -> Vec<u128> {
        self.b
            .chunks(self.cols)
            .map(|r| r.iter().zip(v).map(|(&x, &y)| x as u128 * y as u128).sum())
            .collect()
    }
}

pub fn build_pattern_matrices(m: usize) -> Result<PatternMatrix> {
    if !(1..=MAX_MATRIX_ORDER).contains(&m) {
        return Err(Error::OrderOutOfRange { m, min: 1, max: MAX_MATRIX_ORDER });
    }
    let (rows, cols) = (factorial(m) as usize, factorial(m + 1) as usize);
    let mut b = vec![0u64; rows * cols];
    for (j, up) in all_patterns(m + 1).enumerate() {
        let col = profile(&up, m)?;
        for (i, c) in col.counts.into_iter().enumerate() {
            b[i * cols + j] = c;
        }
    }
    let a: Vec<u64> = (0..cols * cols)
        .into_par_iter()
        .map(|ij| {
            let (i, j) = (ij / cols, ij % cols);
            (0..rows).map(|r| b[r * cols + i] * b[r * cols + j]).sum()
        })
        .collect();
    Ok(PatternMatrix { m, rows, cols, b, a })
}

/// Largest eigenvalue of `A_m` by power iteration from a non-uniform start,
/// stopping when the Rayleigh quotient settles to 1e-15 relative.
pub fn top_eigenvalue(pm: &PatternMatrix) -> Result<f64> {
    let n = pm.cols;
    let mut x: Vec<f64> = (0..n).map(|i| 1.0 + (i % 7) as f64 / 7.0).collect();
    let mut prev = f64::NAN;
    for _ in 0..POWER_ITERATION_CAP {
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        x.iter_mut().for_each(|v| *v /= norm);
        let y: Vec<f64> = pm
            .a
            .chunks(n)
            .map(|r| r.iter().zip(&x).map(|(&a, &v)| a as f64 * v).sum())
            .collect();
        let rq: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
        if (rq - prev).abs() <= 1e-15 * rq.abs() {
            return Ok(rq);
        }
        prev = rq;
        x = y;
    }
    Err(Error::NotConverged { iterations: POWER_ITERATION_CAP })
}

/// Exact rank of an integer matrix by fraction-free (Bareiss) elimination.
pub fn integer_rank(rows: usize, cols: usize, entries: &[i64]) -> usize {
    let mut a: Vec<Vec<BigInt>> =
        entries.chunks(cols).map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
    let mut prev = BigInt::one();
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(rank, p);
        let pivot = a[rank][col].clone();
        for i in rank + 1..rows {
            let lead = a[i][col].clone();
            for j in col + 1..cols {
                let v = (&a[i][j] * &pivot - &lead * &a[rank][j]) / &prev;
                a[i][j] = v;
            }
            a[i][col] = BigInt::zero();
        }
        prev = pivot;
        rank += 1;
    }
    rank
}

pub fn rank_of_b(m: usize) -> Result<usize> {
    if !(1..=MAX_RANK_ORDER).contains(&m) {
        return Err(Error::OrderOutOfRange { m, min: 1, max: MAX_RANK_ORDER });
    }
    let pm = build_pattern_matrices(m)?;
    let entries: Vec<i64> = pm.b.iter().map(|&x| x as i64).collect();
    Ok(integer_rank(pm.rows, pm.cols, &entries))
}

/// Connectivity of the bipartite graph on `S_m ∪ S_{m+1}` with an edge
/// wherever `B_m` is positive.
pub fn occurrence_graph_connected(pm: &PatternMatrix) -> bool {
    let (rows, cols) = (pm.rows, pm.cols);
    let mut seen = vec![false; rows + cols];
    let mut stack = vec![0usize];
    seen[0] = true;
    while let Some(v) = stack.pop() {
        let next: Vec<usize> = if v < rows {
            (0..cols).filter(|&j| pm.b_at(v, j) > 0).map(|j| rows + j).collect()
        } else {
            (0..rows).filter(|&i| pm.b_at(i, v - rows) > 0).collect()
        };
        for w in next {
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

/// `σ°`: prepend a new minimum.
pub fn circ(sigma: &Pattern) -> Pattern {
    let mut images = Vec::with_capacity(sigma.n() + 1);
    images.push(0);
    images.extend(sigma.images().iter().map(|&v| v + 1));
    Permutation::from_images_unchecked(images)
}

/// The lexicographically least `τ′ ∈ S_{m+1}` containing `σ`.
pub fn first_container(sigma: &Pattern) -> Result<Pattern> {
    let m = sigma.n();
    for up in all_patterns(m + 1) {
        if count_pattern(&up, sigma)? > 0 {
            return Ok(up);
        }
    }
    unreachable!("σ° always contains σ")
}

/// Both sides of `(n − m)·v_m(σ) = B_m·v_{m+1}(σ)`.
pub fn transfer_sides(sigma: &Permutation, pm: &PatternMatrix) -> Result<(Vec<u128>, Vec<u128>)> {
    let (n, m) = (sigma.n(), pm.m);
    let low = profile(sigma, m)?;
    let high = profile(sigma, m + 1)?;
    let lhs = low.counts.iter().map(|&c| (n - m) as u128 * c as u128).collect();
    Ok((lhs, pm.apply_b(&high.counts)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DownInequality {
    /// `|ṽ_m|²`
    pub lhs: f64,
    /// `(m+1)³/(n−m)² · |ṽ_{m+1}|²`
    pub rhs: f64,
    /// Decided exactly.
    pub holds: bool,
}

/// `|ṽ_m|² ≤ (m+1)³/(n−m)² · |ṽ_{m+1}|²`, compared as exact rationals.
pub fn down_inequality(sigma: &Permutation, m: usize) -> Result<DownInequality> {
    let n = sigma.n();
    if m + 1 > n {
        return Err(Error::PatternTooLong { m: m + 1, n });
    }
    let lhs = profile(sigma, m)?.centered_norm_sq();
    let factor = BigRational::new(BigInt::from((m + 1).pow(3)), BigInt::from((n - m) * (n - m)));
    let rhs = factor * profile(sigma, m + 1)?.centered_norm_sq();
    let f = |r: &BigRational| num_traits::ToPrimitive::to_f64(r).unwrap_or(f64::NAN);
    Ok(DownInequality { lhs: f(&lhs), rhs: f(&rhs), holds: lhs <= rhs })
}
