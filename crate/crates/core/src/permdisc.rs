//! Discrepancy of a permutation, `D(σ) = max_{I,J} D_J(σ(I))` over cyclic
//! intervals, and the windowed statistics that are equivalent to it.
//!
//! As elsewhere, discrepancies are n-scaled integers.

use std::f64::consts::E;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::balance::interval_extreme;
use crate::error::{Error, Result};
use crate::patterns::{binomial, count_inversions, factorial, pattern_rank, profile_of_values, Pattern};
use crate::zn::{CyclicInterval, Permutation};

/// Above this size the CLI defaults to sampling interval starts.
pub const EXACT_LIMIT: usize = 1024;

/// A scaled discrepancy with the interval pair attaining it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PairWitness {
    pub value: u64,
    pub i: CyclicInterval,
    pub j: CyclicInterval,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PermDiscrepancyReport {
    pub n: usize,
    /// `n·D(σ)`
    pub scaled: PairWitness,
    /// `n·d(σ)`: `J` restricted to initial intervals `[0, b]`.
    pub scaled_d: PairWitness,
    /// `n·d′(σ)`: `J` restricted to final intervals `[a, n−1]`.
    pub scaled_d_prime: PairWitness,
    /// False when only some interval starts were scanned; the values are
    /// then lower bounds.
    pub exact: bool,
}

impl PermDiscrepancyReport {
    pub fn discrepancy(&self) -> f64 {
        self.scaled.value as f64 / self.n as f64
    }
}

/// `n·D_J(σ(I))`.
pub fn scaled_pair_discrepancy(sigma: &Permutation, i: &CyclicInterval, j: &CyclicInterval) -> Result<u64> {
    let hits = sigma.window(i, j)?.len() as u64;
    Ok((sigma.n() as u64 * hits).abs_diff(i.len() as u64 * j.len() as u64))
}

fn better(a: &PairWitness, b: &PairWitness) -> bool {
    (a.value, std::cmp::Reverse((a.i.start(), a.i.len()))) > (b.value, std::cmp::Reverse((b.i.start(), b.i.len())))
}

fn pick(a: PairWitness, b: PairWitness) -> PairWitness {
    if better(&b, &a) {
        b
    } else {
        a
    }
}

struct StartBest {
    full: PairWitness,
    initial: PairWitness,
    fin: PairWitness,
}

/// Grows `I = [a, a+len)` one element at a time. Since
/// `D_J(σ(Ī)) = D_J(σ(I))`, lengths up to `n/2` cover every interval.
fn scan_start(sigma: &Permutation, a: usize) -> StartBest {
    let n = sigma.n();
    let s = sigma.images();
    let empty = CyclicInterval::empty(n);
    let zero = PairWitness { value: 0, i: empty, j: empty };
    let mut best = StartBest { full: zero, initial: zero, fin: zero };
    let mut image = vec![false; n];
    for len in 1..=n / 2 {
        image[s[(a + len - 1) % n]] = true;
        let i = CyclicInterval::new(n, a, len).expect("len < n");
        let e = interval_extreme(n, len as u64, |y| image[y] as u64);
        best.full = pick(best.full, PairWitness { value: e.value, i, j: e.witness });

        // initial J = [0, b]: n·P(b) − |I|(b+1)
        // final J = [b, n−1]: n·(|I| − P(b−1)) − |I|(n−b)
        let (nn, li) = (n as i64, len as i64);
        let mut prefix = 0i64;
        let mut ini = (0u64, 0usize);
        let mut fin = (0u64, n);
        for b in 0..n {
            let before = prefix;
            prefix += image[b] as i64;
            let v = (nn * prefix - li * (b as i64 + 1)).unsigned_abs();
            if v > ini.0 {
                ini = (v, b + 1);
            }
            let v = (nn * (li - before) - li * (nn - b as i64)).unsigned_abs();
            if v > fin.0 {
                fin = (v, b);
            }
        }
        let j = CyclicInterval::new(n, 0, ini.1).expect("prefix");
        best.initial = pick(best.initial, PairWitness { value: ini.0, i, j });
        let j = CyclicInterval::new(n, fin.1 % n, n - fin.1).expect("suffix");
        best.fin = pick(best.fin, PairWitness { value: fin.0, i, j });
    }
    best
}

fn scan(sigma: &Permutation, starts: Vec<usize>, exact: bool) -> PermDiscrepancyReport {
    let n = sigma.n();
    let empty = CyclicInterval::empty(n);
    let zero = PairWitness { value: 0, i: empty, j: empty };
    let best = starts
        .into_par_iter()
        .map(|a| scan_start(sigma, a))
        .reduce(
            || StartBest { full: zero, initial: zero, fin: zero },
            |x, y| StartBest {
                full: pick(x.full, y.full),
                initial: pick(x.initial, y.initial),
                fin: pick(x.fin, y.fin),
            },
        );
    PermDiscrepancyReport {
        n,
        scaled: best.full,
        scaled_d: best.initial,
        scaled_d_prime: best.fin,
        exact,
    }
}

/// Exact `n·D(σ)`, `n·d(σ)` and `n·d′(σ)` in O(n³), with witnesses.
///
/// Ties are broken towards the smallest `(I.start, I.len)`; for a given `I`
/// the `J` witness is the first extremal pair found by the prefix scan.
pub fn perm_discrepancy(sigma: &Permutation) -> PermDiscrepancyReport {
    scan(sigma, (0..sigma.n()).collect(), true)
}

/// Scans only `starts` random interval starts (all lengths each), so the
/// result is a lower bound. Falls back to the exact scan when `starts ≥ n`.
pub fn perm_discrepancy_sampled(sigma: &Permutation, starts: usize, seed: u64) -> PermDiscrepancyReport {
    let n = sigma.n();
    if starts >= n {
        return perm_discrepancy(sigma);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked: Vec<usize> = (0..starts).map(|_| rng.random_range(0..n)).collect();
    picked.sort_unstable();
    picked.dedup();
    scan(sigma, picked, false)
}

/// `(n·d(σ), n·d′(σ))`.
pub fn restricted_discrepancies(sigma: &Permutation) -> (PairWitness, PairWitness) {
    let r = perm_discrepancy(sigma);
    (r.scaled_d, r.scaled_d_prime)
}

/// `|n·#{x ∈ I∩K : σ(x) ∈ J∩K′} − |I∩K|·|J∩K′||`, the n-scaled separability
/// statistic.
pub fn separability_statistic(
    sigma: &Permutation,
    i: &CyclicInterval,
    j: &CyclicInterval,
    k: &CyclicInterval,
    k_prime: &CyclicInterval,
) -> Result<u64> {
    let n = sigma.n();
    for iv in [i, j, k, k_prime] {
        if iv.modulus() != n {
            return Err(Error::ModulusMismatch { left: n, right: iv.modulus() });
        }
    }
    let mut hits = 0u64;
    for x in 0..n {
        if i.contains(x) && k.contains(x) {
            let y = sigma.apply(x);
            hits += (j.contains(y) && k_prime.contains(y)) as u64;
        }
    }
    let ik = (0..n).filter(|&x| i.contains(x) && k.contains(x)).count() as u64;
    let jk = (0..n).filter(|&y| j.contains(y) && k_prime.contains(y)).count() as u64;
    Ok((n as u64 * hits).abs_diff(ik * jk))
}

/// `|X^τ(σ|_W) − C(|W|, m)/m!|` where `W = I ∩ σ⁻¹(J)` in position order.
pub fn windowed_pattern_deviation(
    sigma: &Permutation,
    tau: &Pattern,
    i: &CyclicInterval,
    j: &CyclicInterval,
) -> Result<BigRational> {
    let m = tau.n();
    if m < 2 {
        return Err(Error::OrderOutOfRange { m, min: 2, max: crate::patterns::MAX_PROFILE_ORDER });
    }
    let w = sigma.window(i, j)?;
    let x = profile_of_values(&w, m)?[pattern_rank(tau.images())];
    let expected = BigRational::new(BigInt::from(binomial(w.len(), m)), BigInt::from(factorial(m)));
    let dev = BigRational::from_integer(BigInt::from(x)) - expected;
    Ok(if dev < BigRational::from_integer(BigInt::from(0)) { -dev } else { dev })
}

/// `X^{01} − X^{10}` of `σ` restricted to `I ∩ σ⁻¹(J)`.
pub fn two_pattern_balance(sigma: &Permutation, i: &CyclicInterval, j: &CyclicInterval) -> Result<i64> {
    let w = sigma.window(i, j)?;
    let pairs = binomial(w.len(), 2) as i64;
    let inv = count_inversions(&w) as i64;
    Ok(pairs - 2 * inv)
}

/// `∂_σ(S, T)`: pairs `x ∈ S`, `y ∈ T` with `x < y` and `σ(x) < σ(y)`.
pub fn cross_ascents(sigma: &Permutation, s: &[usize], t: &[usize]) -> u64 {
    let mut count = 0;
    for &x in s {
        for &y in t {
            count += (x < y && sigma.apply(x) < sigma.apply(y)) as u64;
        }
    }
    count
}

/// Lower bound on (unscaled) `D(σ)` for any `σ ∈ S_n` avoiding some
/// pattern of length `m`: `n·C(n,m) / (4·e^{2m}·m!·n^m)`.
pub fn exclusion_lower_bound(n: usize, m: usize) -> Result<f64> {
    if m < 2 || n <= m {
        return Err(Error::BadParameter(format!("need n > m >= 2, got n = {n}, m = {m}")));
    }
    // C(n,m)/n^m as a product keeps the intermediate values small
    let falling: f64 = (0..m).map(|i| (n - i) as f64 / n as f64).product();
    let mf = factorial(m) as f64;
    Ok(n as f64 * falling / (mf * mf) / (4.0 * E.powi(2 * m as i32)))
}

/// Constant for the simplified floor `n·(c/m²)^m`, valid when `n ≥ 2m`.
pub const EXCLUSION_FLOOR_C: f64 = 1.0 / (4.0 * E * E);

pub fn exclusion_floor(n: usize, m: usize) -> f64 {
    n as f64 * (EXCLUSION_FLOOR_C / (m * m) as f64).powi(m as i32)
}
