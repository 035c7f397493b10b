//! Constructions and baselines: the `⊗` product and its powers, digit
//! reversal, the product discrepancy bound, random permutations and the exact
//! distribution of the inversion count.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::permdisc::perm_discrepancy;
use crate::zn::Permutation;

/// Largest permutation the constructions will materialise.
pub const MAX_CONSTRUCT_SIZE: usize = 1 << 26;
/// Largest `n` for [`inversion_distribution`].
pub const MAX_INVERSION_N: usize = 200;

/// `(σ⊗τ)(x) = τ(⌊x/n⌋) + m·σ(x mod n)` for `σ ∈ S_n`, `τ ∈ S_m`.
pub fn tensor(sigma: &Permutation, tau: &Permutation) -> Permutation {
    let (n, m) = (sigma.n(), tau.n());
    let images = (0..n * m).map(|x| tau.apply(x / n) + m * sigma.apply(x % n)).collect();
    Permutation::from_images_unchecked(images)
}

/// Left fold of [`tensor`]; every factor must have size at least 2.
pub fn tensor_product(factors: &[Permutation]) -> Result<Permutation> {
    let Some(first) = factors.first() else {
        return Err(Error::BadParameter("no factors".into()));
    };
    let mut size = 1usize;
    for f in factors {
        if f.n() < 2 {
            return Err(Error::FactorTooSmall(f.n()));
        }
        size = size
            .checked_mul(f.n())
            .filter(|&s| s <= MAX_CONSTRUCT_SIZE)
            .ok_or(Error::SizeOverflow { base: f.n(), exp: factors.len() as u32 })?;
    }
    Ok(factors[1..].iter().fold(first.clone(), |acc, f| tensor(&acc, f)))
}

fn checked_size(base: usize, exp: u32) -> Result<usize> {
    base.checked_pow(exp)
        .filter(|&s| s <= MAX_CONSTRUCT_SIZE)
        .ok_or(Error::SizeOverflow { base, exp })
}

/// `σ^{(k)}`, the k-fold product of `σ` with itself.
pub fn tensor_power(sigma: &Permutation, k: u32) -> Result<Permutation> {
    if k == 0 {
        return Err(Error::BadParameter("power must be at least 1".into()));
    }
    checked_size(sigma.n(), k)?;
    Ok((1..k).fold(sigma.clone(), |acc, _| tensor(&acc, sigma)))
}

/// `x ↦` the reversal of the k-digit base-n expansion of `x`.
pub fn digit_reversal(n: usize, k: u32) -> Result<Permutation> {
    if n < 2 {
        return Err(Error::FactorTooSmall(n));
    }
    if k == 0 {
        return Err(Error::BadParameter("digit count must be at least 1".into()));
    }
    let size = checked_size(n, k)?;
    let images = (0..size)
        .map(|mut x| {
            let mut y = 0;
            for _ in 0..k {
                y = y * n + x % n;
                x /= n;
            }
            y
        })
        .collect();
    Ok(Permutation::from_images_unchecked(images))
}

/// Upper bound on (unscaled) `D(σ₁⊗…⊗σ_k)` from the factor sizes alone:
/// `n_k + 2·Σ_{i<k} n_i − 2k + 1`.
pub fn product_bound(sizes: &[usize]) -> Result<u64> {
    let Some((&last, rest)) = sizes.split_last() else {
        return Err(Error::BadParameter("no factors".into()));
    };
    if let Some(&bad) = sizes.iter().find(|&&s| s < 2) {
        return Err(Error::FactorTooSmall(bad));
    }
    let k = sizes.len() as u64;
    Ok(last as u64 + 2 * rest.iter().map(|&s| s as u64).sum::<u64>() + 1 - 2 * k)
}

/// `ln(N)/100 − 1`; every permutation of size `N` has `D(σ)` above it.
pub fn schmidt_floor(size: usize) -> f64 {
    (size as f64).ln() / 100.0 - 1.0
}

/// `x ↦ x + n (mod 2n)`.
pub fn shift_counterexample(n: usize) -> Result<Permutation> {
    if n == 0 {
        return Err(Error::BadParameter("half-size must be at least 1".into()));
    }
    Ok(Permutation::from_images_unchecked((0..2 * n).map(|x| (x + n) % (2 * n)).collect()))
}

/// Uniform permutation by Fisher–Yates driven by ChaCha8 seeded with `seed`,
/// so the output is the same on every platform.
pub fn random_permutation(n: usize, seed: u64) -> Result<Permutation> {
    if n == 0 {
        return Err(Error::EmptyPermutation);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.random_range(0..=i as u64) as usize;
        v.swap(i, j);
    }
    Ok(Permutation::from_images_unchecked(v))
}

/// Number of permutations of `[0, n)` with each inversion count: the
/// coefficients of the q-factorial `[n]!`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InversionDistribution {
    pub n: usize,
    pub counts: Vec<BigUint>,
    pub mean: BigRational,
    pub variance: BigRational,
}

impl InversionDistribution {
    pub fn total(&self) -> BigUint {
        self.counts.iter().sum()
    }

    pub fn is_symmetric(&self) -> bool {
        self.counts.iter().eq(self.counts.iter().rev())
    }

    /// Non-decreasing then non-increasing.
    pub fn is_unimodal(&self) -> bool {
        let mut falling = false;
        for w in self.counts.windows(2) {
            if w[1] < w[0] {
                falling = true;
            } else if falling && w[1] > w[0] {
                return false;
            }
        }
        true
    }
}

pub fn inversion_distribution(n: usize) -> Result<InversionDistribution> {
    if n > MAX_INVERSION_N {
        return Err(Error::BadParameter(format!("n = {n} exceeds {MAX_INVERSION_N}")));
    }
    let mut counts = vec![BigUint::one()];
    for i in 2..=n {
        // multiply by 1 + q + … + q^{i−1} with a sliding window sum
        let len = counts.len() + i - 1;
        let mut next = Vec::with_capacity(len);
        let mut window = BigUint::zero();
        for d in 0..len {
            if d < counts.len() {
                window += &counts[d];
            }
            if d >= i {
                window -= &counts[d - i];
            }
            next.push(window.clone());
        }
        counts = next;
    }
    let total: BigInt = counts.iter().map(|c| BigInt::from(c.clone())).sum();
    let (mut s1, mut s2) = (BigInt::zero(), BigInt::zero());
    for (d, c) in counts.iter().enumerate() {
        let c = BigInt::from(c.clone());
        let d = BigInt::from(d);
        s1 += &d * &c;
        s2 += &d * &d * &c;
    }
    let mean = BigRational::new(s1, total.clone());
    let variance = BigRational::new(s2, total) - &mean * &mean;
    Ok(InversionDistribution { n, counts, mean, variance })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McSummary {
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    /// `n·D(σ)` per trial, trial `t` seeded with `seed ^ t`.
    pub scaled: Vec<u64>,
    /// `D(σ)/√(n ln n)` per trial (0 when `n = 1`).
    pub ratios: Vec<f64>,
    pub median_ratio: f64,
    pub max_ratio: f64,
    pub schmidt_floor: f64,
    pub all_above_floor: bool,
}

/// Exact `D(σ)` of `trials` random permutations, normalised by `√(n ln n)`.
pub fn mc_discrepancy_stats(n: usize, trials: usize, seed: u64) -> Result<McSummary> {
    if trials == 0 {
        return Err(Error::BadParameter("trials must be at least 1".into()));
    }
    if n == 0 {
        return Err(Error::EmptyPermutation);
    }
    let scaled: Vec<u64> = (0..trials as u64)
        .into_par_iter()
        .map(|t| perm_discrepancy(&random_permutation(n, seed ^ t).expect("n ≥ 1")).scaled.value)
        .collect();
    let norm = (n as f64 * (n as f64).ln()).sqrt();
    let ratios: Vec<f64> = scaled
        .iter()
        .map(|&s| if norm > 0.0 { s as f64 / n as f64 / norm } else { 0.0 })
        .collect();
    let mut sorted = ratios.clone();
    sorted.sort_by(f64::total_cmp);
    let mid = sorted.len() / 2;
    let median_ratio = if sorted.len() % 2 == 1 { sorted[mid] } else { (sorted[mid - 1] + sorted[mid]) / 2.0 };
    let floor = schmidt_floor(n);
    Ok(McSummary {
        n,
        trials,
        seed,
        all_above_floor: scaled.iter().all(|&s| s as f64 / n as f64 > floor),
        max_ratio: *sorted.last().expect("trials ≥ 1"),
        median_ratio,
        scaled,
        ratios,
        schmidt_floor: floor,
    })
}
