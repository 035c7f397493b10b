//! Perfect m-symmetry: every pattern of length m occurs exactly
//! `C(n, m)/m!` times.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::patterns::{binomial, factorial, profile, MAX_PROFILE_ORDER};
use crate::zn::Permutation;

/// Largest `n` searched exhaustively without a node budget.
pub const EXHAUSTIVE_SEARCH_LIMIT: usize = 10;
/// Default cap on the scan in [`h`]; `h(8) = 180225` fits well inside.
pub const H_SEARCH_CAP: u64 = 1_000_000;
pub const MAX_H_ORDER: usize = 8;

/// Whether `σ` is perfectly m′-symmetric for every `2 ≤ m′ ≤ m`.
pub fn is_perfect_m_symmetric(sigma: &Permutation, m: usize) -> Result<bool> {
    let n = sigma.n();
    if m > n {
        return Err(Error::PatternTooLong { m, n });
    }
    if !(2..=MAX_PROFILE_ORDER).contains(&m) {
        return Err(Error::OrderOutOfRange { m, min: 2, max: MAX_PROFILE_ORDER });
    }
    for k in 2..=m {
        if !divisibility_d(n as u64, k as u64) {
            return Ok(false);
        }
        let target = (binomial(n, k) / factorial(k) as u128) as u64;
        if profile(sigma, k)?.counts.iter().any(|&c| c != target) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Exponent of the prime `p` in `x!` (Legendre).
fn factorial_valuation(x: u64, p: u64) -> u64 {
    let (mut v, mut q) = (0, x);
    while q > 0 {
        q /= p;
        v += q;
    }
    v
}

/// Whether `m!` divides `C(n, m)`, decided prime by prime.
pub fn divisibility_d(n: u64, m: u64) -> bool {
    if m > n {
        return false;
    }
    (2..=m).filter(|&p| (2..p).take_while(|d| d * d <= p).all(|d| p % d != 0)).all(|p| {
        let binom = factorial_valuation(n, p) - factorial_valuation(m, p) - factorial_valuation(n - m, p);
        binom >= factorial_valuation(m, p)
    })
}

/// Least `n ≥ m` with `D(m′)` for every `2 ≤ m′ ≤ m`.
pub fn h(m: usize) -> Result<u64> {
    h_with_cap(m, H_SEARCH_CAP)
}

pub fn h_with_cap(m: usize, cap: u64) -> Result<u64> {
    if !(2..=MAX_H_ORDER).contains(&m) {
        return Err(Error::OrderOutOfRange { m, min: 2, max: MAX_H_ORDER });
    }
    (m as u64..=cap)
        .find(|&n| (2..=m as u64).all(|k| divisibility_d(n, k)))
        .ok_or(Error::SearchCapExceeded { cap: cap as usize })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymmetrySearchResult {
    pub n: usize,
    pub m: usize,
    /// Lexicographically sorted.
    pub found: Vec<Permutation>,
    pub nodes_explored: u64,
    /// True when the whole search tree was covered, so `found` is complete.
    pub exhaustive: bool,
}

/// Per-order running pattern counts for one prefix.
struct Counts {
    m: usize,
    fact: Vec<usize>,
    targets: Vec<u64>,
    /// `counts[k]` has `k!` entries, for `2 ≤ k ≤ m`.
    counts: Vec<Vec<u64>>,
}

impl Counts {
    fn new(n: usize, m: usize) -> Self {
        Counts {
            m,
            fact: (0..=m).map(|i| factorial(i) as usize).collect(),
            targets: (0..=m).map(|k| if k < 2 { 0 } else { (binomial(n, k) / factorial(k) as u128) as u64 }).collect(),
            counts: (0..=m).map(|k| vec![0; if k < 2 { 0 } else { factorial(k) as usize }]).collect(),
        }
    }

    /// Adds (or removes, with `sign = -1`) the occurrences that end at a
    /// newly appended value. Returns false if some count overshoots.
    fn update(&mut self, prefix: &[usize], v: usize, sign: i64) -> bool {
        let mut ok = true;
        for k in 2..=self.m.min(prefix.len() + 1) {
            let mut chosen = Vec::with_capacity(k);
            ok &= self.walk(prefix, v, k, 0, 0, &mut chosen, sign);
        }
        ok
    }

    #[allow(clippy::too_many_arguments)]
    fn walk(&mut self, prefix: &[usize], v: usize, k: usize, from: usize, rank: usize, chosen: &mut Vec<usize>, sign: i64) -> bool {
        if chosen.len() == k - 1 {
            let mut r = rank;
            for (i, &c) in chosen.iter().enumerate() {
                if c > v {
                    r += self.fact[k - 1 - i];
                }
            }
            let slot = &mut self.counts[k][r];
            *slot = (*slot as i64 + sign) as u64;
            return *slot <= self.targets[k];
        }
        let mut ok = true;
        for pos in from..=prefix.len() - (k - 1 - chosen.len()) {
            let w = prefix[pos];
            let mut r = rank;
            for (i, &c) in chosen.iter().enumerate() {
                if c > w {
                    r += self.fact[k - 1 - i];
                }
            }
            chosen.push(w);
            ok &= self.walk(prefix, v, k, pos + 1, r, chosen, sign);
            chosen.pop();
        }
        ok
    }
}

struct Search {
    n: usize,
    budget: Option<u64>,
    nodes: u64,
    out_of_budget: bool,
    found: Vec<Permutation>,
}

impl Search {
    fn extend(&mut self, prefix: &mut Vec<usize>, used: &mut [bool], counts: &mut Counts) {
        if prefix.len() == self.n {
            self.found.push(Permutation::new(prefix.clone()).expect("bijection"));
            return;
        }
        for v in 0..self.n {
            if used[v] {
                continue;
            }
            if self.budget.is_some_and(|b| self.nodes >= b) {
                self.out_of_budget = true;
                return;
            }
            self.nodes += 1;
            let ok = counts.update(prefix, v, 1);
            if ok {
                used[v] = true;
                prefix.push(v);
                self.extend(prefix, used, counts);
                prefix.pop();
                used[v] = false;
            }
            counts.update(prefix, v, -1);
            if self.out_of_budget {
                return;
            }
        }
    }
}

/// Backtracking search for perfectly m-symmetric permutations of `[0, n)`.
///
/// Prefixes are abandoned as soon as some pattern count of some order
/// `m′ ≤ m` exceeds its target (counts only grow as a prefix extends).
/// Without a budget the tree is split by first value across threads; with a
/// budget the search runs sequentially so the covered part is reproducible.
pub fn search_perfect(n: usize, m: usize, budget: Option<u64>) -> Result<SymmetrySearchResult> {
    if m > n {
        return Err(Error::PatternTooLong { m, n });
    }
    if !(2..=MAX_PROFILE_ORDER).contains(&m) {
        return Err(Error::OrderOutOfRange { m, min: 2, max: MAX_PROFILE_ORDER });
    }
    if n > EXHAUSTIVE_SEARCH_LIMIT && budget.is_none() {
        return Err(Error::SearchRefused { n, limit: EXHAUSTIVE_SEARCH_LIMIT });
    }
    let empty = |exhaustive| SymmetrySearchResult { n, m, found: Vec::new(), nodes_explored: 0, exhaustive };
    if (2..=m).any(|k| !divisibility_d(n as u64, k as u64)) {
        return Ok(empty(true));
    }
    let run = |first: Option<usize>, budget: Option<u64>| {
        let mut s = Search { n, budget, nodes: 0, out_of_budget: false, found: Vec::new() };
        let mut counts = Counts::new(n, m);
        let mut used = vec![false; n];
        let mut prefix = Vec::with_capacity(n);
        match first {
            Some(v) => {
                s.nodes = 1;
                used[v] = true;
                prefix.push(v);
                s.extend(&mut prefix, &mut used, &mut counts);
            }
            None => s.extend(&mut prefix, &mut used, &mut counts),
        }
        s
    };
    let (mut found, nodes, exhaustive) = match budget {
        Some(b) => {
            let s = run(None, Some(b));
            (s.found, s.nodes, !s.out_of_budget)
        }
        None => {
            let parts: Vec<Search> = (0..n).into_par_iter().map(|v| run(Some(v), None)).collect();
            let nodes = parts.iter().map(|s| s.nodes).sum();
            (parts.into_iter().flat_map(|s| s.found).collect(), nodes, true)
        }
    };
    found.sort();
    Ok(SymmetrySearchResult { n, m, found, nodes_explored: nodes, exhaustive })
}
