//! Arithmetic on the cyclic group Z_n: residues, cyclic intervals, subsets,
//! multisets and permutations in one-line notation.
//!
//! Everything here is immutable after construction. Intervals are stored as
//! `(start, len)` so that the empty interval (`len == 0`) and the whole circle
//! (`len == n`) are unambiguous.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};

/// `|r|` for a residue: the absolute value of its representative in `(-n/2, n/2]`.
pub fn residue_abs(r: i64, n: usize) -> usize {
    let n_i = n as i64;
    let r = r.rem_euclid(n_i) as usize;
    if 2 * r > n {
        n - r
    } else {
        r
    }
}

/// An interval of Z_n: `{start, start + 1, ..., start + len - 1} mod n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct CyclicInterval {
    n: usize,
    start: usize,
    len: usize,
}

/// Flags describing how an interval sits inside `[0, n-1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct IntervalKind {
    /// The projection onto `[0, n-1]` is an integer interval (no wrap).
    pub is_contiguous: bool,
    /// The complement is contiguous.
    pub is_terminal: bool,
    /// Terminal and contains 0.
    pub is_initial: bool,
    /// Terminal and contains n-1.
    pub is_final: bool,
}

impl CyclicInterval {
    pub fn new(n: usize, start: usize, len: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroModulus);
        }
        if len > n {
            return Err(Error::BadInterval { len, n });
        }
        Ok(CyclicInterval { n, start: start % n, len })
    }

    pub fn empty(n: usize) -> Self {
        CyclicInterval { n, start: 0, len: 0 }
    }

    pub fn full(n: usize) -> Self {
        CyclicInterval { n, start: 0, len: n }
    }

    /// The interval `[a, b]` of integers, `a <= b < n`.
    pub fn from_range(n: usize, a: usize, b: usize) -> Result<Self> {
        if a > b || b >= n {
            return Err(Error::BadInterval { len: b.saturating_sub(a) + 1, n });
        }
        Self::new(n, a, b - a + 1)
    }

    pub fn modulus(&self) -> usize {
        self.n
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn is_full(&self) -> bool {
        self.len == self.n
    }

    /// True when the interval passes from `n-1` to `0`.
    pub fn wraps(&self) -> bool {
        self.start + self.len > self.n
    }

    pub fn contains(&self, x: usize) -> bool {
        let off = (x % self.n + self.n - self.start) % self.n;
        off < self.len
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).map(move |i| (self.start + i) % self.n)
    }

    pub fn complement(&self) -> Self {
        CyclicInterval {
            n: self.n,
            start: (self.start + self.len) % self.n,
            len: self.n - self.len,
        }
    }

    pub fn translate(&self, k: usize) -> Self {
        CyclicInterval { n: self.n, start: (self.start + k) % self.n, len: self.len }
    }

    pub fn to_subset(&self) -> ZnSubset {
        let mut s = ZnSubset::empty(self.n);
        for x in self.iter() {
            s.members[x] = true;
        }
        s
    }

    /// Every interval of Z_n: the empty one, the full one, and each proper
    /// nonempty `(start, len)` pair. `n(n-1) + 2` in total.
    pub fn all(n: usize) -> impl Iterator<Item = CyclicInterval> {
        let proper = (0..n).flat_map(move |s| (1..n).map(move |l| CyclicInterval { n, start: s, len: l }));
        std::iter::once(CyclicInterval::empty(n))
            .chain(proper)
            .chain(std::iter::once(CyclicInterval::full(n)))
    }

    pub fn classify(&self) -> Result<IntervalKind> {
        if self.len == 0 || self.len == self.n {
            return Err(Error::DegenerateInterval);
        }
        let is_contiguous = !self.wraps();
        let is_terminal = !self.complement().wraps();
        Ok(IntervalKind {
            is_contiguous,
            is_terminal,
            is_initial: is_terminal && self.contains(0),
            is_final: is_terminal && self.contains(self.n - 1),
        })
    }
}

impl fmt::Display for CyclicInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.len == 0 {
            write!(f, "{{}} in Z_{}", self.n)
        } else {
            let last = (self.start + self.len - 1) % self.n;
            write!(f, "[{}..{}] in Z_{}", self.start, last, self.n)
        }
    }
}

/// Read access to a nonnegative integer weight on Z_n. Implemented by sets
/// (0/1 weights) and multisets, so discrepancy and Fourier code serve both.
pub trait Weights {
    fn modulus(&self) -> usize;
    fn weight(&self, x: usize) -> u64;
    fn mass(&self) -> u64 {
        (0..self.modulus()).map(|x| self.weight(x)).sum()
    }
}

/// The minimal decomposition of a set into maximal cyclic intervals.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Components {
    pub count: usize,
    pub parts: Vec<CyclicInterval>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ZnSubset {
    n: usize,
    members: Vec<bool>,
}

impl ZnSubset {
    pub fn empty(n: usize) -> Self {
        ZnSubset { n, members: vec![false; n] }
    }

    pub fn full(n: usize) -> Self {
        ZnSubset { n, members: vec![true; n] }
    }

    pub fn from_indicator(members: Vec<bool>) -> Self {
        ZnSubset { n: members.len(), members }
    }

    pub fn from_elements<I: IntoIterator<Item = usize>>(n: usize, elems: I) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroModulus);
        }
        let mut s = ZnSubset::empty(n);
        for e in elems {
            if e >= n {
                return Err(Error::ElementOutOfRange { value: e, n });
            }
            s.members[e] = true;
        }
        Ok(s)
    }

    pub fn modulus(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.members.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.members.iter().any(|&b| b)
    }

    pub fn contains(&self, x: usize) -> bool {
        self.members[x % self.n]
    }

    pub fn indicator(&self) -> &[bool] {
        &self.members
    }

    pub fn elements(&self) -> Vec<usize> {
        (0..self.n).filter(|&x| self.members[x]).collect()
    }

    pub fn complement(&self) -> Self {
        ZnSubset { n: self.n, members: self.members.iter().map(|b| !b).collect() }
    }

    pub fn intersection(&self, other: &ZnSubset) -> Result<Self> {
        check_modulus(self.n, other.n)?;
        let members = self.members.iter().zip(&other.members).map(|(a, b)| *a && *b).collect();
        Ok(ZnSubset { n: self.n, members })
    }

    pub fn intersection_len(&self, other: &ZnSubset) -> Result<usize> {
        check_modulus(self.n, other.n)?;
        Ok(self.members.iter().zip(&other.members).filter(|(a, b)| **a && **b).count())
    }

    pub fn translate(&self, k: usize) -> Self {
        let mut members = vec![false; self.n];
        for x in 0..self.n {
            if self.members[x] {
                members[(x + k) % self.n] = true;
            }
        }
        ZnSubset { n: self.n, members }
    }

    /// Maximal cyclic runs of members, ordered by start.
    pub fn components(&self) -> Components {
        let n = self.n;
        let Some(gap) = (0..n).find(|&x| !self.members[x]) else {
            return Components { count: 1, parts: vec![CyclicInterval::full(n)] };
        };
        let mut parts = Vec::new();
        let mut run_start = None;
        for step in 1..=n {
            let x = (gap + step) % n;
            match (self.members[x], run_start) {
                (true, None) => run_start = Some((x, step)),
                (false, Some((s, s_step))) => {
                    parts.push(CyclicInterval { n, start: s, len: step - s_step });
                    run_start = None;
                }
                _ => {}
            }
        }
        parts.sort();
        Components { count: parts.len(), parts }
    }
}

impl Weights for ZnSubset {
    fn modulus(&self) -> usize {
        self.n
    }
    fn weight(&self, x: usize) -> u64 {
        self.members[x] as u64
    }
    fn mass(&self) -> u64 {
        self.len() as u64
    }
}

impl fmt::Display for ZnSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.n)?;
        for e in self.elements() {
            write!(f, " {e}")?;
        }
        Ok(())
    }
}

/// Parses the set text format `n: e1 e2 ...` (elements separated by
/// whitespace or commas).
impl FromStr for ZnSubset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (head, tail) = s
            .split_once(':')
            .ok_or_else(|| Error::BadSet("expected `n: e1 e2 ...`".into()))?;
        let n: usize = head
            .trim()
            .parse()
            .map_err(|_| Error::BadSet(format!("bad modulus {:?}", head.trim())))?;
        if n == 0 {
            return Err(Error::ZeroModulus);
        }
        let mut set = ZnSubset::empty(n);
        for tok in tokens(tail) {
            let e: usize = tok.parse().map_err(|_| Error::BadSet(format!("bad element {tok:?}")))?;
            if e >= n {
                return Err(Error::ElementOutOfRange { value: e, n });
            }
            if set.members[e] {
                return Err(Error::BadSet(format!("duplicate element {e}")));
            }
            set.members[e] = true;
        }
        Ok(set)
    }
}

/// A multiset on Z_n, stored as one multiplicity per residue.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZnMultiset {
    n: usize,
    mult: Vec<u64>,
}

impl ZnMultiset {
    pub fn from_multiplicities(mult: Vec<u64>) -> Self {
        ZnMultiset { n: mult.len(), mult }
    }

    pub fn from_subset(s: &ZnSubset) -> Self {
        ZnMultiset { n: s.n, mult: s.members.iter().map(|&b| b as u64).collect() }
    }

    /// The multiset `kS = {k s : s in S}`, with multiplicity.
    pub fn dilate(s: &ZnSubset, k: i64) -> Self {
        let n = s.n;
        let k = k.rem_euclid(n as i64) as usize;
        let mut mult = vec![0u64; n];
        for x in s.elements() {
            mult[(x * k) % n] += 1;
        }
        ZnMultiset { n, mult }
    }

    pub fn multiplicities(&self) -> &[u64] {
        &self.mult
    }
}

impl Weights for ZnMultiset {
    fn modulus(&self) -> usize {
        self.n
    }
    fn weight(&self, x: usize) -> u64 {
        self.mult[x]
    }
}

fn check_modulus(left: usize, right: usize) -> Result<()> {
    if left != right {
        return Err(Error::ModulusMismatch { left, right });
    }
    Ok(())
}

fn tokens(s: &str) -> impl Iterator<Item = &str> {
    s.split(|c: char| c.is_whitespace() || c == ',').filter(|t| !t.is_empty())
}

/// A permutation of `[0, n)` in one-line notation `σ(0), ..., σ(n-1)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        if n == 0 {
            return Err(Error::EmptyPermutation);
        }
        let mut seen = vec![false; n];
        for (index, &value) in images.iter().enumerate() {
            if value >= n {
                return Err(Error::ImageOutOfRange { index, value, n });
            }
            if seen[value] {
                return Err(Error::DuplicateImage { index, value });
            }
            seen[value] = true;
        }
        Ok(Permutation { images })
    }

    /// Skips validation; callers guarantee `images` is a bijection on `[0, n)`.
    pub(crate) fn from_images_unchecked(images: Vec<usize>) -> Self {
        debug_assert!(Permutation::new(images.clone()).is_ok());
        Permutation { images }
    }

    pub fn identity(n: usize) -> Self {
        Permutation { images: (0..n).collect() }
    }

    pub fn n(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn into_images(self) -> Vec<usize> {
        self.images
    }

    pub fn apply(&self, x: usize) -> usize {
        self.images[x]
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.n()];
        for (x, &y) in self.images.iter().enumerate() {
            inv[y] = x;
        }
        Permutation { images: inv }
    }

    /// `self ∘ other`, i.e. `x ↦ self(other(x))`.
    pub fn compose(&self, other: &Permutation) -> Result<Self> {
        check_modulus(self.n(), other.n())?;
        Ok(Permutation { images: other.images.iter().map(|&x| self.images[x]).collect() })
    }

    /// The one-line notation read backwards: `x ↦ σ(n-1-x)`.
    pub fn reverse(&self) -> Self {
        Permutation { images: self.images.iter().rev().copied().collect() }
    }

    /// `x ↦ n-1-σ(x)`.
    pub fn complement(&self) -> Self {
        let n = self.n();
        Permutation { images: self.images.iter().map(|&y| n - 1 - y).collect() }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &y)| i == y)
    }

    pub fn image_of_interval(&self, interval: &CyclicInterval) -> Result<ZnSubset> {
        check_modulus(self.n(), interval.modulus())?;
        let mut s = ZnSubset::empty(self.n());
        for x in interval.iter() {
            s.members[self.images[x]] = true;
        }
        Ok(s)
    }

    /// Images of the positions in `I ∩ σ⁻¹(J)`, in increasing position order.
    pub fn window(&self, source: &CyclicInterval, target: &CyclicInterval) -> Result<Vec<usize>> {
        check_modulus(self.n(), source.modulus())?;
        check_modulus(self.n(), target.modulus())?;
        Ok((0..self.n())
            .filter(|&x| source.contains(x) && target.contains(self.images[x]))
            .map(|x| self.images[x])
            .collect())
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for y in &self.images {
            if !first {
                f.write_str(" ")?;
            }
            write!(f, "{y}")?;
            first = false;
        }
        Ok(())
    }
}

impl FromStr for Permutation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_permutation(s)
    }
}

/// Parses one permutation: whitespace- or comma-separated 0-based images.
pub fn parse_permutation(text: &str) -> Result<Permutation> {
    let images = tokens(text)
        .enumerate()
        .map(|(index, tok)| {
            tok.parse::<usize>()
                .map_err(|_| Error::BadToken { index, token: tok.to_string() })
        })
        .collect::<Result<Vec<_>>>()?;
    Permutation::new(images)
}

/// Parses a file of permutations, one per line. Blank lines and lines starting
/// with `#` are skipped.
pub fn parse_permutations(text: &str) -> Result<Vec<Permutation>> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(parse_permutation)
        .collect()
}
