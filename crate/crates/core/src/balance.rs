//! Balance statistics for subsets (and multisets) of Z_n.
//!
//! Discrepancies are reported n-scaled so they stay integral:
//! `n·D_T(S) = |n·|S∩T| − |S|·|T||`. Fourier-derived statistics are `f64`.
//!
//! [`balance_certificate`] evaluates every statistic on one set and checks the
//! quantitative inequalities that chain them together (subadditivity, the
//! dilation bound, the eigenvalue bounds, the spectral translation identity).

use std::f64::consts::PI;

use num_complex::Complex64;
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::zn::{residue_abs, CyclicInterval, Weights, ZnMultiset, ZnSubset};

/// A maximal discrepancy value together with an interval attaining it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Extremal {
    pub value: u64,
    pub witness: CyclicInterval,
}

/// `n·D_T(S)` for a set or multiset `S` and a set `T`.
pub fn scaled_discrepancy_in<W: Weights>(s: &W, t: &ZnSubset) -> Result<u64> {
    let n = s.modulus();
    if n != t.modulus() {
        return Err(Error::ModulusMismatch { left: n, right: t.modulus() });
    }
    let meet: u64 = t.elements().into_iter().map(|x| s.weight(x)).sum();
    Ok(scaled_gap(n, meet, s.mass(), t.len() as u64))
}

/// `n·D_J(S)` for an interval `J`, without materialising `J` as a set.
pub fn scaled_discrepancy_on_interval<W: Weights>(s: &W, j: &CyclicInterval) -> Result<u64> {
    let n = s.modulus();
    if n != j.modulus() {
        return Err(Error::ModulusMismatch { left: n, right: j.modulus() });
    }
    let meet: u64 = j.iter().map(|x| s.weight(x)).sum();
    Ok(scaled_gap(n, meet, s.mass(), j.len() as u64))
}

fn scaled_gap(n: usize, meet: u64, mass: u64, size: u64) -> u64 {
    (n as u64 * meet).abs_diff(mass * size)
}

/// Max of `n·D_J` over all cyclic intervals `J` for a weight function on Z_n.
///
/// With `g(j) = n·P(j) − mass·(j+1)` and `g(−1) = g(n−1) = 0`, a
/// non-wrapping interval `[a, b]` has signed scaled discrepancy
/// `g(b) − g(a−1)`. A wrapping interval has the same absolute discrepancy as
/// its (non-wrapping) complement, so the answer is `max g − min g`.
pub(crate) fn interval_extreme(n: usize, mass: u64, weight: impl Fn(usize) -> u64) -> Extremal {
    let (n_i, mass_i) = (n as i64, mass as i64);
    let (mut g, mut prefix) = (0i64, 0i64);
    // positions are shifted by one: position p holds g(p − 1)
    let (mut hi, mut hi_pos, mut lo, mut lo_pos) = (0i64, 0usize, 0i64, 0usize);
    for j in 0..n {
        prefix += weight(j) as i64;
        g = n_i * prefix - mass_i * (j as i64 + 1);
        if g > hi {
            hi = g;
            hi_pos = j + 1;
        }
        if g < lo {
            lo = g;
            lo_pos = j + 1;
        }
    }
    debug_assert_eq!(g, 0);
    let (a, b) = (hi_pos.min(lo_pos), hi_pos.max(lo_pos));
    let witness = if a == b {
        CyclicInterval::empty(n)
    } else {
        CyclicInterval::new(n, a, b - a).expect("length below n")
    };
    Extremal { value: (hi - lo) as u64, witness }
}

/// `n·D(S)`: the largest scaled discrepancy of `S` over all cyclic intervals,
/// in O(n).
pub fn max_interval_discrepancy<W: Weights>(s: &W) -> Extremal {
    interval_extreme(s.modulus(), s.mass(), |x| s.weight(x))
}

/// `n·D(kS)` where `kS` is the dilated multiset.
pub fn multiple_discrepancy(s: &ZnSubset, k: i64) -> Result<Extremal> {
    let n = s.modulus();
    if k.rem_euclid(n as i64) == 0 {
        return Err(Error::ZeroMultiplier { k, n });
    }
    Ok(max_interval_discrepancy(&ZnMultiset::dilate(s, k)))
}

/// Number of translates `J + x` with `n·D_{J+x}(S) ≥ threshold`.
pub fn translates_at_least(s: &ZnSubset, j: &CyclicInterval, threshold: u64) -> Result<usize> {
    let mut count = 0;
    for x in 0..s.modulus() {
        if scaled_discrepancy_on_interval(s, &j.translate(x))? >= threshold {
            count += 1;
        }
    }
    Ok(count)
}

/// The Fourier coefficients `f̃(k) = Σ_x f(x) e^{−2πikx/n}` for `k = 0..n`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierSpectrum {
    coeffs: Vec<Complex64>,
}

impl FourierSpectrum {
    pub fn n(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Complex64 {
        self.coeffs[k % self.n()]
    }

    pub fn magnitude(&self, k: usize) -> f64 {
        self.coeff(k).norm()
    }

    /// `max_{k≠0} |f̃(k)| / |k|^α` and the first `k` attaining it.
    pub fn eigenvalue_bound(&self, alpha: f64) -> Result<EigenProfile> {
        if alpha.is_nan() || alpha <= 0.0 {
            return Err(Error::BadParameter(format!("alpha must be positive, got {alpha}")));
        }
        let n = self.n();
        let mut best = EigenProfile { value: 0.0, witness: None };
        for k in 1..n {
            let v = self.magnitude(k) / (residue_abs(k as i64, n) as f64).powf(alpha);
            if best.witness.is_none() || v > best.value {
                best = EigenProfile { value: v, witness: Some(k) };
            }
        }
        Ok(best)
    }

    /// `Σ_{k≠0} (|f̃(k)|/|k|)²`.
    pub fn sum_statistic(&self) -> f64 {
        let n = self.n();
        (1..n)
            .map(|k| {
                let r = self.magnitude(k) / residue_abs(k as i64, n) as f64;
                r * r
            })
            .sum()
    }

    /// The `(k, |f̃(k)|)` pairs with the largest magnitudes, `k ≠ 0`, ties by `k`.
    pub fn top(&self, count: usize) -> Vec<(usize, f64)> {
        let mut v: Vec<_> = (1..self.n()).map(|k| (k, self.magnitude(k))).collect();
        v.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        v.truncate(count);
        v
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EigenProfile {
    pub value: f64,
    pub witness: Option<usize>,
}

fn roots_of_unity(n: usize) -> Vec<Complex64> {
    (0..n).map(|j| Complex64::from_polar(1.0, -2.0 * PI * j as f64 / n as f64)).collect()
}

/// Direct O(n²) transform. Multisets are transformed with their multiplicities.
pub fn fourier_spectrum<W: Weights>(s: &W) -> FourierSpectrum {
    let n = s.modulus();
    let roots = roots_of_unity(n);
    let support: Vec<(usize, f64)> = (0..n)
        .filter_map(|x| {
            let w = s.weight(x);
            (w > 0).then_some((x, w as f64))
        })
        .collect();
    let coeffs = (0..n)
        .map(|k| support.iter().map(|&(x, w)| roots[(k * x) % n] * w).sum())
        .collect();
    FourierSpectrum { coeffs }
}

/// FFT path; agrees with [`fourier_spectrum`] to rounding.
pub fn fourier_spectrum_fft<W: Weights>(s: &W) -> FourierSpectrum {
    let n = s.modulus();
    let mut buf: Vec<Complex64> = (0..n).map(|x| Complex64::new(s.weight(x) as f64, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    FourierSpectrum { coeffs: buf }
}

pub fn eigenvalue_bound_profile(s: &ZnSubset, alpha: f64) -> Result<EigenProfile> {
    fourier_spectrum_fft(s).eigenvalue_bound(alpha)
}

pub fn sum_statistic(s: &ZnSubset) -> f64 {
    fourier_spectrum_fft(s).sum_statistic()
}

/// `|J̃(k)|` for any interval of length `len`, from the geometric-sum closed form.
pub fn interval_coefficient_magnitude(n: usize, len: usize, k: usize) -> f64 {
    if k.is_multiple_of(n) {
        return len as f64;
    }
    let t = PI * k as f64 / n as f64;
    ((t * len as f64).sin() / t.sin()).abs()
}

/// `Σ_k (|S∩(J+k)| − |S||J|/n)²`, evaluated by direct counting and through
/// the spectral identity `Σ_{k≠0} |S̃(k)·J̃(−k)|² / n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TranslationStatistic {
    /// `n²·direct`, exact.
    pub scaled_direct: u128,
    pub direct: f64,
    pub spectral: f64,
}

impl TranslationStatistic {
    /// Difference of the two paths relative to `max(1, |value|)`.
    pub fn relative_gap(&self) -> f64 {
        let scale = self.direct.abs().max(self.spectral.abs()).max(1.0);
        (self.direct - self.spectral).abs() / scale
    }
}

pub fn translation_statistic(s: &ZnSubset, j: &CyclicInterval) -> Result<TranslationStatistic> {
    let n = s.modulus();
    if n != j.modulus() {
        return Err(Error::ModulusMismatch { left: n, right: j.modulus() });
    }
    let spec = fourier_spectrum_fft(s);
    Ok(translation_for_length(s, &spec, j.len()))
}

/// The statistic depends on `J` only through `|J|`: translating `J`
/// permutes the summands.
fn translation_for_length(s: &ZnSubset, spec: &FourierSpectrum, len: usize) -> TranslationStatistic {
    let n = s.modulus();
    let ind = s.indicator();
    let size = s.len() as i128;
    // sliding window count of |S ∩ ([0, len) + k)|
    let mut count: i128 = (0..len).filter(|&x| ind[x % n]).count() as i128;
    let mut scaled: u128 = 0;
    for k in 0..n {
        let dev = n as i128 * count - size * len as i128;
        scaled += (dev * dev) as u128;
        if ind[(k + len) % n] {
            count += 1;
        }
        if ind[k] {
            count -= 1;
        }
    }
    let nn = (n * n) as f64;
    let spectral = (1..n)
        .map(|k| {
            let a = spec.magnitude(k) * interval_coefficient_magnitude(n, len, k);
            a * a
        })
        .sum::<f64>()
        / n as f64;
    TranslationStatistic { scaled_direct: scaled, direct: scaled as f64 / nn, spectral }
}

/// One checked inequality `lhs ≤ rhs`, reported at its tightest instance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InequalityCheck {
    pub name: &'static str,
    pub lhs: f64,
    pub rhs: f64,
    /// The `k` (or interval length) at which `lhs − rhs` is largest.
    pub witness: Option<i64>,
    /// False when the hypothesis of the inequality does not hold for this set.
    pub applicable: bool,
    pub holds: bool,
}

impl InequalityCheck {
    fn new(name: &'static str) -> Self {
        InequalityCheck {
            name,
            lhs: 0.0,
            rhs: 0.0,
            witness: None,
            applicable: true,
            holds: true,
        }
    }

    /// Records one instance; `ok` is decided by the caller, exactly where possible.
    fn observe(&mut self, lhs: f64, rhs: f64, witness: Option<i64>, ok: bool) {
        if self.witness.is_none() && self.lhs == 0.0 && self.rhs == 0.0 || lhs - rhs > self.lhs - self.rhs {
            self.lhs = lhs;
            self.rhs = rhs;
            self.witness = witness;
        }
        self.holds &= ok;
    }

    fn observe_float(&mut self, lhs: f64, rhs: f64, witness: Option<i64>) {
        let ok = lhs <= rhs + FLOAT_SLACK * rhs.abs().max(1.0);
        self.observe(lhs, rhs, witness, ok);
    }
}

/// Relative slack for inequalities whose sides are only known in floating point.
pub const FLOAT_SLACK: f64 = 1e-9;

/// Agreement required between the two translation-statistic paths.
pub const TRANSLATION_AGREEMENT: f64 = 1e-6;

/// How the universal quantifier over `T` in the piecewise statistic was sampled.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PiecewiseSampling {
    /// Every interval is covered exactly through `D(S)`.
    pub all_intervals: bool,
    /// Every `T` with at most two components was enumerated (only for small n).
    pub all_two_component: bool,
    pub random_sets: usize,
    pub seed: u64,
}

pub const PIECEWISE_EXHAUSTIVE_MAX_N: usize = 20;
pub const PIECEWISE_RANDOM_SETS: usize = 1000;
pub const PIECEWISE_SEED: u64 = 0x5151_ba1a_0ce5_eed5;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BalanceCertificate {
    pub n: usize,
    pub size: usize,
    #[serde(serialize_with = "crate::exact::serialize_ratio")]
    pub eps_b: Ratio<u64>,
    pub witness_b: CyclicInterval,
    #[serde(serialize_with = "crate::exact::serialize_ratio")]
    pub eps_pb: Ratio<u64>,
    pub witness_pb: Vec<usize>,
    pub pb_sampling: PiecewiseSampling,
    #[serde(serialize_with = "crate::exact::serialize_ratio")]
    pub eps_mb: Ratio<u64>,
    pub witness_mb: Option<i64>,
    pub eps_e_half: f64,
    pub witness_e_half: Option<usize>,
    pub eps_e_one: f64,
    pub eps_s: f64,
    pub eps_t: f64,
    /// Interval of the maximising length; every translate gives the same value.
    pub witness_t: CyclicInterval,
    pub checks: Vec<InequalityCheck>,
}

impl BalanceCertificate {
    pub fn all_checks_hold(&self) -> bool {
        self.checks.iter().all(|c| !c.applicable || c.holds)
    }

    pub fn check(&self, name: &str) -> Option<&InequalityCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn ratio_f64(r: &Ratio<u64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Computes every balance statistic of `S` and checks the inequalities that
/// link them.
pub fn balance_certificate(s: &ZnSubset) -> BalanceCertificate {
    let n = s.modulus();
    let nn = (n * n) as u64;
    let size = s.len();
    let spec = fourier_spectrum_fft(s);

    let b = max_interval_discrepancy(s);
    let eps_b = Ratio::new(b.value, nn);

    // Piecewise balance: intervals give exactly eps_b, so start there.
    let mut eps_pb = eps_b;
    let mut witness_pb = b.witness.to_subset().elements();
    let mut consider = |t: &ZnSubset| {
        let c = t.components().count as u64;
        if c == 0 {
            return;
        }
        let r = Ratio::new(scaled_discrepancy_in(s, t).expect("same modulus"), nn * c);
        if r > eps_pb {
            eps_pb = r;
            witness_pb = t.elements();
        }
    };
    let exhaustive = n <= PIECEWISE_EXHAUSTIVE_MAX_N;
    if exhaustive {
        for mask in 0u32..(1u32 << n) {
            let t = ZnSubset::from_indicator((0..n).map(|x| mask >> x & 1 == 1).collect());
            if t.components().count == 2 {
                consider(&t);
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(PIECEWISE_SEED);
        for _ in 0..PIECEWISE_RANDOM_SETS {
            let t = ZnSubset::from_indicator((0..n).map(|_| rng.random::<bool>()).collect());
            consider(&t);
        }
    }
    let pb_sampling = PiecewiseSampling {
        all_intervals: true,
        all_two_component: exhaustive,
        random_sets: if exhaustive { 0 } else { PIECEWISE_RANDOM_SETS },
        seed: PIECEWISE_SEED,
    };

    let dilated: Vec<(i64, u64)> = (1..n)
        .map(|k| (k as i64, multiple_discrepancy(s, k as i64).expect("k nonzero").value))
        .collect();
    let mut eps_mb = Ratio::new(0u64, 1);
    let mut witness_mb = None;
    for &(k, v) in &dilated {
        let r = Ratio::new(v, nn * residue_abs(k, n) as u64);
        if witness_mb.is_none() || r > eps_mb {
            eps_mb = r;
            witness_mb = Some(k);
        }
    }

    let e_half = spec.eigenvalue_bound(0.5).expect("alpha positive");
    let e_one = spec.eigenvalue_bound(1.0).expect("alpha positive");
    let eps_e_half = e_half.value / n as f64;
    let eps_e_one = e_one.value / n as f64;
    let sum = spec.sum_statistic();
    let eps_s = sum / nn as f64;

    let translations: Vec<TranslationStatistic> =
        (0..=n).map(|len| translation_for_length(s, &spec, len)).collect();
    let (t_len, t_max) = translations
        .iter()
        .enumerate()
        .fold((0, 0u128), |acc, (len, t)| if t.scaled_direct > acc.1 { (len, t.scaled_direct) } else { acc });
    let eps_t = t_max as f64 / (nn as f64 * nn as f64 * n as f64);
    let witness_t = CyclicInterval::new(n, 0, t_len).expect("length at most n");

    let mut checks = Vec::new();

    // [B] ⇒ [PB]: subadditivity over the components of T.
    let mut c = InequalityCheck::new("B=>PB: eps_PB <= eps_B");
    c.observe(ratio_f64(&eps_pb), ratio_f64(&eps_b), None, eps_pb <= eps_b);
    checks.push(c);

    // [PB] ⇒ [MB]: {x : kx ∈ J} has at most |k| components and its size is
    // off from |J| by at most gcd(k, n) ≤ |k|.
    let mut derived = InequalityCheck::new("PB=>MB: n*D(kS) <= |k|(n^2 eps_PB + |S|)");
    let mut doubled = InequalityCheck::new("PB=>MB: D(kS) <= 2 eps_PB n |k|");
    doubled.applicable = *eps_pb.numer() as u128 * n as u128 >= *eps_pb.denom() as u128;
    let (pn, pd) = (*eps_pb.numer() as u128, *eps_pb.denom() as u128);
    for &(k, v) in &dilated {
        let ak = residue_abs(k, n) as u128;
        let lhs = v as u128 * pd;
        let rhs = ak * (nn as u128 * pn + size as u128 * pd);
        derived.observe(v as f64, rhs as f64 / pd as f64, Some(k), lhs <= rhs);
        let rhs2 = 2 * pn * nn as u128 * ak;
        doubled.observe(v as f64, rhs2 as f64 / pd as f64, Some(k), lhs <= rhs2);
    }
    checks.push(derived);
    checks.push(doubled);

    // [MB] ⇒ [E(1/2)], valid below eps_MB = π/8.
    let mut c = InequalityCheck::new("MB=>E(1/2): |S~(k)| <= n sqrt(18 pi eps_MB |k|)");
    let emb = ratio_f64(&eps_mb);
    c.applicable = emb <= PI / 8.0;
    for k in 1..n {
        let rhs = n as f64 * (18.0 * PI * emb * residue_abs(k as i64, n) as f64).sqrt();
        c.observe_float(spec.magnitude(k), rhs, Some(k as i64));
    }
    checks.push(c);

    // [E(α)] ⇒ [E(β)] with M = ⌈α/β⌉ = 2 for both pairs.
    for (name, eps, beta) in [
        ("E(1/2)=>E(1/4): |S~(k)| <= eps_E(1/2)^(1/2) n |k|^(1/4)", eps_e_half, 0.25),
        ("E(1)=>E(1/2): |S~(k)| <= eps_E(1)^(1/2) n |k|^(1/2)", eps_e_one, 0.5),
    ] {
        let mut c = InequalityCheck::new(name);
        for k in 1..n {
            let rhs = eps.sqrt() * n as f64 * (residue_abs(k as i64, n) as f64).powf(beta);
            c.observe_float(spec.magnitude(k), rhs, Some(k as i64));
        }
        checks.push(c);
    }

    // [E(1/2)] ⇒ [S]: Σ_{k≠0} |k|^{-3/2} < 6.
    let mut c = InequalityCheck::new("E(1/2)=>S: eps_S <= 6 eps_E(1/2)");
    c.observe_float(eps_s, 6.0 * eps_e_half, None);
    checks.push(c);

    // [S] ⇒ [T] through the spectral identity and |J̃(k)| ≤ n/(2|k|).
    let mut c = InequalityCheck::new("S=>T: translation(S,J) <= (n/4) sum(S)");
    let mut agree = InequalityCheck::new("translation: direct and spectral paths agree");
    for (len, t) in translations.iter().enumerate() {
        c.observe_float(t.direct, n as f64 / 4.0 * sum, Some(len as i64));
        let gap = t.relative_gap();
        agree.observe(gap, TRANSLATION_AGREEMENT, Some(len as i64), gap <= TRANSLATION_AGREEMENT);
    }
    checks.push(c);
    checks.push(agree);

    // [T] ⇒ [B]: a discrepancy D at J forces D/2 at ~D translates of J.
    let mut c = InequalityCheck::new("T=>B: eps_B <= 2 eps_T^(1/3)");
    c.observe_float(ratio_f64(&eps_b), 2.0 * eps_t.cbrt(), None);
    checks.push(c);

    let mut c = InequalityCheck::new("Parseval: sum |S~(k)|^2 = n|S|");
    let energy: f64 = spec.coeffs().iter().map(|z| z.norm_sqr()).sum();
    let target = (n * size) as f64;
    let gap = (energy - target).abs() / target.max(1.0);
    c.observe(gap, FLOAT_SLACK, None, gap <= FLOAT_SLACK);
    checks.push(c);

    BalanceCertificate {
        n,
        size,
        eps_b,
        witness_b: b.witness,
        eps_pb,
        witness_pb,
        pb_sampling,
        eps_mb,
        witness_mb,
        eps_e_half,
        witness_e_half: e_half.witness,
        eps_e_one,
        eps_s,
        eps_t,
        witness_t,
        checks,
    }
}
