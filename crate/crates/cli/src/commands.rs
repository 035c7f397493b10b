use std::fs;
use std::path::{Path, PathBuf};

use clap::Args;
use num_traits::ToPrimitive;
use serde::Serialize;
use serde_json::{json, Map, Value};

use quasiperm::balance::{
    balance_certificate, eigenvalue_bound_profile, fourier_spectrum_fft, max_interval_discrepancy,
    multiple_discrepancy, sum_statistic,
};
use quasiperm::construct::{
    digit_reversal, inversion_distribution, mc_discrepancy_stats, product_bound, schmidt_floor, tensor_power,
    tensor_product,
};
use quasiperm::patterns::{
    all_patterns, build_pattern_matrices, occurrence_graph_connected, pattern_label, profile, rank_of_b,
    top_eigenvalue, MAX_RANK_ORDER,
};
use quasiperm::permdisc::{perm_discrepancy, perm_discrepancy_sampled, PermDiscrepancyReport, EXACT_LIMIT};
use quasiperm::symmetry::{divisibility_d, h, search_perfect, MAX_H_ORDER};
use quasiperm::zn::{parse_permutations, residue_abs};
use quasiperm::{Permutation, ZnSubset};

use crate::report::rational;
use crate::{Command, Failure};

type Outcome = Result<Value, Failure>;

/// Interval starts scanned in sampling mode unless `--sample` says otherwise.
const DEFAULT_SAMPLE_STARTS: usize = 64;

#[derive(Debug, Args, Serialize)]
pub struct AnalyzeSetArgs {
    /// File holding `n: e1 e2 ...`.
    #[arg(long)]
    pub set: PathBuf,
    /// Also report the discrepancy of the dilate kS.
    #[arg(long, allow_hyphen_values = true)]
    pub k: Option<i64>,
    /// Exponent of the eigenvalue profile max |S~(k)|/|k|^alpha.
    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct AnalyzePermArgs {
    /// File holding one permutation in one-line notation.
    #[arg(long)]
    pub perm: PathBuf,
    /// Force the exact O(n^3) scan at any size.
    #[arg(long, conflicts_with = "sample")]
    pub exact: bool,
    /// Scan only this many random interval starts (lower bound on D).
    #[arg(long)]
    pub sample: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct PatternCountArgs {
    #[arg(long)]
    pub perm: PathBuf,
    #[arg(long)]
    pub m: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct MatrixArgs {
    #[arg(long)]
    pub m: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct ConstructArgs {
    /// File of factor permutations, one per line; the product is the left fold.
    #[arg(long, group = "source")]
    pub factors: Option<PathBuf>,
    /// `N K`: the K-fold product of the identity on N symbols.
    #[arg(long, num_args = 2, value_names = ["N", "K"], group = "source")]
    pub power: Option<Vec<usize>>,
    /// `N K`: reversal of K-digit base-N expansions.
    #[arg(long, num_args = 2, value_names = ["N", "K"], group = "source")]
    pub digit_reversal: Option<Vec<usize>>,
    /// Force the exact discrepancy scan above the default size limit.
    #[arg(long)]
    pub exact: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct RandomStatsArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 50)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct InvdistArgs {
    #[arg(long)]
    pub n: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct SearchArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub m: usize,
    /// Node budget; required above n = 10.
    #[arg(long)]
    pub budget: Option<u64>,
}

#[derive(Debug, Args, Serialize)]
pub struct CertifyArgs {
    #[arg(long)]
    pub set: PathBuf,
}

pub fn run(cmd: &Command) -> Outcome {
    match cmd {
        Command::AnalyzeSet(a) => analyze_set(a),
        Command::AnalyzePerm(a) => analyze_perm(a),
        Command::PatternCount(a) => pattern_count(a),
        Command::Matrix(a) => matrix(a),
        Command::Construct(a) => construct(a),
        Command::RandomStats(a) => random_stats(a),
        Command::Invdist(a) => invdist(a),
        Command::SearchSymmetric(a) => search(a),
        Command::Certify(a) => certify(a),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn read_set(path: &Path) -> Result<ZnSubset, Failure> {
    read(path)?.parse::<ZnSubset>().map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn read_perms(path: &Path) -> Result<Vec<Permutation>, Failure> {
    parse_permutations(&read(path)?).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn read_one_perm(path: &Path) -> Result<Permutation, Failure> {
    let mut perms = read_perms(path)?;
    if perms.len() != 1 {
        return Err(Failure::Input(format!(
            "{}: expected exactly one permutation, found {}",
            path.display(),
            perms.len()
        )));
    }
    Ok(perms.remove(0))
}

fn scaled_rational(scaled: u64, n: usize, denom_factor: u64) -> Value {
    let (num, den) = (scaled, n as u64 * denom_factor);
    let g = gcd(num, den);
    rational(num / g, den / g, num as f64 / den as f64)
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a.max(1)
    } else {
        gcd(b, a % b)
    }
}

fn analyze_set(a: &AnalyzeSetArgs) -> Outcome {
    let s = read_set(&a.set)?;
    let n = s.modulus();
    let b = max_interval_discrepancy(&s);
    let comps = s.components();
    let profile = eigenvalue_bound_profile(&s, a.alpha)?;
    let top: Vec<Value> = fourier_spectrum_fft(&s)
        .top(5)
        .into_iter()
        .map(|(k, mag)| json!({"k": k, "magnitude": mag}))
        .collect();
    let mut out = json!({
        "n": n,
        "size": s.len(),
        "components": comps.count,
        "scaled_D": b.value,
        "D": scaled_rational(b.value, n, 1),
        "witness_J": b.witness,
        "eigenvalue_profile": {"alpha": a.alpha, "value": profile.value, "k": profile.witness},
        "sum_statistic": sum_statistic(&s),
        "top_fourier": top,
    });
    if let Some(k) = a.k {
        let m = multiple_discrepancy(&s, k)?;
        out["multiple"] = json!({
            "k": k,
            "abs_k": residue_abs(k, n),
            "scaled_D": m.value,
            "D": scaled_rational(m.value, n, 1),
            "witness_J": m.witness,
        });
    }
    Ok(out)
}

fn perm_report(r: &PermDiscrepancyReport) -> Value {
    let n = r.n;
    let floor = schmidt_floor(n);
    let d = r.discrepancy();
    json!({
        "n": n,
        "exact": r.exact,
        "lower_bound": !r.exact,
        "scaled_D": r.scaled.value,
        "D": scaled_rational(r.scaled.value, n, 1),
        "witnesses": {"I": r.scaled.i, "J": r.scaled.j},
        "scaled_d": r.scaled_d.value,
        "witnesses_d": {"I": r.scaled_d.i, "J": r.scaled_d.j},
        "scaled_d_prime": r.scaled_d_prime.value,
        "witnesses_d_prime": {"I": r.scaled_d_prime.i, "J": r.scaled_d_prime.j},
        "schmidt_floor": floor,
        "pass_schmidt": d > floor,
    })
}

fn discrepancy_of(sigma: &Permutation, exact: bool, sample: Option<usize>, seed: u64) -> PermDiscrepancyReport {
    match sample {
        Some(starts) => perm_discrepancy_sampled(sigma, starts, seed),
        None if exact || sigma.n() <= EXACT_LIMIT => perm_discrepancy(sigma),
        None => perm_discrepancy_sampled(sigma, DEFAULT_SAMPLE_STARTS, seed),
    }
}

fn analyze_perm(a: &AnalyzePermArgs) -> Outcome {
    let sigma = read_one_perm(&a.perm)?;
    Ok(perm_report(&discrepancy_of(&sigma, a.exact, a.sample, a.seed)))
}

fn pattern_count(a: &PatternCountArgs) -> Outcome {
    let sigma = read_one_perm(&a.perm)?;
    let v = profile(&sigma, a.m)?;
    let labels: Vec<String> = all_patterns(a.m).map(|t| pattern_label(&t)).collect();
    let mut counts = Map::new();
    let mut centered = Map::new();
    for ((label, &c), r) in labels.iter().zip(&v.counts).zip(v.centered()) {
        counts.insert(label.clone(), json!(c));
        let value = r.to_f64().unwrap_or(f64::NAN);
        centered.insert(label.clone(), rational(r.numer(), r.denom(), value));
    }
    let norm = v.centered_norm_sq();
    Ok(json!({
        "n": v.n,
        "m": v.m,
        "total": v.total().to_string(),
        "counts": counts,
        "centered": centered,
        "centered_norm_sq": rational(norm.numer(), norm.denom(), norm.to_f64().unwrap_or(f64::NAN)),
    }))
}

fn matrix(a: &MatrixArgs) -> Outcome {
    let pm = build_pattern_matrices(a.m)?;
    let lambda = top_eigenvalue(&pm)?;
    let rank = if a.m <= MAX_RANK_ORDER { Some(rank_of_b(a.m)?) } else { None };
    let k = (a.m + 1) as u64;
    Ok(json!({
        "m": a.m,
        "rows": all_patterns(a.m).map(|t| pattern_label(&t)).collect::<Vec<_>>(),
        "columns": all_patterns(a.m + 1).map(|t| pattern_label(&t)).collect::<Vec<_>>(),
        "B": pm.b_rows(),
        "A": pm.a_rows(),
        "b_row_sums": pm.b_row_sums(),
        "b_column_sums": pm.b_column_sums(),
        "a_row_sums": pm.a_row_sums(),
        "lambda_max": lambda,
        "lambda_expected": k * k * k,
        "rank_B": rank,
        "connected": occurrence_graph_connected(&pm),
    }))
}

fn pair(v: &[usize]) -> Result<(usize, u32), Failure> {
    let k = u32::try_from(v[1]).map_err(|_| Failure::Input(format!("power {} too large", v[1])))?;
    Ok((v[0], k))
}

fn construct(a: &ConstructArgs) -> Outcome {
    let (sigma, sizes) = if let Some(path) = &a.factors {
        let factors = read_perms(path)?;
        let sizes: Vec<usize> = factors.iter().map(Permutation::n).collect();
        (tensor_product(&factors)?, sizes)
    } else if let Some(v) = &a.power {
        let (n, k) = pair(v)?;
        (tensor_power(&Permutation::identity(n), k)?, vec![n; k as usize])
    } else if let Some(v) = &a.digit_reversal {
        let (n, k) = pair(v)?;
        (digit_reversal(n, k)?, vec![n; k as usize])
    } else {
        return Err(Failure::Input("one of --factors, --power, --digit-reversal is required".into()));
    };
    let bound = product_bound(&sizes)?;
    let report = discrepancy_of(&sigma, a.exact, None, a.seed);
    let n = sigma.n();
    let pass = report.scaled.value <= n as u64 * bound;
    Ok(json!({
        "n": n,
        "sizes": sizes,
        "permutation": sigma.images(),
        "bound": bound,
        "scaled_D": report.scaled.value,
        "D": scaled_rational(report.scaled.value, n, 1),
        "exact": report.exact,
        "witnesses": {"I": report.scaled.i, "J": report.scaled.j},
        "pass": pass,
        "schmidt_floor": schmidt_floor(n),
    }))
}

fn random_stats(a: &RandomStatsArgs) -> Outcome {
    let s = mc_discrepancy_stats(a.n, a.trials, a.seed)?;
    serde_json::to_value(s).map_err(|e| Failure::Internal(e.to_string()))
}

fn invdist(a: &InvdistArgs) -> Outcome {
    let d = inversion_distribution(a.n)?;
    let cube = (a.n as f64).powi(3) / 36.0;
    let var = d.variance.to_f64().unwrap_or(f64::NAN);
    Ok(json!({
        "n": a.n,
        "counts": d.counts.iter().map(ToString::to_string).collect::<Vec<_>>(),
        "total": d.total().to_string(),
        "mean": rational(d.mean.numer(), d.mean.denom(), d.mean.to_f64().unwrap_or(f64::NAN)),
        "variance": rational(d.variance.numer(), d.variance.denom(), var),
        "variance_over_n3_36": if cube > 0.0 { json!(var / cube) } else { Value::Null },
        "symmetric": d.is_symmetric(),
        "unimodal": d.is_unimodal(),
    }))
}

fn search(a: &SearchArgs) -> Outcome {
    let r = search_perfect(a.n, a.m, a.budget)?;
    let divisibility: Map<String, Value> =
        (2..=a.m).map(|k| (k.to_string(), json!(divisibility_d(a.n as u64, k as u64)))).collect();
    let h_m = if a.m <= MAX_H_ORDER { Some(h(a.m)?) } else { None };
    Ok(json!({
        "n": r.n,
        "m": r.m,
        "found": r.found.iter().map(Permutation::images).collect::<Vec<_>>(),
        "count": r.found.len(),
        "exhaustive": r.exhaustive,
        "nodes": r.nodes_explored,
        "divisibility": divisibility,
        "h_m": h_m,
    }))
}

fn certify(a: &CertifyArgs) -> Outcome {
    let s = read_set(&a.set)?;
    let c = balance_certificate(&s);
    let mut v = serde_json::to_value(&c).map_err(|e| Failure::Internal(e.to_string()))?;
    v["all_checks_hold"] = json!(c.all_checks_hold());
    Ok(v)
}
