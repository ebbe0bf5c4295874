//! Reproduction harness: declarative sweeps over (scheme, n, alpha, seed)
//! cells, scaling-exponent regression, and the named verification suites.
//! CSV/JSON outputs are byte-deterministic for a fixed master seed: cell
//! seeds derive from a stable hash, cells run independently, and rows are
//! written in sorted order.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{interference_bound, interference_power_mean, measured_interference, ChannelParams};
use crate::cutset::{
    self, build_equalized_matrix, catalan, compute_cut, cutset_upper_bound, d_regular, dense_simo_upper_bound,
    dk_closed_bounds, p_tot, spectral_norm_sq, trace_moment, trace_moment_exact_l2,
};
use crate::derive_seed;
use crate::error::{Error, Result};
use crate::hierarchy::{run_bursty_extended, run_hierarchical, run_multihop_baseline, SchemeConfig};
use crate::mimo::{received_power_bounds, MimoSession};
use crate::net::{occupancy_exponent, ClusterGrid, NetworkInstance, Regime};

pub const SCHEMA_VERSION: u32 = 1;
pub const CSV_HEADER: &str = "scheme,n,alpha,h,seed,rate,duty_cycle,failure,p_tot,bound,runtime_ms";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    Hierarchical,
    Bursty,
    Multihop,
    Tdma,
    Cutset,
    DenseBound,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::Hierarchical => "hierarchical",
            Scheme::Bursty => "bursty",
            Scheme::Multihop => "multihop",
            Scheme::Tdma => "tdma",
            Scheme::Cutset => "cutset",
            Scheme::DenseBound => "dense_bound",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepConfig {
    pub n_list: Vec<usize>,
    pub alpha_list: Vec<f64>,
    pub schemes: Vec<Scheme>,
    #[serde(default = "default_levels")]
    pub levels_h: usize,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output_path: Option<PathBuf>,
    /// Channel constants shared by all cells.
    #[serde(default = "default_gain")]
    pub gain_const: f64,
    #[serde(default = "default_power")]
    pub power: f64,
    #[serde(default = "default_noise")]
    pub noise: f64,
    /// Cutset bound slack exponent.
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    /// Record wall-clock runtimes in the CSV. Off by default so that two
    /// runs of the same sweep are byte-identical.
    #[serde(default)]
    pub record_timings: bool,
}

fn default_levels() -> usize {
    1
}
fn default_trials() -> usize {
    1
}
fn default_gain() -> f64 {
    1.0
}
fn default_power() -> f64 {
    1.0
}
fn default_noise() -> f64 {
    1.0
}
fn default_epsilon() -> f64 {
    0.05
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_list.len() < 3 {
            return Err(Error::invalid("need at least 3 network sizes for regression"));
        }
        if !self.n_list.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::invalid("n_list must be strictly increasing"));
        }
        if self.trials < 1 {
            return Err(Error::invalid("trials must be at least 1"));
        }
        if self.schemes.is_empty() {
            return Err(Error::invalid("no schemes selected"));
        }
        for &a in &self.alpha_list {
            if a < 2.0 {
                return Err(Error::invalid(format!("alpha {a} below model range (alpha >= 2)")));
            }
        }
        if self.alpha_list.is_empty() {
            return Err(Error::invalid("alpha_list must be nonempty"));
        }
        Ok(())
    }

    pub fn params(&self, alpha: f64) -> Result<ChannelParams> {
        ChannelParams::new(self.gain_const, alpha, self.power, self.noise)
    }
}

/// Least-squares fit of log value against log n.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ExponentFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub stderr: f64,
    /// Exponent of a (ln n)^p correction: the configured power when one was
    /// divided out beforehand, or the jointly fitted power.
    pub log_correction_power: Option<f64>,
}

/// Fit slope of ln(value) on ln(n), optionally dividing the values by
/// (ln n)^power first.
pub fn fit_scaling_exponent(points: &[(f64, f64)], correct_logs: Option<f64>) -> Result<ExponentFit> {
    if points.len() < 3 {
        return Err(Error::invalid("need at least 3 points"));
    }
    let mut xs = Vec::with_capacity(points.len());
    let mut ys = Vec::with_capacity(points.len());
    for &(n, v) in points {
        if !(v > 0.0) || !(n > 1.0) {
            return Err(Error::invalid(format!("point ({n}, {v}) not positive / n too small")));
        }
        let corrected = match correct_logs {
            Some(p) => v / n.ln().powf(p),
            None => v,
        };
        xs.push(n.ln());
        ys.push(corrected.ln());
    }
    let (slope, intercept, r_squared, stderr) = linear_fit(&xs, &ys);
    Ok(ExponentFit {
        slope,
        intercept,
        r_squared,
        stderr,
        log_correction_power: correct_logs,
    })
}

/// Joint fit ln v = s ln n + p ln ln n + c, reporting the power-law slope s
/// with the fitted log power p. ln n and ln ln n are nearly collinear at
/// desk scale, so p is reported but should not be over-read.
pub fn fit_with_log_power(points: &[(f64, f64)]) -> Result<ExponentFit> {
    if points.len() < 4 {
        return Err(Error::invalid("need at least 4 points for the joint fit"));
    }
    let mut rows = Vec::with_capacity(points.len());
    let mut ys = Vec::with_capacity(points.len());
    for &(n, v) in points {
        if !(v > 0.0) || !(n > std::f64::consts::E) {
            return Err(Error::invalid(format!("point ({n}, {v}) unusable for the joint fit")));
        }
        rows.push([1.0, n.ln(), n.ln().ln()]);
        ys.push(v.ln());
    }
    // Normal equations for the 3-parameter least squares.
    let mut ata = [[0.0f64; 3]; 3];
    let mut aty = [0.0f64; 3];
    for (row, &y) in rows.iter().zip(ys.iter()) {
        for i in 0..3 {
            for j in 0..3 {
                ata[i][j] += row[i] * row[j];
            }
            aty[i] += row[i] * y;
        }
    }
    let coef = solve3(ata, aty).ok_or_else(|| Error::numeric("singular normal equations"))?;
    // Residual diagnostics against the plain power-law slope variance.
    let mut ss_res = 0.0;
    let mut mean_y = 0.0;
    for &y in &ys {
        mean_y += y;
    }
    mean_y /= ys.len() as f64;
    let mut ss_tot = 0.0;
    for (row, &y) in rows.iter().zip(ys.iter()) {
        let fit = coef[0] * row[0] + coef[1] * row[1] + coef[2] * row[2];
        ss_res += (y - fit).powi(2);
        ss_tot += (y - mean_y).powi(2);
    }
    let r_squared = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    Ok(ExponentFit {
        slope: coef[1],
        intercept: coef[0],
        r_squared,
        stderr: (ss_res / (points.len() as f64 - 3.0).max(1.0)).sqrt(),
        log_correction_power: Some(coef[2]),
    })
}

/// Slope fit with the log power restricted to a physically sensible range:
/// grid-search p over [lo, hi], divide the values by (ln n)^p, and keep the
/// p minimizing the residual. Stable where the unconstrained joint fit runs
/// along the ln n / ln ln n collinearity ridge.
pub fn fit_with_bounded_log_power(points: &[(f64, f64)], lo: f64, hi: f64) -> Result<ExponentFit> {
    if !(lo <= hi) {
        return Err(Error::invalid("empty log-power range"));
    }
    let steps = ((hi - lo) * 16.0).round().max(1.0) as usize;
    let xs: Vec<f64> = points.iter().map(|&(n, _)| n.ln()).collect();
    let mut best: Option<(f64, ExponentFit)> = None;
    for i in 0..=steps {
        let p = lo + (hi - lo) * i as f64 / steps as f64;
        let mut ys = Vec::with_capacity(points.len());
        for &(n, v) in points {
            if !(v > 0.0) || !(n > std::f64::consts::E) {
                return Err(Error::invalid(format!("point ({n}, {v}) unusable")));
            }
            ys.push((v / n.ln().powf(p)).ln());
        }
        let (slope, intercept, r_squared, stderr) = linear_fit(&xs, &ys);
        let ss_res: f64 = xs
            .iter()
            .zip(&ys)
            .map(|(x, y)| (y - intercept - slope * x).powi(2))
            .sum();
        if best.as_ref().map_or(true, |(b, _)| ss_res < *b) {
            best = Some((
                ss_res,
                ExponentFit {
                    slope,
                    intercept,
                    r_squared,
                    stderr,
                    log_correction_power: Some(p),
                },
            ));
        }
    }
    Ok(best.unwrap().1)
}

fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64, f64) {
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xs.iter().zip(ys).map(|(x, y)| (y - (intercept + slope * x)).powi(2)).sum();
    let ss_tot: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let r_squared = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    let stderr = if xs.len() > 2 {
        (ss_res / (k - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    (slope, intercept, r_squared, stderr)
}

fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let pivot = (col..3).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in 0..3 {
            if row != col {
                let f = a[row][col] / a[col][col];
                for k in 0..3 {
                    a[row][k] -= f * a[col][k];
                }
                b[row] -= f * b[col];
            }
        }
    }
    Some([b[0] / a[0][0], b[1] / a[1][1], b[2] / a[2][2]])
}

/// One evaluated sweep cell.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub scheme: Scheme,
    pub n: usize,
    pub alpha: f64,
    pub h: usize,
    pub seed: u64,
    pub rate: Option<f64>,
    pub duty_cycle: Option<f64>,
    pub failure: bool,
    pub p_tot: Option<f64>,
    pub bound: Option<f64>,
    pub runtime_ms: u64,
}

impl SweepRow {
    fn csv_line(&self) -> String {
        let opt = |v: &Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            self.scheme.name(),
            self.n,
            self.alpha,
            self.h,
            self.seed,
            opt(&self.rate),
            opt(&self.duty_cycle),
            self.failure,
            opt(&self.p_tot),
            opt(&self.bound),
            self.runtime_ms
        )
    }
}

/// Evaluate one cell. The cell seed already encodes (scheme, n, alpha,
/// trial), so adding schemes or trials never perturbs other cells.
pub fn run_cell(
    scheme: Scheme,
    n: usize,
    alpha: f64,
    h: usize,
    seed: u64,
    cfg: &SweepConfig,
) -> Result<SweepRow> {
    let params = cfg.params(alpha)?;
    let started = std::time::Instant::now();
    let mut row = SweepRow {
        scheme,
        n,
        alpha,
        h,
        seed,
        rate: None,
        duty_cycle: None,
        failure: false,
        p_tot: None,
        bound: None,
        runtime_ms: 0,
    };
    match scheme {
        Scheme::Tdma | Scheme::Hierarchical => {
            let inst = NetworkInstance::sample(n, Regime::Dense, seed)?.with_random_pairing(derive_seed(seed, &[2]));
            let mut scfg = SchemeConfig::new(if scheme == Scheme::Tdma { 0 } else { h });
            scfg.alpha_mode = None;
            let report = run_hierarchical(&inst, &params, &scfg)?;
            row.rate = Some(report.aggregate_rate);
            row.duty_cycle = Some(report.duty_cycle);
            row.failure = report.failure;
        }
        Scheme::Bursty => {
            let inst =
                NetworkInstance::sample(n, Regime::Extended, seed)?.with_random_pairing(derive_seed(seed, &[2]));
            let report = run_bursty_extended(&inst, &params, &SchemeConfig::new(h))?;
            row.rate = Some(report.aggregate_rate);
            row.duty_cycle = Some(report.duty_cycle);
            row.failure = report.failure;
        }
        Scheme::Multihop => {
            let inst =
                NetworkInstance::sample(n, Regime::Extended, seed)?.with_random_pairing(derive_seed(seed, &[2]));
            let report = run_multihop_baseline(&inst, &params)?;
            row.rate = Some(report.aggregate_rate);
            row.duty_cycle = Some(report.duty_cycle);
            row.failure = report.failure;
        }
        Scheme::Cutset => {
            let inst =
                NetworkInstance::sample(n, Regime::Extended, seed)?.with_random_pairing(derive_seed(seed, &[2]));
            let cut = compute_cut(&inst)?;
            row.p_tot = Some(p_tot(&inst, &cut, &params));
            row.bound = Some(cutset_upper_bound(&inst, &cut, &params, cfg.epsilon)?);
        }
        Scheme::DenseBound => {
            let inst = NetworkInstance::sample(n, Regime::Dense, seed)?;
            row.bound = Some(dense_simo_upper_bound(&inst, &params)?);
        }
    }
    row.runtime_ms = if cfg.record_timings {
        started.elapsed().as_millis() as u64
    } else {
        0
    };
    Ok(row)
}

#[derive(Debug, Clone, Serialize)]
pub struct SchemeSummary {
    pub scheme: Scheme,
    pub alpha: f64,
    pub fit: Option<ExponentFit>,
    pub failure_fraction: f64,
    pub mean_by_n: Vec<(usize, f64)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepSummary {
    pub schema_version: u32,
    pub seed: u64,
    pub rows: usize,
    pub cell_errors: usize,
    pub summaries: Vec<SchemeSummary>,
    pub total_runtime_ms: u64,
}

pub struct SweepOutput {
    pub rows: Vec<SweepRow>,
    pub summary: SweepSummary,
    pub csv: String,
}

/// Run every (scheme, n, alpha, trial) cell, in parallel, with
/// deterministic sorted output. Returns the rows, the per-(scheme, alpha)
/// exponent fits, and the rendered CSV.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepOutput> {
    cfg.validate()?;
    let started = std::time::Instant::now();
    let mut cells = Vec::new();
    for &scheme in &cfg.schemes {
        for &n in &cfg.n_list {
            for &alpha in &cfg.alpha_list {
                for trial in 0..cfg.trials {
                    let seed = derive_seed(
                        cfg.seed,
                        &[
                            scheme.name().len() as u64 ^ hash_str(scheme.name()),
                            n as u64,
                            alpha.to_bits(),
                            trial as u64,
                        ],
                    );
                    cells.push((scheme, n, alpha, trial, seed));
                }
            }
        }
    }
    let results: Vec<std::result::Result<SweepRow, String>> = cells
        .par_iter()
        .map(|&(scheme, n, alpha, _trial, seed)| {
            run_cell(scheme, n, alpha, cfg.levels_h, seed, cfg).map_err(|e| e.to_string())
        })
        .collect();

    let mut rows = Vec::new();
    let mut cell_errors = 0usize;
    for r in results {
        match r {
            Ok(row) => rows.push(row),
            Err(_) => cell_errors += 1,
        }
    }
    rows.sort_by(|a, b| {
        (a.scheme, a.n, a.alpha.to_bits(), a.seed).cmp(&(b.scheme, b.n, b.alpha.to_bits(), b.seed))
    });

    // Per-(scheme, alpha) summaries over the mean value at each n.
    let mut groups: BTreeMap<(Scheme, u64), BTreeMap<usize, Vec<&SweepRow>>> = BTreeMap::new();
    for row in &rows {
        groups
            .entry((row.scheme, row.alpha.to_bits()))
            .or_default()
            .entry(row.n)
            .or_default()
            .push(row);
    }
    let mut summaries = Vec::new();
    for ((scheme, alpha_bits), by_n) in groups {
        let alpha = f64::from_bits(alpha_bits);
        let mut points = Vec::new();
        let mut failures = 0usize;
        let mut total = 0usize;
        for (&n, cell_rows) in &by_n {
            let mut acc = 0.0;
            let mut cnt = 0usize;
            for row in cell_rows {
                total += 1;
                failures += usize::from(row.failure);
                let v = match scheme {
                    Scheme::Cutset => row.p_tot,
                    Scheme::DenseBound => row.bound,
                    _ => row.rate,
                };
                if let Some(v) = v {
                    acc += v;
                    cnt += 1;
                }
            }
            if cnt > 0 {
                points.push((n, acc / cnt as f64));
            }
        }
        let fit_points: Vec<(f64, f64)> = points.iter().map(|&(n, v)| (n as f64, v)).collect();
        let fit = fit_scaling_exponent(&fit_points, None).ok();
        summaries.push(SchemeSummary {
            scheme,
            alpha,
            fit,
            failure_fraction: if total > 0 { failures as f64 / total as f64 } else { 0.0 },
            mean_by_n: points,
        });
    }

    let mut csv = String::with_capacity(rows.len() * 64 + CSV_HEADER.len() + 1);
    csv.push_str(CSV_HEADER);
    csv.push('\n');
    for row in &rows {
        let _ = writeln!(csv, "{}", row.csv_line());
    }

    let summary = SweepSummary {
        schema_version: SCHEMA_VERSION,
        seed: cfg.seed,
        rows: rows.len(),
        cell_errors,
        summaries,
        total_runtime_ms: started.elapsed().as_millis() as u64,
    };
    Ok(SweepOutput {
        rows,
        summary,
        csv,
    })
}

fn hash_str(s: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in s.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x1000_0000_01b3);
    }
    h
}

/// Write sweep outputs under `dir` as sweep.csv and summary.json.
pub fn write_sweep_output(out: &SweepOutput, dir: &Path) -> Result<(PathBuf, PathBuf)> {
    std::fs::create_dir_all(dir)?;
    let csv_path = dir.join("sweep.csv");
    std::fs::write(&csv_path, &out.csv)?;
    let summary_path = dir.join("summary.json");
    std::fs::write(&summary_path, serde_json::to_string_pretty(&out.summary)?)?;
    Ok((csv_path, summary_path))
}

// ---------------------------------------------------------------------------
// Verification suites
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerifyConfig {
    #[serde(default = "default_verify_seeds")]
    pub seeds: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_verify_alpha")]
    pub alpha: f64,
    #[serde(default = "default_gain")]
    pub gain_const: f64,
    #[serde(default = "default_power")]
    pub power: f64,
    #[serde(default = "default_noise")]
    pub noise: f64,
}

fn default_verify_seeds() -> usize {
    60
}
fn default_verify_alpha() -> f64 {
    3.0
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            seeds: default_verify_seeds(),
            seed: 0,
            alpha: default_verify_alpha(),
            gain_const: 1.0,
            power: 1.0,
            noise: 1.0,
        }
    }
}

impl VerifyConfig {
    pub fn validate(&self) -> Result<()> {
        if self.alpha < 2.0 {
            return Err(Error::invalid(format!("alpha {} below model range", self.alpha)));
        }
        if self.seeds < 1 {
            return Err(Error::invalid("need at least one seed"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteResult {
    pub name: String,
    pub pass: bool,
    /// How far inside (positive) or outside (negative) the requirement the
    /// measurement landed, in units natural to the suite.
    pub margin: f64,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub schema_version: u32,
    pub suites: Vec<SuiteResult>,
    pub all_pass: bool,
}

/// Run the named property suites: occupancy concentration, squarelet
/// statistics, interference accounting, received-power bounds, the
/// regular-lattice weight sandwich, equalized-matrix identities, trace
/// moments, and the Catalan recurrence.
pub fn verify_lemmas(cfg: &VerifyConfig) -> Result<VerifyReport> {
    cfg.validate()?;
    let mut suites = Vec::new();

    suites.push(suite_cell_concentration(cfg)?);
    suites.push(suite_squarelets(cfg)?);
    suites.push(suite_interference(cfg)?);
    suites.push(suite_received_power(cfg)?);
    suites.push(suite_dk_sandwich()?);
    suites.push(suite_column_norms(cfg)?);
    suites.push(suite_trace_moments(cfg)?);
    suites.push(suite_catalan()?);

    let all_pass = suites.iter().all(|s| s.pass);
    Ok(VerifyReport {
        schema_version: SCHEMA_VERSION,
        suites,
        all_pass,
    })
}

/// Cell occupancy concentration: empirical band-violation frequency versus
/// the analytic tail bound (cells/band from the large-deviation exponent).
fn suite_cell_concentration(cfg: &VerifyConfig) -> Result<SuiteResult> {
    let n = 10_000usize;
    let delta = 0.5;
    let mut worst_margin = f64::INFINITY;
    let mut detail = String::new();
    let mut pass = true;
    for m in [100usize, 1000] {
        let lo = (1.0 - delta) * m as f64;
        let hi = (1.0 + delta) * m as f64;
        let violations: usize = (0..cfg.seeds)
            .into_par_iter()
            .map(|t| {
                let seed = derive_seed(cfg.seed, &[0xce11, m as u64, t as u64]);
                let inst = NetworkInstance::sample(n, Regime::Dense, seed).unwrap();
                let grid = ClusterGrid::build(&inst, m).unwrap();
                let stats = grid.occupancy_stats();
                usize::from((stats.min_count as f64) < lo || (stats.max_count as f64) > hi)
            })
            .sum();
        let freq = violations as f64 / cfg.seeds as f64;
        let bound = (n as f64 / m as f64) * (-occupancy_exponent(delta) * m as f64).exp();
        // One-sided binomial slack at ~3 sigma so a finite-seed estimate of
        // a rate exactly at the bound still passes.
        let slack = 3.0 * (bound.max(1.0 / cfg.seeds as f64) / cfg.seeds as f64).sqrt();
        if freq > bound + slack {
            pass = false;
        }
        worst_margin = worst_margin.min(bound + slack - freq);
        let _ = write!(detail, "M={m}: freq {freq:.4} vs bound {bound:.2e}; ");
    }
    Ok(SuiteResult {
        name: "cell_concentration".into(),
        pass,
        margin: worst_margin,
        detail,
    })
}

/// Squarelet statistics: unit-occupancy tail frequency against the union
/// bound, guaranteed occupancy at area 2 ln n, and median-cut crossing
/// counts within (1 +- 0.25) n/4.
fn suite_squarelets(cfg: &VerifyConfig) -> Result<SuiteResult> {
    let n = 1024usize;
    let results: Vec<(bool, bool, bool)> = (0..cfg.seeds)
        .into_par_iter()
        .map(|t| {
            let seed = derive_seed(cfg.seed, &[0x509, t as u64]);
            let inst = NetworkInstance::sample(n, Regime::Extended, seed)
                .unwrap()
                .with_random_pairing(derive_seed(seed, &[1]));
            let st = inst.squarelet_checks().unwrap();
            let quarter = n as f64 / 4.0;
            (
                (st.max_unit_occupancy as f64) < (n as f64).ln(),
                st.all_2logn_occupied,
                (st.crossing_count as f64 - quarter).abs() <= 0.25 * quarter,
            )
        })
        .collect();
    let seeds = cfg.seeds as f64;
    let occ_rate = results.iter().filter(|r| !r.0).count() as f64 / seeds;
    let cover_rate = results.iter().filter(|r| !r.1).count() as f64 / seeds;
    let crossing_ok = results.iter().filter(|r| r.2).count() as f64 / seeds;

    // Union tail bound for the unit-occupancy event: n P(Poisson(1) >= ln n).
    let ln_n = (n as f64).ln();
    let k0 = ln_n.ceil() as u64;
    let mut tail = 0.0;
    let mut term = (-1.0f64).exp();
    for k in 1..=k0 + 30 {
        term /= k as f64;
        if k >= k0 {
            tail += term;
        }
    }
    let occ_bound = (n as f64 * tail).min(1.0);
    let occ_slack = 3.0 * (occ_bound.max(1.0 / seeds) / seeds).sqrt();
    let cover_bound = (n as f64 / (2.0 * ln_n) * (-2.0 * ln_n).exp()).min(1.0);
    let cover_slack = 3.0 * (cover_bound.max(1.0 / seeds) / seeds).sqrt() + 1.0 / seeds;

    let pass = occ_rate <= occ_bound + occ_slack && cover_rate <= cover_bound + cover_slack && crossing_ok >= 0.95;
    Ok(SuiteResult {
        name: "squarelet_occupancy".into(),
        pass,
        margin: (occ_bound + occ_slack - occ_rate)
            .min(cover_bound + cover_slack - cover_rate)
            .min(crossing_ok - 0.95),
        detail: format!(
            "unit-occupancy violations {occ_rate:.3} (bound {occ_bound:.3}); empty 2ln(n) squarelet {cover_rate:.4} (bound {cover_bound:.2e}); crossings in band {crossing_ok:.3}"
        ),
    })
}

/// 9-TDMA interference: phase-averaged power at every probe below the ring
/// bound; Monte Carlo cross-correlation between co-located probes small.
fn suite_interference(cfg: &VerifyConfig) -> Result<SuiteResult> {
    let n = 4096usize;
    let m = 64usize;
    let params = ChannelParams::new(cfg.gain_const, cfg.alpha.max(2.5), cfg.power, cfg.noise)?;
    let seed = derive_seed(cfg.seed, &[0x1f2]);
    let inst = NetworkInstance::sample(n, Regime::Dense, seed)?;
    let grid = ClusterGrid::build(&inst, m)?;
    let bound = interference_bound(&params, params.power, n / m);
    let mut worst = f64::INFINITY;
    let mut violations = 0usize;
    for cell in 0..grid.num_cells() {
        for &probe in grid.members(cell).iter().take(1) {
            let v = interference_power_mean(&inst, &grid, grid.color(cell), probe, &params)?;
            worst = worst.min(bound - v);
            violations += usize::from(v > bound);
        }
    }
    // Correlation check on one probe pair.
    let cell = (0..grid.num_cells()).find(|&c| grid.members(c).len() >= 2).unwrap_or(0);
    let probe = grid.members(cell)[0];
    let stats = measured_interference(&inst, &grid, grid.color(cell), probe, &params, seed ^ 1, 10_000)?;
    let corr_ok = stats.mean_power <= 0.0 || stats.cross_correlation / stats.mean_power < 0.05;
    let pass = violations == 0 && corr_ok;
    Ok(SuiteResult {
        name: "interference_bound".into(),
        pass,
        margin: worst,
        detail: format!(
            "{violations} probes above bound {bound:.4}; cross-correlation ratio {:.4}",
            if stats.mean_power > 0.0 {
                stats.cross_correlation / stats.mean_power
            } else {
                0.0
            }
        ),
    })
}

/// Received power in the long-range phase within [P1, P2] at every
/// destination of every far session.
fn suite_received_power(cfg: &VerifyConfig) -> Result<SuiteResult> {
    let params = ChannelParams::new(cfg.gain_const, cfg.alpha, cfg.power, cfg.noise)?;
    let (p1, p2) = received_power_bounds(&params);
    let mut sessions = 0usize;
    let mut violations = 0usize;
    let mut worst: f64 = f64::INFINITY;
    let mut t = 0u64;
    while sessions < 1000 {
        let seed = derive_seed(cfg.seed, &[0x9e7, t]);
        t += 1;
        let inst = NetworkInstance::sample(512, Regime::Dense, seed)?;
        let grid = ClusterGrid::build(&inst, 32)?;
        let g = grid.dim();
        for sx in 0..g {
            for sy in 0..g {
                // a representative far partner two cells away
                let (dx, dy) = ((sx + 2) % g, (sy + 2) % g);
                let (src, dst) = (grid.cell_index(sx, sy), grid.cell_index(dx, dy));
                if src == dst || grid.cell_chebyshev(src, dst) < 2 {
                    continue;
                }
                if grid.members(src).is_empty() || grid.members(dst).is_empty() {
                    continue;
                }
                let session = MimoSession::build(&inst, &grid, &params, src, dst)?;
                for d in 0..session.rx_nodes.len() {
                    let power = session.expected_rx_power(&inst, &params, d);
                    worst = worst.min((power - p1).min(p2 - power));
                    violations += usize::from(power < p1 || power > p2);
                }
                sessions += 1;
                if sessions >= 1000 {
                    break;
                }
            }
            if sessions >= 1000 {
                break;
            }
        }
    }
    Ok(SuiteResult {
        name: "received_power".into(),
        pass: violations == 0,
        margin: worst,
        detail: format!("{sessions} sessions, {violations} destinations outside [{p1:.4}, {p2:.4}]"),
    })
}

/// Regular-lattice weight sandwiched by the computed integral bounds on a
/// 64x64 grid for the standard path-loss exponents.
fn suite_dk_sandwich() -> Result<SuiteResult> {
    let sqrt_n = 64usize;
    let n = sqrt_n * sqrt_n;
    let mut worst = f64::INFINITY;
    let mut violations = 0usize;
    for &alpha in &[2.0, 2.5, 3.0, 4.0] {
        for kx in 1..=sqrt_n {
            for ky in 1..=sqrt_n {
                let d = d_regular(kx, ky, sqrt_n, alpha);
                let (lo, hi) = dk_closed_bounds(kx, n, alpha);
                worst = worst.min((d - lo).min(hi - d));
                violations += usize::from(d < lo - 1e-12 || d > hi + 1e-12);
            }
        }
    }
    Ok(SuiteResult {
        name: "dk_sandwich".into(),
        pass: violations == 0,
        margin: worst,
        detail: format!("{violations} grid points outside the sandwich on 64x64"),
    })
}

/// Equalized-matrix identities: unit column norms and trace = |S|.
fn suite_column_norms(cfg: &VerifyConfig) -> Result<SuiteResult> {
    let mut worst: f64 = 0.0;
    for t in 0..cfg.seeds.min(20) {
        let seed = derive_seed(cfg.seed, &[0xc01, t as u64]);
        let inst = NetworkInstance::sample(512, Regime::Extended, seed)?;
        let cut = compute_cut(&inst)?;
        if cut.far.is_empty() || cut.left.is_empty() {
            continue;
        }
        let m = build_equalized_matrix(&inst, &cut, cfg.alpha, seed)?;
        for k in 0..m.ncols() {
            worst = worst.max((m.column_norm_sq(k) - 1.0).abs());
        }
        let tr = trace_moment(&m, 1, 1, 0)?;
        worst = worst.max((tr - m.ncols() as f64).abs() / m.ncols() as f64);
    }
    Ok(SuiteResult {
        name: "column_norms".into(),
        pass: worst < 1e-9,
        margin: 1e-9 - worst,
        detail: format!("max identity deviation {worst:.2e}"),
    })
}

/// Trace moments: the l = 2 Monte Carlo estimate against the exact phase
/// expectation, and moments below the Catalan envelope with the row-sum
/// constant fitted on the same instance.
fn suite_trace_moments(cfg: &VerifyConfig) -> Result<SuiteResult> {
    let seed = derive_seed(cfg.seed, &[0x7a3]);
    let inst = NetworkInstance::sample(256, Regime::Extended, seed)?;
    let cut = compute_cut(&inst)?;
    let m = build_equalized_matrix(&inst, &cut, cfg.alpha.min(3.0), seed)?;
    let exact = trace_moment_exact_l2(&m);
    let mc = trace_moment(&m, 2, 400, seed ^ 9)?;
    let l2_ok = (mc - exact).abs() <= 0.05 * exact;

    let n = 256f64;
    let k1 = (m.max_row_norm_sq() / n.ln().powi(3)).max(1e-12);
    let mut envelope_ok = true;
    let mut min_margin = f64::INFINITY;
    for l in 1..=3usize {
        let t = trace_moment(&m, l, 200, seed ^ l as u64)?;
        let cap = catalan(l)? as f64 * n * (k1 * n.ln().powi(3)).powf(3.0 * l as f64);
        envelope_ok &= t <= cap;
        min_margin = min_margin.min(cap - t);
    }
    Ok(SuiteResult {
        name: "trace_moments".into(),
        pass: l2_ok && envelope_ok,
        margin: min_margin,
        detail: format!("l=2 Monte Carlo {mc:.3} vs exact {exact:.3}; Catalan envelope holds: {envelope_ok}"),
    })
}

fn suite_catalan() -> Result<SuiteResult> {
    let mut pass = true;
    for l in 0..15usize {
        let direct = catalan(l + 1)?;
        let conv: u64 = (0..=l).map(|j| catalan(j).unwrap() * catalan(l - j).unwrap()).sum();
        pass &= direct == conv;
    }
    pass &= catalan(10)? == 16796;
    Ok(SuiteResult {
        name: "catalan_recurrence".into(),
        pass,
        margin: if pass { 1.0 } else { -1.0 },
        detail: "convolution recurrence through l = 15".into(),
    })
}

/// Spectral-norm percentile growth check used by the acceptance suite:
/// calibrate K at the smallest size and verify the (ln n)^3 envelope above.
pub fn spectral_norm_envelope(
    n_list: &[usize],
    alpha: f64,
    seeds: usize,
    seed: u64,
) -> Result<Vec<(usize, f64)>> {
    let mut out = Vec::new();
    for &n in n_list {
        let mut norms: Vec<f64> = (0..seeds)
            .into_par_iter()
            .map(|t| {
                let s = derive_seed(seed, &[0x59ec, n as u64, t as u64]);
                let inst = NetworkInstance::sample(n, Regime::Extended, s).unwrap();
                let cut = compute_cut(&inst).unwrap();
                let m = build_equalized_matrix(&inst, &cut, alpha, s ^ 1).unwrap();
                spectral_norm_sq(&m).unwrap()
            })
            .collect();
        norms.sort_by(f64::total_cmp);
        let idx = ((0.99 * seeds as f64).ceil() as usize).clamp(1, seeds) - 1;
        out.push((n, norms[idx]));
    }
    Ok(out)
}

pub use cutset::cutset_report;
