//! High-level runs behind the CLI: the prefix-sum experiment, the
//! randomized verification sweep, and the closed-form bound table.

use crate::bounds::{
    self, check_sum_bound, many_kernel_bounds, rademacher_sum_bound_br, subset_bound,
    two_kernel_bounds, BoundError,
};
use crate::config::{ConfigError, ExperimentConfig, SolveMode};
use crate::instances;
use crate::kernels::{labeled_gram, sum_matrices, KernelError, LabeledKernelMatrix};
use crate::parallel::par_map;
use crate::plot::render_svg;
use crate::qp::{solve_dual_hard, solve_dual_slack, DualSolution, SolveError};
use crate::rademacher::{estimate_sqrt_form, moment_check, RademacherError};
use crate::rng::Xoshiro256PlusPlus;
use crate::synth::{generate_mixture, write_csv_file, SynthError};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Synth(#[from] SynthError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Bound(#[from] BoundError),
    #[error(transparent)]
    Rademacher(#[from] RademacherError),
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

fn write_file(path: &Path, contents: &str) -> Result<(), RunError> {
    std::fs::write(path, contents)
        .map_err(|source| RunError::Io { path: path.to_path_buf(), source })
}

fn solve_mode(
    mat: &LabeledKernelMatrix,
    mode: SolveMode,
    c: f64,
    tol: f64,
    max_sweeps: usize,
) -> Result<DualSolution, SolveError> {
    match mode {
        SolveMode::Hard => solve_dual_hard(mat, tol, max_sweeps),
        SolveMode::Slack => solve_dual_slack(mat, c, tol, max_sweeps),
    }
}

// ---------------------------------------------------------------------------
// Experiment
// ---------------------------------------------------------------------------

/// One CSV row of the experiment: the prefix size, the optimal quadratic
/// form of the prefix-sum dual, and the two plotted curves.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentRow {
    pub m: usize,
    pub empirical: f64,
    pub curve_sum: f64,
    pub curve_max: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    pub kernel_names: Vec<String>,
    pub per_kernel_quad: Vec<f64>,
    pub b_squared: f64,
    pub all_within_b_squared: bool,
    pub rows: Vec<ExperimentRow>,
    /// Contraction bounds with the non-power-of-two factor 3 applied;
    /// these hold unconditionally, unlike the plotted (un-tripled) curves.
    pub rigorous_bound_sum: Vec<f64>,
    pub rigorous_bound_max: Vec<f64>,
    pub max_kkt_residual: f64,
    pub warnings: Vec<String>,
    pub violations: Vec<String>,
    #[serde(skip)]
    pub csv: String,
}

/// CSV bytes for the curve rows: header `m,empirical,curve_sum,curve_max`,
/// 17 significant digits, `\n` line endings.
pub fn rows_to_csv(rows: &[ExperimentRow]) -> String {
    let mut out = String::from("m,empirical,curve_sum,curve_max\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{:.16e},{:.16e},{:.16e}",
            r.m, r.empirical, r.curve_sum, r.curve_max
        );
    }
    out
}

/// Run the prefix-sum experiment: generate the mixture, build the m
/// labeled kernel matrices in permutation order, solve the dual for every
/// kernel and for every prefix sum, and emit the curve CSV, an SVG plot,
/// and a JSON report into `out_dir`.
///
/// The plotted `curve_sum` is j^(−log₂3)·Σ_{t≤j} q_t and `curve_max` is
/// j^(−log₂(3/2))·B², exactly the un-tripled forms; the rigorous tripled
/// bounds are logged in the report. A kernel with q_t > B² produces a
/// warning (B² is an input assumption, not a theorem); an empirical value
/// above a rigorous bound is recorded as a violation.
pub fn run_experiment(cfg: &ExperimentConfig, out_dir: &Path) -> Result<ExperimentReport, RunError> {
    cfg.validate()?;
    let data = generate_mixture(&cfg.mixture)?;
    let specs = cfg.permuted_kernels();

    let mats: Vec<LabeledKernelMatrix> = par_map(&specs, |s| labeled_gram(s, &data))
        .into_iter()
        .collect::<Result<_, _>>()?;

    let per_kernel: Vec<DualSolution> =
        par_map(&mats, |m| solve_mode(m, cfg.mode, cfg.c, cfg.tol, cfg.max_sweeps))
            .into_iter()
            .collect::<Result<_, _>>()?;
    let quads: Vec<f64> = per_kernel.iter().map(|s| s.quad_form).collect();

    let mut prefixes = Vec::with_capacity(mats.len());
    let mut acc = mats[0].clone();
    prefixes.push(acc.clone());
    for mat in &mats[1..] {
        acc = sum_matrices(&[acc, mat.clone()])?;
        prefixes.push(acc.clone());
    }
    let prefix_solutions: Vec<DualSolution> =
        par_map(&prefixes, |m| solve_mode(m, cfg.mode, cfg.c, cfg.tol, cfg.max_sweeps))
            .into_iter()
            .collect::<Result<_, _>>()?;

    let log2_3 = (3.0f64).log2();
    let log2_15 = (1.5f64).log2();
    let mut rows = Vec::with_capacity(mats.len());
    let mut rigorous_bound_sum = Vec::with_capacity(mats.len());
    let mut rigorous_bound_max = Vec::with_capacity(mats.len());
    let mut warnings = Vec::new();
    let mut violations = Vec::new();

    for (idx, spec) in specs.iter().enumerate() {
        if quads[idx] > cfg.b_squared {
            warnings.push(format!(
                "kernel {} ({}) has quad form {:.6e} above B^2 = {:.6e}",
                idx + 1,
                spec.name(),
                quads[idx],
                cfg.b_squared
            ));
        }
    }

    let mut running_sum = 0.0;
    for j in 1..=mats.len() {
        running_sum += quads[j - 1];
        let jf = j as f64;
        let empirical = prefix_solutions[j - 1].quad_form;
        let curve_sum = jf.powf(-log2_3) * running_sum;
        let curve_max = jf.powf(-log2_15) * cfg.b_squared;
        rows.push(ExperimentRow { m: j, empirical, curve_sum, curve_max });

        let (rig_sum, rig_max) = many_kernel_bounds(&quads[..j])?;
        if empirical > rig_sum + bounds::VIOLATION_REL_TOL * (1.0 + rig_sum)
            || empirical > rig_max + bounds::VIOLATION_REL_TOL * (1.0 + rig_max)
        {
            violations.push(format!(
                "prefix {j}: empirical {empirical:.12e} exceeds rigorous bounds \
                 (sum-form {rig_sum:.12e}, max-form {rig_max:.12e})"
            ));
        }
        rigorous_bound_sum.push(rig_sum);
        rigorous_bound_max.push(rig_max);
    }

    let max_kkt_residual = per_kernel
        .iter()
        .chain(&prefix_solutions)
        .map(|s| s.kkt.max_violation)
        .fold(0.0f64, f64::max);

    let csv = rows_to_csv(&rows);
    let report = ExperimentReport {
        kernel_names: specs.iter().map(|s| s.name()).collect(),
        per_kernel_quad: quads,
        b_squared: cfg.b_squared,
        all_within_b_squared: warnings.is_empty(),
        rows,
        rigorous_bound_sum,
        rigorous_bound_max,
        max_kkt_residual,
        warnings,
        violations,
        csv,
    };

    std::fs::create_dir_all(out_dir)
        .map_err(|source| RunError::Io { path: out_dir.to_path_buf(), source })?;
    write_file(&out_dir.join("experiment.csv"), &report.csv)?;
    write_file(&out_dir.join("experiment.svg"), &render_svg(&report.rows))?;
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    write_file(&out_dir.join("report.json"), &json)?;

    Ok(report)
}

/// Generate the configured mixture and write it as CSV.
pub fn run_gen_data(cfg: &ExperimentConfig, out_path: &Path) -> Result<usize, RunError> {
    cfg.validate()?;
    let data = generate_mixture(&cfg.mixture)?;
    if let Some(dir) = out_path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)
                .map_err(|source| RunError::Io { path: dir.to_path_buf(), source })?;
        }
    }
    write_csv_file(&data, out_path)
        .map_err(|source| RunError::Io { path: out_path.to_path_buf(), source })?;
    Ok(data.len())
}

// ---------------------------------------------------------------------------
// Verification sweep
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub instances: usize,
    pub seed: u64,
    pub mode: SolveMode,
    pub c: f64,
    pub tol: f64,
    pub max_sweeps: usize,
    pub mc_samples: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            instances: 100,
            seed: 0x5EED,
            mode: SolveMode::Hard,
            c: 0.5,
            tol: 1e-8,
            max_sweeps: 50_000,
            mc_samples: 20_000,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub pass: bool,
}

impl CheckResult {
    fn le(name: impl Into<String>, lhs: f64, rhs: f64, tol: f64) -> Self {
        let pass = lhs <= rhs + tol;
        Self { name: name.into(), lhs, rhs, slack: rhs - lhs, pass }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct InstanceReport {
    pub index: usize,
    pub seed: u64,
    pub n: usize,
    pub m: usize,
    pub max_kkt_residual: f64,
    pub checks: Vec<CheckResult>,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub mode: SolveMode,
    pub c: f64,
    pub tol: f64,
    pub instances: usize,
    pub failed_instances: usize,
    pub all_pass: bool,
    pub entries: Vec<InstanceReport>,
}

/// Randomized verification sweep: on each seeded instance, solve the
/// per-kernel duals, one random pairwise sum, and the full sum, then check
/// every contraction inequality, the Jensen step of the sign-vector bound,
/// and the low moments. Each check is listed with its slack; any failure
/// is reported with the full instance numbers.
pub fn run_verify(vcfg: &VerifyConfig) -> Result<VerifyReport, RunError> {
    let mut master = Xoshiro256PlusPlus::seed_from_u64(vcfg.seed);
    let seeds: Vec<u64> = (0..vcfg.instances).map(|_| master.next_u64()).collect();

    let entries: Vec<Result<InstanceReport, RunError>> = par_map(&seeds, |&seed| {
        verify_one_instance(vcfg, seed)
    });
    let mut out = Vec::with_capacity(entries.len());
    for (index, e) in entries.into_iter().enumerate() {
        let mut entry = e?;
        entry.index = index;
        out.push(entry);
    }
    let failed = out.iter().filter(|e| !e.pass).count();
    Ok(VerifyReport {
        mode: vcfg.mode,
        c: vcfg.c,
        tol: vcfg.tol,
        instances: vcfg.instances,
        failed_instances: failed,
        all_pass: failed == 0,
        entries: out,
    })
}

fn verify_one_instance(vcfg: &VerifyConfig, seed: u64) -> Result<InstanceReport, RunError> {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
    let n = 5 + rng.next_below(36); // [5, 40]
    let d = 2 + rng.next_below(5); // [2, 6]
    let m = 2 + rng.next_below(15); // [2, 16]
    let mats = instances::random_kernel_set(&mut rng, n, d, m);

    let solve = |mat: &LabeledKernelMatrix| -> Result<DualSolution, SolveError> {
        solve_mode(mat, vcfg.mode, vcfg.c, vcfg.tol, vcfg.max_sweeps)
    };

    let mut solutions = Vec::with_capacity(m);
    for mat in &mats {
        solutions.push(solve(mat)?);
    }
    let quads: Vec<f64> = solutions.iter().map(|s| s.quad_form).collect();
    let sum_mat = sum_matrices(&mats)?;
    let sum_sol = solve(&sum_mat)?;

    let mut checks = Vec::new();
    let ineq_tol = |bound: f64| bounds::VIOLATION_REL_TOL * (1.0 + bound);

    match check_sum_bound(&quads, sum_sol.quad_form) {
        Ok((bound_sum, bound_max)) => {
            checks.push(CheckResult::le("sum-form", sum_sol.quad_form, bound_sum, ineq_tol(bound_sum)));
            checks.push(CheckResult::le("max-form", sum_sol.quad_form, bound_max, ineq_tol(bound_max)));
        }
        Err(BoundError::Violation { which, sum_quad, bound, .. }) => {
            checks.push(CheckResult::le(which, sum_quad, bound, ineq_tol(bound)));
            // Record the other form too so the dump stays complete.
            let (bound_sum, bound_max) = many_kernel_bounds(&quads)?;
            let other = if which == "sum-form" { ("max-form", bound_max) } else { ("sum-form", bound_sum) };
            checks.push(CheckResult::le(other.0, sum_quad, other.1, ineq_tol(other.1)));
        }
        Err(other) => return Err(other.into()),
    }

    // One random pairwise sum per instance.
    let i = rng.next_below(m);
    let j = (i + 1 + rng.next_below(m - 1)) % m;
    let pair_sum = sum_matrices(&[mats[i].clone(), mats[j].clone()])?;
    let pair_sol = solve(&pair_sum)?;
    let (pair_third, pair_max) = two_kernel_bounds(quads[i], quads[j])?;
    checks.push(CheckResult::le("pair-sum-form", pair_sol.quad_form, pair_third, ineq_tol(pair_third)));
    checks.push(CheckResult::le("pair-max-form", pair_sol.quad_form, pair_max, ineq_tol(pair_max)));

    // Jensen step on the sum matrix: E[sqrt(sigma' K sigma)] <= sqrt(tr K).
    let est = estimate_sqrt_form(&sum_mat, vcfg.mc_samples, rng.next_u64());
    checks.push(CheckResult::le(
        "jensen-sqrt-trace",
        est.mean,
        sum_mat.trace().sqrt(),
        3.0 * est.std_error + 1e-12,
    ));

    // Low moments on the sum matrix.
    for p in 1..=3u32 {
        let mc = moment_check(&sum_mat, p, vcfg.mc_samples, rng.next_u64());
        checks.push(CheckResult::le(
            format!("moment-p{p}"),
            mc.estimate,
            mc.bound,
            3.0 * mc.std_error + 1e-12,
        ));
    }

    let max_kkt_residual = solutions
        .iter()
        .chain(std::iter::once(&sum_sol))
        .chain(std::iter::once(&pair_sol))
        .map(|s| s.kkt.max_violation)
        .fold(0.0f64, f64::max);
    checks.push(CheckResult::le("kkt-residual", max_kkt_residual, vcfg.tol, 0.0));

    let pass = checks.iter().all(|c| c.pass);
    Ok(InstanceReport { index: 0, seed, n, m, max_kkt_residual, checks, pass })
}

// ---------------------------------------------------------------------------
// Closed-form bound table
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct BoundsRow {
    pub m: usize,
    pub baseline: f64,
    pub sum_bound: f64,
    pub subset_bound: f64,
    pub sum_over_baseline: f64,
    pub subset_over_sum: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundsTable {
    pub b: f64,
    pub r: f64,
    pub n: usize,
    pub rows: Vec<BoundsRow>,
}

/// Closed-form table for m = 1..=m_max: the single-kernel baseline BR/√n,
/// the kernel-sum bound, and the subset-learning bound, with ratios.
pub fn run_bounds(b: f64, r: f64, n: usize, m_max: usize) -> Result<BoundsTable, RunError> {
    if !(b.is_finite() && b >= 0.0) || !(r.is_finite() && r >= 0.0) {
        return Err(ConfigError::Invalid(format!("B and R must be nonnegative reals, got {b}, {r}")).into());
    }
    if n == 0 || m_max == 0 {
        return Err(ConfigError::Invalid("n and m must be >= 1".into()).into());
    }
    let baseline = b * r / (n as f64).sqrt();
    let rows = (1..=m_max)
        .map(|m| {
            let sum = rademacher_sum_bound_br(b, r, n, m);
            let subset = subset_bound(b, r, n, m);
            BoundsRow {
                m,
                baseline,
                sum_bound: sum,
                subset_bound: subset,
                sum_over_baseline: if baseline > 0.0 { sum / baseline } else { f64::NAN },
                subset_over_sum: if sum > 0.0 { subset / sum } else { f64::NAN },
            }
        })
        .collect();
    Ok(BoundsTable { b, r, n, rows })
}

impl BoundsTable {
    pub fn format_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "B = {}, R = {}, n = {}", self.b, self.r, self.n);
        let _ = writeln!(
            out,
            "{:>4}  {:>14}  {:>14}  {:>14}  {:>12}  {:>12}",
            "m", "baseline", "sum_bound", "subset_bound", "sum/base", "subset/sum"
        );
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:>4}  {:>14.6e}  {:>14.6e}  {:>14.6e}  {:>12.6}  {:>12.6}",
                r.m, r.baseline, r.sum_bound, r.subset_bound, r.sum_over_baseline, r.subset_over_sum
            );
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("m,baseline,sum_bound,subset_bound,sum_over_baseline,subset_over_sum\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                r.m, r.baseline, r.sum_bound, r.subset_bound, r.sum_over_baseline, r.subset_over_sum
            );
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Rademacher estimator run
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct RademacherRunReport {
    pub kernel: Vec<CheckResult>,
    pub all_pass: bool,
}

/// Monte-Carlo checks on the configured experiment's kernel matrices:
/// the Jensen step per kernel, low moments, and the subset-chain bound.
pub fn run_rademacher(cfg: &ExperimentConfig) -> Result<RademacherRunReport, RunError> {
    cfg.validate()?;
    let data = generate_mixture(&cfg.mixture)?;
    let specs = cfg.permuted_kernels();
    let mats: Vec<LabeledKernelMatrix> = par_map(&specs, |s| labeled_gram(s, &data))
        .into_iter()
        .collect::<Result<_, _>>()?;

    let mut rng = Xoshiro256PlusPlus::seed_from_u64(cfg.mc_seed);
    let mut checks = Vec::new();
    for (spec, mat) in specs.iter().zip(&mats) {
        let est = estimate_sqrt_form(mat, cfg.mc_samples, rng.next_u64());
        checks.push(CheckResult::le(
            format!("jensen[{}]", spec.name()),
            est.mean,
            mat.trace().sqrt(),
            3.0 * est.std_error + 1e-12,
        ));
    }
    let sum_mat = sum_matrices(&mats)?;
    for p in 1..=3u32 {
        let mc = moment_check(&sum_mat, p, cfg.mc_samples, rng.next_u64());
        checks.push(CheckResult::le(
            format!("moment-p{p}[sum]"),
            mc.estimate,
            mc.bound,
            3.0 * mc.std_error + 1e-12,
        ));
    }
    if mats.len() >= 2 {
        let chain = crate::rademacher::subset_chain_check(&mats, cfg.mc_samples, rng.next_u64())?;
        checks.push(CheckResult::le(
            format!("subset-chain(p={})", chain.p),
            chain.estimate,
            chain.bound,
            3.0 * chain.std_error + 1e-12,
        ));
    }
    let all_pass = checks.iter().all(|c| c.pass);
    Ok(RademacherRunReport { kernel: checks, all_pass })
}
