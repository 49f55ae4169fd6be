//! Closed-form bounds on dual quadratic forms and Rademacher-type
//! complexity, plus an end-to-end verifier that solves the per-kernel and
//! sum duals and checks the contraction inequalities on the results.
//!
//! Writing q_t = α_tᵀK̃_tα_t for the per-kernel optima and q_Σ for the sum
//! optimum, the two-kernel contraction is q_{1+2} ≤ ⅓(q₁+q₂) ≤ ⅔·max, and
//! the m-kernel forms are m^(−log₂3)·Σq_t and m^(−log₂(3/2))·max q_t when
//! m is a power of two, tripled otherwise (binary-tree recursion of depth
//! ⌈log₂ m⌉ − 1). For m = 1 the tree has depth 0 and both forms equal q₁.

use crate::kernels::{sum_matrices, KernelError, LabeledKernelMatrix};
use crate::parallel::par_map;
use crate::qp::{solve_dual_hard, solve_dual_slack, DualSolution, SolveError};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Constant in the moment inequality E[(σᵀK̃σ)^p] ≤ (η₀·p·tr K̃)^p.
pub const ETA_0: f64 = 23.0 / 22.0;

/// Relative tolerance used when checking the contraction inequalities on
/// solver output; sits above the default solver tolerance so a reported
/// violation always signals a genuine failure rather than roundoff.
pub const VIOLATION_REL_TOL: f64 = 1e-7;

#[derive(Debug, Error)]
pub enum BoundError {
    #[error("negative input: {0}")]
    NegativeInput(f64),
    #[error("empty input")]
    Empty,
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("parameter out of range: {0}")]
    ParamOutOfRange(String),
    #[error("slack-mode bound verification requires C = 1/2, got {0}")]
    UnsupportedSlackC(f64),
    #[error(
        "bound violated ({which}): sum quad form {sum_quad:.12e} exceeds {bound:.12e} \
         (per-kernel quads {per_kernel_quad:?})"
    )]
    Violation {
        which: &'static str,
        sum_quad: f64,
        bound: f64,
        per_kernel_quad: Vec<f64>,
    },
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Solve(#[from] SolveError),
}

/// Solver mode used by the bound verifier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Mode {
    Hard,
    Slack { c: f64 },
}

/// Empirical quadratic forms and every closed-form bound for one kernel set.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundReport {
    pub m: usize,
    pub per_kernel_quad: Vec<f64>,
    pub sum_quad: f64,
    pub bound_sum: f64,
    pub bound_max: f64,
    pub b_squared: f64,
    pub r_squared: f64,
    pub traces: Vec<f64>,
}

fn ensure_nonnegative(qs: &[f64]) -> Result<(), BoundError> {
    for &q in qs {
        if !q.is_finite() || q < 0.0 {
            return Err(BoundError::NegativeInput(q));
        }
    }
    Ok(())
}

/// Two-kernel contraction values: (⅓(q₁+q₂), ⅔·max(q₁,q₂)).
pub fn two_kernel_bounds(q1: f64, q2: f64) -> Result<(f64, f64), BoundError> {
    ensure_nonnegative(&[q1, q2])?;
    Ok(((q1 + q2) / 3.0, 2.0 / 3.0 * q1.max(q2)))
}

/// m-kernel contraction values (sum form, max form).
///
/// Power-of-two m: (m^(−log₂3)·Σq, m^(−log₂(3/2))·max q); otherwise both
/// are tripled. m = 1 returns (q₁, q₁) exactly; the recursion tree has
/// depth 0, so no contraction factor applies.
pub fn many_kernel_bounds(qs: &[f64]) -> Result<(f64, f64), BoundError> {
    if qs.is_empty() {
        return Err(BoundError::Empty);
    }
    ensure_nonnegative(qs)?;
    let m = qs.len();
    if m == 1 {
        return Ok((qs[0], qs[0]));
    }
    let mf = m as f64;
    let sum: f64 = qs.iter().sum();
    let max = qs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let factor_sum = mf.powf(-(3.0f64).log2());
    let factor_max = mf.powf(-(1.5f64).log2());
    let triple = if m.is_power_of_two() { 1.0 } else { 3.0 };
    Ok((triple * factor_sum * sum, triple * factor_max * max))
}

/// Pure inequality check on candidate quadratic forms; the injection point
/// for corrupt-solution tests. Relative tolerance `VIOLATION_REL_TOL`.
pub fn check_sum_bound(per_kernel_quad: &[f64], sum_quad: f64) -> Result<(f64, f64), BoundError> {
    let (bound_sum, bound_max) = many_kernel_bounds(per_kernel_quad)?;
    if sum_quad > bound_sum + VIOLATION_REL_TOL * (1.0 + bound_sum) {
        return Err(BoundError::Violation {
            which: "sum-form",
            sum_quad,
            bound: bound_sum,
            per_kernel_quad: per_kernel_quad.to_vec(),
        });
    }
    if sum_quad > bound_max + VIOLATION_REL_TOL * (1.0 + bound_max) {
        return Err(BoundError::Violation {
            which: "max-form",
            sum_quad,
            bound: bound_max,
            per_kernel_quad: per_kernel_quad.to_vec(),
        });
    }
    Ok((bound_sum, bound_max))
}

fn solve_mode(
    mat: &LabeledKernelMatrix,
    mode: Mode,
    tol: f64,
    max_sweeps: usize,
) -> Result<DualSolution, SolveError> {
    match mode {
        Mode::Hard => solve_dual_hard(mat, tol, max_sweeps),
        Mode::Slack { c } => solve_dual_slack(mat, c, tol, max_sweeps),
    }
}

/// Solve the dual for each kernel matrix and for their sum, then assert
/// the contraction inequalities on the optimal quadratic forms.
///
/// A returned `Violation` carries the full instance numbers. Slack mode
/// only supports C = 1/2.
pub fn verify_sum_bound(
    mats: &[LabeledKernelMatrix],
    mode: Mode,
    tol: f64,
    max_sweeps: usize,
) -> Result<BoundReport, BoundError> {
    if mats.is_empty() {
        return Err(BoundError::Empty);
    }
    if let Mode::Slack { c } = mode {
        if c != 0.5 {
            return Err(BoundError::UnsupportedSlackC(c));
        }
    }
    let sum = sum_matrices(mats)?;

    let solved: Vec<Result<DualSolution, SolveError>> =
        par_map(mats, |m| solve_mode(m, mode, tol, max_sweeps));
    let mut per_kernel_quad = Vec::with_capacity(mats.len());
    for s in solved {
        per_kernel_quad.push(s?.quad_form);
    }
    let sum_quad = solve_mode(&sum, mode, tol, max_sweeps)?.quad_form;

    let (bound_sum, bound_max) = check_sum_bound(&per_kernel_quad, sum_quad)?;
    let traces: Vec<f64> = mats.iter().map(|m| m.trace()).collect();
    let b_squared = per_kernel_quad.iter().cloned().fold(0.0f64, f64::max);
    let r_squared = mats
        .iter()
        .flat_map(|m| (0..m.n()).map(move |i| m.get(i, i)))
        .fold(f64::NEG_INFINITY, f64::max);

    Ok(BoundReport {
        m: mats.len(),
        per_kernel_quad,
        sum_quad,
        bound_sum,
        bound_max,
        b_squared,
        r_squared,
        traces,
    })
}

/// General-form complexity bound (1/n)·√(3·m^(−log₂3)·(Σ tr K̃_t)·(Σ q_t)).
/// The leading 3 is kept for every m, matching the printed closed form.
pub fn rademacher_sum_bound(traces: &[f64], qs: &[f64], n: usize) -> Result<f64, BoundError> {
    if traces.len() != qs.len() {
        return Err(BoundError::LengthMismatch(traces.len(), qs.len()));
    }
    if traces.is_empty() {
        return Err(BoundError::Empty);
    }
    if n == 0 {
        return Err(BoundError::ParamOutOfRange("n must be >= 1".into()));
    }
    ensure_nonnegative(traces)?;
    ensure_nonnegative(qs)?;
    let m = traces.len() as f64;
    let tr_sum: f64 = traces.iter().sum();
    let q_sum: f64 = qs.iter().sum();
    Ok((3.0 * m.powf(-(3.0f64).log2()) * tr_sum * q_sum).sqrt() / n as f64)
}

/// Closed form under the uniform assumptions q_t ≤ B², k_t(x_i,x_i) ≤ R²:
/// (B·R/√n)·√(3·m^(1−log₂(3/2))).
pub fn rademacher_sum_bound_br(b: f64, r: f64, n: usize, m: usize) -> f64 {
    debug_assert!(b >= 0.0 && r >= 0.0 && n >= 1 && m >= 1);
    let exponent = 1.0 - (1.5f64).log2();
    b * r / (n as f64).sqrt() * (3.0 * (m as f64).powf(exponent)).sqrt()
}

/// Subset-learning bound B·R·√(3·e·η₀·m^(1−log₂(3/2))·⌈ln m⌉)/√n.
///
/// At m = 1 the literal formula evaluates to 0 because ⌈ln 1⌉ = 0; the
/// value is returned as-is rather than patched.
pub fn subset_bound(b: f64, r: f64, n: usize, m: usize) -> f64 {
    debug_assert!(b >= 0.0 && r >= 0.0 && n >= 1 && m >= 1);
    let exponent = 1.0 - (1.5f64).log2();
    let ceil_ln_m = (m as f64).ln().ceil();
    b * r
        * (3.0 * std::f64::consts::E * ETA_0 * (m as f64).powf(exponent) * ceil_ln_m).sqrt()
        / (n as f64).sqrt()
}

/// Piecewise γ-Lipschitz loss: 1 below 0, linear down to 0 at γ, 0 above.
pub fn psi_loss(x: f64, gamma: f64) -> Result<f64, BoundError> {
    if !(gamma.is_finite() && gamma > 0.0 && gamma < 1.0) {
        return Err(BoundError::ParamOutOfRange(format!("gamma must be in (0,1), got {gamma}")));
    }
    Ok(if x < 0.0 {
        1.0
    } else if x <= gamma {
        1.0 - x / gamma
    } else {
        0.0
    })
}

/// Deviation term ε = (8/γ + 1)·√(ln(4/δ)/(2n)).
pub fn risk_epsilon(gamma: f64, delta: f64, n: usize) -> Result<f64, BoundError> {
    if !(gamma.is_finite() && gamma > 0.0 && gamma < 1.0) {
        return Err(BoundError::ParamOutOfRange(format!("gamma must be in (0,1), got {gamma}")));
    }
    if !(delta.is_finite() && delta > 0.0 && delta < 1.0) {
        return Err(BoundError::ParamOutOfRange(format!("delta must be in (0,1), got {delta}")));
    }
    if n == 0 {
        return Err(BoundError::ParamOutOfRange("n must be >= 1".into()));
    }
    Ok((8.0 / gamma + 1.0) * ((4.0 / delta).ln() / (2.0 * n as f64)).sqrt())
}
