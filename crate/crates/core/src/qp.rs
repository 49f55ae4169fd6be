//! Dual kernel SVM solver with KKT optimality certificates.
//!
//! The dual problem is the nonnegatively-constrained concave QP
//!
//! ```text
//!     max  ||alpha||_1 - 1/2 alphaᵀ K̃ alpha     s.t.  alpha_i >= 0
//! ```
//!
//! solved by cyclic coordinate ascent: each single-coordinate maximization
//! is closed-form because there is no equality constraint and no upper
//! box. The residual vector r = K̃·alpha is maintained incrementally
//! (rank-1 update per coordinate change) and recomputed in full every
//! 50 sweeps to bound float drift.
//!
//! The ℓ2-slack variant eliminates the slack vector through ξ = α/C and
//! solves the hard problem on K̃ + (1/C)·I, which is strictly positive
//! definite and therefore never unbounded. At the optimum the solutions
//! satisfy ||α||₁ = αᵀK̃α + C·||ξ||₂² exactly (up to solver tolerance).
//!
//! Optimality is certified through the KKT system: with the margin vector
//! (K̃α)_i, a converged solution has (K̃α)_i = 1 on the support and
//! (K̃α)_i >= 1 off it.

use crate::kernels::LabeledKernelMatrix;
use thiserror::Error;

/// Default KKT residual tolerance.
pub const DEFAULT_TOL: f64 = 1e-8;
/// Entries of alpha above this count as support / active.
pub const ACTIVE_TOL: f64 = 1e-10;
/// Diagonal entries at or below this are treated as zero curvature.
pub const DIAG_TOL: f64 = 1e-12;
/// Objective cap; growth beyond this is reported as an unbounded problem.
pub const OBJECTIVE_CAP: f64 = 1e12;
/// Full residual recompute interval, in sweeps.
const RECOMPUTE_EVERY: usize = 50;

/// Default sweep budget for a problem of size n.
pub fn default_max_sweeps(n: usize) -> usize {
    100 * n
}

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("dual objective is unbounded (zero-curvature coordinate {coord} with positive gradient)")]
    Unbounded { coord: usize },
    #[error("not converged after {sweeps} sweeps: KKT residual {residual:e}")]
    NotConverged { residual: f64, sweeps: usize },
    #[error("dimension mismatch: {expected} vs {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid solver parameter: {0}")]
    InvalidParameter(String),
    #[error("no feasible support set found by enumeration")]
    NoFeasibleSupport,
    #[error("problem size {n} exceeds enumeration limit {max}")]
    TooLarge { n: usize, max: usize },
}

/// KKT residual summary for a candidate alpha.
///
/// `max_violation` is, over all i: |1 - (K̃α)_i| where alpha_i is active,
/// and max(0, 1 - (K̃α)_i) where it is at the bound.
#[derive(Debug, Clone)]
pub struct KktReport {
    pub max_violation: f64,
    pub per_index_margin: Vec<f64>,
    pub support_count: usize,
}

/// A certified dual solution.
///
/// `quad_form` is always αᵀK̃α on the *original* labeled kernel matrix; in
/// slack mode the reported `objective` follows the (α, ξ) form
/// ||α||₁ − ½αᵀK̃α − ½||ξ||₂², while the KKT certificate refers to the
/// reduced problem that was actually solved.
#[derive(Debug, Clone)]
pub struct DualSolution {
    pub alpha: Vec<f64>,
    pub xi: Option<Vec<f64>>,
    pub objective: f64,
    pub quad_form: f64,
    pub kkt: KktReport,
    pub iterations: usize,
}

fn check_params(tol: f64, max_sweeps: usize) -> Result<(), SolveError> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(SolveError::InvalidParameter(format!("tol must be positive, got {tol}")));
    }
    if max_sweeps == 0 {
        return Err(SolveError::InvalidParameter("max_sweeps must be >= 1".into()));
    }
    Ok(())
}

/// Result of the raw ascent loop: alpha, sweeps used, per-sweep objectives.
struct AscentOutcome {
    alpha: Vec<f64>,
    sweeps: usize,
    sweep_objectives: Vec<f64>,
}

/// Cyclic coordinate ascent from alpha = 0 on the given matrix.
fn ascent(mat: &LabeledKernelMatrix, tol: f64, max_sweeps: usize) -> Result<AscentOutcome, SolveError> {
    let n = mat.n();
    let mut alpha = vec![0.0; n];
    let mut r = vec![0.0; n]; // r = mat * alpha, maintained incrementally
    let mut sweep_objectives = Vec::new();

    for sweep in 1..=max_sweeps {
        for i in 0..n {
            let kii = mat.get(i, i);
            if kii <= DIAG_TOL {
                let grad = 1.0 - r[i];
                if grad > tol {
                    // Objective increases linearly along e_i with no curvature.
                    return Err(SolveError::Unbounded { coord: i });
                }
                if grad < 0.0 && alpha[i] > 0.0 {
                    let delta = -alpha[i];
                    alpha[i] = 0.0;
                    axpy_row(mat, i, delta, &mut r);
                }
                continue;
            }
            let new = (alpha[i] + (1.0 - r[i]) / kii).max(0.0);
            let delta = new - alpha[i];
            if delta != 0.0 {
                alpha[i] = new;
                axpy_row(mat, i, delta, &mut r);
            }
        }

        if sweep % RECOMPUTE_EVERY == 0 {
            mat.matvec(&alpha, &mut r);
        }

        let l1: f64 = alpha.iter().sum();
        let quad: f64 = alpha.iter().zip(&r).map(|(a, ri)| a * ri).sum();
        let objective = l1 - 0.5 * quad;
        sweep_objectives.push(objective);
        if objective > OBJECTIVE_CAP {
            return Err(SolveError::Unbounded { coord: 0 });
        }

        if max_violation_from(&alpha, &r) <= tol {
            // Convergence is certified against a fresh residual, not the
            // incrementally maintained one, so drift cannot leak into the
            // returned KKT report.
            mat.matvec(&alpha, &mut r);
            if max_violation_from(&alpha, &r) <= tol {
                return Ok(AscentOutcome { alpha, sweeps: sweep, sweep_objectives });
            }
        }
    }

    // Report the true residual from a fresh matvec.
    mat.matvec(&alpha, &mut r);
    Err(SolveError::NotConverged {
        residual: max_violation_from(&alpha, &r),
        sweeps: max_sweeps,
    })
}

/// r += delta * mat[:, i] (= delta * row i, by symmetry).
#[inline]
fn axpy_row(mat: &LabeledKernelMatrix, i: usize, delta: f64, r: &mut [f64]) {
    for (rj, kij) in r.iter_mut().zip(mat.row(i)) {
        *rj += delta * kij;
    }
}

fn max_violation_from(alpha: &[f64], margins: &[f64]) -> f64 {
    let mut worst: f64 = 0.0;
    for (&a, &m) in alpha.iter().zip(margins) {
        let v = if a > ACTIVE_TOL { (1.0 - m).abs() } else { (1.0 - m).max(0.0) };
        worst = worst.max(v);
    }
    worst
}

/// Per-index margins (K̃α)_i and the worst KKT violation for any candidate
/// alpha; pure function, usable on solver output or hand-built vectors.
pub fn kkt_residuals(
    mat: &LabeledKernelMatrix,
    alpha: &[f64],
    active_tol: f64,
) -> Result<KktReport, SolveError> {
    if alpha.len() != mat.n() {
        return Err(SolveError::DimensionMismatch { expected: mat.n(), got: alpha.len() });
    }
    let mut margins = vec![0.0; mat.n()];
    mat.matvec(alpha, &mut margins);
    let mut worst: f64 = 0.0;
    let mut support = 0;
    for (&a, &m) in alpha.iter().zip(&margins) {
        let v = if a > active_tol {
            support += 1;
            (1.0 - m).abs()
        } else {
            (1.0 - m).max(0.0)
        };
        worst = worst.max(v);
    }
    Ok(KktReport { max_violation: worst, per_index_margin: margins, support_count: support })
}

fn finish_hard(mat: &LabeledKernelMatrix, out: AscentOutcome) -> DualSolution {
    let kkt = kkt_residuals(mat, &out.alpha, ACTIVE_TOL).expect("alpha built for mat");
    let l1: f64 = out.alpha.iter().sum();
    let quad: f64 = out.alpha.iter().zip(&kkt.per_index_margin).map(|(a, m)| a * m).sum();
    DualSolution {
        alpha: out.alpha,
        xi: None,
        objective: l1 - 0.5 * quad,
        quad_form: quad,
        kkt,
        iterations: out.sweeps,
    }
}

/// Hard-margin dual solve: certified coordinate ascent on K̃.
pub fn solve_dual_hard(
    mat: &LabeledKernelMatrix,
    tol: f64,
    max_sweeps: usize,
) -> Result<DualSolution, SolveError> {
    check_params(tol, max_sweeps)?;
    let out = ascent(mat, tol, max_sweeps)?;
    Ok(finish_hard(mat, out))
}

/// Hard-margin solve that also returns the per-sweep objective trace
/// (used to check ascent monotonicity).
pub fn solve_dual_hard_traced(
    mat: &LabeledKernelMatrix,
    tol: f64,
    max_sweeps: usize,
) -> Result<(DualSolution, Vec<f64>), SolveError> {
    check_params(tol, max_sweeps)?;
    let out = ascent(mat, tol, max_sweeps)?;
    let trace = out.sweep_objectives.clone();
    Ok((finish_hard(mat, out), trace))
}

/// ℓ2-slack dual solve with parameter C: hard solve on K̃ + (1/C)·I, then
/// ξ = α/C. The shifted matrix is strictly PD, so this never reports an
/// unbounded problem. `quad_form` is αᵀK̃α on the original matrix and the
/// objective is reported in the (α, ξ) form.
pub fn solve_dual_slack(
    mat: &LabeledKernelMatrix,
    c: f64,
    tol: f64,
    max_sweeps: usize,
) -> Result<DualSolution, SolveError> {
    check_params(tol, max_sweeps)?;
    if !(c.is_finite() && c > 0.0) {
        return Err(SolveError::InvalidParameter(format!("C must be positive, got {c}")));
    }
    let shifted = mat.ridged(1.0 / c);
    let out = ascent(&shifted, tol, max_sweeps)?;
    // Certificate is for the problem actually solved (the reduced matrix).
    let kkt = kkt_residuals(&shifted, &out.alpha, ACTIVE_TOL).expect("alpha built for shifted");
    let xi: Vec<f64> = out.alpha.iter().map(|a| a / c).collect();
    let l1: f64 = out.alpha.iter().sum();
    let quad = mat.quad_form(&out.alpha);
    let xi_sq: f64 = xi.iter().map(|x| x * x).sum();
    Ok(DualSolution {
        alpha: out.alpha,
        xi: Some(xi),
        objective: l1 - 0.5 * quad - 0.5 * xi_sq,
        quad_form: quad,
        kkt,
        iterations: out.sweeps,
    })
}

/// Enumeration limit for the brute-force oracle.
pub const BRUTE_FORCE_MAX_N: usize = 14;

/// Independent oracle: enumerate every support set S, solve K̃_SS α_S = 1
/// directly, keep candidates that are dual feasible (α_S ≥ −1e−10) with
/// off-support margins ≥ 1 − 1e−8, and return the best objective.
///
/// This path shares no code with the coordinate-ascent solver: the linear
/// systems go through a local partial-pivot LU.
pub fn brute_force_dual(mat: &LabeledKernelMatrix) -> Result<DualSolution, SolveError> {
    let n = mat.n();
    if n > BRUTE_FORCE_MAX_N {
        return Err(SolveError::TooLarge { n, max: BRUTE_FORCE_MAX_N });
    }
    const ALPHA_SLACK: f64 = 1e-10;
    const MARGIN_SLACK: f64 = 1e-8;

    let mut best: Option<(f64, Vec<f64>)> = None;
    for mask in 1u32..(1u32 << n) {
        let support: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        let k = support.len();
        let mut sub = vec![0.0; k * k];
        for (a, &i) in support.iter().enumerate() {
            for (b, &j) in support.iter().enumerate() {
                sub[a * k + b] = mat.get(i, j);
            }
        }
        let mut rhs = vec![1.0; k];
        if !lu_solve(&mut sub, &mut rhs, k) {
            continue; // singular subsystem
        }
        if rhs.iter().any(|&v| v < -ALPHA_SLACK) {
            continue;
        }
        let mut alpha = vec![0.0; n];
        for (a, &i) in support.iter().enumerate() {
            alpha[i] = rhs[a].max(0.0);
        }
        let mut margins = vec![0.0; n];
        mat.matvec(&alpha, &mut margins);
        let feasible = (0..n)
            .filter(|i| mask & (1 << i) == 0)
            .all(|i| margins[i] >= 1.0 - MARGIN_SLACK);
        if !feasible {
            continue;
        }
        let l1: f64 = alpha.iter().sum();
        let quad = mat.quad_form(&alpha);
        let objective = l1 - 0.5 * quad;
        if best.as_ref().is_none_or(|(b, _)| objective > *b) {
            best = Some((objective, alpha));
        }
    }

    let (objective, alpha) = best.ok_or(SolveError::NoFeasibleSupport)?;
    let kkt = kkt_residuals(mat, &alpha, ACTIVE_TOL)?;
    let quad = mat.quad_form(&alpha);
    Ok(DualSolution { alpha, xi: None, objective, quad_form: quad, kkt, iterations: 0 })
}

/// In-place LU solve with partial pivoting for the k×k system a·x = b.
/// Returns false on a (numerically) singular matrix.
fn lu_solve(a: &mut [f64], b: &mut [f64], k: usize) -> bool {
    let scale = a.iter().fold(0.0f64, |acc, v| acc.max(v.abs())).max(1.0);
    for col in 0..k {
        let mut pivot = col;
        let mut pmax = a[col * k + col].abs();
        for row in (col + 1)..k {
            let v = a[row * k + col].abs();
            if v > pmax {
                pmax = v;
                pivot = row;
            }
        }
        if pmax <= 1e-12 * scale {
            return false;
        }
        if pivot != col {
            for j in 0..k {
                a.swap(col * k + j, pivot * k + j);
            }
            b.swap(col, pivot);
        }
        let inv = 1.0 / a[col * k + col];
        for row in (col + 1)..k {
            let factor = a[row * k + col] * inv;
            if factor == 0.0 {
                continue;
            }
            for j in col..k {
                a[row * k + j] -= factor * a[col * k + j];
            }
            b[row] -= factor * b[col];
        }
    }
    for col in (0..k).rev() {
        let mut v = b[col];
        for j in (col + 1)..k {
            v -= a[col * k + j] * b[j];
        }
        b[col] = v / a[col * k + col];
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::LabeledKernelMatrix;

    fn mat(rows: Vec<Vec<f64>>) -> LabeledKernelMatrix {
        LabeledKernelMatrix::from_rows(rows).unwrap()
    }

    #[test]
    fn one_by_one_unit() {
        let s = solve_dual_hard(&mat(vec![vec![1.0]]), 1e-10, 100).unwrap();
        assert!((s.alpha[0] - 1.0).abs() < 1e-10);
        assert!((s.objective - 0.5).abs() < 1e-10);
        assert!((s.quad_form - 1.0).abs() < 1e-10);
    }

    #[test]
    fn one_by_one_scaled() {
        let s = solve_dual_hard(&mat(vec![vec![2.0]]), 1e-10, 100).unwrap();
        assert!((s.alpha[0] - 0.5).abs() < 1e-10);
        assert!((s.quad_form - 0.5).abs() < 1e-10);
    }

    #[test]
    fn separable_diagonal() {
        let s = solve_dual_hard(&mat(vec![vec![1.0, 0.0], vec![0.0, 4.0]]), 1e-10, 1000).unwrap();
        assert!((s.alpha[0] - 1.0).abs() < 1e-10);
        assert!((s.alpha[1] - 0.25).abs() < 1e-10);
        let l1: f64 = s.alpha.iter().sum();
        assert!((l1 - 1.25).abs() < 1e-10);
        assert!((s.quad_form - 1.25).abs() < 1e-10);
    }

    #[test]
    fn degenerate_optimum_fixed_sweep_order() {
        // All-ones matrix: optimum set is {alpha >= 0 : alpha_1 + alpha_2 = 1};
        // the deterministic sweep order lands on (1, 0).
        let s = solve_dual_hard(&mat(vec![vec![1.0, 1.0], vec![1.0, 1.0]]), 1e-10, 1000).unwrap();
        assert!((s.alpha[0] - 1.0).abs() < 1e-12);
        assert_eq!(s.alpha[1], 0.0);
        assert!((s.objective - 0.5).abs() < 1e-12);
    }

    #[test]
    fn unbounded_zero_matrix() {
        assert!(matches!(
            solve_dual_hard(&mat(vec![vec![0.0]]), 1e-8, 100),
            Err(SolveError::Unbounded { coord: 0 })
        ));
    }

    #[test]
    fn singular_runaway_fails_cleanly() {
        // PSD with a zero eigenvalue along a nonnegative direction but no
        // zero diagonal: the iterates drift along the null space, so the
        // solve must end in a clean error instead of claiming convergence.
        let m = mat(vec![vec![1.0, -1.0], vec![-1.0, 1.0]]);
        match solve_dual_hard(&m, 1e-8, 500) {
            Err(SolveError::NotConverged { residual, .. }) => assert!(residual > 1e-8),
            Err(SolveError::Unbounded { .. }) => {}
            other => panic!("expected a clean failure, got {other:?}"),
        }
    }

    #[test]
    fn not_converged_reports_residual() {
        // One sweep cannot finish this coupled system.
        let m = mat(vec![vec![2.0, 1.0], vec![1.0, 2.0]]);
        match solve_dual_hard(&m, 1e-12, 1) {
            Err(SolveError::NotConverged { residual, sweeps }) => {
                assert_eq!(sweeps, 1);
                assert!(residual > 1e-12);
            }
            other => panic!("expected NotConverged, got {other:?}"),
        }
    }

    #[test]
    fn kkt_residuals_cases() {
        let m = mat(vec![vec![1.0]]);
        let r = kkt_residuals(&m, &[1.0], ACTIVE_TOL).unwrap();
        assert_eq!(r.max_violation, 0.0);
        assert_eq!(r.per_index_margin, vec![1.0]);
        assert_eq!(r.support_count, 1);

        let r = kkt_residuals(&m, &[0.0], ACTIVE_TOL).unwrap();
        assert_eq!(r.max_violation, 1.0);
        assert_eq!(r.support_count, 0);

        let m = mat(vec![vec![1.0, 0.0], vec![0.0, 4.0]]);
        let r = kkt_residuals(&m, &[1.0, 0.25], ACTIVE_TOL).unwrap();
        assert_eq!(r.max_violation, 0.0);
        assert_eq!(r.per_index_margin, vec![1.0, 1.0]);

        assert!(kkt_residuals(&m, &[1.0], ACTIVE_TOL).is_err());
    }

    #[test]
    fn slack_one_by_one_c_half() {
        // Reduced matrix [[1 + 2]]; analytic optimum alpha = 1/3, xi = 2/3.
        let s = solve_dual_slack(&mat(vec![vec![1.0]]), 0.5, 1e-12, 1000).unwrap();
        assert!((s.alpha[0] - 1.0 / 3.0).abs() < 1e-10);
        let xi = s.xi.as_ref().unwrap();
        assert_eq!(xi[0], s.alpha[0] / 0.5);
        // ||alpha||_1 = alphaᵀK̃alpha + C||xi||²
        let lhs = s.alpha[0];
        let rhs = s.quad_form + 0.5 * xi[0] * xi[0];
        assert!((lhs - rhs).abs() < 1e-10, "identity gap {}", (lhs - rhs).abs());
        // Reported objective follows the (alpha, xi) form:
        // 1/3 - (1/2)(1/9) - (1/2)(4/9) = 1/18.
        assert!((s.objective - 1.0 / 18.0).abs() < 1e-10, "{}", s.objective);
    }

    #[test]
    fn slack_handles_hard_unbounded_case() {
        // Hard mode on [[0]] is unbounded; slack at C = 1 reduces to [[1]].
        let s = solve_dual_slack(&mat(vec![vec![0.0]]), 1.0, 1e-12, 1000).unwrap();
        assert!((s.alpha[0] - 1.0).abs() < 1e-10);
        assert!((s.xi.as_ref().unwrap()[0] - 1.0).abs() < 1e-10);
        assert_eq!(s.quad_form, 0.0);
    }

    #[test]
    fn brute_force_matches_analytic() {
        let s = brute_force_dual(&mat(vec![vec![1.0]])).unwrap();
        assert!((s.alpha[0] - 1.0).abs() < 1e-12);

        let s = brute_force_dual(&mat(vec![vec![1.0, 0.0], vec![0.0, 4.0]])).unwrap();
        assert!((s.alpha[0] - 1.0).abs() < 1e-12);
        assert!((s.alpha[1] - 0.25).abs() < 1e-12);

        let s = brute_force_dual(&mat(vec![vec![2.0, 0.0], vec![0.0, 2.0]])).unwrap();
        assert!((s.alpha[0] - 0.5).abs() < 1e-12);
        assert!((s.alpha[1] - 0.5).abs() < 1e-12);
        assert!((s.objective - 0.5).abs() < 1e-12);
    }

    #[test]
    fn brute_force_rejects_large_n() {
        let n = 15;
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        assert!(matches!(
            brute_force_dual(&mat(rows)),
            Err(SolveError::TooLarge { n: 15, max: BRUTE_FORCE_MAX_N })
        ));
    }

    #[test]
    fn traced_objective_is_nondecreasing() {
        let m = mat(vec![
            vec![2.0, 0.6, 0.1],
            vec![0.6, 1.5, -0.2],
            vec![0.1, -0.2, 3.0],
        ]);
        let (_, trace) = solve_dual_hard_traced(&m, 1e-12, 10_000).unwrap();
        for w in trace.windows(2) {
            assert!(w[1] >= w[0] - 1e-12 * (1.0 + w[0].abs()), "sweep objective decreased: {w:?}");
        }
    }

    #[test]
    fn lu_solve_singular_detected() {
        let mut a = vec![1.0, 2.0, 2.0, 4.0];
        let mut b = vec![1.0, 1.0];
        assert!(!lu_solve(&mut a, &mut b, 2));
    }
}
