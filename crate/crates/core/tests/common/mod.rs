//! Shared helpers for the integration suites: a small symmetric
//! eigensolver for PSD validation, independent of everything it checks.

use ksb::kernels::LabeledKernelMatrix;

/// Eigenvalues of a symmetric matrix by the cyclic Jacobi method.
/// Plenty accurate for the n <= 60 validation matrices used in tests.
pub fn sym_eigenvalues(mat: &LabeledKernelMatrix) -> Vec<f64> {
    let n = mat.n();
    let mut a: Vec<f64> = mat.entries().to_vec();
    let idx = |i: usize, j: usize| i * n + j;

    for _sweep in 0..100 {
        let mut off = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                off += a[idx(i, j)] * a[idx(i, j)];
            }
        }
        let scale = (0..n).map(|i| a[idx(i, i)].abs()).fold(1.0f64, f64::max);
        if off.sqrt() <= 1e-14 * scale * n as f64 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[idx(p, q)];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let app = a[idx(p, p)];
                let aqq = a[idx(q, q)];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[idx(k, p)];
                    let akq = a[idx(k, q)];
                    a[idx(k, p)] = c * akp - s * akq;
                    a[idx(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[idx(p, k)];
                    let aqk = a[idx(q, k)];
                    a[idx(p, k)] = c * apk - s * aqk;
                    a[idx(q, k)] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[idx(i, i)]).collect()
}

// Each integration test target compiles this module independently, so
// helpers unused by one target are still live in another.
#[allow(dead_code)]
pub fn min_eigenvalue(mat: &LabeledKernelMatrix) -> f64 {
    sym_eigenvalues(mat).into_iter().fold(f64::INFINITY, f64::min)
}

#[allow(dead_code)]
pub fn max_eigenvalue(mat: &LabeledKernelMatrix) -> f64 {
    sym_eigenvalues(mat).into_iter().fold(f64::NEG_INFINITY, f64::max)
}
