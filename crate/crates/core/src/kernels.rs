//! Kernel evaluation, Gram matrices, and labeled kernel matrices.
//!
//! A labeled kernel matrix carries entries `y_i * y_j * k(x_i, x_j)`; it is
//! the Hessian of the dual SVM objective and the only matrix form the rest
//! of the crate works with. The unlabeled Gram matrix is the same type
//! built with all labels +1.
//!
//! Matrices are dense, row-major, `f64`. Positive semidefiniteness is a
//! mathematical consequence of construction (a congruence `D K D` with
//! `D = diag(y)` preserves PSD) and is validated by eigenvalue checks in
//! the test suite only, keeping construction at O(n²·d).

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum KernelError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("non-finite input")]
    NonFinite,
    #[error("empty input")]
    Empty,
    #[error("invalid kernel spec: {0}")]
    InvalidSpec(String),
    #[error("invalid dataset: {0}")]
    InvalidDataset(String),
    #[error("matrix size mismatch: {0} vs {1}")]
    SizeMismatch(usize, usize),
    #[error("matrix not symmetric at ({0},{1})")]
    NotSymmetric(usize, usize),
}

/// A sample of n points in R^d with ±1 labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    points: Vec<Vec<f64>>,
    labels: Vec<f64>,
}

impl Dataset {
    pub fn new(points: Vec<Vec<f64>>, labels: Vec<f64>) -> Result<Self, KernelError> {
        if points.is_empty() {
            return Err(KernelError::InvalidDataset("no points".into()));
        }
        if points.len() != labels.len() {
            return Err(KernelError::DimensionMismatch(points.len(), labels.len()));
        }
        let d = points[0].len();
        if d == 0 {
            return Err(KernelError::InvalidDataset("zero-dimensional points".into()));
        }
        for p in &points {
            if p.len() != d {
                return Err(KernelError::DimensionMismatch(p.len(), d));
            }
            if p.iter().any(|v| !v.is_finite()) {
                return Err(KernelError::NonFinite);
            }
        }
        for &y in &labels {
            if y != 1.0 && y != -1.0 {
                return Err(KernelError::InvalidDataset(format!(
                    "label {y} is not exactly -1 or +1"
                )));
            }
        }
        Ok(Self { points, labels })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points[0].len()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i]
    }

    pub fn label(&self, i: usize) -> f64 {
        self.labels[i]
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }
}

/// Declarative description of one base kernel.
///
/// Serialized form matches the CLI config, e.g.
/// `{"family": "rbf", "bandwidth": 3.5}` or `{"family": "linear"}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase", deny_unknown_fields)]
pub enum KernelSpec {
    Rbf { bandwidth: f64 },
    Linear,
    Polynomial { degree: u32, offset: f64 },
    Cosine,
}

impl KernelSpec {
    pub fn validate(&self) -> Result<(), KernelError> {
        match *self {
            KernelSpec::Rbf { bandwidth } => {
                if !(bandwidth.is_finite() && bandwidth > 0.0) {
                    return Err(KernelError::InvalidSpec(format!(
                        "rbf bandwidth must be a positive real, got {bandwidth}"
                    )));
                }
            }
            KernelSpec::Polynomial { degree, offset } => {
                if degree < 1 {
                    return Err(KernelError::InvalidSpec("polynomial degree must be >= 1".into()));
                }
                if !(offset.is_finite() && offset >= 0.0) {
                    return Err(KernelError::InvalidSpec(format!(
                        "polynomial offset must be a nonnegative real, got {offset}"
                    )));
                }
            }
            KernelSpec::Linear | KernelSpec::Cosine => {}
        }
        Ok(())
    }

    /// Short name used in reports and plots.
    pub fn name(&self) -> String {
        match self {
            KernelSpec::Rbf { bandwidth } => format!("rbf(sigma={bandwidth:.4})"),
            KernelSpec::Linear => "linear".to_string(),
            KernelSpec::Polynomial { degree, offset } => {
                format!("poly(degree={degree},offset={offset})")
            }
            KernelSpec::Cosine => "cosine".to_string(),
        }
    }
}

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// Evaluate one kernel at a pair of points.
///
/// rbf: exp(-||x-x2||² / (2·bandwidth²)); linear: xᵀx2;
/// polynomial: (xᵀx2 + offset)^degree; cosine: xᵀx2/(||x||·||x2||),
/// defined as 0 when either norm is 0.
pub fn eval_kernel(spec: &KernelSpec, x: &[f64], x2: &[f64]) -> Result<f64, KernelError> {
    spec.validate()?;
    if x.len() != x2.len() {
        return Err(KernelError::DimensionMismatch(x.len(), x2.len()));
    }
    if x.iter().chain(x2).any(|v| !v.is_finite()) {
        return Err(KernelError::NonFinite);
    }
    Ok(eval_unchecked(spec, x, x2))
}

fn eval_unchecked(spec: &KernelSpec, x: &[f64], x2: &[f64]) -> f64 {
    match *spec {
        KernelSpec::Rbf { bandwidth } => {
            let sq: f64 = x
                .iter()
                .zip(x2)
                .map(|(a, b)| {
                    let d = a - b;
                    d * d
                })
                .sum();
            (-sq / (2.0 * bandwidth * bandwidth)).exp()
        }
        KernelSpec::Linear => dot(x, x2),
        KernelSpec::Polynomial { degree, offset } => (dot(x, x2) + offset).powi(degree as i32),
        KernelSpec::Cosine => {
            let nx = dot(x, x).sqrt();
            let ny = dot(x2, x2).sqrt();
            if nx == 0.0 || ny == 0.0 {
                0.0
            } else {
                dot(x, x2) / (nx * ny)
            }
        }
    }
}

/// Symmetric n×n matrix with entries y_i·y_j·k(x_i, x_j), stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledKernelMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl LabeledKernelMatrix {
    /// Build from explicit rows; rejects non-square, non-symmetric, or
    /// non-finite input. Intended for fixtures and externally supplied
    /// matrices; `labeled_gram` and `sum_matrices` construct symmetric
    /// output directly.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self, KernelError> {
        let n = rows.len();
        if n == 0 {
            return Err(KernelError::Empty);
        }
        let mut entries = Vec::with_capacity(n * n);
        for row in &rows {
            if row.len() != n {
                return Err(KernelError::SizeMismatch(row.len(), n));
            }
            for &v in row {
                if !v.is_finite() {
                    return Err(KernelError::NonFinite);
                }
                entries.push(v);
            }
        }
        let mat = Self { n, entries };
        for i in 0..n {
            for j in (i + 1)..n {
                if mat.get(i, j) != mat.get(j, i) {
                    return Err(KernelError::NotSymmetric(i, j));
                }
            }
        }
        Ok(mat)
    }

    pub(crate) fn from_raw(n: usize, entries: Vec<f64>) -> Self {
        debug_assert_eq!(entries.len(), n * n);
        Self { n, entries }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// Sum of diagonal entries.
    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    /// out = M·x.
    pub fn matvec(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.n);
        debug_assert_eq!(out.len(), self.n);
        for (i, o) in out.iter_mut().enumerate() {
            *o = dot(self.row(i), x);
        }
    }

    /// xᵀ·M·x.
    pub fn quad_form(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.n);
        let mut total = 0.0;
        for i in 0..self.n {
            total += x[i] * dot(self.row(i), x);
        }
        total
    }

    /// A copy with `ridge` added to every diagonal entry.
    pub fn ridged(&self, ridge: f64) -> Self {
        let mut entries = self.entries.clone();
        for i in 0..self.n {
            entries[i * self.n + i] += ridge;
        }
        Self { n: self.n, entries }
    }
}

/// Labeled Gram matrix of one kernel: entries y_i·y_j·k(x_i, x_j).
/// The upper triangle is computed and mirrored, so symmetry is exact.
pub fn labeled_gram(spec: &KernelSpec, data: &Dataset) -> Result<LabeledKernelMatrix, KernelError> {
    spec.validate()?;
    let n = data.len();
    let mut entries = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let v = data.label(i) * data.label(j) * eval_unchecked(spec, data.point(i), data.point(j));
            if !v.is_finite() {
                return Err(KernelError::NonFinite);
            }
            entries[i * n + j] = v;
            entries[j * n + i] = v;
        }
    }
    Ok(LabeledKernelMatrix::from_raw(n, entries))
}

/// Elementwise sum; used for both the full kernel sum and subset sums
/// (pass a subsequence for the latter).
pub fn sum_matrices(mats: &[LabeledKernelMatrix]) -> Result<LabeledKernelMatrix, KernelError> {
    let first = mats.first().ok_or(KernelError::Empty)?;
    let n = first.n();
    let mut entries = first.entries.clone();
    for m in &mats[1..] {
        if m.n() != n {
            return Err(KernelError::SizeMismatch(m.n(), n));
        }
        for (acc, v) in entries.iter_mut().zip(&m.entries) {
            *acc += v;
        }
    }
    Ok(LabeledKernelMatrix::from_raw(n, entries))
}

/// Sum of diagonal entries.
pub fn trace(mat: &LabeledKernelMatrix) -> f64 {
    mat.trace()
}

/// Tightest admissible R²: max over kernels t and samples i of k_t(x_i, x_i).
pub fn radius_squared(specs: &[KernelSpec], data: &Dataset) -> Result<f64, KernelError> {
    if specs.is_empty() {
        return Err(KernelError::Empty);
    }
    let mut r2 = f64::NEG_INFINITY;
    for spec in specs {
        for i in 0..data.len() {
            let v = eval_kernel(spec, data.point(i), data.point(i))?;
            r2 = r2.max(v);
        }
    }
    Ok(r2)
}

/// Representer-form decision value f(x) = Σ_i α_i y_i k_Σ(x, x_i), where
/// k_Σ sums the given kernels. The sign of the result gives the class.
pub fn predict(
    data: &Dataset,
    alpha: &[f64],
    specs: &[KernelSpec],
    x: &[f64],
) -> Result<f64, KernelError> {
    if alpha.len() != data.len() {
        return Err(KernelError::DimensionMismatch(alpha.len(), data.len()));
    }
    if x.len() != data.dim() {
        return Err(KernelError::DimensionMismatch(x.len(), data.dim()));
    }
    let mut total = 0.0;
    for (i, &a) in alpha.iter().enumerate() {
        if a == 0.0 {
            continue;
        }
        let mut ksum = 0.0;
        for spec in specs {
            ksum += eval_kernel(spec, x, data.point(i))?;
        }
        total += a * data.label(i) * ksum;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn data(points: Vec<Vec<f64>>, labels: Vec<f64>) -> Dataset {
        Dataset::new(points, labels).unwrap()
    }

    #[test]
    fn eval_linear_dot() {
        let k = eval_kernel(&KernelSpec::Linear, &[1.0, 2.0], &[3.0, 4.0]).unwrap();
        assert_eq!(k, 11.0);
    }

    #[test]
    fn eval_rbf_at_same_point_is_one() {
        for bw in [0.1, 1.0, 17.5] {
            let k = eval_kernel(&KernelSpec::Rbf { bandwidth: bw }, &[0.3, -2.0], &[0.3, -2.0])
                .unwrap();
            assert_eq!(k, 1.0);
        }
    }

    #[test]
    fn eval_cosine_orthogonal_is_zero() {
        let k = eval_kernel(&KernelSpec::Cosine, &[1.0, 0.0], &[0.0, 1.0]).unwrap();
        assert_eq!(k, 0.0);
    }

    #[test]
    fn eval_cosine_zero_vector_is_zero() {
        let k = eval_kernel(&KernelSpec::Cosine, &[0.0, 0.0], &[1.0, 1.0]).unwrap();
        assert_eq!(k, 0.0);
    }

    #[test]
    fn eval_polynomial() {
        let spec = KernelSpec::Polynomial { degree: 2, offset: 1.0 };
        let k = eval_kernel(&spec, &[1.0, 2.0], &[3.0, 4.0]).unwrap();
        assert_eq!(k, 144.0);
    }

    #[test]
    fn eval_rejects_dimension_mismatch_and_nonfinite() {
        assert!(matches!(
            eval_kernel(&KernelSpec::Linear, &[1.0], &[1.0, 2.0]),
            Err(KernelError::DimensionMismatch(1, 2))
        ));
        assert!(matches!(
            eval_kernel(&KernelSpec::Linear, &[f64::NAN], &[1.0]),
            Err(KernelError::NonFinite)
        ));
    }

    #[test]
    fn spec_validation() {
        assert!(KernelSpec::Rbf { bandwidth: 0.0 }.validate().is_err());
        assert!(KernelSpec::Rbf { bandwidth: -1.0 }.validate().is_err());
        assert!(KernelSpec::Polynomial { degree: 0, offset: 1.0 }.validate().is_err());
        assert!(KernelSpec::Polynomial { degree: 2, offset: -0.5 }.validate().is_err());
        assert!(KernelSpec::Polynomial { degree: 1, offset: 0.0 }.validate().is_ok());
    }

    #[test]
    fn spec_serde_matches_config_format() {
        let s: KernelSpec = serde_json::from_str(r#"{"family":"rbf","bandwidth":3.5}"#).unwrap();
        assert_eq!(s, KernelSpec::Rbf { bandwidth: 3.5 });
        let s: KernelSpec = serde_json::from_str(r#"{"family":"linear"}"#).unwrap();
        assert_eq!(s, KernelSpec::Linear);
        let json = serde_json::to_string(&KernelSpec::Polynomial { degree: 2, offset: 1.0 }).unwrap();
        assert_eq!(json, r#"{"family":"polynomial","degree":2,"offset":1.0}"#);
    }

    #[test]
    fn labeled_gram_flips_signs() {
        // Unit vectors at 60°: the linear kernel realizes the unlabeled
        // Gram [[1, 0.5], [0.5, 1]]; labels (+1, −1) flip the off-diagonal.
        let d = data(
            vec![vec![1.0, 0.0], vec![0.5, 0.75f64.sqrt()]],
            vec![1.0, -1.0],
        );
        let g = labeled_gram(&KernelSpec::Linear, &d).unwrap();
        assert_eq!(g.get(0, 0), 1.0);
        assert_eq!(g.get(0, 1), -0.5);
        assert_eq!(g.get(1, 0), -0.5);
        assert!((g.get(1, 1) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn labeled_gram_single_negative_label_squares_away() {
        let d = data(vec![vec![2.0]], vec![-1.0]);
        let g = labeled_gram(&KernelSpec::Linear, &d).unwrap();
        assert_eq!(g.get(0, 0), 4.0);
    }

    #[test]
    fn labeled_gram_identical_points_rbf() {
        let d = data(vec![vec![1.0, 2.0], vec![1.0, 2.0]], vec![1.0, 1.0]);
        let g = labeled_gram(&KernelSpec::Rbf { bandwidth: 2.0 }, &d).unwrap();
        assert_eq!(g.entries(), &[1.0, 1.0, 1.0, 1.0]);
    }

    #[test]
    fn sum_matrices_cases() {
        let a = LabeledKernelMatrix::from_rows(vec![vec![1.0]]).unwrap();
        let b = LabeledKernelMatrix::from_rows(vec![vec![2.0]]).unwrap();
        assert_eq!(sum_matrices(&[a.clone(), b]).unwrap().entries(), &[3.0]);
        assert_eq!(sum_matrices(std::slice::from_ref(&a)).unwrap(), a);

        let c = LabeledKernelMatrix::from_rows(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let d = LabeledKernelMatrix::from_rows(vec![vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        assert_eq!(sum_matrices(&[c, d]).unwrap().entries(), &[2.0, 1.0, 1.0, 2.0]);

        assert!(matches!(sum_matrices(&[]), Err(KernelError::Empty)));
        let e = LabeledKernelMatrix::from_rows(vec![vec![1.0]]).unwrap();
        let f = LabeledKernelMatrix::from_rows(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert!(sum_matrices(&[e, f]).is_err());
    }

    #[test]
    fn trace_cases() {
        let m = LabeledKernelMatrix::from_rows(vec![vec![1.0, -0.5], vec![-0.5, 1.0]]).unwrap();
        assert_eq!(trace(&m), 2.0);
        let id5 = LabeledKernelMatrix::from_rows(
            (0..5)
                .map(|i| (0..5).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
                .collect(),
        )
        .unwrap();
        assert_eq!(trace(&id5), 5.0);
    }

    #[test]
    fn radius_squared_cases() {
        let d = data(vec![vec![1.0, 0.0], vec![3.0, 0.0]], vec![1.0, -1.0]);
        let r2 = radius_squared(&[KernelSpec::Linear], &d).unwrap();
        assert_eq!(r2, 9.0);
        let r2 = radius_squared(&[KernelSpec::Rbf { bandwidth: 1.0 }], &d).unwrap();
        assert_eq!(r2, 1.0);
        let r2 = radius_squared(&[KernelSpec::Cosine], &d).unwrap();
        assert_eq!(r2, 1.0);
    }

    #[test]
    fn predict_cases() {
        let d = data(vec![vec![2.0]], vec![1.0]);
        let v = predict(&d, &[1.0], &[KernelSpec::Linear], &[3.0]).unwrap();
        assert_eq!(v, 6.0);

        let v = predict(&d, &[0.0], &[KernelSpec::Linear], &[3.0]).unwrap();
        assert_eq!(v, 0.0);

        let d = data(vec![vec![1.5]], vec![-1.0]);
        let v = predict(&d, &[1.0], &[KernelSpec::Rbf { bandwidth: 1.0 }], &[1.5]).unwrap();
        assert_eq!(v, -1.0);

        assert!(predict(&d, &[1.0, 2.0], &[KernelSpec::Linear], &[1.0]).is_err());
    }

    #[test]
    fn from_rows_rejects_asymmetry() {
        assert!(matches!(
            LabeledKernelMatrix::from_rows(vec![vec![1.0, 0.1], vec![0.2, 1.0]]),
            Err(KernelError::NotSymmetric(0, 1))
        ));
    }

    #[test]
    fn dataset_validation() {
        assert!(Dataset::new(vec![], vec![]).is_err());
        assert!(Dataset::new(vec![vec![1.0]], vec![0.5]).is_err());
        assert!(Dataset::new(vec![vec![1.0]], vec![1.0, 1.0]).is_err());
        assert!(Dataset::new(vec![vec![f64::INFINITY]], vec![1.0]).is_err());
        assert!(Dataset::new(vec![vec![1.0], vec![2.0, 3.0]], vec![1.0, -1.0]).is_err());
    }
}
