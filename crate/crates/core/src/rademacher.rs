//! Monte-Carlo estimation of random-sign quadratic-form expectations.
//!
//! These estimators target the intermediate quantities of the complexity
//! bound proof chain: E_σ[√(σᵀK̃σ)] (bounded by √tr K̃ via Jensen), the
//! moments E_σ[(σᵀK̃σ)^p] (bounded by (η₀·p·tr K̃)^p with η₀ = 23/22), and
//! the subset-chain quantity E_σ[(Σ_t (σᵀK̃_tσ)^p)^(1/2p)] with p = ⌈ln m⌉.
//!
//! Every estimator draws its sign vectors from a fresh xoshiro256++ stream
//! seeded by the caller, so identical (inputs, seed, samples) produce
//! bit-identical results. The underlying inequalities are theorems;
//! `holds` flags carry a 3-standard-error statistical allowance, so a
//! persistent failure indicates a bug rather than sampling noise.

use crate::bounds::ETA_0;
use crate::kernels::LabeledKernelMatrix;
use crate::rng::Xoshiro256PlusPlus;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RademacherError {
    #[error("matrix size {n} exceeds enumeration limit {max}")]
    TooLarge { n: usize, max: usize },
    #[error("need at least {need} matrices, got {got}")]
    TooFewMatrices { need: usize, got: usize },
    #[error("matrix size mismatch: {0} vs {1}")]
    SizeMismatch(usize, usize),
}

/// Mean and standard error of one Monte-Carlo run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RademacherEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
    pub seed: u64,
}

/// Moment-inequality check result.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MomentCheck {
    pub estimate: f64,
    pub bound: f64,
    pub std_error: f64,
    pub holds: bool,
}

/// Subset-chain check result; `p` is the moment order ⌈ln m⌉ actually used.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChainCheck {
    pub estimate: f64,
    pub bound: f64,
    pub std_error: f64,
    pub holds: bool,
    pub p: u32,
}

/// Welford accumulator; exact zero variance on constant streams, unlike
/// the sum-of-squares formula which cancels catastrophically there.
struct RunningMoments {
    count: usize,
    mean: f64,
    m2: f64,
}

impl RunningMoments {
    fn new() -> Self {
        Self { count: 0, mean: 0.0, m2: 0.0 }
    }

    fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    fn mean_and_stderr(&self) -> (f64, f64) {
        if self.count < 2 {
            return (self.mean, 0.0);
        }
        let var = (self.m2 / (self.count as f64 - 1.0)).max(0.0);
        (self.mean, (var / self.count as f64).sqrt())
    }
}

/// σᵀK̃σ clamped at zero to absorb PSD jitter of order machine epsilon.
fn clamped_quad(mat: &LabeledKernelMatrix, sign: &[f64]) -> f64 {
    mat.quad_form(sign).max(0.0)
}

fn monte_carlo<F: FnMut(&[f64]) -> f64>(
    n: usize,
    samples: usize,
    seed: u64,
    mut value: F,
) -> (f64, f64) {
    let samples = samples.max(1);
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
    let mut sign = vec![0.0; n];
    let mut acc = RunningMoments::new();
    for _ in 0..samples {
        rng.fill_signs(&mut sign);
        acc.push(value(&sign));
    }
    acc.mean_and_stderr()
}

/// Monte-Carlo estimate of E_σ[√(σᵀK̃σ)].
pub fn estimate_sqrt_form(
    mat: &LabeledKernelMatrix,
    samples: usize,
    seed: u64,
) -> RademacherEstimate {
    let (mean, std_error) = monte_carlo(mat.n(), samples, seed, |s| clamped_quad(mat, s).sqrt());
    RademacherEstimate { mean, std_error, samples: samples.max(1), seed }
}

/// Enumeration limit for `exact_sqrt_form`.
pub const EXACT_MAX_N: usize = 20;

/// Exact E_σ[√(σᵀK̃σ)] by enumerating sign vectors. The σ ↔ −σ symmetry
/// halves the work: only vectors with σ₁ = +1 are visited.
pub fn exact_sqrt_form(mat: &LabeledKernelMatrix) -> Result<f64, RademacherError> {
    let n = mat.n();
    if n > EXACT_MAX_N {
        return Err(RademacherError::TooLarge { n, max: EXACT_MAX_N });
    }
    let half = 1u64 << (n - 1);
    let mut sign = vec![0.0; n];
    let mut total = 0.0;
    for mask in 0..half {
        sign[0] = 1.0;
        for (i, s) in sign.iter_mut().enumerate().skip(1) {
            *s = if mask & (1 << (i - 1)) != 0 { 1.0 } else { -1.0 };
        }
        total += clamped_quad(mat, &sign).sqrt();
    }
    Ok(total / half as f64)
}

/// Monte-Carlo check of E_σ[(σᵀK̃σ)^p] against (η₀·p·tr K̃)^p.
pub fn moment_check(
    mat: &LabeledKernelMatrix,
    p: u32,
    samples: usize,
    seed: u64,
) -> MomentCheck {
    let p = p.max(1);
    let (estimate, std_error) =
        monte_carlo(mat.n(), samples, seed, |s| clamped_quad(mat, s).powi(p as i32));
    let bound = (ETA_0 * p as f64 * mat.trace()).powi(p as i32);
    MomentCheck { estimate, bound, std_error, holds: estimate <= bound + 3.0 * std_error }
}

/// Monte-Carlo check of E_σ[(Σ_t (σᵀK̃_tσ)^p)^(1/2p)] with p = ⌈ln m⌉
/// against R·√(e·η₀·p·n), where R² is the largest diagonal entry across
/// the matrices. Requires m ≥ 2 so that p ≥ 1.
pub fn subset_chain_check(
    mats: &[LabeledKernelMatrix],
    samples: usize,
    seed: u64,
) -> Result<ChainCheck, RademacherError> {
    let m = mats.len();
    if m < 2 {
        return Err(RademacherError::TooFewMatrices { need: 2, got: m });
    }
    let n = mats[0].n();
    for mat in &mats[1..] {
        if mat.n() != n {
            return Err(RademacherError::SizeMismatch(mat.n(), n));
        }
    }
    let p = (m as f64).ln().ceil() as u32; // >= 1 for m >= 2
    let r_squared = mats
        .iter()
        .flat_map(|mat| (0..n).map(move |i| mat.get(i, i)))
        .fold(f64::NEG_INFINITY, f64::max)
        .max(0.0);

    let (estimate, std_error) = monte_carlo(n, samples, seed, |s| {
        let inner: f64 = mats.iter().map(|mat| clamped_quad(mat, s).powi(p as i32)).sum();
        inner.powf(1.0 / (2.0 * p as f64))
    });
    let bound =
        r_squared.sqrt() * (std::f64::consts::E * ETA_0 * p as f64 * n as f64).sqrt();
    Ok(ChainCheck { estimate, bound, std_error, holds: estimate <= bound + 3.0 * std_error, p })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::LabeledKernelMatrix;

    fn mat(rows: Vec<Vec<f64>>) -> LabeledKernelMatrix {
        LabeledKernelMatrix::from_rows(rows).unwrap()
    }

    fn identity(n: usize) -> LabeledKernelMatrix {
        mat((0..n)
            .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect())
    }

    #[test]
    fn sqrt_form_singleton_is_exact() {
        // σ² = 1 always, so every sample equals 1.
        let e = estimate_sqrt_form(&mat(vec![vec![1.0]]), 500, 9);
        assert_eq!(e.mean, 1.0);
        assert_eq!(e.std_error, 0.0);
    }

    #[test]
    fn sqrt_form_identity_is_sqrt_n() {
        // σᵀσ = n for every sign vector: a constant stream, so the
        // running-moments accumulator returns √n and zero error exactly.
        let e = estimate_sqrt_form(&identity(5), 200, 3);
        assert_eq!(e.mean, 5.0f64.sqrt());
        assert_eq!(e.std_error, 0.0);
    }

    #[test]
    fn sqrt_form_all_ones_converges_to_one() {
        // (σ₁+σ₂)² is 0 or 4 with probability 1/2 each, so the mean is 1.
        let k = mat(vec![vec![1.0, 1.0], vec![1.0, 1.0]]);
        assert_eq!(exact_sqrt_form(&k).unwrap(), 1.0);
        let e = estimate_sqrt_form(&k, 40_000, 11);
        assert!((e.mean - 1.0).abs() <= 4.0 * e.std_error + 1e-12, "mean {}", e.mean);
    }

    #[test]
    fn exact_sqrt_form_cases() {
        assert_eq!(exact_sqrt_form(&mat(vec![vec![1.0]])).unwrap(), 1.0);
        assert!((exact_sqrt_form(&identity(2)).unwrap() - 2.0f64.sqrt()).abs() < 1e-15);
        let big = identity(EXACT_MAX_N + 1);
        assert!(matches!(exact_sqrt_form(&big), Err(RademacherError::TooLarge { .. })));
    }

    #[test]
    fn determinism_bit_for_bit() {
        let k = mat(vec![vec![2.0, 0.3], vec![0.3, 1.0]]);
        let a = estimate_sqrt_form(&k, 5000, 77);
        let b = estimate_sqrt_form(&k, 5000, 77);
        assert_eq!(a.mean.to_bits(), b.mean.to_bits());
        assert_eq!(a.std_error.to_bits(), b.std_error.to_bits());
        let c = estimate_sqrt_form(&k, 5000, 78);
        assert_ne!(a.mean.to_bits(), c.mean.to_bits());
    }

    #[test]
    fn moment_singleton_p3() {
        // (σ²)³ = 1 exactly; bound (η₀·3)³ = 30.85170924117205.
        let m = moment_check(&mat(vec![vec![1.0]]), 3, 100, 5);
        assert_eq!(m.estimate, 1.0);
        assert!((m.bound - 30.85170924117205).abs() < 1e-12);
        assert!(m.holds);
    }

    #[test]
    fn moment_p1_matches_trace_in_expectation() {
        let k = mat(vec![vec![1.5, 0.2], vec![0.2, 0.5]]);
        let m = moment_check(&k, 1, 60_000, 21);
        assert!((m.estimate - k.trace()).abs() <= 4.0 * m.std_error + 1e-12);
        assert!((m.bound - ETA_0 * k.trace()).abs() < 1e-12);
    }

    #[test]
    fn moment_constant_form_p2() {
        // diag(1,1): (σ₁²+σ₂²)² = 4 always; bound (η₀·2·2)² = 17.48760330578512.
        let m = moment_check(&identity(2), 2, 100, 8);
        assert_eq!(m.estimate, 4.0);
        assert!((m.bound - 17.48760330578512).abs() < 1e-12);
        assert!(m.holds);
    }

    #[test]
    fn subset_chain_two_singletons() {
        // Inner value (1+1)^(1/2) = √2 for every σ; bound √(e·η₀) ≈ 1.6858.
        let mats = vec![mat(vec![vec![1.0]]), mat(vec![vec![1.0]])];
        let c = subset_chain_check(&mats, 500, 4).unwrap();
        assert!((c.estimate - 2.0f64.sqrt()).abs() < 1e-12);
        assert!((c.bound - 1.6857758135021992).abs() < 1e-12);
        assert!(c.holds);
        assert_eq!(c.p, 1);
    }

    #[test]
    fn subset_chain_zero_matrices() {
        let z = mat(vec![vec![0.0, 0.0], vec![0.0, 0.0]]);
        let c = subset_chain_check(&[z.clone(), z], 200, 1).unwrap();
        assert_eq!(c.estimate, 0.0);
        assert!(c.holds);
    }

    #[test]
    fn subset_chain_three_identities() {
        // m = 3 → p = 2; inner value (3·n²)^(1/4) = 48^(1/4) for n = 4;
        // bound √(e·η₀·2·4) = 4.7680940371506955 with R = 1.
        let mats = vec![identity(4), identity(4), identity(4)];
        let c = subset_chain_check(&mats, 300, 2).unwrap();
        assert_eq!(c.p, 2);
        assert!((c.estimate - 48.0f64.powf(0.25)).abs() < 1e-12);
        assert!((c.bound - 4.7680940371506955).abs() < 1e-12);
        assert!(c.holds);
    }

    #[test]
    fn subset_chain_rejects_single_matrix() {
        assert!(matches!(
            subset_chain_check(&[identity(2)], 10, 0),
            Err(RademacherError::TooFewMatrices { .. })
        ));
    }
}
