//! Seeded random test instances: datasets, kernel sets, and positive
//! (semi)definite labeled kernel matrices. Used by the verification
//! runner and by the test suites; everything is deterministic in the
//! provided generator.

use crate::kernels::{labeled_gram, Dataset, KernelSpec, LabeledKernelMatrix};
use crate::rng::Xoshiro256PlusPlus;

/// Random points (standard normal coordinates) with random ±1 labels.
pub fn random_dataset(rng: &mut Xoshiro256PlusPlus, n: usize, d: usize) -> Dataset {
    let mut points = Vec::with_capacity(n);
    for _ in 0..n {
        let mut p = vec![0.0; d];
        rng.fill_gaussian(&mut p);
        points.push(p);
    }
    let labels: Vec<f64> = (0..n)
        .map(|_| if rng.next_u64() & 1 == 1 { 1.0 } else { -1.0 })
        .collect();
    Dataset::new(points, labels).expect("generated data is valid")
}

/// A random kernel spec; rbf bandwidths are scaled to the data dimension
/// so the Gram matrices stay away from the identity and the all-ones
/// degeneracies.
pub fn random_kernel_spec(rng: &mut Xoshiro256PlusPlus, d: usize) -> KernelSpec {
    match rng.next_below(6) {
        0..=2 => KernelSpec::Rbf { bandwidth: rng.next_range(0.7, 3.0) * (d as f64).sqrt() },
        3 => KernelSpec::Linear,
        4 => KernelSpec::Polynomial { degree: 2, offset: 1.0 },
        _ => KernelSpec::Cosine,
    }
}

/// Strictly positive definite labeled kernel matrix with a conditioning
/// floor: alternates between a ridged rbf Gram on random labeled data and
/// a ridged Wishart-style A·Aᵀ/k.
pub fn random_pd_labeled(rng: &mut Xoshiro256PlusPlus, n: usize) -> LabeledKernelMatrix {
    let ridge = rng.next_range(0.2, 1.0);
    if rng.next_u64() & 1 == 0 {
        let d = 2 + rng.next_below(4);
        let data = random_dataset(rng, n, d);
        let spec = KernelSpec::Rbf { bandwidth: rng.next_range(0.8, 3.0) * (d as f64).sqrt() };
        labeled_gram(&spec, &data).expect("valid kernel").ridged(ridge)
    } else {
        wishart(rng, n, n + 2).ridged(ridge)
    }
}

/// Positive semidefinite matrix A·Aᵀ/k with A an n×k standard normal
/// draw; k < n gives a genuinely singular (rank-deficient) matrix.
pub fn wishart(rng: &mut Xoshiro256PlusPlus, n: usize, k: usize) -> LabeledKernelMatrix {
    let mut a = vec![0.0; n * k];
    rng.fill_gaussian(&mut a);
    let mut entries = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let mut s = 0.0;
            for t in 0..k {
                s += a[i * k + t] * a[j * k + t];
            }
            s /= k as f64;
            entries[i * n + j] = s;
            entries[j * n + i] = s;
        }
    }
    LabeledKernelMatrix::from_rows(
        (0..n).map(|i| entries[i * n..(i + 1) * n].to_vec()).collect(),
    )
    .expect("wishart draw is symmetric and finite")
}

/// Random PSD matrix for the sign-vector estimators: a Wishart draw whose
/// rank may fall below n.
pub fn random_psd(rng: &mut Xoshiro256PlusPlus, n: usize) -> LabeledKernelMatrix {
    let k = 1 + rng.next_below(n + 2);
    wishart(rng, n, k)
}

/// m labeled kernel matrices over one shared random dataset, each ridged
/// into strict positive definiteness so the hard dual stays bounded.
pub fn random_kernel_set(
    rng: &mut Xoshiro256PlusPlus,
    n: usize,
    d: usize,
    m: usize,
) -> Vec<LabeledKernelMatrix> {
    let data = random_dataset(rng, n, d);
    (0..m)
        .map(|_| {
            let spec = random_kernel_spec(rng, d);
            let ridge = rng.next_range(0.1, 0.6);
            labeled_gram(&spec, &data).expect("valid kernel").ridged(ridge)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shared_rng_is_deterministic() {
        let mut a = Xoshiro256PlusPlus::seed_from_u64(5);
        let mut b = Xoshiro256PlusPlus::seed_from_u64(5);
        assert_eq!(random_pd_labeled(&mut a, 8), random_pd_labeled(&mut b, 8));
        assert_eq!(random_kernel_set(&mut a, 6, 3, 4), random_kernel_set(&mut b, 6, 3, 4));
    }

    #[test]
    fn pd_matrices_have_positive_diagonal() {
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(11);
        for _ in 0..20 {
            let m = random_pd_labeled(&mut rng, 10);
            for i in 0..10 {
                assert!(m.get(i, i) >= 0.2);
            }
        }
    }
}
