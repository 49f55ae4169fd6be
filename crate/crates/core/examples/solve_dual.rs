//! Solve the dual SVM for one kernel on a toy dataset, in hard-margin
//! and ℓ2-slack modes, and print the certified solutions.
//!
//! Run with: cargo run --example solve_dual

use ksb::kernels::{labeled_gram, Dataset, KernelSpec};
use ksb::qp::{solve_dual_hard, solve_dual_slack};

fn main() {
    // Two interleaved point clouds in the plane.
    let points = vec![
        vec![0.0, 0.0],
        vec![0.4, 0.2],
        vec![1.0, 1.0],
        vec![1.3, 0.9],
        vec![0.2, 1.1],
        vec![1.1, 0.1],
    ];
    let labels = vec![1.0, 1.0, -1.0, -1.0, 1.0, -1.0];
    let data = Dataset::new(points, labels).expect("valid dataset");

    let spec = KernelSpec::Rbf { bandwidth: 0.8 };
    let gram = labeled_gram(&spec, &data).expect("gram builds");

    let hard = solve_dual_hard(&gram, 1e-10, 10_000).expect("separable under rbf");
    println!("hard-margin solution ({:?})", spec);
    println!("  alpha       = {:?}", hard.alpha);
    println!("  objective   = {:.6}", hard.objective);
    println!("  quad form   = {:.6}", hard.quad_form);
    println!("  support     = {}", hard.kkt.support_count);
    println!("  kkt residual= {:.2e}", hard.kkt.max_violation);
    println!("  sweeps      = {}", hard.iterations);

    // The optimality identity: ||alpha||_1 equals the quadratic form.
    let l1: f64 = hard.alpha.iter().sum();
    println!("  identity    = |l1 - quad| = {:.2e}", (l1 - hard.quad_form).abs());

    let slack = solve_dual_slack(&gram, 0.5, 1e-10, 10_000).expect("always bounded");
    let xi = slack.xi.as_ref().unwrap();
    println!("\nl2-slack solution (C = 0.5)");
    println!("  alpha       = {:?}", slack.alpha);
    println!("  xi          = {:?}", xi);
    println!("  objective   = {:.6}", slack.objective);
    let l1: f64 = slack.alpha.iter().sum();
    let xi_sq: f64 = xi.iter().map(|x| x * x).sum();
    println!(
        "  identity    = |l1 - quad - C*|xi|^2| = {:.2e}",
        (l1 - slack.quad_form - 0.5 * xi_sq).abs()
    );
}
