//! Monte-Carlo estimates of the random-sign quadratic-form quantities,
//! compared against exact enumeration and the closed-form caps.
//!
//! Run with: cargo run --example rademacher_monte_carlo

use ksb::instances::random_psd;
use ksb::rademacher::{estimate_sqrt_form, exact_sqrt_form, moment_check, subset_chain_check};
use ksb::rng::Xoshiro256PlusPlus;

fn main() {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(99);
    let mat = random_psd(&mut rng, 10);

    let est = estimate_sqrt_form(&mat, 50_000, 7);
    let exact = exact_sqrt_form(&mat).expect("n <= 20");
    println!("E[sqrt(s' K s)] over random signs s:");
    println!("  monte carlo = {:.6} +- {:.6} (50k samples)", est.mean, est.std_error);
    println!("  exact       = {:.6} (2^(n-1) enumeration)", exact);
    println!("  jensen cap  = {:.6} (sqrt of trace)", mat.trace().sqrt());

    println!("\nmoment caps (eta0 = 23/22):");
    for p in 1..=5u32 {
        let mc = moment_check(&mat, p, 50_000, 11 + p as u64);
        println!(
            "  p = {p}: estimate {:>12.4} <= bound {:>14.4}  holds = {}",
            mc.estimate, mc.bound, mc.holds
        );
    }

    let mats: Vec<_> = (0..5).map(|_| random_psd(&mut rng, 10)).collect();
    let chain = subset_chain_check(&mats, 50_000, 23).expect("m >= 2");
    println!("\nsubset chain over {} matrices (p = {}):", mats.len(), chain.p);
    println!("  estimate = {:.6} +- {:.6}", chain.estimate, chain.std_error);
    println!("  bound    = {:.6}  holds = {}", chain.bound, chain.holds);
}
