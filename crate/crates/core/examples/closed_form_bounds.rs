//! Print the closed-form complexity bounds as m grows, plus the
//! piecewise margin loss and its deviation term.
//!
//! Run with: cargo run --example closed_form_bounds

use ksb::bounds::{psi_loss, risk_epsilon, subset_bound};
use ksb::runner::run_bounds;

fn main() {
    let (b, r, n) = (1.0, 1.0, 400);
    let table = run_bounds(b, r, n, 16).expect("valid parameters");
    print!("{}", table.format_text());

    println!("\nsubset bound at m = 1 is the literal formula value:");
    println!("  subset_bound(B=1, R=1, n=400, m=1) = {}", subset_bound(b, r, n, 1));
    println!("  (ceil(ln 1) = 0 makes the closed form vanish; larger m behaves normally)");

    let gamma = 0.2;
    println!("\nmargin loss psi at gamma = {gamma}:");
    for x in [-0.5, 0.0, 0.1, 0.2, 0.5] {
        println!("  psi({x:>4}) = {}", psi_loss(x, gamma).unwrap());
    }
    for (delta, n) in [(0.05, 300usize), (0.05, 1200), (0.01, 300)] {
        println!(
            "risk deviation eps(gamma={gamma}, delta={delta}, n={n}) = {:.6}",
            risk_epsilon(gamma, delta, n).unwrap()
        );
    }
}
