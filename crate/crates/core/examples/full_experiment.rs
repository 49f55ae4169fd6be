//! Run the shipped 8-kernel prefix-sum experiment and print the curve
//! table; writes experiment.csv, experiment.svg, and report.json.
//!
//! Run with: cargo run --example full_experiment

use ksb::config::ExperimentConfig;
use ksb::runner::run_experiment;
use std::path::Path;

fn main() {
    let cfg_path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/default-experiment.json");
    let cfg = ExperimentConfig::from_file(&cfg_path).expect("shipped config");
    let out_dir = std::env::temp_dir().join("ksb-experiment");
    let report = run_experiment(&cfg, &out_dir).expect("experiment runs");

    println!("{:<4} {:>14} {:>14} {:>14}", "m", "empirical", "curve_sum", "curve_max");
    for row in &report.rows {
        println!(
            "{:<4} {:>14.6} {:>14.6} {:>14.6}",
            row.m, row.empirical, row.curve_sum, row.curve_max
        );
    }
    println!("\nper-kernel quadratic forms:");
    for (name, q) in report.kernel_names.iter().zip(&report.per_kernel_quad) {
        println!("  {name:<26} {q:>12.4}");
    }
    println!("all within B^2 = {}: {}", report.b_squared, report.all_within_b_squared);
    println!("max KKT residual: {:.2e}", report.max_kkt_residual);
    println!("outputs in {}", out_dir.display());
}
