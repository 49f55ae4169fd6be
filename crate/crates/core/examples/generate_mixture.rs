//! Draw the four-Gaussian mixture and write it as CSV.
//!
//! Run with: cargo run --example generate_mixture

use ksb::synth::{corner_mixture, generate_mixture, write_csv};

fn main() {
    let cfg = corner_mixture(300, 50, 4.0, 1.0, 42);
    let data = generate_mixture(&cfg).expect("valid config");

    let pos = data.labels().iter().filter(|&&y| y == 1.0).count();
    println!("n = {}, d = {}", data.len(), data.dim());
    println!("labels: {pos} positive / {} negative", data.len() - pos);
    println!("same seed always reproduces this dataset bit-for-bit");

    let path = std::env::temp_dir().join("ksb-mixture.csv");
    let file = std::fs::File::create(&path).expect("writable temp dir");
    write_csv(&data, std::io::BufWriter::new(file)).expect("csv written");
    println!("csv written to {}", path.display());
}
