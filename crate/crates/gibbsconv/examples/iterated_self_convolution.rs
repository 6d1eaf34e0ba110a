//! Iterated self-convolution flattens toward Lebesgue measure.
//!
//! Convolving a Gibbs measure with itself over and over averages its
//! Jacobian toward the constant 1/2: `sup |J_k - 1/2|` contracts at each
//! step and the entropy climbs to `log 2`, the entropy of Lebesgue measure.
//!
//! Run: cargo run --release --example iterated_self_convolution

use gibbsconv::convolution::iterate_self_convolution;
use gibbsconv::scenarios::PotentialSpec;

fn main() -> gibbsconv::Result<()> {
    let j = PotentialSpec::Cosine { a: 0.4 }.build(12)?;
    let rows = iterate_self_convolution(&j, 12, 10)?;

    println!("{:>3} {:>18} {:>14}", "k", "sup |J_k - 1/2|", "entropy");
    for r in &rows {
        println!("{:>3} {:>18.10} {:>14.8}", r.k, r.sup_dist_to_half, r.entropy);
    }
    println!();
    println!("log 2 = {:.8}", std::f64::consts::LN_2);
    Ok(())
}
