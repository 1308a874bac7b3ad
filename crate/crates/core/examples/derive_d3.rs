//! Reruns the search that fixed the outer root groups of the D3 quadrangle:
//! every invertible coefficient matrix for `x₀` and every scale for `x₅`
//! that satisfies their commutator relations.
//!
//! `cargo run --release -p veldkamp --example derive_d3 -- 3`

use veldkamp::d3::{search_x0, search_x5, X0_COEFFS, X5_SCALE};

fn main() -> veldkamp::Result<()> {
    let p: u8 = std::env::args()
        .nth(1)
        .map_or(Ok(3), |s| s.parse())
        .unwrap_or_else(|e| {
            eprintln!("expected a prime: {e}");
            std::process::exit(2)
        });
    let x0: Vec<[u8; 4]> = search_x0(p)?.into_iter().map(|c| c.map(|e| e.0)).collect();
    let x5: Vec<u8> = search_x5(p)?.into_iter().map(|e| e.0).collect();
    println!("GF({p})");
    println!("x0 coefficient matrices [a, b, c, d]: {x0:?}");
    println!("x5 scales: {x5:?}");
    println!("frozen: X0_COEFFS = {X0_COEFFS:?}, X5_SCALE = {X5_SCALE}");
    Ok(())
}
