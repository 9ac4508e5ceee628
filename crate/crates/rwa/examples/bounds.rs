//! The two closed-form bounds: support-vector containment probability for
//! bootstrap samples, and the max-margin generalization bound.
//!
//! Run with: cargo run --example bounds

use rwa::chain::{containment_bound, generalization_bound};

fn main() -> rwa::Result<()> {
    println!("containment P(D ⊆ B) ≥ (1 − (1 − 1/n)^m)^d");
    println!(
        "  n=4,   m=4,   d=2        -> {:.6}",
        containment_bound(4, 4, 2, false)?
    );
    println!(
        "  n=100, m=100, d=3 (approx) -> {:.6}",
        containment_bound(100, 100, 3, true)?
    );
    println!(
        "  d=0 is certain             -> {:.6}",
        containment_bound(7, 3, 0, false)?
    );

    println!("\nbootstrap size vs containment, n = 100, d = 5:");
    for m in [25usize, 50, 100, 200, 400] {
        println!(
            "  m = {m:>3} -> {:.4}",
            containment_bound(100, m, 5, false)?
        );
    }

    println!("\ngeneralization bound (1/(l−d))(d·ln(el/d) + ln(l/δ)):");
    println!(
        "  l=100,  d=10, δ=0.1 -> {:.6}",
        generalization_bound(100, 10, 0.1)?
    );
    println!("\nfewer support vectors tighten it, l = 200, δ = 0.05:");
    for d in [5usize, 10, 20, 40, 80] {
        println!("  d = {d:>2} -> {:.4}", generalization_bound(200, d, 0.05)?);
    }
    println!("\nmore data tightens it, d = 10, δ = 0.05:");
    for l in [50usize, 100, 400, 1600, 6400] {
        println!("  l = {l:>4} -> {:.4}", generalization_bound(l, 10, 0.05)?);
    }
    Ok(())
}
