//! Smith normal form of an integer matrix and integral homology of a small
//! chain complex (the real projective plane with one cell per dimension).
//!
//! cargo run --example snf

use flowcat::chain::ChainComplex;
use flowcat::linalg::{smith_normal_form, IntMatrix};

fn main() {
    let m = IntMatrix::from_rows(&[[2, 4, 4], [-6, 6, 12], [10, -4, -16]]);
    let s = smith_normal_form(&m);
    println!("M = {m}");
    println!("D = {}", s.d);
    println!("U = {}", s.u);
    println!("V = {}", s.v);
    println!("U M V = {}", s.u.mul(&m).unwrap().mul(&s.v).unwrap());
    let factors: Vec<String> = s.invariant_factors().iter().map(ToString::to_string).collect();
    println!("invariant factors: {}", factors.join(", "));

    // RP²: ∂₁ = 0, ∂₂ = 2
    let rp2 = ChainComplex::from_ranks(0, &[1, 1, 1], vec![IntMatrix::zeros(0, 1), IntMatrix::zeros(1, 1), IntMatrix::from_rows(&[[2]])])
        .unwrap();
    for (d, h) in rp2.homology().unwrap() {
        println!("H_{d}(RP2) = {h}");
    }
}
