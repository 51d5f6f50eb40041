//! Manifolds with corners as stratified data: orthants, products, the
//! `2^k`-diagram of faces, and the corner structure of a compactified moduli
//! space of broken flow lines.
//!
//! cargo run --example corners

use flowcat::corners::{moduli_corner, CornerComplex};
use flowcat::flowcat::standard;

fn main() {
    for k in 0..=3 {
        let o = CornerComplex::orthant(k);
        println!("R+^{k}: {} strata, valid: {}", o.len(), o.validate().passed());
    }
    let square = CornerComplex::interval().product(&CornerComplex::interval()).unwrap();
    println!("[0,1]^2: k = {}, {} strata, valid: {}", square.k, square.len(), square.validate().passed());
    let d = square.two_k_diagram().unwrap();
    println!("  2^k diagram monotone: {}, preserves meets: {}", d.is_monotone(), d.preserves_meets());

    let torus = standard::torus();
    let m = moduli_corner(&torus, "max", "min").unwrap();
    println!("compactified M(max, min) on the torus: k = {}", m.k);
    for s in &m.strata {
        println!("  {} (codim {})", s.label, s.codim);
    }
    print!("{}", m.validate().0);

    let mut broken = CornerComplex::orthant(2);
    broken.incidence.retain(|&(s, t)| (s, t) != (3, 1));
    println!("R+^2 with a missing incidence, valid: {}", broken.validate().passed());
}
