//! Points of the morphism spaces `J(n, m) ≅ ℝ₊^{n−m−1}`, composition, and the
//! faces a composite lands in.
//!
//! cargo run --example jcat

use flowcat::jcat::{compose, face_factorization, j_dimension, stratum_of, JFace, JPoint};

fn main() {
    let u = JPoint::new(5, 2, vec![0.5, 1.5]).unwrap();
    let v = JPoint::new(2, 0, vec![3.0]).unwrap();
    let w = compose(&u, &v).unwrap();
    println!("dim J(5,2) = {}, dim J(2,0) = {}, dim J(5,0) = {}", j_dimension(5, 2).unwrap(), j_dimension(2, 0).unwrap(), j_dimension(5, 0).unwrap());
    println!("u ∘ v = {w:?}");
    let face = stratum_of(&w).unwrap();
    println!("stratum vanishes at t_i for i in {:?}, dimension {}", face.vanishing, face.dimension());

    let inf = JPoint::infinity(2, 0).unwrap();
    println!("u ∘ ∞ = {:?}", compose(&u, &inf).unwrap());
    if let Err(e) = compose(&v, &u) {
        println!("v ∘ u: {e}");
    }

    let f = JFace::new(6, 0, [4, 1]).unwrap();
    let chain = face_factorization(&f);
    let dims: Vec<usize> = chain.iter().map(|&(a, b)| j_dimension(a, b).unwrap()).collect();
    println!("face {{t_1 = t_4 = 0}} of J(6,0) is {chain:?} with dimensions {dims:?} summing to {}", f.dimension());
}
