//! Comparison maps between two Morse functions on the same surface, computed
//! by following unstable manifolds of the first function under the flow of
//! the second, then checked to be a chain map and a quasi-isomorphism.
//!
//! cargo run --release --example comparison

use flowcat::comparison::{build_psi, quasi_iso_check, verify_chain_map};
use flowcat::morse::{builtin, continuation, MorseModel, Tolerances};

fn main() {
    let t = Tolerances::default();
    let pairs = [
        ("torus", builtin::torus(), builtin::tilted_torus()),
        ("dumbbell", builtin::dumbbell(), builtin::dumbbell_rotated(builtin::DUMBBELL_AXIS, builtin::DUMBBELL_ANGLE)),
    ];
    for (name, a, b) in pairs {
        let m0 = MorseModel::new(a, t, 0).unwrap();
        let m1 = MorseModel::new(b, t, 0).unwrap();
        let d = continuation::comparison(&m0, &m1).unwrap();
        println!("== {name}");
        for m in &d.mixed0 {
            println!("  ({} -> {}) signs {:?}", m.from, m.to, m.signs);
        }
        let psi = build_psi(&d).unwrap();
        for (m, p) in &psi {
            println!("  Psi_{m} = {p}");
        }
        print!("{}", verify_chain_map(&d, &psi));
        print!("{}", quasi_iso_check(&d, &psi).unwrap());
    }
}
