//! Cell bookkeeping for the realization of a flow category: cell dimensions
//! for a chosen suspension index, attaching degrees, and the cellular
//! homology against the Morse homology.
//!
//! cargo run --example realize

use flowcat::flowcat::standard;
use flowcat::realize::{default_shift, homotopy_chain_check, realize, subquotient_report};

fn main() {
    let f = standard::torus();
    let base = default_shift(&f);
    for shift in [base, base + 3] {
        let cw = realize(&f, shift).unwrap();
        println!("L = {shift}");
        print!("{}", cw.to_tsv());
        for (d, h) in cw.cellular_complex().homology().unwrap() {
            println!("  cellular H_{d} = {h}");
        }
    }
    println!("Morse homology:");
    for (d, h) in f.homology().unwrap() {
        println!("  H_{d} = {h}");
    }
    for level in subquotient_report(&f) {
        println!("level {}: wedge of {} spheres of dimension {}", level.level, level.sphere_count, level.realized_dimension(base, 0));
    }
    print!("{}", homotopy_chain_check(&f));
    match realize(&f, base - 1) {
        Ok(_) => unreachable!(),
        Err(e) => println!("L = {}: {e}", base - 1),
    }
    println!("{}", realize(&f, base).unwrap().to_dot());
}
