//! Builds the flow category of each built-in surface numerically and prints
//! its critical points, moduli spaces and integral homology.
//!
//! cargo run --release --example morse_homology [name ...]

use std::time::Instant;

use flowcat::morse::{builtin, MorseModel, Tolerances};

fn main() {
    let names: Vec<String> = std::env::args().skip(1).collect();
    let names = if names.is_empty() {
        vec!["circle".into(), "sphere".into(), "torus".into(), "tilted-torus".into()]
    } else {
        names
    };
    for name in names {
        let start = Instant::now();
        let spec = match builtin::by_name(&name) {
            Ok(s) => s,
            Err(e) => {
                eprintln!("{name}: {e}");
                continue;
            }
        };
        let model = match MorseModel::new(spec, Tolerances::default(), 0) {
            Ok(m) => m,
            Err(e) => {
                println!("{name}: {e}");
                continue;
            }
        };
        println!("== {name}");
        for c in &model.critical {
            println!("  {} index {} value {:.6} at {:?}", c.id, c.index, c.value, c.coords);
        }
        let f = model.flow_category().expect("flow category");
        for m in &f.moduli0 {
            println!("  M({}, {}) = {:?}", m.from, m.to, m.signs);
        }
        for m in f.moduli1.iter().flatten() {
            println!("  M({}, {}) has {} components", m.from, m.to, m.components.len());
        }
        print!("{}", f.d_squared_report());
        for (d, h) in f.homology().expect("homology") {
            println!("  H_{d} = {h}");
        }
        println!("  {:.2?}", start.elapsed());
    }
}
