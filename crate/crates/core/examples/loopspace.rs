//! Broken-geodesic approximations to the free loop space of the circle: each
//! winding sector of `k`-segment loops with a small perturbation has the
//! homology of a circle.
//!
//! cargo run --release --example loopspace [eps]

use flowcat::morse::{builtin, MorseModel, Tolerances};

fn main() {
    let eps: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0.1);
    for k in [2, 3, 4] {
        for n in [0, 1, -1] {
            let name = format!("loopspace:{k},{n},{eps}");
            let model = match builtin::by_name(&name).and_then(|s| MorseModel::new(s, Tolerances::default(), 0)) {
                Ok(m) => m,
                Err(e) => {
                    println!("{name}: {e}");
                    continue;
                }
            };
            let f = model.flow_category().unwrap();
            let h: Vec<String> = f.homology().unwrap().iter().map(|(d, g)| format!("H_{d} = {g}")).collect();
            let crit: Vec<String> = model.critical.iter().map(|c| format!("{} ({:.4})", c.id, c.value)).collect();
            println!("{name}: {}; critical points {}", h.join(", "), crit.join(", "));
        }
    }
}
