//! Spectral sequences: the coefficient sequence of a flow category with
//! ordinary and two-row coefficients, and a filtered complex over F2 run to
//! E_inf.
//!
//! cargo run --example spectral

use flowcat::flowcat::standard;
use flowcat::linalg::field::{FMat, Field};
use flowcat::spectral::{build_e1, collapse_check, run_filtered, turn_page, CoefficientTheory, FilteredComplex};

fn main() {
    let f = standard::circle();
    for h in [CoefficientTheory::ordinary(Field::Rational), CoefficientTheory::new("two-row", Field::Prime(2), [(0, 1), (1, 1)])] {
        let e1 = build_e1(&f, &h).unwrap();
        let e2 = turn_page(&e1, &e1.differentials).unwrap();
        println!("{}:", h.name);
        print!("{}{}", e1.to_text(), e2.to_text());
        if h.is_ordinary() {
            print!("{}", collapse_check(&f, &h));
        }
    }

    // an interval x → y with y in filtration 0 and x in filtration 2, so that
    // the cancellation first shows up as d_2
    let k = Field::Prime(2);
    let fc = FilteredComplex::new(k, 0, vec![vec![0], vec![2]], vec![FMat::zeros(0, 1), FMat::from_small(1, 1, &[1], &k)]).unwrap();
    let run = run_filtered(&fc).unwrap();
    for page in &run.pages {
        print!("{}", page.to_text());
    }
    println!("total homology {:?}", run.total_homology);
    print!("{}", run.report);
}
