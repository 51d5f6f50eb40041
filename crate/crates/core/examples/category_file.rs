//! Writing a flow category by hand, saving it in the `flowcat/1` format,
//! and reading it back for validation and homology.
//!
//! cargo run --example category_file [path]

use flowcat::flowcat::{BrokenFlow, Component, FlowCategory, FlowObject, ModuliOne, ModuliZero};
use flowcat::io::CategoryFile;

fn main() {
    // a height function on the sphere with a cancelling pair added: the
    // extra saddle s and minimum m are joined by one flow line
    let f = FlowCategory::new(
        vec![FlowObject::new("max", 2), FlowObject::new("s", 1), FlowObject::new("min", 0), FlowObject::new("m", 0)],
        vec![
            ModuliZero::new("max", "s", vec![1, -1]),
            ModuliZero::new("s", "min", vec![1]),
            ModuliZero::new("s", "m", vec![-1]),
        ],
    )
    .with_moduli1(vec![
        ModuliOne {
            from: "max".into(),
            to: "min".into(),
            components: vec![Component::interval(BrokenFlow::new("s", 0, 0), BrokenFlow::new("s", 1, 0))],
        },
        ModuliOne {
            from: "max".into(),
            to: "m".into(),
            components: vec![Component::interval(BrokenFlow::new("s", 0, 0), BrokenFlow::new("s", 1, 0))],
        },
    ]);
    let text = CategoryFile::new(f).to_json();
    let path = std::env::args().nth(1).map(std::path::PathBuf::from);
    if let Some(p) = &path {
        std::fs::write(p, &text).unwrap();
        println!("wrote {}", p.display());
    } else {
        print!("{text}");
    }
    let back = CategoryFile::parse(&text).unwrap();
    assert_eq!(back.to_json(), text);
    print!("{}{}", back.category.validate(), back.category.d_squared_report());
    for (d, h) in back.category.homology().unwrap() {
        println!("H_{d} = {h}");
    }
}
