//! Classifies the bundled program corpus and shows printing and diffing.
//!
//! `cargo run --example dsl_classify`

use std::path::Path;

use pcrd::dsl::{classify, compile, pretty_print, structural_diff};

fn main() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/dsl_corpus");
    for class in ["valid", "syntax", "semantic", "runtime"] {
        let mut files: Vec<_> = std::fs::read_dir(root.join(class))
            .expect("corpus directory")
            .map(|e| e.expect("entry").path())
            .collect();
        files.sort();
        for f in files {
            let text = std::fs::read_to_string(&f).expect("readable");
            let c = classify(&text);
            let detail = match c.clone().into_result() {
                Ok(p) => format!("{} term(s)", p.terms.len()),
                Err(e) => e.to_string(),
            };
            println!("{:<9} {:<8} {:<28} {detail}", class, c.label(), f.file_name().unwrap().to_string_lossy());
        }
    }

    let before = compile("term platoon weight 1.0: step_platoon_km\nterm idle weight -0.5: waited_this_step").unwrap();
    let after = compile(
        "term platoon weight 2.0: step_platoon_km\nterm idle weight -0.5: waited_this_step and hub_truck_count == 0\nterm finish weight 3: is_finished",
    )
    .unwrap();
    println!("\ncanonical form:\n{}", pretty_print(&after));
    println!("diff:\n{}", structural_diff(&before, &after).render());
}
