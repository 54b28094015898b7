mod common;

use pcrd::dsl::{classify, compile, parse, pretty_print};

#[test]
fn corpus_taxonomy_and_fuzz() {
    common::dsl_taxonomy().unwrap();
}

#[test]
fn misspelled_feature_names_the_identifier() {
    let text = std::fs::read_to_string(common::crate_dir().join("fixtures/dsl_corpus/semantic/01_misspelled.rdsl")).unwrap();
    let err = compile(&text).unwrap_err();
    assert!(err.to_string().starts_with("SEMANTIC: unknown identifier 'platon_size'"), "{err}");
}

#[test]
fn pretty_print_is_a_fixed_point_on_the_valid_corpus() {
    for (class, text, path) in common::corpus() {
        if class != "valid" {
            continue;
        }
        let once = pretty_print(&parse(&text).unwrap());
        let twice = pretty_print(&parse(&once).unwrap());
        assert_eq!(once, twice, "{}", path.display());
        assert_eq!(classify(&once).label(), "VALID");
    }
}

#[test]
fn fuzz_never_panics() {
    let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(5);
    for _ in 0..300 {
        let input = common::fuzz_input(&mut rng);
        let _ = classify(&input);
    }
}

#[test]
fn bundled_baselines_compile() {
    let dir = common::crate_dir().join("assets/baselines");
    let mut n = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        compile(&std::fs::read_to_string(&path).unwrap()).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        n += 1;
    }
    assert_eq!(n, 2);
}
