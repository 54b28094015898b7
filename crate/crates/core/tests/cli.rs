use std::path::Path;
use std::process::{Command, Output};

fn pcrd(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pcrd")).args(args).current_dir(cwd).output().unwrap()
}

fn fixture(rel: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join(rel).display().to_string()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn dsl_check_reports_a_single_prefixed_line() {
    let tmp = tempfile::tempdir().unwrap();
    let bad = pcrd(&["dsl", "check", &fixture("fixtures/dsl_corpus/semantic/01_misspelled.rdsl")], tmp.path());
    assert_eq!(bad.status.code(), Some(2));
    let err = stderr(&bad);
    assert_eq!(err.lines().count(), 1, "{err}");
    assert!(err.starts_with("SEMANTIC: unknown identifier 'platon_size'"), "{err}");

    let good = pcrd(&["dsl", "check", &fixture("fixtures/dsl_corpus/valid/02_two_terms.rdsl")], tmp.path());
    assert_eq!(good.status.code(), Some(0), "{}", stderr(&good));
    assert!(String::from_utf8_lossy(&good.stdout).starts_with("VALID: 2 term"));
}

#[test]
fn missing_file_is_a_config_class_failure() {
    let tmp = tempfile::tempdir().unwrap();
    let o = pcrd(&["dsl", "check", "nope.rdsl"], tmp.path());
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stderr(&o).lines().count(), 1);
}

#[test]
fn mock_pipeline_is_reproducible_and_exportable() {
    let tmp = tempfile::tempdir().unwrap();
    let mock = fixture("fixtures/mock_run");
    let args = |root: &str| {
        vec![
            "pipeline", "--line", "--seed", "3", "--n-iter", "2", "--k", "2", "--episodes", "100", "--eval-every", "1",
            "--eval-rollouts", "1", "--run-id", "r", "--mock", &mock, "--run-root", root,
        ]
        .into_iter()
        .map(String::from)
        .collect::<Vec<_>>()
    };
    let mut manifests = Vec::new();
    for root in ["a", "b"] {
        let a = args(root);
        let o = pcrd(&a.iter().map(String::as_str).collect::<Vec<_>>(), tmp.path());
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        let text = std::fs::read_to_string(tmp.path().join(root).join("r/manifest.json")).unwrap();
        let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
        v.as_object_mut().unwrap().remove("timings");
        manifests.push(v);
    }
    assert_eq!(manifests[0], manifests[1]);

    let again = pcrd(&args("a").iter().map(String::as_str).collect::<Vec<_>>(), tmp.path());
    assert_eq!(again.status.code(), Some(1));
    assert!(stderr(&again).starts_with("CONFIG: "));

    let resumed = pcrd(&["resume", "r", "--run-root", "a", "--mock", &mock], tmp.path());
    assert_eq!(resumed.status.code(), Some(0), "{}", stderr(&resumed));

    let export = pcrd(&["export", "r", "--run-root", "a", "--out", "x"], tmp.path());
    assert_eq!(export.status.code(), Some(0), "{}", stderr(&export));
    assert!(tmp.path().join("x/candidates.csv").exists());

    let curve = tmp.path().join("a/r/iter_1/cand_0/curve.csv").display().to_string();
    let filter = pcrd(&["filter", &curve], tmp.path());
    assert_eq!(filter.status.code(), Some(0), "{}", stderr(&filter));
}

#[test]
fn missing_api_key_is_reported_as_auth() {
    let tmp = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_pcrd"))
        .args(["pipeline", "--line", "--n-iter", "1", "--k", "1", "--episodes", "100", "--eval-every", "1"])
        .env_remove("PCRD_API_KEY")
        .current_dir(tmp.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("AUTH: "), "{}", stderr(&o));
}
