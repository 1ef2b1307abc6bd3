use std::io::Write;
use std::process::{Command, Output};

use stratops::hoalg::{MapFamily, Multilinear};
use stratops::operads::GradedSpace;
use stratops::qlinalg::SparseVec;
use stratops::strata::{e1_table, AutMode, BettiTable, E1Table};

fn run_in(cache: &std::path::Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stratops"))
        .args(args)
        .env("STRATOPS_CACHE_DIR", cache)
        .output()
        .expect("binary runs")
}

fn run(args: &[&str]) -> Output {
    let dir = tempfile::tempdir().unwrap();
    run_in(dir.path(), args)
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn temp_file(contents: &str, suffix: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::Builder::new().suffix(suffix).tempfile().unwrap();
    f.write_all(contents.as_bytes()).unwrap();
    f
}

#[test]
fn documented_examples() {
    let o = run(&["betti-predict", "--n", "5"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "1,5,1");

    let o = run(&["trees", "--n", "4", "--edges", "2", "--count"]);
    assert_eq!(stdout(&o).trim(), "15");

    let o = run(&["cobar-homology", "--cooperad", "liec", "--arity", "4", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["total"], 1);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(run(&["betti-predict"]).status.code(), Some(2));
    assert_eq!(run(&["cobar", "--cooperad", "nope", "--arity", "3"]).status.code(), Some(2));
    assert_eq!(run(&["check-ainf", "--file", "/nonexistent.json"]).status.code(), Some(2));

    // a non-associative product fails the check with a report
    let space = GradedSpace::new(vec![("a".into(), 0), ("b".into(), 0)]);
    let mut f = MapFamily::without_differential(space);
    let mut m2 = Multilinear::new(2);
    m2.set(vec![0, 0], SparseVec::unit(1));
    m2.set(vec![0, 1], SparseVec::unit(0));
    f.set_map(m2).unwrap();
    let file = temp_file(&f.to_json(), ".json");
    let o = run(&["check-ainf", "--file", file.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("failures"));
    let o = run(&["check-cinf", "--file", file.path().to_str().unwrap(), "--max-n", "3"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn betti_ingestion() {
    let ok = temp_file("g,n,k,dim\n1,1,0,1\n", ".csv");
    let o = run(&["e1", "--g", "1", "--n", "1", "--betti", ok.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));

    let bad = temp_file("g,n,k,dim\n0,5,1,4\n", ".csv");
    let o = run(&["e1", "--g", "0", "--n", "5", "--betti", bad.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("conflicts with the genus-0 value 5"));

    let empty = temp_file("g,n,k,dim\n", ".csv");
    let o = run(&["e1", "--g", "0", "--n", "4", "--betti", empty.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));

    // M_{1,2} is not shipped
    assert_eq!(run(&["e1", "--g", "1", "--n", "2"]).status.code(), Some(2));
}

#[test]
fn json_round_trips() {
    let o = run(&["e1", "--g", "0", "--n", "6", "--format", "json"]);
    let back: E1Table = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(back, e1_table(0, 6, &BettiTable::new(), AutMode::default()).unwrap());

    let o = run(&["cobar", "--cooperad", "liec", "--arity", "4", "--format", "json"]);
    let file: stratops::cobar::CobarComplexFile = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(file.dims, vec![6, 20, 15]);
    assert_eq!(file.homology, vec![0, 0, 1]);
}

#[test]
fn deterministic_and_cached() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["middle-row", "--n", "5", "--format", "csv"];
    let first = run_in(dir.path(), &args);
    assert!(std::fs::read_dir(dir.path()).unwrap().count() > 0);
    let second = run_in(dir.path(), &args);
    let fresh = run_in(dir.path(), &["middle-row", "--n", "5", "--format", "csv", "--no-cache"]);
    assert_eq!(first.stdout, second.stdout);
    assert_eq!(first.stdout, fresh.stdout);
    assert_eq!(first.status.code(), Some(0));
    assert!(stdout(&first).contains("1,210,210"));

    let target = dir.path().join("out.txt");
    let o = run_in(dir.path(), &["betti-predict", "--n", "6", "--output", target.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(target).unwrap().trim(), "1,16,16,1");
}

#[test]
fn filtration_subcommands() {
    let o = run(&["er", "--r", "1", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("3,1,1,1"));

    let o = run(&["dk", "--r", "1", "--k", "0", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["certificate"]["escapes"].as_array().unwrap().len(), 0);

    let o = run(&["dk", "--r", "1", "--k", "1", "--moduli", "6", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["slices"].as_array().unwrap().is_empty());

    let o = run(&["pipeline-cinf"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("verified"));

    let table = {
        let o = run(&["axioms", "--operad", "toy", "--max-arity", "3"]);
        assert_eq!(o.status.code(), Some(0));
        stratops::filtration::toy_moduli().to_table().to_json()
    };
    let f = temp_file(&table, ".json");
    let o = run(&["er", "--file", f.path().to_str().unwrap(), "--r", "2", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("3,0,0,1"));
}
