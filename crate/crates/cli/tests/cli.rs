use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use wcsp_cli::format;
use wcsp_core::reductions;
use wcsp_core::weight;
use wcsp_core::Oracle;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn wcsp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wcsp"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8")
}

fn value<'a>(text: &'a str, key: &str) -> Option<&'a str> {
    text.lines().find_map(|l| l.strip_prefix(key)?.strip_prefix('='))
}

fn path(p: &Path) -> &str {
    p.to_str().expect("utf-8 path")
}

#[test]
fn count_examples() {
    let eqw = data("eqw.wcsp");
    let out = wcsp(&["count", path(&eqw), "--instance", "chain", "--method", "both"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert_eq!(value(&text, "Z"), Some("13"));
    assert_eq!(value(&text, "check"), Some("PASS"));

    let out = wcsp(&["count", path(&eqw), "--instance", "empty"]);
    assert_eq!(value(&stdout(&out), "Z"), Some("8"));

    let out = wcsp(&["--explicit-denominator", "count", path(&eqw), "--instance", "chain"]);
    assert_eq!(value(&stdout(&out), "Z"), Some("13/1"));

    let out = wcsp(&["count", path(&data("one2.wcsp")), "--method", "structured"]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("NoAutomorphism(1,2,1,2)"));
}

#[test]
fn classify_and_vecrep_examples() {
    let text = stdout(&wcsp(&["classify", path(&data("eqw.wcsp"))]));
    assert_eq!(value(&text, "verdict"), Some("TRACTABLE"));
    assert_eq!(value(&text, "automorphisms"), Some("4"));
    assert!(value(&text, "maltsev").is_some());

    let text = stdout(&wcsp(&["classify", path(&data("one2.wcsp"))]));
    assert_eq!(text, "verdict=SHARP_P_HARD\nreason=NoAutomorphism(1,2,1,2)\n");

    let text = stdout(&wcsp(&["classify", path(&data("nand.wcsp"))]));
    assert!(value(&text, "reason").is_some_and(|r| r.starts_with("NoMaltsev(NAND")));

    let text = stdout(&wcsp(&["vecrep", path(&data("one2.wcsp")), "--function", "ONE2"]));
    assert_eq!(value(&text, "status"), Some("NOT_BLOCK_RANK_1"));
    assert_eq!(value(&text, "level"), Some("2"));

    let text = stdout(&wcsp(&["check-balance", path(&data("one2.wcsp"))]));
    assert_eq!(value(&text, "verdict"), Some("VIOLATED"));
    assert_eq!(value(&text, "split"), Some("(1,2)"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.wcsp");
    std::fs::write(&bad, "domain 2\nfunction F 1\n 1 oops\n").unwrap();
    let out = wcsp(&["count", path(&bad)]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 3") && err.contains("oops"), "{err}");

    let eqw = data("eqw.wcsp");
    assert_eq!(wcsp(&["count", path(&eqw)]).status.code(), Some(2));
    assert_eq!(
        wcsp(&["count", path(&eqw), "--instance", "nope"]).status.code(),
        Some(2)
    );
    assert_eq!(
        wcsp(&["--bound", "4", "count", path(&eqw), "--instance", "chain"])
            .status
            .code(),
        Some(3)
    );
    assert_eq!(
        wcsp(&["count", path(&dir.path().join("missing.wcsp"))]).status.code(),
        Some(2)
    );
}

#[test]
fn gadget_round_trips_through_count() {
    let dir = tempfile::tempdir().unwrap();
    let mut files = vec![(data("one2.wcsp"), "single".to_string(), "edge".to_string())];
    for seed in 0..6 {
        let out = wcsp(&[
            "--seed",
            &seed.to_string(),
            "generate",
            "--graph-vertices",
            "3",
            "--graph-edges",
            "3",
            "--max-vars",
            "3",
        ]);
        let file = dir.path().join(format!("gen{seed}.wcsp"));
        std::fs::write(&file, out.stdout).unwrap();
        for k in 1..=3 {
            files.push((file.clone(), format!("i{k}"), "g1".to_string()));
        }
    }
    let oracle = Oracle::default();
    let mut checked = 0;
    for (file, inst_name, graph_name) in files {
        let parsed = format::parse(&std::fs::read_to_string(&file).unwrap()).unwrap();
        let inst = parsed.instance(&inst_name).unwrap();
        let n = inst.num_vars();
        for a in 1..n {
            for b in a + 1..=n {
                let gadget = dir.path().join("gadget.wcsp");
                let out = wcsp(&[
                    "gadget",
                    path(&file),
                    "--instance",
                    &inst_name,
                    "-a",
                    &a.to_string(),
                    "-b",
                    &b.to_string(),
                    "--graph",
                    &graph_name,
                    "--output",
                    path(&gadget),
                ]);
                assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
                let text = std::fs::read_to_string(&gadget).unwrap();
                let recorded = text
                    .lines()
                    .find_map(|l| l.strip_prefix("# graph_partition_function="))
                    .unwrap();

                let matrix = reductions::gadget_matrix(&oracle, inst, a, b).unwrap();
                let za =
                    reductions::graph_partition_function(&oracle, &matrix, parsed.graph(&graph_name).unwrap()).unwrap();
                let counted = stdout(&wcsp(&["count", path(&gadget), "--instance", "gadget"]));
                assert_eq!(value(&counted, "Z"), Some(weight::format(&za, false).as_str()));
                assert_eq!(recorded, weight::format(&za, false));
                checked += 1;
            }
        }
    }
    assert!(checked > 5);
}

#[test]
fn reduce_unweighted_matches_support() {
    let out = wcsp(&[
        "reduce-unweighted",
        path(&data("eqw.wcsp")),
        "--instance",
        "single",
        "--verify",
    ]);
    let text = stdout(&out);
    assert_eq!(value(&text, "values"), Some("2 3"));
    assert_eq!(value(&text, "support"), Some("2"));
    assert_eq!(value(&text, "check"), Some("PASS"));

    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("gen.wcsp");
    std::fs::write(&file, wcsp(&["--seed", "9", "generate", "--instances", "4"]).stdout).unwrap();
    for k in 1..=4 {
        let out = wcsp(&[
            "reduce-unweighted",
            path(&file),
            "--instance",
            &format!("i{k}"),
            "--verify",
        ]);
        assert_eq!(out.status.code(), Some(0));
        assert_eq!(value(&stdout(&out), "check"), Some("PASS"));
    }
}

#[test]
fn structured_and_brute_agree_on_generated_files() {
    let dir = tempfile::tempdir().unwrap();
    for seed in 20..24 {
        let file = dir.path().join(format!("gen{seed}.wcsp"));
        std::fs::write(&file, wcsp(&["--seed", &seed.to_string(), "generate"]).stdout).unwrap();
        for k in 1..=3 {
            let out = wcsp(&["count", path(&file), "--instance", &format!("i{k}"), "--method", "both"]);
            assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
            assert_eq!(value(&stdout(&out), "check"), Some("PASS"));
        }
    }
}

#[test]
fn output_is_deterministic() {
    let a = wcsp(&["--seed", "3", "generate", "--graph-vertices", "2"]);
    let b = wcsp(&["--seed", "3", "generate", "--graph-vertices", "2"]);
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(
        a.stdout,
        wcsp(&["--seed", "4", "generate", "--graph-vertices", "2"]).stdout
    );

    let eqw = data("eqw.wcsp");
    let c1 = wcsp(&["classify", path(&eqw)]);
    let c2 = wcsp(&["--threads", "2", "classify", path(&eqw)]);
    assert_eq!(c1.stdout, c2.stdout);

    let parsed = format::parse(&String::from_utf8(a.stdout.clone()).unwrap()).unwrap();
    let rewritten = format::write(&parsed, false);
    let text = String::from_utf8(a.stdout).unwrap();
    assert!(text.ends_with(&rewritten));
}
