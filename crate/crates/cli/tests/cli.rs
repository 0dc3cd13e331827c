use std::path::Path;
use std::process::{Command, Output};

fn sforest(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sforest"))
        .args(args)
        .current_dir(dir)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn horseshoe_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let gen = sforest(&["gen", "--family", "horseshoe", "--n", "3", "--xi", "1/100", "--out", "h.stp"], dir.path());
    assert!(gen.status.success());
    let legacy = sforest(&["solve", "--algo", "legacy", "--in", "h.stp"], dir.path());
    assert_eq!(legacy.status.code(), Some(0));
    assert!(stdout(&legacy).contains("cost 359/50 (7.180000)"));
    let main = sforest(&["solve", "--algo", "main", "--in", "h.stp", "--params", "table2"], dir.path());
    let text = stdout(&main);
    assert!(text.contains("chosen AP"), "{text}");
    assert!(text.contains("cost 259/50"));
}

#[test]
fn output_is_byte_stable() {
    let dir = tempfile::tempdir().unwrap();
    sforest(&["gen", "--family", "random", "--n", "7", "--seed", "4", "--out", "r.stp"], dir.path());
    for args in [
        vec!["solve", "--algo", "main", "--in", "r.stp", "--json"],
        vec!["trace", "--in", "r.stp", "--algo", "ls"],
    ] {
        let a = sforest(&args, dir.path());
        let b = sforest(&args, dir.path());
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout);
    }
    let trace = sforest(&["trace", "--in", "r.stp"], dir.path());
    let doc: serde_json::Value = serde_json::from_slice(&trace.stdout).unwrap();
    for key in ["events", "ledger", "forest", "deactivated"] {
        assert!(doc.get(key).is_some());
    }
}

#[test]
fn parameter_table() {
    let dir = tempfile::tempdir().unwrap();
    let table = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/table2.txt");
    std::fs::copy(&table, dir.path().join("table2.txt")).unwrap();
    let ok = sforest(&["verify", "--params-table", "table2.txt"], dir.path());
    assert_eq!(stdout(&ok), "OK: alpha = 1/200000000000\n");
    let text = std::fs::read_to_string(&table).unwrap().replace("beta ", "beta 2 #");
    std::fs::write(dir.path().join("bad.txt"), text).unwrap();
    let bad = sforest(&["verify", "--params-table", "bad.txt"], dir.path());
    assert_eq!(bad.status.code(), Some(1));
    assert!(stdout(&bad).starts_with("FAIL"));
}

#[test]
fn checkers_on_a_small_instance() {
    let dir = tempfile::tempdir().unwrap();
    sforest(&["gen", "--family", "wheel", "--out", "w.stp"], dir.path());
    let out = sforest(&["verify", "--in", "w.stp", "--claw", "--refinement", "--assignments"], dir.path());
    let text = stdout(&out);
    assert_eq!(out.status.code(), Some(0), "{text}");
    assert!(text.contains("claw: 0 violations"));
    assert!(text.contains("refinement: holds"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(sforest(&["solve", "--algo", "nope", "--in", "x"], dir.path()).status.code(), Some(2));
    std::fs::write(dir.path().join("broken.stp"), "SECTION Graph\nN 2\nE 0 1 -1\nEOF\n").unwrap();
    let parse = sforest(&["solve", "--in", "broken.stp"], dir.path());
    assert_eq!(parse.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&parse.stderr).contains("line 3"));
    sforest(&["gen", "--family", "grid", "--n", "4", "--m", "4", "--out", "g.stp"], dir.path());
    assert_eq!(sforest(&["solve", "--algo", "exact", "--in", "g.stp"], dir.path()).status.code(), Some(1));
}

#[test]
fn bench_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = sforest(&["bench", "--families", "wheel", "--no-timing", "--out", "r.tsv"], dir.path());
    assert!(out.status.success());
    let text = std::fs::read_to_string(dir.path().join("r.tsv")).unwrap();
    assert_eq!(
        text,
        "instance\talgo\tcost\topt\tratio\truntime_ms\n\
         wheel\tgluttonous\t6/1\t101/25\t1.485148514851\t0\n\
         wheel\tlegacy\t6/1\t101/25\t1.485148514851\t0\n\
         wheel\tls\t101/25\t101/25\t1.000000000000\t0\n\
         wheel\tmain\t101/25\t101/25\t1.000000000000\t0\n"
    );
}
