use std::path::Path;
use std::process::{Command, Output};

fn csg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_csg"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn value_of(o: &Output) -> i64 {
    stdout(o)
        .lines()
        .find_map(|l| l.strip_prefix("value "))
        .expect("value line")
        .parse()
        .unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

const ALGORITHMS: [&str; 6] = ["oracle", "dype", "tsp", "dype-star", "d-tsp", "cfss"];

#[test]
fn four_cycle_all_algorithms_agree() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c4.txt");
    let path = path.to_str().unwrap();
    let g = csg(&[
        "gen", "--model", "cycle", "--n", "4", "--seed", "9", "--out", path,
    ]);
    assert!(g.status.success());
    let values: Vec<i64> = ALGORITHMS
        .iter()
        .map(|a| {
            let o = csg(&["solve", path, "--algorithm", a]);
            assert_eq!(o.status.code(), Some(0), "{a}");
            value_of(&o)
        })
        .collect();
    assert!(values.iter().all(|&v| v == values[0]), "{values:?}");
}

#[test]
fn gen_is_deterministic() {
    let a = csg(&["gen", "--model", "gnp:0.5", "--n", "8", "--seed", "4"]);
    let b = csg(&["gen", "--model", "gnp:0.5", "--n", "8", "--seed", "4"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).starts_with("csg 1\nn 8\n"));
}

#[test]
fn superadditive_instance_forms_grand_coalition() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(
        dir.path(),
        "sup.txt",
        "csg 1\nn 4\ne 0 1\ne 1 2\ne 2 3\ngame supersub w 2 3 1 4 k 0 seed 0\n",
    );
    for a in ALGORITHMS {
        let o = csg(&["solve", &path, "--algorithm", a, "--bound", "supersub"]);
        assert_eq!(value_of(&o), 40, "{a}");
        assert!(
            stdout(&o).contains("structure {{0,1,2,3}}"),
            "{a}: {}",
            stdout(&o)
        );
    }
}

#[test]
fn two_triangles_solve_independently() {
    let dir = tempfile::tempdir().unwrap();
    // v(C) = |C|² inside the first triangle, -|C|² elsewhere.
    let mut values = Vec::new();
    for c in 1u32..64 {
        let k = c.count_ones() as i64;
        values.push(if c & !0b111 == 0 { k * k } else { -k * k });
    }
    let table: Vec<String> = values.iter().map(|v| v.to_string()).collect();
    let text = format!(
        "csg 1\nn 6\ne 0 1\ne 1 2\ne 0 2\ne 3 4\ne 4 5\ne 3 5\ngame table {}\n",
        table.join(" ")
    );
    let path = write(dir.path(), "tt.txt", &text);
    for a in ALGORITHMS {
        let o = csg(&["solve", &path, "--algorithm", a]);
        assert_eq!(o.status.code(), Some(0), "{a}");
        assert_eq!(value_of(&o), 9 - 3, "{a}");
        assert!(
            stdout(&o).contains("structure {{0,1,2}, {3}, {4}, {5}}"),
            "{a}: {}",
            stdout(&o)
        );
    }
}

#[test]
fn trace_is_written_for_anytime_algorithms() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("g.txt");
    let inst = inst.to_str().unwrap();
    assert!(
        csg(&["gen", "--model", "complete", "--n", "7", "--seed", "2", "--out", inst])
            .status
            .success()
    );
    let trace = dir.path().join("t.csv");
    let o = csg(&[
        "solve",
        inst,
        "--algorithm",
        "d-tsp",
        "--trace",
        trace.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&trace).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("elapsed_us,value"));
    let last: i64 = lines
        .last()
        .unwrap()
        .split(',')
        .nth(1)
        .unwrap()
        .parse()
        .unwrap();
    assert_eq!(last, value_of(&o));

    let dp = dir.path().join("dp.csv");
    assert!(csg(&[
        "solve",
        inst,
        "--algorithm",
        "dype",
        "--trace",
        dp.to_str().unwrap()
    ])
    .status
    .success());
    assert!(!dp.exists());
}

#[test]
fn verify_passes_small_matrix_and_catches_injected_fault() {
    let ok = csg(&["verify", "--n-max", "5", "--seeds", "5"]);
    assert_eq!(ok.status.code(), Some(0), "{}", stdout(&ok));

    let trivial = csg(&["verify", "--n-min", "1", "--n-max", "1", "--seeds", "3"]);
    assert_eq!(trivial.status.code(), Some(0));

    let bad = csg(&[
        "verify",
        "--n-max",
        "7",
        "--seeds",
        "10",
        "--game",
        "supersub",
        "--inject-fault",
        "tsp-bound-sign",
    ]);
    assert_eq!(bad.status.code(), Some(1));
    let out = stdout(&bad);
    assert!(out.contains("FAIL tsp/supersub"), "{out}");
    assert!(out.contains("reproduce: csg gen --model"), "{out}");
    assert!(!out.contains("FAIL dype"), "{out}");
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(csg(&["solve"]).status.code(), Some(2));
    assert_eq!(
        csg(&["solve", "x", "--algorithm", "nope"]).status.code(),
        Some(2)
    );
    assert_eq!(csg(&["verify", "--n-max", "40"]).status.code(), Some(2));
    let missing = dir.path().join("missing.txt");
    assert_eq!(
        csg(&["solve", missing.to_str().unwrap()]).status.code(),
        Some(3)
    );
    let broken = write(dir.path(), "bad.txt", "csg 1\nn 4\ne 0 5\n");
    let o = csg(&["solve", &broken]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));
}

#[test]
fn bench_writes_report_and_traces() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("p.txt");
    let inst = inst.to_str().unwrap();
    assert!(
        csg(&["gen", "--model", "path", "--n", "6", "--seed", "1", "--out", inst])
            .status
            .success()
    );
    let out = dir.path().join("out");
    let o = csg(&[
        "bench",
        inst,
        "--algorithms",
        "dype,dype-star,d-tsp",
        "--repetitions",
        "3",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let report = std::fs::read_to_string(out.join("report.csv")).unwrap();
    let rows: Vec<&str> = report.lines().skip(1).collect();
    assert_eq!(rows.len(), 9);
    let values: Vec<&str> = rows.iter().map(|r| r.split(',').nth(4).unwrap()).collect();
    assert!(values.iter().all(|v| *v == values[0]));
    assert_eq!(std::fs::read_dir(out.join("traces")).unwrap().count(), 6);
}
