use std::process::{Command, Output};

fn dilatation(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dilatation"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn prove_difference_of_sum() {
    let o = dilatation(&[
        "tree",
        "prove",
        "--lhs",
        "(b (o x u) (o x (b x (o (o x u) y))))",
        "--rhs",
        "y",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("Proved"));
}

#[test]
fn verify_heisenberg() {
    let o = dilatation(&["verify", "--instance", "heisenberg:n=1", "--samples", "500", "--seed", "7"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let out = stdout(&o);
    let mut rows = out.lines();
    let header: Vec<&str> = rows.next().unwrap().split(',').collect();
    let col = header.iter().position(|h| *h == "value_or_defect").expect("defect column");
    for row in rows.filter(|r| !r.split(',').nth(1).unwrap().ends_with("-gap")) {
        let d: f64 = row.split(',').nth(col).unwrap().parse().unwrap();
        assert!(d <= 1e-9, "{row}");
    }
}

#[test]
fn right_translation_diverges() {
    let o = dilatation(&["pansu", "--instance", "heisenberg:n=1", "--map", "right-translation:g=1,0,0"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("divergent"));
}

#[test]
fn unknown_instance_lists_registry() {
    let o = dilatation(&["verify", "--instance", "nope"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("heisenberg") && err.contains("chart-sine"), "{err}");
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(dilatation(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(dilatation(&["verify", "--samples", "0"]).status.code(), Some(2));
}

#[test]
fn out_flag_writes_file() {
    let dir = std::env::temp_dir().join(format!("dilatation-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("converge.csv");
    let args = ["converge", "--instance", "chart-sine:a=0.1", "--seed", "3"];
    let direct = dilatation(&args);
    let mut with_out = args.to_vec();
    let p = path.to_str().unwrap();
    with_out.extend(["--out", p]);
    let o = dilatation(&with_out);
    assert_eq!(o.status.code(), direct.status.code());
    assert_eq!(std::fs::read(&path).unwrap(), direct.stdout);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn repeated_runs_are_byte_identical() {
    let runs: [&[&str]; 3] = [
        &["verify", "--instance", "snowflake:alpha=0.5", "--seed", "11"],
        &["gh", "--instance", "heisenberg:n=1", "--seed", "5"],
        &["equiv", "--instance", "euclidean:n=1", "--other", "chart-sine:a=0.1", "--seed", "2"],
    ];
    for args in runs {
        let a = dilatation(args);
        let b = dilatation(args);
        assert_eq!(a.status.code(), b.status.code());
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}
