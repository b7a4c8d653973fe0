use std::process::{Command, Output};

fn trigl1(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_trigl1")).args(args).env_remove("TRIGL1_GRID").output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn value_line(o: &Output) -> f64 {
    stdout(o)
        .lines()
        .find_map(|l| l.strip_prefix("value"))
        .expect("value line")
        .trim()
        .parse()
        .expect("numeric value")
}

#[test]
fn en_chi_lattice_point_is_closed_form() {
    let o = trigl1(&["en-chi", "--n", "8", "--h", "3/16"]);
    assert!(o.status.success());
    assert!((value_line(&o) - 1.0 / 3.0).abs() < 1e-12);
    assert!(stdout(&o).contains("closed_form"));
}

#[test]
fn en_chi_interior_point_uses_breakpoint_solution() {
    let o = trigl1(&["en-chi", "--n", "8", "--h", "1/8"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("theoremB"));
    assert!((value_line(&o) - 0.379073165372).abs() < 1e-9);
}

#[test]
fn en_chi_oracle_power() {
    let o = trigl1(&["en-chi", "--n", "4", "--h", "1/8", "--j", "2", "--oracle", "--grid", "4096"]);
    assert!(o.status.success());
    assert!((value_line(&o) - 0.5).abs() < 2e-3);
}

#[test]
fn en_chi_json_mirror() {
    let o = trigl1(&["en-chi", "--n", "8", "--h", "0.1875", "--json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["method"], "closed_form");
    assert!((v["value"].as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-12);
}

#[test]
fn bad_arguments_exit_2() {
    assert_eq!(trigl1(&["en-chi", "--n", "1", "--h", "0.2"]).status.code(), Some(2));
    assert_eq!(trigl1(&["en-chi", "--n", "4", "--h", "1/0"]).status.code(), Some(2));
    assert_eq!(trigl1(&["en-chi", "--n", "4", "--h", "-0.5"]).status.code(), Some(2));
    assert_eq!(trigl1(&["verify", "everything"]).status.code(), Some(2));
    assert_eq!(trigl1(&["sweep", "--n", "8", "--h-min", "0.5", "--h-max", "0.2", "--steps", "5", "--out", "x.csv"]).status.code(), Some(2));
}

#[test]
fn sweep_writes_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("psi8.csv");
    let o = trigl1(&["sweep", "--n", "8", "--h-min", "0.01", "--h-max", "1", "--steps", "200", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("h,E,hE,method"));
    let rows: Vec<Vec<String>> = lines.map(|l| l.split(',').map(str::to_owned).collect()).collect();
    assert_eq!(rows.len(), 200);
    let mut prev = 0.0;
    for r in &rows {
        let (h, e, he): (f64, f64, f64) = (r[0].parse().unwrap(), r[1].parse().unwrap(), r[2].parse().unwrap());
        assert!(h > prev);
        prev = h;
        assert!((he - h * e).abs() <= 1e-14);
        if h <= 1.0 / 16.0 {
            assert!((e - 1.0).abs() < 1e-12, "flat region at h = {h}: {e}");
        }
        assert!(e <= (1.0f64).min(1.0 / (16.0 * h)) + 1e-9);
    }
    let last = rows.last().unwrap();
    assert_eq!(last[0].parse::<f64>().unwrap(), 1.0);
    assert_eq!(last[2].parse::<f64>().unwrap(), 0.0);

    // bit-stable
    let again = dir.path().join("again.csv");
    let o = trigl1(&["sweep", "--n", "8", "--h-min", "0.01", "--h-max", "1", "--steps", "200", "--out", again.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(text, std::fs::read_to_string(&again).unwrap());
}

#[test]
fn sweep_lattice_rows_match() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("lattice.csv");
    // step 1/16 puts every (2j-1)/16 on the grid
    let o = trigl1(&["sweep", "--n", "8", "--h-min", "0.0625", "--h-max", "1", "--steps", "16", "--out", out.to_str().unwrap(), "--json"]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    for l in text.lines().skip(1) {
        let f: Vec<f64> = l.split(',').take(2).map(|s| s.parse().unwrap()).collect();
        let j2 = (f[0] * 16.0).round() as i64;
        if j2 % 2 == 1 && j2 >= 3 {
            assert!((f[1] - 1.0 / (16.0 * f[0])).abs() < 1e-6, "{l}");
        }
    }
    assert!(out.with_extension("json").exists());
}

#[test]
fn sweep_unwritable_path_exits_4() {
    let o = trigl1(&["sweep", "--n", "4", "--h-min", "0.1", "--h-max", "0.9", "--steps", "3", "--out", "/nonexistent-dir/x.csv"]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn constants_report() {
    let o = trigl1(&["constants"]);
    assert!(o.status.success());
    let s = stdout(&o);
    let get = |key: &str| -> f64 {
        s.lines().find(|l| l.starts_with(key)).unwrap()[key.len()..].split_whitespace().next().unwrap().parse().unwrap()
    };
    assert!((get("1-2v0") - 0.3817350529).abs() < 1e-9);
    assert!((get("sum_0^60 F_j") - 3.408223443).abs() < 1e-9);
    assert!((get("F_4 ") - 5.0 / 24.0).abs() < 1e-12);
}

#[test]
fn verify_suite_exit_code() {
    let o = trigl1(&["verify", "favard", "--grid", "4096"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert_eq!(stdout(&o).matches("[PASS]").count(), 3);
}
