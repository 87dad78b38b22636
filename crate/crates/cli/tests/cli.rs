use std::path::{Path, PathBuf};

use fqslice_cli::run;

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn conic_spec(dir: &Path) -> PathBuf {
    write(dir, "conic.var", "# conic\np=3\ne=1\nn=2\nm=1\nd=2\npoly=\"x0*x2 - x1^2\"\n")
}

fn cli(args: &[&str]) -> i32 {
    run(std::iter::once("fqslice").chain(args.iter().copied()))
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn formula_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("f.json");
    assert_eq!(cli(&["formula", "--d", "3", "--out", out.to_str().unwrap()]), 0);
    let j = json(&out);
    assert_eq!(j["p"]["0"]["num"], "1");
    assert_eq!(j["p"]["0"]["den"], "3");
    assert_eq!(j["p"]["2"]["num"], "0");
    assert_eq!(j["p"]["3"]["den"], "6");
    assert_eq!(j["sum"]["num"], "1");
    let out = dir.path().join("g.json");
    assert_eq!(cli(&["formula", "--d", "2", "--e", "2", "--out", out.to_str().unwrap()]), 0);
    assert_eq!(json(&out)["p"]["4"]["den"], "24");
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(cli(&["exact", "--spec", "missing.var", "--N", "1"]), 2);
    assert_eq!(cli(&["exact", "--N", "1"]), 2);
    assert_eq!(cli(&["formula", "--d", "0"]), 2);
    let spec = conic_spec(dir.path());
    let s = spec.to_str().unwrap();
    assert_eq!(cli(&["exact", "--spec", s, "--N", "1", "--max-subspaces", "5"]), 3);
    assert_eq!(cli(&["exact", "--spec", s, "--N", "20"]), 3);
    assert_eq!(cli(&["mc", "--spec", s, "--N", "1", "--samples", "0"]), 2);
    let bad = write(dir.path(), "bad.var", "p=3\ne=1\nn=2\nm=1\nd=2\npoly=\"x0 + x1^2\"\n");
    assert_eq!(cli(&["exact", "--spec", bad.to_str().unwrap(), "--N", "1"]), 2);
    let quartic = write(dir.path(), "q.var", "p=3\ne=1\nn=3\nm=2\nd=4\npoly=\"x0^4 + x1^4 + x2^4 + x3^4\"\n");
    assert_eq!(cli(&["mu", "--spec", quartic.to_str().unwrap(), "--N", "1"]), 2);
}

#[test]
fn exact_json_and_csv_agree() {
    let dir = tempfile::tempdir().unwrap();
    let spec = conic_spec(dir.path());
    let s = spec.to_str().unwrap();
    let j_out = dir.path().join("e.json");
    let c_out = dir.path().join("e.csv");
    assert_eq!(cli(&["exact", "--spec", s, "--N", "1", "--out", j_out.to_str().unwrap()]), 0);
    assert_eq!(
        cli(&["exact", "--spec", s, "--N", "1", "--format", "csv", "--out", c_out.to_str().unwrap()]),
        0
    );
    let j = json(&j_out);
    let level = &j["levels"][0];
    assert_eq!(level["mode"], "exact");
    assert_eq!(level["total"], "13");
    let csv = std::fs::read_to_string(&c_out).unwrap();
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = |name: &str| header.iter().position(|h| *h == name).unwrap();
    for line in lines {
        let f: Vec<&str> = line.split(',').collect();
        let k = f[col("k")];
        assert_eq!(level["counts"][k], f[col("count")]);
        assert_eq!(level["p"][k]["num"], f[col("num")]);
        assert_eq!(level["p"][k]["den"], f[col("den")]);
    }
}

#[test]
fn converge_writes_plot_data() {
    let dir = tempfile::tempdir().unwrap();
    let spec = conic_spec(dir.path());
    let out = dir.path().join("c.json");
    let code = cli(&[
        "converge", "--spec", spec.to_str().unwrap(), "--N-list", "1,2,3",
        "--mc-above", "2", "--samples", "2000", "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let j = json(&out);
    let levels = j["levels"].as_array().unwrap();
    assert_eq!(levels.len(), 3);
    assert_eq!(levels[0]["mode"], "exact");
    assert_eq!(levels[2]["mode"], "mc");
    assert_eq!(levels[2]["total"], "2000");
    assert_eq!(j["limit"]["0"]["den"], "2");
    let plot = std::fs::read_to_string(dir.path().join("c.json.plot")).unwrap();
    let rows: Vec<&str> = plot.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows.len(), 3);
    assert!(rows[0].starts_with("3 0.3076"));
}

#[test]
fn output_independent_of_threads() {
    let dir = tempfile::tempdir().unwrap();
    let spec = conic_spec(dir.path());
    let s = spec.to_str().unwrap();
    let mut outputs = Vec::new();
    for (i, t) in ["1", "3", "8"].iter().enumerate() {
        let out = dir.path().join(format!("{i}.json"));
        let code = cli(&[
            "converge", "--spec", s, "--N-list", "1,2", "--mc-above", "1", "--samples", "3000",
            "--threads", t, "--out", out.to_str().unwrap(),
        ]);
        assert_eq!(code, 0);
        outputs.push(std::fs::read(out).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[0], outputs[2]);
}

#[test]
fn tangency_mu_and_probe() {
    let dir = tempfile::tempdir().unwrap();
    let conic = conic_spec(dir.path());
    let out = dir.path().join("t.json");
    assert_eq!(cli(&["tangency", "--spec", conic.to_str().unwrap(), "--out", out.to_str().unwrap()]), 0);
    let t = json(&out);
    assert_eq!(t["simple_tangency"]["found"], true);
    assert_eq!(t["simple_tangency"]["pattern"], serde_json::json!([2]));

    let quadric = write(dir.path(), "quadric.var", "p=3\ne=1\nn=3\nm=2\nd=2\npoly=\"x0*x3 - x1*x2\"\n");
    let q = quadric.to_str().unwrap();
    assert_eq!(cli(&["tangency", "--spec", q, "--trials", "5", "--out", out.to_str().unwrap()]), 0);
    let t = json(&out);
    assert_eq!(t["simple_tangency"]["found"], true);
    assert!(t["simple_tangency"]["slice"].is_array());

    let out = dir.path().join("mu.json");
    assert_eq!(cli(&["mu", "--spec", q, "--N", "1", "--out", out.to_str().unwrap()]), 0);
    let m = json(&out);
    assert_eq!(m["mu"]["value"]["num"], "3");
    assert_eq!(m["mu"]["value"]["den"], "5");

    let line = write(dir.path(), "line.var", "p=3\ne=1\nn=2\nm=1\nd=1\npoly=\"x0\"\n");
    let out = dir.path().join("probe.json");
    let code = cli(&[
        "probe-conjecture", "--spec", line.to_str().unwrap(), "--N", "1", "--samples", "300",
        "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let p = json(&out);
    assert_eq!(p["probe"]["samples"], "300");
    assert_eq!(p["probe"]["prediction"]["1"]["num"], "0");
    assert_eq!(
        cli(&["probe-conjecture", "--spec", line.to_str().unwrap(), "--N", "1", "--samples", "3", "--e", "3"]),
        2
    );
}
