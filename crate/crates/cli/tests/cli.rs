use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn wnlab(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wnlab"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, text: &str) -> String {
    let p = dir.join("run.ini");
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn list_shows_registry() {
    let tmp = tempfile::tempdir().unwrap();
    let out = wnlab(&["list"], tmp.path());
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().count() >= 14);
    for name in [
        "buckley",
        "rdf-properties",
        "orlicz-integral",
        "calderon-basis",
    ] {
        assert!(text.contains(name), "{name} missing");
    }

    let out = wnlab(&["list", "--csv"], tmp.path());
    assert!(out.status.success());
    let mut rd = csv::Reader::from_reader(out.stdout.as_slice());
    assert_eq!(rd.headers().unwrap(), vec!["name", "description", "anchor"]);
    let rows: Vec<_> = rd.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 14);
    assert!(rows.iter().all(|r| !r[2].is_empty()));
}

#[test]
fn unknown_experiment_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "[no-such-experiment]\n");
    let out = wnlab(&["run", &cfg], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert_eq!(err.lines().count(), 1);
    assert!(err.contains("no-such-experiment"));
}

#[test]
fn bad_field_exits_2_naming_it() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "[buckley]\ntol_alpha = -1\n");
    let out = wnlab(&["run", &cfg], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr)
        .unwrap()
        .contains("buckley.tol_alpha"));

    let cfg = write_config(tmp.path(), "[buckley]\n");
    let out = wnlab(&["run", &cfg, "--preset", "huge"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("preset"));
}

#[test]
fn threads_variable_is_validated() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "[buckley]\n");
    let out = Command::new(env!("CARGO_BIN_EXE_wnlab"))
        .args(["run", &cfg])
        .env("WNLAB_THREADS", "zero")
        .current_dir(tmp.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr)
        .unwrap()
        .contains("WNLAB_THREADS"));
}

#[test]
fn outputs_have_expected_headers() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "preset = smoke\n[buckley]\n[cf-chain]\n");
    let out = wnlab(&["run", &cfg, "--out", "res"], tmp.path());
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    let res = tmp.path().join("res");
    let header = |f: &str| {
        fs::read_to_string(res.join(f))
            .unwrap()
            .lines()
            .next()
            .unwrap()
            .to_string()
    };
    assert_eq!(
        header("samples.csv"),
        "experiment,operator,p,norm_estimate,grid_R,saturated"
    );
    assert_eq!(header("fits.csv"), "operator,kind,exponent,stderr,r2");
    assert_eq!(
        header("bounds.csv"),
        "operator,alpha,gamma,p0,beta_min,reference,verdict"
    );

    let mut rd = csv::Reader::from_path(res.join("fits.csv")).unwrap();
    let alpha = rd
        .records()
        .map(|r| r.unwrap())
        .find(|r| &r[0] == "M" && &r[1] == "alpha")
        .unwrap();
    let value: f64 = alpha[2].parse().unwrap();
    assert!((value - 1.0).abs() < 0.15);
    // 12 significant digits
    assert_eq!(
        alpha[2]
            .split('e')
            .next()
            .unwrap()
            .trim_start_matches('-')
            .len(),
        13
    );

    let plots: Vec<_> = fs::read_dir(res.join("plotdata"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    assert!(!plots.is_empty());
    for p in plots {
        let mut rd = csv::Reader::from_path(&p).unwrap();
        assert_eq!(rd.headers().unwrap(), vec!["x", "y"]);
        for r in rd.records() {
            let r = r.unwrap();
            assert!(
                r.iter().all(|v| v.parse::<f64>().is_ok_and(f64::is_finite)),
                "{p:?}"
            );
        }
    }
}

#[test]
fn same_seed_same_bytes() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "preset = smoke\n[rdf-properties]\nsamples = 5\n[hilbert-endpoint]\n",
    );
    for (dir, threads) in [("a", "1"), ("b", "3")] {
        let out = Command::new(env!("CARGO_BIN_EXE_wnlab"))
            .args(["run", &cfg, "--seed", "11", "--out", dir])
            .env("WNLAB_THREADS", threads)
            .current_dir(tmp.path())
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0));
    }
    for f in [
        "samples.csv",
        "fits.csv",
        "bounds.csv",
        "checks.csv",
        "summary.txt",
    ] {
        let a = fs::read(tmp.path().join("a").join(f)).unwrap();
        let b = fs::read(tmp.path().join("b").join(f)).unwrap();
        assert_eq!(a, b, "{f} differs");
    }
}
