//! CSV and text outputs of a run.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use wnlab::experiments::{ExperimentInfo, Report};

/// Numbers carry 12 significant digits; non-finite values are left blank.
pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.11e}")
    } else {
        String::new()
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

/// Keep `[A-Za-z0-9._-]`, replace everything else with `_`.
pub fn file_stem(name: &str) -> String {
    name.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || matches!(c, '.' | '_' | '-') {
                c
            } else {
                '_'
            }
        })
        .collect()
}

pub fn write_registry(w: impl Write, registry: &[ExperimentInfo]) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["name", "description", "anchor"])?;
    for e in registry {
        out.write_record([e.name, e.description, e.anchor])?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_all(dir: &Path, reports: &[Report]) -> io::Result<()> {
    fs::create_dir_all(dir.join("plotdata"))?;

    let mut samples = csv::Writer::from_path(dir.join("samples.csv"))?;
    samples.write_record([
        "experiment",
        "operator",
        "p",
        "norm_estimate",
        "grid_R",
        "saturated",
    ])?;
    let mut fits = csv::Writer::from_path(dir.join("fits.csv"))?;
    fits.write_record(["operator", "kind", "exponent", "stderr", "r2"])?;
    let mut bounds = csv::Writer::from_path(dir.join("bounds.csv"))?;
    bounds.write_record([
        "operator",
        "alpha",
        "gamma",
        "p0",
        "beta_min",
        "reference",
        "verdict",
    ])?;
    let mut checks = csv::Writer::from_path(dir.join("checks.csv"))?;
    checks.write_record(["experiment", "check", "value", "requirement", "passed"])?;

    for r in reports {
        for s in &r.samples {
            samples.write_record([
                r.experiment.clone(),
                s.operator.clone(),
                num(s.p),
                num(s.norm),
                num(s.extent),
                s.saturated.to_string(),
            ])?;
        }
        for f in &r.fits {
            let e = &f.estimate;
            fits.write_record([
                f.operator.clone(),
                e.kind.to_string(),
                num(e.exponent),
                num(e.stderr),
                num(e.r2),
            ])?;
        }
        for b in &r.bounds {
            bounds.write_record([
                b.operator.clone(),
                opt(b.alpha),
                opt(b.gamma),
                num(b.p0),
                opt(b.beta_min),
                b.reference.clone(),
                b.verdict.to_string(),
            ])?;
        }
        for c in &r.checks {
            checks.write_record([
                r.experiment.clone(),
                c.name.clone(),
                num(c.value),
                c.requirement.clone(),
                c.passed.to_string(),
            ])?;
        }
        for p in &r.plots {
            let path = dir.join("plotdata").join(format!(
                "{}__{}.csv",
                file_stem(&r.experiment),
                file_stem(&p.name)
            ));
            let mut w = csv::Writer::from_path(path)?;
            w.write_record(["x", "y"])?;
            for &(x, y) in p
                .points
                .iter()
                .filter(|(x, y)| x.is_finite() && y.is_finite())
            {
                w.write_record([num(x), num(y)])?;
            }
            w.flush()?;
        }
    }
    samples.flush()?;
    fits.flush()?;
    bounds.flush()?;
    checks.flush()?;
    fs::write(dir.join("summary.txt"), summary(reports))
}

/// One line per check plus notes; no timings, so reruns compare equal.
pub fn summary(reports: &[Report]) -> String {
    let mut s = String::new();
    for r in reports {
        let passed = r.checks.iter().filter(|c| c.passed).count();
        s += &format!(
            "[{}] {passed}/{} checks passed\n",
            r.experiment,
            r.checks.len()
        );
        for c in &r.checks {
            let tag = if c.passed { "PASS" } else { "FAIL" };
            s += &format!(
                "  {tag} {}: {} (want {})\n",
                c.name,
                num(c.value),
                c.requirement
            );
        }
        for n in &r.notes {
            s += &format!("  note: {n}\n");
        }
    }
    s
}
