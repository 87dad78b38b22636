//! JSON, CSV and plot-data renderings of computed results. Exact integers
//! are written as decimal strings; `approx` fields are floating-point
//! approximations of the exact rationals beside them.

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::linsub::LinearSubspace;
use crate::stats::{
    to_f64, ConvergenceReport, LevelRow, LimitVector, ProbeReport, Rational,
};
use crate::tangency::TangencyReport;
use crate::variety::{DegreeReport, DensityReport, VarietySpec};

pub const HYPOTHESES_NOTE: &str =
    "geometric irreducibility of X and the declared dimension and degree are assumed, not verified";

pub fn rational_json(r: &Rational) -> Value {
    json!({
        "num": r.numer().to_string(),
        "den": r.denom().to_string(),
        "approx": to_f64(r),
    })
}

pub fn variety_json(spec: &VarietySpec) -> Value {
    json!({
        "p": spec.p,
        "e": spec.e,
        "n": spec.n,
        "m": spec.m,
        "d": spec.d,
        "forms": spec.forms,
        "unchecked_hypotheses": HYPOTHESES_NOTE,
    })
}

pub fn limit_json(limit: &LimitVector) -> Value {
    let mut m = Map::new();
    for (k, v) in limit.values().iter().enumerate() {
        m.insert(k.to_string(), rational_json(v));
    }
    Value::Object(m)
}

fn level_json(row: &LevelRow, d: u32) -> Value {
    let h = &row.histogram;
    let mut counts = Map::new();
    let mut p = Map::new();
    for k in h.report_range(d) {
        counts.insert(k.to_string(), Value::String(h.count(k).to_string()));
        p.insert(k.to_string(), rational_json(&h.probability(k)));
    }
    let mut out = Map::new();
    out.insert("N".into(), json!(row.level));
    out.insert("mode".into(), json!(row.mode.name()));
    out.insert("field_size".into(), json!(row.field_size.to_string()));
    out.insert("total".into(), json!(h.total.to_string()));
    out.insert("counts".into(), Value::Object(counts));
    out.insert("contained".into(), json!(h.contained.to_string()));
    out.insert("subspace_points".into(), json!(h.subspace_points.to_string()));
    out.insert("p".into(), Value::Object(p));
    if let Some(se) = &row.std_errors {
        let se: Map<String, Value> = se.iter().map(|(k, v)| (k.to_string(), json!(v))).collect();
        out.insert("stderr".into(), Value::Object(se));
    }
    out.insert("deviation".into(), json!(to_f64(&row.deviation)));
    out.insert("deviation_exact".into(), rational_json(&row.deviation));
    Value::Object(out)
}

pub fn convergence_json(report: &ConvergenceReport) -> Value {
    let levels: Vec<Value> = report.rows.iter().map(|r| level_json(r, report.spec.d)).collect();
    let mut out = json!({
        "variety": variety_json(&report.spec),
        "levels": levels,
        "limit": limit_json(&report.limit),
    });
    if report.rows.iter().any(|r| r.std_errors.is_some()) {
        out["seed"] = json!(report.seed);
    }
    out
}

pub fn degree_json(report: &DegreeReport) -> Value {
    serde_json::to_value(report).expect("plain data")
}

fn csv_string<F>(header: &[&str], fill: F) -> Result<String>
where
    F: FnOnce(&mut csv::Writer<Vec<u8>>) -> csv::Result<()>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    let run = |w: &mut csv::Writer<Vec<u8>>| -> csv::Result<()> {
        w.write_record(header)?;
        fill(w)
    };
    run(&mut w).map_err(|e| Error::Internal(format!("csv rendering failed: {e}")))?;
    let bytes = w
        .into_inner()
        .map_err(|e| Error::Internal(format!("csv rendering failed: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Error::Internal(e.to_string()))
}

/// One row per level and count.
pub fn convergence_csv(report: &ConvergenceReport) -> Result<String> {
    let header = [
        "N", "mode", "field_size", "total", "contained", "k", "count", "num", "den", "approx",
        "limit_num", "limit_den", "limit_approx", "stderr", "deviation",
    ];
    csv_string(&header, |w| {
        for row in &report.rows {
            let h = &row.histogram;
            for k in h.report_range(report.spec.d) {
                let p = h.probability(k);
                let lim = report.limit.get(k);
                let se = row
                    .std_errors
                    .as_ref()
                    .and_then(|s| s.get(&k))
                    .map(|v| v.to_string())
                    .unwrap_or_default();
                w.write_record([
                    row.level.to_string(),
                    row.mode.name().to_string(),
                    row.field_size.to_string(),
                    h.total.to_string(),
                    h.contained.to_string(),
                    k.to_string(),
                    h.count(k).to_string(),
                    p.numer().to_string(),
                    p.denom().to_string(),
                    to_f64(&p).to_string(),
                    lim.numer().to_string(),
                    lim.denom().to_string(),
                    to_f64(&lim).to_string(),
                    se,
                    to_f64(&row.deviation).to_string(),
                ])?;
            }
        }
        Ok(())
    })
}

/// Two whitespace-separated columns, `q^N` and the deviation.
pub fn plot_data(report: &ConvergenceReport) -> String {
    let mut out = String::from("# q^N deviation\n");
    for row in &report.rows {
        out.push_str(&format!("{} {}\n", row.field_size, to_f64(&row.deviation)));
    }
    out
}

pub fn formula_json(d: u32, e: u32, values: &[Rational]) -> Value {
    let mut p = Map::new();
    for (k, v) in values.iter().enumerate() {
        p.insert(k.to_string(), rational_json(v));
    }
    let sum: Rational = values.iter().cloned().sum();
    let mean: Rational = values
        .iter()
        .enumerate()
        .map(|(k, v)| v * Rational::from_integer(k.into()))
        .sum();
    json!({ "d": d, "e": e, "p": p, "sum": rational_json(&sum), "mean": rational_json(&mean) })
}

pub fn formula_csv(d: u32, e: u32, values: &[Rational]) -> Result<String> {
    csv_string(&["d", "e", "k", "num", "den", "approx"], |w| {
        for (k, v) in values.iter().enumerate() {
            w.write_record([
                d.to_string(),
                e.to_string(),
                k.to_string(),
                v.numer().to_string(),
                v.denom().to_string(),
                to_f64(v).to_string(),
            ])?;
        }
        Ok(())
    })
}

fn subspace_json(v: &LinearSubspace, field: &crate::gf::Field) -> Value {
    json!(v.row_strings(field))
}

pub fn tangency_json(spec: &VarietySpec, report: &TangencyReport) -> Value {
    let mut t = Map::new();
    t.insert("found".into(), json!(report.found));
    t.insert("degree".into(), json!(report.degree));
    t.insert("pattern".into(), json!(report.pattern()));
    if let Some(w) = &report.witness {
        t.insert(
            "witness".into(),
            json!({
                "field": { "p": w.field.characteristic(), "k": w.field.degree() },
                "line": subspace_json(&w.line, &w.field),
                "point": w.point.display(&w.field).to_string(),
            }),
        );
    }
    if let Some(s) = &report.slice {
        if let Ok(base) = spec.base_field() {
            t.insert("slice".into(), subspace_json(s, &base));
        }
    }
    if let (Some(l), Some(w)) = (&report.ambient_line, &report.witness) {
        t.insert("ambient_line".into(), subspace_json(l, &w.field));
    }
    t.insert("levels_searched".into(), json!(report.levels_searched));
    t.insert("slices_tried".into(), json!(report.slices_tried));
    t.insert("degenerate".into(), json!(report.degenerate));
    t.insert("notes".into(), json!(report.notes));
    json!({ "variety": variety_json(spec), "simple_tangency": Value::Object(t) })
}

pub fn tangency_csv(report: &TangencyReport) -> Result<String> {
    let witness = report.witness.as_ref();
    let rows: Vec<(&str, String)> = vec![
        ("found", report.found.to_string()),
        ("degree", report.degree.to_string()),
        (
            "pattern",
            report
                .pattern()
                .iter()
                .map(|m| m.to_string())
                .collect::<Vec<_>>()
                .join(" "),
        ),
        (
            "line",
            witness
                .map(|w| w.line.row_strings(&w.field).join(" "))
                .unwrap_or_default(),
        ),
        (
            "point",
            witness
                .map(|w| w.point.display(&w.field).to_string())
                .unwrap_or_default(),
        ),
        (
            "levels_searched",
            report
                .levels_searched
                .iter()
                .map(|l| l.to_string())
                .collect::<Vec<_>>()
                .join(" "),
        ),
        ("slices_tried", report.slices_tried.to_string()),
        ("degenerate", report.degenerate.to_string()),
        ("notes", report.notes.join("; ")),
    ];
    csv_string(&["key", "value"], |w| {
        for (k, v) in rows {
            w.write_record([k, v.as_str()])?;
        }
        Ok(())
    })
}

pub fn density_json(spec: &VarietySpec, r: &DensityReport) -> Value {
    json!({
        "variety": variety_json(spec),
        "mu": {
            "N": r.level,
            "irreducible": r.irreducible.to_string(),
            "total": r.total.to_string(),
            "value": rational_json(&r.mu),
        },
    })
}

pub fn density_csv(r: &DensityReport) -> Result<String> {
    csv_string(&["N", "irreducible", "total", "num", "den", "approx"], |w| {
        w.write_record([
            r.level.to_string(),
            r.irreducible.to_string(),
            r.total.to_string(),
            r.mu.numer().to_string(),
            r.mu.denom().to_string(),
            to_f64(&r.mu).to_string(),
        ])
    })
}

pub fn probe_json(spec: &VarietySpec, r: &ProbeReport) -> Value {
    let h = &r.histogram;
    let range = h.report_range(r.prediction.degree());
    let mut counts = Map::new();
    let mut freq = Map::new();
    let mut se = Map::new();
    let mut pred = Map::new();
    for k in range {
        counts.insert(k.to_string(), json!(h.count(k).to_string()));
        freq.insert(k.to_string(), rational_json(&h.probability(k)));
        se.insert(k.to_string(), json!(r.std_errors.get(&k).copied().unwrap_or(0.0)));
        pred.insert(k.to_string(), rational_json(&r.prediction.get(k)));
    }
    json!({
        "variety": variety_json(spec),
        "probe": {
            "N": r.level,
            "e": 2,
            "samples": r.samples.to_string(),
            "seed": r.seed,
            "rejected": r.rejected.to_string(),
            "counts": counts,
            "contained": h.contained.to_string(),
            "frequency": freq,
            "stderr": se,
            "prediction": pred,
            "deviation": r.deviation(),
        },
    })
}

pub fn probe_csv(r: &ProbeReport) -> Result<String> {
    let h = &r.histogram;
    csv_string(
        &["N", "k", "count", "num", "den", "approx", "stderr", "pred_num", "pred_den", "pred_approx"],
        |w| {
            for k in h.report_range(r.prediction.degree()) {
                let f = h.probability(k);
                let p = r.prediction.get(k);
                w.write_record([
                    r.level.to_string(),
                    k.to_string(),
                    h.count(k).to_string(),
                    f.numer().to_string(),
                    f.denom().to_string(),
                    to_f64(&f).to_string(),
                    r.std_errors.get(&k).copied().unwrap_or(0.0).to_string(),
                    p.numer().to_string(),
                    p.denom().to_string(),
                    to_f64(&p).to_string(),
                ])?;
            }
            Ok(())
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::budget::Budget;
    use crate::stats::{convergence_report, LevelMode};

    #[test]
    fn json_and_csv_carry_the_same_values() {
        let spec = VarietySpec::parse("p=3\ne=1\nn=2\nm=1\nd=2\npoly=\"x0*x2 - x1^2\"").unwrap();
        let r = convergence_report(&spec, &[(1, LevelMode::Exact)], 0, &Budget::default()).unwrap();
        let j = convergence_json(&r);
        let level = &j["levels"][0];
        assert_eq!(level["total"], "13");
        assert_eq!(level["counts"]["1"], "4");
        assert_eq!(level["p"]["1"]["num"], "4");
        assert_eq!(level["p"]["1"]["den"], "13");
        assert_eq!(j["limit"]["2"]["den"], "2");
        let csv = convergence_csv(&r).unwrap();
        let row: Vec<&str> = csv.lines().nth(2).unwrap().split(',').collect();
        assert_eq!(&row[5..9], &["1", "4", "4", "13"]);
        assert!(plot_data(&r).contains("3 0.307"));
    }
}
