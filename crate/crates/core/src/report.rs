//! Text artifacts of a run: SHAP matrix, importance table, dependence data
//! and scatter plots, interaction triples and training history.
//!
//! Everything renders to `String` so output is byte-for-byte reproducible;
//! writing files is left to the caller.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::gbdt::{Ensemble, IterationRecord};
use crate::metrics::EvalReport;
use crate::records::{FeatureSchema, FeatureVector};
use crate::shap::{
    dependence_series, explain_interactions, explain_rows, importance_table,
    interaction_dependence, DependenceSeries, InteractionSeries, ShapVector,
};

/// Largest tolerated `|base + sum(phi) - margin|` before a bundle is refused.
pub const LOCAL_ACCURACY_TOL: f64 = 1e-6;

/// One `<feature>_shap` column per feature, then `base_value`.
pub fn shap_matrix_csv(schema: &FeatureSchema, rows: &[ShapVector]) -> String {
    let mut out = String::new();
    for name in schema.names() {
        let _ = write!(out, "{name}_shap,");
    }
    out.push_str("base_value\n");
    for row in rows {
        for v in &row.phi {
            let _ = write!(out, "{v},");
        }
        let _ = writeln!(out, "{}", row.base_value);
    }
    out
}

pub fn dependence_csv(series: &DependenceSeries) -> String {
    let mut out = String::from("value,shap\n");
    for (x, p) in &series.points {
        let _ = writeln!(out, "{x},{p}");
    }
    out
}

pub fn interaction_csv(series: &InteractionSeries) -> String {
    let mut out = format!("{},{},shap_interaction\n", series.feature_i, series.feature_j);
    for (a, b, v) in &series.points {
        let _ = writeln!(out, "{a},{b},{v}");
    }
    out
}

pub fn history_csv(history: &[IterationRecord]) -> String {
    let mut out = String::from("iteration,valid_logloss,train_logloss\n");
    for r in history {
        let valid = r.valid_logloss.map_or_else(String::new, |v| v.to_string());
        let _ = writeln!(out, "{},{valid},{}", r.iteration, r.train_logloss);
    }
    out
}

/// Scatter of attribution against raw value, with a dashed zero line.
/// Points above zero (toward dropout) are red, the rest blue.
pub fn dependence_svg(series: &DependenceSeries) -> String {
    const W: f64 = 480.0;
    const H: f64 = 320.0;
    const PAD: f64 = 48.0;
    let (mut x_lo, mut x_hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut y_lo, mut y_hi) = (0.0f64, 0.0f64);
    for &(x, y) in &series.points {
        x_lo = x_lo.min(x);
        x_hi = x_hi.max(x);
        y_lo = y_lo.min(y);
        y_hi = y_hi.max(y);
    }
    if !x_lo.is_finite() {
        (x_lo, x_hi) = (0.0, 1.0);
    }
    if x_hi == x_lo {
        x_hi = x_lo + 1.0;
    }
    if y_hi == y_lo {
        y_hi = y_lo + 1.0;
    }
    let sx = |x: f64| PAD + (x - x_lo) / (x_hi - x_lo) * (W - 2.0 * PAD);
    let sy = |y: f64| H - PAD - (y - y_lo) / (y_hi - y_lo) * (H - 2.0 * PAD);

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    );
    let _ = writeln!(out, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{}" y="20" text-anchor="middle" font-family="sans-serif" font-size="14">{}</text>"#,
        W / 2.0,
        series.feature
    );
    let _ = writeln!(
        out,
        r#"<line x1="{PAD}" y1="{b}" x2="{r}" y2="{b}" stroke="black"/>"#,
        b = H - PAD,
        r = W - PAD
    );
    let _ = writeln!(
        out,
        r#"<line x1="{PAD}" y1="{PAD}" x2="{PAD}" y2="{b}" stroke="black"/>"#,
        b = H - PAD
    );
    let _ = writeln!(
        out,
        r##"<line x1="{PAD}" y1="{z:.2}" x2="{r}" y2="{z:.2}" stroke="#888" stroke-dasharray="4 3"/>"##,
        z = sy(0.0),
        r = W - PAD
    );
    for (x, label) in [(x_lo, x_lo), (x_hi, x_hi)] {
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="10">{label}</text>"#,
            sx(x),
            H - PAD + 14.0
        );
    }
    for y in [y_lo, y_hi] {
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{:.2}" text-anchor="end" font-family="sans-serif" font-size="10">{y:.3}</text>"#,
            PAD - 4.0,
            sy(y) + 3.0
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="11">{} value</text>"#,
        W / 2.0,
        H - 10.0,
        series.feature
    );
    let _ = writeln!(
        out,
        r#"<text x="14" y="{}" text-anchor="middle" font-family="sans-serif" font-size="11" transform="rotate(-90 14 {})">SHAP value (log-odds)</text>"#,
        H / 2.0,
        H / 2.0
    );
    for &(x, y) in &series.points {
        let color = if y > 0.0 { "#d62728" } else { "#1f77b4" };
        let _ = writeln!(
            out,
            r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{color}" fill-opacity="0.6"/>"#,
            sx(x),
            sy(y)
        );
    }
    out.push_str("</svg>\n");
    out
}

/// A rendered file, addressed relative to the output directory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportFile {
    pub path: String,
    pub contents: String,
}

impl ReportFile {
    fn new(path: impl Into<String>, contents: String) -> Self {
        Self {
            path: path.into(),
            contents,
        }
    }
}

/// Largest local-accuracy gap over `rows`.
pub fn local_accuracy_gap(model: &Ensemble, rows: &[FeatureVector], shap: &[ShapVector]) -> Result<f64> {
    let mut worst = 0.0f64;
    for (r, s) in rows.iter().zip(shap) {
        worst = worst.max((s.output() - model.predict_margin(&r.values)?).abs());
    }
    Ok(worst)
}

/// The explanation bundle for `rows`: SHAP matrix, importance table (CSV and
/// text), a dependence CSV and SVG per feature, and one interaction CSV per
/// requested pair.
///
/// Refuses to render when local accuracy fails by more than
/// [`LOCAL_ACCURACY_TOL`].
pub fn explain_bundle(
    model: &Ensemble,
    rows: &[FeatureVector],
    pairs: &[(String, String)],
) -> Result<Vec<ReportFile>> {
    let schema = model.schema();
    // Resolve names before doing any work.
    for (a, b) in pairs {
        for name in [a, b] {
            if schema.index_of(name).is_none() {
                return Err(Error::UnknownFeature(name.clone()));
            }
        }
        if a == b {
            return Err(Error::Config(format!("interaction pair repeats {a}")));
        }
    }
    let shap = explain_rows(model, rows)?;
    let gap = local_accuracy_gap(model, rows, &shap)?;
    if gap > LOCAL_ACCURACY_TOL {
        return Err(Error::Invariant(format!(
            "local accuracy gap {gap:e} exceeds {LOCAL_ACCURACY_TOL:e}"
        )));
    }
    let mut files = vec![ReportFile::new("shap_values.csv", shap_matrix_csv(schema, &shap))];
    if !rows.is_empty() {
        let table = importance_table(schema, &shap)?;
        files.push(ReportFile::new("importance.csv", table.render_csv()));
        files.push(ReportFile::new("importance.txt", table.render_text()));
    }
    for name in schema.names() {
        let series = dependence_series(schema, name, rows, &shap)?;
        files.push(ReportFile::new(format!("dependence/{name}.csv"), dependence_csv(&series)));
        files.push(ReportFile::new(format!("dependence/{name}.svg"), dependence_svg(&series)));
    }
    if !pairs.is_empty() {
        let inter = explain_interactions(model, rows)?;
        for (a, b) in pairs {
            let series = interaction_dependence(schema, a, b, rows, &inter)?;
            files.push(ReportFile::new(
                format!("interactions/{a}__{b}.csv"),
                interaction_csv(&series),
            ));
        }
    }
    Ok(files)
}

/// `metrics.json` plus a plain-text rendering.
pub fn evaluation_bundle(report: &EvalReport) -> Result<Vec<ReportFile>> {
    Ok(vec![
        ReportFile::new("metrics.json", report.to_json()?),
        ReportFile::new("metrics.txt", report.render_text()),
    ])
}
