use super::{InteractionMatrix, ShapVector};
use crate::error::{Error, Result};
use crate::records::{FeatureSchema, FeatureVector};

#[derive(Debug, Clone, PartialEq)]
pub struct ImportanceRow {
    pub feature: String,
    pub importance: f64,
}

/// Global importance per feature, most important first.
#[derive(Debug, Clone, PartialEq)]
pub struct ImportanceTable {
    pub rows: Vec<ImportanceRow>,
}

/// Mean absolute attribution per feature over `shap_rows`, sorted
/// descending; equal importances keep schema order.
pub fn importance_table(schema: &FeatureSchema, shap_rows: &[ShapVector]) -> Result<ImportanceTable> {
    if shap_rows.is_empty() {
        return Err(Error::Empty("no attributions to summarize"));
    }
    if let Some(bad) = shap_rows.iter().find(|r| r.phi.len() != schema.len()) {
        return Err(Error::LengthMismatch {
            expected: schema.len(),
            got: bad.phi.len(),
        });
    }
    let n = shap_rows.len() as f64;
    let mut rows: Vec<ImportanceRow> = schema
        .names()
        .iter()
        .enumerate()
        .map(|(i, name)| ImportanceRow {
            feature: name.clone(),
            importance: shap_rows.iter().map(|r| r.phi[i].abs()).sum::<f64>() / n,
        })
        .collect();
    rows.sort_by(|a, b| b.importance.total_cmp(&a.importance));
    Ok(ImportanceTable { rows })
}

impl ImportanceTable {
    pub fn importance_of(&self, feature: &str) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.feature == feature)
            .map(|r| r.importance)
    }

    /// Two aligned columns, `Variable` and `Shapley Number`, with
    /// `<feature>_shap` labels and three decimals.
    pub fn render_text(&self) -> String {
        let labels: Vec<String> = self.rows.iter().map(|r| format!("{}_shap", r.feature)).collect();
        let width = labels
            .iter()
            .map(String::len)
            .chain(std::iter::once("Variable".len()))
            .max()
            .unwrap_or(0);
        let mut out = format!("{:<width$} Shapley Number\n", "Variable");
        for (label, row) in labels.iter().zip(&self.rows) {
            out.push_str(&format!("{label:<width$} {:.3}\n", row.importance));
        }
        out
    }

    pub fn render_csv(&self) -> String {
        let mut out = String::from("Variable,Shapley Number\n");
        for row in &self.rows {
            out.push_str(&format!("{}_shap,{}\n", row.feature, row.importance));
        }
        out
    }
}

/// `(raw value, attribution)` pairs for one feature, sorted by raw value.
#[derive(Debug, Clone, PartialEq)]
pub struct DependenceSeries {
    pub feature: String,
    pub points: Vec<(f64, f64)>,
}

impl DependenceSeries {
    /// Mean attribution over points whose raw value satisfies `pred`.
    pub fn mean_phi_where(&self, pred: impl Fn(f64) -> bool) -> Option<f64> {
        let (sum, n) = self
            .points
            .iter()
            .filter(|(x, _)| pred(*x))
            .fold((0.0, 0usize), |(s, n), (_, p)| (s + p, n + 1));
        (n > 0).then(|| sum / n as f64)
    }
}

fn feature_index(schema: &FeatureSchema, name: &str) -> Result<usize> {
    schema
        .index_of(name)
        .ok_or_else(|| Error::UnknownFeature(name.to_string()))
}

pub fn dependence_series(
    schema: &FeatureSchema,
    feature: &str,
    xs: &[FeatureVector],
    shap_rows: &[ShapVector],
) -> Result<DependenceSeries> {
    let f = feature_index(schema, feature)?;
    if xs.len() != shap_rows.len() {
        return Err(Error::LengthMismatch {
            expected: xs.len(),
            got: shap_rows.len(),
        });
    }
    let mut points: Vec<(f64, f64)> = xs
        .iter()
        .zip(shap_rows)
        .map(|(x, s)| (x.values[f], s.phi[f]))
        .collect();
    points.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(DependenceSeries {
        feature: feature.to_string(),
        points,
    })
}

/// `(raw_i, raw_j, Phi_ij)` triples in dataset order.
#[derive(Debug, Clone, PartialEq)]
pub struct InteractionSeries {
    pub feature_i: String,
    pub feature_j: String,
    pub points: Vec<(f64, f64, f64)>,
}

pub fn interaction_dependence(
    schema: &FeatureSchema,
    feature_i: &str,
    feature_j: &str,
    xs: &[FeatureVector],
    interactions: &[InteractionMatrix],
) -> Result<InteractionSeries> {
    let i = feature_index(schema, feature_i)?;
    let j = feature_index(schema, feature_j)?;
    if i == j {
        return Err(Error::Config(format!(
            "interaction pair needs two distinct features, got {feature_i} twice"
        )));
    }
    if xs.len() != interactions.len() {
        return Err(Error::LengthMismatch {
            expected: xs.len(),
            got: interactions.len(),
        });
    }
    let points = xs
        .iter()
        .zip(interactions)
        .map(|(x, m)| (x.values[i], x.values[j], m.get(i, j)))
        .collect();
    Ok(InteractionSeries {
        feature_i: feature_i.to_string(),
        feature_j: feature_j.to_string(),
        points,
    })
}
