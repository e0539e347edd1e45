//! Student data model, cohort labeling, CSV ingestion and the synthetic
//! cohort generator.

mod csv_io;
mod student;
mod synth;

use serde::{Deserialize, Serialize};

pub use csv_io::{load_cohort_csv, read_cohort, write_cohort, LoadedCohort, ParseReport};
pub use student::{
    apply_exclusions, extract_features, label_student, CohortLabel, StudentRecord, StudyWindow,
};
pub use synth::{synth_cohort, SynthConfig};

/// Canonical predictor order used by CSV files, model files and reports.
pub const FEATURE_NAMES: [&str; 14] = [
    "Genero",
    "EdadUltimaActividad",
    "TiempoFacultad",
    "PromedioNotas",
    "NumeroTotalCursadas",
    "NumeroRegulares",
    "NumeroRecursadas",
    "NumeroLibres",
    "NumerodeExamenes",
    "NumeroPromociones",
    "NumeroAprobados",
    "NumerodeReprobados",
    "NumerodeAusentes",
    "MaxRegAcum",
];

/// Binary target column: 1 = dropout.
pub const LABEL_COLUMN: &str = "Abandono";

/// Column indices into [`FEATURE_NAMES`].
pub mod col {
    pub const GENERO: usize = 0;
    pub const EDAD_ULTIMA_ACTIVIDAD: usize = 1;
    pub const TIEMPO_FACULTAD: usize = 2;
    pub const PROMEDIO_NOTAS: usize = 3;
    pub const NUMERO_TOTAL_CURSADAS: usize = 4;
    pub const NUMERO_REGULARES: usize = 5;
    pub const NUMERO_RECURSADAS: usize = 6;
    pub const NUMERO_LIBRES: usize = 7;
    pub const NUMERODE_EXAMENES: usize = 8;
    pub const NUMERO_PROMOCIONES: usize = 9;
    pub const NUMERO_APROBADOS: usize = 10;
    pub const NUMERODE_REPROBADOS: usize = 11;
    pub const NUMERODE_AUSENTES: usize = 12;
    pub const MAX_REG_ACUM: usize = 13;
}

/// Ordered feature names.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FeatureSchema {
    names: Vec<String>,
}

impl FeatureSchema {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Self {
        Self {
            names: names.into_iter().map(Into::into).collect(),
        }
    }

    /// The 14-column student schema.
    pub fn student() -> Self {
        Self::new(FEATURE_NAMES)
    }

    /// Generic names `f0, f1, ...`, handy for toy models.
    pub fn anonymous(n: usize) -> Self {
        Self::new((0..n).map(|i| format!("f{i}")))
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, index: usize) -> &str {
        &self.names[index]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

impl Default for FeatureSchema {
    fn default() -> Self {
        Self::student()
    }
}

/// One row of predictors plus the binary dropout label.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub values: Vec<f64>,
    pub label: u8,
}

impl FeatureVector {
    pub fn new(values: Vec<f64>, label: u8) -> Self {
        Self { values, label }
    }

    pub fn is_dropout(&self) -> bool {
        self.label == 1
    }
}

/// Labels of a slice of rows as `f64` (0.0 / 1.0).
pub fn labels_of(rows: &[FeatureVector]) -> Vec<f64> {
    rows.iter().map(|r| f64::from(r.label)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn student_schema_is_fixed_order() {
        let schema = FeatureSchema::student();
        assert_eq!(schema.len(), 14);
        assert_eq!(schema.index_of("Genero"), Some(col::GENERO));
        assert_eq!(schema.index_of("MaxRegAcum"), Some(col::MAX_REG_ACUM));
        assert_eq!(
            schema.index_of("NumerodeReprobados"),
            Some(col::NUMERODE_REPROBADOS)
        );
        assert_eq!(schema.index_of("Abandono"), None);
    }

    #[test]
    fn schema_serializes_as_plain_list() {
        let schema = FeatureSchema::new(["a", "b"]);
        assert_eq!(serde_json::to_string(&schema).unwrap(), r#"["a","b"]"#);
    }
}
