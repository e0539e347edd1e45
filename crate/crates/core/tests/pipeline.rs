use retention_core::metrics::roc_auc;
use retention_core::records::{read_cohort, synth_cohort, write_cohort};
use retention_core::report::{explain_bundle, local_accuracy_gap};
use retention_core::shap::explain_rows;
use retention_core::{pipeline, Ensemble, FeatureSchema, SynthConfig, TrainConfig};

#[test]
fn csv_round_trip_train_and_explain() {
    let schema = FeatureSchema::student();
    let cohort = synth_cohort(&SynthConfig { n_students: 800, ..SynthConfig::default() }).unwrap();
    let mut csv = Vec::new();
    write_cohort(&mut csv, &schema, &cohort).unwrap();
    let loaded = read_cohort(csv.as_slice(), &schema, false).unwrap();
    assert_eq!(loaded.rows, cohort);
    assert_eq!(loaded.report.rows_rejected, 0);

    let cfg = TrainConfig { num_iterations: 150, min_data: 40, ..TrainConfig::default() };
    let run = pipeline::fit(&schema, &loaded.rows, &cfg).unwrap();
    let model = &run.output.ensemble;
    let restored = Ensemble::from_json(&model.to_json().unwrap()).unwrap();
    assert_eq!(&restored, model);

    let labels: Vec<f64> = run.test_rows.iter().map(|r| f64::from(r.label)).collect();
    let auc = roc_auc(&labels, &restored.probas(&run.test_rows).unwrap()).unwrap();
    assert!(auc > 0.75, "auc {auc}");

    let shap = explain_rows(&restored, &run.test_rows).unwrap();
    assert!(local_accuracy_gap(&restored, &run.test_rows, &shap).unwrap() <= 1e-9);
    let files = explain_bundle(&restored, &run.test_rows, &[]).unwrap();
    assert_eq!(files.len(), 3 + 2 * schema.len());
}

#[test]
fn rebuilt_split_matches_training_split() {
    let schema = FeatureSchema::student();
    let cohort = synth_cohort(&SynthConfig { n_students: 200, ..SynthConfig::default() }).unwrap();
    let cfg = TrainConfig { num_iterations: 2, min_data: 20, ..TrainConfig::default() };
    let run = pipeline::fit(&schema, &cohort, &cfg).unwrap();
    let (train_rows, test_rows) = pipeline::split(&cohort, run.output.ensemble.config()).unwrap();
    assert_eq!(train_rows, run.train_rows);
    assert_eq!(test_rows, run.test_rows);
}
