use std::fmt;
use std::fs::{self, File};
use std::path::Path;

use retention_core::error::ErrorKind;
use retention_core::gbdt::DataFingerprint;
use retention_core::records::{read_cohort, synth_cohort, write_cohort};
use retention_core::report::{evaluation_bundle, explain_bundle, history_csv};
use retention_core::{pipeline, Ensemble, Error, EvalReport, FeatureSchema, FeatureVector};

use crate::output::{write_atomic, write_bundle};
use crate::settings::{ExplainSplit, RunConfig};
use crate::{ConfigArg, DataArgs, EvaluateArgs, ExplainArgs, SynthArgs, TrainArgs};

/// An error with the file or step it came from.
#[derive(Debug)]
pub struct Failure {
    pub kind: ErrorKind,
    message: String,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Self {
            kind: e.kind(),
            message: e.to_string(),
        }
    }
}

trait Context<T> {
    fn context(self, what: impl fmt::Display) -> Result<T, Failure>;
}

impl<T, E: Into<Error>> Context<T> for Result<T, E> {
    fn context(self, what: impl fmt::Display) -> Result<T, Failure> {
        self.map_err(|e| {
            let e = e.into();
            Failure {
                kind: e.kind(),
                message: format!("{what}: {e}"),
            }
        })
    }
}

type Outcome = Result<(), Failure>;

fn load_settings(arg: &ConfigArg) -> Result<RunConfig, Failure> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &arg.config {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(e.to_string()))
            .context(path.display())?;
        cfg.apply_file(&text).context(path.display())?;
    }
    Ok(cfg)
}

fn load_rows(data: &DataArgs, schema: &FeatureSchema) -> Result<Vec<FeatureVector>, Failure> {
    let path = &data.data;
    let file = File::open(path).context(path.display())?;
    let loaded = read_cohort(file, schema, data.skip_bad_rows).context(path.display())?;
    let report = &loaded.report;
    if report.rows_rejected > 0 {
        eprintln!(
            "skipped {} of {} rows in {}",
            report.rows_rejected,
            report.rows_read,
            path.display()
        );
        for reason in &report.rejections {
            eprintln!("  {reason}");
        }
    }
    Ok(loaded.rows)
}

fn load_model(path: &Path) -> Result<Ensemble, Failure> {
    let text = fs::read_to_string(path).context(path.display())?;
    Ensemble::from_json(&text).context(path.display())
}

fn write(path: &Path, contents: &[u8]) -> Outcome {
    write_atomic(path, contents).context(path.display())
}

/// The model must come from this cohort and, when a seed was named, from
/// that split.
fn check_provenance(model: &Ensemble, rows: &[FeatureVector], settings: &RunConfig) -> Outcome {
    if let Some(seed) = settings.explicit_seed {
        if seed != model.config().seed {
            return Err(Error::Config(format!(
                "seed {seed} does not match the model's split seed {}",
                model.config().seed
            ))
            .into());
        }
    }
    if let Some(recorded) = &model.training_data {
        let actual = DataFingerprint::of(rows);
        if &actual != recorded {
            return Err(Error::SchemaMismatch(format!(
                "cohort ({} rows, sha256 {}) is not the one the model was trained on ({} rows, sha256 {})",
                actual.rows, actual.sha256, recorded.rows, recorded.sha256
            ))
            .into());
        }
    }
    Ok(())
}

pub fn synth(a: SynthArgs) -> Outcome {
    let mut settings = load_settings(&a.config)?;
    let s = &mut settings.synth;
    s.n_students = a.n.unwrap_or(s.n_students);
    s.seed = a.seed.unwrap_or(s.seed);
    s.dropout_base_rate = a.base_rate.unwrap_or(s.dropout_base_rate);
    s.noise_scale = a.noise.unwrap_or(s.noise_scale);
    settings.validate()?;

    let rows = synth_cohort(&settings.synth)?;
    let mut buf = Vec::new();
    write_cohort(&mut buf, &FeatureSchema::student(), &rows)?;
    write(&a.out, &buf)?;
    let dropouts = rows.iter().filter(|r| r.is_dropout()).count();
    println!(
        "wrote {} rows to {}; dropout rate {:.4}",
        rows.len(),
        a.out.display(),
        dropouts as f64 / rows.len() as f64
    );
    Ok(())
}

pub fn train(a: TrainArgs) -> Outcome {
    let mut settings = load_settings(&a.config)?;
    let t = &mut settings.train;
    t.num_iterations = a.iterations.unwrap_or(t.num_iterations);
    t.max_bin = a.max_bin.unwrap_or(t.max_bin);
    t.learning_rate = a.learning_rate.unwrap_or(t.learning_rate);
    t.num_leaves = a.num_leaves.unwrap_or(t.num_leaves);
    t.min_data = a.min_data.unwrap_or(t.min_data);
    t.boost_from_average = a.boost_from_average.unwrap_or(t.boost_from_average);
    t.lambda_l2 = a.lambda_l2.unwrap_or(t.lambda_l2);
    t.split_ratio = a.split_ratio.unwrap_or(t.split_ratio);
    t.seed = a.seed.unwrap_or(t.seed);
    t.stratified |= a.stratified;
    if a.early_stopping_rounds.is_some() {
        t.early_stopping_rounds = a.early_stopping_rounds;
    }
    settings.validate()?;

    let schema = FeatureSchema::student();
    let rows = load_rows(&a.data, &schema)?;
    let run = pipeline::fit(&schema, &rows, &settings.train).context(a.data.data.display())?;
    let out = &a.data.out_dir;
    write(&out.join("model.json"), run.output.ensemble.to_json()?.as_bytes())?;
    write(&out.join("history.csv"), history_csv(&run.output.history).as_bytes())?;

    println!(
        "trained {} trees on {} rows ({} held out)",
        run.output.ensemble.trees.len(),
        run.train_rows.len(),
        run.test_rows.len()
    );
    if let Some(last) = run.output.history.last() {
        print!("final train logloss {:.6}", last.train_logloss);
        match last.valid_logloss {
            Some(v) => println!(", held-out logloss {v:.6}"),
            None => println!(),
        }
    }
    if let Some(best) = run.output.best_iteration {
        println!("best iteration {best}");
    }
    Ok(())
}

pub fn evaluate(a: EvaluateArgs) -> Outcome {
    let mut settings = load_settings(&a.config)?;
    settings.threshold = a.threshold.unwrap_or(settings.threshold);
    if a.seed.is_some() {
        settings.explicit_seed = a.seed;
    }
    settings.validate()?;

    let model = load_model(&a.model.model)?;
    let rows = load_rows(&a.data, model.schema())?;
    check_provenance(&model, &rows, &settings)?;
    let (_, test_rows) = pipeline::split(&rows, model.config())?;
    let labels: Vec<f64> = test_rows.iter().map(|r| f64::from(r.label)).collect();
    let probas = model.probas(&test_rows)?;
    let report = EvalReport::compute(&labels, &probas, settings.threshold)
        .context(format!("held-out split of {} rows", test_rows.len()))?;
    let files = evaluation_bundle(&report)?;
    write_bundle(&a.data.out_dir, &files).context(a.data.out_dir.display())?;
    print!("{}", report.render_text());
    Ok(())
}

fn parse_pair(text: &str, schema: &FeatureSchema) -> Result<(String, String), Failure> {
    let (a, b) = text
        .split_once(',')
        .map(|(a, b)| (a.trim(), b.trim()))
        .filter(|(a, b)| !a.is_empty() && !b.is_empty() && !b.contains(','))
        .ok_or_else(|| Error::Config(format!("--interactions expects `A,B`, got {text:?}")))?;
    for name in [a, b] {
        if schema.index_of(name).is_none() {
            return Err(Error::Config(format!("--interactions: unknown feature `{name}`")).into());
        }
    }
    if a == b {
        return Err(Error::Config(format!("--interactions: `{a}` paired with itself")).into());
    }
    Ok((a.to_string(), b.to_string()))
}

pub fn explain(a: ExplainArgs) -> Outcome {
    let mut settings = load_settings(&a.config)?;
    settings.explain_split = a.split.unwrap_or(settings.explain_split);
    if a.seed.is_some() {
        settings.explicit_seed = a.seed;
    }
    settings.validate()?;

    let model = load_model(&a.model.model)?;
    let pairs = a
        .interactions
        .iter()
        .map(|text| parse_pair(text, model.schema()))
        .collect::<Result<Vec<_>, _>>()?;
    let rows = load_rows(&a.data, model.schema())?;
    check_provenance(&model, &rows, &settings)?;
    let rows = match settings.explain_split {
        ExplainSplit::All => rows,
        split => {
            let (train_rows, test_rows) = pipeline::split(&rows, model.config())?;
            if split == ExplainSplit::Train {
                train_rows
            } else {
                test_rows
            }
        }
    };
    if rows.is_empty() {
        return Err(Error::Empty("no rows to explain").into());
    }
    let files = explain_bundle(&model, &rows, &pairs)?;
    write_bundle(&a.data.out_dir, &files).context(a.data.out_dir.display())?;
    if let Some(table) = files.iter().find(|f| f.path == "importance.txt") {
        print!("{}", table.contents);
    }
    println!("wrote {} files to {}", files.len(), a.data.out_dir.display());
    Ok(())
}
