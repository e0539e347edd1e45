//! Run settings: built-in defaults, then an optional `key = value` file,
//! then command-line flags.

use std::collections::HashSet;
use std::str::FromStr;

use clap::ValueEnum;
use retention_core::{Error, Result, SynthConfig, TrainConfig};

/// Which rows `explain` attributes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum ExplainSplit {
    #[default]
    Test,
    Train,
    All,
}

impl FromStr for ExplainSplit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        <Self as ValueEnum>::from_str(s, true).map_err(|_| {
            Error::Config(format!("explain_split must be test, train or all, got {s:?}"))
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub synth: SynthConfig,
    pub train: TrainConfig,
    /// Set when a file or flag names the training seed explicitly.
    pub explicit_seed: Option<u64>,
    pub threshold: f64,
    pub explain_split: ExplainSplit,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            synth: SynthConfig::default(),
            train: TrainConfig::default(),
            explicit_seed: None,
            threshold: 0.5,
            explain_split: ExplainSplit::Test,
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("`{key}`: cannot parse {value:?}")))
}

fn expect_fixed(key: &str, value: &str, allowed: &str) -> Result<()> {
    if value == allowed {
        Ok(())
    } else {
        Err(Error::Config(format!("`{key}` only supports {allowed:?}, got {value:?}")))
    }
}

fn unquote(value: &str) -> &str {
    for q in ['"', '\''] {
        if let Some(inner) = value.strip_prefix(q).and_then(|v| v.strip_suffix(q)) {
            return inner;
        }
    }
    value
}

impl RunConfig {
    /// Applies one setting by its file key.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let t = &mut self.train;
        let s = &mut self.synth;
        match key {
            "max_bin" => t.max_bin = parse(key, value)?,
            "learning_rate" => t.learning_rate = parse(key, value)?,
            "num_leaves" => t.num_leaves = parse(key, value)?,
            "min_data" => t.min_data = parse(key, value)?,
            "boost_from_average" => t.boost_from_average = parse(key, value)?,
            "num_iterations" => t.num_iterations = parse(key, value)?,
            "lambda_l2" => t.lambda_l2 = parse(key, value)?,
            "min_sum_hessian" => t.min_sum_hessian = parse(key, value)?,
            "split_ratio" => t.split_ratio = parse(key, value)?,
            "stratified" => t.stratified = parse(key, value)?,
            "seed" => {
                t.seed = parse(key, value)?;
                self.explicit_seed = Some(t.seed);
            }
            "early_stopping_rounds" => t.early_stopping_rounds = Some(parse(key, value)?),
            "boosting_type" => expect_fixed(key, value, "gbdt")?,
            "objective" => expect_fixed(key, value, "binary")?,
            "metric" => expect_fixed(key, value, "binary_logloss")?,
            "verbose" => expect_fixed(key, value, "-1")?,
            "n_students" => s.n_students = parse(key, value)?,
            "synth_seed" => s.seed = parse(key, value)?,
            "dropout_base_rate" => s.dropout_base_rate = parse(key, value)?,
            "noise_scale" => s.noise_scale = parse(key, value)?,
            "threshold" => self.threshold = parse(key, value)?,
            "explain_split" => self.explain_split = value.parse()?,
            _ => return Err(Error::Config(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    /// Applies a flat `key = value` file. Blank lines and lines starting
    /// with `#` are skipped; repeating a key is an error.
    pub fn apply_file(&mut self, text: &str) -> Result<()> {
        let mut seen = HashSet::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let at = |e: Error| match e {
                Error::Config(msg) => Error::Config(format!("line {}: {msg}", n + 1)),
                other => other,
            };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("expected `key = value`, got {line:?}")))
                .map_err(at)?;
            let key = key.trim();
            if !seen.insert(key.to_string()) {
                return Err(at(Error::Config(format!("`{key}` given twice"))));
            }
            self.set(key, unquote(value.trim())).map_err(at)?;
        }
        Ok(())
    }

    /// Checks every section before any work starts.
    pub fn validate(&self) -> Result<()> {
        self.synth.validate()?;
        self.train.validate()?;
        if !(0.0..=1.0).contains(&self.threshold) {
            return Err(Error::Config(format!(
                "threshold must be in [0, 1], got {}",
                self.threshold
            )));
        }
        Ok(())
    }
}
