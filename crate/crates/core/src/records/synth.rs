use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::FeatureVector;
use crate::error::{Error, Result};

/// Parameters of the synthetic cohort generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub n_students: usize,
    pub seed: u64,
    /// Target share of dropouts, in (0, 1).
    pub dropout_base_rate: f64,
    /// Standard deviation of the per-student idiosyncratic log-odds term.
    pub noise_scale: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            n_students: 2000,
            seed: 7,
            dropout_base_rate: 0.5,
            noise_scale: 0.5,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_students == 0 {
            return Err(Error::Config("n_students must be positive".into()));
        }
        if !(self.dropout_base_rate > 0.0 && self.dropout_base_rate < 1.0) {
            return Err(Error::Config(format!(
                "dropout_base_rate must lie in (0, 1), got {}",
                self.dropout_base_rate
            )));
        }
        if !(self.noise_scale >= 0.0 && self.noise_scale.is_finite()) {
            return Err(Error::Config(format!(
                "noise_scale must be finite and non-negative, got {}",
                self.noise_scale
            )));
        }
        Ok(())
    }
}

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

fn round2(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}

fn count(x: f64) -> f64 {
    x.round().max(0.0)
}

/// Dropout log-odds contribution of each driver, before the intercept.
///
/// Shapes: short tenure lowers risk and long tenure raises it; risk rises
/// with age through the early twenties and is elevated at both extremes;
/// many regularised courses lower risk; few failed exams lower risk;
/// promotions and grades are protective.
struct RiskShape;

/// Scale of the driver terms relative to the unit-scale shapes below.
const SIGNAL: f64 = 1.3;

impl RiskShape {
    fn tenure(t: f64) -> f64 {
        if t <= 3.0 {
            -1.6
        } else if t <= 6.0 {
            -0.6
        } else {
            0.9 + 0.3 * (t - 6.0)
        }
    }

    fn age(a: f64) -> f64 {
        if a <= 19.0 {
            0.4
        } else if a <= 26.0 {
            -0.6 + 0.15 * (a - 20.0)
        } else {
            0.5 + 0.1 * (a - 27.0)
        }
    }

    fn regularised(r: f64) -> f64 {
        if r <= 5.0 {
            1.6
        } else if r < 14.0 {
            0.5
        } else {
            -1.2 - 0.04 * (r - 14.0)
        }
    }

    fn failed(f: f64) -> f64 {
        if f <= 5.0 {
            -0.8
        } else if f <= 16.0 {
            0.5
        } else {
            1.1
        }
    }

    fn promoted(p: f64) -> f64 {
        -0.15 * p
    }

    fn grades(g: f64, exams: f64) -> f64 {
        if exams == 0.0 {
            0.5
        } else {
            -0.4 * (g - 6.0)
        }
    }
}

/// Generates a seeded synthetic cohort in the student schema.
///
/// Attributes are drawn from a latent ability and tenure model; the dropout
/// label is Bernoulli on a log-odds score built from [`RiskShape`] plus
/// Gaussian noise. The intercept is solved by bisection so the expected
/// dropout share equals `dropout_base_rate`.
pub fn synth_cohort(cfg: &SynthConfig) -> Result<Vec<FeatureVector>> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let normal = |rng: &mut ChaCha8Rng| -> f64 { StandardNormal.sample(rng) };

    let n = cfg.n_students;
    let mut rows = Vec::with_capacity(n);
    let mut scores = Vec::with_capacity(n);
    let mut draws = Vec::with_capacity(n);
    for _ in 0..n {
        let gender = f64::from(u8::from(rng.random_bool(0.3)));
        let entry_age = 17.0 + 3.0 * rng.random::<f64>().powi(2);
        let tenure = round2(0.3 + 10.7 * rng.random::<f64>());
        let age = (entry_age + tenure).floor();
        let ability: f64 = normal(&mut rng);

        let pace = (5.5 + 1.2 * ability + 0.8 * normal(&mut rng)).clamp(1.0, 9.0);
        let taken = count(tenure * pace);
        let regularised = count(taken * sigmoid(0.6 + 1.2 * ability));
        let libres = (taken - regularised).max(0.0);
        let retaken = count(libres * 0.5 * rng.random::<f64>());
        let promoted = count(regularised * 0.35 * sigmoid(ability + 0.5 * normal(&mut rng)));
        let exam_pool = regularised - promoted;
        let exams = count(exam_pool * (1.0 + 0.5 * rng.random::<f64>()));
        let exams_passed = count(exams * sigmoid(0.8 + ability)).min(exam_pool);
        let passed = exams_passed + promoted;
        let failed = count((exams - exams_passed) * (0.6 + 0.4 * rng.random::<f64>()));
        let absent = (exams - exams_passed - failed).max(0.0);
        let grades = if exams > 0.0 {
            round2((6.0 + 1.1 * ability + 0.7 * normal(&mut rng)).clamp(2.0, 10.0))
        } else {
            0.0
        };
        let max_reg = count(2.0 + 0.25 * regularised + 1.5 * normal(&mut rng)).min(regularised);

        let score = SIGNAL
            * (RiskShape::tenure(tenure)
                + RiskShape::age(age)
                + RiskShape::regularised(regularised)
                + RiskShape::failed(failed)
                + RiskShape::promoted(promoted)
                + RiskShape::grades(grades, exams))
            + cfg.noise_scale * normal(&mut rng);
        scores.push(score);
        draws.push(rng.random::<f64>());
        rows.push(vec![
            gender,
            age,
            tenure,
            grades,
            taken,
            regularised,
            retaken,
            libres,
            exams,
            promoted,
            passed,
            failed,
            absent,
            max_reg,
        ]);
    }

    let intercept = calibrate_intercept(&scores, cfg.dropout_base_rate);
    Ok(rows
        .into_iter()
        .zip(scores.iter().zip(&draws))
        .map(|(values, (&s, &u))| {
            let label = u8::from(u < sigmoid(intercept + s));
            FeatureVector::new(values, label)
        })
        .collect())
}

/// Intercept `b` with `mean(sigmoid(b + s)) == target`.
fn calibrate_intercept(scores: &[f64], target: f64) -> f64 {
    let mean_p = |b: f64| scores.iter().map(|&s| sigmoid(b + s)).sum::<f64>() / scores.len() as f64;
    let (mut lo, mut hi) = (-50.0_f64, 50.0_f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mean_p(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
