use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Serialize};

use super::FeatureVector;
use crate::error::{Error, Result};

const DAYS_PER_YEAR: f64 = 365.25;

/// One academic trajectory as extracted from the student registry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudentRecord {
    pub id: String,
    /// 0 or 1.
    pub gender: u8,
    pub birth_date: Option<NaiveDate>,
    /// Used when `birth_date` is absent.
    pub age_at_last_activity: Option<f64>,
    pub entry_date: NaiveDate,
    pub last_activity_date: NaiveDate,
    /// Degree finished; the completion year is the year of the last activity.
    pub completed: bool,
    /// Enrolment recorded in the year following the study window (2020 for
    /// the default window).
    pub enrolled_after_window: bool,
    /// Courses credited through equivalencies rather than taken here.
    pub has_equivalencies: bool,
    pub grade_sum: f64,
    pub exam_count: u32,
    pub courses_taken_total: u32,
    pub courses_regularised: u32,
    pub courses_retaken: u32,
    pub courses_libres: u32,
    pub courses_promoted: u32,
    pub courses_passed: u32,
    pub exams_failed: u32,
    pub exams_absent: u32,
    /// Reconstructed: the maximum number of courses held in regularised
    /// state at the same time.
    pub max_reg_accum: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CohortLabel {
    Graduated,
    Permanent,
    Dropout,
}

/// Inclusive range of calendar years under observation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StudyWindow {
    pub first_year: i32,
    pub last_year: i32,
}

impl Default for StudyWindow {
    fn default() -> Self {
        Self {
            first_year: 2005,
            last_year: 2019,
        }
    }
}

impl StudentRecord {
    pub fn validate(&self) -> Result<()> {
        if self.gender > 1 {
            return Err(Error::validation("gender", "must be 0 or 1"));
        }
        if self.last_activity_date < self.entry_date {
            return Err(Error::validation(
                "last_activity_date",
                format!(
                    "{} precedes entry_date {}",
                    self.last_activity_date, self.entry_date
                ),
            ));
        }
        if !self.grade_sum.is_finite() {
            return Err(Error::validation("grade_sum", "must be finite"));
        }
        if let Some(age) = self.age_at_last_activity {
            if !age.is_finite() || age < 0.0 {
                return Err(Error::validation(
                    "age_at_last_activity",
                    "must be finite and non-negative",
                ));
            }
        }
        if let Some(birth) = self.birth_date {
            if birth > self.last_activity_date {
                return Err(Error::validation(
                    "birth_date",
                    "after the last recorded activity",
                ));
            }
        }
        Ok(())
    }

    /// Fractional years between entry and last activity.
    pub fn tenure_years(&self) -> f64 {
        (self.last_activity_date - self.entry_date).num_days() as f64 / DAYS_PER_YEAR
    }

    fn age_years(&self) -> Result<f64> {
        match (self.birth_date, self.age_at_last_activity) {
            (Some(birth), _) => {
                let years = self.last_activity_date.years_since(birth).ok_or_else(|| {
                    Error::validation("birth_date", "after the last recorded activity")
                })?;
                Ok(f64::from(years))
            }
            (None, Some(age)) => Ok(age),
            (None, None) => Err(Error::validation(
                "birth_date",
                "neither birth_date nor age_at_last_activity is present",
            )),
        }
    }
}

/// Assigns the cohort label for `window`.
///
/// Completion inside the window yields `Graduated`; completion after the
/// window means the student was still enrolled at its end and counts as
/// `Permanent`. Without completion, an enrolment after the window means
/// `Permanent` and its absence means `Dropout`.
pub fn label_student(r: &StudentRecord, window: &StudyWindow) -> Result<CohortLabel> {
    r.validate()?;
    if r.completed {
        if r.courses_passed == 0 && r.exam_count == 0 {
            return Err(Error::validation(
                "courses_passed",
                "record marked completed has no recorded activity",
            ));
        }
        let year = r.last_activity_date.year();
        if year < window.first_year {
            return Err(Error::validation(
                "last_activity_date",
                format!("completion year {year} precedes the study window"),
            ));
        }
        return Ok(if year <= window.last_year {
            CohortLabel::Graduated
        } else {
            CohortLabel::Permanent
        });
    }
    Ok(if r.enrolled_after_window {
        CohortLabel::Permanent
    } else {
        CohortLabel::Dropout
    })
}

/// Drops every record credited through equivalencies, keeping survivor order.
pub fn apply_exclusions(cohort: Vec<StudentRecord>) -> Vec<StudentRecord> {
    cohort.into_iter().filter(|r| !r.has_equivalencies).collect()
}

/// Builds the model row for a record; the label is 1 iff the record is a
/// dropout under `window`.
pub fn extract_features(r: &StudentRecord, window: &StudyWindow) -> Result<FeatureVector> {
    let label = label_student(r, window)?;
    let tenure = r.tenure_years();
    if tenure < 0.0 {
        return Err(Error::validation("last_activity_date", "negative tenure"));
    }
    let grade_mean = if r.exam_count == 0 {
        0.0
    } else {
        r.grade_sum / f64::from(r.exam_count)
    };
    let values = vec![
        f64::from(r.gender),
        r.age_years()?,
        tenure,
        grade_mean,
        f64::from(r.courses_taken_total),
        f64::from(r.courses_regularised),
        f64::from(r.courses_retaken),
        f64::from(r.courses_libres),
        f64::from(r.exam_count),
        f64::from(r.courses_promoted),
        f64::from(r.courses_passed),
        f64::from(r.exams_failed),
        f64::from(r.exams_absent),
        f64::from(r.max_reg_accum),
    ];
    Ok(FeatureVector::new(
        values,
        u8::from(label == CohortLabel::Dropout),
    ))
}
