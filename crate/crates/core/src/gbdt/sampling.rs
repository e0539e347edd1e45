use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::records::FeatureVector;

/// Seeded shuffle followed by a prefix split; the train side gets
/// `round(ratio * n)` rows, clamped so both sides are non-empty.
///
/// With `stratified`, each class is shuffled and split on its own and the
/// halves are concatenated positives first.
pub fn split_train_test(
    cohort: &[FeatureVector],
    ratio: f64,
    seed: u64,
    stratified: bool,
) -> Result<(Vec<FeatureVector>, Vec<FeatureVector>)> {
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(Error::Config(format!("split ratio must be in (0, 1), got {ratio}")));
    }
    if cohort.len() < 2 {
        return Err(Error::Empty("at least two rows are needed to split"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (train_idx, test_idx) = if stratified {
        let mut train = Vec::new();
        let mut test = Vec::new();
        for class in [1u8, 0] {
            let idx: Vec<usize> = (0..cohort.len())
                .filter(|&i| cohort[i].label == class)
                .collect();
            let (a, b) = shuffled_split(idx, ratio, &mut rng, false);
            train.extend(a);
            test.extend(b);
        }
        if train.is_empty() || test.is_empty() {
            return Err(Error::Empty("stratified split left one side empty"));
        }
        (train, test)
    } else {
        shuffled_split((0..cohort.len()).collect(), ratio, &mut rng, true)
    };
    let pick = |idx: &[usize]| idx.iter().map(|&i| cohort[i].clone()).collect();
    Ok((pick(&train_idx), pick(&test_idx)))
}

fn shuffled_split(
    mut idx: Vec<usize>,
    ratio: f64,
    rng: &mut ChaCha8Rng,
    keep_both_sides: bool,
) -> (Vec<usize>, Vec<usize>) {
    idx.shuffle(rng);
    let n = idx.len();
    let mut cut = (ratio * n as f64).round() as usize;
    if keep_both_sides {
        cut = cut.clamp(1, n - 1);
    }
    let test = idx.split_off(cut.min(n));
    (idx, test)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cohort(n: usize) -> Vec<FeatureVector> {
        (0..n)
            .map(|i| FeatureVector::new(vec![i as f64], (i % 3 == 0) as u8))
            .collect()
    }

    fn ids(rows: &[FeatureVector]) -> Vec<usize> {
        rows.iter().map(|r| r.values[0] as usize).collect()
    }

    #[test]
    fn sizes_follow_rounding() {
        let (a, b) = split_train_test(&cohort(10), 0.7, 1, false).unwrap();
        assert_eq!((a.len(), b.len()), (7, 3));
        let (a, b) = split_train_test(&cohort(1343), 0.7, 1, false).unwrap();
        assert_eq!((a.len(), b.len()), (940, 403));
    }

    #[test]
    fn partition_is_disjoint_and_exhaustive() {
        let (a, b) = split_train_test(&cohort(101), 0.7, 9, false).unwrap();
        let mut all: Vec<usize> = ids(&a).into_iter().chain(ids(&b)).collect();
        all.sort_unstable();
        assert_eq!(all, (0..101).collect::<Vec<_>>());
    }

    #[test]
    fn seeded_determinism() {
        let c = cohort(50);
        let first = split_train_test(&c, 0.7, 3, false).unwrap();
        let again = split_train_test(&c, 0.7, 3, false).unwrap();
        assert_eq!(first, again);
        let other = split_train_test(&c, 0.7, 4, false).unwrap();
        assert_ne!(ids(&first.0), ids(&other.0));
    }

    #[test]
    fn too_small_or_bad_ratio() {
        assert!(matches!(split_train_test(&cohort(1), 0.7, 0, false), Err(Error::Empty(_))));
        assert!(matches!(split_train_test(&cohort(10), 1.0, 0, false), Err(Error::Config(_))));
        let (a, b) = split_train_test(&cohort(2), 0.99, 0, false).unwrap();
        assert_eq!((a.len(), b.len()), (1, 1));
    }

    #[test]
    fn stratified_keeps_class_shares() {
        let c = cohort(300);
        let (a, b) = split_train_test(&c, 0.7, 5, true).unwrap();
        assert_eq!(a.len() + b.len(), 300);
        assert_eq!(a.iter().filter(|r| r.label == 1).count(), 70);
        assert_eq!(b.iter().filter(|r| r.label == 1).count(), 30);
    }
}
