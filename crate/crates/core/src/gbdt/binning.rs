use crate::error::{Error, Result};
use crate::records::{FeatureSchema, FeatureVector};

/// Per-feature bin boundaries.
///
/// `upper_bounds[f][b]` is the raw-value upper edge of bin `b`: a value `x`
/// falls in the first bin with `x <= upper_bound`. Interior edges sit halfway
/// between the largest value of one bin and the smallest of the next; the
/// last edge is `+inf`. A tree split "after bin b" therefore carries the raw
/// threshold `upper_bounds[f][b]`, and `x <= threshold` holds exactly when
/// `bin(x) <= b`.
#[derive(Debug, Clone, PartialEq)]
pub struct BinMapper {
    upper_bounds: Vec<Vec<f64>>,
}

impl BinMapper {
    /// Cuts each feature into at most `max_bin` bins over its distinct
    /// values. With `d <= max_bin` distinct values every value gets its own
    /// bin; otherwise the sorted distinct values are divided into `max_bin`
    /// contiguous groups of near-equal size.
    pub fn fit(schema: &FeatureSchema, rows: &[FeatureVector], max_bin: usize) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::Empty("cannot bin an empty dataset"));
        }
        if max_bin < 2 {
            return Err(Error::Config(format!("max_bin must be >= 2, got {max_bin}")));
        }
        check_rows(schema, rows)?;
        let upper_bounds = (0..schema.len())
            .map(|f| {
                let mut distinct: Vec<f64> = rows.iter().map(|r| r.values[f]).collect();
                distinct.sort_by(f64::total_cmp);
                distinct.dedup();
                cut_distinct(&distinct, max_bin)
            })
            .collect();
        Ok(Self { upper_bounds })
    }

    pub fn num_features(&self) -> usize {
        self.upper_bounds.len()
    }

    pub fn num_bins(&self, feature: usize) -> usize {
        self.upper_bounds[feature].len()
    }

    pub fn upper_bounds(&self, feature: usize) -> &[f64] {
        &self.upper_bounds[feature]
    }

    pub fn bin_of(&self, feature: usize, value: f64) -> u16 {
        let bounds = &self.upper_bounds[feature];
        // First edge >= value; the final +inf edge catches everything.
        let b = bounds.partition_point(|&ub| ub < value);
        b.min(bounds.len() - 1) as u16
    }
}

fn cut_distinct(distinct: &[f64], max_bin: usize) -> Vec<f64> {
    let d = distinct.len();
    let groups = d.min(max_bin);
    let mut bounds = Vec::with_capacity(groups);
    for k in 0..groups {
        // Group k covers distinct[k*d/groups .. (k+1)*d/groups].
        let end = (k + 1) * d / groups;
        if end < d {
            let lo = distinct[end - 1];
            let hi = distinct[end];
            let mid = lo + (hi - lo) / 2.0;
            // Adjacent doubles can round the midpoint up to `hi`.
            bounds.push(if mid < hi { mid } else { lo });
        } else {
            bounds.push(f64::INFINITY);
        }
    }
    bounds
}

fn check_rows(schema: &FeatureSchema, rows: &[FeatureVector]) -> Result<()> {
    for (i, row) in rows.iter().enumerate() {
        if row.values.len() != schema.len() {
            return Err(Error::LengthMismatch {
                expected: schema.len(),
                got: row.values.len(),
            });
        }
        if let Some(f) = row.values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                row: i,
                feature: schema.name(f).to_string(),
            });
        }
        if row.label > 1 {
            return Err(Error::validation("label", format!("row {i} has label {}", row.label)));
        }
    }
    Ok(())
}

/// Rows quantized against a [`BinMapper`], kept column-major for histogram
/// construction. Raw values are retained for routing through trees.
#[derive(Debug, Clone)]
pub struct BinnedDataset {
    schema: FeatureSchema,
    mapper: BinMapper,
    bins: Vec<Vec<u16>>,
    raw: Vec<f64>,
    labels: Vec<f64>,
}

/// Bins `rows` with boundaries fitted on the rows themselves.
pub fn bin_features(
    schema: &FeatureSchema,
    rows: &[FeatureVector],
    max_bin: usize,
) -> Result<BinnedDataset> {
    let mapper = BinMapper::fit(schema, rows, max_bin)?;
    BinnedDataset::with_mapper(schema.clone(), mapper, rows)
}

impl BinnedDataset {
    /// Bins `rows` against existing boundaries, e.g. a validation set against
    /// the training set's mapper.
    pub fn with_mapper(
        schema: FeatureSchema,
        mapper: BinMapper,
        rows: &[FeatureVector],
    ) -> Result<Self> {
        check_rows(&schema, rows)?;
        if mapper.num_features() != schema.len() {
            return Err(Error::SchemaMismatch(format!(
                "mapper has {} features, schema has {}",
                mapper.num_features(),
                schema.len()
            )));
        }
        let bins = (0..schema.len())
            .map(|f| rows.iter().map(|r| mapper.bin_of(f, r.values[f])).collect())
            .collect();
        let raw = rows.iter().flat_map(|r| r.values.iter().copied()).collect();
        let labels = rows.iter().map(|r| f64::from(r.label)).collect();
        Ok(Self {
            schema,
            mapper,
            bins,
            raw,
            labels,
        })
    }

    pub fn schema(&self) -> &FeatureSchema {
        &self.schema
    }

    pub fn mapper(&self) -> &BinMapper {
        &self.mapper
    }

    pub fn num_rows(&self) -> usize {
        self.labels.len()
    }

    pub fn num_features(&self) -> usize {
        self.schema.len()
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    pub fn bin(&self, row: usize, feature: usize) -> u16 {
        self.bins[feature][row]
    }

    pub fn feature_bins(&self, feature: usize) -> &[u16] {
        &self.bins[feature]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        let nf = self.num_features();
        &self.raw[row * nf..(row + 1) * nf]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn one_feature(values: &[f64]) -> (FeatureSchema, Vec<FeatureVector>) {
        (
            FeatureSchema::anonymous(1),
            values.iter().map(|&v| FeatureVector::new(vec![v], 0)).collect(),
        )
    }

    #[test]
    fn constant_feature_single_bin() {
        let (s, rows) = one_feature(&[4.0; 20]);
        let ds = bin_features(&s, &rows, 512).unwrap();
        assert_eq!(ds.mapper().num_bins(0), 1);
        assert!(ds.feature_bins(0).iter().all(|&b| b == 0));
    }

    #[test]
    fn few_distinct_values_get_own_bins() {
        let (s, rows) = one_feature(&[3.0, 1.0, 2.0, 1.0]);
        let ds = bin_features(&s, &rows, 512).unwrap();
        assert_eq!(ds.mapper().upper_bounds(0), &[1.5, 2.5, f64::INFINITY]);
        assert_eq!(ds.feature_bins(0), &[2, 0, 1, 0]);
    }

    #[test]
    fn uniform_thousand_values_fill_max_bin() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let values: Vec<f64> = (0..1000).map(|_| rng.random::<f64>()).collect();
        let (s, rows) = one_feature(&values);
        let ds = bin_features(&s, &rows, 512).unwrap();
        assert_eq!(ds.mapper().num_bins(0), 512);
        let mut counts = vec![0usize; 512];
        for &b in ds.feature_bins(0) {
            counts[b as usize] += 1;
        }
        assert!(counts.iter().all(|&c| (1..=3).contains(&c)), "{counts:?}");
    }

    #[test]
    fn non_finite_reports_location() {
        let schema = FeatureSchema::new(["a", "b"]);
        let rows = vec![
            FeatureVector::new(vec![1.0, 2.0], 0),
            FeatureVector::new(vec![1.0, f64::NAN], 1),
        ];
        match bin_features(&schema, &rows, 16) {
            Err(Error::NonFinite { row, feature }) => {
                assert_eq!(row, 1);
                assert_eq!(feature, "b");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn empty_rows_rejected() {
        assert!(bin_features(&FeatureSchema::anonymous(1), &[], 16).is_err());
    }

    #[test]
    fn unseen_values_route_consistently() {
        let (s, rows) = one_feature(&[1.0, 2.0, 3.0]);
        let m = BinMapper::fit(&s, &rows, 512).unwrap();
        assert_eq!(m.bin_of(0, -10.0), 0);
        assert_eq!(m.bin_of(0, 1.5), 0);
        assert_eq!(m.bin_of(0, 1.6), 1);
        assert_eq!(m.bin_of(0, 99.0), 2);
    }

    proptest! {
        #[test]
        fn binning_is_monotone(
            values in prop::collection::vec(-1e6f64..1e6, 1..400),
            max_bin in 2usize..64,
        ) {
            let (s, rows) = one_feature(&values);
            let ds = bin_features(&s, &rows, max_bin).unwrap();
            prop_assert!(ds.mapper().num_bins(0) <= max_bin);
            for i in 0..values.len() {
                for j in 0..values.len() {
                    if values[i] < values[j] {
                        prop_assert!(ds.bin(i, 0) <= ds.bin(j, 0));
                    }
                }
                // Threshold routing agrees with bin order.
                let b = ds.bin(i, 0) as usize;
                prop_assert!(values[i] <= ds.mapper().upper_bounds(0)[b]);
                if b > 0 {
                    prop_assert!(values[i] > ds.mapper().upper_bounds(0)[b - 1]);
                }
            }
        }
    }
}
