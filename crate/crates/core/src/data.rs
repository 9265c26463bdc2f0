//! Dataset ingestion and preparation: object-properties CSV loading,
//! standardize-then-normalize preprocessing onto the unit sphere, seeded
//! stratified splitting, and a seeded generator for overlapping clusters.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::geometry::UnitVector;

/// An object-properties table: `N` rows of `n` numeric features, each row
/// optionally carrying a class label.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub features: Vec<Vec<f64>>,
    pub labels: Vec<Option<String>>,
    pub feature_names: Vec<String>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.feature_names.len()
    }

    /// Fraction of rows that carry a label.
    pub fn label_coverage(&self) -> f64 {
        if self.labels.is_empty() {
            return 0.0;
        }
        self.labels.iter().filter(|l| l.is_some()).count() as f64 / self.labels.len() as f64
    }

    /// Sorted distinct labels; the position of a label in this list is its
    /// class id everywhere downstream.
    pub fn class_vocabulary(&self) -> Vec<String> {
        let mut names: Vec<String> = self.labels.iter().flatten().cloned().collect();
        names.sort();
        names.dedup();
        names
    }

    /// Per-row class ids under the given vocabulary.
    pub fn label_ids(&self, vocabulary: &[String]) -> Result<Vec<Option<usize>>> {
        self.labels
            .iter()
            .map(|l| match l {
                None => Ok(None),
                Some(name) => vocabulary
                    .iter()
                    .position(|v| v == name)
                    .map(Some)
                    .ok_or_else(|| Error::UnknownLabel {
                        label: name.clone(),
                    }),
            })
            .collect()
    }
}

/// Reads a comma-separated file with a header row. `label_column` names the
/// column holding class labels; empty cells there mean "unlabeled". Every
/// other column must parse as a finite number.
pub fn load_csv<P: AsRef<Path>>(path: P, label_column: Option<&str>) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path.as_ref())?;
    let headers: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    let label_idx = match label_column {
        Some(name) => Some(headers.iter().position(|h| h == name).ok_or_else(|| {
            Error::Parse {
                line: 1,
                column: name.to_string(),
                message: "label column not found in header".into(),
            }
        })?),
        None => None,
    };
    let feature_names: Vec<String> = headers
        .iter()
        .enumerate()
        .filter(|(i, _)| Some(*i) != label_idx)
        .map(|(_, h)| h.clone())
        .collect();
    if feature_names.is_empty() {
        return Err(Error::Parse {
            line: 1,
            column: String::new(),
            message: "no feature columns in header".into(),
        });
    }

    let mut features = Vec::new();
    let mut labels = Vec::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        let mut row = Vec::with_capacity(feature_names.len());
        let mut label = None;
        for (i, cell) in record.iter().enumerate() {
            if Some(i) == label_idx {
                if !cell.is_empty() {
                    label = Some(cell.to_string());
                }
                continue;
            }
            let value: f64 = cell.parse().map_err(|_| Error::Parse {
                line,
                column: headers[i].clone(),
                message: format!("cannot parse {cell:?} as a number"),
            })?;
            if !value.is_finite() {
                return Err(Error::Parse {
                    line,
                    column: headers[i].clone(),
                    message: format!("non-finite value {cell:?} rejected"),
                });
            }
            row.push(value);
        }
        if row.len() != feature_names.len() {
            return Err(Error::Parse {
                line,
                column: String::new(),
                message: format!(
                    "expected {} feature cells, found {}",
                    feature_names.len(),
                    row.len()
                ),
            });
        }
        features.push(row);
        labels.push(label);
    }
    if features.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(Dataset {
        features,
        labels,
        feature_names,
    })
}

/// Writes a dataset back out in the same dialect `load_csv` reads. The label
/// column is appended last, with empty cells for unlabeled rows.
pub fn write_csv<P: AsRef<Path>>(ds: &Dataset, label_column: &str, path: P) -> Result<()> {
    let mut writer = csv::Writer::from_path(path.as_ref())?;
    let mut header: Vec<String> = ds.feature_names.clone();
    header.push(label_column.to_string());
    writer.write_record(&header)?;
    for (row, label) in ds.features.iter().zip(&ds.labels) {
        let mut record: Vec<String> = row.iter().map(f64::to_string).collect();
        record.push(label.clone().unwrap_or_default());
        writer.write_record(&record)?;
    }
    writer.flush()?;
    Ok(())
}

/// Per-feature mean and standard deviation taken from a training set.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardization {
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
}

impl Standardization {
    /// Identity transform (used when standardization is switched off).
    pub fn identity(dim: usize) -> Self {
        Standardization {
            means: vec![0.0; dim],
            stds: vec![1.0; dim],
        }
    }

    pub fn fit(features: &[Vec<f64>]) -> Result<Self> {
        if features.is_empty() {
            return Err(Error::EmptyInput);
        }
        let n = features.len() as f64;
        let dim = features[0].len();
        let mut means = vec![0.0; dim];
        for row in features {
            for (m, v) in means.iter_mut().zip(row) {
                *m += v / n;
            }
        }
        let mut stds = vec![0.0; dim];
        for row in features {
            for ((s, v), m) in stds.iter_mut().zip(row).zip(&means) {
                let d = v - m;
                *s += d * d / n;
            }
        }
        for (i, s) in stds.iter_mut().enumerate() {
            *s = s.sqrt();
            if *s < 1e-12 {
                log::warn!("feature {i} is constant in the training set; std set to 1");
                *s = 1.0;
            }
        }
        Ok(Standardization { means, stds })
    }

    pub fn apply(&self, row: &[f64]) -> Result<Vec<f64>> {
        if row.len() != self.means.len() {
            return Err(Error::DimensionMismatch {
                expected: self.means.len(),
                got: row.len(),
            });
        }
        Ok(row
            .iter()
            .zip(&self.means)
            .zip(&self.stds)
            .map(|((v, m), s)| (v - m) / s)
            .collect())
    }

    /// Writes the statistics as a two-row CSV (`stat` column holds
    /// `mean`/`std`) so they can be audited and fed back to later runs.
    pub fn write_csv<P: AsRef<Path>>(&self, feature_names: &[String], path: P) -> Result<()> {
        let file = std::fs::File::create(path.as_ref())?;
        let mut w = std::io::BufWriter::new(file);
        writeln!(w, "{},stat", feature_names.join(","))?;
        let fmt = |vals: &[f64]| {
            vals.iter()
                .map(f64::to_string)
                .collect::<Vec<_>>()
                .join(",")
        };
        writeln!(w, "{},mean", fmt(&self.means))?;
        writeln!(w, "{},std", fmt(&self.stds))?;
        w.flush()?;
        Ok(())
    }

    /// Reads statistics written by [`Standardization::write_csv`].
    pub fn read_csv<P: AsRef<Path>>(path: P) -> Result<(Vec<String>, Self)> {
        let ds = load_csv(path, Some("stat"))?;
        let find = |name: &str| -> Result<Vec<f64>> {
            ds.labels
                .iter()
                .position(|l| l.as_deref() == Some(name))
                .map(|i| ds.features[i].clone())
                .ok_or_else(|| Error::Parse {
                    line: 0,
                    column: "stat".into(),
                    message: format!("missing {name} row"),
                })
        };
        let means = find("mean")?;
        let stds = find("std")?;
        if stds.iter().any(|&s| s <= 0.0) {
            return Err(Error::InvalidParameter {
                name: "stds",
                message: "standard deviations must be positive".into(),
            });
        }
        Ok((ds.feature_names.clone(), Standardization { means, stds }))
    }
}

/// Z-scores each row with training statistics (computed here unless given),
/// then projects it onto the unit sphere. Rows that coincide with the
/// training mean get a deterministic 1e-6 jitter on the first feature so
/// they can still be normalized.
pub fn preprocess(
    ds: &Dataset,
    stats: Option<&Standardization>,
    standardize: bool,
) -> Result<(Vec<UnitVector>, Standardization)> {
    let stats = match (standardize, stats) {
        (false, _) => Standardization::identity(ds.dim()),
        (true, Some(s)) => s.clone(),
        (true, None) => Standardization::fit(&ds.features)?,
    };
    let mut sphere = Vec::with_capacity(ds.len());
    for (i, row) in ds.features.iter().enumerate() {
        let mut z = stats.apply(row)?;
        let u = match UnitVector::new(z.clone()) {
            Ok(u) => u,
            Err(Error::ZeroVector) => {
                log::warn!("row {i} coincides with the training mean; applying 1e-6 jitter");
                z[0] += 1e-6;
                UnitVector::new(z)?
            }
            Err(e) => return Err(e),
        };
        sphere.push(u);
    }
    Ok((sphere, stats))
}

/// Seeded train/check split, stratified by label. Unlabeled rows form their
/// own stratum. If any class has fewer than two members the split falls back
/// to unstratified with a warning. Row order within each part follows the
/// input order.
pub fn split(ds: &Dataset, check_fraction: f64, seed: u64) -> Result<(Dataset, Dataset)> {
    if !(0.0..1.0).contains(&check_fraction) || check_fraction <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "check_fraction",
            message: format!("must lie strictly between 0 and 1, got {check_fraction}"),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // Group row indices: one stratum per label (sorted), unlabeled last.
    let mut strata: BTreeMap<Option<&str>, Vec<usize>> = BTreeMap::new();
    for (i, l) in ds.labels.iter().enumerate() {
        strata.entry(l.as_deref()).or_default().push(i);
    }
    let too_small = strata
        .iter()
        .any(|(label, rows)| label.is_some() && rows.len() < 2);
    let groups: Vec<Vec<usize>> = if too_small {
        log::warn!("a labeled class has fewer than 2 members; falling back to unstratified split");
        vec![(0..ds.len()).collect()]
    } else {
        let mut labeled: Vec<(&str, Vec<usize>)> = Vec::new();
        let mut unlabeled = Vec::new();
        for (label, rows) in strata {
            match label {
                Some(name) => labeled.push((name, rows)),
                None => unlabeled = rows,
            }
        }
        labeled.sort_by(|a, b| a.0.cmp(b.0));
        let mut gs: Vec<Vec<usize>> = labeled.into_iter().map(|(_, rows)| rows).collect();
        if !unlabeled.is_empty() {
            gs.push(unlabeled);
        }
        gs
    };

    let mut check_rows = Vec::new();
    for mut group in groups {
        let n_check = (check_fraction * group.len() as f64 + 0.5).floor() as usize;
        group.shuffle(&mut rng);
        check_rows.extend(group.into_iter().take(n_check));
    }
    check_rows.sort_unstable();

    let take = |rows: &[usize]| Dataset {
        features: rows.iter().map(|&i| ds.features[i].clone()).collect(),
        labels: rows.iter().map(|&i| ds.labels[i].clone()).collect(),
        feature_names: ds.feature_names.clone(),
    };
    let train_rows: Vec<usize> = (0..ds.len()).filter(|i| !check_rows.contains(i)).collect();
    Ok((take(&train_rows), take(&check_rows)))
}

/// Minimum pairwise angle between generated class centers, in cosine terms.
const CENTER_COSINE_CAP: f64 = 0.5;
const CENTER_ATTEMPTS: usize = 1000;

/// Generates `classes * per_class` rows around well-separated unit centers.
/// `overlap` scales isotropic noise (0 puts every sample exactly on its
/// center), and exactly `floor(label_fraction * N)` rows keep their labels.
/// Rows come out in a seeded shuffled order.
pub fn gen_synthetic(
    classes: usize,
    per_class: usize,
    dim: usize,
    overlap: f64,
    label_fraction: f64,
    seed: u64,
) -> Result<Dataset> {
    if classes == 0 || per_class == 0 || dim == 0 {
        return Err(Error::EmptyInput);
    }
    if !(0.0..=1.0).contains(&overlap) {
        return Err(Error::InvalidParameter {
            name: "overlap",
            message: format!("must lie in [0, 1], got {overlap}"),
        });
    }
    if !(0.0..=1.0).contains(&label_fraction) {
        return Err(Error::InvalidParameter {
            name: "label_fraction",
            message: format!("must lie in [0, 1], got {label_fraction}"),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let centers = place_centers(classes, dim, &mut rng)?;
    // Per-coordinate noise std, relative to the unit radius. The midpoint
    // between two minimally spaced centers lies 0.5 away, so overlap near 1
    // confuses neighboring classes badly while 0.1 keeps them separable.
    let sigma = overlap;
    let mut rows: Vec<(Vec<f64>, Option<String>)> = Vec::with_capacity(classes * per_class);
    for (c, center) in centers.iter().enumerate() {
        let label = format!("c{c}");
        for _ in 0..per_class {
            let sample = if overlap == 0.0 {
                center.components().to_vec()
            } else {
                let noisy: Vec<f64> = center
                    .components()
                    .iter()
                    .map(|v| v + sigma * rng.sample::<f64, _>(StandardNormal))
                    .collect();
                UnitVector::new(noisy)?.components().to_vec()
            };
            rows.push((sample, Some(label.clone())));
        }
    }
    rows.shuffle(&mut rng);

    // Keep labels on a seeded subset of exactly floor(label_fraction * N) rows.
    let n = rows.len();
    let keep = (label_fraction * n as f64).floor() as usize;
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut keep_label = vec![false; n];
    for &i in order.iter().take(keep) {
        keep_label[i] = true;
    }
    let mut features = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for (i, (row, label)) in rows.into_iter().enumerate() {
        features.push(row);
        labels.push(if keep_label[i] { label } else { None });
    }
    Ok(Dataset {
        features,
        labels,
        feature_names: (0..dim).map(|i| format!("f{i}")).collect(),
    })
}

fn place_centers<R: Rng>(classes: usize, dim: usize, rng: &mut R) -> Result<Vec<UnitVector>> {
    'attempts: for _ in 0..CENTER_ATTEMPTS {
        let mut centers: Vec<UnitVector> = Vec::with_capacity(classes);
        for _ in 0..classes {
            let mut placed = false;
            for _ in 0..200 {
                let v: Vec<f64> = (0..dim)
                    .map(|_| rng.sample::<f64, _>(StandardNormal))
                    .collect();
                let candidate = match UnitVector::new(v) {
                    Ok(u) => u,
                    Err(_) => continue,
                };
                let spaced = centers.iter().all(|existing| {
                    crate::geometry::activation(existing, &candidate)
                        .map(|cos| cos <= CENTER_COSINE_CAP)
                        .unwrap_or(false)
                });
                if spaced {
                    centers.push(candidate);
                    placed = true;
                    break;
                }
            }
            if !placed {
                continue 'attempts;
            }
        }
        return Ok(centers);
    }
    Err(Error::SpacingInfeasible { classes, dim })
}

/// One side of a train/check pair, fully prepared for the learners: sphere
/// samples, the standardized (pre-sphere) features, and class ids.
#[derive(Debug, Clone)]
pub struct PreparedSplit {
    pub sphere: Vec<UnitVector>,
    pub standardized: Vec<Vec<f64>>,
    pub labels: Vec<Option<usize>>,
    pub n_classes: usize,
}

impl PreparedSplit {
    /// Indices of rows that carry a label.
    pub fn labeled_rows(&self) -> Vec<usize> {
        (0..self.labels.len())
            .filter(|&i| self.labels[i].is_some())
            .collect()
    }
}

/// Prepares a train/check pair with shared vocabulary and train-set
/// statistics applied to both sides.
pub fn prepare_splits(
    train: &Dataset,
    check: &Dataset,
    standardize: bool,
) -> Result<(PreparedSplit, PreparedSplit, Standardization, Vec<String>)> {
    let mut vocabulary = train.class_vocabulary();
    for name in check.class_vocabulary() {
        if !vocabulary.contains(&name) {
            vocabulary.push(name);
        }
    }
    vocabulary.sort();

    let (train_sphere, stats) = preprocess(train, None, standardize)?;
    let (check_sphere, _) = preprocess(check, Some(&stats), standardize)?;
    let standardized = |ds: &Dataset| -> Result<Vec<Vec<f64>>> {
        ds.features.iter().map(|r| stats.apply(r)).collect()
    };
    let n_classes = vocabulary.len();
    let prepared_train = PreparedSplit {
        sphere: train_sphere,
        standardized: standardized(train)?,
        labels: train.label_ids(&vocabulary)?,
        n_classes,
    };
    let prepared_check = PreparedSplit {
        sphere: check_sphere,
        standardized: standardized(check)?,
        labels: check.label_ids(&vocabulary)?,
        n_classes,
    };
    Ok((prepared_train, prepared_check, stats, vocabulary))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry;

    fn write_temp(contents: &str) -> std::path::PathBuf {
        use std::sync::atomic::{AtomicU64, Ordering};
        static COUNTER: AtomicU64 = AtomicU64::new(0);
        let id = COUNTER.fetch_add(1, Ordering::Relaxed);
        let path = std::env::temp_dir().join(format!(
            "hybridsom-data-test-{}-{id}.csv",
            std::process::id()
        ));
        std::fs::write(&path, contents).unwrap();
        path
    }

    #[test]
    fn loads_features_and_optional_labels() {
        let path = write_temp("a,b,label\n1,2,x\n3,4,\n5,6,y\n");
        let ds = load_csv(&path, Some("label")).unwrap();
        assert_eq!(ds.len(), 3);
        assert_eq!(ds.dim(), 2);
        assert_eq!(ds.features[1], vec![3.0, 4.0]);
        assert_eq!(ds.labels, vec![Some("x".into()), None, Some("y".into())]);
        assert!((ds.label_coverage() - 2.0 / 3.0).abs() < 1e-12);
        std::fs::remove_file(path).ok();
    }

    #[test]
    fn loads_a_single_unlabeled_row() {
        let path = write_temp("a,b\n1.5,2.5\n");
        let ds = load_csv(&path, None).unwrap();
        assert_eq!(ds.len(), 1);
        assert_eq!(ds.labels, vec![None]);
        std::fs::remove_file(path).ok();
    }

    #[test]
    fn parse_error_names_the_cell() {
        let path = write_temp("a,b,label\n1,abc,x\n");
        let err = load_csv(&path, Some("label")).unwrap_err();
        match err {
            Error::Parse { line, column, .. } => {
                assert_eq!(line, 2);
                assert_eq!(column, "b");
            }
            other => panic!("unexpected error {other:?}"),
        }
        std::fs::remove_file(path).ok();
    }

    #[test]
    fn non_finite_values_are_rejected() {
        let path = write_temp("a,b\n1,nan\n");
        assert!(matches!(load_csv(&path, None), Err(Error::Parse { .. })));
        std::fs::remove_file(path).ok();
    }

    #[test]
    fn csv_round_trips_values_exactly() {
        let ds = Dataset {
            features: vec![vec![0.1, -2.5e-7], vec![3.0, 4.0]],
            labels: vec![Some("a".into()), None],
            feature_names: vec!["f0".into(), "f1".into()],
        };
        let path = write_temp("");
        write_csv(&ds, "label", &path).unwrap();
        let back = load_csv(&path, Some("label")).unwrap();
        assert_eq!(ds, back);
        std::fs::remove_file(path).ok();
    }

    #[test]
    fn preprocess_standardizes_then_normalizes() {
        // Training mean (0,0), std (1,1): standardization is the identity and
        // the row lands on the sphere directly.
        let ds = Dataset {
            features: vec![vec![3.0, 4.0], vec![-3.0, -4.0]],
            labels: vec![None, None],
            feature_names: vec!["a".into(), "b".into()],
        };
        let stats = Standardization::identity(2);
        let (sphere, _) = preprocess(&ds, Some(&stats), true).unwrap();
        assert_eq!(sphere[0].components(), &[0.6, 0.8]);
    }

    #[test]
    fn preprocess_reuses_training_statistics() {
        let train = Dataset {
            features: vec![vec![0.0, 1.0], vec![2.0, 3.0], vec![4.0, 11.0]],
            labels: vec![None, None, None],
            feature_names: vec!["a".into(), "b".into()],
        };
        let check = Dataset {
            features: vec![vec![1.0, 2.0]],
            labels: vec![None],
            feature_names: train.feature_names.clone(),
        };
        let (_, stats) = preprocess(&train, None, true).unwrap();
        let (a, _) = preprocess(&check, Some(&stats), true).unwrap();
        let (b, _) = preprocess(&check, Some(&stats), true).unwrap();
        assert_eq!(a, b);
        // And they differ from the check set's own statistics.
        let (own, _) = preprocess(&check, None, true).unwrap();
        assert_ne!(a, own);
    }

    #[test]
    fn mean_coincident_row_is_jittered_not_dropped() {
        let train = Dataset {
            features: vec![vec![1.0, 1.0], vec![3.0, 3.0]],
            labels: vec![None, None],
            feature_names: vec!["a".into(), "b".into()],
        };
        let (_, stats) = preprocess(&train, None, true).unwrap();
        let check = Dataset {
            features: vec![vec![2.0, 2.0]], // exactly the training mean
            labels: vec![None],
            feature_names: train.feature_names.clone(),
        };
        let (sphere, _) = preprocess(&check, Some(&stats), true).unwrap();
        assert_eq!(sphere.len(), 1);
        assert!((geometry::norm(sphere[0].components()) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn split_40_rows_at_quarter_gives_30_10() {
        let ds = gen_synthetic(2, 20, 3, 0.2, 1.0, 7).unwrap();
        let (train, check) = split(&ds, 0.25, 1).unwrap();
        assert_eq!(train.len(), 30);
        assert_eq!(check.len(), 10);
    }

    #[test]
    fn split_is_deterministic_and_a_partition() {
        let ds = gen_synthetic(3, 15, 4, 0.4, 0.5, 3).unwrap();
        let (t1, c1) = split(&ds, 0.3, 9).unwrap();
        let (t2, c2) = split(&ds, 0.3, 9).unwrap();
        assert_eq!(t1, t2);
        assert_eq!(c1, c2);
        assert_eq!(t1.len() + c1.len(), ds.len());
        // Multiset equality: every row appears exactly once across the parts.
        let mut all: Vec<&Vec<f64>> = t1.features.iter().chain(&c1.features).collect();
        let mut orig: Vec<&Vec<f64>> = ds.features.iter().collect();
        let key = |r: &&Vec<f64>| format!("{r:?}");
        all.sort_by_key(key);
        orig.sort_by_key(key);
        assert_eq!(all, orig);
    }

    #[test]
    fn split_is_stratified_within_one_sample() {
        let ds = gen_synthetic(2, 30, 3, 0.3, 1.0, 5).unwrap();
        for seed in 0..100 {
            let (_, check) = split(&ds, 0.25, seed).unwrap();
            let mut counts = [0usize; 2];
            for l in check.labels.iter().flatten() {
                counts[if l == "c0" { 0 } else { 1 }] += 1;
            }
            // 30 rows per class, fraction 0.25 -> 7.5 ideal, so 7 or 8.
            for c in counts {
                assert!((7..=8).contains(&c), "seed {seed}: counts {counts:?}");
            }
        }
    }

    #[test]
    fn split_rejects_bad_fraction() {
        let ds = gen_synthetic(2, 5, 2, 0.0, 1.0, 1).unwrap();
        assert!(split(&ds, 0.0, 1).is_err());
        assert!(split(&ds, 1.0, 1).is_err());
    }

    #[test]
    fn zero_overlap_samples_sit_on_their_centers() {
        let ds = gen_synthetic(3, 10, 5, 0.0, 1.0, 11).unwrap();
        let mut per_label: BTreeMap<&str, Vec<&Vec<f64>>> = BTreeMap::new();
        for (row, label) in ds.features.iter().zip(&ds.labels) {
            per_label
                .entry(label.as_deref().unwrap())
                .or_default()
                .push(row);
        }
        assert_eq!(per_label.len(), 3);
        for rows in per_label.values() {
            for r in rows {
                assert_eq!(*r, rows[0]);
            }
        }
    }

    #[test]
    fn label_fraction_controls_exact_label_count() {
        let ds = gen_synthetic(2, 150, 12, 0.3, 0.6, 7).unwrap();
        assert_eq!(ds.len(), 300);
        let labeled = ds.labels.iter().filter(|l| l.is_some()).count();
        assert_eq!(labeled, 180);
        let none = gen_synthetic(2, 10, 4, 0.3, 0.0, 7).unwrap();
        assert!(none.labels.iter().all(Option::is_none));
    }

    #[test]
    fn generator_is_seeded() {
        let a = gen_synthetic(2, 10, 6, 0.4, 0.5, 42).unwrap();
        let b = gen_synthetic(2, 10, 6, 0.4, 0.5, 42).unwrap();
        let c = gen_synthetic(2, 10, 6, 0.4, 0.5, 43).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.features, c.features);
    }

    #[test]
    fn nearest_center_oracle_is_perfect_at_low_overlap() {
        let ds = gen_synthetic(2, 100, 12, 0.1, 1.0, 19).unwrap();
        // Recover the true centers as the per-class means of the sphere rows;
        // classify by nearest center and demand zero errors.
        let (sphere, _) = preprocess(&ds, None, false).unwrap();
        let vocab = ds.class_vocabulary();
        let ids = ds.label_ids(&vocab).unwrap();
        let mut sums = vec![vec![0.0; 12]; 2];
        let mut counts = [0usize; 2];
        for (x, id) in sphere.iter().zip(&ids) {
            let c = id.unwrap();
            counts[c] += 1;
            for (s, v) in sums[c].iter_mut().zip(x.components()) {
                *s += v;
            }
        }
        let centers: Vec<UnitVector> = sums
            .into_iter()
            .map(|s| UnitVector::new(s).unwrap())
            .collect();
        let mut errors = 0;
        for (x, id) in sphere.iter().zip(&ids) {
            let c0 = geometry::activation(&centers[0], x).unwrap();
            let c1 = geometry::activation(&centers[1], x).unwrap();
            let pred = if c0 >= c1 { 0 } else { 1 };
            if pred != id.unwrap() {
                errors += 1;
            }
        }
        assert_eq!(errors, 0);
    }

    #[test]
    fn spacing_is_infeasible_for_many_classes_in_low_dimension() {
        assert!(matches!(
            gen_synthetic(40, 1, 2, 0.1, 1.0, 1),
            Err(Error::SpacingInfeasible { .. })
        ));
    }

    #[test]
    fn prepare_splits_shares_vocabulary_and_stats() {
        let ds = gen_synthetic(2, 30, 5, 0.3, 1.0, 23).unwrap();
        let (train, check) = split(&ds, 0.25, 2).unwrap();
        let (pt, pc, stats, vocab) = prepare_splits(&train, &check, true).unwrap();
        assert_eq!(vocab, vec!["c0".to_string(), "c1".to_string()]);
        assert_eq!(pt.n_classes, 2);
        assert_eq!(pc.n_classes, 2);
        assert_eq!(pt.sphere.len(), train.len());
        assert_eq!(pc.sphere.len(), check.len());
        assert_eq!(stats.means.len(), 5);
        for x in pt.sphere.iter().chain(&pc.sphere) {
            assert!((geometry::norm(x.components()) - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn standardization_stats_round_trip_through_csv() {
        let stats = Standardization {
            means: vec![1.5, -0.25],
            stds: vec![2.0, 0.125],
        };
        let names = vec!["a".to_string(), "b".to_string()];
        let path = write_temp("");
        stats.write_csv(&names, &path).unwrap();
        let (back_names, back) = Standardization::read_csv(&path).unwrap();
        assert_eq!(back_names, names);
        assert_eq!(back, stats);
        std::fs::remove_file(path).ok();
    }
}
