//! Comparison methods: batch fuzzy c-means and plain SOM / LVQ classifiers
//! trained with the conventional rules.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{FcmConfig, LvqTrainConfig, SomTrainConfig};
use crate::data::PreparedSplit;
use crate::error::{Error, Result};
use crate::eval;
use crate::lvq::LabeledCodebook;
use crate::schedule::{RateMode, RateState};
use crate::som::{Codebook, NeighborhoodConfig, SomRule};

/// Error rates plus the check-set confusion matrix of one classifier run.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassifierOutcome {
    pub train_error: f64,
    pub check_error: f64,
    /// Rows are true classes, columns predicted classes, check split only.
    pub confusion: Vec<Vec<u64>>,
}

/// Fitted fuzzy c-means model. Centers live in the standardized feature
/// space, not on the sphere.
#[derive(Debug, Clone, PartialEq)]
pub struct FcmModel {
    pub centers: Vec<Vec<f64>>,
    pub fuzzifier: f64,
    /// N x c membership matrix; every row sums to one.
    pub partition: Vec<Vec<f64>>,
    /// Objective value after each iteration; non-increasing.
    pub objective_trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

const SINGULAR_DISTANCE: f64 = 1e-24;

/// Membership of one point over the centers: inverse-distance weighting with
/// the fuzzifier exponent. Points sitting on a center get crisp membership.
pub fn fcm_memberships(point: &[f64], centers: &[Vec<f64>], fuzzifier: f64) -> Vec<f64> {
    let d2: Vec<f64> = centers.iter().map(|c| squared_distance(point, c)).collect();
    if let Some(hit) = d2.iter().position(|&d| d < SINGULAR_DISTANCE) {
        let mut crisp = vec![0.0; centers.len()];
        crisp[hit] = 1.0;
        return crisp;
    }
    let power = 1.0 / (fuzzifier - 1.0);
    d2.iter()
        .map(|&dj| 1.0 / d2.iter().map(|&dk| (dj / dk).powf(power)).sum::<f64>())
        .collect()
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let d = x - y;
            d * d
        })
        .sum()
}

fn fcm_objective(data: &[Vec<f64>], partition: &[Vec<f64>], centers: &[Vec<f64>], m: f64) -> f64 {
    let mut j = 0.0;
    for (x, row) in data.iter().zip(partition) {
        for (u, c) in row.iter().zip(centers) {
            j += u.powf(m) * squared_distance(x, c);
        }
    }
    j
}

fn fcm_centers(data: &[Vec<f64>], partition: &[Vec<f64>], c: usize, m: f64, previous: Option<&[Vec<f64>]>) -> Vec<Vec<f64>> {
    let dim = data[0].len();
    let mut numerators = vec![vec![0.0; dim]; c];
    let mut denominators = vec![0.0; c];
    for (x, row) in data.iter().zip(partition) {
        for (j, u) in row.iter().enumerate() {
            let w = u.powf(m);
            denominators[j] += w;
            for (n, v) in numerators[j].iter_mut().zip(x) {
                *n += w * v;
            }
        }
    }
    numerators
        .into_iter()
        .zip(denominators)
        .enumerate()
        .map(|(j, (num, den))| {
            if den < 1e-300 {
                // Cluster lost all membership; hold its previous position.
                previous.map_or_else(|| vec![0.0; dim], |p| p[j].clone())
            } else {
                num.into_iter().map(|v| v / den).collect()
            }
        })
        .collect()
}

/// Batch fuzzy c-means by alternating optimization. Stops when the largest
/// center shift drops below `tol` or after `max_iter` iterations.
pub fn fcm_fit(
    data: &[Vec<f64>],
    c: usize,
    fuzzifier: f64,
    tol: f64,
    max_iter: usize,
    seed: u64,
) -> Result<FcmModel> {
    if data.is_empty() {
        return Err(Error::EmptyInput);
    }
    if c == 0 || c > data.len() {
        return Err(Error::InvalidParameter {
            name: "c",
            message: format!("cluster count must lie in 1..={}, got {c}", data.len()),
        });
    }
    if !(fuzzifier > 1.0) {
        return Err(Error::InvalidParameter {
            name: "fuzzifier",
            message: format!("fuzzifier must exceed 1, got {fuzzifier}"),
        });
    }
    if !(tol > 0.0) || max_iter == 0 {
        return Err(Error::InvalidParameter {
            name: "tol",
            message: "tolerance must be positive and max_iter at least 1".into(),
        });
    }
    let dim = data[0].len();
    for row in data {
        if row.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: row.len(),
            });
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut partition: Vec<Vec<f64>> = (0..data.len())
        .map(|_| {
            let raw: Vec<f64> = (0..c).map(|_| rng.random_range(1e-6..1.0)).collect();
            let sum: f64 = raw.iter().sum();
            raw.into_iter().map(|v| v / sum).collect()
        })
        .collect();
    let mut centers = fcm_centers(data, &partition, c, fuzzifier, None);

    let mut trace = Vec::new();
    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iter {
        partition = data
            .iter()
            .map(|x| fcm_memberships(x, &centers, fuzzifier))
            .collect();
        trace.push(fcm_objective(data, &partition, &centers, fuzzifier));
        let next = fcm_centers(data, &partition, c, fuzzifier, Some(&centers));
        let shift = centers
            .iter()
            .zip(&next)
            .map(|(a, b)| squared_distance(a, b).sqrt())
            .fold(0.0, f64::max);
        centers = next;
        iterations += 1;
        if shift < tol {
            converged = true;
            break;
        }
    }
    // Leave the partition consistent with the final centers.
    partition = data
        .iter()
        .map(|x| fcm_memberships(x, &centers, fuzzifier))
        .collect();
    trace.push(fcm_objective(data, &partition, &centers, fuzzifier));

    Ok(FcmModel {
        centers,
        fuzzifier,
        partition,
        objective_trace: trace,
        iterations,
        converged,
    })
}

fn argmax(row: &[f64]) -> usize {
    let mut best = 0;
    for (j, &v) in row.iter().enumerate() {
        if v > row[best] {
            best = j;
        }
    }
    best
}

/// Trains an unsupervised codebook on the train split, maps neurons to
/// classes by agreement with the labeled train rows, and scores both splits
/// by the §-style misclassification percentage.
pub fn baseline_som_classifier(
    train: &PreparedSplit,
    check: &PreparedSplit,
    cfg: &SomTrainConfig,
    seed: u64,
) -> Result<ClassifierOutcome> {
    if train.sphere.is_empty() {
        return Err(Error::EmptyInput);
    }
    if cfg.rate_mode == RateMode::PerNeuron && cfg.rule == SomRule::Instar {
        return Err(Error::InvalidParameter {
            name: "rate_mode",
            message: "per_neuron rates need a winner; the instar rule declares none".into(),
        });
    }
    if !(0.0..=1.0).contains(&cfg.sigma_decay) || cfg.sigma_decay <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "sigma_decay",
            message: format!("must lie in (0, 1], got {}", cfg.sigma_decay),
        });
    }
    let dim = train.sphere[0].dim();
    let m = cfg.m.unwrap_or(train.n_classes.max(1));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cb = Codebook::random(m, dim, &mut rng)?;
    let mut rate = RateState::new(cfg.alpha)?;
    let mut sigma = cfg.sigma;

    for _ in 0..cfg.epochs {
        for x in &train.sphere {
            let winner = cb.find_winner(x)?;
            let shared = rate.step();
            let eta = match cfg.rate_mode {
                RateMode::Shared => shared,
                RateMode::PerNeuron => 1.0 / (cb.win_counts()[winner] + 1) as f64,
            };
            match cfg.rule {
                SomRule::Wta => {
                    cb.update_wta(x, eta)?;
                }
                SomRule::Wtm => {
                    cb.update_wtm(x, eta, &NeighborhoodConfig::new(sigma)?)?;
                }
                SomRule::Instar => cb.update_instar(x, eta)?,
            }
            sigma *= cfg.sigma_decay;
        }
    }

    let map = align_codebook(&cb, train)?;
    let predict = |split: &PreparedSplit| -> Result<Vec<usize>> {
        split
            .sphere
            .iter()
            .map(|x| Ok(map[cb.find_winner(x)?]))
            .collect()
    };
    score(predict(train)?, predict(check)?, train, check)
}

/// Cluster-to-class map for an unsupervised codebook, from the labeled train
/// rows.
fn align_codebook(cb: &Codebook, train: &PreparedSplit) -> Result<Vec<usize>> {
    let mut clusters = Vec::new();
    let mut truth = Vec::new();
    for (x, label) in train.sphere.iter().zip(&train.labels) {
        if let Some(l) = label {
            clusters.push(cb.find_winner(x)?);
            truth.push(*l);
        }
    }
    eval::align(&clusters, &truth, cb.len(), train.n_classes)
}

/// Trains a labeled codebook on the labeled train rows with the fixed-rate
/// attract/repel rule and predicts by winner label.
pub fn baseline_lvq_classifier(
    train: &PreparedSplit,
    check: &PreparedSplit,
    cfg: &LvqTrainConfig,
    seed: u64,
) -> Result<ClassifierOutcome> {
    if train.sphere.is_empty() {
        return Err(Error::EmptyInput);
    }
    let labeled = train.labeled_rows();
    if labeled.is_empty() || train.n_classes == 0 {
        return Err(Error::InvalidParameter {
            name: "labels",
            message: "the supervised baseline needs labeled training rows".into(),
        });
    }
    let dim = train.sphere[0].dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cb = LabeledCodebook::seeded(
        dim,
        train.n_classes,
        cfg.prototypes_per_class,
        &train.sphere,
        &train.labels,
        &mut rng,
    )?;
    let mut rate = RateState::new(cfg.alpha)?;

    for _ in 0..cfg.epochs {
        for &i in &labeled {
            let x = &train.sphere[i];
            let label = train.labels[i].expect("row is labeled");
            let winner = cb.find_winner(x)?;
            let shared = rate.step();
            let eta = match cfg.rate_mode {
                RateMode::Shared => shared,
                RateMode::PerNeuron => {
                    1.0 / (cb.codebook().win_counts()[winner] + 1) as f64
                }
            };
            cb.update_lvq(x, label, eta)?;
        }
    }

    let predict = |split: &PreparedSplit| -> Result<Vec<usize>> {
        split
            .sphere
            .iter()
            .map(|x| Ok(cb.label(cb.find_winner(x)?)))
            .collect()
    };
    score(predict(train)?, predict(check)?, train, check)
}

/// Fits fuzzy c-means in the standardized feature space, aligns clusters to
/// classes with the labeled train rows, and scores both splits.
pub fn fcm_classifier(
    train: &PreparedSplit,
    check: &PreparedSplit,
    cfg: &FcmConfig,
    seed: u64,
) -> Result<(ClassifierOutcome, FcmModel)> {
    let c = cfg.clusters.unwrap_or(train.n_classes.max(1));
    let model = fcm_fit(
        &train.standardized,
        c,
        cfg.fuzzifier,
        cfg.tol,
        cfg.max_iter,
        seed,
    )?;

    let train_clusters: Vec<usize> = model.partition.iter().map(|row| argmax(row)).collect();
    let mut labeled_clusters = Vec::new();
    let mut truth = Vec::new();
    for (i, label) in train.labels.iter().enumerate() {
        if let Some(l) = label {
            labeled_clusters.push(train_clusters[i]);
            truth.push(*l);
        }
    }
    let map = eval::align(&labeled_clusters, &truth, c, train.n_classes)?;

    let train_pred: Vec<usize> = train_clusters.iter().map(|&j| map[j]).collect();
    let check_pred: Vec<usize> = check
        .standardized
        .iter()
        .map(|x| map[argmax(&fcm_memberships(x, &model.centers, model.fuzzifier))])
        .collect();
    let outcome = score(train_pred, check_pred, train, check)?;
    Ok((outcome, model))
}

fn score(
    train_pred: Vec<usize>,
    check_pred: Vec<usize>,
    train: &PreparedSplit,
    check: &PreparedSplit,
) -> Result<ClassifierOutcome> {
    let filter = |pred: &[usize], split: &PreparedSplit| -> (Vec<usize>, Vec<usize>) {
        let mut p = Vec::new();
        let mut t = Vec::new();
        for (i, label) in split.labels.iter().enumerate() {
            if let Some(l) = label {
                p.push(pred[i]);
                t.push(*l);
            }
        }
        (p, t)
    };
    let (tp, tt) = filter(&train_pred, train);
    let (cp, ct) = filter(&check_pred, check);
    Ok(ClassifierOutcome {
        train_error: eval::misclassification_rate(&tp, &tt)?,
        check_error: eval::misclassification_rate(&cp, &ct)?,
        confusion: eval::confusion_matrix(&cp, &ct, train.n_classes),
    })
}
