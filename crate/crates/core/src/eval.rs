//! Evaluation: the misclassification percentage, cluster-to-class alignment
//! for unsupervised methods, and the four-method comparison harness.

use crate::baselines::{self, ClassifierOutcome};
use crate::config::CompareConfig;
use crate::data::PreparedSplit;
use crate::error::{Error, Result};
use crate::hybrid;

/// Percentage of samples whose prediction disagrees with the truth.
pub fn misclassification_rate(predicted: &[usize], truth: &[usize]) -> Result<f64> {
    if predicted.is_empty() {
        return Err(Error::EmptyInput);
    }
    if predicted.len() != truth.len() {
        return Err(Error::DimensionMismatch {
            expected: truth.len(),
            got: predicted.len(),
        });
    }
    let wrong = predicted
        .iter()
        .zip(truth)
        .filter(|(p, t)| p != t)
        .count();
    Ok(100.0 * wrong as f64 / predicted.len() as f64)
}

/// Confusion matrix over labeled samples: rows are true classes, columns
/// predicted classes.
pub fn confusion_matrix(predicted: &[usize], truth: &[usize], n_classes: usize) -> Vec<Vec<u64>> {
    let mut matrix = vec![vec![0u64; n_classes]; n_classes];
    for (&p, &t) in predicted.iter().zip(truth) {
        if t < n_classes && p < n_classes {
            matrix[t][p] += 1;
        }
    }
    matrix
}

/// Maximum cluster count for the exhaustive one-to-one alignment.
const EXHAUSTIVE_LIMIT: usize = 8;

/// Maps clusters to classes using labeled samples. With as many clusters as
/// classes (up to eight) the assignment is the one-to-one permutation
/// maximizing agreement; otherwise each cluster takes the majority class of
/// its members. Clusters without labeled members map to the globally most
/// frequent class. All ties resolve to the lowest class id.
pub fn align(
    clusters: &[usize],
    truth: &[usize],
    n_clusters: usize,
    n_classes: usize,
) -> Result<Vec<usize>> {
    if clusters.len() != truth.len() {
        return Err(Error::DimensionMismatch {
            expected: truth.len(),
            got: clusters.len(),
        });
    }
    if n_clusters == 0 || n_classes == 0 {
        return Err(Error::EmptyInput);
    }
    let mut agreement = vec![vec![0u64; n_classes]; n_clusters];
    let mut class_totals = vec![0u64; n_classes];
    for (&j, &t) in clusters.iter().zip(truth) {
        if j >= n_clusters || t >= n_classes {
            return Err(Error::InvalidParameter {
                name: "clusters",
                message: format!("cluster {j} or class {t} out of range"),
            });
        }
        agreement[j][t] += 1;
        class_totals[t] += 1;
    }
    let global_majority = argmax_u64(&class_totals);

    if n_clusters == n_classes && n_clusters <= EXHAUSTIVE_LIMIT {
        let mut best: Option<(u64, Vec<usize>)> = None;
        let mut current = Vec::with_capacity(n_clusters);
        let mut used = vec![false; n_classes];
        search_permutations(&agreement, &mut current, &mut used, &mut best);
        return Ok(best.expect("at least one permutation exists").1);
    }

    Ok(agreement
        .iter()
        .map(|row| {
            if row.iter().all(|&v| v == 0) {
                global_majority
            } else {
                argmax_u64(row)
            }
        })
        .collect())
}

fn argmax_u64(row: &[u64]) -> usize {
    let mut best = 0;
    for (i, &v) in row.iter().enumerate() {
        if v > row[best] {
            best = i;
        }
    }
    best
}

/// Lexicographic depth-first sweep over permutations; strictly better scores
/// win, so ties keep the first (lexicographically smallest) assignment.
fn search_permutations(
    agreement: &[Vec<u64>],
    current: &mut Vec<usize>,
    used: &mut [bool],
    best: &mut Option<(u64, Vec<usize>)>,
) {
    if current.len() == agreement.len() {
        let score: u64 = current
            .iter()
            .enumerate()
            .map(|(cluster, &class)| agreement[cluster][class])
            .sum();
        if best.as_ref().is_none_or(|(s, _)| score > *s) {
            *best = Some((score, current.clone()));
        }
        return;
    }
    for class in 0..used.len() {
        if used[class] {
            continue;
        }
        used[class] = true;
        current.push(class);
        search_permutations(agreement, current, used, best);
        current.pop();
        used[class] = false;
    }
}

/// One (method, seed) evaluation row.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub method: String,
    pub seed: u64,
    pub train_error: f64,
    pub check_error: f64,
    pub confusion: Vec<Vec<u64>>,
    pub config_digest: String,
    pub ok: bool,
}

/// Mean and spread of one method across seeds.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodSummary {
    pub method: String,
    pub mean_train: f64,
    pub std_train: f64,
    pub mean_check: f64,
    pub std_check: f64,
    pub runs: usize,
}

pub const METHODS: [&str; 4] = ["hybrid", "som", "lvq", "fcm"];

/// Runs the hybrid network and the three baselines for every seed. A failing
/// run is recorded with `ok = false` instead of aborting the sweep.
pub fn compare(
    train: &PreparedSplit,
    check: &PreparedSplit,
    cfg: &CompareConfig,
    seeds: &[u64],
) -> Result<(Vec<EvalReport>, Vec<MethodSummary>)> {
    if seeds.is_empty() {
        return Err(Error::EmptyInput);
    }
    if check.labels.iter().all(Option::is_none) {
        return Err(Error::InvalidParameter {
            name: "check",
            message: "the check split carries no labels to score against".into(),
        });
    }
    let digest = config_digest(&cfg.canonical_text());
    let mut reports = Vec::with_capacity(METHODS.len() * seeds.len());
    for method in METHODS {
        for &seed in seeds {
            let outcome = run_method(method, train, check, cfg, seed);
            let report = match outcome {
                Ok(o) => EvalReport {
                    method: method.to_string(),
                    seed,
                    train_error: o.train_error,
                    check_error: o.check_error,
                    confusion: o.confusion,
                    config_digest: digest.clone(),
                    ok: true,
                },
                Err(e) => {
                    log::warn!("{method} failed for seed {seed}: {e}");
                    EvalReport {
                        method: method.to_string(),
                        seed,
                        train_error: f64::NAN,
                        check_error: f64::NAN,
                        confusion: vec![vec![0; train.n_classes]; train.n_classes],
                        config_digest: digest.clone(),
                        ok: false,
                    }
                }
            };
            reports.push(report);
        }
    }
    let summaries = summarize(&reports);
    Ok((reports, summaries))
}

fn run_method(
    method: &str,
    train: &PreparedSplit,
    check: &PreparedSplit,
    cfg: &CompareConfig,
    seed: u64,
) -> Result<ClassifierOutcome> {
    match method {
        "hybrid" => run_hybrid(train, check, cfg, seed),
        "som" => baselines::baseline_som_classifier(train, check, &cfg.som, seed),
        "lvq" => baselines::baseline_lvq_classifier(train, check, &cfg.lvq, seed),
        "fcm" => baselines::fcm_classifier(train, check, &cfg.fcm, seed).map(|(o, _)| o),
        other => Err(Error::InvalidParameter {
            name: "method",
            message: format!("unknown method {other:?}"),
        }),
    }
}

fn run_hybrid(
    train: &PreparedSplit,
    check: &PreparedSplit,
    cfg: &CompareConfig,
    seed: u64,
) -> Result<ClassifierOutcome> {
    let (net, _) = hybrid::train_hybrid(train, &cfg.hybrid, seed)?;
    let predict = |split: &PreparedSplit| -> Result<(Vec<usize>, Vec<usize>)> {
        let mut pred = Vec::new();
        let mut truth = Vec::new();
        for (x, label) in split.sphere.iter().zip(&split.labels) {
            if let Some(t) = label {
                pred.push(net.predict(x)?.class);
                truth.push(*t);
            }
        }
        Ok((pred, truth))
    };
    let (tp, tt) = predict(train)?;
    let (cp, ct) = predict(check)?;
    Ok(ClassifierOutcome {
        train_error: misclassification_rate(&tp, &tt)?,
        check_error: misclassification_rate(&cp, &ct)?,
        confusion: confusion_matrix(&cp, &ct, train.n_classes),
    })
}

fn summarize(reports: &[EvalReport]) -> Vec<MethodSummary> {
    METHODS
        .iter()
        .map(|&method| {
            let rows: Vec<&EvalReport> = reports
                .iter()
                .filter(|r| r.method == method && r.ok)
                .collect();
            let stats = |pick: fn(&EvalReport) -> f64| -> (f64, f64) {
                if rows.is_empty() {
                    return (f64::NAN, f64::NAN);
                }
                let n = rows.len() as f64;
                let mean = rows.iter().map(|r| pick(r)).sum::<f64>() / n;
                let var = rows
                    .iter()
                    .map(|r| {
                        let d = pick(r) - mean;
                        d * d
                    })
                    .sum::<f64>()
                    / n;
                (mean, var.sqrt())
            };
            let (mean_train, std_train) = stats(|r| r.train_error);
            let (mean_check, std_check) = stats(|r| r.check_error);
            MethodSummary {
                method: method.to_string(),
                mean_train,
                std_train,
                mean_check,
                std_check,
                runs: rows.len(),
            }
        })
        .collect()
}

/// 48-bit FNV-1a digest rendered in decimal, small enough to survive a round
/// trip through an f64 CSV cell.
pub fn config_digest(text: &str) -> String {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in text.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    (h >> 16).to_string()
}

/// Renders reports as CSV, one row per report plus flattened confusion
/// counts. The file re-loads through the dataset reader with `method` as the
/// label column.
pub fn reports_to_csv(reports: &[EvalReport], n_classes: usize) -> String {
    let mut out = String::from("method,seed,train_error_percent,check_error_percent,ok,config_digest");
    for t in 0..n_classes {
        for p in 0..n_classes {
            out.push_str(&format!(",conf_{t}_{p}"));
        }
    }
    out.push('\n');
    for r in reports {
        out.push_str(&format!(
            "{},{},{},{},{},{}",
            r.method,
            r.seed,
            r.train_error,
            r.check_error,
            u8::from(r.ok),
            r.config_digest
        ));
        for t in 0..n_classes {
            for p in 0..n_classes {
                let v = r
                    .confusion
                    .get(t)
                    .and_then(|row| row.get(p))
                    .copied()
                    .unwrap_or(0);
                out.push_str(&format!(",{v}"));
            }
        }
        out.push('\n');
    }
    out
}

/// Plain-text comparison table: one row per method, mean +- std errors.
pub fn summary_table(summaries: &[MethodSummary]) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{:<28} {:>20} {:>20}\n",
        "method", "train error %", "check error %"
    ));
    for s in summaries {
        out.push_str(&format!(
            "{:<28} {:>13.2} ± {:<5.2} {:>13.2} ± {:<5.2}\n",
            s.method, s.mean_train, s.std_train, s.mean_check, s.std_check
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{gen_synthetic, prepare_splits, split};

    #[test]
    fn rate_counts_mismatches_as_percent() {
        assert_eq!(misclassification_rate(&[1, 1, 0], &[1, 1, 0]).unwrap(), 0.0);
        assert_eq!(misclassification_rate(&[0, 0], &[1, 1]).unwrap(), 100.0);
        let pred: Vec<usize> = (0..40).map(|i| usize::from(i < 2)).collect();
        let truth = vec![0usize; 40];
        assert_eq!(misclassification_rate(&pred, &truth).unwrap(), 5.0);
        assert!(misclassification_rate(&[], &[]).is_err());
    }

    #[test]
    fn rate_is_invariant_under_consistent_relabeling() {
        let pred = vec![0, 1, 2, 1, 0];
        let truth = vec![0, 1, 1, 1, 2];
        let base = misclassification_rate(&pred, &truth).unwrap();
        let relabel = |v: &[usize]| -> Vec<usize> { v.iter().map(|&x| 2 - x).collect() };
        let swapped = misclassification_rate(&relabel(&pred), &relabel(&truth)).unwrap();
        assert_eq!(base, swapped);
    }

    #[test]
    fn align_recovers_a_permuted_identity() {
        // Clusters are classes, relabeled 0->1, 1->2, 2->0.
        let truth: Vec<usize> = (0..30).map(|i| i % 3).collect();
        let clusters: Vec<usize> = truth.iter().map(|&t| (t + 1) % 3).collect();
        let map = align(&clusters, &truth, 3, 3).unwrap();
        let pred: Vec<usize> = clusters.iter().map(|&j| map[j]).collect();
        assert_eq!(misclassification_rate(&pred, &truth).unwrap(), 0.0);
    }

    #[test]
    fn align_picks_the_best_permutation() {
        // Agreement matrix [[9, 1], [2, 8]]: identity maps 17 of 20 samples.
        let mut clusters = Vec::new();
        let mut truth = Vec::new();
        for (cluster, class, count) in [(0, 0, 9), (0, 1, 1), (1, 0, 2), (1, 1, 8)] {
            for _ in 0..count {
                clusters.push(cluster);
                truth.push(class);
            }
        }
        let map = align(&clusters, &truth, 2, 2).unwrap();
        assert_eq!(map, vec![0, 1]);
        let agreement: usize = clusters
            .iter()
            .zip(&truth)
            .filter(|(j, t)| map[**j] == **t)
            .count();
        assert_eq!(agreement, 17);
        // Exhaustiveness check: the flipped permutation does worse.
        let flipped: usize = clusters
            .iter()
            .zip(&truth)
            .filter(|(j, t)| 1 - map[**j] == **t)
            .count();
        assert!(flipped < agreement);
    }

    #[test]
    fn align_single_cluster_takes_the_majority() {
        let clusters = vec![0, 0, 0, 0];
        let truth = vec![1, 1, 0, 1];
        let map = align(&clusters, &truth, 1, 2).unwrap();
        assert_eq!(map, vec![1]);
    }

    #[test]
    fn align_maps_empty_clusters_to_the_global_majority() {
        // Three clusters, two classes: majority path. Cluster 2 is empty.
        let clusters = vec![0, 0, 1, 1, 1];
        let truth = vec![0, 0, 1, 1, 0];
        let map = align(&clusters, &truth, 3, 2).unwrap();
        assert_eq!(map, vec![0, 1, 0]);
    }

    #[test]
    fn compare_emits_a_report_per_method_seed_plus_summaries() {
        let ds = gen_synthetic(2, 20, 5, 0.2, 1.0, 3).unwrap();
        let (train, check) = split(&ds, 0.25, 3).unwrap();
        let (pt, pc, _, _) = prepare_splits(&train, &check, true).unwrap();
        let cfg = CompareConfig::default();
        let seeds = [1, 2, 3, 4, 5];
        let (reports, summaries) = compare(&pt, &pc, &cfg, &seeds).unwrap();
        assert_eq!(reports.len(), 20);
        assert_eq!(summaries.len(), 4);
        for s in &summaries {
            assert_eq!(s.runs, 5);
        }
        // Determinism: a second sweep reproduces the reports exactly.
        let (again, _) = compare(&pt, &pc, &cfg, &seeds).unwrap();
        assert_eq!(reports, again);
    }

    #[test]
    fn compare_is_near_perfect_on_separable_data() {
        let ds = gen_synthetic(2, 40, 8, 0.0, 1.0, 4).unwrap();
        let (train, check) = split(&ds, 0.25, 4).unwrap();
        let (pt, pc, _, _) = prepare_splits(&train, &check, true).unwrap();
        let (reports, _) = compare(&pt, &pc, &CompareConfig::default(), &[1, 2]).unwrap();
        for r in &reports {
            assert!(r.ok, "{} failed", r.method);
            assert!(
                r.check_error <= 1.0,
                "{} check error {}",
                r.method,
                r.check_error
            );
        }
    }

    #[test]
    fn compare_requires_labeled_check_rows() {
        let ds = gen_synthetic(2, 10, 4, 0.2, 1.0, 5).unwrap();
        let (train, check) = split(&ds, 0.25, 5).unwrap();
        let (pt, mut pc, _, _) = prepare_splits(&train, &check, true).unwrap();
        for l in &mut pc.labels {
            *l = None;
        }
        assert!(compare(&pt, &pc, &CompareConfig::default(), &[1]).is_err());
    }

    #[test]
    fn reports_render_to_csv_with_flattened_confusion() {
        let report = EvalReport {
            method: "hybrid".into(),
            seed: 7,
            train_error: 3.125,
            check_error: 4.5,
            confusion: vec![vec![9, 1], vec![2, 8]],
            config_digest: "12345".into(),
            ok: true,
        };
        let csv = reports_to_csv(&[report], 2);
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "method,seed,train_error_percent,check_error_percent,ok,config_digest,conf_0_0,conf_0_1,conf_1_0,conf_1_1"
        );
        assert_eq!(lines.next().unwrap(), "hybrid,7,3.125,4.5,1,12345,9,1,2,8");
    }

    #[test]
    fn digest_is_stable_and_decimal() {
        let a = config_digest("alpha = 1");
        let b = config_digest("alpha = 1");
        let c = config_digest("alpha = 0.5");
        assert_eq!(a, b);
        assert_ne!(a, c);
        let parsed: u64 = a.parse().unwrap();
        assert!(parsed < (1 << 48));
    }
}
