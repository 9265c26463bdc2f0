//! The combined clustering-classification network: one labeled codebook
//! trained online, switching per sample between a self-learning branch
//! (no label available) and supervised attract/repel branches, with fuzzy
//! membership prediction and a flat-text model format.

use std::io::{BufRead, Write};
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::HybridTrainConfig;
use crate::data::PreparedSplit;
use crate::error::{Error, Result};
use crate::geometry::{self, MembershipVector, UnitVector};
use crate::lvq::{LabeledCodebook, PushbackMode};
use crate::schedule::{RateMode, RateState};
use crate::som::Codebook;

/// Self-learning rule used for unlabeled samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnsupervisedRule {
    Wta,
    Instar,
}

impl std::fmt::Display for UnsupervisedRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            UnsupervisedRule::Wta => "wta",
            UnsupervisedRule::Instar => "instar",
        })
    }
}

impl std::str::FromStr for UnsupervisedRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "wta" => Ok(UnsupervisedRule::Wta),
            "instar" => Ok(UnsupervisedRule::Instar),
            other => Err(Error::InvalidParameter {
                name: "rule",
                message: format!("the hybrid rule must be wta or instar, got {other:?}"),
            }),
        }
    }
}

/// One training sample: a unit-norm feature vector and an optional class id.
/// Whether the supervised repel branch fires is decided at step time, from
/// the label and the winner's class.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingEvent {
    pub x: UnitVector,
    pub label: Option<usize>,
}

/// What one training step did.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome {
    pub winner: usize,
    /// True when the sample was labeled and the winner carried another class,
    /// i.e. the supervised repel branch fired.
    pub supervised_pushback: bool,
    /// Rate delivered by the schedule for this event.
    pub eta: f64,
    /// Rate actually applied to the winner (differs from `eta` for the
    /// equidistant push-back).
    pub applied_rate: f64,
}

/// Per-epoch training log entry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochLog {
    pub epoch: u32,
    /// Schedule rate at the last event of the epoch.
    pub eta: f64,
    /// Quantization criterion over the stream against the epoch-end codebook.
    pub criterion: f64,
}

/// Crisp class plus fuzzy memberships for one sample.
#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub class: usize,
    pub neuron_memberships: MembershipVector,
    /// Per-class sums of the neuron memberships; also on the simplex.
    pub class_memberships: Vec<f64>,
}

/// The hybrid network: a labeled codebook plus the learning-rate state and
/// the branch configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct HybridNetwork {
    codebook: LabeledCodebook,
    rate: RateState,
    rate_mode: RateMode,
    unsupervised_rule: UnsupervisedRule,
    pushback_mode: PushbackMode,
}

impl HybridNetwork {
    pub fn new(
        codebook: LabeledCodebook,
        alpha: f64,
        rate_mode: RateMode,
        unsupervised_rule: UnsupervisedRule,
        pushback_mode: PushbackMode,
    ) -> Result<Self> {
        if rate_mode == RateMode::PerNeuron && unsupervised_rule == UnsupervisedRule::Instar {
            return Err(Error::InvalidParameter {
                name: "rate_mode",
                message: "per_neuron rates need a winner; the instar rule declares none".into(),
            });
        }
        Ok(HybridNetwork {
            codebook,
            rate: RateState::new(alpha)?,
            rate_mode,
            unsupervised_rule,
            pushback_mode,
        })
    }

    pub fn codebook(&self) -> &LabeledCodebook {
        &self.codebook
    }

    pub fn rate(&self) -> &RateState {
        &self.rate
    }

    pub fn n_classes(&self) -> usize {
        self.codebook.n_classes()
    }

    /// One online step. Unlabeled samples take the self-learning branch;
    /// labeled samples attract a same-class winner and repel a wrong-class
    /// one. Exactly one schedule advance happens per event.
    pub fn hybrid_step(&mut self, event: &TrainingEvent) -> Result<StepOutcome> {
        let winner = self.codebook.find_winner(&event.x)?;
        let shared = self.rate.step();
        let eta = match self.rate_mode {
            RateMode::Shared => shared,
            // The winner is about to record this win, so its count is +1.
            RateMode::PerNeuron => {
                1.0 / (self.codebook.codebook().win_counts()[winner] + 1) as f64
            }
        };

        let (supervised_pushback, applied_rate) = match event.label {
            None => {
                match self.unsupervised_rule {
                    UnsupervisedRule::Wta => {
                        self.codebook.base_mut().update_wta(&event.x, eta)?;
                    }
                    UnsupervisedRule::Instar => {
                        self.codebook.base_mut().update_instar(&event.x, eta)?;
                    }
                }
                (false, eta)
            }
            Some(label) => {
                if !self.codebook.labels().contains(&label) {
                    return Err(Error::UnknownLabel {
                        label: label.to_string(),
                    });
                }
                if self.codebook.label(winner) == label {
                    self.codebook.update_lvq(&event.x, label, eta)?;
                    (false, eta)
                } else {
                    match self.pushback_mode {
                        PushbackMode::FixedEta => {
                            self.codebook.update_lvq(&event.x, label, eta)?;
                            (true, eta)
                        }
                        PushbackMode::Equidistant => {
                            let (_, applied) =
                                self.codebook.equidistant_pushback(&event.x, label)?;
                            (true, applied)
                        }
                    }
                }
            }
        };
        Ok(StepOutcome {
            winner,
            supervised_pushback,
            eta,
            applied_rate,
        })
    }

    /// Runs the stream for the given number of epochs in presentation order.
    /// Aborts on the first failing step, reporting its epoch and event index.
    pub fn fit_stream(&mut self, events: &[TrainingEvent], epochs: u32) -> Result<Vec<EpochLog>> {
        if events.is_empty() {
            return Err(Error::EmptyInput);
        }
        let mut logs = Vec::with_capacity(epochs as usize);
        for epoch in 1..=epochs {
            let mut last_eta = f64::NAN;
            for (i, event) in events.iter().enumerate() {
                let outcome = self.hybrid_step(event).map_err(|e| Error::StepFailed {
                    epoch,
                    event: i,
                    source: Box::new(e),
                })?;
                last_eta = outcome.eta;
            }
            let samples: Vec<UnitVector> = events.iter().map(|e| e.x.clone()).collect();
            let assignment = self.codebook.codebook().assign_nearest(&samples)?;
            let criterion =
                self.codebook
                    .codebook()
                    .quantization_criterion(&samples, &assignment, None)?;
            logs.push(EpochLog {
                epoch,
                eta: last_eta,
                criterion,
            });
        }
        Ok(logs)
    }

    /// Fuzzy memberships over all neurons plus the crisp class of the
    /// highest-membership neuron. Class memberships are per-class sums.
    pub fn predict(&self, x: &UnitVector) -> Result<Prediction> {
        let mu = geometry::membership(x, self.codebook.codebook().weights())?;
        let winner = mu.argmax();
        let mut class_memberships = vec![0.0; self.n_classes()];
        for (j, &m) in mu.values().iter().enumerate() {
            class_memberships[self.codebook.label(j)] += m;
        }
        Ok(Prediction {
            class: self.codebook.label(winner),
            neuron_memberships: mu,
            class_memberships,
        })
    }
}

/// Trains a hybrid network on a prepared split: prototypes seeded from the
/// labeled class means, then the event stream replayed for `cfg.epochs`.
pub fn train_hybrid(
    train: &PreparedSplit,
    cfg: &HybridTrainConfig,
    seed: u64,
) -> Result<(HybridNetwork, Vec<EpochLog>)> {
    if train.sphere.is_empty() {
        return Err(Error::EmptyInput);
    }
    if train.n_classes == 0 {
        return Err(Error::InvalidParameter {
            name: "n_classes",
            message: "hybrid training needs at least one known class".into(),
        });
    }
    let dim = train.sphere[0].dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let codebook = LabeledCodebook::seeded(
        dim,
        train.n_classes,
        cfg.prototypes_per_class,
        &train.sphere,
        &train.labels,
        &mut rng,
    )?;
    let mut net = HybridNetwork::new(
        codebook,
        cfg.alpha,
        cfg.rate_mode,
        cfg.unsupervised_rule,
        cfg.pushback_mode,
    )?;
    let events: Vec<TrainingEvent> = train
        .sphere
        .iter()
        .zip(&train.labels)
        .map(|(x, label)| TrainingEvent {
            x: x.clone(),
            label: *label,
        })
        .collect();
    let logs = net.fit_stream(&events, cfg.epochs)?;
    Ok((net, logs))
}

const MODEL_MAGIC: &str = "hybridsom";
const MODEL_VERSION: &str = "v1";

/// Writes the codebook in the flat model format: a `hybridsom v1 <n> <m>`
/// header, then one line per neuron holding its class label (`-` when
/// unlabeled), win count, and weight components with 17 significant digits.
pub fn save_model<W: Write>(out: &mut W, cb: &Codebook, class_names: &[String]) -> Result<()> {
    for name in class_names {
        if name == "-" || name.chars().any(char::is_whitespace) || name.is_empty() {
            return Err(Error::InvalidParameter {
                name: "class_names",
                message: format!("label {name:?} cannot be stored in the model format"),
            });
        }
    }
    writeln!(out, "{MODEL_MAGIC} {MODEL_VERSION} {} {}", cb.dim(), cb.len())?;
    for j in 0..cb.len() {
        let label = match cb.label(j) {
            Some(id) => class_names
                .get(id)
                .ok_or_else(|| Error::InvalidParameter {
                    name: "class_names",
                    message: format!("neuron {j} references missing class id {id}"),
                })?
                .as_str(),
            None => "-",
        };
        write!(out, "{label} {}", cb.win_counts()[j])?;
        for c in cb.weight(j).components() {
            write!(out, " {c:.16e}")?;
        }
        writeln!(out)?;
    }
    Ok(())
}

/// Reads a model written by [`save_model`]. Class ids are reassigned from the
/// sorted distinct label strings, so saving again reproduces the same bytes.
pub fn load_model<R: BufRead>(input: R) -> Result<(Codebook, Vec<String>)> {
    let mut lines = input.lines().enumerate();
    let (_, header) = lines.next().ok_or(Error::ModelFormat {
        line: 1,
        message: "empty file".into(),
    })?;
    let header = header?;
    let parts: Vec<&str> = header.split_whitespace().collect();
    if parts.len() != 4 || parts[0] != MODEL_MAGIC || parts[1] != MODEL_VERSION {
        return Err(Error::ModelFormat {
            line: 1,
            message: format!("expected {MODEL_MAGIC} {MODEL_VERSION} <n> <m>, got {header:?}"),
        });
    }
    let dim: usize = parts[2].parse().map_err(|_| Error::ModelFormat {
        line: 1,
        message: "dimension is not a number".into(),
    })?;
    let m: usize = parts[3].parse().map_err(|_| Error::ModelFormat {
        line: 1,
        message: "neuron count is not a number".into(),
    })?;
    if dim == 0 || m == 0 {
        return Err(Error::ModelFormat {
            line: 1,
            message: "dimension and neuron count must be positive".into(),
        });
    }

    let mut raw: Vec<(Option<String>, u64, Vec<f64>)> = Vec::with_capacity(m);
    for (idx, line) in lines {
        let line_no = idx + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split_whitespace();
        let label = match fields.next() {
            Some("-") => None,
            Some(name) => Some(name.to_string()),
            None => unreachable!("non-empty line"),
        };
        let wins: u64 = fields
            .next()
            .ok_or(Error::ModelFormat {
                line: line_no,
                message: "missing win count".into(),
            })?
            .parse()
            .map_err(|_| Error::ModelFormat {
                line: line_no,
                message: "win count is not a non-negative integer".into(),
            })?;
        let weights: Vec<f64> = fields
            .map(|f| {
                f.parse().map_err(|_| Error::ModelFormat {
                    line: line_no,
                    message: format!("cannot parse weight component {f:?}"),
                })
            })
            .collect::<Result<_>>()?;
        if weights.len() != dim {
            return Err(Error::ModelFormat {
                line: line_no,
                message: format!("expected {dim} weight components, got {}", weights.len()),
            });
        }
        raw.push((label, wins, weights));
    }
    if raw.len() != m {
        return Err(Error::ModelFormat {
            line: 1,
            message: format!("header promises {m} neurons, file holds {}", raw.len()),
        });
    }

    let mut class_names: Vec<String> = raw.iter().filter_map(|(l, _, _)| l.clone()).collect();
    class_names.sort();
    class_names.dedup();
    let labeled = raw.iter().filter(|(l, _, _)| l.is_some()).count();
    if labeled != 0 && labeled != m {
        return Err(Error::ModelFormat {
            line: 1,
            message: "either every neuron or none must carry a label".into(),
        });
    }

    let mut weights = Vec::with_capacity(m);
    let mut labels = Vec::with_capacity(m);
    let mut wins = Vec::with_capacity(m);
    for (label, win, components) in raw {
        weights.push(UnitVector::from_stored(components)?);
        if let Some(name) = label {
            let id = class_names.iter().position(|c| *c == name).unwrap();
            labels.push(id);
        }
        wins.push(win);
    }
    let mut cb = Codebook::new(weights, if labeled == 0 { None } else { Some(labels) })?;
    for (j, w) in wins.into_iter().enumerate() {
        cb.set_win_count(j, w);
    }
    Ok((cb, class_names))
}

pub fn save_model_to_path<P: AsRef<Path>>(
    path: P,
    cb: &Codebook,
    class_names: &[String],
) -> Result<()> {
    let file = std::fs::File::create(path.as_ref())?;
    let mut w = std::io::BufWriter::new(file);
    save_model(&mut w, cb, class_names)?;
    w.flush()?;
    Ok(())
}

pub fn load_model_from_path<P: AsRef<Path>>(path: P) -> Result<(Codebook, Vec<String>)> {
    let file = std::fs::File::open(path.as_ref())?;
    load_model(std::io::BufReader::new(file))
}
