//! Supervised prototype updates: attract a correctly-labeled winner toward
//! the sample, repel a wrongly-labeled winner, and the push-back rate chosen
//! so that after the repel step the sample is equally similar to the wrong
//! winner and the nearest correct prototype.

use rand::Rng;

use crate::error::{Error, Result};
use crate::geometry::{self, UnitVector};
use crate::som::{self, Codebook};

/// How the repel rate is chosen when the winner's class is wrong.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PushbackMode {
    /// Use the scheduler's current rate.
    FixedEta,
    /// Solve for the rate that makes the sample equidistant from the wrong
    /// winner and the nearest correct prototype.
    Equidistant,
}

impl std::fmt::Display for PushbackMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            PushbackMode::FixedEta => "fixed_eta",
            PushbackMode::Equidistant => "equidistant",
        })
    }
}

impl std::str::FromStr for PushbackMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fixed_eta" => Ok(PushbackMode::FixedEta),
            "equidistant" => Ok(PushbackMode::Equidistant),
            other => Err(Error::InvalidParameter {
                name: "pushback_mode",
                message: format!("expected fixed_eta or equidistant, got {other:?}"),
            }),
        }
    }
}

/// A codebook whose every neuron carries a class id. Labels are fixed at
/// construction; training only moves the weights.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledCodebook {
    base: Codebook,
}

impl LabeledCodebook {
    pub fn new(base: Codebook) -> Result<Self> {
        if base.labels().is_none() {
            return Err(Error::InvalidParameter {
                name: "labels",
                message: "labeled codebook requires a class id per neuron".into(),
            });
        }
        Ok(LabeledCodebook { base })
    }

    /// Builds a codebook with `prototypes_per_class` neurons per class,
    /// assigned round-robin (neuron j gets class j mod n_classes). The first
    /// prototype of a class starts at the normalized mean of that class's
    /// labeled samples; further prototypes get a small seeded offset, and
    /// classes without labeled samples start at random positions.
    pub fn seeded<R: Rng>(
        dim: usize,
        n_classes: usize,
        prototypes_per_class: usize,
        samples: &[UnitVector],
        labels: &[Option<usize>],
        rng: &mut R,
    ) -> Result<Self> {
        if dim == 0 || n_classes == 0 || prototypes_per_class == 0 {
            return Err(Error::EmptyInput);
        }
        if samples.len() != labels.len() {
            return Err(Error::DimensionMismatch {
                expected: samples.len(),
                got: labels.len(),
            });
        }
        let mut means: Vec<Option<Vec<f64>>> = vec![None; n_classes];
        let mut counts = vec![0usize; n_classes];
        for (x, l) in samples.iter().zip(labels) {
            if let Some(c) = l {
                if *c >= n_classes {
                    return Err(Error::UnknownLabel {
                        label: c.to_string(),
                    });
                }
                let m = means[*c].get_or_insert_with(|| vec![0.0; dim]);
                for (mi, xi) in m.iter_mut().zip(x.components()) {
                    *mi += xi;
                }
                counts[*c] += 1;
            }
        }
        let m = n_classes * prototypes_per_class;
        let mut weights = Vec::with_capacity(m);
        let mut neuron_labels = Vec::with_capacity(m);
        for j in 0..m {
            let class = j % n_classes;
            let replica = j / n_classes;
            let w = match &means[class] {
                Some(sum) => {
                    let mean: Vec<f64> =
                        sum.iter().map(|s| s / counts[class] as f64).collect();
                    let base = match UnitVector::new(mean.clone()) {
                        Ok(u) => u,
                        // Labeled samples cancel out; fall back to random.
                        Err(Error::ZeroVector) => random_unit(dim, rng),
                        Err(e) => return Err(e),
                    };
                    if replica == 0 {
                        base
                    } else {
                        jitter(&base, 0.05, rng)
                    }
                }
                None => random_unit(dim, rng),
            };
            weights.push(w);
            neuron_labels.push(class);
        }
        LabeledCodebook::new(Codebook::new(weights, Some(neuron_labels))?)
    }

    pub fn codebook(&self) -> &Codebook {
        &self.base
    }

    pub fn into_codebook(self) -> Codebook {
        self.base
    }

    pub fn len(&self) -> usize {
        self.base.len()
    }

    pub fn is_empty(&self) -> bool {
        self.base.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn label(&self, j: usize) -> usize {
        self.base.labels().expect("labels present")[j]
    }

    pub fn labels(&self) -> &[usize] {
        self.base.labels().expect("labels present")
    }

    pub fn find_winner(&self, x: &UnitVector) -> Result<usize> {
        self.base.find_winner(x)
    }

    fn has_class(&self, class: usize) -> bool {
        self.labels().contains(&class)
    }

    /// One supervised step: the winner is attracted when its class matches
    /// `label` and repelled otherwise. Repel rates are clamped below one,
    /// since a full repel step would shoot past the origin. Returns the
    /// winner index.
    pub fn update_lvq(&mut self, x: &UnitVector, label: usize, eta: f64) -> Result<usize> {
        debug_assert!((0.0..=1.0).contains(&eta));
        if !self.has_class(label) {
            return Err(Error::UnknownLabel {
                label: label.to_string(),
            });
        }
        let winner = self.base.find_winner(x)?;
        if self.label(winner) == label {
            // Same branch as the self-learning rule, win count included.
            self.base.update_wta(x, eta)?;
        } else {
            let w = som::repel(self.base.weight(winner), x, eta.min(ETA_SUP), winner)?;
            self.base.replace_weight(winner, w);
            self.base.record_win(winner);
        }
        Ok(winner)
    }

    pub(crate) fn base_mut(&mut self) -> &mut Codebook {
        &mut self.base
    }

    /// Number of distinct classes the codebook covers.
    pub fn n_classes(&self) -> usize {
        self.labels().iter().max().map_or(0, |m| m + 1)
    }

    /// Repels the wrongly-labeled winner just far enough that `x` becomes
    /// equally similar to it and to the best correct-class prototype.
    /// Returns the winner index and the rate actually applied.
    pub fn equidistant_pushback(&mut self, x: &UnitVector, label: usize) -> Result<(usize, f64)> {
        if !self.has_class(label) {
            return Err(Error::UnknownLabel {
                label: label.to_string(),
            });
        }
        let winner = self.base.find_winner(x)?;
        if self.label(winner) == label {
            return Err(Error::InvalidParameter {
                name: "label",
                message: "push-back requires a wrongly labeled winner".into(),
            });
        }
        let correct = self.best_of_class(x, label)?;
        let rate = pushback_rate(self.base.weight(winner), self.base.weight(correct), x)?;
        let w = som::repel(self.base.weight(winner), x, rate.eta, winner)?;
        self.base.replace_weight(winner, w);
        self.base.record_win(winner);
        Ok((winner, rate.eta))
    }

    /// Most similar prototype carrying `class`.
    fn best_of_class(&self, x: &UnitVector, class: usize) -> Result<usize> {
        let mut best = None;
        let mut best_y = f64::NEG_INFINITY;
        for (j, w) in self.base.weights().iter().enumerate() {
            if self.label(j) != class {
                continue;
            }
            let y = geometry::activation(w, x)?;
            if y > best_y {
                best_y = y;
                best = Some(j);
            }
        }
        best.ok_or(Error::UnknownLabel {
            label: class.to_string(),
        })
    }
}

/// Result of the push-back rate search. When the equidistance target is not
/// reachable with a rate below one, `reaches_target` is false and `eta` is
/// the boundary value (near-antipodal geometry).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PushbackRate {
    pub eta: f64,
    pub reaches_target: bool,
}

const BISECTION_TOLERANCE: f64 = 1e-12;
pub(crate) const ETA_SUP: f64 = 1.0 - 1e-12;

fn cosine_after_repel(w: &UnitVector, x: &UnitVector, eta: f64) -> f64 {
    // cos of the renormalized w - eta (x - w) against x, written out directly.
    let mut dot_raw = 0.0;
    let mut norm_raw = 0.0;
    for (wi, xi) in w.components().iter().zip(x.components()) {
        let r = wi - eta * (xi - wi);
        dot_raw += r * xi;
        norm_raw += r * r;
    }
    dot_raw / norm_raw.sqrt()
}

/// Rate that makes the repelled winner exactly as similar to `x` as the
/// correct prototype is, solved on the renormalized update by bisection.
pub fn pushback_rate(
    w_winner: &UnitVector,
    w_correct: &UnitVector,
    x: &UnitVector,
) -> Result<PushbackRate> {
    let cos_w = geometry::activation(w_winner, x)?;
    let cos_p = geometry::activation(w_correct, x)?;
    if cos_w < cos_p - 1e-12 {
        return Err(Error::InvalidParameter {
            name: "w_winner",
            message: format!(
                "winner must be at least as similar to the sample as the correct prototype \
                 (cos {cos_w} vs {cos_p})"
            ),
        });
    }
    // Already equidistant (covers coincident prototypes).
    if (cos_w - cos_p).abs() <= 1e-15 {
        return Ok(PushbackRate {
            eta: 0.0,
            reaches_target: true,
        });
    }
    let f = |eta: f64| cosine_after_repel(w_winner, x, eta) - cos_p;
    let mut lo = 0.0;
    let mut hi = ETA_SUP;
    if f(hi) > 0.0 {
        // The cosine cannot be pushed down to the target with eta < 1.
        return Ok(PushbackRate {
            eta: hi,
            reaches_target: false,
        });
    }
    while hi - lo > BISECTION_TOLERANCE {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(PushbackRate {
        eta: 0.5 * (lo + hi),
        reaches_target: true,
    })
}

/// Closed-form rate for the *unnormalized* repel step: equalizes the raw
/// inner products `x . (w - eta (x - w))` and `x . w_p`. Because it ignores
/// the renormalization the equidistance only holds approximately once the
/// weight is projected back onto the sphere; training uses
/// [`pushback_rate`] instead.
pub fn pushback_rate_unnormalized(
    w_winner: &UnitVector,
    w_correct: &UnitVector,
    x: &UnitVector,
) -> Result<f64> {
    let cos_w = geometry::activation(w_winner, x)?;
    let cos_p = geometry::activation(w_correct, x)?;
    let denom = 1.0 - cos_w;
    if denom.abs() < 1e-15 {
        return Ok(0.0);
    }
    Ok((cos_w - cos_p) / denom)
}

fn random_unit<R: Rng>(dim: usize, rng: &mut R) -> UnitVector {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
        if let Ok(u) = UnitVector::new(v) {
            return u;
        }
    }
}

fn jitter<R: Rng>(base: &UnitVector, scale: f64, rng: &mut R) -> UnitVector {
    loop {
        let v: Vec<f64> = base
            .components()
            .iter()
            .map(|c| c + rng.random_range(-scale..scale))
            .collect();
        if let Ok(u) = UnitVector::new(v) {
            return u;
        }
    }
}
