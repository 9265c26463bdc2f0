//! Self-learning codebook updates: winner search, the winner-takes-all rule,
//! the Gaussian-neighborhood winner-takes-more rule, and the competition-free
//! similarity-weighted rule, all with renormalization back onto the sphere.

use rand::Rng;

use crate::error::{Error, Result};
use crate::geometry::{self, UnitVector, ZERO_NORM};

/// Unsupervised update rule selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SomRule {
    Wta,
    Wtm,
    Instar,
}

impl std::fmt::Display for SomRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SomRule::Wta => "wta",
            SomRule::Wtm => "wtm",
            SomRule::Instar => "instar",
        })
    }
}

impl std::str::FromStr for SomRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "wta" => Ok(SomRule::Wta),
            "wtm" => Ok(SomRule::Wtm),
            "instar" => Ok(SomRule::Instar),
            other => Err(Error::InvalidParameter {
                name: "rule",
                message: format!("expected wta, wtm or instar, got {other:?}"),
            }),
        }
    }
}

/// Width of the Gaussian neighborhood in weight space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NeighborhoodConfig {
    pub sigma: f64,
}

impl NeighborhoodConfig {
    pub fn new(sigma: f64) -> Result<Self> {
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::InvalidParameter {
                name: "sigma",
                message: format!("neighborhood width must be positive, got {sigma}"),
            });
        }
        Ok(NeighborhoodConfig { sigma })
    }
}

/// The prototype layer: `m` unit weight vectors with per-neuron win counts
/// and, when used for classification, one class id per neuron.
#[derive(Debug, Clone, PartialEq)]
pub struct Codebook {
    dim: usize,
    weights: Vec<UnitVector>,
    win_counts: Vec<u64>,
    labels: Option<Vec<usize>>,
}

impl Codebook {
    pub fn new(weights: Vec<UnitVector>, labels: Option<Vec<usize>>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::EmptyInput);
        }
        let dim = weights[0].dim();
        for w in &weights {
            if w.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: w.dim(),
                });
            }
        }
        if let Some(ls) = &labels {
            if ls.len() != weights.len() {
                return Err(Error::DimensionMismatch {
                    expected: weights.len(),
                    got: ls.len(),
                });
            }
        }
        let m = weights.len();
        Ok(Codebook {
            dim,
            weights,
            win_counts: vec![0; m],
            labels,
        })
    }

    /// Draws `m` prototypes uniformly from the cube `[-1, 1]^dim` and projects
    /// them onto the sphere.
    pub fn random<R: Rng>(m: usize, dim: usize, rng: &mut R) -> Result<Self> {
        if m == 0 || dim == 0 {
            return Err(Error::EmptyInput);
        }
        let mut weights = Vec::with_capacity(m);
        while weights.len() < m {
            let v: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
            match UnitVector::new(v) {
                Ok(u) => weights.push(u),
                Err(Error::ZeroVector) => continue,
                Err(e) => return Err(e),
            }
        }
        Codebook::new(weights, None)
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn weights(&self) -> &[UnitVector] {
        &self.weights
    }

    pub fn weight(&self, j: usize) -> &UnitVector {
        &self.weights[j]
    }

    pub fn win_counts(&self) -> &[u64] {
        &self.win_counts
    }

    pub fn labels(&self) -> Option<&[usize]> {
        self.labels.as_deref()
    }

    pub fn label(&self, j: usize) -> Option<usize> {
        self.labels.as_ref().map(|ls| ls[j])
    }

    pub(crate) fn set_win_count(&mut self, j: usize, count: u64) {
        self.win_counts[j] = count;
    }

    pub(crate) fn record_win(&mut self, j: usize) {
        self.win_counts[j] += 1;
    }

    pub(crate) fn replace_weight(&mut self, j: usize, w: UnitVector) {
        debug_assert_eq!(w.dim(), self.dim);
        self.weights[j] = w;
    }

    fn check_input(&self, x: &UnitVector) -> Result<()> {
        if x.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.dim(),
            });
        }
        Ok(())
    }

    /// Neuron with the highest activation (equivalently, smallest distance on
    /// the sphere). Ties resolve to the lowest index.
    pub fn find_winner(&self, x: &UnitVector) -> Result<usize> {
        self.check_input(x)?;
        let mut best = 0;
        let mut best_y = f64::NEG_INFINITY;
        for (j, w) in self.weights.iter().enumerate() {
            let y = geometry::activation(w, x)?;
            if y > best_y {
                best_y = y;
                best = j;
            }
        }
        Ok(best)
    }

    /// Winner-takes-all: moves only the winner toward `x` by `eta`, then
    /// renormalizes. Returns the winner index.
    pub fn update_wta(&mut self, x: &UnitVector, eta: f64) -> Result<usize> {
        debug_assert!((0.0..=1.0).contains(&eta));
        let winner = self.find_winner(x)?;
        self.weights[winner] = attract(&self.weights[winner], x, eta, winner)?;
        self.win_counts[winner] += 1;
        Ok(winner)
    }

    /// Gaussian neighborhood weight between the winner and neuron `p`,
    /// measured in weight space.
    pub fn neighborhood(&self, j_star: usize, p: usize, cfg: &NeighborhoodConfig) -> f64 {
        let d = geometry::euclidean_distance(&self.weights[j_star], &self.weights[p])
            .expect("weights share one dimension");
        (-(d * d) / (2.0 * cfg.sigma * cfg.sigma)).exp()
    }

    /// Winner-takes-more: every neuron moves toward `x` scaled by its
    /// neighborhood weight relative to the winner. Returns the winner index.
    pub fn update_wtm(
        &mut self,
        x: &UnitVector,
        eta: f64,
        cfg: &NeighborhoodConfig,
    ) -> Result<usize> {
        debug_assert!((0.0..=1.0).contains(&eta));
        let winner = self.find_winner(x)?;
        for p in 0..self.weights.len() {
            let phi = self.neighborhood(winner, p, cfg);
            self.weights[p] = attract(&self.weights[p], x, eta * phi, p)?;
        }
        self.win_counts[winner] += 1;
        Ok(winner)
    }

    /// Competition-free rule: each neuron moves toward `x` in proportion to
    /// its own clamped activation. Neurons facing away from the sample do not
    /// move, and no winner is declared.
    pub fn update_instar(&mut self, x: &UnitVector, eta: f64) -> Result<()> {
        debug_assert!((0.0..=1.0).contains(&eta));
        self.check_input(x)?;
        for p in 0..self.weights.len() {
            let psi = geometry::similarity(&self.weights[p], x)?;
            if psi > 0.0 {
                self.weights[p] = attract(&self.weights[p], x, eta * psi, p)?;
            }
        }
        Ok(())
    }

    /// Nearest-prototype index for each sample.
    pub fn assign_nearest(&self, samples: &[UnitVector]) -> Result<Vec<usize>> {
        samples.iter().map(|x| self.find_winner(x)).collect()
    }

    /// Sum of squared distances between samples and their assigned
    /// prototypes, optionally weighted per sample.
    pub fn quantization_criterion(
        &self,
        samples: &[UnitVector],
        assignment: &[usize],
        sample_weights: Option<&[f64]>,
    ) -> Result<f64> {
        if samples.len() != assignment.len() {
            return Err(Error::DimensionMismatch {
                expected: samples.len(),
                got: assignment.len(),
            });
        }
        if let Some(ws) = sample_weights {
            if ws.len() != samples.len() {
                return Err(Error::DimensionMismatch {
                    expected: samples.len(),
                    got: ws.len(),
                });
            }
        }
        let mut total = 0.0;
        for (i, (x, &j)) in samples.iter().zip(assignment).enumerate() {
            let d = geometry::euclidean_distance(&self.weights[j], x)?;
            let w = sample_weights.map_or(1.0, |ws| ws[i]);
            total += w * d * d;
        }
        Ok(total)
    }
}

/// Shared attract step: `w + eta * (x - w)`, renormalized. A step factor of
/// zero (or a sample equal to the weight) leaves the weight bit-identical.
pub(crate) fn attract(w: &UnitVector, x: &UnitVector, factor: f64, neuron: usize) -> Result<UnitVector> {
    step(w, x, factor, neuron)
}

/// Shared repel step: `w - eta * (x - w)`, renormalized.
pub(crate) fn repel(w: &UnitVector, x: &UnitVector, factor: f64, neuron: usize) -> Result<UnitVector> {
    step(w, x, -factor, neuron)
}

fn step(w: &UnitVector, x: &UnitVector, factor: f64, neuron: usize) -> Result<UnitVector> {
    let raw: Vec<f64> = w
        .components()
        .iter()
        .zip(x.components())
        .map(|(wi, xi)| wi + factor * (xi - wi))
        .collect();
    if raw == w.components() {
        return Ok(w.clone());
    }
    if geometry::norm(&raw) < ZERO_NORM {
        return Err(Error::DegenerateUpdate { neuron });
    }
    UnitVector::new(raw)
}

/// One step of the unnormalized winner-takes-all rule with the per-win-count
/// rate `1 / k_j`: the winner (by Euclidean distance) becomes the running
/// arithmetic mean of the samples it has won. Weights are free vectors here,
/// not confined to the sphere. Returns the winner index.
pub fn update_wta_unnormalized(
    weights: &mut [Vec<f64>],
    win_counts: &mut [u64],
    x: &[f64],
) -> Result<usize> {
    if weights.is_empty() {
        return Err(Error::EmptyInput);
    }
    if weights.len() != win_counts.len() {
        return Err(Error::DimensionMismatch {
            expected: weights.len(),
            got: win_counts.len(),
        });
    }
    let mut winner = 0;
    let mut best = f64::INFINITY;
    for (j, w) in weights.iter().enumerate() {
        if w.len() != x.len() {
            return Err(Error::DimensionMismatch {
                expected: w.len(),
                got: x.len(),
            });
        }
        let d2: f64 = w
            .iter()
            .zip(x)
            .map(|(a, b)| {
                let d = a - b;
                d * d
            })
            .sum();
        if d2 < best {
            best = d2;
            winner = j;
        }
    }
    win_counts[winner] += 1;
    let eta = 1.0 / win_counts[winner] as f64;
    for (wi, xi) in weights[winner].iter_mut().zip(x) {
        *wi += eta * (xi - *wi);
    }
    Ok(winner)
}
