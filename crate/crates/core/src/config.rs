//! Training configuration for the hybrid network, the comparison baselines,
//! and the evaluation harness.

use crate::hybrid::UnsupervisedRule;
use crate::lvq::PushbackMode;
use crate::schedule::RateMode;
use crate::som::SomRule;

#[derive(Debug, Clone, PartialEq)]
pub struct HybridTrainConfig {
    pub alpha: f64,
    pub rate_mode: RateMode,
    pub unsupervised_rule: UnsupervisedRule,
    pub pushback_mode: PushbackMode,
    pub prototypes_per_class: usize,
    pub epochs: u32,
}

impl Default for HybridTrainConfig {
    fn default() -> Self {
        HybridTrainConfig {
            alpha: 1.0,
            rate_mode: RateMode::Shared,
            unsupervised_rule: UnsupervisedRule::Wta,
            pushback_mode: PushbackMode::Equidistant,
            prototypes_per_class: 1,
            epochs: 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SomTrainConfig {
    /// Neuron count; `None` means "match the hybrid layout", i.e. classes
    /// times prototypes per class.
    pub m: Option<usize>,
    pub rule: SomRule,
    pub sigma: f64,
    /// Geometric per-step decay of sigma; 1 keeps it constant.
    pub sigma_decay: f64,
    pub alpha: f64,
    pub rate_mode: RateMode,
    pub epochs: u32,
}

impl Default for SomTrainConfig {
    fn default() -> Self {
        SomTrainConfig {
            m: None,
            rule: SomRule::Wtm,
            sigma: 0.5,
            sigma_decay: 1.0,
            alpha: 1.0,
            rate_mode: RateMode::Shared,
            epochs: 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LvqTrainConfig {
    pub prototypes_per_class: usize,
    pub alpha: f64,
    pub rate_mode: RateMode,
    pub epochs: u32,
}

impl Default for LvqTrainConfig {
    fn default() -> Self {
        LvqTrainConfig {
            prototypes_per_class: 1,
            alpha: 1.0,
            rate_mode: RateMode::Shared,
            epochs: 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FcmConfig {
    /// Cluster count; `None` means "one per class".
    pub clusters: Option<usize>,
    pub fuzzifier: f64,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for FcmConfig {
    fn default() -> Self {
        FcmConfig {
            clusters: None,
            fuzzifier: 2.0,
            tol: 1e-6,
            max_iter: 300,
        }
    }
}

/// Everything the four-method comparison needs.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CompareConfig {
    pub hybrid: HybridTrainConfig,
    pub som: SomTrainConfig,
    pub lvq: LvqTrainConfig,
    pub fcm: FcmConfig,
}

impl CompareConfig {
    /// Deterministic key-value rendering, used for the report digest.
    pub fn canonical_text(&self) -> String {
        let mut lines = vec![
            format!("fcm.clusters = {:?}", self.fcm.clusters),
            format!("fcm.fuzzifier = {}", self.fcm.fuzzifier),
            format!("fcm.max_iter = {}", self.fcm.max_iter),
            format!("fcm.tol = {}", self.fcm.tol),
            format!("hybrid.alpha = {}", self.hybrid.alpha),
            format!("hybrid.epochs = {}", self.hybrid.epochs),
            format!("hybrid.pushback_mode = {}", self.hybrid.pushback_mode),
            format!(
                "hybrid.prototypes_per_class = {}",
                self.hybrid.prototypes_per_class
            ),
            format!("hybrid.rate_mode = {}", self.hybrid.rate_mode),
            format!("hybrid.rule = {}", self.hybrid.unsupervised_rule),
            format!("lvq.alpha = {}", self.lvq.alpha),
            format!("lvq.epochs = {}", self.lvq.epochs),
            format!("lvq.prototypes_per_class = {}", self.lvq.prototypes_per_class),
            format!("lvq.rate_mode = {}", self.lvq.rate_mode),
            format!("som.alpha = {}", self.som.alpha),
            format!("som.epochs = {}", self.som.epochs),
            format!("som.m = {:?}", self.som.m),
            format!("som.rate_mode = {}", self.som.rate_mode),
            format!("som.rule = {}", self.som.rule),
            format!("som.sigma = {}", self.som.sigma),
            format!("som.sigma_decay = {}", self.som.sigma_decay),
        ];
        lines.sort();
        lines.join("\n")
    }
}
