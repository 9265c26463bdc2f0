//! Vector algebra on the unit hypersphere: normalization, cosine activation,
//! distance, the clamped-cosine similarity measure, and fuzzy membership
//! inference over a set of prototypes.

use crate::error::{Error, Result};

/// Norm drift tolerated before a vector no longer counts as unit.
pub const NORM_TOLERANCE: f64 = 1e-9;
/// Below this norm a vector is treated as zero.
pub const ZERO_NORM: f64 = 1e-12;

/// A vector constrained to the unit hypersphere.
///
/// Construction renormalizes, so repeated updates cannot drift the norm
/// beyond [`NORM_TOLERANCE`].
#[derive(Debug, Clone, PartialEq)]
pub struct UnitVector(Vec<f64>);

impl UnitVector {
    /// Projects `v` onto the unit sphere. Fails with [`Error::ZeroVector`]
    /// when the norm is below [`ZERO_NORM`].
    pub fn new(v: Vec<f64>) -> Result<Self> {
        if v.is_empty() {
            return Err(Error::EmptyInput);
        }
        let n = norm(&v);
        if n < ZERO_NORM {
            return Err(Error::ZeroVector);
        }
        if n == 1.0 {
            // Already exactly unit; dividing would only churn the last bit.
            return Ok(UnitVector(v));
        }
        Ok(UnitVector(v.into_iter().map(|c| c / n).collect()))
    }

    /// Accepts components that are already unit within [`NORM_TOLERANCE`]
    /// without renormalizing, preserving the exact bits. Used when reading
    /// persisted weights back.
    pub(crate) fn from_stored(v: Vec<f64>) -> Result<Self> {
        let n = norm(&v);
        if (n - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::InvalidParameter {
                name: "unit_vector",
                message: format!("stored vector has norm {n}, expected 1"),
            });
        }
        Ok(UnitVector(v))
    }

    pub fn components(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

/// Scales a raw vector to unit norm.
pub fn normalize(v: &[f64]) -> Result<UnitVector> {
    UnitVector::new(v.to_vec())
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

fn check_dims(w: &UnitVector, x: &UnitVector) -> Result<()> {
    if w.dim() != x.dim() {
        return Err(Error::DimensionMismatch {
            expected: w.dim(),
            got: x.dim(),
        });
    }
    Ok(())
}

/// Inner product of two unit vectors: the cosine of the angle between them.
pub fn activation(w: &UnitVector, x: &UnitVector) -> Result<f64> {
    check_dims(w, x)?;
    Ok(dot(w.components(), x.components()))
}

/// Euclidean distance between two unit vectors.
///
/// Computed directly from the component differences; the identity
/// `d^2 = 2(1 - cos)` is left to the tests as an independent check.
pub fn euclidean_distance(w: &UnitVector, x: &UnitVector) -> Result<f64> {
    check_dims(w, x)?;
    let s: f64 = w
        .components()
        .iter()
        .zip(x.components())
        .map(|(a, b)| {
            let d = a - b;
            d * d
        })
        .sum();
    Ok(s.sqrt())
}

/// Similarity measure: the cosine clamped at zero. Non-negative, symmetric,
/// and equal to one on identical vectors.
pub fn similarity(w: &UnitVector, x: &UnitVector) -> Result<f64> {
    Ok(activation(w, x)?.max(0.0))
}

/// Fuzzy memberships of one sample over `m` prototypes: non-negative,
/// summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct MembershipVector(Vec<f64>);

impl MembershipVector {
    /// Validates an externally assembled membership vector.
    pub fn new(mu: Vec<f64>) -> Result<Self> {
        if mu.is_empty() {
            return Err(Error::EmptyInput);
        }
        if mu.iter().any(|&m| !(0.0..=1.0 + NORM_TOLERANCE).contains(&m)) {
            return Err(Error::InvalidParameter {
                name: "membership",
                message: "entries must lie in [0, 1]".into(),
            });
        }
        let sum: f64 = mu.iter().sum();
        if (sum - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::InvalidParameter {
                name: "membership",
                message: format!("entries sum to {sum}, expected 1"),
            });
        }
        Ok(MembershipVector(mu))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Index of the largest membership; ties resolve to the lowest index.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (j, &m) in self.0.iter().enumerate() {
            if m > self.0[best] {
                best = j;
            }
        }
        best
    }
}

/// Membership of `x` in each prototype's class: similarities normalized to
/// the simplex. When every similarity is zero the sample lies in the negative
/// half-space of all prototypes and the membership is uniform.
pub fn membership(x: &UnitVector, weights: &[UnitVector]) -> Result<MembershipVector> {
    if weights.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut psi = Vec::with_capacity(weights.len());
    for w in weights {
        psi.push(similarity(w, x)?);
    }
    let total: f64 = psi.iter().sum();
    if total <= 0.0 {
        let uniform = 1.0 / weights.len() as f64;
        return Ok(MembershipVector(vec![uniform; weights.len()]));
    }
    Ok(MembershipVector(psi.into_iter().map(|p| p / total).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(v: &[f64]) -> UnitVector {
        normalize(v).unwrap()
    }

    #[test]
    fn normalize_scales_to_unit() {
        let u = normalize(&[3.0, 4.0]).unwrap();
        assert_eq!(u.components(), &[0.6, 0.8]);
    }

    #[test]
    fn normalize_is_idempotent() {
        let u = normalize(&[0.6, 0.8]).unwrap();
        assert_eq!(u.components(), &[0.6, 0.8]);
    }

    #[test]
    fn normalize_rejects_zero_vector() {
        assert!(matches!(normalize(&[0.0, 0.0]), Err(Error::ZeroVector)));
    }

    #[test]
    fn activation_of_self_is_one() {
        let u = unit(&[1.0, 2.0, -0.5]);
        assert!((activation(&u, &u).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn activation_orthogonal_and_antipodal() {
        let e1 = unit(&[1.0, 0.0]);
        let e2 = unit(&[0.0, 1.0]);
        let neg = unit(&[-1.0, 0.0]);
        assert_eq!(activation(&e1, &e2).unwrap(), 0.0);
        assert_eq!(activation(&e1, &neg).unwrap(), -1.0);
    }

    #[test]
    fn activation_rejects_dimension_mismatch() {
        let a = unit(&[1.0, 0.0]);
        let b = unit(&[1.0, 0.0, 0.0]);
        assert!(matches!(
            activation(&a, &b),
            Err(Error::DimensionMismatch { expected: 2, got: 3 })
        ));
    }

    #[test]
    fn distance_matches_closed_forms() {
        let e1 = unit(&[1.0, 0.0]);
        let e2 = unit(&[0.0, 1.0]);
        let neg = unit(&[-1.0, 0.0]);
        assert_eq!(euclidean_distance(&e1, &e1).unwrap(), 0.0);
        assert!((euclidean_distance(&e1, &e2).unwrap() - 2f64.sqrt()).abs() < 1e-12);
        assert!((euclidean_distance(&e1, &neg).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn similarity_clamps_negative_cosines() {
        let e1 = unit(&[1.0, 0.0]);
        assert_eq!(similarity(&e1, &e1).unwrap(), 1.0);
        let x = unit(&[0.5, 3f64.sqrt() / 2.0]);
        assert!((similarity(&e1, &x).unwrap() - 0.5).abs() < 1e-12);
        let behind = unit(&[-0.3, -(1.0f64 - 0.09).sqrt()]);
        assert_eq!(similarity(&e1, &behind).unwrap(), 0.0);
    }

    #[test]
    fn membership_normalizes_similarities() {
        // Two prototypes equally similar to x.
        let x = unit(&[1.0, 1.0]);
        let w = vec![unit(&[1.0, 0.0]), unit(&[0.0, 1.0])];
        let mu = membership(&x, &w).unwrap();
        assert!((mu.values()[0] - 0.5).abs() < 1e-12);
        assert!((mu.values()[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn membership_is_a_direct_ratio() {
        // psi = (0.9, 0.3, 0) -> (0.75, 0.25, 0). Build prototypes in 3-D so
        // the cosines against x = e1 are exactly those values.
        let x = unit(&[1.0, 0.0, 0.0]);
        let w = vec![
            unit(&[0.9, (1.0f64 - 0.81).sqrt(), 0.0]),
            unit(&[0.3, (1.0f64 - 0.09).sqrt(), 0.0]),
            unit(&[0.0, 1.0, 0.0]),
        ];
        let mu = membership(&x, &w).unwrap();
        assert!((mu.values()[0] - 0.75).abs() < 1e-12);
        assert!((mu.values()[1] - 0.25).abs() < 1e-12);
        assert!(mu.values()[2].abs() < 1e-12);
    }

    #[test]
    fn membership_falls_back_to_uniform() {
        let x = unit(&[-1.0, 0.0]);
        let w = vec![
            unit(&[1.0, 0.0]),
            unit(&[1.0, 0.1]),
            unit(&[1.0, -0.1]),
            unit(&[1.0, 0.2]),
        ];
        let mu = membership(&x, &w).unwrap();
        for &m in mu.values() {
            assert_eq!(m, 0.25);
        }
    }

    #[test]
    fn membership_validates_external_input() {
        assert!(MembershipVector::new(vec![0.5, 0.5]).is_ok());
        assert!(MembershipVector::new(vec![0.9, 0.3]).is_err());
        assert!(MembershipVector::new(vec![-0.1, 1.1]).is_err());
    }

    #[test]
    fn argmax_breaks_ties_low() {
        let mu = MembershipVector::new(vec![0.4, 0.4, 0.2]).unwrap();
        assert_eq!(mu.argmax(), 0);
    }
}
