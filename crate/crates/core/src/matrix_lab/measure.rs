//! Radially symmetric measures supported on finitely many circles.

use serde::{Deserialize, Serialize};

use super::MatrixError;

/// Tolerance on `Σ weights = 1`.
pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-12;

/// Uniform measure on the circle `|z| = radius`, with mass `weight`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub radius: f64,
    pub weight: f64,
}

/// Probability measure `Σ w_k · (uniform measure on |z| = ρ_k)` with strictly
/// increasing radii. Serializes as `[{"radius": ρ, "weight": w}, …]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Atom>", into = "Vec<Atom>")]
pub struct RadialMeasure {
    atoms: Vec<Atom>,
}

impl TryFrom<Vec<Atom>> for RadialMeasure {
    type Error = MatrixError;

    fn try_from(atoms: Vec<Atom>) -> Result<Self, Self::Error> {
        RadialMeasure::new(atoms)
    }
}

impl From<RadialMeasure> for Vec<Atom> {
    fn from(m: RadialMeasure) -> Self {
        m.atoms
    }
}

impl RadialMeasure {
    pub fn new(atoms: Vec<Atom>) -> Result<Self, MatrixError> {
        if atoms.is_empty() {
            return Err(MatrixError::InvalidMeasure("no atoms".into()));
        }
        for a in &atoms {
            if !(a.radius.is_finite() && a.radius >= 0.0) {
                return Err(MatrixError::InvalidMeasure(format!("bad radius {}", a.radius)));
            }
            if !(a.weight.is_finite() && a.weight > 0.0) {
                return Err(MatrixError::InvalidMeasure(format!("bad weight {}", a.weight)));
            }
        }
        if atoms.windows(2).any(|w| w[0].radius >= w[1].radius) {
            return Err(MatrixError::InvalidMeasure("radii must be strictly increasing".into()));
        }
        let total: f64 = atoms.iter().map(|a| a.weight).sum();
        if (total - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
            return Err(MatrixError::InvalidMeasure(format!("weights sum to {total}")));
        }
        Ok(RadialMeasure { atoms })
    }

    /// Builds a measure from `(radius, weight)` pairs, rescaling the weights
    /// to total mass one.
    pub fn normalized(pairs: &[(f64, f64)]) -> Result<Self, MatrixError> {
        let total: f64 = pairs.iter().map(|p| p.1).sum();
        if !(total.is_finite() && total > 0.0) {
            return Err(MatrixError::InvalidMeasure(format!("total mass {total}")));
        }
        Self::new(
            pairs
                .iter()
                .map(|&(radius, weight)| Atom {
                    radius,
                    weight: weight / total,
                })
                .collect(),
        )
    }

    /// Uniform measure on a single circle.
    pub fn circle(radius: f64) -> Result<Self, MatrixError> {
        Self::new(vec![Atom { radius, weight: 1.0 }])
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn weights(&self) -> Vec<f64> {
        self.atoms.iter().map(|a| a.weight).collect()
    }

    pub fn max_radius(&self) -> f64 {
        self.atoms.last().map_or(0.0, |a| a.radius)
    }

    pub fn min_radius(&self) -> f64 {
        self.atoms.first().map_or(0.0, |a| a.radius)
    }

    /// Mass of the circles whose radius satisfies `select`.
    pub fn mass_where<F: Fn(f64) -> bool>(&self, select: F) -> f64 {
        self.atoms.iter().filter(|a| select(a.radius)).map(|a| a.weight).sum()
    }

    /// `μ(B)⁻¹ μ|_B` together with `μ(B)`, or `None` when `μ(B) = 0`.
    pub fn restrict<F: Fn(f64) -> bool>(&self, select: F) -> Option<(RadialMeasure, f64)> {
        let kept: Vec<(f64, f64)> = self
            .atoms
            .iter()
            .filter(|a| select(a.radius))
            .map(|a| (a.radius, a.weight))
            .collect();
        let mass: f64 = kept.iter().map(|p| p.1).sum();
        if kept.is_empty() {
            return None;
        }
        Self::normalized(&kept).ok().map(|m| (m, mass))
    }

    /// `∫ |z|^{2k} dμ`.
    pub fn radial_moment(&self, k: i32) -> f64 {
        self.atoms.iter().map(|a| a.weight * a.radius.powi(2 * k)).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(RadialMeasure::normalized(&[(1.0, 1.0), (2.0, 1.0)]).is_ok());
        assert!(RadialMeasure::new(vec![]).is_err());
        assert!(RadialMeasure::new(vec![Atom {
            radius: 1.0,
            weight: 0.5
        }])
        .is_err());
        assert!(RadialMeasure::normalized(&[(2.0, 1.0), (1.0, 1.0)]).is_err());
        assert!(RadialMeasure::normalized(&[(1.0, 1.0), (1.0, 1.0)]).is_err());
        assert!(RadialMeasure::normalized(&[(-1.0, 1.0)]).is_err());
    }

    #[test]
    fn json_round_trip_and_rejection() {
        let m = RadialMeasure::normalized(&[(1.0, 1.0), (2.0, 1.0)]).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, r#"[{"radius":1.0,"weight":0.5},{"radius":2.0,"weight":0.5}]"#);
        assert_eq!(serde_json::from_str::<RadialMeasure>(&s).unwrap(), m);
        assert!(serde_json::from_str::<RadialMeasure>(r#"[{"radius":1.0,"weight":0.3}]"#).is_err());
    }

    #[test]
    fn restriction_renormalizes() {
        let m = RadialMeasure::normalized(&[(1.0, 1.0), (2.0, 1.0), (3.0, 2.0)]).unwrap();
        let (r, mass) = m.restrict(|x| x < 2.5).unwrap();
        assert!((mass - 0.5).abs() < 1e-15);
        assert_eq!(r.atoms().len(), 2);
        assert!((r.atoms()[0].weight - 0.5).abs() < 1e-15);
        assert!(m.restrict(|x| x > 5.0).is_none());
        assert!((m.radial_moment(1) - (0.25 + 1.0 + 4.5)).abs() < 1e-12);
    }
}
