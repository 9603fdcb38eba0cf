//! Rotation-invariant regions of the plane: boolean combinations of annuli
//! centered at the origin.

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{json, Value};

use super::HsError;

/// `closed`: `r ≤ |z| ≤ s`. Open: `r < |z| < s`, where the inner condition is
/// dropped when `r = 0` so that an open annulus of inner radius zero is the
/// open disc.
#[derive(Clone, Debug, PartialEq)]
pub enum Region {
    All,
    Empty,
    Annulus { r: f64, s: f64, closed: bool },
    Union(Vec<Region>),
    Intersect(Vec<Region>),
    Complement(Box<Region>),
}

impl Region {
    /// Closed annulus `A(r, s)`.
    pub fn annulus(r: f64, s: f64) -> Region {
        Region::Annulus { r, s, closed: true }
    }

    pub fn open_annulus(r: f64, s: f64) -> Region {
        Region::Annulus { r, s, closed: false }
    }

    /// Closed disc `|z| ≤ s`.
    pub fn disc(s: f64) -> Region {
        Region::annulus(0.0, s)
    }

    pub fn union(parts: Vec<Region>) -> Region {
        Region::Union(parts)
    }

    pub fn intersect(parts: Vec<Region>) -> Region {
        Region::Intersect(parts)
    }

    pub fn complement(&self) -> Region {
        Region::Complement(Box::new(self.clone()))
    }

    pub fn validate(&self) -> Result<(), HsError> {
        match self {
            Region::All | Region::Empty => Ok(()),
            Region::Annulus { r, s, .. } => {
                if r.is_finite() && s.is_finite() && *r >= 0.0 && r <= s {
                    Ok(())
                } else {
                    Err(HsError::InvalidRegion(format!("annulus with r = {r}, s = {s}")))
                }
            }
            Region::Union(parts) | Region::Intersect(parts) => parts.iter().try_for_each(Region::validate),
            Region::Complement(inner) => inner.validate(),
        }
    }

    /// Exact membership of a point.
    pub fn contains(&self, z: Complex64) -> bool {
        self.contains_radius(z.norm())
    }

    /// Membership of any point of modulus `rho`.
    pub fn contains_radius(&self, rho: f64) -> bool {
        match self {
            Region::All => true,
            Region::Empty => false,
            Region::Annulus { r, s, closed: true } => *r <= rho && rho <= *s,
            Region::Annulus { r, s, closed: false } => (*r == 0.0 || *r < rho) && rho < *s,
            Region::Union(parts) => parts.iter().any(|p| p.contains_radius(rho)),
            Region::Intersect(parts) => parts.iter().all(|p| p.contains_radius(rho)),
            Region::Complement(inner) => !inner.contains_radius(rho),
        }
    }

    /// Every circle radius on which membership can change.
    pub fn boundary_radii(&self) -> Vec<f64> {
        let mut out = Vec::new();
        self.collect_radii(&mut out);
        out
    }

    fn collect_radii(&self, out: &mut Vec<f64>) {
        match self {
            Region::All | Region::Empty => {}
            Region::Annulus { r, s, .. } => {
                if *r > 0.0 {
                    out.push(*r);
                }
                out.push(*s);
            }
            Region::Union(parts) | Region::Intersect(parts) => parts.iter().for_each(|p| p.collect_radii(out)),
            Region::Complement(inner) => inner.collect_radii(out),
        }
    }

    /// Distance from `z` to the nearest candidate boundary circle.
    pub fn boundary_distance(&self, z: Complex64) -> f64 {
        let rho = z.norm();
        self.boundary_radii()
            .iter()
            .map(|b| (rho - b).abs())
            .fold(f64::INFINITY, f64::min)
    }

    pub fn to_json(&self) -> Value {
        match self {
            Region::All => json!({"op": "all"}),
            Region::Empty => json!({"op": "empty"}),
            Region::Annulus { r, s, closed } => json!({"annulus": {"r": r, "s": s, "closed": closed}}),
            Region::Union(parts) => {
                json!({"op": "union", "args": parts.iter().map(Region::to_json).collect::<Vec<_>>()})
            }
            Region::Intersect(parts) => {
                json!({"op": "intersect", "args": parts.iter().map(Region::to_json).collect::<Vec<_>>()})
            }
            Region::Complement(inner) => json!({"op": "complement", "args": [inner.to_json()]}),
        }
    }

    pub fn from_json(v: &Value) -> Result<Region, HsError> {
        let bad = |msg: &str| HsError::InvalidRegion(format!("{msg}: {v}"));
        if let Some(a) = v.get("annulus") {
            let r = a
                .get("r")
                .and_then(Value::as_f64)
                .ok_or_else(|| bad("annulus needs numeric r"))?;
            let s = a
                .get("s")
                .and_then(Value::as_f64)
                .ok_or_else(|| bad("annulus needs numeric s"))?;
            let closed = match a.get("closed") {
                None => true,
                Some(c) => c.as_bool().ok_or_else(|| bad("closed must be boolean"))?,
            };
            let region = Region::Annulus { r, s, closed };
            region.validate()?;
            return Ok(region);
        }
        let op = v
            .get("op")
            .and_then(Value::as_str)
            .ok_or_else(|| bad("expected \"annulus\" or \"op\""))?;
        let args = || -> Result<Vec<Region>, HsError> {
            v.get("args")
                .and_then(Value::as_array)
                .ok_or_else(|| bad("operation needs an \"args\" array"))?
                .iter()
                .map(Region::from_json)
                .collect()
        };
        match op {
            "all" => Ok(Region::All),
            "empty" => Ok(Region::Empty),
            "union" => Ok(Region::Union(args()?)),
            "intersect" => Ok(Region::Intersect(args()?)),
            "complement" => {
                let mut a = args()?;
                if a.len() != 1 {
                    return Err(bad("complement takes exactly one argument"));
                }
                Ok(Region::Complement(Box::new(a.remove(0))))
            }
            _ => Err(bad("unknown op")),
        }
    }
}

impl Serialize for Region {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_json().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Region {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let v = Value::deserialize(deserializer)?;
        Region::from_json(&v).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn membership_conventions() {
        let closed = Region::annulus(1.0, 2.0);
        assert!(closed.contains(c(1.0)) && closed.contains(c(2.0)) && !closed.contains(c(0.5)));
        let open = Region::open_annulus(1.0, 2.0);
        assert!(!open.contains(c(1.0)) && !open.contains(c(2.0)) && open.contains(Complex64::new(0.0, 1.5)));
        let open_disc = Region::open_annulus(0.0, 1.0);
        assert!(open_disc.contains(c(0.0)) && !open_disc.contains(c(1.0)));
        assert!(!closed.complement().contains(c(1.5)));
        let both = Region::union(vec![Region::disc(0.5), Region::annulus(2.0, 3.0)]);
        assert!(both.contains(c(0.0)) && both.contains(c(2.5)) && !both.contains(c(1.0)));
        assert!(Region::intersect(vec![Region::disc(2.0), Region::annulus(1.0, 3.0)]).contains(c(1.5)));
    }

    #[test]
    fn boundary_distance_uses_all_radii() {
        let r = Region::union(vec![Region::disc(1.0), Region::annulus(2.0, 3.0)]);
        assert!((r.boundary_distance(c(1.9)) - 0.1).abs() < 1e-12);
        assert!((Region::disc(1.0).boundary_distance(c(0.0)) - 1.0).abs() < 1e-15);
        assert_eq!(Region::All.boundary_distance(c(5.0)), f64::INFINITY);
    }

    #[test]
    fn json_round_trip() {
        let r = Region::union(vec![
            Region::annulus(0.0, 1.5),
            Region::open_annulus(2.0, 3.0).complement(),
        ]);
        let text = serde_json::to_string(&r).unwrap();
        assert_eq!(serde_json::from_str::<Region>(&text).unwrap(), r);
        let parsed: Region = serde_json::from_str(r#"{"annulus":{"r":1,"s":2}}"#).unwrap();
        assert_eq!(parsed, Region::annulus(1.0, 2.0));
        assert!(serde_json::from_str::<Region>(r#"{"annulus":{"r":3,"s":2}}"#).is_err());
        assert!(serde_json::from_str::<Region>(r#"{"op":"xor","args":[]}"#).is_err());
    }
}
