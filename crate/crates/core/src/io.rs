//! JSON file formats for polytopes and smooth bodies.
//!
//! Polytope: `{"n": 2, "vertices": [[re1, im1, re2, im2], ...]}` where each
//! coordinate is a JSON number or an exact string such as `"-3/4"`.
//! Body: `{"kind": "ball" | "lower_ball" | "ellipsoid", "n": 2, "Q": [[...]]}`.

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::numerics::Tolerance;
use crate::polytope::Polytope;
use crate::smooth::SupportBody;

/// One coordinate as read from a file.
#[derive(Debug, Clone, PartialEq)]
pub enum Coordinate {
    Float(f64),
    Exact(BigRational),
}

impl Coordinate {
    pub fn to_f64(&self) -> f64 {
        match self {
            Coordinate::Float(x) => *x,
            Coordinate::Exact(q) => q.to_f64().unwrap_or(f64::NAN),
        }
    }

    pub fn to_rational(&self) -> Result<BigRational> {
        match self {
            Coordinate::Exact(q) => Ok(q.clone()),
            Coordinate::Float(x) => BigRational::from_float(*x)
                .ok_or_else(|| Error::Parse(format!("coordinate {x} is not finite"))),
        }
    }
}

/// Parses `"p/q"`, `"p"` or a decimal such as `"0.25"` into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(BigRational::new(p, q));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let neg = int.starts_with('-');
        let digits = format!("{}{}", int.trim_start_matches(['-', '+']), frac);
        if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let mut p: BigInt = digits.parse().map_err(|_| bad())?;
        if neg {
            p = -p;
        }
        let q = num_traits::pow(BigInt::from(10), frac.len());
        return Ok(BigRational::new(p, q));
    }
    let p: BigInt = s.parse().map_err(|_| bad())?;
    Ok(BigRational::from_integer(p))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolytopeFile {
    pub n: usize,
    pub vertices: Vec<Vec<Coordinate>>,
}

impl PolytopeFile {
    /// True when some coordinate was written as an exact string.
    pub fn has_exact_coordinates(&self) -> bool {
        self.vertices
            .iter()
            .flatten()
            .any(|c| matches!(c, Coordinate::Exact(_)))
    }

    pub fn float_vertices(&self) -> Vec<Vec<f64>> {
        self.vertices
            .iter()
            .map(|v| v.iter().map(Coordinate::to_f64).collect())
            .collect()
    }

    /// Builds the hull; `exact` selects rational arithmetic for the face
    /// lattice.
    pub fn to_polytope(&self, exact: bool, tol: &Tolerance) -> Result<Polytope> {
        if exact {
            let pts = self
                .vertices
                .iter()
                .map(|v| v.iter().map(Coordinate::to_rational).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()?;
            Polytope::hull_exact(self.n, &pts, tol)
        } else {
            Polytope::hull(self.n, &self.float_vertices(), tol)
        }
    }
}

fn as_usize(v: &Value, what: &str) -> Result<usize> {
    v.as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| Error::Parse(format!("{what} must be a non-negative integer")))
}

fn coordinate(v: &Value) -> Result<Coordinate> {
    match v {
        Value::Number(x) => x
            .as_f64()
            .map(Coordinate::Float)
            .ok_or_else(|| Error::Parse(format!("bad number {x}"))),
        Value::String(s) => parse_rational(s).map(Coordinate::Exact),
        other => Err(Error::Parse(format!("coordinate must be a number or string, got {other}"))),
    }
}

pub fn parse_polytope(text: &str) -> Result<PolytopeFile> {
    let v: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let n = as_usize(v.get("n").ok_or_else(|| Error::Parse("missing field \"n\"".into()))?, "n")?;
    let rows = v
        .get("vertices")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse("missing array \"vertices\"".into()))?;
    let mut vertices = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        let row = row
            .as_array()
            .ok_or_else(|| Error::Parse(format!("vertex {i} is not an array")))?;
        if row.len() != 2 * n {
            return Err(Error::Parse(format!(
                "vertex {i} has {} coordinates, expected {}",
                row.len(),
                2 * n
            )));
        }
        vertices.push(row.iter().map(coordinate).collect::<Result<Vec<_>>>()?);
    }
    Ok(PolytopeFile { n, vertices })
}

pub fn read_polytope(path: &std::path::Path) -> Result<PolytopeFile> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    parse_polytope(&text)
}

/// Serializes floating-point vertices in the polytope file format.
pub fn polytope_to_json(n: usize, vertices: &[Vec<f64>]) -> String {
    serde_json::json!({ "n": n, "vertices": vertices }).to_string()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BodyDescriptor {
    pub kind: String,
    pub n: usize,
    #[serde(rename = "Q", default, skip_serializing_if = "Option::is_none")]
    pub q: Option<Vec<Vec<f64>>>,
}

impl BodyDescriptor {
    pub fn to_body(&self) -> Result<SupportBody> {
        match self.kind.as_str() {
            "ball" => SupportBody::ball(self.n),
            "lower_ball" => SupportBody::lower_ball(self.n),
            "ellipsoid" => {
                let rows = self
                    .q
                    .as_ref()
                    .ok_or_else(|| Error::Parse("ellipsoid needs a \"Q\" matrix".into()))?;
                let dim = rows.len();
                if rows.iter().any(|r| r.len() != dim) {
                    return Err(Error::Parse("\"Q\" must be square".into()));
                }
                let q = DMatrix::from_fn(dim, dim, |i, j| rows[i][j]);
                SupportBody::ellipsoid(self.n, q)
            }
            other => Err(Error::Parse(format!("unknown body kind {other:?}"))),
        }
    }
}

pub fn parse_body(text: &str) -> Result<BodyDescriptor> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

pub fn read_body(path: &std::path::Path) -> Result<BodyDescriptor> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    parse_body(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationals() {
        assert_eq!(parse_rational("-3/4").unwrap(), BigRational::new((-3).into(), 4.into()));
        assert_eq!(parse_rational("7").unwrap(), BigRational::from_integer(7.into()));
        assert_eq!(parse_rational("-0.25").unwrap(), BigRational::new((-1).into(), 4.into()));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
    }

    #[test]
    fn polytope_round_trip() {
        let text = r#"{"n": 1, "vertices": [[1, 0], [0, "1"], [-1, 0], [0, "-1/1"]]}"#;
        let f = parse_polytope(text).unwrap();
        assert!(f.has_exact_coordinates());
        let tol = Tolerance::default();
        let p = f.to_polytope(true, &tol).unwrap();
        let q = f.to_polytope(false, &tol).unwrap();
        assert_eq!(p.f_vector(), q.f_vector());
        let again = parse_polytope(&polytope_to_json(1, &f.float_vertices())).unwrap();
        assert_eq!(again.float_vertices(), f.float_vertices());
    }

    #[test]
    fn malformed_polytopes() {
        assert!(parse_polytope("{").is_err());
        assert!(parse_polytope(r#"{"vertices": []}"#).is_err());
        assert!(parse_polytope(r#"{"n": 1, "vertices": [[1, 2, 3]]}"#).is_err());
        assert!(parse_polytope(r#"{"n": 1, "vertices": [[true, 2]]}"#).is_err());
    }

    #[test]
    fn bodies() {
        let b = parse_body(r#"{"kind": "lower_ball", "n": 2}"#).unwrap().to_body().unwrap();
        assert_eq!(b.kind, crate::smooth::BodyKind::Ball2nMinus1);
        let e = parse_body(r#"{"kind": "ellipsoid", "n": 1, "Q": [[2, 0], [0, 1]]}"#).unwrap();
        assert!(e.to_body().is_ok());
        assert!(parse_body(r#"{"kind": "ellipsoid", "n": 1}"#).unwrap().to_body().is_err());
        assert!(parse_body(r#"{"kind": "cube", "n": 1}"#).unwrap().to_body().is_err());
    }
}
