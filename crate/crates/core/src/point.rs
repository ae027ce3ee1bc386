//! Points and tangent vectors in `C^n`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// A point of `C^n`, stored as its complex coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point(pub Vec<C64>);

impl Point {
    pub fn new(coords: Vec<C64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::Input("a point needs at least one coordinate".into()));
        }
        if coords.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::Input("non-finite coordinate".into()));
        }
        Ok(Point(coords))
    }

    /// Point with real coordinates.
    pub fn real(coords: &[f64]) -> Self {
        Point(coords.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn scalar(z: C64) -> Self {
        Point(vec![z])
    }

    pub fn zeros(n: usize) -> Self {
        Point(vec![C64::new(0.0, 0.0); n])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[C64] {
        &self.0
    }

    pub fn norm(&self) -> f64 {
        norm(&self.0)
    }

    pub fn dist(&self, other: &Point) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn sub(&self, other: &Point) -> Vec<C64> {
        self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect()
    }

    /// `self + t * v`
    pub fn offset(&self, v: &[C64], t: C64) -> Point {
        Point(self.0.iter().zip(v).map(|(a, b)| a + t * b).collect())
    }

    pub fn lerp(&self, other: &Point, t: f64) -> Point {
        Point(self.0.iter().zip(&other.0).map(|(a, b)| a + (b - a) * t).collect())
    }
}

impl From<Vec<C64>> for Point {
    fn from(v: Vec<C64>) -> Self {
        Point(v)
    }
}

/// A tangent vector `X` attached to a base point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tangent {
    pub base: Point,
    pub direction: Vec<C64>,
}

impl Tangent {
    pub fn new(base: Point, direction: Vec<C64>) -> Result<Self> {
        if base.dim() != direction.len() {
            return Err(Error::Input(format!(
                "tangent direction has dimension {} but base has {}",
                direction.len(),
                base.dim()
            )));
        }
        Ok(Tangent { base, direction })
    }

    pub fn norm(&self) -> f64 {
        norm(&self.direction)
    }
}

pub fn norm(v: &[C64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// Hermitian product `<a, b> = sum a_i conj(b_i)`.
pub fn hdot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x * y.conj()).sum()
}

pub fn scale(v: &[C64], s: f64) -> Vec<C64> {
    v.iter().map(|c| c * s).collect()
}

pub fn normalize(v: &[C64]) -> Option<Vec<C64>> {
    let n = norm(v);
    if n > 0.0 && n.is_finite() {
        Some(scale(v, 1.0 / n))
    } else {
        None
    }
}

/// Orthonormal basis of the hermitian orthogonal complement of `normal`.
pub fn complement_basis(normal: &[C64]) -> Vec<Vec<C64>> {
    let n = normal.len();
    let mut basis: Vec<Vec<C64>> = Vec::new();
    let Some(nu) = normalize(normal) else {
        return basis;
    };
    let mut frame = vec![nu];
    for k in 0..n {
        let mut e = vec![C64::new(0.0, 0.0); n];
        e[k] = C64::new(1.0, 0.0);
        for f in &frame {
            let p = hdot(&e, f);
            for (ei, fi) in e.iter_mut().zip(f) {
                *ei -= p * fi;
            }
        }
        if norm(&e) > 1e-8 {
            let e = normalize(&e).unwrap();
            frame.push(e.clone());
            basis.push(e);
        }
        if basis.len() + 1 == n {
            break;
        }
    }
    basis
}
