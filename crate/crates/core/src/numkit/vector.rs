use std::ops::{Deref, Index, IndexMut};

use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{Error, Result};

/// A dense real vector of length at least one.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(into = "Vec<f64>")]
pub struct Vector(Vec<f64>);

impl Vector {
    /// Validating constructor for data coming from outside the crate.
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidInput(
                "vector must have at least one entry".into(),
            ));
        }
        if let Some(i) = entries.iter().position(|e| !e.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "vector entry {i} is not finite"
            )));
        }
        Ok(Self(entries))
    }

    pub fn zeros(n: usize) -> Self {
        Self::filled(n, 0.0)
    }

    pub fn ones(n: usize) -> Self {
        Self::filled(n, 1.0)
    }

    pub fn filled(n: usize, value: f64) -> Self {
        assert!(n >= 1, "vector length must be at least one");
        Self(vec![value; n])
    }

    /// `e_j` scaled by `value`.
    pub fn unit(n: usize, j: usize, value: f64) -> Self {
        let mut v = Self::zeros(n);
        v.0[j] = value;
        v
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn norm1(&self) -> f64 {
        self.0.iter().map(|e| e.abs()).sum()
    }

    pub fn norm_inf(&self) -> f64 {
        self.0.iter().fold(0.0, |m, e| m.max(e.abs()))
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn min(&self) -> f64 {
        self.0.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn dot(&self, other: &Vector) -> f64 {
        assert_eq!(self.len(), other.len(), "dot: length mismatch");
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn scale(&self, s: f64) -> Vector {
        Vector(self.0.iter().map(|e| e * s).collect())
    }

    /// `self + alpha * other`.
    pub fn add_scaled(&self, alpha: f64, other: &Vector) -> Vector {
        assert_eq!(self.len(), other.len(), "add_scaled: length mismatch");
        Vector(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + alpha * b)
                .collect(),
        )
    }

    pub fn sub(&self, other: &Vector) -> Vector {
        self.add_scaled(-1.0, other)
    }

    /// `sum |self_i - other_i|`.
    pub fn dist1(&self, other: &Vector) -> f64 {
        assert_eq!(self.len(), other.len(), "dist1: length mismatch");
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).abs())
            .sum()
    }
}

/// Infallible conversion for literals and internally produced data; panics on
/// an empty vector.
impl From<Vec<f64>> for Vector {
    fn from(entries: Vec<f64>) -> Self {
        assert!(!entries.is_empty(), "vector must have at least one entry");
        Self(entries)
    }
}

impl From<Vector> for Vec<f64> {
    fn from(v: Vector) -> Self {
        v.0
    }
}

// Deserialization goes through the validating constructor.
impl<'de> Deserialize<'de> for Vector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let entries = Vec::<f64>::deserialize(d)?;
        Vector::new(entries).map_err(serde::de::Error::custom)
    }
}

impl Deref for Vector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl Index<usize> for Vector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for Vector {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
}
