//! Serde helpers that write reals with 17 significant digits.
//!
//! The default `serde_json` formatter emits the shortest round-trip form.
//! Problem files are meant to be diffable across tools, so every real is
//! written in fixed `d.dddddddddddddddde±x` form instead. Non-finite values
//! become `null` and read back as NaN.

use serde::ser::SerializeSeq;
use serde::{Deserialize, Deserializer, Serializer};
use serde_json::Number;

pub(crate) fn number(x: f64) -> Option<Number> {
    x.is_finite().then(|| {
        format!("{x:.16e}")
            .parse()
            .expect("formatted f64 is a valid JSON number")
    })
}

pub mod scalar {
    use super::*;

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        serde::Serialize::serialize(&number(*x), s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
    }
}

pub mod option_scalar {
    use super::*;

    pub fn serialize<S: Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        match x {
            Some(x) => super::scalar::serialize(x, s),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
        Option::<f64>::deserialize(d)
    }
}

pub mod vec {
    use super::*;

    pub fn serialize<S: Serializer>(xs: &[f64], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(xs.len()))?;
        for x in xs {
            seq.serialize_element(&number(*x))?;
        }
        seq.end()
    }
}

pub mod matrix {
    use super::*;

    pub fn serialize<S: Serializer>(rows: &[Vec<f64>], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(rows.len()))?;
        for row in rows {
            let row: Vec<Option<Number>> = row.iter().map(|x| number(*x)).collect();
            seq.serialize_element(&row)?;
        }
        seq.end()
    }
}

pub mod option_matrix {
    use super::*;

    pub fn serialize<S: Serializer>(m: &Option<Vec<Vec<f64>>>, s: S) -> Result<S::Ok, S::Error> {
        match m {
            Some(rows) => super::matrix::serialize(rows, s),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Vec<Vec<f64>>>, D::Error> {
        Option::<Vec<Vec<f64>>>::deserialize(d)
    }
}

pub mod option_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &Option<Vec<f64>>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(xs) => super::vec::serialize(xs, s),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Vec<f64>>, D::Error> {
        Option::<Vec<f64>>::deserialize(d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_significant_digits() {
        assert_eq!(number(0.1).unwrap().to_string(), "1.0000000000000001e-1");
        assert!(number(0.0)
            .unwrap()
            .to_string()
            .starts_with("0.0000000000000000e"));
        let back: f64 = number(1.0 / 3.0).unwrap().to_string().parse().unwrap();
        assert_eq!(back, 1.0 / 3.0);
        assert!(number(f64::NAN).is_none());
    }
}
