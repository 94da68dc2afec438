//! Serde helpers: complex numbers serialize as `[re, im]` pairs.

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub mod complex_pair {
    use super::*;

    pub fn serialize<S: Serializer>(c: &Complex64, ser: S) -> Result<S::Ok, S::Error> {
        (c.re, c.im).serialize(ser)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Complex64, D::Error> {
        let (re, im) = <(f64, f64)>::deserialize(de)?;
        Ok(Complex64::new(re, im))
    }
}

pub mod complex_pair_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Complex64], ser: S) -> Result<S::Ok, S::Error> {
        let pairs: Vec<(f64, f64)> = v.iter().map(|c| (c.re, c.im)).collect();
        pairs.serialize(ser)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Vec<Complex64>, D::Error> {
        let pairs = Vec::<(f64, f64)>::deserialize(de)?;
        Ok(pairs
            .into_iter()
            .map(|(re, im)| Complex64::new(re, im))
            .collect())
    }
}
