//! Serde adapters for the JSON wire format.
//!
//! Complex scalars travel as 2-arrays `[re, im]`, matrices as row-major
//! nested arrays, and keyed maps as explicit entry lists so that integer
//! keys survive JSON. Non-finite reals (the `+inf` gap sentinel) travel
//! as `null`.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

// ── Complex scalars ────────────────────────────────────────────────────────

/// `Complex64` ⇄ `[re, im]`.
pub mod complex_pair {
    use super::*;

    pub fn serialize<S: Serializer>(v: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        [v.re, v.im].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        Ok(Complex64::new(re, im))
    }
}

/// `Vec<Complex64>` ⇄ `[[re, im], ...]`.
pub mod complex_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Complex64], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(|c| [c.re, c.im]).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Complex64>, D::Error> {
        let raw = Vec::<[f64; 2]>::deserialize(d)?;
        Ok(raw.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
    }
}

// ── Matrices ───────────────────────────────────────────────────────────────

/// `DMatrix<Complex64>` ⇄ row-major `[[[re, im], ...], ...]`.
pub mod complex_matrix {
    use super::*;

    pub fn serialize<S: Serializer>(m: &DMatrix<Complex64>, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<[f64; 2]>> = (0..m.nrows())
            .map(|r| (0..m.ncols()).map(|c| [m[(r, c)].re, m[(r, c)].im]).collect())
            .collect();
        rows.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<DMatrix<Complex64>, D::Error> {
        let rows = Vec::<Vec<[f64; 2]>>::deserialize(d)?;
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(serde::de::Error::custom("ragged matrix rows"));
        }
        Ok(DMatrix::from_fn(nrows, ncols, |r, c| {
            Complex64::new(rows[r][c][0], rows[r][c][1])
        }))
    }
}

/// `DMatrix<f64>` ⇄ row-major `[[x, ...], ...]`.
pub mod real_matrix {
    use super::*;

    pub fn serialize<S: Serializer>(m: &DMatrix<f64>, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<f64>> = (0..m.nrows())
            .map(|r| (0..m.ncols()).map(|c| m[(r, c)]).collect())
            .collect();
        rows.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<DMatrix<f64>, D::Error> {
        let rows = Vec::<Vec<f64>>::deserialize(d)?;
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(serde::de::Error::custom("ragged matrix rows"));
        }
        Ok(DMatrix::from_fn(nrows, ncols, |r, c| rows[r][c]))
    }
}

// ── Keyed maps ─────────────────────────────────────────────────────────────

/// `BTreeMap<usize, Complex64>` ⇄ `[[n, [re, im]], ...]`.
pub mod complex_map {
    use super::*;

    pub fn serialize<S: Serializer>(
        m: &BTreeMap<usize, Complex64>,
        s: S,
    ) -> Result<S::Ok, S::Error> {
        m.iter()
            .map(|(&n, c)| (n, [c.re, c.im]))
            .collect::<Vec<_>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> Result<BTreeMap<usize, Complex64>, D::Error> {
        let raw = Vec::<(usize, [f64; 2])>::deserialize(d)?;
        Ok(raw
            .into_iter()
            .map(|(n, [re, im])| (n, Complex64::new(re, im)))
            .collect())
    }
}

/// `BTreeMap<(usize, usize), Complex64>` ⇄ `[[n, k, [re, im]], ...]`.
pub mod atom_map {
    use super::*;

    pub fn serialize<S: Serializer>(
        m: &BTreeMap<(usize, usize), Complex64>,
        s: S,
    ) -> Result<S::Ok, S::Error> {
        m.iter()
            .map(|(&(n, k), c)| (n, k, [c.re, c.im]))
            .collect::<Vec<_>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> Result<BTreeMap<(usize, usize), Complex64>, D::Error> {
        let raw = Vec::<(usize, usize, [f64; 2])>::deserialize(d)?;
        Ok(raw
            .into_iter()
            .map(|(n, k, [re, im])| ((n, k), Complex64::new(re, im)))
            .collect())
    }
}

// ── Extended reals ─────────────────────────────────────────────────────────

/// `f64` where `+inf` ⇄ `null` (JSON cannot carry infinities).
pub mod xreal {
    use super::*;

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_some(v)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }
}

/// `BTreeMap<u32, f64>` with `+inf` values as `null`.
pub mod xreal_map {
    use super::*;

    pub fn serialize<S: Serializer>(m: &BTreeMap<u32, f64>, s: S) -> Result<S::Ok, S::Error> {
        m.iter()
            .map(|(&k, &v)| (k, v.is_finite().then_some(v)))
            .collect::<BTreeMap<u32, Option<f64>>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<u32, f64>, D::Error> {
        let raw = BTreeMap::<u32, Option<f64>>::deserialize(d)?;
        Ok(raw
            .into_iter()
            .map(|(k, v)| (k, v.unwrap_or(f64::INFINITY)))
            .collect())
    }
}
