//! JSON file formats shared by the CLI, the examples and the fixtures.
//!
//! Matrix: `{"n", "scale_k", "a": [[int]], "b": [[int]]}` meaning
//! `Q = (A + B√2)/√2^scale_k`. Integers outside the i64 range are written as
//! decimal strings and accepted back in either form.
//!
//! Circuit: `{"n", "layers": [[{"kind", "q"}]], "t_count"}`.

use std::fmt;
use std::path::Path;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::ring::RingScalar;
use crate::somat::{GeneratorId, TransferMatrix};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JsonInt(pub BigInt);

impl Serialize for JsonInt {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self.0.to_i64() {
            Some(v) => s.serialize_i64(v),
            None => s.serialize_str(&self.0.to_string()),
        }
    }
}

struct JsonIntVisitor;

impl Visitor<'_> for JsonIntVisitor {
    type Value = JsonInt;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("an integer or a decimal string")
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<JsonInt, E> {
        Ok(JsonInt(v.into()))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<JsonInt, E> {
        Ok(JsonInt(v.into()))
    }

    fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<JsonInt, E> {
        if v.fract() == 0.0 && v.abs() < 9.0e15 {
            Ok(JsonInt((v as i64).into()))
        } else {
            Err(E::custom(format!("non-integer matrix component {v}")))
        }
    }

    fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<JsonInt, E> {
        v.parse::<BigInt>().map(JsonInt).map_err(|_| E::custom(format!("bad integer string {v:?}")))
    }
}

impl<'de> Deserialize<'de> for JsonInt {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        d.deserialize_any(JsonIntVisitor)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixJson {
    pub n: usize,
    pub scale_k: u32,
    pub a: Vec<Vec<JsonInt>>,
    pub b: Vec<Vec<JsonInt>>,
}

impl MatrixJson {
    pub fn from_matrix(q: &TransferMatrix) -> Self {
        let d = q.dim();
        let k = q.k_max();
        let scaled = q.scaled(k);
        let rows = |f: &dyn Fn(usize) -> BigInt| -> Vec<Vec<JsonInt>> {
            (0..d).map(|i| (0..d).map(|j| JsonInt(f(i * d + j))).collect()).collect()
        };
        MatrixJson {
            n: q.n(),
            scale_k: k,
            a: rows(&|t| scaled[t].a.clone()),
            b: rows(&|t| scaled[t].b.clone()),
        }
    }

    pub fn to_matrix(&self) -> Result<TransferMatrix> {
        let d = 2 * self.n;
        let shape_ok = |m: &Vec<Vec<JsonInt>>| m.len() == d && m.iter().all(|r| r.len() == d);
        if self.n == 0 || !shape_ok(&self.a) || !shape_ok(&self.b) {
            return Err(Error::Dimension(format!("matrix arrays must be {d}×{d}")));
        }
        let mut entries = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                entries.push(RingScalar::new(self.a[i][j].0.clone(), self.b[i][j].0.clone(), self.scale_k));
            }
        }
        TransferMatrix::from_entries(self.n, entries)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircuitJson {
    pub n: usize,
    pub layers: Vec<Vec<GeneratorId>>,
    pub t_count: usize,
}

impl CircuitJson {
    pub fn from_circuit(c: &Circuit) -> Self {
        CircuitJson { n: c.n, layers: c.layers.clone(), t_count: c.t_count() }
    }

    pub fn to_circuit(&self) -> Result<Circuit> {
        let c = Circuit { n: self.n, layers: self.layers.clone(), provenance: "json".into() };
        c.validate()?;
        if c.t_count() != self.t_count {
            return Err(Error::Parse(format!("t_count {} does not match the layers ({})", self.t_count, c.t_count())));
        }
        Ok(c)
    }
}

pub fn matrix_to_string(q: &TransferMatrix) -> String {
    serde_json::to_string_pretty(&MatrixJson::from_matrix(q)).expect("matrix serializes") + "\n"
}

pub fn circuit_to_string(c: &Circuit) -> String {
    serde_json::to_string_pretty(&CircuitJson::from_circuit(c)).expect("circuit serializes") + "\n"
}

pub fn parse_matrix(text: &str) -> Result<TransferMatrix> {
    let m: MatrixJson = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    m.to_matrix()
}

pub fn parse_circuit(text: &str) -> Result<Circuit> {
    let c: CircuitJson = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    c.to_circuit()
}

pub fn read_matrix(path: &Path) -> Result<TransferMatrix> {
    parse_matrix(&std::fs::read_to_string(path)?)
}

pub fn read_circuit(path: &Path) -> Result<Circuit> {
    parse_circuit(&std::fs::read_to_string(path)?)
}

pub fn write_matrix(path: &Path, q: &TransferMatrix) -> Result<()> {
    std::fs::write(path, matrix_to_string(q))?;
    Ok(())
}

pub fn write_circuit(path: &Path, c: &Circuit) -> Result<()> {
    std::fs::write(path, circuit_to_string(c))?;
    Ok(())
}
