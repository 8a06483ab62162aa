//! On-disk document formats: plain JSON with string rationals so exactness
//! survives serialization, sorted keys so output is byte-deterministic.

use std::collections::BTreeMap;

use ncprob::combinat::MultiIndex;
use ncprob::scalar::{format_q, parse_q, Q};
use ncprob::{FockData, FunctionalData, NCPolynomial, NCSeries, QMatrix};
use num_traits::Zero;
use serde::{Deserialize, Serialize};

/// A truncated series or moment table: coefficients keyed by the
/// comma-separated 1-based letter word ("1,2,1"; empty string = the
/// constant term).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesDocument {
    pub d: usize,
    pub degree: usize,
    pub coeffs: BTreeMap<String, String>,
}

impl SeriesDocument {
    /// Parses and validates every key and value; error messages name the
    /// offending key.
    pub fn entries(&self) -> Result<Vec<(Vec<u8>, Q)>, String> {
        let mut out = Vec::with_capacity(self.coeffs.len());
        for (key, value) in &self.coeffs {
            let idx = MultiIndex::from_key(self.d, key)
                .map_err(|e| format!("key {key:?}: {e}"))?;
            if idx.len() > self.degree {
                return Err(format!("key {key:?}: length exceeds degree {}", self.degree));
            }
            let q = parse_q(value).ok_or_else(|| format!("key {key:?}: bad rational {value:?}"))?;
            out.push((idx.letters().to_vec(), q));
        }
        Ok(out)
    }

    pub fn to_functional(&self) -> Result<FunctionalData, String> {
        let mut phi = FunctionalData::delta_zero(self.d, self.degree);
        for (w, q) in self.entries()? {
            if w.is_empty() {
                if q != Q::from_integer(1.into()) {
                    return Err("key \"\": a moment table has constant term 1".into());
                }
                continue;
            }
            phi.set_moment(&w, q).map_err(|e| e.to_string())?;
        }
        Ok(phi)
    }

    pub fn to_series(&self) -> Result<NCSeries, String> {
        let mut s = NCSeries::zero(self.d, self.degree);
        for (w, q) in self.entries()? {
            s.set_coeff(&w, q).map_err(|e| e.to_string())?;
        }
        Ok(s)
    }

    pub fn from_functional(phi: &FunctionalData) -> Self {
        let mut coeffs = BTreeMap::new();
        for w in ncprob::cumulants::words(phi.d(), 1, phi.cap()) {
            let m = phi.moment(&w);
            if !m.is_zero() {
                coeffs.insert(key_of(&w), format_q(&m));
            }
        }
        SeriesDocument { d: phi.d(), degree: phi.cap(), coeffs }
    }

    pub fn from_series(s: &NCSeries) -> Self {
        let coeffs = s
            .terms()
            .map(|(w, c)| (key_of(w), format_q(c)))
            .collect();
        SeriesDocument { d: s.d(), degree: s.cap(), coeffs }
    }

    pub fn from_polynomial(p: &NCPolynomial) -> Self {
        let coeffs = p
            .terms()
            .map(|(w, c)| (key_of(w), format_q(c)))
            .collect();
        SeriesDocument { d: p.d(), degree: p.degree(), coeffs }
    }
}

pub fn key_of(w: &[u8]) -> String {
    w.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(",")
}

pub fn parse_word(d: usize, key: &str) -> Result<Vec<u8>, String> {
    Ok(MultiIndex::from_key(d, key)
        .map_err(|e| format!("word {key:?}: {e}"))?
        .letters()
        .to_vec())
}

fn parse_matrix(rows: &[Vec<String>], what: &str) -> Result<QMatrix, String> {
    let mut parsed = Vec::with_capacity(rows.len());
    for row in rows {
        let mut r = Vec::with_capacity(row.len());
        for v in row {
            r.push(parse_q(v).ok_or_else(|| format!("{what}: bad rational {v:?}"))?);
        }
        parsed.push(r);
    }
    QMatrix::from_rows(parsed).map_err(|e| format!("{what}: {e}"))
}

fn matrix_rows(m: &QMatrix) -> Vec<Vec<String>> {
    (0..m.n())
        .map(|r| (0..m.n()).map(|c| format_q(&m.get(r, c))).collect())
        .collect()
}

/// Level-matrix operator data: `C[k-1]` is the diagonal of `C^(k)`
/// (length `d^k`, word-indexed, first letter most significant) and
/// `T[i-1][k]` is the full symmetric matrix `T_i^(k)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FockDocument {
    pub d: usize,
    pub depth: usize,
    #[serde(rename = "C")]
    pub c: Vec<Vec<String>>,
    #[serde(rename = "T")]
    pub t: Vec<Vec<Vec<Vec<String>>>>,
}

impl FockDocument {
    pub fn to_fock(&self) -> Result<FockData, String> {
        let mut c = Vec::with_capacity(self.c.len());
        for (k, diag) in self.c.iter().enumerate() {
            let mut entries = Vec::with_capacity(diag.len());
            for v in diag {
                entries.push(
                    parse_q(v).ok_or_else(|| format!("C[{}]: bad rational {v:?}", k + 1))?,
                );
            }
            c.push(QMatrix::diagonal(entries));
        }
        let mut t = Vec::with_capacity(self.t.len());
        for (i, levels) in self.t.iter().enumerate() {
            let mut ti = Vec::with_capacity(levels.len());
            for (k, rows) in levels.iter().enumerate() {
                ti.push(parse_matrix(rows, &format!("T[{}][{k}]", i + 1))?);
            }
            t.push(ti);
        }
        FockData::new(self.d, self.depth, c, t).map_err(|e| e.to_string())
    }

    pub fn from_fock(data: &FockData) -> Self {
        let c = (1..=data.depth())
            .map(|k| {
                let m = data.c_level(k);
                (0..m.n()).map(|i| format_q(&m.get(i, i))).collect()
            })
            .collect();
        let t = (1..=data.d() as u8)
            .map(|i| (0..=data.depth()).map(|k| matrix_rows(data.t_level(i, k))).collect())
            .collect();
        FockDocument { d: data.d(), depth: data.depth(), c, t }
    }
}

/// Meixner parameter data: `T[i-1]` is the symmetric `d x d` matrix `T_i`
/// and `C` lists the `d²` diagonal entries `C_{ij}` in row-major pair
/// order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeixnerDocument {
    pub d: usize,
    #[serde(rename = "T")]
    pub t: Vec<Vec<Vec<String>>>,
    #[serde(rename = "C")]
    pub c: Vec<String>,
}

impl MeixnerDocument {
    pub fn to_params(&self) -> Result<ncprob::MeixnerParams, String> {
        let mut t = Vec::with_capacity(self.t.len());
        for (i, rows) in self.t.iter().enumerate() {
            t.push(parse_matrix(rows, &format!("T[{}]", i + 1))?);
        }
        let mut diag = Vec::with_capacity(self.c.len());
        for v in &self.c {
            diag.push(parse_q(v).ok_or_else(|| format!("C: bad rational {v:?}"))?);
        }
        ncprob::MeixnerParams::new(t, QMatrix::diagonal(diag)).map_err(|e| e.to_string())
    }
}

/// Input for the general Boolean Fock decomposition: symmetric matrices
/// and the index of the distinguished vacuum basis vector.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GbfDocument {
    pub omega: usize,
    #[serde(rename = "X")]
    pub x: Vec<Vec<Vec<String>>>,
}

impl GbfDocument {
    pub fn to_matrices(&self) -> Result<Vec<QMatrix>, String> {
        self.x
            .iter()
            .enumerate()
            .map(|(i, rows)| parse_matrix(rows, &format!("X[{}]", i + 1)))
            .collect()
    }
}
