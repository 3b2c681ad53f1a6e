//! JSON interchange. Rationals travel as strings (`"p/q"` or `"p"`), matrices
//! as row-major arrays of such strings.

use std::collections::BTreeMap;

use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Result, TripleError};
use crate::lie::LieAlgebra;
use crate::linalg::{fmt_rational, parse_rational, zero_vec, BilinearForm, Matrix, Rational, Vector};
use crate::normal_forms::{Family, FamilyParams};
use crate::triple::SymmetricTriple;

pub fn ser_rat<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&fmt_rational(r))
}

pub fn ser_vec<S: Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for r in v {
        seq.serialize_element(&fmt_rational(r))?;
    }
    seq.end()
}

pub fn ser_opt_rat<S: Serializer>(r: &Option<Rational>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match r {
        Some(r) => s.serialize_some(&fmt_rational(r)),
        None => s.serialize_none(),
    }
}

pub fn ser_vecs<S: Serializer>(v: &[Vector], s: S) -> std::result::Result<S::Ok, S::Error> {
    let rows: Vec<Vec<String>> = v.iter().map(|r| r.iter().map(fmt_rational).collect()).collect();
    rows.serialize(s)
}

pub fn ser_matrix<S: Serializer>(m: &Matrix, s: S) -> std::result::Result<S::Ok, S::Error> {
    matrix_to_strings(m).serialize(s)
}

pub fn ser_matrices<S: Serializer>(ms: &[Matrix], s: S) -> std::result::Result<S::Ok, S::Error> {
    let v: Vec<Vec<Vec<String>>> = ms.iter().map(matrix_to_strings).collect();
    v.serialize(s)
}

pub fn matrix_to_strings(m: &Matrix) -> Vec<Vec<String>> {
    (0..m.rows()).map(|i| m.row(i).iter().map(fmt_rational).collect()).collect()
}

/// A scalar in JSON input: either a string `"p/q"` or a number.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(untagged)]
pub enum JsonScalar {
    Str(String),
    Int(i64),
    Float(f64),
}

impl JsonScalar {
    pub fn to_rational(&self) -> Result<Rational> {
        match self {
            JsonScalar::Str(s) => parse_rational(s),
            JsonScalar::Int(i) => Ok(crate::linalg::qi(*i)),
            JsonScalar::Float(f) => parse_rational(&format!("{f}")),
        }
    }
}

pub fn parse_vec(v: &[JsonScalar]) -> Result<Vector> {
    v.iter().map(JsonScalar::to_rational).collect()
}

pub fn parse_matrix(rows: &[Vec<JsonScalar>]) -> Result<Matrix> {
    let parsed: Vec<Vector> = rows.iter().map(|r| parse_vec(r)).collect::<Result<_>>()?;
    let c = parsed.first().map_or(0, Vec::len);
    if parsed.iter().any(|r| r.len() != c) {
        return Err(TripleError::Parse("ragged matrix rows".into()));
    }
    Ok(Matrix::from_rows_with_cols(parsed, c))
}

/// One bracket `[e_i, e_j] = Σ coeffs[k] e_k`.
#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct BracketEntry {
    pub i: usize,
    pub j: usize,
    pub coeffs: BTreeMap<String, JsonScalar>,
}

/// Wire format of a symmetric triple.
#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct TripleJson {
    pub dim: usize,
    pub labels: Vec<String>,
    pub brackets: Vec<BracketEntry>,
    pub gram: Vec<Vec<JsonScalar>>,
    pub h_indices: Vec<usize>,
    pub m_indices: Vec<usize>,
    /// Normal-form parameters the triple was built from, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<serde_json::Value>,
}

impl TripleJson {
    pub fn from_triple(t: &SymmetricTriple) -> Self {
        let alg = t.algebra();
        let n = alg.dim();
        let mut brackets = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let v = alg.bracket_basis(i, j);
                let coeffs: BTreeMap<String, JsonScalar> = v
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| !num_traits::Zero::is_zero(*c))
                    .map(|(k, c)| (k.to_string(), JsonScalar::Str(fmt_rational(c))))
                    .collect();
                if !coeffs.is_empty() {
                    brackets.push(BracketEntry { i, j, coeffs });
                }
            }
        }
        let gram = matrix_to_strings(t.form().gram())
            .into_iter()
            .map(|r| r.into_iter().map(JsonScalar::Str).collect())
            .collect();
        TripleJson {
            dim: n,
            labels: alg.labels().to_vec(),
            brackets,
            gram,
            h_indices: t.h_indices().to_vec(),
            m_indices: t.m_indices().to_vec(),
            params: None,
        }
    }

    pub fn to_triple(&self) -> Result<SymmetricTriple> {
        let n = self.dim;
        if self.labels.len() != n {
            return Err(TripleError::Parse(format!("{} labels for dim {n}", self.labels.len())));
        }
        let mut entries = Vec::new();
        for b in &self.brackets {
            let mut v = zero_vec(n);
            for (k, c) in &b.coeffs {
                let k: usize = k
                    .parse()
                    .map_err(|_| TripleError::Parse(format!("bracket key {k:?} is not an index")))?;
                if k >= n {
                    return Err(TripleError::Parse(format!("bracket index {k} out of range")));
                }
                v[k] = c.to_rational()?;
            }
            entries.push((b.i, b.j, v));
        }
        let alg = LieAlgebra::from_brackets(self.labels.clone(), &entries)?;
        let gram = parse_matrix(&self.gram)?;
        if gram.rows() != n || gram.cols() != n {
            return Err(TripleError::Parse("gram has wrong shape".into()));
        }
        let form = BilinearForm::new(gram)?;
        SymmetricTriple::new(alg, form, self.h_indices.clone(), self.m_indices.clone())
    }
}

/// Serializes a triple as pretty JSON.
pub fn triple_to_json(t: &SymmetricTriple) -> String {
    serde_json::to_string_pretty(&TripleJson::from_triple(t)).expect("serializable")
}

/// Parses a triple; malformed JSON reports line and column.
pub fn triple_from_json(s: &str) -> Result<SymmetricTriple> {
    let tj: TripleJson = serde_json::from_str(s).map_err(|e| {
        TripleError::Parse(e.to_string())
    })?;
    tj.to_triple()
}

/// Triple JSON carrying the normal-form parameters it was built from.
pub fn document_to_json(t: &SymmetricTriple, p: Option<&FamilyParams>) -> String {
    let mut tj = TripleJson::from_triple(t);
    tj.params = p.map(FamilyParams::to_json);
    serde_json::to_string_pretty(&tj).expect("serializable")
}

/// Parses a triple together with its optional `params` block.
pub fn document_from_json(s: &str) -> Result<(SymmetricTriple, Option<FamilyParams>)> {
    let tj: TripleJson = serde_json::from_str(s).map_err(|e| {
        TripleError::Parse(e.to_string())
    })?;
    let t = tj.to_triple()?;
    let p = match &tj.params {
        None => None,
        Some(v) => {
            let fam = v
                .get("family")
                .and_then(|f| f.as_str())
                .ok_or_else(|| TripleError::Parse("params block lacks a \"family\" string".into()))?;
            Some(FamilyParams::from_json(Family::parse(fam)?, v)?)
        }
    };
    Ok((t, p))
}

