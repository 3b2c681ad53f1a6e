//! Python bindings. Triples cross the boundary as JSON text; structured results
//! are returned as JSON strings for the caller to `json.loads`.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use serde_json::json;
use triplekit_core::analysis::{self, SpectralMode};
use triplekit_core::classification::Decision;
use triplekit_core::geometry;
use triplekit_core::json::{document_from_json, document_to_json, matrix_to_strings};
use triplekit_core::linalg::{fmt_rational, parse_list};
use triplekit_core::normal_forms::{sample_params, Family, FamilyParams};
use triplekit_core::oracle::{self, GridSpec, Tensor};
use triplekit_core::triple::SymmetricTriple;
use triplekit_core::witt;

type Res<T> = Result<T, String>;

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn mode(float_tol: Option<f64>) -> Res<SpectralMode> {
    match float_tol {
        None => Ok(SpectralMode::Exact),
        Some(t) if t > 0.0 && t.is_finite() => Ok(SpectralMode::Float(t)),
        Some(t) => Err(format!("tolerance must be positive, got {t}")),
    }
}

fn load(s: &str) -> Res<(SymmetricTriple, Option<FamilyParams>)> {
    document_from_json(s).map_err(err)
}

pub fn normal_form_impl(family: &str, params_json: Option<&str>) -> Res<String> {
    let fam = Family::parse(family).map_err(err)?;
    let p = match params_json {
        None => sample_params(fam),
        Some(s) => {
            let v: serde_json::Value = serde_json::from_str(s).map_err(err)?;
            FamilyParams::from_json(fam, &v).map_err(err)?
        }
    };
    let t = p.build().map_err(err)?;
    Ok(document_to_json(&t, Some(&p)))
}

pub fn verify_impl(triple: &str) -> Res<String> {
    let (t, _) = load(triple)?;
    let rep = t.verify();
    let mut v = serde_json::to_value(&rep).map_err(err)?;
    v["all_pass"] = json!(rep.all_pass());
    Ok(v.to_string())
}

pub fn ricci_impl(triple: &str) -> Res<String> {
    let (t, _) = load(triple)?;
    let labels = t.m_labels();
    let g = matrix_to_strings(t.ricci().gram());
    Ok(json!({ "labels": labels, "gram": g }).to_string())
}

pub fn decompose_impl(triple: &str) -> Res<String> {
    let (t, _) = load(triple)?;
    serde_json::to_string(&witt::iterate_decompose(&t).map_err(err)?).map_err(err)
}

pub fn invariants_impl(triple: &str, float_tol: Option<f64>) -> Res<String> {
    let (t, _) = load(triple)?;
    serde_json::to_string(&analysis::invariants(&t, mode(float_tol)?).map_err(err)?).map_err(err)
}

/// `(code, payload)`: 0 isomorphic, 1 not isomorphic, 2 unknown.
pub fn isomorphic_impl(a: &str, b: &str, float_tol: Option<f64>) -> Res<(u8, String)> {
    let (t1, p1) = load(a)?;
    let (t2, p2) = load(b)?;
    let d = analysis::triple_isomorphic(&t1, p1.as_ref(), &t2, p2.as_ref(), mode(float_tol)?).map_err(err)?;
    let code = match d {
        Decision::Isomorphic { .. } => 0,
        Decision::NotIsomorphic { .. } => 1,
        Decision::Unknown { .. } => 2,
    };
    Ok((code, serde_json::to_string(&d).map_err(err)?))
}

pub fn metric_eval_impl(f: &str, point: &str) -> Res<Vec<Vec<String>>> {
    let g = geometry::metric_at(&parse_list(point).map_err(err)?, &parse_list(f).map_err(err)?).map_err(err)?;
    Ok(matrix_to_strings(g.gram()))
}

pub fn center_impl(f: &str) -> Res<String> {
    let c = geometry::center_of_transvection_group(&parse_list(f).map_err(err)?).map_err(err)?;
    serde_json::to_string(&c).map_err(err)
}

pub fn enumerate_impl(p: usize, q: usize, values: &str, tensors: &str) -> Res<String> {
    let which = tensors
        .split(',')
        .filter(|x| !x.trim().is_empty())
        .map(|x| match x.trim() {
            "a" => Ok(Tensor::A),
            "b" => Ok(Tensor::B),
            "f" => Ok(Tensor::F),
            o => Err(format!("unknown tensor {o:?}")),
        })
        .collect::<Res<Vec<_>>>()?;
    let spec = GridSpec { p, q, value_set: parse_list(values).map_err(err)?, which_tensors: which };
    serde_json::to_string(&oracle::enumerate_max_center(&spec).map_err(err)?).map_err(err)
}

fn py<T>(r: Res<T>) -> PyResult<T> {
    r.map_err(PyValueError::new_err)
}

/// Triple JSON for a normal form; `params` is a JSON object, omitted for a sample.
#[pyfunction]
#[pyo3(signature = (family, params=None))]
fn normal_form(family: &str, params: Option<&str>) -> PyResult<String> {
    py(normal_form_impl(family, params))
}

#[pyfunction]
fn verify(triple: &str) -> PyResult<String> {
    py(verify_impl(triple))
}

#[pyfunction]
fn ricci(triple: &str) -> PyResult<String> {
    py(ricci_impl(triple))
}

#[pyfunction]
fn decompose(triple: &str) -> PyResult<String> {
    py(decompose_impl(triple))
}

#[pyfunction]
#[pyo3(signature = (triple, float_tol=None))]
fn invariants(triple: &str, float_tol: Option<f64>) -> PyResult<String> {
    py(invariants_impl(triple, float_tol))
}

#[pyfunction]
#[pyo3(signature = (a, b, float_tol=None))]
fn isomorphic(a: &str, b: &str, float_tol: Option<f64>) -> PyResult<(u8, String)> {
    py(isomorphic_impl(a, b, float_tol))
}

#[pyfunction]
fn metric_eval(f: &str, point: &str) -> PyResult<Vec<Vec<String>>> {
    py(metric_eval_impl(f, point))
}

#[pyfunction]
fn center(f: &str) -> PyResult<String> {
    py(center_impl(f))
}

#[pyfunction]
#[pyo3(name = "enumerate", signature = (p, q, values, tensors="b"))]
fn enumerate_census(p: usize, q: usize, values: &str, tensors: &str) -> PyResult<String> {
    py(enumerate_impl(p, q, values, tensors))
}

/// Exact rational `a/b` formatting, exposed for callers building parameter lists.
#[pyfunction]
fn normalize_rational(s: &str) -> PyResult<String> {
    py(triplekit_core::linalg::parse_rational(s).map(|r| fmt_rational(&r)).map_err(err))
}

#[pymodule]
fn triplekit(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(normal_form, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(ricci, m)?)?;
    m.add_function(wrap_pyfunction!(decompose, m)?)?;
    m.add_function(wrap_pyfunction!(invariants, m)?)?;
    m.add_function(wrap_pyfunction!(isomorphic, m)?)?;
    m.add_function(wrap_pyfunction!(metric_eval, m)?)?;
    m.add_function(wrap_pyfunction!(center, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate_census, m)?)?;
    m.add_function(wrap_pyfunction!(normalize_rational, m)?)?;
    Ok(())
}
