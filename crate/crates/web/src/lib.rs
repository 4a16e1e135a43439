//! Browser bindings: a Hadamard family explorer, an overlap table for the
//! constructions, and a small MU-vector search. Each export returns JSON.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use mubforge::analysis::check_mu_set;
use mubforge::catalogue::{defect, dita_d6, haagerup_set, structure_flags, CatalogueEntry, Family};
use mubforge::constructions::{construct_complete, tensor_mubs, weighted_design};
use mubforge::numeric::Method;
use mubforge::search::{group_into_bases, mu_vectors_to_pair, SearchConfig};
use mubforge::{Error, HadamardMatrix, Result, ToleranceProfile};

/// Upper bound on restarts accepted from the page.
pub const MAX_RESTARTS: usize = 20_000;

fn parse_params(s: &str) -> Result<Vec<(String, f64)>> {
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| {
            let (k, v) = p
                .split_once('=')
                .ok_or_else(|| Error::domain(format!("`{p}` is not key=value")))?;
            let v = v
                .trim()
                .parse::<f64>()
                .map_err(|_| Error::domain(format!("`{p}` has a non-numeric value")))?;
            Ok((k.trim().to_string(), v))
        })
        .collect()
}

fn matrix_for(name: &str, params: &str) -> Result<HadamardMatrix> {
    let params = parse_params(params)?;
    if name == "dita_d6" {
        return dita_d6();
    }
    let (family, order) = match name.strip_prefix("fourier").and_then(|s| s.parse().ok()) {
        Some(n) => (Family::Fourier, n),
        None => (
            Family::parse(name).ok_or_else(|| Error::domain(format!("unknown family `{name}`")))?,
            6,
        ),
    };
    let values = family
        .param_names()
        .iter()
        .map(|n| {
            params
                .iter()
                .find(|(k, _)| k == n)
                .map(|(_, v)| *v)
                .ok_or_else(|| Error::domain(format!("missing parameter `{n}`")))
        })
        .collect::<Result<Vec<f64>>>()?;
    CatalogueEntry::new(family, order)?.generate(&values)
}

fn turns(h: &HadamardMatrix) -> Vec<Vec<f64>> {
    let m = h.entries();
    (0..m.nrows())
        .map(|i| {
            (0..m.ncols())
                .map(|j| m[(i, j)].arg().rem_euclid(std::f64::consts::TAU) / std::f64::consts::TAU)
                .collect()
        })
        .collect()
}

/// Families with their parameter names.
pub fn family_list() -> Value {
    let mut out: Vec<Value> = Family::ALL
        .iter()
        .filter(|f| **f != Family::Fourier)
        .map(|f| json!({ "name": f.name(), "params": f.param_names() }))
        .collect();
    out.push(json!({ "name": "dita_d6", "params": [] }));
    Value::Array(out)
}

/// Entry phases (in turns) and equivalence invariants of a catalogue matrix.
pub fn explore_family(name: &str, params: &str) -> Result<Value> {
    let h = matrix_for(name, params)?;
    let flags = structure_flags(&h, &ToleranceProfile::default());
    Ok(json!({
        "order": h.dim(),
        "phases": turns(&h),
        "defect": defect(&h).defect,
        "haagerup_set_size": haagerup_set(&h, 1e-6).values.len(),
        "flags": flags,
    }))
}

/// Block table of `|<u|v>|^2` over all vectors of a construction.
pub fn overlap_table(method: &str, d: usize) -> Result<Value> {
    if !(2..=16).contains(&d) {
        return Err(Error::domain("d must lie in 2..=16"));
    }
    let m = Method::parse(method).ok_or_else(|| Error::domain(format!("unknown method `{method}`")))?;
    let set = match m {
        Method::TensorProduct => tensor_mubs(d)?,
        Method::WeightedDesign => weighted_design(d)?,
        other => construct_complete(other, d)?,
    };
    let t = set.overlap_table();
    let rows: Vec<Vec<f64>> = (0..t.nrows()).map(|i| t.row(i).iter().copied().collect()).collect();
    let r = check_mu_set(&set)?;
    Ok(json!({
        "dim": set.dim(),
        "bases": set.len(),
        "table": rows,
        "max_mu_deviation": r.max_mu_deviation,
        "f_value": r.f_value,
    }))
}

/// Vectors MU to `{I, H}` and the bases they form.
pub fn pair_search(name: &str, params: &str, restarts: usize, seed: u64) -> Result<Value> {
    if restarts == 0 || restarts > MAX_RESTARTS {
        return Err(Error::domain(format!("restarts must lie in 1..={MAX_RESTARTS}")));
    }
    let h = matrix_for(name, params)?;
    let sol = mu_vectors_to_pair(&h, &SearchConfig::new(seed, restarts)?)?;
    let bases = if sol.len() <= mubforge::search::MAX_CLIQUE_VERTICES {
        Some(group_into_bases(&sol, ToleranceProfile::default().eps_orth)?.len())
    } else {
        None
    };
    let vectors: Vec<Vec<f64>> = sol
        .vectors
        .iter()
        .map(|v| {
            v.iter()
                .map(|z| z.arg().rem_euclid(std::f64::consts::TAU) / std::f64::consts::TAU)
                .collect()
        })
        .collect();
    Ok(json!({
        "count": sol.len(),
        "bases": bases,
        "converged": sol.converged,
        "coverage_warning": sol.coverage_warning,
        "continuum_suspected": sol.continuum_suspected,
        "vector_phases": vectors,
    }))
}

fn to_js(r: Result<Value>) -> std::result::Result<String, JsError> {
    r.map(|v| v.to_string()).map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen(js_name = familyList)]
pub fn family_list_js() -> String {
    family_list().to_string()
}

#[wasm_bindgen(js_name = exploreFamily)]
pub fn explore_family_js(name: &str, params: &str) -> std::result::Result<String, JsError> {
    to_js(explore_family(name, params))
}

#[wasm_bindgen(js_name = overlapTable)]
pub fn overlap_table_js(method: &str, d: usize) -> std::result::Result<String, JsError> {
    to_js(overlap_table(method, d))
}

#[wasm_bindgen(js_name = pairSearch)]
pub fn pair_search_js(
    name: &str,
    params: &str,
    restarts: usize,
    seed: u64,
) -> std::result::Result<String, JsError> {
    to_js(pair_search(name, params, restarts, seed))
}
