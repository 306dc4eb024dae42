//! Python bindings. Structures cross the boundary as JSON documents in the
//! same format the command line tool reads and writes.

use clap::Parser;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use cyclic_ainf::ainf::{validate, ClassKey};
use cyclic_ainf::cli::document::{emit_structure, novikov_value, parse_structure_json, read_structure, StructureDocument};
use cyclic_ainf::cli::{self, Cli};
use cyclic_ainf::mc::solve_mc;
use cyclic_ainf::models::{generate as generate_model, GenerateConfig, ModelKind};
use cyclic_ainf::superpotential::psi as psi_of;
use cyclic_ainf::trees::enum_gr_minus;
use cyclic_ainf::Rational;

fn value_err(e: impl ToString) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Random valid fixture as a JSON document.
#[pyfunction]
#[pyo3(signature = (seed, kind = "s3-blocks", levels = 3))]
fn generate(seed: u64, kind: &str, levels: usize) -> PyResult<String> {
    let kind = ModelKind::parse(kind).ok_or_else(|| value_err(format!("unknown model kind {kind:?}")))?;
    let cfg = GenerateConfig { kind, levels, ..Default::default() };
    let s = generate_model(&mut ChaCha8Rng::seed_from_u64(seed), &cfg).map_err(value_err)?;
    serde_json::to_string(&emit_structure(&s)).map_err(value_err)
}

/// Validation problems of a structure document; empty when valid.
#[pyfunction]
fn check(document: &str) -> PyResult<Vec<String>> {
    let doc: StructureDocument = serde_json::from_str(document).map_err(value_err)?;
    let s = read_structure(&doc).map_err(value_err)?;
    Ok(validate(&s))
}

/// `Ψ(b)` at the solver's bounding cochain, as `(coeff_num, coeff_den, exp_num, exp_den)` terms.
#[pyfunction]
fn psi(document: &str) -> PyResult<Vec<(String, String, String, String)>> {
    let s = parse_structure_json(document).map_err(value_err)?;
    let b = solve_mc(&s).map_err(value_err)?.b;
    let v = psi_of(&s, &b).map_err(value_err)?;
    let terms = novikov_value(&v);
    Ok(terms
        .as_array()
        .expect("term list")
        .iter()
        .map(|t| {
            let f = |i: usize| t[i].to_string().trim_matches('"').to_string();
            (f(0), f(1), f(2), f(3))
        })
        .collect())
}

/// Classes of `Gr⁻(k, β)` with integer label energies, as `(tree, |Aut|)`.
#[pyfunction]
fn trees(k: usize, energy: i64, labels: Vec<i64>) -> Vec<(String, usize)> {
    let key = |e: i64| ClassKey::new(Rational::from_integer(e.into()), vec![]);
    let labels: Vec<ClassKey> = labels.into_iter().map(key).collect();
    enum_gr_minus(k, &key(energy), &labels).into_iter().map(|c| (c.tree.to_string(), c.aut)).collect()
}

/// Runs a command line invocation; returns `(passed, text, json)`.
#[pyfunction]
fn run(args: Vec<String>) -> PyResult<(bool, String, String)> {
    let cli = Cli::try_parse_from(std::iter::once("ainf".to_string()).chain(args)).map_err(value_err)?;
    let report = cli::run(&cli).map_err(value_err)?;
    Ok((report.passed(), report.text(), report.json()))
}

#[pymodule]
fn cyclic_ainf_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    m.add_function(wrap_pyfunction!(check, m)?)?;
    m.add_function(wrap_pyfunction!(psi, m)?)?;
    m.add_function(wrap_pyfunction!(trees, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    Ok(())
}
