//! Python bindings: atlases, mixed Hodge tables and verification reports.

use nc_hodge_core::atlas::{generic_arrangement, load_atlas, validate_atlas, HodgeType, StrataAtlas};
use nc_hodge_core::cli::{builtin_fixture, FIXTURES};
use nc_hodge_core::complexes::{build, ComplexSelector};
use nc_hodge_core::logforms::{claim_forward_check_with, LogChart};
use nc_hodge_core::mhs::{compute_table, MixedHodgeTable};
use nc_hodge_core::report::Report;
use nc_hodge_core::suites::{run_suite, LogformsOptions};
use pyo3::exceptions::{PyKeyError, PyValueError};
use pyo3::prelude::*;

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

#[pyclass(name = "Atlas", module = "nc_hodge", frozen)]
struct PyAtlas {
    inner: StrataAtlas,
}

#[pymethods]
impl PyAtlas {
    /// Generic arrangement of `m` hyperplanes in P^n.
    #[staticmethod]
    fn generic(n: usize, m: usize) -> PyResult<Self> {
        generic_arrangement(n, m).map(|inner| PyAtlas { inner }).map_err(value_error)
    }

    #[staticmethod]
    fn from_json(document: &str) -> PyResult<Self> {
        load_atlas(document).map(|inner| PyAtlas { inner }).map_err(value_error)
    }

    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        let text = std::fs::read_to_string(path).map_err(value_error)?;
        Self::from_json(&text)
    }

    #[staticmethod]
    fn fixture(name: &str) -> PyResult<Self> {
        let doc = builtin_fixture(name).ok_or_else(|| PyKeyError::new_err(name.to_string()))?;
        Self::from_json(doc)
    }

    #[staticmethod]
    fn fixtures() -> Vec<&'static str> {
        FIXTURES.iter().map(|(name, _)| *name).collect()
    }

    #[getter]
    fn ambient_dimension(&self) -> usize {
        self.inner.ambient_dimension()
    }

    fn labels(&self) -> Vec<String> {
        self.inner.stratum_ids().map(|s| self.inner.label(s).to_string()).collect()
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    /// Violated axioms as `(check, location, witness)`; empty when valid.
    fn validate(&self) -> Vec<(String, String, String)> {
        validate_atlas(&self.inner)
            .violations
            .into_iter()
            .map(|v| (v.check, v.location, v.witness))
            .collect()
    }

    /// Mixed Hodge table of the complex named by `selector` ("log", "xd", "nbhd:<label>", ...).
    fn table(&self, selector: &str) -> PyResult<Table> {
        let which = ComplexSelector::parse(selector).map_err(value_error)?;
        let rows = build(&self.inner, &which).map_err(value_error)?;
        compute_table(&rows).map(|inner| Table { inner }).map_err(value_error)
    }

    fn __repr__(&self) -> String {
        format!("Atlas(dim={}, strata={})", self.inner.ambient_dimension(), self.inner.strata().len())
    }
}

#[pyclass(module = "nc_hodge", frozen)]
struct Table {
    inner: MixedHodgeTable,
}

#[pymethods]
impl Table {
    #[getter]
    fn complex(&self) -> String {
        self.inner.complex.clone()
    }

    fn betti(&self, degree: i32) -> usize {
        self.inner.betti(degree)
    }

    fn dim(&self, degree: i32, weight: i32, p: i32, q: i32) -> usize {
        self.inner.dim(degree, weight, HodgeType(p, q))
    }

    fn weight_dim(&self, degree: i32, weight: i32) -> usize {
        self.inner.weight_dim(degree, weight)
    }

    /// Nonzero entries as `(degree, weight, (p, q), dim)`.
    fn entries(&self) -> Vec<(i32, i32, (i32, i32), usize)> {
        self.inner
            .degrees
            .iter()
            .flat_map(|d| d.entries.iter().map(move |e| (d.degree, e.weight, (e.hodge.0, e.hodge.1), e.dim)))
            .collect()
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    fn to_text(&self) -> String {
        self.inner.to_text()
    }

    fn __repr__(&self) -> String {
        self.inner.to_text()
    }
}

#[pyclass(name = "Report", module = "nc_hodge", frozen)]
struct PyReport {
    inner: Report,
}

#[pymethods]
impl PyReport {
    #[getter]
    fn suite(&self) -> String {
        self.inner.suite.clone()
    }

    #[getter]
    fn passed(&self) -> bool {
        self.inner.passed()
    }

    /// Failed checks as `(check, location, expected, actual)`.
    fn failures(&self) -> Vec<(String, String, String, String)> {
        self.inner
            .failures()
            .map(|c| (c.check.clone(), c.location.clone(), c.expected.clone(), c.actual.clone()))
            .collect()
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    fn to_text(&self) -> String {
        self.inner.to_text()
    }

    fn __len__(&self) -> usize {
        self.inner.checks.len()
    }

    fn __repr__(&self) -> String {
        let failed = self.inner.failures().count();
        format!("Report({}, {} checks, {} failed)", self.inner.suite, self.inner.checks.len(), failed)
    }
}

/// Runs a named verification suite. `atlas` is required except for "logforms".
#[pyfunction]
#[pyo3(signature = (suite, atlas=None, seed=0, trials=100, max_n=4, degree_bound=3))]
fn verify(
    suite: &str,
    atlas: Option<&PyAtlas>,
    seed: u64,
    trials: usize,
    max_n: usize,
    degree_bound: u32,
) -> PyResult<PyReport> {
    let opts = LogformsOptions { seed, trials, max_n, degree_bound };
    run_suite(suite, atlas.map(|a| &a.inner), &opts)
        .map(|inner| PyReport { inner })
        .map_err(value_error)
}

/// Residue containment check on one chart; returns `(passed, generators, failures)`.
#[pyfunction]
#[pyo3(signature = (n, l, k, j, p, seed=0, degree_bound=3, trials=100))]
#[allow(clippy::too_many_arguments)]
fn claim_check(
    n: usize,
    l: usize,
    k: usize,
    j: Vec<usize>,
    p: usize,
    seed: u64,
    degree_bound: u32,
    trials: usize,
) -> PyResult<(bool, usize, Vec<String>)> {
    let chart = LogChart::new(n, l, k, &j).map_err(value_error)?;
    let c = claim_forward_check_with(&chart, p, seed, degree_bound, trials);
    Ok((c.passed(), c.generators, c.failures))
}

#[pyfunction]
fn complexes() -> Vec<String> {
    ComplexSelector::standard().iter().map(|c| c.to_string()).collect()
}

#[pymodule]
fn nc_hodge(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyAtlas>()?;
    m.add_class::<Table>()?;
    m.add_class::<PyReport>()?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(claim_check, m)?)?;
    m.add_function(wrap_pyfunction!(complexes, m)?)?;
    Ok(())
}
