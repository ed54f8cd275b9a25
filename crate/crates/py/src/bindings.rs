//! PyO3 wrappers around the core types and operations.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use maxdiv::dispersion;
use maxdiv::distance::{self, Kernel, PointSet};
use maxdiv::intersection;
use maxdiv::local_search;
use maxdiv::matroid;
use maxdiv::oracle;
use maxdiv::submodular;

fn err(e: maxdiv::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

#[pyclass(name = "DistanceMatrix")]
pub struct PyDistanceMatrix {
    inner: distance::DistanceMatrix,
}

#[pymethods]
impl PyDistanceMatrix {
    /// Build pairwise distances from points under a named kernel.
    #[staticmethod]
    fn from_points(points: Vec<Vec<f64>>, kernel: &str) -> PyResult<Self> {
        let kernel: Kernel = kernel.parse().map_err(err)?;
        let ps = PointSet::from_coords(points).map_err(err)?;
        let inner = distance::DistanceMatrix::from_points(&ps, kernel).map_err(err)?;
        Ok(PyDistanceMatrix { inner })
    }

    /// Wrap a precomputed symmetric matrix given as rows.
    #[staticmethod]
    fn from_entries(rows: Vec<Vec<f64>>) -> PyResult<Self> {
        let n = rows.len();
        let mut flat = Vec::with_capacity(n * n);
        for row in &rows {
            if row.len() != n {
                return Err(PyValueError::new_err("matrix must be square"));
            }
            flat.extend_from_slice(row);
        }
        let inner = distance::DistanceMatrix::from_entries(n, flat).map_err(err)?;
        Ok(PyDistanceMatrix { inner })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    fn get(&self, a: usize, b: usize) -> PyResult<f64> {
        if a >= self.inner.n() || b >= self.inner.n() {
            return Err(PyValueError::new_err("index out of range"));
        }
        Ok(self.inner.get(a, b))
    }

    /// (holds, witness): witness is a zero-sum vector with positive
    /// quadratic form when the property fails.
    #[pyo3(signature = (tol = 1e-9))]
    fn verify_negative_type(&self, tol: f64) -> (bool, Option<Vec<f64>>) {
        let check = distance::verify_negative_type(&self.inner, tol);
        (check.holds, check.witness)
    }

    fn distance_evals(&self) -> u64 {
        self.inner.evals()
    }

    fn reset_counters(&self) {
        self.inner.reset_evals();
    }
}

#[pyclass(name = "Matroid")]
pub struct PyMatroid {
    inner: matroid::Matroid,
}

#[pymethods]
impl PyMatroid {
    #[staticmethod]
    fn uniform(n: usize, k: usize) -> Self {
        PyMatroid {
            inner: matroid::Matroid::uniform(n, k),
        }
    }

    #[staticmethod]
    fn partition(n: usize, blocks: Vec<Vec<usize>>, capacities: Vec<usize>) -> PyResult<Self> {
        let inner =
            matroid::Matroid::partition_from_blocks(n, &blocks, &capacities).map_err(err)?;
        Ok(PyMatroid { inner })
    }

    #[staticmethod]
    fn explicit(n: usize, independent_sets: Vec<Vec<usize>>) -> PyResult<Self> {
        let inner = matroid::Matroid::explicit(n, independent_sets).map_err(err)?;
        Ok(PyMatroid { inner })
    }

    #[getter]
    fn rank(&self) -> usize {
        self.inner.rank()
    }

    #[getter]
    fn ground_size(&self) -> usize {
        self.inner.ground_size()
    }

    fn is_independent(&self, set: Vec<usize>) -> bool {
        self.inner.is_independent(&set)
    }

    fn is_basis(&self, set: Vec<usize>) -> bool {
        self.inner.is_basis(&set)
    }

    fn oracle_calls(&self) -> u64 {
        self.inner.calls()
    }
}

#[pyclass(name = "Intersection")]
pub struct PyIntersection {
    inner: matroid::IntersectionConstraint,
}

#[pymethods]
impl PyIntersection {
    #[new]
    fn new(m1: &PyMatroid, m2: &PyMatroid) -> PyResult<Self> {
        let inner =
            matroid::IntersectionConstraint::new(m1.inner.clone(), m2.inner.clone())
                .map_err(err)?;
        Ok(PyIntersection { inner })
    }

    #[getter]
    fn k_common(&self) -> usize {
        self.inner.k_common()
    }

    fn is_common_independent(&self, set: Vec<usize>) -> bool {
        self.inner.is_common_independent(&set)
    }

    fn augment_to_maximal(&self, set: Vec<usize>) -> Vec<usize> {
        self.inner.augment_to_maximal(&set)
    }
}

#[pyclass(name = "Submodular")]
pub struct PySubmodular {
    inner: submodular::SubmodularFn,
}

#[pymethods]
impl PySubmodular {
    #[staticmethod]
    fn linear(weights: Vec<f64>) -> PyResult<Self> {
        Ok(PySubmodular {
            inner: submodular::SubmodularFn::linear(weights).map_err(err)?,
        })
    }

    #[staticmethod]
    #[pyo3(signature = (n, types, type_weights = None))]
    fn coverage(n: usize, types: Vec<Vec<usize>>, type_weights: Option<Vec<f64>>) -> PyResult<Self> {
        Ok(PySubmodular {
            inner: submodular::SubmodularFn::coverage(n, types, type_weights).map_err(err)?,
        })
    }

    #[staticmethod]
    fn explicit(n: usize, table: Vec<f64>) -> PyResult<Self> {
        Ok(PySubmodular {
            inner: submodular::SubmodularFn::explicit(n, table).map_err(err)?,
        })
    }

    fn value(&self, set: Vec<usize>) -> f64 {
        self.inner.value(&set)
    }

    #[getter]
    fn curvature(&self) -> f64 {
        submodular::curvature(&self.inner)
    }

    /// Linear weights of the decomposition f = l + f'.
    fn decompose(&self) -> PyResult<Vec<f64>> {
        Ok(submodular::decompose(&self.inner).map_err(err)?.l_weights)
    }
}

fn trace_dict<'py>(
    py: Python<'py>,
    set: &[usize],
    value: f64,
    trace: &local_search::RunTrace,
) -> PyResult<Bound<'py, PyDict>> {
    let out = PyDict::new(py);
    out.set_item("set", set.to_vec())?;
    out.set_item("value", value)?;
    out.set_item("start_value", trace.start_value)?;
    out.set_item("iterations", trace.iterations.len())?;
    out.set_item("oracle_calls", trace.oracle_calls)?;
    out.set_item("distance_evals", trace.distance_evals)?;
    out.set_item("warnings", trace.warnings.clone())?;
    Ok(out)
}

#[pyfunction]
fn dispersion_value(d: &PyDistanceMatrix, set: Vec<usize>) -> f64 {
    dispersion::dispersion(&d.inner, &set)
}

#[pyfunction]
fn cross_sum(d: &PyDistanceMatrix, a: Vec<usize>, b: Vec<usize>) -> f64 {
    dispersion::cross_sum(&d.inner, &a, &b)
}

#[pyfunction]
fn default_iterations(k: usize) -> u64 {
    local_search::default_iterations(k)
}

#[pyfunction]
#[pyo3(signature = (d, m, iterations = None))]
fn run_local_search<'py>(
    py: Python<'py>,
    d: &PyDistanceMatrix,
    m: &PyMatroid,
    iterations: Option<u64>,
) -> PyResult<Bound<'py, PyDict>> {
    let ell = iterations.unwrap_or_else(|| local_search::default_iterations(m.inner.rank()));
    let (set, trace) = local_search::local_search(&d.inner, &m.inner, ell);
    trace_dict(py, &set, trace.end_value, &trace)
}

#[pyfunction]
fn greedy_baseline(d: &PyDistanceMatrix, m: &PyMatroid) -> Vec<usize> {
    local_search::greedy_baseline(&d.inner, &m.inner)
}

#[pyfunction]
fn brute_force(d: &PyDistanceMatrix, m: &PyMatroid) -> PyResult<(Vec<usize>, f64)> {
    oracle::brute_force_msd(&d.inner, &m.inner).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (d, c, p = 2, iterations = None))]
fn run_intersection_local_search<'py>(
    py: Python<'py>,
    d: &PyDistanceMatrix,
    c: &PyIntersection,
    p: usize,
    iterations: Option<u64>,
) -> PyResult<Bound<'py, PyDict>> {
    let ell = iterations
        .unwrap_or_else(|| intersection::default_intersection_iterations(c.inner.k_common()));
    let (set, trace) =
        intersection::intersection_local_search(&d.inner, &c.inner, p, ell).map_err(err)?;
    trace_dict(py, &set, trace.end_value, &trace)
}

#[pyfunction]
fn brute_force_intersection(d: &PyDistanceMatrix, c: &PyIntersection) -> PyResult<(Vec<usize>, f64)> {
    oracle::brute_force_intersection(&d.inner, &c.inner).map_err(err)
}

#[pyfunction]
fn ptas_schedule<'py>(py: Python<'py>, epsilon: f64, k_common: usize) -> PyResult<Bound<'py, PyDict>> {
    let s = intersection::ptas_schedule(epsilon, k_common).map_err(err)?;
    let out = PyDict::new(py);
    out.set_item(
        "mode",
        match s.mode {
            intersection::ScheduleMode::Enumerate => "enumerate",
            intersection::ScheduleMode::Search => "search",
        },
    )?;
    out.set_item("p", s.p)?;
    out.set_item("ell", s.ell)?;
    Ok(out)
}

#[pyfunction]
#[pyo3(signature = (d, m, f, potential = "auto", iterations = 10_000))]
fn run_combined_local_search<'py>(
    py: Python<'py>,
    d: &PyDistanceMatrix,
    m: &PyMatroid,
    f: &PySubmodular,
    potential: &str,
    iterations: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let mode = match potential {
        "auto" => {
            if submodular::curvature(&f.inner) == 0.0 {
                submodular::PotentialMode::LinearExact
            } else {
                submodular::PotentialMode::Oblivious
            }
        }
        other => other.parse().map_err(err)?,
    };
    let (set, trace) =
        submodular::combined_local_search(&d.inner, &m.inner, &f.inner, mode, iterations)
            .map_err(err)?;
    let (dv, fv, g) = submodular::combined_objective(&d.inner, &f.inner, &set);
    let out = trace_dict(py, &set, g, &trace)?;
    out.set_item("dispersion", dv)?;
    out.set_item("submodular", fv)?;
    out.set_item("potential", mode.to_string())?;
    Ok(out)
}

#[pyfunction]
fn brute_force_combined<'py>(
    py: Python<'py>,
    d: &PyDistanceMatrix,
    m: &PyMatroid,
    f: &PySubmodular,
) -> PyResult<Bound<'py, PyDict>> {
    let opt = oracle::brute_force_combined(&d.inner, &m.inner, &f.inner).map_err(err)?;
    let out = PyDict::new(py);
    out.set_item("set", opt.set)?;
    out.set_item("g", opt.g)?;
    out.set_item("dispersion", opt.dispersion)?;
    out.set_item("submodular", opt.submodular)?;
    out.set_item("lambda_d", opt.lambda_d)?;
    out.set_item("lambda_f", opt.lambda_f)?;
    Ok(out)
}

pub fn register(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyDistanceMatrix>()?;
    m.add_class::<PyMatroid>()?;
    m.add_class::<PyIntersection>()?;
    m.add_class::<PySubmodular>()?;
    m.add_function(wrap_pyfunction!(dispersion_value, m)?)?;
    m.add_function(wrap_pyfunction!(cross_sum, m)?)?;
    m.add_function(wrap_pyfunction!(default_iterations, m)?)?;
    m.add_function(wrap_pyfunction!(run_local_search, m)?)?;
    m.add_function(wrap_pyfunction!(greedy_baseline, m)?)?;
    m.add_function(wrap_pyfunction!(brute_force, m)?)?;
    m.add_function(wrap_pyfunction!(run_intersection_local_search, m)?)?;
    m.add_function(wrap_pyfunction!(brute_force_intersection, m)?)?;
    m.add_function(wrap_pyfunction!(ptas_schedule, m)?)?;
    m.add_function(wrap_pyfunction!(run_combined_local_search, m)?)?;
    m.add_function(wrap_pyfunction!(brute_force_combined, m)?)?;
    Ok(())
}
