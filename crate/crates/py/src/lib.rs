use pyo3::prelude::*;

mod bindings;

#[pymodule]
fn _maxdiv(m: &Bound<'_, PyModule>) -> PyResult<()> {
    bindings::register(m)
}
