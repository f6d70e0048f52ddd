//! Python bindings: grids, fields, the bracket and norms, the closed-form
//! invariant values, and the three constructions (rectangle pair,
//! commuting approximants, radial decay table).

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use pb4::curves::CylinderModel;
use pb4::exponent::Exponent;
use pb4::field::{ScalarField, SymplecticDensity};
use pb4::flexibility::flex_report;
use pb4::grid::Grid2D;
use pb4::highdim::{decay_curve, HighDimSpec};
use pb4::quadrilateral::{
    build_pair, pb4_formula, stokes_defect, verify_lower, Area, BoundStatus, QuadProblem,
};

fn err(e: pb4::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_area(v: &Bound<'_, PyAny>) -> PyResult<Area> {
    if let Ok(x) = v.extract::<f64>() {
        return Area::finite(x).map_err(err);
    }
    let s: String = v.extract()?;
    s.parse().map_err(err)
}

fn parse_exponent(v: &Bound<'_, PyAny>) -> PyResult<Exponent> {
    if let Ok(x) = v.extract::<f64>() {
        return Exponent::finite(x).map_err(err);
    }
    let s: String = v.extract()?;
    s.parse().map_err(err)
}

/// Rectangular sampling grid with optional periodic axes.
#[pyclass(name = "Grid", from_py_object)]
#[derive(Clone)]
struct PyGrid {
    inner: Grid2D,
}

#[pymethods]
impl PyGrid {
    #[new]
    #[pyo3(signature = (x_min, x_max, y_min, y_max, nx, ny, periodic_x = false, periodic_y = false))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        x_min: f64,
        x_max: f64,
        y_min: f64,
        y_max: f64,
        nx: usize,
        ny: usize,
        periodic_x: bool,
        periodic_y: bool,
    ) -> PyResult<Self> {
        Ok(PyGrid {
            inner: Grid2D::new(x_min, x_max, y_min, y_max, nx, ny, periodic_x, periodic_y)
                .map_err(err)?,
        })
    }

    #[getter]
    fn nx(&self) -> usize {
        self.inner.nx()
    }

    #[getter]
    fn ny(&self) -> usize {
        self.inner.ny()
    }

    #[getter]
    fn hx(&self) -> f64 {
        self.inner.hx()
    }

    #[getter]
    fn hy(&self) -> f64 {
        self.inner.hy()
    }

    /// Cell-center coordinates of node (i, j).
    fn node(&self, i: usize, j: usize) -> (f64, f64) {
        (self.inner.x(i), self.inner.y(j))
    }

    fn __repr__(&self) -> String {
        format!(
            "Grid([{}, {}] x [{}, {}], {} x {}, periodic=({}, {}))",
            self.inner.x_min(),
            self.inner.x_max(),
            self.inner.y_min(),
            self.inner.y_max(),
            self.inner.nx(),
            self.inner.ny(),
            self.inner.periodic_x(),
            self.inner.periodic_y()
        )
    }
}

/// Dense scalar field on a grid, row-major.
#[pyclass(name = "Field", from_py_object)]
#[derive(Clone)]
struct PyField {
    inner: ScalarField,
}

#[pymethods]
impl PyField {
    /// Build from a flat row-major value list.
    #[staticmethod]
    fn from_values(grid: &PyGrid, values: Vec<f64>) -> PyResult<Self> {
        Ok(PyField {
            inner: ScalarField::from_values(&grid.inner, values).map_err(err)?,
        })
    }

    /// Sample a Python callable `f(x, y)` at every cell center.
    #[staticmethod]
    fn from_function(grid: &PyGrid, f: Bound<'_, PyAny>) -> PyResult<Self> {
        let g = &grid.inner;
        let mut values = Vec::with_capacity(g.len());
        for j in 0..g.ny() {
            for i in 0..g.nx() {
                let v: f64 = f.call1((g.x(i), g.y(j)))?.extract()?;
                values.push(v);
            }
        }
        Ok(PyField {
            inner: ScalarField::from_values(g, values).map_err(err)?,
        })
    }

    fn values(&self) -> Vec<f64> {
        self.inner.values().to_vec()
    }

    fn get(&self, i: usize, j: usize) -> f64 {
        self.inner.get(i, j)
    }

    fn max_abs(&self) -> f64 {
        self.inner.max_abs()
    }

    /// Field dump in the CSV interchange format.
    fn to_csv(&self) -> PyResult<String> {
        let mut buf = Vec::new();
        self.inner
            .write_csv(&mut buf)
            .map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(String::from_utf8(buf).expect("csv is utf-8"))
    }

    #[staticmethod]
    fn from_csv(text: &str) -> PyResult<Self> {
        Ok(PyField {
            inner: ScalarField::read_csv(text.as_bytes()).map_err(err)?,
        })
    }
}

/// `{F, G} = -(F_x G_y - F_y G_x)` under the unit weight.
#[pyfunction]
fn poisson_bracket(f: &PyField, g: &PyField) -> PyResult<PyField> {
    Ok(PyField {
        inner: pb4::bracket::poisson_bracket(&f.inner, &g.inner, &SymplecticDensity::uniform())
            .map_err(err)?,
    })
}

/// `(∫ |f|^q dx dy)^{1/q}`; `q` may be a number or `"inf"`.
#[pyfunction]
fn lq_norm(f: &PyField, q: &Bound<'_, PyAny>) -> PyResult<f64> {
    pb4::quadrature::lq_norm(&f.inner, parse_exponent(q)?, &SymplecticDensity::uniform())
        .map_err(err)
}

/// Closed-form quadrilateral invariant; returns `(value, exact)` where
/// `exact` is False for the sup-norm lower-bound branch.
#[pyfunction]
fn pb4_formula_py(a: f64, b: &Bound<'_, PyAny>, q: &Bound<'_, PyAny>) -> PyResult<(f64, bool)> {
    let (v, status) = pb4_formula(a, parse_area(b)?, parse_exponent(q)?).map_err(err)?;
    Ok((v, status == BoundStatus::Exact))
}

/// Closed-form curve invariant (three-case formula).
#[pyfunction]
fn pb4_curve_formula_py(
    a: &Bound<'_, PyAny>,
    b: &Bound<'_, PyAny>,
    q: &Bound<'_, PyAny>,
) -> PyResult<f64> {
    pb4::curves::pb4_curve_formula(parse_area(a)?, parse_area(b)?, parse_exponent(q)?).map_err(err)
}

/// Hypersurface product bound `2 vol / n`.
#[pyfunction]
fn product_lower_bound(n: u32, vol: f64) -> PyResult<f64> {
    pb4::highdim::product_lower_bound(n, vol).map_err(err)
}

/// Build the explicit rectangle-model pair and measure it: returns a dict
/// with the measured norm, the closed form, the ratio, and both Stokes
/// integrals.
#[pyfunction]
#[pyo3(signature = (a, b, q, eps = 1e-2, c = None, n = 512))]
fn rectangle_experiment(
    py: Python<'_>,
    a: f64,
    b: f64,
    q: f64,
    eps: f64,
    c: Option<f64>,
    n: usize,
) -> PyResult<Py<PyDict>> {
    let c = c.unwrap_or(b - eps.max(1e-3));
    let qx = Exponent::finite(q).map_err(err)?;
    let area_b = Area::finite(b).map_err(err)?;
    let problem = QuadProblem::new(a, area_b, qx, eps, c).map_err(err)?;
    let grid = Grid2D::new(-0.1, c + 0.1, -0.5, 1.5, n, n, false, false).map_err(err)?;
    let pair = build_pair(&problem, &grid).map_err(err)?;
    let density = SymplecticDensity::uniform();
    let pb = pb4::bracket::poisson_bracket(pair.f(), pair.g(), &density).map_err(err)?;
    let norm = pb4::quadrature::lq_norm(&pb, qx, &density).map_err(err)?;
    let (formula, _) = pb4_formula(a, area_b, qx).map_err(err)?;
    let region = stokes_defect(&pair, pair.region(), &density).map_err(err)?;
    let cert = verify_lower(&pair, q, a, area_b, &density).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("norm", norm)?;
    d.set_item("formula", formula)?;
    d.set_item("ratio", norm / formula)?;
    d.set_item("stokes_signed", region.signed_integral)?;
    d.set_item("stokes_abs", region.abs_integral)?;
    d.set_item("lower_bound_passed", cert.passed)?;
    d.set_item("admissible", pair.is_admissible())?;
    Ok(d.into())
}

/// One step of the commuting-approximant construction; returns the report
/// as a dict.
#[pyfunction]
fn flex_experiment(
    py: Python<'_>,
    f: &PyField,
    g: &PyField,
    delta: f64,
    eps_cell: f64,
    q: f64,
) -> PyResult<Py<PyDict>> {
    let rep = flex_report(
        &f.inner,
        &g.inner,
        delta,
        eps_cell,
        Exponent::finite(q).map_err(err)?,
    )
    .map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("delta", rep.delta)?;
    d.set_item("eps_cell", rep.eps_cell)?;
    d.set_item("sup_dist_f", rep.sup_dist_f)?;
    d.set_item("modulus_f", rep.modulus_f)?;
    d.set_item("lq_dist_g", rep.lq_dist_g)?;
    d.set_item("lq_bound_g", rep.lq_bound_g)?;
    d.set_item("max_bracket", rep.max_bracket)?;
    d.set_item("stencil_commute", rep.stencil_commute)?;
    Ok(d.into())
}

/// Gradient/field decay rows `(alpha, grad_lq_q, field_lq_q)` of the
/// vanishing construction.
#[pyfunction]
#[pyo3(signature = (n, d, q, alphas, b = 1.0, delta_prime = 1.0))]
fn decay_table(
    n: u32,
    d: u32,
    q: f64,
    alphas: Vec<f64>,
    b: f64,
    delta_prime: f64,
) -> PyResult<Vec<(f64, f64, f64)>> {
    let first = *alphas
        .first()
        .ok_or_else(|| PyValueError::new_err("alphas must be nonempty"))?;
    let spec = HighDimSpec::new(n, d, q, b, first, delta_prime).map_err(err)?;
    let rows = decay_curve(&spec, &alphas).map_err(err)?;
    Ok(rows
        .iter()
        .map(|r| (r.alpha, r.grad_lq_q, r.field_lq_q))
        .collect())
}

/// Quadrature check of the cylinder-to-annulus chart; returns
/// `(curve_radius, area_a, area_b, passed)`.
#[pyfunction]
fn annulus_chart(a: f64, b: f64, eps: f64) -> PyResult<(f64, f64, f64, bool)> {
    let model = CylinderModel::new(a, b).map_err(err)?;
    let check = pb4::curves::cylinder_to_annulus(&model, eps).map_err(err)?;
    Ok((
        check.curve_radius,
        check.area_a_measured,
        check.area_b_measured,
        check.passed,
    ))
}

#[pymodule]
fn pb4py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGrid>()?;
    m.add_class::<PyField>()?;
    m.add_function(wrap_pyfunction!(poisson_bracket, m)?)?;
    m.add_function(wrap_pyfunction!(lq_norm, m)?)?;
    m.add_function(wrap_pyfunction!(pb4_formula_py, m)?)?;
    m.add_function(wrap_pyfunction!(pb4_curve_formula_py, m)?)?;
    m.add_function(wrap_pyfunction!(product_lower_bound, m)?)?;
    m.add_function(wrap_pyfunction!(rectangle_experiment, m)?)?;
    m.add_function(wrap_pyfunction!(flex_experiment, m)?)?;
    m.add_function(wrap_pyfunction!(decay_table, m)?)?;
    m.add_function(wrap_pyfunction!(annulus_chart, m)?)?;
    Ok(())
}
