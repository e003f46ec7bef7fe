//! Python bindings: potentials, scattering solutions, bounds, estimates and
//! the self-check suites.

use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use szbounds::approximations::{above_barrier_beta, born_beta, distorted_born_beta};
use szbounds::bounds::{admissible_reports, BoundReport};
use szbounds::catalog::{catalog, lookup, Params};
use szbounds::config::{PotentialConfig, Problem};
use szbounds::engine::{default_variant, integrate, PhaseVariant, Tolerances};
use szbounds::parametric::{integrate_profile, parametric_bounds, FrequencyProfile, ParametricCase};
use szbounds::potentials::Gaussian;
use szbounds::verify::{run_all, VerifyOptions};
use szbounds::{Potential, UnitsConfig};

create_exception!(
    szbounds,
    ScatterError,
    PyValueError,
    "Raised for any scattering or bound failure; the message starts with its code."
);

fn err(e: szbounds::ScatterError) -> PyErr {
    ScatterError::new_err(format!("{}: {e}", e.code()))
}

fn units(hbar: f64, mass: f64) -> PyResult<UnitsConfig> {
    UnitsConfig::new(hbar, mass).map_err(err)
}

fn tolerances(rtol: Option<f64>) -> PyResult<Tolerances> {
    let t = rtol.map(Tolerances::with_rtol).unwrap_or_default();
    t.validate().map_err(err)?;
    Ok(t)
}

fn report_dict<'py>(py: Python<'py>, r: &BoundReport) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("family", r.family.to_string())?;
    d.set_item("phase_variant", r.phase_variant.map(|v| v.to_string()))?;
    d.set_item("theta", r.theta_integral)?;
    d.set_item("t_floor", r.t_floor)?;
    d.set_item("r_cap", r.r_cap)?;
    d.set_item("alpha_cap", r.alpha_cap)?;
    d.set_item("beta_cap", r.beta_cap)?;
    d.set_item("validity", r.validity.to_string())?;
    Ok(d)
}

/// A one-dimensional potential with its integration domain.
#[pyclass(name = "Potential", frozen, module = "szbounds")]
struct PyPotential {
    inner: Potential,
}

#[pymethods]
impl PyPotential {
    /// A catalog potential by name, with optional parameter overrides.
    #[staticmethod]
    #[pyo3(signature = (name, params=None))]
    fn catalog(name: &str, params: Option<Params>) -> PyResult<Self> {
        let entry = lookup(name).map_err(err)?;
        let inner = entry.potential(&params.unwrap_or_default()).map_err(err)?;
        Ok(PyPotential { inner })
    }

    /// `V(x)` as an expression in `x` on `domain = (lo, hi)`.
    #[staticmethod]
    fn expression(expr: String, domain: (f64, f64)) -> PyResult<Self> {
        let cfg = PotentialConfig::Expression {
            expr,
            domain,
            v_minus_inf: None,
            v_plus_inf: None,
            tail_tolerance: None,
            spikes: vec![],
        };
        match cfg.build().map_err(err)? {
            Problem::Potential { potential, .. } => Ok(PyPotential { inner: potential }),
            Problem::Frequency(_) => unreachable!("expression config builds a potential"),
        }
    }

    /// Sum of Gaussian bumps given as `(amplitude, center, width)`.
    #[staticmethod]
    fn gaussians(bumps: Vec<(f64, f64, f64)>) -> PyResult<Self> {
        let bumps = bumps
            .into_iter()
            .map(|(amplitude, center, width)| Gaussian {
                amplitude,
                center,
                width,
            })
            .collect();
        Ok(PyPotential {
            inner: Potential::gaussians(bumps).map_err(err)?,
        })
    }

    #[getter]
    fn domain(&self) -> (f64, f64) {
        self.inner.domain()
    }

    fn __call__(&self, x: f64) -> f64 {
        self.inner.evaluate(x)
    }

    /// Bogolubov coefficients, T, R and the conservation residual at `energy`.
    #[pyo3(signature = (energy, phase=None, rtol=None, hbar=1.0, mass=0.5))]
    fn solve<'py>(
        &self,
        py: Python<'py>,
        energy: f64,
        phase: Option<&str>,
        rtol: Option<f64>,
        hbar: f64,
        mass: f64,
    ) -> PyResult<Bound<'py, PyDict>> {
        let u = units(hbar, mass)?;
        let tol = tolerances(rtol)?;
        let variant = match phase {
            Some(p) => p.parse::<PhaseVariant>().map_err(err)?,
            None => default_variant(&self.inner),
        };
        let pot = &self.inner;
        let r = py.detach(|| integrate(pot, &u, energy, variant, &tol)).map_err(err)?;
        let d = PyDict::new(py);
        d.set_item("energy", r.energy)?;
        d.set_item("alpha", r.alpha)?;
        d.set_item("beta", r.beta)?;
        d.set_item("transmission", r.transmission)?;
        d.set_item("reflection", r.reflection)?;
        d.set_item("conservation_residual", r.conservation_residual)?;
        d.set_item("phase_variant", r.phase_variant.to_string())?;
        Ok(d)
    }

    /// Every admissible bound family at `energy`.
    #[pyo3(signature = (energy, hbar=1.0, mass=0.5))]
    fn bounds<'py>(&self, py: Python<'py>, energy: f64, hbar: f64, mass: f64) -> PyResult<Vec<Bound<'py, PyDict>>> {
        let u = units(hbar, mass)?;
        let pot = &self.inner;
        let reports = py.detach(|| admissible_reports(pot, &u, energy)).map_err(err)?;
        reports.iter().map(|r| report_dict(py, r)).collect()
    }

    /// Born, distorted Born and above-barrier estimates of `beta`;
    /// `None` where an estimate does not apply.
    #[pyo3(signature = (energy, hbar=1.0, mass=0.5))]
    fn approximations<'py>(&self, py: Python<'py>, energy: f64, hbar: f64, mass: f64) -> PyResult<Bound<'py, PyDict>> {
        let u = units(hbar, mass)?;
        let d = PyDict::new(py);
        let pot = &self.inner;
        for (key, r) in [
            ("born", born_beta(pot, &u, energy)),
            ("distorted_born", distorted_born_beta(pot, &u, energy)),
            ("above_barrier", above_barrier_beta(pot, &u, energy)),
        ] {
            d.set_item(key, r.ok().map(|b| b.beta))?;
        }
        Ok(d)
    }

    fn __repr__(&self) -> String {
        let (lo, hi) = self.inner.domain();
        format!("Potential({:?}, domain=({lo}, {hi}))", self.inner.label())
    }
}

/// Names of the solvable catalog potentials.
#[pyfunction]
fn catalog_names() -> Vec<&'static str> {
    catalog().iter().map(|e| e.name).collect()
}

/// Closed-form transmission of a catalog potential.
#[pyfunction]
#[pyo3(signature = (name, energy, params=None, hbar=1.0, mass=0.5))]
fn exact_transmission(name: &str, energy: f64, params: Option<Params>, hbar: f64, mass: f64) -> PyResult<f64> {
    let entry = lookup(name).map_err(err)?;
    entry
        .exact_t(&params.unwrap_or_default(), energy, &units(hbar, mass)?)
        .map_err(err)
}

/// Driven oscillator `u'' + omega(t)^2 u = 0`: Bogolubov coefficients and
/// the bounds of every applicable case (or only `case`).
#[pyfunction]
#[pyo3(signature = (omega, domain, case=None, rtol=None))]
fn parametric<'py>(
    py: Python<'py>,
    omega: String,
    domain: (f64, f64),
    case: Option<&str>,
    rtol: Option<f64>,
) -> PyResult<Bound<'py, PyDict>> {
    let cfg = PotentialConfig::Frequency {
        omega,
        domain,
        omega_minus_inf: None,
        omega_plus_inf: None,
        tail_tolerance: None,
    };
    let profile: FrequencyProfile = match cfg.build().map_err(err)? {
        Problem::Frequency(p) => p,
        Problem::Potential { .. } => unreachable!("frequency config builds a profile"),
    };
    let u = UnitsConfig::default();
    let tol = tolerances(rtol)?;
    let (res, _) = py.detach(|| integrate_profile(&profile, &u, &tol)).map_err(err)?;
    let cases = match case {
        Some(c) => vec![c.parse::<ParametricCase>().map_err(err)?],
        None => ParametricCase::ALL.to_vec(),
    };
    let mut reports = Vec::new();
    for c in cases {
        match parametric_bounds(&profile, &u, c) {
            Ok(r) => {
                let d = report_dict(py, &r)?;
                d.set_item("case", c.name())?;
                reports.push(d);
            }
            Err(e) if case.is_some() => return Err(err(e)),
            Err(_) => {}
        }
    }
    let d = PyDict::new(py);
    d.set_item("alpha", res.alpha)?;
    d.set_item("beta", res.beta)?;
    d.set_item("produced_quanta", res.produced_quanta)?;
    d.set_item("conservation_residual", res.conservation_residual)?;
    d.set_item("bounds", reports)?;
    Ok(d)
}

/// Catalog equivalence, conservation and dominance checks.
#[pyfunction]
#[pyo3(signature = (seed=20240601, random_count=200, energies_per_random=10, catalog_points=50))]
fn verify<'py>(
    py: Python<'py>,
    seed: u64,
    random_count: usize,
    energies_per_random: usize,
    catalog_points: usize,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let opts = VerifyOptions {
        seed,
        random_count,
        energies_per_random,
        catalog_points,
        ..VerifyOptions::default()
    };
    let outcomes = py.detach(|| run_all(&opts));
    outcomes
        .iter()
        .map(|o| {
            let d = PyDict::new(py);
            d.set_item("name", o.name)?;
            d.set_item("passed", o.passed)?;
            d.set_item("cases", o.cases)?;
            d.set_item("worst", o.worst)?;
            d.set_item("failures", o.failures.iter().map(|f| f.to_string()).collect::<Vec<_>>())?;
            Ok(d)
        })
        .collect()
}

#[pymodule(name = "szbounds")]
fn szbounds_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPotential>()?;
    m.add_function(wrap_pyfunction!(catalog_names, m)?)?;
    m.add_function(wrap_pyfunction!(exact_transmission, m)?)?;
    m.add_function(wrap_pyfunction!(parametric, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add("ScatterError", m.py().get_type::<ScatterError>())?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
