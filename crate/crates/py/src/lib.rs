//! Python extension module exposing the main types and operations:
//! special functions, spectra with shooting verification, photon states,
//! dispersion reports, the beam functional, the variational sweep and
//! focal-volume bounds.

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use photon_coe::beams;
use photon_coe::error::Error;
use photon_coe::functionals::{self, QuadOrders, QuadratureScheme};
use photon_coe::lightcone::{
    berry_connection, berry_curvature, AxisVector, MomentumPoint, MomentumWaveFunction,
};
use photon_coe::specfun;
use photon_coe::spectra::{self, System};
use photon_coe::states;
use photon_coe::variational;

fn py_err(err: Error) -> PyErr {
    PyValueError::new_err(err.to_string())
}

fn parse_system(name: &str) -> PyResult<System> {
    match name {
        "single" => Ok(System::SinglePhoton),
        "beam" => Ok(System::Beam),
        "imf" => Ok(System::InfiniteMomentum),
        other => Err(PyValueError::new_err(format!(
            "unknown system {other:?}; use 'single', 'beam' or 'imf'"
        ))),
    }
}

fn orders(nk: usize, ntheta: usize, nphi: usize) -> QuadOrders {
    QuadOrders {
        n_k: nk,
        n_theta: ntheta,
        n_phi: nphi,
    }
}

#[pyfunction]
fn gamma_fn(x: f64) -> PyResult<f64> {
    specfun::gamma_fn(x).map_err(py_err)
}

#[pyfunction]
fn kummer_1f1(a: f64, b: f64, x: f64) -> PyResult<f64> {
    specfun::kummer_1f1(a, b, x).map_err(py_err)
}

#[pyfunction]
fn jacobi_p(n: u32, alpha: f64, beta: f64, x: f64) -> PyResult<f64> {
    specfun::jacobi_p(n, alpha, beta, x).map_err(py_err)
}

#[pyfunction]
fn wigner_d(j: u32, m: i32, lam: i32, theta: f64) -> PyResult<f64> {
    specfun::wigner_d(j, m, lam, theta).map_err(py_err)
}

#[pyfunction]
fn gamma_spectrum(system: &str, n: u32, j: u32) -> PyResult<f64> {
    spectra::gamma_spectrum(parse_system(system)?, n, j).map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (system, j, n, bracket = None))]
fn shoot_eigenvalue(system: &str, j: u32, n: u32, bracket: Option<(f64, f64)>) -> PyResult<f64> {
    spectra::shoot_eigenvalue(parse_system(system)?, j, n, bracket).map_err(py_err)
}

#[pyfunction]
fn angular_residual(j: u32, m: i32, lam: i32, system: &str) -> PyResult<f64> {
    spectra::angular_residual(j, m, lam, parse_system(system)?).map_err(py_err)
}

#[pyfunction]
fn fit_eval(p2: f64) -> f64 {
    variational::fit_eval(p2)
}

#[pyfunction]
fn berry_connection_at(k: [f64; 3]) -> PyResult<[f64; 3]> {
    berry_connection(&MomentumPoint::from_cartesian(k), &AxisVector::z()).map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (k, h = 1e-4))]
fn berry_curvature_at(k: [f64; 3], h: f64) -> PyResult<[f64; 3]> {
    berry_curvature(&MomentumPoint::from_cartesian(k), &AxisVector::z(), h).map_err(py_err)
}

#[pyfunction]
fn focal_volume<'py>(
    py: Python<'py>,
    var_r: f64,
    var_p: f64,
    gamma_bound: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let rep = functionals::focal_volume_report(var_r, var_p, gamma_bound).map_err(py_err)?;
    let dict = PyDict::new(py);
    dict.set_item("V_f", rep.v_f)?;
    dict.set_item("V_min", rep.v_min)?;
    dict.set_item("satisfied", rep.satisfied)?;
    Ok(dict)
}

/// Photon momentum-space wave function.
#[pyclass(name = "PhotonState", skip_from_py_object)]
#[derive(Clone)]
struct PyPhotonState {
    inner: states::PhotonState,
}

#[pymethods]
impl PyPhotonState {
    /// Single-photon saturating state for m in {-1, 0, +1}.
    #[staticmethod]
    #[pyo3(signature = (m, a = 1.0))]
    fn saturator_single(m: i32, a: f64) -> PyResult<Self> {
        Ok(Self {
            inner: states::PhotonState::saturator_single(m, a).map_err(py_err)?,
        })
    }

    /// Beam saturating mode for m in {-1, 0, +1}.
    #[staticmethod]
    #[pyo3(signature = (m, a = 1.0))]
    fn saturator_beam(m: i32, a: f64) -> PyResult<Self> {
        Ok(Self {
            inner: states::PhotonState::saturator_beam(m, a).map_err(py_err)?,
        })
    }

    /// Saturator times a polynomial in (a k cosθ).
    #[staticmethod]
    #[pyo3(signature = (base_m, coeffs, a = 1.0))]
    fn trial(base_m: i32, coeffs: Vec<f64>, a: f64) -> PyResult<Self> {
        Ok(Self {
            inner: states::PhotonState::trial_state(base_m, coeffs, a).map_err(py_err)?,
        })
    }

    /// Axis-aligned Gaussian that saturates the one-dimensional relation.
    #[staticmethod]
    fn gaussian_1d(width: f64) -> PyResult<Self> {
        Ok(Self {
            inner: states::PhotonState::gaussian_1d(width).map_err(py_err)?,
        })
    }

    /// Parse a state-description JSON document.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: states::PhotonState::from_json(text).map_err(py_err)?,
        })
    }

    fn to_json(&self) -> PyResult<String> {
        self.inner.to_json().map_err(py_err)
    }

    /// Amplitude at spherical (k, θ, φ); convention "f" or "g".
    #[pyo3(signature = (k, theta, phi, convention = "f"))]
    fn evaluate(&self, k: f64, theta: f64, phi: f64, convention: &str) -> PyResult<Complex64> {
        let conv = match convention {
            "f" => states::NormConvention::RelativisticF,
            "g" => states::NormConvention::NonrelativisticG,
            other => {
                return Err(PyValueError::new_err(format!(
                    "unknown convention {other:?}; use 'f' or 'g'"
                )))
            }
        };
        self.inner
            .evaluate(&MomentumPoint::from_spherical(k, theta, phi), conv)
            .map_err(py_err)
    }

    /// Norm, moments, variances and γ² as a dict (units of the scale a).
    #[pyo3(signature = (nk = 48, ntheta = 32, nphi = 16))]
    fn expectation_report<'py>(
        &self,
        py: Python<'py>,
        nk: usize,
        ntheta: usize,
        nphi: usize,
    ) -> PyResult<Bound<'py, PyDict>> {
        let scheme = QuadratureScheme::for_state(&self.inner, orders(nk, ntheta, nphi), 2)
            .map_err(py_err)?;
        let rep = functionals::expectation_report(&self.inner, &scheme).map_err(py_err)?;
        let dict = PyDict::new(py);
        dict.set_item("norm", rep.norm)?;
        dict.set_item("mean_R", rep.mean_r)?;
        dict.set_item("RR", rep.rr)?;
        dict.set_item("mean_P", rep.mean_p)?;
        dict.set_item("PP", rep.pp)?;
        dict.set_item("varR", rep.var_r)?;
        dict.set_item("varP", rep.var_p)?;
        dict.set_item("gamma2", rep.gamma2)?;
        dict.set_item("variance_product", rep.variance_product)?;
        Ok(dict)
    }

    /// Beam-functional report as a dict.
    #[pyo3(signature = (nk = 48, ntheta = 32, nphi = 16))]
    fn beam_report<'py>(
        &self,
        py: Python<'py>,
        nk: usize,
        ntheta: usize,
        nphi: usize,
    ) -> PyResult<Bound<'py, PyDict>> {
        let scheme = beams::beam_scheme(&self.inner, orders(nk, ntheta, nphi)).map_err(py_err)?;
        let rep = beams::beam_gamma2(&self.inner, &scheme).map_err(py_err)?;
        let dict = PyDict::new(py);
        dict.set_item("gamma2", rep.gamma2)?;
        dict.set_item("kappa_scale", rep.kappa_scale)?;
        dict.set_item("dispersionP", rep.dispersion_p)?;
        dict.set_item("dispersionR", rep.dispersion_r)?;
        dict.set_item("V_f", rep.focal.v_f)?;
        dict.set_item("V_min", rep.focal.v_min)?;
        dict.set_item("satisfied", rep.focal.satisfied)?;
        Ok(dict)
    }

    /// γ² = ⟨R·R⟩⟨P·P⟩/ħ².
    #[pyo3(signature = (nk = 48, ntheta = 32, nphi = 16))]
    fn gamma2(&self, nk: usize, ntheta: usize, nphi: usize) -> PyResult<f64> {
        let scheme = QuadratureScheme::for_state(&self.inner, orders(nk, ntheta, nphi), 2)
            .map_err(py_err)?;
        functionals::gamma_squared(&self.inner, &scheme).map_err(py_err)
    }

    /// ΔX·ΔP along the state axis, in units ħ.
    #[pyo3(signature = (nk = 48, ntheta = 32, nphi = 16))]
    fn one_dim_product(&self, nk: usize, ntheta: usize, nphi: usize) -> PyResult<f64> {
        let scheme = QuadratureScheme::for_state(&self.inner, orders(nk, ntheta, nphi), 2)
            .map_err(py_err)?;
        functionals::one_dimensional_product(&self.inner, &self.inner.axis(), &scheme)
            .map_err(py_err)
    }

    fn __repr__(&self) -> String {
        format!("PhotonState({:?})", self.inner.family())
    }
}

/// Minimized variance product over the order-q trial family, as a dict.
#[pyfunction]
#[pyo3(signature = (order, nk = 48, ntheta = 32, nphi = 16))]
fn minimize_variance_product<'py>(
    py: Python<'py>,
    order: usize,
    nk: usize,
    ntheta: usize,
    nphi: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let run = variational::minimize_variance_product(
        order,
        orders(nk, ntheta, nphi),
        &variational::OptimizerConfig::default(),
        &[],
    )
    .map_err(py_err)?;
    let dict = PyDict::new(py);
    dict.set_item("order", run.order)?;
    dict.set_item("coefficients", run.coefficients)?;
    dict.set_item("mean_P2", run.mean_p2)?;
    dict.set_item("variance_product", run.variance_product)?;
    dict.set_item("converged", run.converged)?;
    Ok(dict)
}

#[pymodule]
fn photon_coe_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("GAMMA_SINGLE", states::gamma_single())?;
    m.add("GAMMA_BEAM", states::gamma_beam())?;
    m.add(
        "ZERO_MOMENTUM_VALUE",
        variational::exact_zero_momentum_value(),
    )?;
    m.add_function(wrap_pyfunction!(gamma_fn, m)?)?;
    m.add_function(wrap_pyfunction!(kummer_1f1, m)?)?;
    m.add_function(wrap_pyfunction!(jacobi_p, m)?)?;
    m.add_function(wrap_pyfunction!(wigner_d, m)?)?;
    m.add_function(wrap_pyfunction!(gamma_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(shoot_eigenvalue, m)?)?;
    m.add_function(wrap_pyfunction!(angular_residual, m)?)?;
    m.add_function(wrap_pyfunction!(fit_eval, m)?)?;
    m.add_function(wrap_pyfunction!(berry_connection_at, m)?)?;
    m.add_function(wrap_pyfunction!(berry_curvature_at, m)?)?;
    m.add_function(wrap_pyfunction!(focal_volume, m)?)?;
    m.add_function(wrap_pyfunction!(minimize_variance_product, m)?)?;
    m.add_class::<PyPhotonState>()?;
    Ok(())
}
