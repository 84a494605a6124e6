//! Python module `pyesrad`.

use esrad::audit::{run_audit, AuditConfig};
use esrad::dipoles::adiabatic_dipoles_asymptotic;
use esrad::ensemble::{scaling_study, ComponentSelector, ScalingSpec};
use esrad::oracle::{matrix_element_oracle, OracleWindow, SwitchingLimit, SwitchingProfile};
use esrad::rates::{es_linewidth, rate_table, CoefficientMode, Occupations, SignCondition};
use esrad::{
    adiabatic_dipoles, derive_params, sudden_dipoles_asymptotic, sudden_dipoles_exact, Basis,
    DressedDipoles, DressedParams, Element, Regime, SpectralKey,
};
use nalgebra::Vector3;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn to_py(e: esrad::Error) -> PyErr {
    match e {
        esrad::Error::Integration { .. } | esrad::Error::IllConditionedFit { .. } => {
            PyRuntimeError::new_err(e.to_string())
        }
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn basis(name: &str) -> PyResult<Basis> {
    match name {
        "adiabatic" => Ok(Basis::Adiabatic),
        "sudden" => Ok(Basis::Sudden),
        _ => Err(PyValueError::new_err(format!(
            "basis must be 'adiabatic' or 'sudden', got {name:?}"
        ))),
    }
}

fn exact_mode(mode: &str) -> PyResult<bool> {
    match mode {
        "exact" => Ok(true),
        "asymptotic" => Ok(false),
        _ => Err(PyValueError::new_err(format!(
            "mode must be 'exact' or 'asymptotic', got {mode:?}"
        ))),
    }
}

fn sign_label(s: SignCondition) -> &'static str {
    match s {
        SignCondition::Any => "any",
        SignCondition::Positive => "delta>0",
        SignCondition::Negative => "delta<0",
    }
}

fn element_label(e: Element) -> String {
    format!("D{}", e.label())
}

fn key_dict<'py>(py: Python<'py>, key: SpectralKey) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("line", key.line.label())?;
    d.set_item("part", format!("{:?}", key.part).to_lowercase())?;
    Ok(d)
}

/// Strong-field two-level system. Either `v` (coupling `|V|`) or `alpha` may be given.
#[pyclass(name = "SystemConfig", module = "pyesrad", frozen)]
struct PySystemConfig {
    inner: esrad::SystemConfig,
}

#[pyclass(name = "DressedParams", module = "pyesrad", frozen)]
struct PyDressedParams {
    inner: DressedParams,
    model_valid: bool,
}

#[pymethods]
impl PySystemConfig {
    #[new]
    #[pyo3(signature = (delta = 1.0, v = None, alpha = None, omega = 100.0, phi_field = 0.0, phi1 = 0.0, phi2 = 0.0))]
    fn new(
        delta: f64,
        v: Option<f64>,
        alpha: Option<f64>,
        omega: f64,
        phi_field: f64,
        phi1: f64,
        phi2: f64,
    ) -> PyResult<Self> {
        let base = match (v, alpha) {
            (Some(_), Some(_)) => {
                return Err(PyValueError::new_err("give either v or alpha, not both"))
            }
            (Some(v), None) => esrad::SystemConfig::from_detuning(omega, delta, v),
            (None, a) => {
                let a = a.unwrap_or(1.0);
                if delta == 0.0 {
                    return Err(PyValueError::new_err(
                        "alpha is undefined on resonance; give v instead",
                    ));
                }
                esrad::SystemConfig::from_alpha(omega, delta, a)
            }
        };
        Self::checked(base.with_phases(phi_field, phi1, phi2))
    }

    /// Configuration from bare quantities: transition frequency, carrier, dipole and field amplitude.
    #[staticmethod]
    #[pyo3(signature = (e21, omega, dipole, field, phi_field = 0.0, phi1 = 0.0, phi2 = 0.0))]
    fn bare(
        e21: f64,
        omega: f64,
        dipole: f64,
        field: f64,
        phi_field: f64,
        phi1: f64,
        phi2: f64,
    ) -> PyResult<Self> {
        Self::checked(
            esrad::SystemConfig::new(e21, omega, dipole, field).with_phases(phi_field, phi1, phi2),
        )
    }

    #[getter]
    fn e21(&self) -> f64 {
        self.inner.e21
    }

    #[getter]
    fn omega(&self) -> f64 {
        self.inner.omega
    }

    #[getter]
    fn delta(&self) -> f64 {
        self.inner.detuning()
    }

    #[getter]
    fn coupling(&self) -> f64 {
        self.inner.coupling()
    }

    fn params(&self) -> PyResult<PyDressedParams> {
        Ok(PyDressedParams {
            inner: self.derived()?,
            model_valid: self.inner.within_model_validity(),
        })
    }

    /// Spectral components of the dressed dipole matrix as a list of dicts.
    #[pyo3(signature = (basis = "adiabatic", mode = "exact", regime = None))]
    fn dipoles<'py>(
        &self,
        py: Python<'py>,
        basis: &str,
        mode: &str,
        regime: Option<&str>,
    ) -> PyResult<Vec<Bound<'py, PyDict>>> {
        let p = self.derived()?;
        let b = self::basis(basis)?;
        let d = if exact_mode(mode)? {
            exact_dipoles(&p, b)
        } else {
            let r = match regime {
                None => Regime::for_alpha(p.alpha.value()),
                Some("small_alpha") => Regime::SmallAlpha,
                Some("large_alpha") => Regime::LargeAlpha,
                Some(other) => {
                    return Err(PyValueError::new_err(format!(
                        "regime must be 'small_alpha' or 'large_alpha', got {other:?}"
                    )))
                }
            };
            match b {
                Basis::Adiabatic => adiabatic_dipoles_asymptotic(&p, r),
                Basis::Sudden => sudden_dipoles_asymptotic(&p, r),
            }
        };
        d.components(&p)
            .iter()
            .map(|c| {
                let row = key_dict(py, c.key)?;
                row.set_item("element", element_label(c.element))?;
                row.set_item("basis", c.basis.label())?;
                row.set_item("freq", c.freq)?;
                row.set_item("amp", c.amp)?;
                row.set_item("phase_exponent", c.phase_exponent)?;
                row.set_item("coherence", c.coherence.label())?;
                Ok(row)
            })
            .collect()
    }

    /// First-order emission/absorption table; `n` is the probe occupation on every line.
    #[pyo3(signature = (basis = "adiabatic", n = 0.0, mode = "asymptotic"))]
    fn rate_table<'py>(
        &self,
        py: Python<'py>,
        basis: &str,
        n: f64,
        mode: &str,
    ) -> PyResult<Vec<Bound<'py, PyDict>>> {
        let p = self.derived()?;
        let occ = Occupations::uniform(n);
        occ.validate().map_err(to_py)?;
        let coeff = if exact_mode(mode)? {
            CoefficientMode::Exact
        } else {
            CoefficientMode::Asymptotic
        };
        rate_table(&p, self::basis(basis)?, &occ, coeff)
            .iter()
            .map(|e| {
                let row = PyDict::new(py);
                row.set_item("regime", e.regime.label())?;
                row.set_item("transition", e.transition.label())?;
                row.set_item("line", e.line.label())?;
                row.set_item("freq", e.freq)?;
                row.set_item("sign", sign_label(e.sign))?;
                row.set_item("spont_coeff", e.spont_coeff)?;
                row.set_item("stim_coeff", e.stim_coeff)?;
                row.set_item("coherence", e.coherence.label())?;
                row.set_item("validity", e.validity)?;
                row.set_item("active", e.active)?;
                row.set_item("direction", e.direction.label())?;
                row.set_item("exact_coeff", e.exact_coeff)?;
                row.set_item("exact_stim_coeff", e.exact_stim_coeff)?;
                Ok(row)
            })
            .collect()
    }

    /// Spontaneous width of the dressed state `Phi1` for free-atom width `gamma`.
    #[pyo3(signature = (gamma = 1.0))]
    fn linewidth(&self, gamma: f64) -> PyResult<f64> {
        Ok(es_linewidth(&self.derived()?, gamma)
            .map_err(to_py)?
            .gamma_es)
    }

    /// Integrate the driven atom through a switch-on and fit the dipole spectra.
    ///
    /// `delta_tau` is the dimensionless switching time `|Delta| tau`; ignored for `profile="step"`.
    #[pyo3(signature = (profile = "tanh", delta_tau = 200.0, tol = 1e-10))]
    fn oracle<'py>(
        &self,
        py: Python<'py>,
        profile: &str,
        delta_tau: f64,
        tol: f64,
    ) -> PyResult<Bound<'py, PyDict>> {
        let p = self.derived()?;
        let tau = || {
            if p.delta == 0.0 {
                Err(PyValueError::new_err(
                    "a smooth switch needs a nonzero detuning to set its time scale",
                ))
            } else {
                Ok(delta_tau / p.delta.abs())
            }
        };
        let (prof, limit) = match profile {
            "tanh" => (
                SwitchingProfile::tanh(tau()?),
                SwitchingLimit::classify(delta_tau),
            ),
            "exponential" => (
                SwitchingProfile::exponential(tau()?),
                SwitchingLimit::classify(delta_tau),
            ),
            "step" => (SwitchingProfile::step(), SwitchingLimit::Sudden),
            _ => {
                return Err(PyValueError::new_err(format!(
                    "unknown profile {profile:?}"
                )))
            }
        };
        prof.validate().map_err(to_py)?;
        let inner = self.inner;
        let m = py
            .detach(|| matrix_element_oracle(&inner, prof, OracleWindow::default(), tol))
            .map_err(to_py)?;
        let (ad, su) = (adiabatic_dipoles(&p), sudden_dipoles_exact(&p));
        let mut components = Vec::new();
        for (role, result, sudden_el) in [
            ("diagonal", &m.diagonal, Element::D11),
            ("cross", &m.cross, Element::D12),
        ] {
            let (ad_diag, ad_cross) = esrad::oracle::expected_elements(&p, Basis::Adiabatic);
            let ad_el = if role == "diagonal" {
                ad_diag
            } else {
                ad_cross
            };
            for c in &result.components {
                let row = key_dict(py, c.key)?;
                row.set_item("role", role)?;
                row.set_item("freq", c.freq)?;
                row.set_item("amp", c.amp)?;
                row.set_item("adiabatic", ad.modulus(ad_el, c.key))?;
                row.set_item("sudden", su.modulus(sudden_el, c.key))?;
                components.push(row);
            }
        }
        let out = PyDict::new(py);
        out.set_item("limit", format!("{limit:?}").to_lowercase())?;
        out.set_item("components", components)?;
        out.set_item("max_norm_drift", m.max_norm_drift)?;
        out.set_item("omega_rabi", p.omega_rabi)?;
        out.set_item("omega_rabi_fitted", m.cross.omega_rabi_fitted)?;
        Ok(out)
    }

    /// Mean scattered intensity against atom number, with the fitted log-log exponent.
    #[pyo3(signature = (selector = "coherent", n_grid = vec![10, 30, 100, 300, 1000], trials = 10000, seed = 1, side = 20.0, theta_out = 0.0))]
    #[allow(clippy::too_many_arguments)]
    fn ensemble_scaling<'py>(
        &self,
        py: Python<'py>,
        selector: &str,
        n_grid: Vec<usize>,
        trials: usize,
        seed: u64,
        side: f64,
        theta_out: f64,
    ) -> PyResult<Bound<'py, PyDict>> {
        let sel = match selector {
            "coherent" => ComponentSelector::coherent(),
            "noncoherent" => ComponentSelector::noncoherent(),
            "mixed" => ComponentSelector::mixed(),
            _ => {
                return Err(PyValueError::new_err(format!(
                    "unknown selector {selector:?}"
                )))
            }
        };
        let spec = ScalingSpec {
            n_grid,
            side,
            k_in: Vector3::new(0.0, 0.0, 1.0),
            k_out: Vector3::new(theta_out.sin(), 0.0, theta_out.cos()),
            n_trials: trials,
            seed,
        };
        let inner = self.inner;
        let study = py
            .detach(|| scaling_study(&inner, &sel, &spec))
            .map_err(to_py)?;
        let points = study
            .points
            .iter()
            .map(|pt| (pt.n_atoms, pt.mean_intensity, pt.std_error))
            .collect::<Vec<_>>();
        let out = PyDict::new(py);
        out.set_item("points", points)?;
        out.set_item("exponent", study.exponent)?;
        Ok(out)
    }

    fn __repr__(&self) -> String {
        let c = &self.inner;
        format!(
            "SystemConfig(e21={}, omega={}, delta={}, coupling={})",
            c.e21,
            c.omega,
            c.detuning(),
            c.coupling()
        )
    }
}

impl PySystemConfig {
    fn checked(inner: esrad::SystemConfig) -> PyResult<Self> {
        inner.validate().map_err(to_py)?;
        derive_params(&inner).map_err(to_py)?;
        Ok(Self { inner })
    }

    fn derived(&self) -> PyResult<DressedParams> {
        derive_params(&self.inner).map_err(to_py)
    }
}

fn exact_dipoles(p: &DressedParams, b: Basis) -> DressedDipoles {
    match b {
        Basis::Adiabatic => adiabatic_dipoles(p),
        Basis::Sudden => sudden_dipoles_exact(p),
    }
}

#[pymethods]
impl PyDressedParams {
    #[getter]
    fn delta(&self) -> f64 {
        self.inner.delta
    }

    #[getter]
    fn v_mag(&self) -> f64 {
        self.inner.v_mag
    }

    /// `inf` on resonance.
    #[getter]
    fn alpha(&self) -> f64 {
        self.inner.alpha.value()
    }

    #[getter]
    fn omega_rabi(&self) -> f64 {
        self.inner.omega_rabi
    }

    #[getter]
    fn lambda1(&self) -> f64 {
        self.inner.lambda1
    }

    #[getter]
    fn c1(&self) -> f64 {
        self.inner.c1
    }

    #[getter]
    fn c2(&self) -> num_complex::Complex64 {
        self.inner.c2
    }

    #[getter]
    fn phi0(&self) -> f64 {
        self.inner.phi0
    }

    /// `(omega - Omega, omega, omega + Omega)`.
    #[getter]
    fn sidebands(&self) -> (f64, f64, f64) {
        self.inner.sideband_frequencies()
    }

    #[getter]
    fn n2_weight(&self) -> f64 {
        self.inner.upper_weight_in_phi1()
    }

    #[getter]
    fn model_valid(&self) -> bool {
        self.model_valid
    }

    fn __repr__(&self) -> String {
        format!(
            "DressedParams(delta={}, v_mag={}, alpha={}, omega_rabi={})",
            self.inner.delta, self.inner.v_mag, self.inner.alpha, self.inner.omega_rabi
        )
    }
}

/// Gaps between the printed truncated formulas and exact mode.
#[pyfunction]
#[pyo3(signature = (tolerance = 0.01, alpha_small = 0.2, alpha_large = 10.0, omega = 100.0))]
fn audit<'py>(
    py: Python<'py>,
    tolerance: f64,
    alpha_small: f64,
    alpha_large: f64,
    omega: f64,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let report = run_audit(&AuditConfig {
        tolerance,
        alpha_small,
        alpha_large,
        omega,
    })
    .map_err(to_py)?;
    report
        .findings
        .iter()
        .map(|f| {
            let row = PyDict::new(py);
            row.set_item("id", f.id)?;
            row.set_item("summary", &f.summary)?;
            row.set_item("printed", &f.printed)?;
            row.set_item("exact", &f.exact)?;
            row.set_item("gap", f.gap)?;
            Ok(row)
        })
        .collect()
}

#[pymodule]
fn pyesrad(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySystemConfig>()?;
    m.add_class::<PyDressedParams>()?;
    m.add_function(wrap_pyfunction!(audit, m)?)?;
    Ok(())
}
