//! Python bindings for `dispersia`.

use dispersia::analytic;
use dispersia::cli::{parse_config, render_json, run_report, ConfigError, Preset};
use dispersia::forces::{self, Method};
use dispersia::integrator::{self, Summation};
use dispersia::materials::{self, Permittivity};
use dispersia::{Error, UnitSystem, Vector3};
use pyo3::exceptions::{PyMemoryError, PyNotImplementedError, PyValueError};
use pyo3::prelude::*;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Domain(_) | Error::Precondition(_) => PyValueError::new_err(e.to_string()),
        Error::NotImplemented(_) | Error::NoAnalyticForm(_) => {
            PyNotImplementedError::new_err(e.to_string())
        }
        Error::Resource(_) => PyMemoryError::new_err(e.to_string()),
    }
}

fn config_to_py(e: ConfigError) -> PyErr {
    PyValueError::new_err(format!("[{}] {e}", e.code()))
}

fn vec3(v: [f64; 3]) -> Vector3 {
    Vector3::new(v[0], v[1], v[2])
}

fn permittivity(x: f64) -> Permittivity {
    Permittivity::new(x)
}

/// A homogeneous medium and its static coupling factors.
#[pyclass(name = "Material", frozen, from_py_object)]
#[derive(Clone, Copy)]
struct PyMaterial(materials::Material);

#[pymethods]
impl PyMaterial {
    /// Static permittivities; pass `float("inf")` for a perfect conductor.
    #[staticmethod]
    #[pyo3(signature = (epsilon0, mu0 = 1.0))]
    fn dielectric(epsilon0: f64, mu0: f64) -> PyResult<Self> {
        materials::Material::dielectric(permittivity(epsilon0), permittivity(mu0))
            .map(Self)
            .map_err(to_py)
    }

    #[staticmethod]
    fn perfect_metal() -> Self {
        Self(materials::Material::perfect_metal())
    }

    #[staticmethod]
    fn vacuum() -> Self {
        Self(materials::Material::vacuum())
    }

    #[staticmethod]
    fn dilute_gas(density: f64, polarizability: f64) -> PyResult<Self> {
        materials::Material::dilute_gas(density, polarizability)
            .map(Self)
            .map_err(to_py)
    }

    #[getter]
    fn beta0(&self) -> f64 {
        self.0.beta0()
    }

    #[getter]
    fn gamma0(&self) -> f64 {
        self.0.gamma0()
    }

    fn __repr__(&self) -> String {
        format!("Material({:?})", self.0.model())
    }
}

/// The constants `B₁₂` and `A₁₂` of a body pair.
#[pyclass(name = "PairCoupling", frozen, skip_from_py_object)]
#[derive(Clone, Copy)]
struct PyPairCoupling {
    #[pyo3(get)]
    b12: f64,
    #[pyo3(get)]
    a12: f64,
}

#[pymethods]
impl PyPairCoupling {
    fn __repr__(&self) -> String {
        format!("PairCoupling(b12={:e}, a12={:e})", self.b12, self.a12)
    }
}

/// A box, sphere, half-space, slab or point particle.
#[pyclass(name = "Body", frozen, from_py_object)]
#[derive(Clone, Copy)]
struct PyBody(dispersia::Body);

#[pymethods]
impl PyBody {
    /// Axis-aligned box between two corners.
    #[staticmethod]
    fn cuboid(min: [f64; 3], max: [f64; 3]) -> PyResult<Self> {
        dispersia::Body::cuboid(vec3(min), vec3(max))
            .map(Self)
            .map_err(to_py)
    }

    #[staticmethod]
    fn sphere(center: [f64; 3], radius: f64) -> PyResult<Self> {
        dispersia::Body::sphere(vec3(center), radius)
            .map(Self)
            .map_err(to_py)
    }

    /// The region `normal·x ≤ offset`.
    #[staticmethod]
    fn half_space(normal: [f64; 3], offset: f64) -> PyResult<Self> {
        dispersia::Body::half_space(vec3(normal), offset)
            .map(Self)
            .map_err(to_py)
    }

    /// The layer `offset − thickness ≤ normal·x ≤ offset`.
    #[staticmethod]
    fn slab(normal: [f64; 3], offset: f64, thickness: f64) -> PyResult<Self> {
        dispersia::Body::slab(vec3(normal), offset, thickness)
            .map(Self)
            .map_err(to_py)
    }

    #[staticmethod]
    fn point(position: [f64; 3], volume: f64) -> PyResult<Self> {
        dispersia::Body::point(vec3(position), volume)
            .map(Self)
            .map_err(to_py)
    }

    #[getter]
    fn kind(&self) -> &'static str {
        self.0.kind()
    }

    #[getter]
    fn volume(&self) -> f64 {
        dispersia::geometry::volume(&self.0)
    }

    fn translated(&self, shift: [f64; 3]) -> Self {
        Self(self.0.translated(&vec3(shift)))
    }

    fn __repr__(&self) -> String {
        format!("{:?}", self.0)
    }
}

/// Two material-tagged bodies, a kernel exponent and a unit system.
#[pyclass(name = "Scene", frozen, from_py_object)]
#[derive(Clone, Copy)]
struct PyScene(dispersia::Scene);

#[pymethods]
impl PyScene {
    /// Natural units unless `length_unit_m` is given.
    #[new]
    #[pyo3(signature = (body1, body2, material1 = None, material2 = None, kernel_exponent = 7, length_unit_m = None))]
    fn new(
        body1: PyBody,
        body2: PyBody,
        material1: Option<PyMaterial>,
        material2: Option<PyMaterial>,
        kernel_exponent: u32,
        length_unit_m: Option<f64>,
    ) -> PyResult<Self> {
        let metal = materials::Material::perfect_metal();
        let units = match length_unit_m {
            None => UnitSystem::Natural,
            Some(l) => UnitSystem::si(l).map_err(to_py)?,
        };
        dispersia::Scene::new(
            body1.0,
            body2.0,
            material1.map_or(metal, |m| m.0),
            material2.map_or(metal, |m| m.0),
            kernel_exponent,
            units,
        )
        .map(Self)
        .map_err(to_py)
    }

    #[getter]
    fn gap(&self) -> PyResult<f64> {
        self.0.gap().map_err(to_py)
    }

    #[getter]
    fn coupling(&self) -> PyPairCoupling {
        let c = self.0.coupling();
        PyPairCoupling {
            b12: c.b12,
            a12: c.a12,
        }
    }

    #[getter]
    fn kernel_exponent(&self) -> u32 {
        self.0.kernel_exponent
    }

    #[getter]
    fn body1(&self) -> PyBody {
        PyBody(self.0.body1)
    }

    #[getter]
    fn body2(&self) -> PyBody {
        PyBody(self.0.body2)
    }

    fn swapped(&self) -> Self {
        Self(self.0.swapped())
    }

    fn scaled(&self, factor: f64) -> PyResult<Self> {
        let s = self.0.scaled(factor);
        s.validate().map_err(to_py)?;
        Ok(Self(s))
    }

    fn with_exponent(&self, n: u32) -> PyResult<Self> {
        let s = self.0.with_exponent(n);
        s.validate().map_err(to_py)?;
        Ok(Self(s))
    }
}

/// Tuning knobs of the dual-tree integrator.
#[pyclass(name = "IntegratorSettings", from_py_object)]
#[derive(Clone)]
struct PySettings {
    #[pyo3(get, set)]
    theta: f64,
    #[pyo3(get, set)]
    max_depth: u32,
    #[pyo3(get, set)]
    target_rel_error: f64,
    #[pyo3(get, set)]
    halfspace_truncation_depth: f64,
    /// `"compensated"` or `"naive"`.
    #[pyo3(get, set)]
    summation: String,
    #[pyo3(get, set)]
    second_moment_correction: bool,
    #[pyo3(get, set)]
    richardson_extrapolation: bool,
    #[pyo3(get, set)]
    threads: Option<usize>,
}

impl PySettings {
    fn from_settings(s: &dispersia::IntegratorSettings) -> Self {
        Self {
            theta: s.theta,
            max_depth: s.max_depth,
            target_rel_error: s.target_rel_error,
            halfspace_truncation_depth: s.halfspace_truncation_depth,
            summation: match s.summation {
                Summation::Compensated => "compensated".into(),
                Summation::Naive => "naive".into(),
            },
            second_moment_correction: s.second_moment_correction,
            richardson_extrapolation: s.richardson_extrapolation,
            threads: s.threads,
        }
    }

    fn settings(&self) -> PyResult<dispersia::IntegratorSettings> {
        let summation = match self.summation.as_str() {
            "compensated" => Summation::Compensated,
            "naive" => Summation::Naive,
            other => {
                return Err(PyValueError::new_err(format!(
                    "unknown summation {other:?}"
                )))
            }
        };
        let s = dispersia::IntegratorSettings {
            theta: self.theta,
            max_depth: self.max_depth,
            target_rel_error: self.target_rel_error,
            halfspace_truncation_depth: self.halfspace_truncation_depth,
            summation,
            second_moment_correction: self.second_moment_correction,
            richardson_extrapolation: self.richardson_extrapolation,
            threads: self.threads,
        };
        s.validate().map_err(to_py)?;
        Ok(s)
    }
}

fn settings_or_default(
    s: Option<PyRef<'_, PySettings>>,
) -> PyResult<dispersia::IntegratorSettings> {
    match s {
        Some(s) => s.settings(),
        None => Ok(dispersia::IntegratorSettings::default()),
    }
}

#[pymethods]
impl PySettings {
    /// Keyword arguments override the defaults.
    #[new]
    #[pyo3(signature = (*, theta = None, max_depth = None, target_rel_error = None, halfspace_truncation_depth = None, summation = None, second_moment_correction = None, richardson_extrapolation = None, threads = None))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        theta: Option<f64>,
        max_depth: Option<u32>,
        target_rel_error: Option<f64>,
        halfspace_truncation_depth: Option<f64>,
        summation: Option<String>,
        second_moment_correction: Option<bool>,
        richardson_extrapolation: Option<bool>,
        threads: Option<usize>,
    ) -> PyResult<Self> {
        let d = Self::from_settings(&dispersia::IntegratorSettings::default());
        let s = Self {
            theta: theta.unwrap_or(d.theta),
            max_depth: max_depth.unwrap_or(d.max_depth),
            target_rel_error: target_rel_error.unwrap_or(d.target_rel_error),
            halfspace_truncation_depth: halfspace_truncation_depth
                .unwrap_or(d.halfspace_truncation_depth),
            summation: summation.unwrap_or(d.summation),
            second_moment_correction: second_moment_correction
                .unwrap_or(d.second_moment_correction),
            richardson_extrapolation: richardson_extrapolation
                .unwrap_or(d.richardson_extrapolation),
            threads: threads.or(d.threads),
        };
        s.settings()?;
        Ok(s)
    }

    fn __repr__(&self) -> String {
        format!(
            "IntegratorSettings(theta={}, max_depth={}, target_rel_error={}, halfspace_truncation_depth={}, summation={:?}, second_moment_correction={}, richardson_extrapolation={}, threads={:?})",
            self.theta,
            self.max_depth,
            self.target_rel_error,
            self.halfspace_truncation_depth,
            self.summation,
            self.second_moment_correction,
            self.richardson_extrapolation,
            self.threads
        )
    }
}

/// An integrator result.
#[pyclass(name = "EnergyEstimate", frozen, skip_from_py_object)]
#[derive(Clone, Copy)]
struct PyEstimate {
    #[pyo3(get)]
    value: f64,
    #[pyo3(get)]
    rel_error_estimate: f64,
    #[pyo3(get)]
    kernel_evaluations: u64,
    #[pyo3(get)]
    tree_depth_used: u32,
    #[pyo3(get)]
    converged: bool,
}

impl From<dispersia::EnergyEstimate> for PyEstimate {
    fn from(e: dispersia::EnergyEstimate) -> Self {
        Self {
            value: e.value,
            rel_error_estimate: e.rel_error_estimate,
            kernel_evaluations: e.kernel_evaluations,
            tree_depth_used: e.tree_depth_used,
            converged: e.converged,
        }
    }
}

#[pymethods]
impl PyEstimate {
    fn __repr__(&self) -> String {
        format!(
            "EnergyEstimate(value={:e}, rel_error_estimate={:e}, kernel_evaluations={}, tree_depth_used={}, converged={})",
            self.value, self.rel_error_estimate, self.kernel_evaluations, self.tree_depth_used, self.converged
        )
    }
}

#[pyfunction]
fn pair_coupling(m1: PyMaterial, m2: PyMaterial) -> PyPairCoupling {
    let c = materials::pair_coupling(&m1.0, &m2.0);
    PyPairCoupling {
        b12: c.b12,
        a12: c.a12,
    }
}

/// Closed-form energy; raises `NotImplementedError` for uncovered pairs.
#[pyfunction]
fn scene_energy(scene: PyScene) -> PyResult<f64> {
    analytic::scene_energy(&scene.0)
        .map(|a| a.energy)
        .map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (scene, settings = None))]
fn pair_energy(
    py: Python<'_>,
    scene: PyScene,
    settings: Option<PyRef<'_, PySettings>>,
) -> PyResult<PyEstimate> {
    let s = settings_or_default(settings)?;
    py.detach(|| integrator::pair_energy(&scene.0, &s))
        .map(Into::into)
        .map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (scene, depths, settings = None))]
fn convergence_sweep(
    py: Python<'_>,
    scene: PyScene,
    depths: Vec<u32>,
    settings: Option<PyRef<'_, PySettings>>,
) -> PyResult<Vec<PyEstimate>> {
    let s = settings_or_default(settings)?;
    py.detach(|| integrator::convergence_sweep(&scene.0, &s, &depths))
        .map(|v| v.into_iter().map(Into::into).collect())
        .map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (scene, samples, seed = 0))]
fn monte_carlo_oracle(
    py: Python<'_>,
    scene: PyScene,
    samples: u64,
    seed: u64,
) -> PyResult<PyEstimate> {
    py.detach(|| integrator::monte_carlo_oracle(&scene.0, samples, seed))
        .map(Into::into)
        .map_err(to_py)
}

/// `−dU/da` by central differences; `backend` is `"analytic"` or `"integrator"`.
#[pyfunction]
#[pyo3(signature = (scene, step = None, backend = "analytic", settings = None))]
fn force_along_gap(
    py: Python<'_>,
    scene: PyScene,
    step: Option<f64>,
    backend: &str,
    settings: Option<PyRef<'_, PySettings>>,
) -> PyResult<f64> {
    let method = match backend {
        "analytic" => Method::Analytic,
        "integrator" => Method::Integrator(settings_or_default(settings)?),
        other => return Err(PyValueError::new_err(format!("unknown backend {other:?}"))),
    };
    py.detach(|| forces::force_along_gap(&scene.0, step, &method))
        .map_err(to_py)
}

/// Runs a JSON scene configuration and returns the report as JSON text.
#[pyfunction]
#[pyo3(signature = (config_json, timestamp = 0))]
fn run_config(py: Python<'_>, config_json: &str, timestamp: u64) -> PyResult<String> {
    let config = parse_config(config_json.as_bytes()).map_err(config_to_py)?;
    let report = py
        .detach(|| run_report(&config, None))
        .map_err(config_to_py)?;
    Ok(render_json(&report, timestamp))
}

/// Configuration of a built-in preset as JSON text.
#[pyfunction]
fn preset_config(name: &str) -> PyResult<String> {
    [
        Preset::CasimirPlates,
        Preset::SpherePlate,
        Preset::MoleculePair,
    ]
    .into_iter()
    .find(|p| p.name() == name)
    .map(|p| p.config().to_json())
    .ok_or_else(|| PyValueError::new_err(format!("unknown preset {name:?}")))
}

#[pyfunction]
fn truncate_to_significant(x: f64, digits: usize) -> String {
    analytic::truncate_to_significant(x, digits)
}

#[pymodule]
#[pyo3(name = "dispersia")]
fn dispersia_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PyMaterial>()?;
    m.add_class::<PyPairCoupling>()?;
    m.add_class::<PyBody>()?;
    m.add_class::<PyScene>()?;
    m.add_class::<PySettings>()?;
    m.add_class::<PyEstimate>()?;
    m.add_function(wrap_pyfunction!(pair_coupling, m)?)?;
    m.add_function(wrap_pyfunction!(scene_energy, m)?)?;
    m.add_function(wrap_pyfunction!(pair_energy, m)?)?;
    m.add_function(wrap_pyfunction!(convergence_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(monte_carlo_oracle, m)?)?;
    m.add_function(wrap_pyfunction!(force_along_gap, m)?)?;
    m.add_function(wrap_pyfunction!(run_config, m)?)?;
    m.add_function(wrap_pyfunction!(preset_config, m)?)?;
    m.add_function(wrap_pyfunction!(truncate_to_significant, m)?)?;
    m.add("B_PREFACTOR", materials::B_PREFACTOR)?;
    m.add(
        "METAL_PLATE_COEFFICIENT",
        analytic::metal_plate_coefficient(),
    )?;
    m.add(
        "CASIMIR_PLATE_COEFFICIENT",
        analytic::casimir_plate_coefficient(),
    )?;
    m.add(
        "METAL_SPHERE_PLATE_COEFFICIENT",
        analytic::metal_sphere_plate_coefficient(),
    )?;
    m.add(
        "BALIAN_DUPLANTIER_COEFFICIENT",
        analytic::balian_duplantier_coefficient(),
    )?;
    Ok(())
}
