//! Forces by central differences and parameter sweeps.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::scene_energy;
use crate::geometry::{separation_direction, Aabb};
use crate::integrator::{pair_energy, EnergyEstimate, IntegratorSettings, Prepared};
use crate::{Body, Error, Result, Scene, UnitSystem, Vector3};

/// Default central-difference step as a fraction of the gap.
pub const DEFAULT_STEP_FRACTION: f64 = 1e-3;

/// Which energy backend a run uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    Analytic,
    Integrator,
    Both,
}

impl Backend {
    pub fn name(self) -> &'static str {
        match self {
            Backend::Analytic => "analytic",
            Backend::Integrator => "integrator",
            Backend::Both => "both",
        }
    }
}

/// A single energy evaluator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    Analytic,
    Integrator(IntegratorSettings),
}

impl Method {
    pub fn backend(&self) -> Backend {
        match self {
            Method::Analytic => Backend::Analytic,
            Method::Integrator(_) => Backend::Integrator,
        }
    }

    pub fn energy(&self, scene: &Scene) -> Result<EnergyEstimate> {
        match self {
            Method::Analytic => scene_energy(scene).map(|e| EnergyEstimate::exact(e.energy)),
            Method::Integrator(settings) => pair_energy(scene, settings),
        }
    }
}

/// Central-difference estimate of `−dU/da`, moving body 2 along the separation axis.
///
/// Negative values are attractive. `step` defaults to `1e−3 × gap`. With the
/// integrator both evaluations reuse one set of octrees translated rigidly,
/// with a common half-space truncation length.
pub fn force_along_gap(scene: &Scene, step: Option<f64>, method: &Method) -> Result<f64> {
    differentiate(scene, step, method, false).map(|(_, f)| f)
}

/// Energy and [`force_along_gap`] together; the integrator builds its octrees once.
pub fn energy_and_force(
    scene: &Scene,
    step: Option<f64>,
    method: &Method,
) -> Result<(EnergyEstimate, f64)> {
    differentiate(scene, step, method, true).map(|(e, f)| (e.expect("energy requested"), f))
}

fn differentiate(
    scene: &Scene,
    step: Option<f64>,
    method: &Method,
    with_energy: bool,
) -> Result<(Option<EnergyEstimate>, f64)> {
    scene.validate()?;
    let gap = scene.gap()?;
    let h = step.unwrap_or(DEFAULT_STEP_FRACTION * gap);
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::Domain(format!("step must be positive, got {h}")));
    }
    if gap - h <= 0.0 {
        return Err(Error::Domain(format!(
            "step {h} crosses contact at gap {gap}"
        )));
    }
    if scene.coupling().b12 == 0.0 {
        return Ok((with_energy.then(|| EnergyEstimate::exact(0.0)), 0.0));
    }
    let dir = separation_direction(&scene.body1, &scene.body2)?;
    let natural = Scene {
        units: UnitSystem::Natural,
        ..*scene
    };
    let (energy, plus, minus) = match method {
        Method::Analytic => {
            let shifted = |sign: f64| Scene {
                body2: natural.body2.translated(&(dir * (sign * h))),
                ..natural
            };
            let energy = if with_energy {
                Some(method.energy(scene)?)
            } else {
                None
            };
            (
                energy,
                method.energy(&shifted(1.0))?.value,
                method.energy(&shifted(-1.0))?.value,
            )
        }
        Method::Integrator(s) => {
            let trees = Prepared::new(&natural, s, Some(s.halfspace_truncation_depth * gap))?;
            let energy = if with_energy {
                let e = trees.estimate(Vector3::zeros())?;
                Some(EnergyEstimate {
                    value: e.value * scene.units.energy_scale(),
                    ..e
                })
            } else {
                None
            };
            (
                energy,
                trees.estimate(dir * h)?.value,
                trees.estimate(dir * -h)?.value,
            )
        }
    };
    Ok((
        energy,
        -(plus - minus) / (2.0 * h) * scene.units.force_scale(),
    ))
}

/// The scene quantity varied by a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    /// Surface-to-surface gap; body 2 moves along the separation axis.
    Gap,
    /// Thickness of boxes and slabs along the separation axis, facing surfaces fixed.
    Thickness,
    /// Sphere radius with the gap held fixed.
    Radius,
    /// Kernel exponent, 6 or 7.
    KernelExponent,
}

impl SweepParameter {
    pub fn name(self) -> &'static str {
        match self {
            SweepParameter::Gap => "gap",
            SweepParameter::Thickness => "thickness",
            SweepParameter::Radius => "radius",
            SweepParameter::KernelExponent => "kernel_exponent",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
    #[serde(default = "default_backend")]
    pub backend: Backend,
}

fn default_backend() -> Backend {
    Backend::Analytic
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("sweep values must be finite".into()));
        }
        if self.values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Domain(
                "sweep values must be strictly increasing".into(),
            ));
        }
        Ok(())
    }
}

/// One evaluation of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub parameter: f64,
    pub energy: f64,
    pub force: f64,
    pub rel_error: f64,
    pub backend: Backend,
    pub kernel_exponent: u32,
    /// Analytic over numeric energy, for `Backend::Both`.
    pub ratio: Option<f64>,
    /// Why the row could not be evaluated.
    pub error: Option<String>,
}

impl SweepRow {
    pub fn is_ok(&self) -> bool {
        self.error.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepTable {
    pub parameter: SweepParameter,
    pub backend: Backend,
    pub rows: Vec<SweepRow>,
}

fn facing_sign(dir: &Vector3) -> Result<(usize, f64)> {
    (0..3)
        .find(|&k| (dir[k].abs() - 1.0).abs() <= 1e-12)
        .map(|k| (k, dir[k].signum()))
        .ok_or_else(|| {
            Error::NotImplemented("thickness sweeps need an axis-aligned separation".into())
        })
}

/// Sets the thickness of `body`, keeping its face towards `toward` fixed.
fn with_thickness(body: &Body, toward: &Vector3, t: f64) -> Result<Option<Body>> {
    match *body {
        Body::Cuboid(b) => {
            let (k, sign) = facing_sign(toward)?;
            let (mut min, mut max) = (b.min, b.max);
            if sign > 0.0 {
                min[k] = max[k] - t;
            } else {
                max[k] = min[k] + t;
            }
            Ok(Some(Body::Cuboid(Aabb::new(min, max))))
        }
        Body::Slab {
            normal,
            offset,
            thickness,
        } => {
            if normal.dot(toward) > 0.0 {
                Ok(Some(Body::Slab {
                    normal,
                    offset,
                    thickness: t,
                }))
            } else {
                Ok(Some(Body::Slab {
                    normal,
                    offset: offset - thickness + t,
                    thickness: t,
                }))
            }
        }
        _ => Ok(None),
    }
}

/// `scene` with the swept parameter set to `value`.
pub fn apply_parameter(scene: &Scene, parameter: SweepParameter, value: f64) -> Result<Scene> {
    let dir = separation_direction(&scene.body1, &scene.body2)?;
    let out = match parameter {
        SweepParameter::Gap => {
            if !(value > 0.0) {
                return Err(Error::Precondition(format!(
                    "gap must be positive, got {value}"
                )));
            }
            let shift = dir * (value - scene.gap()?);
            Scene {
                body2: scene.body2.translated(&shift),
                ..*scene
            }
        }
        SweepParameter::Thickness => {
            if !(value > 0.0) {
                return Err(Error::Domain(format!(
                    "thickness must be positive, got {value}"
                )));
            }
            let b1 = with_thickness(&scene.body1, &dir, value)?;
            let b2 = with_thickness(&scene.body2, &-dir, value)?;
            if b1.is_none() && b2.is_none() {
                return Err(Error::Domain(
                    "no box or slab to change the thickness of".into(),
                ));
            }
            Scene {
                body1: b1.unwrap_or(scene.body1),
                body2: b2.unwrap_or(scene.body2),
                ..*scene
            }
        }
        SweepParameter::Radius => {
            if !(value > 0.0) {
                return Err(Error::Domain(format!(
                    "radius must be positive, got {value}"
                )));
            }
            let resize = |body: &Body, away: Vector3| match *body {
                Body::Sphere { center, radius } => Some(Body::Sphere {
                    center: center + away * (value - radius),
                    radius: value,
                }),
                _ => None,
            };
            let b1 = resize(&scene.body1, -dir);
            let b2 = resize(&scene.body2, dir);
            if b1.is_none() && b2.is_none() {
                return Err(Error::Domain("no sphere to change the radius of".into()));
            }
            Scene {
                body1: b1.unwrap_or(scene.body1),
                body2: b2.unwrap_or(scene.body2),
                ..*scene
            }
        }
        SweepParameter::KernelExponent => {
            if value.fract() != 0.0 {
                return Err(Error::Domain(format!(
                    "kernel exponent must be an integer, got {value}"
                )));
            }
            scene.with_exponent(value as u32)
        }
    };
    out.validate()?;
    Ok(out)
}

fn row(value: f64, scene: &Result<Scene>, method: &Method, n: u32) -> SweepRow {
    let result = scene
        .as_ref()
        .map_err(Clone::clone)
        .and_then(|s| energy_and_force(s, None, method));
    let mut r = SweepRow {
        parameter: value,
        energy: f64::NAN,
        force: f64::NAN,
        rel_error: f64::NAN,
        backend: method.backend(),
        kernel_exponent: n,
        ratio: None,
        error: None,
    };
    match result {
        Ok((e, f)) => {
            r.energy = e.value;
            r.force = f;
            r.rel_error = e.rel_error_estimate;
        }
        Err(e) => r.error = Some(e.to_string()),
    }
    r
}

/// Evaluates energy and force at every sweep value.
///
/// Failures are recorded in the affected rows. With `Backend::Both` each value
/// yields an analytic and an integrator row, both carrying the energy ratio.
pub fn run_sweep(
    spec: &SweepSpec,
    scene: &Scene,
    settings: &IntegratorSettings,
) -> Result<SweepTable> {
    spec.validate()?;
    let methods: Vec<Method> = match spec.backend {
        Backend::Analytic => vec![Method::Analytic],
        Backend::Integrator => vec![Method::Integrator(*settings)],
        Backend::Both => vec![Method::Analytic, Method::Integrator(*settings)],
    };
    let groups: Vec<Vec<SweepRow>> = spec
        .values
        .par_iter()
        .map(|&value| {
            let s = apply_parameter(scene, spec.parameter, value);
            let n = s
                .as_ref()
                .map_or(scene.kernel_exponent, |s| s.kernel_exponent);
            let mut rows: Vec<SweepRow> = methods.iter().map(|m| row(value, &s, m, n)).collect();
            if spec.backend == Backend::Both {
                let ratio = rows[0].energy / rows[1].energy;
                for r in &mut rows {
                    r.ratio = Some(ratio);
                }
            }
            rows
        })
        .collect();
    Ok(SweepTable {
        parameter: spec.parameter,
        backend: spec.backend,
        rows: groups.into_iter().flatten().collect(),
    })
}

fn number(x: f64) -> String {
    format!("{x:e}")
}

impl SweepTable {
    /// Writes the table as CSV with a header row; numbers keep full precision.
    pub fn write_csv<W: Write>(&self, out: W) -> std::io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec![
            self.parameter.name(),
            "energy",
            "force",
            "rel_error",
            "backend",
            "kernel_exponent",
        ];
        if self.backend == Backend::Both {
            header.push("ratio");
        }
        header.push("error");
        w.write_record(&header)?;
        for r in &self.rows {
            let mut record = vec![
                number(r.parameter),
                number(r.energy),
                number(r.force),
                number(r.rel_error),
                r.backend.name().to_string(),
                r.kernel_exponent.to_string(),
            ];
            if self.backend == Backend::Both {
                record.push(r.ratio.map_or_else(String::new, number));
            }
            record.push(r.error.clone().unwrap_or_default());
            w.write_record(&record)?;
        }
        w.flush()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::metal_plate_coefficient;
    use crate::Material;
    use approx::assert_relative_eq;

    fn thick_plates(a: f64) -> Scene {
        let lower = Body::half_space(Vector3::z(), 0.0).unwrap();
        let upper =
            Body::cuboid(Vector3::new(-0.5, -0.5, a), Vector3::new(0.5, 0.5, a + 1e4)).unwrap();
        Scene::metal(lower, upper).unwrap()
    }

    #[test]
    fn thick_plate_force() {
        let f = force_along_gap(&thick_plates(1.0), None, &Method::Analytic).unwrap();
        assert!(f < 0.0);
        assert_relative_eq!(-f, 3.0 * metal_plate_coefficient(), max_relative = 1e-5);
        assert_relative_eq!(-f, 0.040_964, epsilon = 1e-6);
    }

    #[test]
    fn step_must_not_cross_contact() {
        let s = thick_plates(1.0);
        assert!(matches!(
            force_along_gap(&s, Some(1.0), &Method::Analytic),
            Err(Error::Domain(_))
        ));
        assert!(force_along_gap(&s, Some(-0.1), &Method::Analytic).is_err());
    }

    #[test]
    fn vacuum_has_no_force() {
        let s = Scene {
            material1: Material::vacuum(),
            ..thick_plates(1.0)
        };
        assert_eq!(force_along_gap(&s, None, &Method::Analytic).unwrap(), 0.0);
    }

    #[test]
    fn sweep_parameters() {
        let s = thick_plates(1.0);
        let g = apply_parameter(&s, SweepParameter::Gap, 2.5).unwrap();
        assert_relative_eq!(g.gap().unwrap(), 2.5, max_relative = 1e-14);
        let t = apply_parameter(&s, SweepParameter::Thickness, 3.0).unwrap();
        assert_eq!(
            t.body2,
            Body::cuboid(Vector3::new(-0.5, -0.5, 1.0), Vector3::new(0.5, 0.5, 4.0)).unwrap()
        );
        assert!(apply_parameter(&s, SweepParameter::Radius, 1.0).is_err());
        let sphere = Scene::metal(
            Body::half_space(Vector3::z(), 0.0).unwrap(),
            Body::sphere(Vector3::new(0.0, 0.0, 2.0), 1.0).unwrap(),
        )
        .unwrap();
        let r = apply_parameter(&sphere, SweepParameter::Radius, 2.0).unwrap();
        assert_eq!(
            r.body2,
            Body::sphere(Vector3::new(0.0, 0.0, 3.0), 2.0).unwrap()
        );
        assert_eq!(
            apply_parameter(&s, SweepParameter::KernelExponent, 6.0)
                .unwrap()
                .kernel_exponent,
            6
        );
        assert!(apply_parameter(&s, SweepParameter::KernelExponent, 5.0).is_err());
    }

    #[test]
    fn slab_thickness_keeps_facing_surface() {
        let slab = Body::slab(-Vector3::z(), -2.0, 1.0).unwrap(); // 2 ≤ z ≤ 3
        let cube = Body::cuboid(Vector3::repeat(-0.5), Vector3::repeat(0.5)).unwrap();
        let s = Scene::metal(cube, slab).unwrap();
        let t = apply_parameter(&s, SweepParameter::Thickness, 4.0).unwrap();
        assert_eq!(t.body2, Body::slab(-Vector3::z(), -2.0, 4.0).unwrap());
        let s = Scene::metal(slab, cube).unwrap();
        let t = apply_parameter(&s, SweepParameter::Thickness, 4.0).unwrap();
        assert_eq!(t.body1, Body::slab(-Vector3::z(), -2.0, 4.0).unwrap());
        let below = Body::slab(Vector3::z(), -1.0, 1.0).unwrap(); // −2 ≤ z ≤ −1
        let s = Scene::metal(below, cube).unwrap();
        let t = apply_parameter(&s, SweepParameter::Thickness, 3.0).unwrap();
        assert_eq!(t.body1, Body::slab(Vector3::z(), -1.0, 3.0).unwrap());
    }

    #[test]
    fn gap_sweep_power_law_and_csv() {
        let spec = SweepSpec {
            parameter: SweepParameter::Gap,
            values: vec![1.0, 2.0, 4.0],
            backend: Backend::Analytic,
        };
        let t = run_sweep(&spec, &thick_plates(1.0), &IntegratorSettings::default()).unwrap();
        let e: Vec<f64> = t.rows.iter().map(|r| r.energy).collect();
        assert_relative_eq!(e[1] / e[0], 1.0 / 8.0, max_relative = 1e-5);
        assert_relative_eq!(e[2] / e[0], 1.0 / 64.0, max_relative = 1e-5);
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "gap,energy,force,rel_error,backend,kernel_exponent,error"
        );
        let first: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(first[0].parse::<f64>().unwrap(), 1.0);
        assert_eq!(first[1].parse::<f64>().unwrap(), e[0]);
    }

    #[test]
    fn empty_sweep_and_row_errors() {
        let spec = SweepSpec {
            parameter: SweepParameter::Gap,
            values: vec![],
            backend: Backend::Both,
        };
        let t = run_sweep(&spec, &thick_plates(1.0), &IntegratorSettings::default()).unwrap();
        assert!(t.rows.is_empty());
        let spheres = Scene::metal(
            Body::sphere(Vector3::zeros(), 1.0).unwrap(),
            Body::sphere(Vector3::new(3.0, 0.0, 0.0), 1.0).unwrap(),
        )
        .unwrap();
        let spec = SweepSpec {
            parameter: SweepParameter::Gap,
            values: vec![-1.0, 1.0],
            backend: Backend::Analytic,
        };
        let t = run_sweep(&spec, &spheres, &IntegratorSettings::default()).unwrap();
        assert_eq!(t.rows.len(), 2);
        assert!(t.rows.iter().all(|r| !r.is_ok()));
        assert!(t.rows[1]
            .error
            .as_ref()
            .unwrap()
            .contains("no analytic form"));
    }

    #[test]
    fn unordered_values_rejected() {
        let spec = SweepSpec {
            parameter: SweepParameter::Gap,
            values: vec![2.0, 1.0],
            backend: Backend::Analytic,
        };
        assert!(run_sweep(&spec, &thick_plates(1.0), &IntegratorSettings::default()).is_err());
    }
}
