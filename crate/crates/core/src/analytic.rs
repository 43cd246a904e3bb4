//! Closed-form energies for the canonical geometries.
//!
//! Everything here is in natural units (`ħc = 1`); [`scene_energy`] applies
//! the scene's unit system. The kernel exponent `n` is 7 for retarded
//! zero-temperature forces and 6 for the high-temperature law.

use std::f64::consts::PI;

use crate::geometry::{check_exponent, min_gap, separation_direction, Body, Scene};
use crate::materials::{PairCoupling, B_PREFACTOR};
use crate::{Error, Result};

/// `∫_{half-space} dV / |x − p|ⁿ` for a point at height `y` above the surface,
/// `2π / ((n−2)(n−3)) · y^{−(n−3)}`.
pub fn half_space_kernel_integral(y: f64, n: u32) -> f64 {
    let n = n as f64;
    2.0 * PI / ((n - 2.0) * (n - 3.0)) * y.powf(3.0 - n)
}

/// Retarded potential between two molecules of polarizabilities `α₁`, `α₂`.
pub fn molecule_pair_energy(alpha1: f64, alpha2: f64, r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::Domain(format!(
            "separation must be positive, got {r}"
        )));
    }
    Ok(-B_PREFACTOR * alpha1 * alpha2 / r.powi(7))
}

/// Two equal square plates of side `side` and thickness `thickness`, `gap` apart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlabPairParams {
    pub side: f64,
    pub gap: f64,
    /// May be `f64::INFINITY` for the thick-plate limit.
    pub thickness: f64,
}

impl SlabPairParams {
    pub fn new(side: f64, gap: f64, thickness: f64) -> Result<Self> {
        let p = Self {
            side,
            gap,
            thickness,
        };
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<()> {
        if !(self.side > 0.0 && self.side.is_finite())
            || !(self.gap > 0.0 && self.gap.is_finite())
            || !(self.thickness > 0.0)
        {
            return Err(Error::Domain(format!(
                "plate side, gap and thickness must be positive, got {self:?}"
            )));
        }
        Ok(())
    }
}

/// Energy per unit area between two laterally unbounded plates of
/// thicknesses `t1`, `t2` at distance `gap`, per unit `B₁₂`, with the sign
/// of an attraction.
pub fn plate_energy_per_area(gap: f64, t1: f64, t2: f64, n: u32) -> f64 {
    let m = n as f64 - 4.0;
    let nf = n as f64;
    let bracket =
        gap.powf(-m) - (gap + t1).powf(-m) - (gap + t2).powf(-m) + (gap + t1 + t2).powf(-m);
    -2.0 * PI / ((nf - 2.0) * (nf - 3.0) * (nf - 4.0)) * bracket
}

/// Energy of two facing square plates in the large-plate approximation.
///
/// For a metal pair and `n = 7` this is
/// `−(1035/7680)(ħc/π²) L² [1/a³ + 1/(a+2D)³ − 2/(a+D)³]`.
pub fn slab_slab_energy(coupling: &PairCoupling, p: &SlabPairParams, n: u32) -> Result<f64> {
    check_exponent(n)?;
    p.validate()?;
    Ok(coupling.b12 * p.side * p.side * plate_energy_per_area(p.gap, p.thickness, p.thickness, n))
}

/// Thick metal plate coefficient `1035/(7680π²)` (energy `−C L²/a³`).
pub fn metal_plate_coefficient() -> f64 {
    1035.0 / (7680.0 * PI * PI)
}

/// Casimir's plate coefficient `π²/720`.
pub fn casimir_plate_coefficient() -> f64 {
    PI * PI / 720.0
}

/// Casimir's energy of two perfectly conducting plates, `−(π²/720) L²/a³`.
pub fn casimir_plate_energy(side: f64, gap: f64) -> Result<f64> {
    if !(side > 0.0) || !(gap > 0.0) {
        return Err(Error::Domain(format!(
            "plate side and gap must be positive, got L = {side}, a = {gap}"
        )));
    }
    Ok(-casimir_plate_coefficient() * side * side / gap.powi(3))
}

/// Casimir pressure between perfect conductors, `π²/240` per `ħc/a⁴`.
pub fn casimir_pressure_coefficient() -> f64 {
    PI * PI / 240.0
}

/// A volume element `dV` at height `y` above a half-space.
pub fn point_half_space_energy(coupling: &PairCoupling, y: f64, dv: f64, n: u32) -> Result<f64> {
    check_exponent(n)?;
    if !(y > 0.0) {
        return Err(Error::Domain(format!("height must be positive, got {y}")));
    }
    if !(dv > 0.0) {
        return Err(Error::Domain(format!(
            "volume element must be positive, got {dv}"
        )));
    }
    Ok(-coupling.b12 * half_space_kernel_integral(y, n) * dv)
}

/// Sphere of radius `radius` whose surface is `gap` above a half-space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpherePlateParams {
    pub radius: f64,
    pub gap: f64,
}

impl SpherePlateParams {
    pub fn new(radius: f64, gap: f64) -> Result<Self> {
        if !(radius > 0.0) || !(gap > 0.0) {
            return Err(Error::Domain(format!(
                "sphere radius and gap must be positive, got R = {radius}, d = {gap}"
            )));
        }
        Ok(Self { radius, gap })
    }
}

/// Sphere–half-space energy for `n = 7`:
/// `−ħc B₁₂ (π²/30) [R/d² − 1/d + 1/(d+2R) + R/(d+2R)²]`.
///
/// The bracket equals `4R³ / (d²(d+2R)²)`, which is what gets evaluated.
pub fn sphere_half_space_energy(coupling: &PairCoupling, p: &SpherePlateParams) -> Result<f64> {
    let SpherePlateParams { radius, gap } = SpherePlateParams::new(p.radius, p.gap)?;
    Ok(-coupling.b12 * sphere_bracket(radius, gap) * PI * PI / 30.0)
}

fn sphere_bracket(radius: f64, gap: f64) -> f64 {
    let far = gap + 2.0 * radius;
    4.0 * radius.powi(3) / (gap * gap * far * far)
}

/// Balian–Duplantier proximity estimate `−(ħc/8π)(R/d² − 1/d)`.
pub fn balian_duplantier_reference(radius: f64, gap: f64) -> f64 {
    -(radius / (gap * gap) - 1.0 / gap) / (8.0 * PI)
}

/// Sphere–plate coefficient `B π²/30` of metal pairs.
pub fn metal_sphere_plate_coefficient() -> f64 {
    1035.0 / (256.0 * PI.powi(3)) * PI * PI / 30.0
}

/// Balian–Duplantier coefficient `1/(8π)`.
pub fn balian_duplantier_coefficient() -> f64 {
    1.0 / (8.0 * PI)
}

/// Formats `x` with `digits` significant digits, dropping (not rounding) the rest.
///
/// `0.042897` at 4 digits gives `"0.04289"`.
pub fn truncate_to_significant(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let exponent = x.abs().log10().floor() as i32;
    let decimals = digits as i32 - 1 - exponent;
    let scale = 10f64.powi(decimals);
    // Guard against values such as 0.29999999 sitting just below a digit boundary.
    let t = (x.abs() * scale * (1.0 + 4.0 * f64::EPSILON)).floor() / scale;
    let sign = if x < 0.0 { "-" } else { "" };
    format!("{sign}{t:.prec$}", prec = decimals.max(0) as usize)
}

/// A closed-form scene energy and the formula that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticEnergy {
    /// Energy in the scene's unit system.
    pub energy: f64,
    pub formula: &'static str,
    /// False for the large-plate approximation of two finite boxes.
    pub exact: bool,
}

const FORMULA_POINT_PAIR: &str = "U = -hbar*c*B12*dV1*dV2/r^n";
const FORMULA_POINT_LAYER: &str = "U = -hbar*c*B12*dV*2pi/((n-2)(n-3))*[y^-(n-3) - (y+D)^-(n-3)]";
const FORMULA_SPHERE_LAYER: &str =
    "U = -hbar*c*B12*(pi^2/30)*[R/d^2 - 1/d + 1/(d+2R) + R/(d+2R)^2] - (same at d+D)";
const FORMULA_PLATES: &str = "U = -hbar*c*B12*A*2pi/((n-2)(n-3)(n-4))*[a^-(n-4) - (a+D1)^-(n-4) - (a+D2)^-(n-4) + (a+D1+D2)^-(n-4)]";

fn axis_of_direction(dir: &crate::Vector3) -> Option<usize> {
    (0..3).find(|&k| (dir[k].abs() - 1.0).abs() <= 1e-12)
}

fn layer_depth(body: &Body) -> f64 {
    match *body {
        Body::Slab { thickness, .. } => thickness,
        _ => f64::INFINITY,
    }
}

/// Closed-form energy of a scene, when one exists.
///
/// Covered pairs: point–point, point/sphere/box against a half-space or
/// slab, and two facing boxes with identical cross-sections (large-plate
/// approximation).
pub fn scene_energy(scene: &Scene) -> Result<AnalyticEnergy> {
    scene.validate()?;
    let n = scene.kernel_exponent;
    let b12 = scene.coupling().b12;
    let scale = scene.units.energy_scale();
    let gap = min_gap(&scene.body1, &scene.body2)?;
    let (finite, other) = if scene.body1.is_unbounded() {
        (&scene.body2, &scene.body1)
    } else {
        (&scene.body1, &scene.body2)
    };
    let done = |energy: f64, formula, exact| {
        Ok(AnalyticEnergy {
            energy: energy * scale,
            formula,
            exact,
        })
    };
    let unsupported = || {
        Err(Error::NoAnalyticForm(format!(
            "{}–{} pair with n = {n}",
            scene.body1.kind(),
            scene.body2.kind()
        )))
    };
    match (finite, other) {
        (
            Body::Point {
                position: p1,
                volume: v1,
            },
            Body::Point {
                position: p2,
                volume: v2,
            },
        ) => {
            let r = (p1 - p2).norm();
            done(
                -b12 * v1 * v2 * r.powi(-(n as i32)),
                FORMULA_POINT_PAIR,
                true,
            )
        }
        (Body::Point { volume, .. }, layer) if layer.is_unbounded() => {
            let depth = layer_depth(layer);
            let u = half_space_kernel_integral(gap, n) - half_space_kernel_integral(gap + depth, n);
            done(-b12 * u * volume, FORMULA_POINT_LAYER, true)
        }
        (Body::Sphere { radius, .. }, layer) if layer.is_unbounded() && n == 7 => {
            let depth = layer_depth(layer);
            let bracket = sphere_bracket(*radius, gap) - sphere_bracket(*radius, gap + depth);
            done(-b12 * bracket * PI * PI / 30.0, FORMULA_SPHERE_LAYER, true)
        }
        (Body::Cuboid(bx), layer) if layer.is_unbounded() => {
            let dir = separation_direction(layer, finite)?;
            let Some(axis) = axis_of_direction(&dir) else {
                return unsupported();
            };
            let e = bx.extent();
            let area = e[(axis + 1) % 3] * e[(axis + 2) % 3];
            let u = plate_energy_per_area(gap, e[axis], layer_depth(layer), n);
            done(b12 * area * u, FORMULA_PLATES, true)
        }
        (Body::Cuboid(b1), Body::Cuboid(b2)) => {
            let dir = separation_direction(finite, other)?;
            let Some(axis) = axis_of_direction(&dir) else {
                return unsupported();
            };
            let lateral = [(axis + 1) % 3, (axis + 2) % 3];
            let tol = 1e-12 * (b1.diagonal() + b2.diagonal());
            let same_face = lateral.iter().all(|&k| {
                (b1.min[k] - b2.min[k]).abs() <= tol && (b1.max[k] - b2.max[k]).abs() <= tol
            });
            if !same_face {
                return unsupported();
            }
            let e1 = b1.extent();
            let area = e1[lateral[0]] * e1[lateral[1]];
            let u = plate_energy_per_area(gap, e1[axis], b2.extent()[axis], n);
            done(b12 * area * u, FORMULA_PLATES, false)
        }
        _ => unsupported(),
    }
}
