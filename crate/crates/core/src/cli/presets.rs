//! Built-in benchmark scenes and their reference constants.

use std::f64::consts::PI;

use clap::ValueEnum;
use serde_json::{json, Value};

use super::config::{BodyConfig, MaterialConfig, OutputConfig, SceneConfig};
use crate::analytic::{
    balian_duplantier_coefficient, casimir_plate_coefficient, casimir_pressure_coefficient,
    metal_plate_coefficient, metal_sphere_plate_coefficient, truncate_to_significant,
};
use crate::forces::{Backend, SweepParameter, SweepSpec};
use crate::integrator::IntegratorSettings;
use crate::materials::B_PREFACTOR;
use crate::UnitSystem;

/// Digits kept when printing constants next to their published values.
pub const PRINTED_DIGITS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    /// A unit metal plate facing a metal slab, gap 1, both 1 thick.
    CasimirPlates,
    /// A unit metal sphere one radius above a metal half-space.
    SpherePlate,
    /// Two polarisable molecules at unit distance.
    MoleculePair,
}

impl Preset {
    pub fn name(self) -> &'static str {
        match self {
            Preset::CasimirPlates => "casimir-plates",
            Preset::SpherePlate => "sphere-plate",
            Preset::MoleculePair => "molecule-pair",
        }
    }

    pub fn config(self) -> SceneConfig {
        let (body1, body2, material, sweep) = match self {
            Preset::CasimirPlates => (
                BodyConfig::Slab {
                    normal: [0.0, 0.0, 1.0],
                    offset: 0.0,
                    thickness: 1.0,
                },
                BodyConfig::Box {
                    center: [0.0, 0.0, 1.5],
                    size: [1.0, 1.0, 1.0],
                },
                MaterialConfig::PerfectMetal,
                SweepSpec {
                    parameter: SweepParameter::Gap,
                    values: vec![0.5, 1.0, 2.0, 4.0],
                    backend: Backend::Analytic,
                },
            ),
            Preset::SpherePlate => (
                BodyConfig::HalfSpace {
                    normal: [0.0, 0.0, 1.0],
                    offset: 0.0,
                },
                BodyConfig::Sphere {
                    center: [0.0, 0.0, 2.0],
                    radius: 1.0,
                },
                MaterialConfig::PerfectMetal,
                SweepSpec {
                    parameter: SweepParameter::Gap,
                    values: vec![0.1, 0.5, 1.0, 2.0, 10.0],
                    backend: Backend::Analytic,
                },
            ),
            Preset::MoleculePair => (
                BodyConfig::Point {
                    position: [0.0, 0.0, 0.0],
                    volume: 1.0,
                },
                BodyConfig::Point {
                    position: [0.0, 0.0, 1.0],
                    volume: 1.0,
                },
                MaterialConfig::DiluteGas {
                    density: 1.0,
                    polarizability: 1.0,
                },
                SweepSpec {
                    parameter: SweepParameter::Gap,
                    values: vec![1.0, 2.0, 4.0],
                    backend: Backend::Both,
                },
            ),
        };
        SceneConfig {
            body1,
            body2,
            material1: material,
            material2: material,
            kernel_exponent: 7,
            units: UnitSystem::Natural,
            backend: Backend::Both,
            integrator: IntegratorSettings::default(),
            monte_carlo: None,
            sweep: Some(sweep),
            output: OutputConfig::default(),
        }
    }

    /// Reference constants printed beside the computed ones.
    pub fn comparison(self) -> Value {
        let printed = |x: f64| truncate_to_significant(x, PRINTED_DIGITS);
        match self {
            Preset::CasimirPlates => {
                let ours = metal_plate_coefficient();
                let casimir = casimir_plate_coefficient();
                let pressure = 3.0 * ours;
                let casimir_pressure = casimir_pressure_coefficient();
                json!({
                    "quantity": "thick-plate energy per area, in units of hbar*c/a^3",
                    "pairwise_coefficient": ours,
                    "pairwise_printed": format!("-{}", printed(ours)),
                    "casimir_coefficient": casimir,
                    "casimir_printed": format!("-{}", printed(casimir)),
                    "ratio": ours / casimir,
                    "pairwise_pressure": pressure,
                    "casimir_pressure": casimir_pressure,
                    "pressure_ratio": pressure / casimir_pressure,
                })
            }
            Preset::SpherePlate => {
                let ours = metal_sphere_plate_coefficient();
                let reference = balian_duplantier_coefficient();
                json!({
                    "quantity": "sphere-plate proximity coefficient of hbar*c*R/d^2",
                    "pairwise_coefficient": ours,
                    "pairwise_printed": printed(ours),
                    "balian_duplantier_coefficient": reference,
                    "balian_duplantier_printed": printed(reference),
                    "ratio": ours / reference,
                })
            }
            Preset::MoleculePair => json!({
                "quantity": "Casimir-Polder coefficient of hbar*c*alpha1*alpha2/r^7",
                "pairwise_coefficient": B_PREFACTOR,
                "casimir_polder_coefficient": 23.0 / (4.0 * PI),
                "pairwise_printed": printed(B_PREFACTOR),
            }),
        }
    }
}
