//! Static material response and the pair constants it induces.
//!
//! Every medium enters the interaction only through two Clausius–Mossotti
//! factors, `β(0) = (3/4π)(ε−1)/(ε+2)` and `γ(0) = (3/4π)(μ−1)/(μ+2)`.
//! A pair of media is then characterised by the real-space coefficient
//! `B₁₂ = (23/4π)[β₁β₂ + γ₁γ₂]` multiplying the `1/r⁷` volume-element kernel,
//! and by its Fourier-space twin `A₁₂ = 23/(240(2π)³)[β₁β₂ + γ₁γ₂]`.

use std::f64::consts::PI;
use std::fmt;

use physical_constants::{REDUCED_PLANCK_CONSTANT, SPEED_OF_LIGHT_IN_VACUUM};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// `3/(4π)`, the modulus bound of both coupling factors.
pub const CLAUSIUS_MOSSOTTI_PREFACTOR: f64 = 3.0 / (4.0 * PI);

/// A static permittivity ε(0) or μ(0), with an exact infinity marker.
///
/// The perfect-metal limit `ε → ∞` is kept symbolic so that `β(0) = 3/(4π)`
/// holds exactly instead of approximately through a large float.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Permittivity {
    Finite(f64),
    Infinite,
}

impl Permittivity {
    /// Wraps a float, mapping `+∞` onto the symbolic marker.
    pub fn new(value: f64) -> Self {
        if value == f64::INFINITY {
            Permittivity::Infinite
        } else {
            Permittivity::Finite(value)
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Permittivity::Infinite)
    }

    pub fn as_f64(self) -> f64 {
        match self {
            Permittivity::Finite(v) => v,
            Permittivity::Infinite => f64::INFINITY,
        }
    }
}

impl From<f64> for Permittivity {
    fn from(value: f64) -> Self {
        Permittivity::new(value)
    }
}

impl fmt::Display for Permittivity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Permittivity::Finite(v) => write!(f, "{v}"),
            Permittivity::Infinite => write!(f, "inf"),
        }
    }
}

fn clausius_mossotti(value: Permittivity) -> f64 {
    match value {
        Permittivity::Infinite => CLAUSIUS_MOSSOTTI_PREFACTOR,
        Permittivity::Finite(x) => CLAUSIUS_MOSSOTTI_PREFACTOR * (x - 1.0) / (x + 2.0),
    }
}

/// Electric coupling factor `β(0)` from the static permittivity.
pub fn beta0(epsilon0: impl Into<Permittivity>) -> Result<f64> {
    let epsilon0 = epsilon0.into();
    match epsilon0 {
        Permittivity::Finite(x) if !(x > 0.0) || x.is_nan() => Err(Error::Domain(format!(
            "static permittivity must be positive, got {x}"
        ))),
        _ => Ok(clausius_mossotti(epsilon0)),
    }
}

/// Magnetic coupling factor `γ(0)` from the static permeability.
///
/// `μ(0) = 0` (perfect metal) gives the negative value `−3/(8π)`; only the
/// product `γ₁γ₂` ever enters an energy.
pub fn gamma0(mu0: impl Into<Permittivity>) -> Result<f64> {
    let mu0 = mu0.into();
    match mu0 {
        Permittivity::Finite(x) if !(x >= 0.0) => Err(Error::Domain(format!(
            "static permeability must be non-negative, got {x}"
        ))),
        _ => Ok(clausius_mossotti(mu0)),
    }
}

/// How a [`Material`] was specified.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum MaterialModel {
    Dielectric {
        epsilon0: Permittivity,
        mu0: Permittivity,
    },
    PerfectMetal,
    DiluteGas {
        /// Molecular number density `N` [length⁻³].
        density: f64,
        /// Static molecular polarizability `α(0)` [length³].
        polarizability: f64,
    },
}

/// A homogeneous medium reduced to its two static coupling factors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Material {
    model: MaterialModel,
    beta0: f64,
    gamma0: f64,
}

impl Material {
    /// A dielectric (or magnetic) medium with static ε(0) and μ(0).
    pub fn dielectric(
        epsilon0: impl Into<Permittivity>,
        mu0: impl Into<Permittivity>,
    ) -> Result<Self> {
        let epsilon0 = epsilon0.into();
        let mu0 = mu0.into();
        Ok(Self {
            model: MaterialModel::Dielectric { epsilon0, mu0 },
            beta0: beta0(epsilon0)?,
            gamma0: gamma0(mu0)?,
        })
    }

    /// The perfect metal, `ε(0) = ∞`, `μ(0) = 0`.
    pub fn perfect_metal() -> Self {
        Self {
            model: MaterialModel::PerfectMetal,
            beta0: CLAUSIUS_MOSSOTTI_PREFACTOR,
            gamma0: -CLAUSIUS_MOSSOTTI_PREFACTOR / 2.0,
        }
    }

    /// Empty space, `ε = μ = 1`.
    pub fn vacuum() -> Self {
        Self {
            model: MaterialModel::Dielectric {
                epsilon0: Permittivity::Finite(1.0),
                mu0: Permittivity::Finite(1.0),
            },
            beta0: 0.0,
            gamma0: 0.0,
        }
    }

    /// A low-density gas of identical molecules: `β(0) = Nα(0)`, `γ(0) = 0`.
    pub fn dilute_gas(density: f64, polarizability: f64) -> Result<Self> {
        if !(density >= 0.0) || !density.is_finite() {
            return Err(Error::Domain(format!(
                "molecular density must be finite and non-negative, got {density}"
            )));
        }
        if !(polarizability >= 0.0) || !polarizability.is_finite() {
            return Err(Error::Domain(format!(
                "polarizability must be finite and non-negative, got {polarizability}"
            )));
        }
        Ok(Self {
            model: MaterialModel::DiluteGas {
                density,
                polarizability,
            },
            beta0: density * polarizability,
            gamma0: 0.0,
        })
    }

    /// Rebuilds a material from its model description.
    pub fn from_model(model: MaterialModel) -> Result<Self> {
        match model {
            MaterialModel::Dielectric { epsilon0, mu0 } => Self::dielectric(epsilon0, mu0),
            MaterialModel::PerfectMetal => Ok(Self::perfect_metal()),
            MaterialModel::DiluteGas {
                density,
                polarizability,
            } => Self::dilute_gas(density, polarizability),
        }
    }

    pub fn model(&self) -> MaterialModel {
        self.model
    }

    pub fn beta0(&self) -> f64 {
        self.beta0
    }

    pub fn gamma0(&self) -> f64 {
        self.gamma0
    }
}

/// The pair constants `A₁₂` (Fourier space) and `B₁₂` (real space).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairCoupling {
    pub a12: f64,
    pub b12: f64,
}

/// `B₁₂ / [β₁β₂ + γ₁γ₂]`.
pub const B_PREFACTOR: f64 = 23.0 / (4.0 * PI);
/// `A₁₂ / [β₁β₂ + γ₁γ₂]`.
pub const A_PREFACTOR: f64 = 23.0 / (240.0 * 8.0 * PI * PI * PI);

impl PairCoupling {
    pub fn new(m1: &Material, m2: &Material) -> Self {
        let product = m1.beta0 * m2.beta0 + m1.gamma0 * m2.gamma0;
        Self {
            a12: A_PREFACTOR * product,
            b12: B_PREFACTOR * product,
        }
    }

    /// True when the pair does not interact at all (`B₁₂ = 0`).
    pub fn is_zero(&self) -> bool {
        self.b12 == 0.0
    }
}

/// Pair constants of two materials.
pub fn pair_coupling(m1: &Material, m2: &Material) -> PairCoupling {
    PairCoupling::new(m1, m2)
}

/// How lengths and energies are expressed.
///
/// Natural mode sets `ħc = 1` with dimensionless lengths. SI mode measures
/// lengths in `length_unit_m` metres, so energies carry the factor
/// `ħc / length_unit` [J] and forces `ħc / length_unit²` [N].
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum UnitSystem {
    #[default]
    Natural,
    #[serde(rename = "si")]
    Si { length_unit_m: f64 },
}

/// `ħc` in J·m, from the CODATA values of ħ and c.
pub fn hbar_c_si() -> f64 {
    REDUCED_PLANCK_CONSTANT * SPEED_OF_LIGHT_IN_VACUUM
}

impl UnitSystem {
    pub fn si(length_unit_m: f64) -> Result<Self> {
        if !(length_unit_m > 0.0) || !length_unit_m.is_finite() {
            return Err(Error::Domain(format!(
                "length unit must be a positive number of metres, got {length_unit_m}"
            )));
        }
        Ok(UnitSystem::Si { length_unit_m })
    }

    /// Multiplier turning an energy in units of `ħc / length` into this system.
    pub fn energy_scale(&self) -> f64 {
        match *self {
            UnitSystem::Natural => 1.0,
            UnitSystem::Si { length_unit_m } => hbar_c_si() / length_unit_m,
        }
    }

    /// Multiplier turning a force in units of `ħc / length²` into this system.
    pub fn force_scale(&self) -> f64 {
        match *self {
            UnitSystem::Natural => 1.0,
            UnitSystem::Si { length_unit_m } => hbar_c_si() / (length_unit_m * length_unit_m),
        }
    }

    pub fn energy_unit(&self) -> &'static str {
        match self {
            UnitSystem::Natural => "hbar*c/length",
            UnitSystem::Si { .. } => "J",
        }
    }

    pub fn force_unit(&self) -> &'static str {
        match self {
            UnitSystem::Natural => "hbar*c/length^2",
            UnitSystem::Si { .. } => "N",
        }
    }
}
