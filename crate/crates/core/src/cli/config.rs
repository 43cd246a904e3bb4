//! Scene files: a strict JSON schema with defaults.

use std::fmt;
use std::path::PathBuf;

use serde::de::{self, MapAccess, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::forces::{Backend, SweepSpec};
use crate::integrator::IntegratorSettings;
use crate::materials::{Material, MaterialModel, Permittivity};
use crate::{Body, Error, Scene, UnitSystem, Vector3};

/// A body block, tagged by `"type"`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum BodyConfig {
    Box {
        center: [f64; 3],
        size: [f64; 3],
    },
    Sphere {
        center: [f64; 3],
        radius: f64,
    },
    HalfSpace {
        normal: [f64; 3],
        offset: f64,
    },
    Slab {
        normal: [f64; 3],
        offset: f64,
        thickness: f64,
    },
    Point {
        position: [f64; 3],
        volume: f64,
    },
}

impl BodyConfig {
    pub fn to_body(&self) -> crate::Result<Body> {
        let v = |a: &[f64; 3]| Vector3::new(a[0], a[1], a[2]);
        match self {
            BodyConfig::Box { center, size } => {
                let half = v(size) * 0.5;
                if size.iter().any(|s| !(*s > 0.0)) {
                    return Err(Error::Domain(format!(
                        "box size must be positive, got {size:?}"
                    )));
                }
                Body::cuboid(v(center) - half, v(center) + half)
            }
            BodyConfig::Sphere { center, radius } => Body::sphere(v(center), *radius),
            BodyConfig::HalfSpace { normal, offset } => Body::half_space(v(normal), *offset),
            BodyConfig::Slab {
                normal,
                offset,
                thickness,
            } => Body::slab(v(normal), *offset, *thickness),
            BodyConfig::Point { position, volume } => Body::point(v(position), *volume),
        }
    }

    pub fn from_body(body: &Body) -> Self {
        let a = |x: &Vector3| [x.x, x.y, x.z];
        match *body {
            Body::Cuboid(b) => BodyConfig::Box {
                center: a(&b.center()),
                size: a(&b.extent()),
            },
            Body::Sphere { center, radius } => BodyConfig::Sphere {
                center: a(&center),
                radius,
            },
            Body::HalfSpace { normal, offset } => BodyConfig::HalfSpace {
                normal: a(&normal),
                offset,
            },
            Body::Slab {
                normal,
                offset,
                thickness,
            } => BodyConfig::Slab {
                normal: a(&normal),
                offset,
                thickness,
            },
            Body::Point { position, volume } => BodyConfig::Point {
                position: a(&position),
                volume,
            },
        }
    }
}

/// A material block: a name (`"perfect_metal"`, `"vacuum"`) or an explicit model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MaterialConfig {
    PerfectMetal,
    Vacuum,
    Dielectric {
        epsilon0: Permittivity,
        mu0: Permittivity,
    },
    DiluteGas {
        density: f64,
        polarizability: f64,
    },
}

impl MaterialConfig {
    pub fn to_material(&self) -> crate::Result<Material> {
        match *self {
            MaterialConfig::PerfectMetal => Ok(Material::perfect_metal()),
            MaterialConfig::Vacuum => Ok(Material::vacuum()),
            MaterialConfig::Dielectric { epsilon0, mu0 } => {
                Material::from_model(MaterialModel::Dielectric { epsilon0, mu0 })
            }
            MaterialConfig::DiluteGas {
                density,
                polarizability,
            } => Material::dilute_gas(density, polarizability),
        }
    }
}

struct PermittivityValue(Permittivity);

impl Serialize for PermittivityValue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.0 {
            Permittivity::Finite(x) => s.serialize_f64(x),
            Permittivity::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for PermittivityValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = PermittivityValue;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number or \"inf\"")
            }
            fn visit_f64<E: de::Error>(self, x: f64) -> Result<Self::Value, E> {
                Ok(PermittivityValue(Permittivity::new(x)))
            }
            fn visit_i64<E: de::Error>(self, x: i64) -> Result<Self::Value, E> {
                self.visit_f64(x as f64)
            }
            fn visit_u64<E: de::Error>(self, x: u64) -> Result<Self::Value, E> {
                self.visit_f64(x as f64)
            }
            fn visit_str<E: de::Error>(self, s: &str) -> Result<Self::Value, E> {
                match s {
                    "inf" | "infinity" => Ok(PermittivityValue(Permittivity::Infinite)),
                    _ => Err(E::invalid_value(de::Unexpected::Str(s), &self)),
                }
            }
        }
        d.deserialize_any(V)
    }
}

impl Serialize for MaterialConfig {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        match *self {
            MaterialConfig::PerfectMetal => s.serialize_str("perfect_metal"),
            MaterialConfig::Vacuum => s.serialize_str("vacuum"),
            MaterialConfig::Dielectric { epsilon0, mu0 } => {
                let mut m = s.serialize_map(Some(3))?;
                m.serialize_entry("model", "dielectric")?;
                m.serialize_entry("epsilon0", &PermittivityValue(epsilon0))?;
                m.serialize_entry("mu0", &PermittivityValue(mu0))?;
                m.end()
            }
            MaterialConfig::DiluteGas {
                density,
                polarizability,
            } => {
                let mut m = s.serialize_map(Some(3))?;
                m.serialize_entry("model", "dilute_gas")?;
                m.serialize_entry("density", &density)?;
                m.serialize_entry("polarizability", &polarizability)?;
                m.end()
            }
        }
    }
}

const MATERIAL_NAMES: &[&str] = &["perfect_metal", "metal", "vacuum"];
const MATERIAL_FIELDS: &[&str] = &["model", "epsilon0", "mu0", "density", "polarizability"];
const MATERIAL_MODELS: &[&str] = &["dielectric", "perfect_metal", "dilute_gas"];

impl<'de> Deserialize<'de> for MaterialConfig {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = MaterialConfig;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a material name or a material block")
            }
            fn visit_str<E: de::Error>(self, s: &str) -> Result<Self::Value, E> {
                match s {
                    "perfect_metal" | "metal" => Ok(MaterialConfig::PerfectMetal),
                    "vacuum" => Ok(MaterialConfig::Vacuum),
                    _ => Err(E::unknown_variant(s, MATERIAL_NAMES)),
                }
            }
            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<Self::Value, A::Error> {
                let mut model: Option<String> = None;
                let mut epsilon0 = None;
                let mut mu0 = None;
                let mut density = None;
                let mut polarizability = None;
                while let Some(key) = map.next_key::<String>()? {
                    match key.as_str() {
                        "model" => model = Some(map.next_value()?),
                        "epsilon0" => epsilon0 = Some(map.next_value::<PermittivityValue>()?.0),
                        "mu0" => mu0 = Some(map.next_value::<PermittivityValue>()?.0),
                        "density" => density = Some(map.next_value::<f64>()?),
                        "polarizability" => polarizability = Some(map.next_value::<f64>()?),
                        other => return Err(de::Error::unknown_field(other, MATERIAL_FIELDS)),
                    }
                }
                let model = model.unwrap_or_else(|| {
                    if density.is_some() || polarizability.is_some() {
                        "dilute_gas".into()
                    } else {
                        "dielectric".into()
                    }
                });
                let stray = |name: &'static str, present: bool| -> Result<(), A::Error> {
                    if present {
                        Err(de::Error::custom(format!(
                            "field `{name}` does not apply to model `{model}`"
                        )))
                    } else {
                        Ok(())
                    }
                };
                match model.as_str() {
                    "dielectric" => {
                        stray("density", density.is_some())?;
                        stray("polarizability", polarizability.is_some())?;
                        Ok(MaterialConfig::Dielectric {
                            epsilon0: epsilon0
                                .ok_or_else(|| de::Error::missing_field("epsilon0"))?,
                            mu0: mu0.unwrap_or(Permittivity::Finite(1.0)),
                        })
                    }
                    "dilute_gas" => {
                        stray("epsilon0", epsilon0.is_some())?;
                        stray("mu0", mu0.is_some())?;
                        Ok(MaterialConfig::DiluteGas {
                            density: density.ok_or_else(|| de::Error::missing_field("density"))?,
                            polarizability: polarizability
                                .ok_or_else(|| de::Error::missing_field("polarizability"))?,
                        })
                    }
                    "perfect_metal" => {
                        for (name, present) in [
                            ("epsilon0", epsilon0.is_some()),
                            ("mu0", mu0.is_some()),
                            ("density", density.is_some()),
                            ("polarizability", polarizability.is_some()),
                        ] {
                            stray(name, present)?;
                        }
                        Ok(MaterialConfig::PerfectMetal)
                    }
                    other => Err(de::Error::unknown_variant(other, MATERIAL_MODELS)),
                }
            }
        }
        d.deserialize_any(V)
    }
}

/// Optional Monte Carlo cross-check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonteCarloConfig {
    pub samples: u64,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    /// Directory receiving the report files.
    pub directory: PathBuf,
    pub report: String,
    pub table: String,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            directory: PathBuf::from("."),
            report: "report.json".into(),
            table: "sweep.csv".into(),
        }
    }
}

fn perfect_metal() -> MaterialConfig {
    MaterialConfig::PerfectMetal
}

fn zero_temperature() -> u32 {
    7
}

fn both() -> Backend {
    Backend::Both
}

/// A complete run description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneConfig {
    pub body1: BodyConfig,
    pub body2: BodyConfig,
    #[serde(default = "perfect_metal")]
    pub material1: MaterialConfig,
    #[serde(default = "perfect_metal")]
    pub material2: MaterialConfig,
    #[serde(default = "zero_temperature")]
    pub kernel_exponent: u32,
    #[serde(default)]
    pub units: UnitSystem,
    #[serde(default = "both")]
    pub backend: Backend,
    #[serde(default)]
    pub integrator: IntegratorSettings,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub monte_carlo: Option<MonteCarloConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
    #[serde(default)]
    pub output: OutputConfig,
}

/// Where in the input a configuration problem was found.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Location {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}", self.line, self.column)
    }
}

/// A configuration that cannot be run.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("syntax error at {at}: {message}")]
    Syntax { at: Location, message: String },
    #[error("unknown field at {at}: {message}")]
    UnknownField { at: Location, message: String },
    #[error("invalid value at {at}: {message}")]
    Invalid { at: Location, message: String },
    #[error("{field}: {source}")]
    Precondition { field: &'static str, source: Error },
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
}

impl ConfigError {
    /// Short machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            ConfigError::Syntax { .. } => "syntax",
            ConfigError::UnknownField { .. } => "unknown_field",
            ConfigError::Invalid { .. } => "invalid",
            ConfigError::Precondition { .. } => "precondition",
            ConfigError::Io { .. } => "io",
        }
    }
}

impl From<serde_json::Error> for ConfigError {
    fn from(e: serde_json::Error) -> Self {
        let at = Location {
            line: e.line(),
            column: e.column(),
        };
        let message = e.to_string();
        match e.classify() {
            serde_json::error::Category::Syntax | serde_json::error::Category::Eof => {
                ConfigError::Syntax { at, message }
            }
            _ if message.starts_with("unknown field") => ConfigError::UnknownField { at, message },
            _ => ConfigError::Invalid { at, message },
        }
    }
}

impl SceneConfig {
    /// The scene described by this configuration.
    pub fn scene(&self) -> Result<Scene, ConfigError> {
        let pre =
            |field: &'static str| move |source: Error| ConfigError::Precondition { field, source };
        let body1 = self.body1.to_body().map_err(pre("body1"))?;
        let body2 = self.body2.to_body().map_err(pre("body2"))?;
        let material1 = self.material1.to_material().map_err(pre("material1"))?;
        let material2 = self.material2.to_material().map_err(pre("material2"))?;
        Scene::new(
            body1,
            body2,
            material1,
            material2,
            self.kernel_exponent,
            self.units,
        )
        .map_err(pre("scene"))
    }

    /// Checks everything that does not need a numeric run.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let pre =
            |field: &'static str| move |source: Error| ConfigError::Precondition { field, source };
        self.scene()?;
        if let UnitSystem::Si { length_unit_m } = self.units {
            UnitSystem::si(length_unit_m).map_err(pre("units"))?;
        }
        self.integrator.validate().map_err(pre("integrator"))?;
        if let Some(sweep) = &self.sweep {
            sweep.validate().map_err(pre("sweep"))?;
        }
        if let Some(mc) = &self.monte_carlo {
            if mc.samples == 0 {
                return Err(ConfigError::Precondition {
                    field: "monte_carlo",
                    source: Error::Domain("at least one sample is required".into()),
                });
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("configs always serialise")
    }
}

/// Parses and validates a scene file.
pub fn parse_config(text: &[u8]) -> Result<SceneConfig, ConfigError> {
    let text = std::str::from_utf8(text).map_err(|e| ConfigError::Syntax {
        at: Location { line: 0, column: 0 },
        message: format!("input is not UTF-8: {e}"),
    })?;
    let config: SceneConfig = serde_json::from_str(text)?;
    config.validate()?;
    Ok(config)
}
