//! Numerical evaluation of `U = −ħc B₁₂ ∬ dV₁ dV₂ / |r₁ − r₂|ⁿ`.
//!
//! [`pair_energy`] runs a dual-tree traversal over clipped octrees of the two
//! bodies. Half-spaces and slabs are cut down to a finite box and the
//! discarded part is added back in closed form. [`monte_carlo_oracle`] is an
//! independent sampling estimate used for cross-checks.

mod monte_carlo;
mod summation;
mod tail;
mod traversal;

use serde::{Deserialize, Serialize};

pub use self::monte_carlo::monte_carlo_oracle;
pub use self::summation::{Accumulator, Summation};
use self::tail::Truncation;
use self::traversal::{dual_tree_sum, Rule};
use crate::geometry::{build_octree, check_exponent, Aabb, Body, Cell, Octree, MAX_DEPTH_LIMIT};
use crate::{Error, Result, Scene, Vector3};

/// Tail cells are refined until their diagonal is below this fraction of the truncation length.
const TAIL_CELL_FRACTION: f64 = 0.05;

/// Tuning knobs of the dual-tree integrator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntegratorSettings {
    /// Admissibility parameter, in `(0, 2]`.
    pub theta: f64,
    pub max_depth: u32,
    pub target_rel_error: f64,
    /// Half-space truncation length as a multiple of the gap.
    pub halfspace_truncation_depth: f64,
    pub summation: Summation,
    /// Adds the second-moment term of each cell pair to the centroid rule.
    pub second_moment_correction: bool,
    /// Reports the Richardson-extrapolated value of the fine and coarse passes.
    pub richardson_extrapolation: bool,
    /// Worker count; `None` uses the global rayon pool.
    pub threads: Option<usize>,
}

impl Default for IntegratorSettings {
    fn default() -> Self {
        Self {
            theta: 0.5,
            max_depth: 10,
            target_rel_error: 1e-3,
            halfspace_truncation_depth: 8.0,
            summation: Summation::Compensated,
            second_moment_correction: true,
            richardson_extrapolation: true,
            threads: None,
        }
    }
}

impl IntegratorSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.theta > 0.0 && self.theta <= 2.0) {
            return Err(Error::Domain(format!(
                "theta must lie in (0, 2], got {}",
                self.theta
            )));
        }
        if !(self.target_rel_error > 0.0) {
            return Err(Error::Domain(format!(
                "target relative error must be positive, got {}",
                self.target_rel_error
            )));
        }
        if !(self.halfspace_truncation_depth > 0.0 && self.halfspace_truncation_depth.is_finite()) {
            return Err(Error::Domain(format!(
                "half-space truncation depth must be positive, got {}",
                self.halfspace_truncation_depth
            )));
        }
        if self.max_depth > MAX_DEPTH_LIMIT {
            return Err(Error::Resource(format!(
                "maximum depth {} exceeds the limit of {MAX_DEPTH_LIMIT}",
                self.max_depth
            )));
        }
        if self.threads == Some(0) {
            return Err(Error::Domain("thread count must be at least 1".into()));
        }
        Ok(())
    }
}

/// An energy with its error estimate and evaluation statistics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyEstimate {
    /// Energy in the scene's unit system.
    pub value: f64,
    pub rel_error_estimate: f64,
    pub kernel_evaluations: u64,
    pub tree_depth_used: u32,
    /// False when the error estimate exceeds the target.
    pub converged: bool,
}

impl EnergyEstimate {
    pub fn exact(value: f64) -> Self {
        Self {
            value,
            rel_error_estimate: 0.0,
            kernel_evaluations: 0,
            tree_depth_used: 0,
            converged: true,
        }
    }
}

/// `r⁻ⁿ`.
pub fn kernel(r: f64, n: u32) -> Result<f64> {
    check_exponent(n)?;
    if !(r > 0.0) {
        return Err(Error::Domain(format!(
            "kernel distance must be positive, got {r}"
        )));
    }
    Ok(r.powi(-(n as i32)))
}

fn octree_for(body: &Body, max_depth: u32) -> Result<Octree> {
    let bbox = body.bounding_box().expect("finite body");
    let half = 0.5 * bbox.extent().max();
    build_octree(body, Aabb::cube(bbox.center(), half), max_depth)
}

/// Unscaled `∬ r⁻ⁿ` and evaluation statistics for one settings level.
struct Raw {
    integral: f64,
    evaluations: u64,
    depth: u32,
}

/// Trees of one settings level.
struct Level {
    a: Octree,
    b: Octree,
    rule: Rule,
    /// Cells of `a` that carry the layer remainder.
    tail_cells: Vec<Cell>,
}

impl Level {
    fn new(
        finite: &Body,
        other: &Body,
        cut: Option<&Truncation>,
        n: u32,
        settings: &IntegratorSettings,
    ) -> Result<Self> {
        let rule = Rule {
            theta: settings.theta,
            exponent: n,
            second_moment: settings.second_moment_correction,
            summation: settings.summation,
        };
        let a = octree_for(finite, settings.max_depth)?;
        let (b, tail_cells) = match cut {
            None => (octree_for(other, settings.max_depth)?, Vec::new()),
            Some(cut) => {
                let b = octree_for(&cut.truncated_body(), settings.max_depth)?;
                let cells = a.cells_where(|c| c.diagonal() <= TAIL_CELL_FRACTION * cut.length());
                (b, cells)
            }
        };
        Ok(Self {
            a,
            b,
            rule,
            tail_cells,
        })
    }

    fn integral(&self, cut: Option<&Truncation>, offset: Vector3) -> Raw {
        let t = dual_tree_sum(&self.a, &self.b, offset, self.rule);
        let mut sum = t.sum;
        if let Some(cut) = cut {
            for cell in &self.tail_cells {
                sum.add(cell.volume * cut.remainder(&(cell.centroid - offset), self.rule.exponent));
            }
        }
        Raw {
            integral: sum.value(),
            evaluations: t.evaluations + self.tail_cells.len() as u64,
            depth: t.depth,
        }
    }
}

fn run_in_pool<T: Send>(threads: Option<usize>, job: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(job()),
        Some(k) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(k)
                .build()
                .map_err(|e| Error::Resource(format!("cannot start worker pool: {e}")))?;
            Ok(pool.install(job))
        }
    }
}

/// Octrees of a scene, reusable for rigid translations of body 2.
pub(crate) struct Prepared {
    settings: IntegratorSettings,
    scale: f64,
    /// Sign relating a shift of body 2 to the offset of tree `b`.
    sign: f64,
    cut: Option<Truncation>,
    levels: Option<[Level; 2]>,
}

impl Prepared {
    /// Builds the fine and coarse trees; `truncation` fixes the layer cut-off length.
    pub(crate) fn new(
        scene: &Scene,
        settings: &IntegratorSettings,
        truncation: Option<f64>,
    ) -> Result<Self> {
        settings.validate()?;
        scene.validate()?;
        let b12 = scene.coupling().b12;
        let mut prepared = Self {
            settings: *settings,
            scale: -b12 * scene.units.energy_scale(),
            sign: 1.0,
            cut: None,
            levels: None,
        };
        if b12 == 0.0 {
            return Ok(prepared);
        }
        let (finite, other, sign) = match (scene.body1.is_unbounded(), scene.body2.is_unbounded()) {
            (false, _) => (&scene.body1, &scene.body2, 1.0),
            (true, false) => (&scene.body2, &scene.body1, -1.0),
            (true, true) => {
                return Err(Error::Domain(
                    "two unbounded bodies have infinite interaction energy; use the per-area plate formula"
                        .into(),
                ))
            }
        };
        prepared.sign = sign;
        if other.is_unbounded() {
            let length = truncation.unwrap_or(settings.halfspace_truncation_depth * scene.gap()?);
            prepared.cut = Some(Truncation::new(other, finite, length)?);
        }
        let n = scene.kernel_exponent;
        let coarse = IntegratorSettings {
            theta: 2.0 * settings.theta,
            max_depth: settings.max_depth.saturating_sub(1),
            ..*settings
        };
        let cut = prepared.cut.as_ref();
        let (fine, coarse) = run_in_pool(settings.threads, || {
            (
                Level::new(finite, other, cut, n, settings),
                Level::new(finite, other, cut, n, &coarse),
            )
        })?;
        prepared.levels = Some([fine?, coarse?]);
        Ok(prepared)
    }

    /// Energy with body 2 translated by `shift`.
    pub(crate) fn estimate(&self, shift: Vector3) -> Result<EnergyEstimate> {
        let Some([fine, coarse]) = &self.levels else {
            return Ok(EnergyEstimate::exact(0.0));
        };
        let settings = &self.settings;
        let offset = shift * self.sign;
        let cut = self.cut.as_ref();
        let (fine, coarse) = run_in_pool(settings.threads, || {
            (fine.integral(cut, offset), coarse.integral(cut, offset))
        })?;
        let difference = fine.integral - coarse.integral;
        let integral = if settings.richardson_extrapolation {
            let order = if settings.second_moment_correction {
                4
            } else {
                2
            };
            fine.integral + difference / ((1u32 << order) - 1) as f64
        } else {
            fine.integral
        };
        let rel_error_estimate = if integral == 0.0 {
            0.0
        } else if settings.richardson_extrapolation {
            ((integral - fine.integral) / integral).abs()
        } else {
            (difference / integral).abs()
        };
        Ok(EnergyEstimate {
            value: self.scale * integral,
            rel_error_estimate,
            kernel_evaluations: fine.evaluations + coarse.evaluations,
            tree_depth_used: fine.depth,
            converged: rel_error_estimate <= settings.target_rel_error,
        })
    }
}

/// Dual-tree estimate of the scene energy.
///
/// A second, coarser pass runs at `2θ` and one level less depth. The
/// centroid rule converges as `θ²`, or `θ⁴` with the second-moment term, so
/// the two passes are combined by Richardson extrapolation; the size of that
/// correction is the reported error estimate. Without extrapolation the
/// estimate is `|U_fine − U_coarse| / |U_fine|`.
pub fn pair_energy(scene: &Scene, settings: &IntegratorSettings) -> Result<EnergyEstimate> {
    Prepared::new(scene, settings, None)?.estimate(Vector3::zeros())
}

/// One [`pair_energy`] estimate per maximum depth.
pub fn convergence_sweep(
    scene: &Scene,
    settings: &IntegratorSettings,
    depths: &[u32],
) -> Result<Vec<EnergyEstimate>> {
    if depths.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Domain("depths must be strictly increasing".into()));
    }
    depths
        .iter()
        .map(|&d| {
            pair_energy(
                scene,
                &IntegratorSettings {
                    max_depth: d,
                    ..*settings
                },
            )
        })
        .collect()
}
