//! Truncation of half-spaces and slabs with a closed-form remainder.
//!
//! An unbounded layer is replaced by a finite box: depth `T` below the facing
//! surface and a lateral margin `T` around the finite body's footprint. For
//! each volume element of the finite body the kernel integral over the part
//! of the layer outside that box is added back:
//!
//! - below depth `T`: `G(y + T) − G(y + D)`, with `G` the half-space integral;
//! - beside the box, at depths `0..T`: the plane complement of the footprint
//!   rectangle, integrated radially in closed form and over angle by
//!   Gauss–Legendre quadrature edge by edge.

use std::sync::OnceLock;

use crate::analytic::half_space_kernel_integral;
use crate::geometry::{Aabb, Body};
use crate::{Error, Result, Vector3};

const EDGE_NODES: usize = 24;

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut rule = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        rule.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    rule
}

fn edge_rule() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(EDGE_NODES))
}

/// Antiderivative in `s` of `(R² + s²)^{−(n−2)/2}`.
fn radial_antiderivative(s: f64, r: f64, n: u32) -> f64 {
    let r2 = r * r;
    let q = r2 + s * s;
    match n {
        7 => s * (2.0 * s * s + 3.0 * r2) / (3.0 * r2 * r2 * q.powf(1.5)),
        6 => s / (2.0 * r2 * q) + (s / r).atan() / (2.0 * r2 * r),
        _ => unreachable!("kernel exponent validated upstream"),
    }
}

/// One unbounded layer seen from a finite body on its outer side.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Truncation {
    axis: usize,
    /// `+1` when the finite body lies towards increasing coordinate.
    sign: f64,
    /// Coordinate (along `sign · e_axis`) of the facing surface.
    surface: f64,
    /// Full layer depth; infinite for a half-space.
    depth: f64,
    /// Depth kept in the truncated box.
    kept: f64,
    lateral: [(usize, f64, f64); 2],
    length: f64,
    pub(crate) truncated: Aabb,
}

impl Truncation {
    /// Truncates `layer` to depth and lateral margin `length` around `finite`.
    pub(crate) fn new(layer: &Body, finite: &Body, length: f64) -> Result<Self> {
        let (normal, lo, hi) = layer.layer().expect("unbounded body");
        let axis = (0..3)
            .find(|&k| normal[k].abs() == 1.0)
            .filter(|&k| (0..3).filter(|&j| j != k).all(|j| normal[j] == 0.0))
            .ok_or_else(|| {
                Error::NotImplemented(
                    "numeric integration against half-spaces or slabs needs an axis-aligned normal"
                        .into(),
                )
            })?;
        let bbox = finite.bounding_box().expect("finite body");
        let (plo, phi) = {
            let c = normal.dot(&bbox.center());
            let r = 0.5 * bbox.extent()[axis];
            (c - r, c + r)
        };
        // Outward unit normal m facing the body, and σ with layer at m·x ∈ [σ−D, σ].
        let (m_sign, surface, depth) = if plo >= hi {
            (normal[axis], hi, hi - lo)
        } else if phi <= lo {
            (-normal[axis], -lo, hi - lo)
        } else {
            return Err(Error::Precondition("body overlaps the layer".into()));
        };
        let kept = length.min(depth);
        let mut min = Vector3::zeros();
        let mut max = Vector3::zeros();
        if m_sign > 0.0 {
            min[axis] = surface - kept;
            max[axis] = surface;
        } else {
            min[axis] = -surface;
            max[axis] = -surface + kept;
        }
        let lateral_axes = [(axis + 1) % 3, (axis + 2) % 3];
        let mut lateral = [(0, 0.0, 0.0); 2];
        for (slot, &k) in lateral.iter_mut().zip(&lateral_axes) {
            min[k] = bbox.min[k] - length;
            max[k] = bbox.max[k] + length;
            *slot = (k, min[k], max[k]);
        }
        Ok(Self {
            axis,
            sign: m_sign,
            surface,
            depth,
            kept,
            lateral,
            length,
            truncated: Aabb::new(min, max),
        })
    }

    pub(crate) fn length(&self) -> f64 {
        self.length
    }

    pub(crate) fn truncated_body(&self) -> Body {
        Body::Cuboid(self.truncated)
    }

    /// Kernel integral over the discarded part of the layer, seen from `p`.
    pub(crate) fn remainder(&self, p: &Vector3, n: u32) -> f64 {
        let y = self.sign * p[self.axis] - self.surface;
        debug_assert!(y > 0.0);
        let below = if self.kept < self.depth {
            half_space_kernel_integral(y + self.kept, n)
                - half_space_kernel_integral(y + self.depth, n)
        } else {
            0.0
        };
        below + self.beside(p, y, n)
    }

    fn beside(&self, p: &Vector3, y: f64, n: u32) -> f64 {
        let [(i, x0, x1), (j, y0, y1)] = self.lateral;
        let (px, py) = (p[i], p[j]);
        let top = y + self.kept;
        let radial = |r: f64| {
            (radial_antiderivative(top, r, n) - radial_antiderivative(y, r, n)) / (n as f64 - 2.0)
        };
        // Each edge: perpendicular distance and the two lateral offsets to its corners.
        let edges = [
            (x1 - px, py - y0, y1 - py),
            (y1 - py, x1 - px, px - x0),
            (px - x0, y1 - py, py - y0),
            (py - y0, px - x0, x1 - px),
        ];
        let rule = edge_rule();
        let mut total = 0.0;
        for (e, left, right) in edges {
            for (from, to) in [(-(left / e).atan(), 0.0), (0.0, (right / e).atan())] {
                let half = 0.5 * (to - from);
                let mid = 0.5 * (to + from);
                total += rule
                    .iter()
                    .map(|&(x, w)| {
                        let phi = mid + half * x;
                        w * radial(e / phi.cos())
                    })
                    .sum::<f64>()
                    * half;
            }
        }
        total
    }
}
