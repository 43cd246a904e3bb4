//! Bodies, gaps, scenes and the clipped octree used by the integrator.

mod fourier;
mod octree;

pub use self::fourier::box_fourier_volume;
pub use self::octree::{
    admissible, build_octree, Cell, Moments, Node, Octree, BOUNDARY_DEPTH_LIMIT, MAX_DEPTH_LIMIT,
};

use crate::materials::{pair_coupling, Material, PairCoupling, UnitSystem};
use crate::{Error, Result, Vector3};

/// Bodies closer than this fraction of their largest diameter are rejected.
pub const NEAR_CONTACT_FRACTION: f64 = 1e-6;

const UNIT_NORMAL_TOLERANCE: f64 = 1e-12;

/// An axis-aligned box given by its two extreme corners.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aabb {
    pub min: Vector3,
    pub max: Vector3,
}

impl Aabb {
    pub fn new(min: Vector3, max: Vector3) -> Self {
        Self { min, max }
    }

    /// The cube of half-side `half` centred on `center`.
    pub fn cube(center: Vector3, half: f64) -> Self {
        let h = Vector3::repeat(half);
        Self::new(center - h, center + h)
    }

    pub fn center(&self) -> Vector3 {
        (self.min + self.max) * 0.5
    }

    pub fn extent(&self) -> Vector3 {
        self.max - self.min
    }

    pub fn diagonal(&self) -> f64 {
        self.extent().norm()
    }

    pub fn volume(&self) -> f64 {
        let e = self.extent();
        e.x * e.y * e.z
    }

    pub fn intersection(&self, other: &Aabb) -> Option<Aabb> {
        let min = self.min.sup(&other.min);
        let max = self.max.inf(&other.max);
        if (0..3).all(|i| max[i] > min[i]) {
            Some(Aabb::new(min, max))
        } else {
            None
        }
    }

    pub fn contains(&self, p: &Vector3) -> bool {
        (0..3).all(|i| p[i] >= self.min[i] && p[i] <= self.max[i])
    }

    /// The point of the box closest to `p`.
    pub fn closest_point(&self, p: &Vector3) -> Vector3 {
        Vector3::from_fn(|i, _| p[i].clamp(self.min[i], self.max[i]))
    }

    /// Signed distance from `p` to the box surface (negative inside).
    pub fn signed_distance(&self, p: &Vector3) -> f64 {
        if self.contains(p) {
            -(0..3)
                .map(|i| (p[i] - self.min[i]).min(self.max[i] - p[i]))
                .fold(f64::INFINITY, f64::min)
        } else {
            (self.closest_point(p) - p).norm()
        }
    }

    /// Child `index` of the octant split; bit 0 selects x, bit 1 y, bit 2 z.
    pub fn octant(&self, index: usize) -> Aabb {
        let c = self.center();
        let mut min = self.min;
        let mut max = c;
        for axis in 0..3 {
            if index >> axis & 1 == 1 {
                min[axis] = c[axis];
                max[axis] = self.max[axis];
            }
        }
        Aabb::new(min, max)
    }

    pub fn translated(&self, shift: &Vector3) -> Aabb {
        Aabb::new(self.min + shift, self.max + shift)
    }
}

/// A homogeneous body.
///
/// `HalfSpace` occupies `normal·x ≤ offset`; `Slab` the laterally unbounded
/// layer `offset − thickness ≤ normal·x ≤ offset`. Both normals point out of
/// the body.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Body {
    Cuboid(Aabb),
    Sphere {
        center: Vector3,
        radius: f64,
    },
    HalfSpace {
        normal: Vector3,
        offset: f64,
    },
    Slab {
        normal: Vector3,
        offset: f64,
        thickness: f64,
    },
    Point {
        position: Vector3,
        volume: f64,
    },
}

impl Body {
    pub fn cuboid(min: Vector3, max: Vector3) -> Result<Body> {
        let body = Body::Cuboid(Aabb::new(min, max));
        body.validate()?;
        Ok(body)
    }

    pub fn sphere(center: Vector3, radius: f64) -> Result<Body> {
        let body = Body::Sphere { center, radius };
        body.validate()?;
        Ok(body)
    }

    pub fn half_space(normal: Vector3, offset: f64) -> Result<Body> {
        let body = Body::HalfSpace { normal, offset };
        body.validate()?;
        Ok(body)
    }

    pub fn slab(normal: Vector3, offset: f64, thickness: f64) -> Result<Body> {
        let body = Body::Slab {
            normal,
            offset,
            thickness,
        };
        body.validate()?;
        Ok(body)
    }

    pub fn point(position: Vector3, volume: f64) -> Result<Body> {
        let body = Body::Point { position, volume };
        body.validate()?;
        Ok(body)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = |v: &Vector3| v.iter().all(|x| x.is_finite());
        match self {
            Body::Cuboid(b) => {
                if !finite(&b.min) || !finite(&b.max) {
                    return Err(Error::Domain("box corners must be finite".into()));
                }
                if (0..3).any(|i| !(b.max[i] > b.min[i])) {
                    return Err(Error::Domain(
                        "box must have strictly positive extent on every axis".into(),
                    ));
                }
            }
            Body::Sphere { center, radius } => {
                if !finite(center) || !(*radius > 0.0) || !radius.is_finite() {
                    return Err(Error::Domain(format!(
                        "sphere needs a finite centre and positive radius, got R = {radius}"
                    )));
                }
            }
            Body::HalfSpace { normal, offset } => {
                check_normal(normal)?;
                if !offset.is_finite() {
                    return Err(Error::Domain("half-space offset must be finite".into()));
                }
            }
            Body::Slab {
                normal,
                offset,
                thickness,
            } => {
                check_normal(normal)?;
                if !offset.is_finite() || !(*thickness > 0.0) || !thickness.is_finite() {
                    return Err(Error::Domain(format!(
                        "slab needs a finite offset and positive thickness, got {thickness}"
                    )));
                }
            }
            Body::Point { position, volume } => {
                if !finite(position) || !(*volume > 0.0) || !volume.is_finite() {
                    return Err(Error::Domain(format!(
                        "point particle needs a positive volume element, got {volume}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn is_unbounded(&self) -> bool {
        matches!(self, Body::HalfSpace { .. } | Body::Slab { .. })
    }

    /// Bounding box of a finite body.
    pub fn bounding_box(&self) -> Option<Aabb> {
        match *self {
            Body::Cuboid(b) => Some(b),
            Body::Sphere { center, radius } => Some(Aabb::cube(center, radius)),
            Body::Point { position, .. } => Some(Aabb::new(position, position)),
            Body::HalfSpace { .. } | Body::Slab { .. } => None,
        }
    }

    /// Largest chord; infinite for unbounded bodies, `dV^(1/3)` for points.
    pub fn diameter(&self) -> f64 {
        match *self {
            Body::Cuboid(b) => b.diagonal(),
            Body::Sphere { radius, .. } => 2.0 * radius,
            Body::Point { volume, .. } => volume.cbrt(),
            Body::HalfSpace { .. } | Body::Slab { .. } => f64::INFINITY,
        }
    }

    pub fn translated(&self, shift: &Vector3) -> Body {
        match *self {
            Body::Cuboid(b) => Body::Cuboid(b.translated(shift)),
            Body::Sphere { center, radius } => Body::Sphere {
                center: center + shift,
                radius,
            },
            Body::HalfSpace { normal, offset } => Body::HalfSpace {
                normal,
                offset: offset + normal.dot(shift),
            },
            Body::Slab {
                normal,
                offset,
                thickness,
            } => Body::Slab {
                normal,
                offset: offset + normal.dot(shift),
                thickness,
            },
            Body::Point { position, volume } => Body::Point {
                position: position + shift,
                volume,
            },
        }
    }

    /// Scales every length by `lambda` about the origin.
    pub fn scaled(&self, lambda: f64) -> Body {
        match *self {
            Body::Cuboid(b) => Body::Cuboid(Aabb::new(b.min * lambda, b.max * lambda)),
            Body::Sphere { center, radius } => Body::Sphere {
                center: center * lambda,
                radius: radius * lambda,
            },
            Body::HalfSpace { normal, offset } => Body::HalfSpace {
                normal,
                offset: offset * lambda,
            },
            Body::Slab {
                normal,
                offset,
                thickness,
            } => Body::Slab {
                normal,
                offset: offset * lambda,
                thickness: thickness * lambda,
            },
            Body::Point { position, volume } => Body::Point {
                position: position * lambda,
                volume: volume * lambda.powi(3),
            },
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Body::Cuboid(_) => "box",
            Body::Sphere { .. } => "sphere",
            Body::HalfSpace { .. } => "half_space",
            Body::Slab { .. } => "slab",
            Body::Point { .. } => "point",
        }
    }

    /// Range of `direction·x` over a finite body.
    fn projection(&self, direction: &Vector3) -> Option<(f64, f64)> {
        match *self {
            Body::Cuboid(b) => {
                let c = direction.dot(&b.center());
                let r: f64 = (0..3)
                    .map(|i| direction[i].abs() * 0.5 * (b.max[i] - b.min[i]))
                    .sum();
                Some((c - r, c + r))
            }
            Body::Sphere { center, radius } => {
                let c = direction.dot(&center);
                Some((c - radius, c + radius))
            }
            Body::Point { position, .. } => {
                let c = direction.dot(&position);
                Some((c, c))
            }
            Body::HalfSpace { .. } | Body::Slab { .. } => None,
        }
    }

    /// `(normal, lo, hi)` of an unbounded body: it fills `lo ≤ normal·x ≤ hi`.
    pub(crate) fn layer(&self) -> Option<(Vector3, f64, f64)> {
        match *self {
            Body::HalfSpace { normal, offset } => Some((normal, f64::NEG_INFINITY, offset)),
            Body::Slab {
                normal,
                offset,
                thickness,
            } => Some((normal, offset - thickness, offset)),
            _ => None,
        }
    }
}

fn check_normal(normal: &Vector3) -> Result<()> {
    if !normal.iter().all(|x| x.is_finite()) || (normal.norm() - 1.0).abs() > UNIT_NORMAL_TOLERANCE
    {
        return Err(Error::Domain(format!(
            "normal must be a unit vector, |n| = {}",
            normal.norm()
        )));
    }
    Ok(())
}

/// Exact analytic volume; infinite for half-spaces and slabs.
pub fn volume(body: &Body) -> f64 {
    match *body {
        Body::Cuboid(b) => b.volume(),
        Body::Sphere { radius, .. } => 4.0 / 3.0 * std::f64::consts::PI * radius.powi(3),
        Body::Point { volume, .. } => volume,
        Body::HalfSpace { .. } | Body::Slab { .. } => f64::INFINITY,
    }
}

/// Gap between two intervals; negative when they overlap.
fn interval_gap(a: (f64, f64), b: (f64, f64)) -> f64 {
    (b.0 - a.1).max(a.0 - b.1)
}

fn parallel_sign(n1: &Vector3, n2: &Vector3) -> Option<f64> {
    let d = n1.dot(n2);
    if (d.abs() - 1.0).abs() <= 1e-12 {
        Some(d.signum())
    } else {
        None
    }
}

/// Closest points `(on a, on b)` of two finite bodies.
fn closest_points(a: &Body, b: &Body) -> Result<(Vector3, Vector3)> {
    use Body::*;
    let centre_and_radius = |body: &Body| match *body {
        Sphere { center, radius } => Some((center, radius)),
        Point { position, .. } => Some((position, 0.0)),
        _ => None,
    };
    match (a, b) {
        (Cuboid(ba), Cuboid(bb)) => {
            let mut pa = Vector3::zeros();
            let mut pb = Vector3::zeros();
            for i in 0..3 {
                if ba.max[i] <= bb.min[i] {
                    pa[i] = ba.max[i];
                    pb[i] = bb.min[i];
                } else if bb.max[i] <= ba.min[i] {
                    pa[i] = ba.min[i];
                    pb[i] = bb.max[i];
                } else {
                    let mid = 0.5 * (ba.min[i].max(bb.min[i]) + ba.max[i].min(bb.max[i]));
                    pa[i] = mid;
                    pb[i] = mid;
                }
            }
            Ok((pa, pb))
        }
        (Cuboid(bx), other) => {
            let (c, r) = centre_and_radius(other).expect("finite round body");
            let q = bx.closest_point(&c);
            let dir = (c - q).try_normalize(0.0).unwrap_or_else(Vector3::z);
            Ok((q, c - dir * r))
        }
        (_, Cuboid(_)) => closest_points(b, a).map(|(pb, pa)| (pa, pb)),
        _ => {
            let (ca, ra) = centre_and_radius(a).expect("finite round body");
            let (cb, rb) = centre_and_radius(b).expect("finite round body");
            let dir = (cb - ca).try_normalize(0.0).unwrap_or_else(Vector3::z);
            Ok((ca + dir * ra, cb - dir * rb))
        }
    }
}

/// Surface-to-surface distance; zero or negative means contact or overlap.
pub fn min_gap(a: &Body, b: &Body) -> Result<f64> {
    use Body::*;
    a.validate()?;
    b.validate()?;
    match (a.layer(), b.layer()) {
        (Some((n1, lo1, hi1)), Some((n2, lo2, hi2))) => {
            let sign = parallel_sign(&n1, &n2).ok_or_else(|| {
                Error::NotImplemented("gap between non-parallel half-spaces or slabs".into())
            })?;
            // Express the second layer along n1.
            let (lo2, hi2) = if sign > 0.0 { (lo2, hi2) } else { (-hi2, -lo2) };
            Ok(interval_gap((lo1, hi1), (lo2, hi2)))
        }
        (Some((n, lo, hi)), None) => Ok(interval_gap(
            (lo, hi),
            b.projection(&n).expect("finite body"),
        )),
        (None, Some(_)) => min_gap(b, a),
        (None, None) => match (a, b) {
            (Cuboid(ba), Cuboid(bb)) => {
                let sep: Vec<f64> = (0..3)
                    .map(|i| (bb.min[i] - ba.max[i]).max(ba.min[i] - bb.max[i]))
                    .collect();
                if sep.iter().all(|&s| s <= 0.0) {
                    Ok(sep.iter().copied().fold(f64::NEG_INFINITY, f64::max))
                } else {
                    Ok(sep.iter().map(|s| s.max(0.0).powi(2)).sum::<f64>().sqrt())
                }
            }
            (Cuboid(bx), Sphere { center, radius }) | (Sphere { center, radius }, Cuboid(bx)) => {
                Ok(bx.signed_distance(center) - radius)
            }
            (Cuboid(bx), Point { position, .. }) | (Point { position, .. }, Cuboid(bx)) => {
                Ok(bx.signed_distance(position))
            }
            _ => {
                let centre = |body: &Body| match *body {
                    Sphere { center, radius } => (center, radius),
                    Point { position, .. } => (position, 0.0),
                    _ => unreachable!("boxes and layers handled above"),
                };
                let (ca, ra) = centre(a);
                let (cb, rb) = centre(b);
                Ok((cb - ca).norm() - ra - rb)
            }
        },
    }
}

/// Unit vector along which translating `b` opens the gap at unit rate.
pub fn separation_direction(a: &Body, b: &Body) -> Result<Vector3> {
    match (a.layer(), b.layer()) {
        (Some(_), Some(_)) => Err(Error::NotImplemented(
            "separation axis between two unbounded bodies".into(),
        )),
        (Some((n, lo, hi)), None) => {
            let (plo, phi) = b.projection(&n).expect("finite body");
            if plo - hi >= lo - phi {
                Ok(n)
            } else {
                Ok(-n)
            }
        }
        (None, Some(_)) => separation_direction(b, a).map(|d| -d),
        (None, None) => {
            let (pa, pb) = closest_points(a, b)?;
            (pb - pa).try_normalize(0.0).ok_or_else(|| {
                Error::Precondition("bodies touch; separation axis undefined".into())
            })
        }
    }
}

/// Two material-tagged bodies with a kernel exponent and a unit system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scene {
    pub body1: Body,
    pub body2: Body,
    pub material1: Material,
    pub material2: Material,
    /// `7` for retarded zero-temperature forces, `6` for the high-temperature law.
    pub kernel_exponent: u32,
    pub units: UnitSystem,
}

/// Rejects kernel exponents other than 6 and 7.
pub fn check_exponent(n: u32) -> Result<()> {
    if n == 6 || n == 7 {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "kernel exponent must be 6 or 7, got {n}"
        )))
    }
}

impl Scene {
    pub fn new(
        body1: Body,
        body2: Body,
        material1: Material,
        material2: Material,
        kernel_exponent: u32,
        units: UnitSystem,
    ) -> Result<Self> {
        let scene = Self {
            body1,
            body2,
            material1,
            material2,
            kernel_exponent,
            units,
        };
        scene.validate()?;
        Ok(scene)
    }

    /// Metal bodies, `n = 7`, natural units.
    pub fn metal(body1: Body, body2: Body) -> Result<Self> {
        let metal = Material::perfect_metal();
        Self::new(body1, body2, metal, metal, 7, UnitSystem::Natural)
    }

    pub fn validate(&self) -> Result<()> {
        self.body1.validate()?;
        self.body2.validate()?;
        check_exponent(self.kernel_exponent)?;
        let gap = min_gap(&self.body1, &self.body2)?;
        if !(gap > 0.0) {
            return Err(Error::Precondition(format!("bodies overlap (gap = {gap})")));
        }
        let scale = [self.body1.diameter(), self.body2.diameter()]
            .into_iter()
            .filter(|d| d.is_finite())
            .fold(0.0, f64::max);
        if gap < NEAR_CONTACT_FRACTION * scale {
            return Err(Error::Precondition(format!(
                "bodies nearly touch (gap {gap:e} below {NEAR_CONTACT_FRACTION:e} of diameter {scale})"
            )));
        }
        Ok(())
    }

    pub fn gap(&self) -> Result<f64> {
        min_gap(&self.body1, &self.body2)
    }

    pub fn coupling(&self) -> PairCoupling {
        pair_coupling(&self.material1, &self.material2)
    }

    pub fn swapped(&self) -> Scene {
        Scene {
            body1: self.body2,
            body2: self.body1,
            material1: self.material2,
            material2: self.material1,
            ..*self
        }
    }

    pub fn with_exponent(&self, n: u32) -> Scene {
        Scene {
            kernel_exponent: n,
            ..*self
        }
    }

    /// Every length scaled by `lambda`.
    pub fn scaled(&self, lambda: f64) -> Scene {
        Scene {
            body1: self.body1.scaled(lambda),
            body2: self.body2.scaled(lambda),
            ..*self
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn v(x: f64, y: f64, z: f64) -> Vector3 {
        Vector3::new(x, y, z)
    }

    fn plates(a: f64) -> (Body, Body) {
        let b1 = Body::cuboid(v(-0.5, -0.5, -1.0), v(0.5, 0.5, 0.0)).unwrap();
        let b2 = Body::cuboid(v(-0.5, -0.5, a), v(0.5, 0.5, a + 1.0)).unwrap();
        (b1, b2)
    }

    #[test]
    fn volumes() {
        assert_eq!(
            volume(&Body::cuboid(Vector3::zeros(), v(1.0, 1.0, 1.0)).unwrap()),
            1.0
        );
        assert_relative_eq!(
            volume(&Body::sphere(Vector3::zeros(), 1.0).unwrap()),
            4.18879,
            epsilon = 1e-5
        );
        assert_eq!(volume(&Body::point(Vector3::zeros(), 0.5).unwrap()), 0.5);
        assert!(volume(&Body::half_space(Vector3::z(), 0.0).unwrap()).is_infinite());
    }

    #[test]
    fn validation() {
        assert!(Body::cuboid(Vector3::zeros(), v(1.0, 0.0, 1.0)).is_err());
        assert!(Body::sphere(Vector3::zeros(), 0.0).is_err());
        assert!(Body::point(Vector3::zeros(), 0.0).is_err());
        assert!(Body::half_space(v(0.0, 0.0, 1.0 + 1e-9), 0.0).is_err());
        assert!(Body::half_space(v(0.0, 0.6, 0.8), 0.0).is_ok());
    }

    #[test]
    fn gap_examples() {
        let (b1, b2) = plates(2.0);
        assert_eq!(min_gap(&b1, &b2).unwrap(), 2.0);
        let s = Body::sphere(v(0.0, 0.0, 2.0), 1.0).unwrap();
        let hs = Body::half_space(Vector3::z(), 0.0).unwrap();
        assert_eq!(min_gap(&s, &hs).unwrap(), 1.0);
        let c1 = Body::cuboid(Vector3::zeros(), v(1.0, 1.0, 1.0)).unwrap();
        let c2 = Body::cuboid(v(1.0, 0.0, 0.0), v(2.0, 1.0, 1.0)).unwrap();
        assert_eq!(min_gap(&c1, &c2).unwrap(), 0.0);
        let p = Body::point(v(0.0, 0.0, 3.0), 1.0).unwrap();
        assert_eq!(min_gap(&p, &hs).unwrap(), 3.0);
        assert_eq!(min_gap(&p, &c1).unwrap(), 2.0);
    }

    #[test]
    fn gap_of_diagonal_boxes_is_euclidean() {
        let c1 = Body::cuboid(Vector3::zeros(), v(1.0, 1.0, 1.0)).unwrap();
        let c2 = Body::cuboid(v(4.0, 5.0, 0.0), v(5.0, 6.0, 1.0)).unwrap();
        assert_relative_eq!(min_gap(&c1, &c2).unwrap(), 5.0);
    }

    #[test]
    fn overlap_is_negative() {
        let c1 = Body::cuboid(Vector3::zeros(), v(2.0, 2.0, 2.0)).unwrap();
        let c2 = Body::cuboid(v(1.0, 1.0, 1.0), v(3.0, 3.0, 3.0)).unwrap();
        assert!(min_gap(&c1, &c2).unwrap() < 0.0);
        let s = Body::sphere(v(0.0, 0.0, 0.5), 1.0).unwrap();
        let hs = Body::half_space(Vector3::z(), 0.0).unwrap();
        assert!(min_gap(&s, &hs).unwrap() < 0.0);
    }

    #[test]
    fn layers() {
        let hs = Body::half_space(Vector3::z(), 0.0).unwrap();
        let slab = Body::slab(-Vector3::z(), -2.0, 1.0).unwrap(); // 2 ≤ z ≤ 3
        assert_eq!(min_gap(&hs, &slab).unwrap(), 2.0);
        let below = Body::point(v(0.0, 0.0, 0.5), 1.0).unwrap();
        let slab_up = Body::slab(Vector3::z(), 3.0, 1.0).unwrap(); // 2 ≤ z ≤ 3
        assert_eq!(min_gap(&below, &slab_up).unwrap(), 1.5);
        assert_eq!(
            separation_direction(&slab_up, &below).unwrap(),
            -Vector3::z()
        );
        let tilted = Body::half_space(v(0.0, 0.6, 0.8), 0.0).unwrap();
        assert!(matches!(
            min_gap(&hs, &tilted),
            Err(Error::NotImplemented(_))
        ));
    }

    #[test]
    fn separation_axis() {
        let (b1, b2) = plates(1.0);
        assert_eq!(separation_direction(&b1, &b2).unwrap(), Vector3::z());
        assert_eq!(separation_direction(&b2, &b1).unwrap(), -Vector3::z());
        let s = Body::sphere(v(0.0, 0.0, 2.0), 1.0).unwrap();
        let hs = Body::half_space(Vector3::z(), 0.0).unwrap();
        assert_eq!(separation_direction(&hs, &s).unwrap(), Vector3::z());
        assert_eq!(separation_direction(&s, &hs).unwrap(), -Vector3::z());
    }

    #[test]
    fn scene_rejects_contact_and_near_contact() {
        let c1 = Body::cuboid(Vector3::zeros(), v(1.0, 1.0, 1.0)).unwrap();
        let touching = Body::cuboid(v(0.0, 0.0, 1.0), v(1.0, 1.0, 2.0)).unwrap();
        assert!(matches!(
            Scene::metal(c1, touching),
            Err(Error::Precondition(_))
        ));
        let near = Body::cuboid(v(0.0, 0.0, 1.0 + 1e-9), v(1.0, 1.0, 2.0)).unwrap();
        assert!(matches!(
            Scene::metal(c1, near),
            Err(Error::Precondition(_))
        ));
        let ok = Body::cuboid(v(0.0, 0.0, 1.0 + 1e-3), v(1.0, 1.0, 2.0)).unwrap();
        assert!(Scene::metal(c1, ok).is_ok());
        assert!(matches!(
            Scene::new(
                c1,
                ok,
                Material::vacuum(),
                Material::vacuum(),
                5,
                UnitSystem::Natural
            ),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn octants_partition() {
        let b = Aabb::new(v(0.0, 1.0, 2.0), v(2.0, 3.0, 6.0));
        let total: f64 = (0..8).map(|i| b.octant(i).volume()).sum();
        assert_relative_eq!(total, b.volume());
        assert_eq!(b.octant(7).min, b.center());
    }

    fn finite_body() -> impl Strategy<Value = Body> {
        let coord = -5.0f64..5.0;
        prop_oneof![
            (
                coord.clone(),
                coord.clone(),
                coord.clone(),
                0.1f64..2.0,
                0.1f64..2.0,
                0.1f64..2.0
            )
                .prop_map(|(x, y, z, a, b, c)| Body::Cuboid(Aabb::new(
                    v(x, y, z),
                    v(x + a, y + b, z + c)
                ))),
            (coord.clone(), coord.clone(), coord.clone(), 0.1f64..2.0).prop_map(|(x, y, z, r)| {
                Body::Sphere {
                    center: v(x, y, z),
                    radius: r,
                }
            }),
            (coord.clone(), coord.clone(), coord).prop_map(|(x, y, z)| Body::Point {
                position: v(x, y, z),
                volume: 0.1
            }),
            (-3.0f64..3.0).prop_map(|o| Body::HalfSpace {
                normal: Vector3::z(),
                offset: o
            }),
        ]
    }

    proptest! {
        #[test]
        fn gap_is_symmetric(a in finite_body(), b in finite_body()) {
            match (min_gap(&a, &b), min_gap(&b, &a)) {
                (Ok(x), Ok(y)) => prop_assert!(x == y || (x - y).abs() <= 1e-12 * (1.0 + x.abs())),
                (Err(_), Err(_)) => {}
                _ => prop_assert!(false, "asymmetric error"),
            }
        }

        #[test]
        fn separation_opens_gap_at_unit_rate(a in finite_body(), b in finite_body()) {
            let gap = min_gap(&a, &b).unwrap();
            prop_assume!(gap > 1e-3);
            let dir = separation_direction(&a, &b).unwrap();
            let h = 1e-3 * gap;
            let moved = min_gap(&a, &b.translated(&(dir * h))).unwrap();
            prop_assert!((moved - gap - h).abs() <= 1e-9 * (1.0 + gap));
        }
    }

    #[test]
    fn sphere_volume_constant() {
        assert_relative_eq!(
            volume(&Body::sphere(Vector3::zeros(), 2.0).unwrap()),
            32.0 * PI / 3.0
        );
    }
}
