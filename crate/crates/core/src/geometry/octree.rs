//! Octree decomposition of a body clipped to a bounding box.
//!
//! Each cell carries the volume, centroid and central second moment of the
//! part of the body it contains. Cells whose clipped region is an exact box
//! (cuboids, axis-aligned layers, cells wholly inside a sphere) are resolved
//! in closed form at any depth. Cells straddling a curved or oblique surface
//! are split down to the tree's maximum depth, where a 3×3×3 centre-sampling
//! of sub-cells assigns the occupied fraction.
//!
//! Children are generated on first access and cached, so a tree can be shared
//! immutably between worker threads while only the refined parts get built.

use std::sync::OnceLock;

use super::{Aabb, Body};
use crate::{Error, Matrix3, Result, Vector3};

/// Hard limit on the subdivision depth of any octree.
pub const MAX_DEPTH_LIMIT: u32 = 24;

/// Cells straddling a curved boundary are built eagerly down to this depth;
/// deeper ones are built on demand.
const EAGER_DEPTH: u32 = 6;

/// Cells straddling a curved or oblique surface stop refining at this depth
/// even when the tree allows deeper cells elsewhere.
pub const BOUNDARY_DEPTH_LIMIT: u32 = 10;

const SUBSAMPLES_PER_AXIS: usize = 3;

/// Zeroth, first and central second moments of a region.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub volume: f64,
    pub centroid: Vector3,
    /// `∫ (x − c)(x − c)ᵀ dV` about the centroid.
    pub second: Matrix3,
}

impl Moments {
    pub fn of_box(b: &Aabb) -> Self {
        let e = b.extent();
        let volume = b.volume();
        Self {
            volume,
            centroid: b.center(),
            second: Matrix3::from_diagonal(&(e.component_mul(&e) * (volume / 12.0))),
        }
    }

    /// Combines disjoint parts with the parallel-axis theorem.
    pub fn merge<I>(parts: I) -> Option<Moments>
    where
        I: IntoIterator<Item = Moments>,
        I::IntoIter: Clone,
    {
        let parts = parts.into_iter();
        let volume: f64 = parts.clone().map(|m| m.volume).sum();
        if !(volume > 0.0) {
            return None;
        }
        let centroid = parts
            .clone()
            .fold(Vector3::zeros(), |acc, m| acc + m.centroid * m.volume)
            / volume;
        let second = parts.fold(Matrix3::zeros(), |acc, m| {
            let d = m.centroid - centroid;
            acc + m.second + d * d.transpose() * m.volume
        });
        Some(Moments {
            volume,
            centroid,
            second,
        })
    }
}

/// One octree cell and the clipped body region it holds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    /// The octant box of this cell.
    pub bounds: Aabb,
    /// Tight box around the clipped region where known, else `bounds`.
    pub extent: Aabb,
    pub volume: f64,
    pub centroid: Vector3,
    pub second_moment: Matrix3,
    pub depth: u32,
    splittable: bool,
}

impl Cell {
    fn new(bounds: Aabb, extent: Aabb, moments: Moments, depth: u32, splittable: bool) -> Self {
        Self {
            bounds,
            extent,
            volume: moments.volume,
            centroid: moments.centroid,
            second_moment: moments.second,
            depth,
            splittable,
        }
    }

    /// Diagonal of the cell's bounding box, as used by the admissibility test.
    pub fn diagonal(&self) -> f64 {
        self.extent.diagonal()
    }

    /// True when the cell cannot be refined any further.
    pub fn is_leaf(&self) -> bool {
        !self.splittable
    }

    pub fn moments(&self) -> Moments {
        Moments {
            volume: self.volume,
            centroid: self.centroid,
            second: self.second_moment,
        }
    }
}

/// A cell with lazily generated children.
#[derive(Debug)]
pub struct Node {
    cell: Cell,
    children: OnceLock<Box<[Node]>>,
}

impl Node {
    pub fn cell(&self) -> &Cell {
        &self.cell
    }
}

#[derive(Debug, Clone, Copy)]
enum Region {
    Cuboid(Aabb),
    Ball { center: Vector3, radius: f64 },
    Layer { normal: Vector3, lo: f64, hi: f64 },
    Point { position: Vector3, volume: f64 },
}

enum Occupancy {
    Empty,
    Full,
    /// Partially covered, with the covered part an exact box.
    Exact(Aabb),
    /// Partially covered by a curved or oblique surface.
    Partial,
}

fn axis_of(normal: &Vector3) -> Option<usize> {
    (0..3).find(|&k| normal[k].abs() == 1.0 && (0..3).filter(|&j| j != k).all(|j| normal[j] == 0.0))
}

fn classify_box(region: &Aabb, cell: &Aabb) -> Occupancy {
    match region.intersection(cell) {
        None => Occupancy::Empty,
        Some(b) if b == *cell => Occupancy::Full,
        Some(b) => Occupancy::Exact(b),
    }
}

impl Region {
    fn from_body(body: &Body) -> Self {
        match *body {
            Body::Cuboid(b) => Region::Cuboid(b),
            Body::Sphere { center, radius } => Region::Ball { center, radius },
            Body::Point { position, volume } => Region::Point { position, volume },
            Body::HalfSpace { .. } | Body::Slab { .. } => {
                let (normal, lo, hi) = body.layer().expect("unbounded body");
                match axis_of(&normal) {
                    Some(k) => {
                        let mut min = Vector3::repeat(f64::NEG_INFINITY);
                        let mut max = Vector3::repeat(f64::INFINITY);
                        if normal[k] > 0.0 {
                            min[k] = lo;
                            max[k] = hi;
                        } else {
                            min[k] = -hi;
                            max[k] = -lo;
                        }
                        Region::Cuboid(Aabb::new(min, max))
                    }
                    None => Region::Layer { normal, lo, hi },
                }
            }
        }
    }

    fn classify(&self, cell: &Aabb) -> Occupancy {
        match *self {
            Region::Cuboid(b) => classify_box(&b, cell),
            Region::Ball { center, radius } => {
                let dc = (cell.center() - center).norm();
                let hd = 0.5 * cell.diagonal();
                if dc + hd <= radius {
                    Occupancy::Full
                } else if dc - hd >= radius {
                    Occupancy::Empty
                } else {
                    Occupancy::Partial
                }
            }
            Region::Layer { normal, lo, hi } => {
                let c = normal.dot(&cell.center());
                let e = cell.extent();
                let r: f64 = (0..3).map(|i| 0.5 * normal[i].abs() * e[i]).sum();
                if c - r >= lo && c + r <= hi {
                    Occupancy::Full
                } else if c + r <= lo || c - r >= hi {
                    Occupancy::Empty
                } else {
                    Occupancy::Partial
                }
            }
            Region::Point { position, .. } => {
                if cell.contains(&position) {
                    Occupancy::Partial
                } else {
                    Occupancy::Empty
                }
            }
        }
    }

    fn contains(&self, p: &Vector3) -> bool {
        match *self {
            Region::Cuboid(b) => b.contains(p),
            Region::Ball { center, radius } => (p - center).norm_squared() <= radius * radius,
            Region::Layer { normal, lo, hi } => {
                let s = normal.dot(p);
                s >= lo && s <= hi
            }
            Region::Point { .. } => false,
        }
    }

    /// Occupied sub-cells of a boundary cell at the maximum depth.
    fn subsample(&self, cell: &Aabb) -> Option<Moments> {
        let mut sums = Sums::default();
        self.subsample_into(cell, &cell.center(), &mut sums);
        sums.finish(&cell.center())
    }

    fn subsample_into(&self, cell: &Aabb, origin: &Vector3, sums: &mut Sums) {
        let n = SUBSAMPLES_PER_AXIS;
        let step = cell.extent() / n as f64;
        let mut count = 0.0;
        let mut first = Vector3::zeros();
        let mut outer = Matrix3::zeros();
        let base = cell.min + step * 0.5 - origin;
        for k in 0..n {
            for j in 0..n {
                for i in 0..n {
                    let u = base
                        + Vector3::new(i as f64 * step.x, j as f64 * step.y, k as f64 * step.z);
                    if self.contains(&(u + origin)) {
                        count += 1.0;
                        first += u;
                        outer += u * u.transpose();
                    }
                }
            }
        }
        if count > 0.0 {
            let v = step.x * step.y * step.z;
            sums.volume += count * v;
            sums.first += first * v;
            sums.second += outer * v
                + Matrix3::from_diagonal(&(step.component_mul(&step) * (count * v / 12.0)));
        }
    }

    fn moments_into(
        &self,
        cell: &Aabb,
        depth: u32,
        max_depth: u32,
        origin: &Vector3,
        sums: &mut Sums,
    ) {
        match self.classify(cell) {
            Occupancy::Empty => {}
            Occupancy::Full => sums.add(&Moments::of_box(cell), origin),
            Occupancy::Exact(b) => sums.add(&Moments::of_box(&b), origin),
            Occupancy::Partial if depth >= max_depth => self.subsample_into(cell, origin, sums),
            Occupancy::Partial => {
                for i in 0..8 {
                    self.moments_into(&cell.octant(i), depth + 1, max_depth, origin, sums);
                }
            }
        }
    }

    /// Clipped moments of `cell`, refining boundary cells to `max_depth`.
    fn moments(&self, cell: &Aabb, depth: u32, max_depth: u32) -> Option<Moments> {
        let origin = cell.center();
        let mut sums = Sums::default();
        self.moments_into(cell, depth, max_depth, &origin, &mut sums);
        sums.finish(&origin)
    }
}

/// Raw moments about a fixed origin.
#[derive(Default)]
struct Sums {
    volume: f64,
    first: Vector3,
    second: Matrix3,
}

impl Sums {
    fn add(&mut self, m: &Moments, origin: &Vector3) {
        let d = m.centroid - origin;
        self.volume += m.volume;
        self.first += d * m.volume;
        self.second += m.second + d * d.transpose() * m.volume;
    }

    fn finish(&self, origin: &Vector3) -> Option<Moments> {
        if !(self.volume > 0.0) {
            return None;
        }
        let c = self.first / self.volume;
        Some(Moments {
            volume: self.volume,
            centroid: origin + c,
            second: self.second - c * c.transpose() * self.volume,
        })
    }
}

/// A clipped octree over one body.
#[derive(Debug)]
pub struct Octree {
    region: Region,
    max_depth: u32,
    root: Option<Node>,
}

impl Octree {
    fn make_node(&self, bounds: Aabb, depth: u32) -> Option<Node> {
        let splittable = depth < self.max_depth;
        let lazy = |cell: Cell| Node {
            cell,
            children: OnceLock::new(),
        };
        match self.region.classify(&bounds) {
            Occupancy::Empty => None,
            Occupancy::Full => Some(lazy(Cell::new(
                bounds,
                bounds,
                Moments::of_box(&bounds),
                depth,
                splittable,
            ))),
            Occupancy::Exact(b) => Some(lazy(Cell::new(
                bounds,
                b,
                Moments::of_box(&b),
                depth,
                splittable,
            ))),
            Occupancy::Partial => {
                if let Region::Point { position, volume } = self.region {
                    let moments = Moments {
                        volume,
                        centroid: position,
                        second: Matrix3::zeros(),
                    };
                    let at = Aabb::new(position, position);
                    return Some(lazy(Cell::new(bounds, at, moments, depth, false)));
                }
                if !splittable || depth >= BOUNDARY_DEPTH_LIMIT {
                    let moments = self.region.subsample(&bounds)?;
                    return Some(lazy(Cell::new(bounds, bounds, moments, depth, false)));
                }
                if depth < EAGER_DEPTH {
                    let children: Box<[Node]> = (0..8)
                        .filter_map(|i| self.make_node(bounds.octant(i), depth + 1))
                        .collect();
                    let moments = Moments::merge(children.iter().map(|c| c.cell.moments()))?;
                    let node = Node {
                        cell: Cell::new(bounds, bounds, moments, depth, true),
                        children: OnceLock::new(),
                    };
                    let _ = node.children.set(children);
                    Some(node)
                } else {
                    let limit = self.max_depth.min(BOUNDARY_DEPTH_LIMIT);
                    let moments = self.region.moments(&bounds, depth, limit)?;
                    Some(lazy(Cell::new(bounds, bounds, moments, depth, true)))
                }
            }
        }
    }

    /// The root cell, or `None` when the body does not meet the bounds.
    pub fn root(&self) -> Option<&Node> {
        self.root.as_ref()
    }

    /// Children of `node` in octant order; empty for leaves.
    pub fn children<'a>(&'a self, node: &'a Node) -> &'a [Node] {
        if node.cell.is_leaf() {
            return &[];
        }
        node.children.get_or_init(|| {
            (0..8)
                .filter_map(|i| self.make_node(node.cell.bounds.octant(i), node.cell.depth + 1))
                .collect()
        })
    }

    pub fn max_depth(&self) -> u32 {
        self.max_depth
    }

    /// Clipped volume of the whole tree.
    pub fn total_volume(&self) -> f64 {
        self.root.as_ref().map_or(0.0, |n| n.cell.volume)
    }

    /// Cells obtained by refining from the root until `stop` holds or a leaf is reached.
    pub fn cells_where<F>(&self, stop: F) -> Vec<Cell>
    where
        F: Fn(&Cell) -> bool,
    {
        fn walk<F: Fn(&Cell) -> bool>(tree: &Octree, node: &Node, stop: &F, out: &mut Vec<Cell>) {
            if stop(&node.cell) || node.cell.is_leaf() {
                out.push(node.cell);
            } else {
                for child in tree.children(node) {
                    walk(tree, child, stop, out);
                }
            }
        }
        let mut out = Vec::new();
        if let Some(root) = &self.root {
            walk(self, root, &stop, &mut out);
        }
        out
    }

    /// The partition of the tree at `depth` (shallower leaves included).
    pub fn cells_at_depth(&self, depth: u32) -> Vec<Cell> {
        self.cells_where(|c| c.depth >= depth)
    }
}

/// True when the two cells are far enough apart for a single point-pair evaluation:
/// `(diag_a + diag_b) / |c_a − c_b| ≤ theta`.
pub fn admissible(a: &Cell, b: &Cell, theta: f64) -> bool {
    let distance = (a.centroid - b.centroid).norm();
    distance > 0.0 && a.diagonal() + b.diagonal() <= theta * distance
}

/// Builds the octree of `body ∩ bounds` down to `max_depth`.
pub fn build_octree(body: &Body, bounds: Aabb, max_depth: u32) -> Result<Octree> {
    if max_depth > MAX_DEPTH_LIMIT {
        return Err(Error::Resource(format!(
            "octree depth {max_depth} exceeds the limit of {MAX_DEPTH_LIMIT}"
        )));
    }
    body.validate()?;
    if (0..3).any(|i| {
        !(bounds.max[i] >= bounds.min[i])
            || !bounds.min[i].is_finite()
            || !bounds.max[i].is_finite()
    }) {
        return Err(Error::Domain("octree bounds must be a finite box".into()));
    }
    let mut tree = Octree {
        region: Region::from_body(body),
        max_depth,
        root: None,
    };
    tree.root = tree.make_node(bounds, 0);
    Ok(tree)
}
