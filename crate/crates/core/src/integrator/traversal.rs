//! Dual-tree traversal over two clipped octrees.

use rayon::prelude::*;

use super::summation::{Accumulator, Summation};
use crate::geometry::{Cell, Node, Octree};
use crate::Vector3;

/// Work items are produced by splitting root pairs this many times.
const FRONTIER_LEVELS: usize = 3;

#[derive(Debug, Clone, Copy)]
pub(crate) struct Rule {
    pub theta: f64,
    pub exponent: u32,
    pub second_moment: bool,
    pub summation: Summation,
}

/// Raw kernel sum `∬ r⁻ⁿ` with evaluation statistics.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Tally {
    pub sum: Accumulator,
    pub evaluations: u64,
    pub depth: u32,
}

impl Tally {
    fn new(mode: Summation) -> Self {
        Self {
            sum: Accumulator::new(mode),
            evaluations: 0,
            depth: 0,
        }
    }

    fn merge(&mut self, other: &Tally) {
        self.sum.merge(&other.sum);
        self.evaluations += other.evaluations;
        self.depth = self.depth.max(other.depth);
    }
}

/// Contribution of one cell pair: centroid rule plus, optionally, the
/// second-moment term of the Taylor expansion about both centroids.
#[inline]
pub(crate) fn pair_term(a: &Cell, b: &Cell, offset: &Vector3, n: u32, second_moment: bool) -> f64 {
    let d = a.centroid - b.centroid - offset;
    let r2 = d.norm_squared();
    let inv_r2 = 1.0 / r2;
    let base = powi_half(inv_r2, n);
    let mut value = a.volume * b.volume * base;
    if second_moment {
        let nf = n as f64;
        let m = a.second_moment * b.volume + b.second_moment * a.volume;
        let projected = (d.transpose() * m * d)[0] * inv_r2;
        value += 0.5 * nf * base * inv_r2 * ((nf + 2.0) * projected - m.trace());
    }
    value
}

/// `r⁻ⁿ` from `r⁻²`.
#[inline]
fn powi_half(inv_r2: f64, n: u32) -> f64 {
    let even = inv_r2.powi((n / 2) as i32);
    if n.is_multiple_of(2) {
        even
    } else {
        even * inv_r2.sqrt()
    }
}

enum Step<'a> {
    Evaluate,
    Split(Vec<(&'a Node, &'a Node)>),
}

struct Walker<'a> {
    a: &'a Octree,
    b: &'a Octree,
    /// Translation applied to every cell of `b`.
    offset: Vector3,
    rule: Rule,
}

impl<'a> Walker<'a> {
    fn step(&self, na: &'a Node, nb: &'a Node) -> Step<'a> {
        let (ca, cb) = (na.cell(), nb.cell());
        let distance = (ca.centroid - cb.centroid - self.offset).norm();
        if distance > 0.0 && ca.diagonal() + cb.diagonal() <= self.rule.theta * distance {
            return Step::Evaluate;
        }
        let kids_a = self.a.children(na);
        let kids_b = self.b.children(nb);
        let split_a = !kids_a.is_empty() && (kids_b.is_empty() || ca.diagonal() >= cb.diagonal());
        let split_b = !kids_b.is_empty() && (kids_a.is_empty() || cb.diagonal() >= ca.diagonal());
        let pairs = match (split_a, split_b) {
            (false, false) => return Step::Evaluate,
            (true, false) => kids_a.iter().map(|c| (c, nb)).collect(),
            (false, true) => kids_b.iter().map(|c| (na, c)).collect(),
            (true, true) => kids_a
                .iter()
                .flat_map(|x| kids_b.iter().map(move |y| (x, y)))
                .collect(),
        };
        Step::Split(pairs)
    }

    fn evaluate(&self, na: &Node, nb: &Node, tally: &mut Tally) {
        let (ca, cb) = (na.cell(), nb.cell());
        tally.sum.add(pair_term(
            ca,
            cb,
            &self.offset,
            self.rule.exponent,
            self.rule.second_moment,
        ));
        tally.evaluations += 1;
        tally.depth = tally.depth.max(ca.depth).max(cb.depth);
    }

    fn walk(&self, na: &'a Node, nb: &'a Node, tally: &mut Tally) {
        match self.step(na, nb) {
            Step::Evaluate => self.evaluate(na, nb, tally),
            Step::Split(pairs) => {
                for (x, y) in pairs {
                    self.walk(x, y, tally);
                }
            }
        }
    }
}

/// Sums the pair kernel over `a` and `b` translated by `offset`.
///
/// The pair list is expanded a fixed number of levels in canonical order and
/// each resulting item is summed independently; partial sums are merged in
/// item order, so the result does not depend on the number of workers.
pub(crate) fn dual_tree_sum(a: &Octree, b: &Octree, offset: Vector3, rule: Rule) -> Tally {
    let mut total = Tally::new(rule.summation);
    let (Some(ra), Some(rb)) = (a.root(), b.root()) else {
        return total;
    };
    let walker = Walker { a, b, offset, rule };
    let mut frontier: Vec<(&Node, &Node, bool)> = vec![(ra, rb, false)];
    for _ in 0..FRONTIER_LEVELS {
        let mut next = Vec::with_capacity(frontier.len() * 8);
        for &(x, y, done) in &frontier {
            if done {
                next.push((x, y, true));
                continue;
            }
            match walker.step(x, y) {
                Step::Evaluate => next.push((x, y, true)),
                Step::Split(pairs) => next.extend(pairs.into_iter().map(|(p, q)| (p, q, false))),
            }
        }
        frontier = next;
    }
    let parts: Vec<Tally> = frontier
        .par_iter()
        .map(|&(x, y, done)| {
            let mut t = Tally::new(rule.summation);
            if done {
                walker.evaluate(x, y, &mut t);
            } else {
                walker.walk(x, y, &mut t);
            }
            t
        })
        .collect();
    for part in &parts {
        total.merge(part);
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_octree, Aabb, Body};
    use crate::Vector3;
    use approx::assert_relative_eq;

    #[test]
    fn odd_and_even_powers() {
        assert_relative_eq!(powi_half(0.25, 7), 2f64.powi(-7), max_relative = 1e-15);
        assert_relative_eq!(powi_half(0.25, 6), 2f64.powi(-6), max_relative = 1e-15);
    }

    #[test]
    fn second_moment_term_matches_taylor_oracle() {
        // Brute-force average of r⁻⁷ over a small box against a far point.
        let bx = Aabb::new(
            Vector3::new(-0.1, -0.05, -0.2),
            Vector3::new(0.1, 0.05, 0.2),
        );
        let body = Body::Cuboid(bx);
        let tree = build_octree(&body, bx, 0).unwrap();
        let cell = *tree.root().unwrap().cell();
        let point = Body::point(Vector3::new(0.3, 0.4, 1.2), 1.0).unwrap();
        let ptree = build_octree(&point, point.bounding_box().unwrap(), 0).unwrap();
        let pcell = *ptree.root().unwrap().cell();
        let k = 60;
        let e = bx.extent();
        let mut sum = 0.0;
        for i in 0..k {
            for j in 0..k {
                for l in 0..k {
                    let x = bx.min
                        + Vector3::new(
                            (i as f64 + 0.5) * e.x / k as f64,
                            (j as f64 + 0.5) * e.y / k as f64,
                            (l as f64 + 0.5) * e.z / k as f64,
                        );
                    sum += (x - pcell.centroid).norm().powi(-7);
                }
            }
        }
        let brute = sum * bx.volume() / (k * k * k) as f64;
        let plain = pair_term(&cell, &pcell, &Vector3::zeros(), 7, false);
        let corrected = pair_term(&cell, &pcell, &Vector3::zeros(), 7, true);
        assert!((corrected - brute).abs() < 0.1 * (plain - brute).abs());
    }
}
