use num_complex::Complex64;

use super::Aabb;
use crate::Vector3;

/// `∫_box exp(i q·r) dV` in global coordinates.
///
/// Each axis contributes `(2/q_j) sin(q_j e_j / 2)` (or `e_j` at `q_j = 0`),
/// and the box centre `c` carries the phase `exp(i q·c)`.
pub fn box_fourier_volume(cuboid: &Aabb, q: &Vector3) -> Complex64 {
    let extent = cuboid.extent();
    let magnitude: f64 = (0..3)
        .map(|j| {
            if q[j] == 0.0 {
                extent[j]
            } else {
                2.0 * (0.5 * q[j] * extent[j]).sin() / q[j]
            }
        })
        .product();
    Complex64::from_polar(magnitude, q.dot(&cuboid.center()))
}
