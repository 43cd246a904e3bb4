//! Plain Monte Carlo estimate of the double volume integral.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::EnergyEstimate;
use crate::geometry::{volume, Body};
use crate::{Error, Result, Scene, Vector3};

fn sample(body: &Body, rng: &mut ChaCha8Rng) -> Vector3 {
    match *body {
        Body::Cuboid(b) => {
            let u = Vector3::new(rng.random(), rng.random(), rng.random());
            b.min + b.extent().component_mul(&u)
        }
        Body::Sphere { center, radius } => loop {
            let u = Vector3::new(
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
            );
            if u.norm_squared() <= 1.0 {
                return center + u * radius;
            }
        },
        Body::Point { position, .. } => position,
        Body::HalfSpace { .. } | Body::Slab { .. } => unreachable!("checked by caller"),
    }
}

/// Monte Carlo estimate of the scene energy from `samples` paired draws.
///
/// Boxes are sampled directly, spheres by rejection from their bounding cube,
/// points are fixed. Deterministic for a given seed.
pub fn monte_carlo_oracle(scene: &Scene, samples: u64, seed: u64) -> Result<EnergyEstimate> {
    scene.validate()?;
    if samples == 0 {
        return Err(Error::Domain("at least one sample is required".into()));
    }
    for body in [&scene.body1, &scene.body2] {
        if body.is_unbounded() {
            return Err(Error::Domain(format!(
                "{} has infinite volume; truncate it before sampling",
                body.kind()
            )));
        }
        if !(volume(body) > 0.0) {
            return Err(Error::Domain(format!("{} has zero volume", body.kind())));
        }
    }
    let b12 = scene.coupling().b12;
    if b12 == 0.0 {
        return Ok(EnergyEstimate::exact(0.0));
    }
    let n = scene.kernel_exponent as i32;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut mean, mut m2) = (0.0f64, 0.0f64);
    for k in 1..=samples {
        let x = sample(&scene.body1, &mut rng);
        let y = sample(&scene.body2, &mut rng);
        let f = (x - y).norm().powi(-n);
        let delta = f - mean;
        mean += delta / k as f64;
        m2 += delta * (f - mean);
    }
    let variance = if samples > 1 {
        m2 / (samples - 1) as f64
    } else {
        0.0
    };
    let stderr = (variance / samples as f64).sqrt();
    let scale = -b12 * volume(&scene.body1) * volume(&scene.body2) * scene.units.energy_scale();
    Ok(EnergyEstimate {
        value: scale * mean,
        rel_error_estimate: stderr / mean.abs(),
        kernel_evaluations: samples,
        tree_depth_used: 0,
        converged: true,
    })
}
