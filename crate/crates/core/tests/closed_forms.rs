use std::f64::consts::PI;

use approx::assert_relative_eq;
use dispersia::analytic::{
    molecule_pair_energy, plate_energy_per_area, point_half_space_energy, scene_energy,
    slab_slab_energy, sphere_half_space_energy, SlabPairParams, SpherePlateParams,
};
use dispersia::materials::{beta0, gamma0, pair_coupling, Permittivity};
use dispersia::{Body, Material, Scene, Vector3};
use proptest::prelude::*;

/// Composite Simpson rule with `n` (even) panels.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}

/// `∫ dV r⁻ⁿ` over a half-space from a point at height `y`, by radial quadrature.
fn half_space_by_quadrature(y: f64, n: u32) -> f64 {
    // Each depth z below the surface is a plane at distance s = y + z whose
    // integral is 2π s^{2−n}/(n−2); substitute z = t/(1−t) for the infinite range.
    let plane = |s: f64| 2.0 * PI * s.powi(2 - n as i32) / (n as f64 - 2.0);
    simpson(
        |t| {
            if t >= 1.0 {
                return 0.0;
            }
            let z = t / (1.0 - t);
            plane(y + z) / ((1.0 - t) * (1.0 - t))
        },
        0.0,
        1.0,
        20_000,
    )
}

#[test]
fn point_over_half_space() {
    let metal = Material::perfect_metal();
    let c = pair_coupling(&metal, &metal);
    for n in [6, 7] {
        for y in [0.5, 1.0, 3.0] {
            let exact = point_half_space_energy(&c, y, 1.0, n).unwrap();
            assert_relative_eq!(
                exact,
                -c.b12 * half_space_by_quadrature(y, n),
                max_relative = 1e-8
            );
        }
    }
}

#[test]
fn sphere_over_half_space_by_slices() {
    let metal = Material::perfect_metal();
    let c = pair_coupling(&metal, &metal);
    for (r, d) in [(1.0, 1.0), (0.5, 2.0), (2.0, 0.1)] {
        let slices = simpson(
            |z: f64| {
                let area = PI * (r * r - z * z).max(0.0);
                area * 2.0 * PI / 20.0 * (d + r + z).powi(-4)
            },
            -r,
            r,
            20_000,
        );
        let exact = sphere_half_space_energy(&c, &SpherePlateParams::new(r, d).unwrap()).unwrap();
        assert_relative_eq!(exact, -c.b12 * slices, max_relative = 1e-9);
    }
    let bmm = 1035.0 / (256.0 * PI.powi(3));
    let unit = sphere_half_space_energy(&c, &SpherePlateParams::new(1.0, 1.0).unwrap()).unwrap();
    assert_relative_eq!(unit, -bmm * PI * PI * 2.0 / 135.0, max_relative = 1e-12);
}

#[test]
fn plates_by_depth_integration() {
    for n in [6, 7] {
        for (a, t) in [(1.0, 1.0), (0.5, 3.0), (2.0, 0.25)] {
            // Each layer of plate 2 at depth u sees plate 1 as a slab of thickness t.
            let slab = |y: f64| {
                let m = n as f64 - 3.0;
                2.0 * PI / ((n as f64 - 2.0) * m) * (y.powf(-m) - (y + t).powf(-m))
            };
            let numeric = simpson(|u| slab(a + u), 0.0, t, 4000);
            assert_relative_eq!(
                -plate_energy_per_area(a, t, t, n),
                numeric,
                max_relative = 1e-10
            );
        }
    }
    let metal = Material::perfect_metal();
    let c = pair_coupling(&metal, &metal);
    let p = SlabPairParams::new(2.0, 1.0, 1.0).unwrap();
    let expected = -(1035.0 / (7680.0 * PI * PI)) * 4.0 * (1.0 + 1.0 / 27.0 - 0.25);
    assert_relative_eq!(
        slab_slab_energy(&c, &p, 7).unwrap(),
        expected,
        max_relative = 1e-12
    );
}

#[test]
fn molecules_follow_the_point_law() {
    let e = molecule_pair_energy(1.0, 1.0, 1.0).unwrap();
    assert_relative_eq!(e, -23.0 / (4.0 * PI), max_relative = 1e-15);
    assert_relative_eq!(
        molecule_pair_energy(2.0, 3.0, 2.0).unwrap(),
        6.0 * e / 128.0,
        max_relative = 1e-15
    );
    assert!(molecule_pair_energy(1.0, 1.0, 0.0).is_err());
    let gas = Material::dilute_gas(1.0, 1.0).unwrap();
    let p1 = Body::point(Vector3::zeros(), 1.0).unwrap();
    let p2 = Body::point(Vector3::z(), 1.0).unwrap();
    let scene = Scene::new(p1, p2, gas, gas, 7, Default::default()).unwrap();
    assert_relative_eq!(
        scene_energy(&scene).unwrap().energy,
        e,
        max_relative = 1e-15
    );
}

#[test]
fn factor_examples() {
    assert_eq!(beta0(Permittivity::Infinite).unwrap(), 3.0 / (4.0 * PI));
    assert_relative_eq!(beta0(4.0).unwrap(), 3.0 / (8.0 * PI), max_relative = 1e-15);
    assert_eq!(beta0(1.0).unwrap(), 0.0);
    assert_relative_eq!(
        gamma0(0.0).unwrap(),
        -3.0 / (8.0 * PI),
        max_relative = 1e-15
    );
    assert_eq!(gamma0(Permittivity::Infinite).unwrap(), 3.0 / (4.0 * PI));
    assert!(beta0(0.0).is_err());
    assert!(gamma0(-1.0).is_err());
}

proptest! {
    #[test]
    fn plate_energy_decays_with_gap(a in 0.1f64..10.0, t in 0.1f64..10.0, n in 6u32..8) {
        let near = plate_energy_per_area(a, t, t, n);
        let far = plate_energy_per_area(a * 1.1, t, t, n);
        prop_assert!(near < far && far < 0.0);
    }

    #[test]
    fn sphere_energy_scales(r in 0.1f64..5.0, d in 0.1f64..5.0, lambda in 0.2f64..5.0) {
        let metal = Material::perfect_metal();
        let c = pair_coupling(&metal, &metal);
        let u = sphere_half_space_energy(&c, &SpherePlateParams::new(r, d).unwrap()).unwrap();
        let w = sphere_half_space_energy(&c, &SpherePlateParams::new(lambda * r, lambda * d).unwrap()).unwrap();
        prop_assert!(((w * lambda - u) / u).abs() < 1e-10);
    }
}
