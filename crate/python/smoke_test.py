"""Smoke test of the Python bindings; run with `python python/smoke_test.py` or pytest."""

import json
import math

import dispersia as d


def close(a, b, rel):
    return abs(a - b) <= rel * abs(b)


def test_constants():
    metal = d.Material.perfect_metal()
    c = d.pair_coupling(metal, metal)
    assert close(c.b12, 1035 / (256 * math.pi**3), 1e-12)
    assert close(c.a12, (1035 / 3840) * (2 * math.pi) ** -5, 1e-12)
    assert d.truncate_to_significant(d.METAL_PLATE_COEFFICIENT, 4) == "0.01365"
    assert d.truncate_to_significant(d.METAL_SPHERE_PLATE_COEFFICIENT, 4) == "0.04289"
    assert d.pair_coupling(d.Material.vacuum(), metal).b12 == 0.0
    assert close(d.Material.dielectric(4.0).beta0, 3 / (8 * math.pi), 1e-15)
    assert d.Material.dielectric(float("inf"), 0.0).beta0 == metal.beta0


def test_plate_energy_and_force():
    slab = d.Body.slab([0, 0, 1], 0.0, 1.0)
    plate = d.Body.cuboid([-0.5, -0.5, 1.0], [0.5, 0.5, 2.0])
    scene = d.Scene(slab, plate)
    assert scene.gap == 1.0
    exact = -d.METAL_PLATE_COEFFICIENT * (1 + 1 / 27 - 1 / 4)
    assert close(d.scene_energy(scene), exact, 1e-12)
    est = d.pair_energy(scene, d.IntegratorSettings(threads=1))
    assert close(est.value, exact, 1e-3)
    assert est.kernel_evaluations > 0
    f = d.force_along_gap(scene)
    g = d.force_along_gap(scene, backend="integrator")
    assert f < 0 and close(g, f, 5e-3)


def test_errors():
    a = d.Body.cuboid([0, 0, 0], [1, 1, 1])
    try:
        d.Scene(a, a)
    except ValueError as e:
        assert "overlap" in str(e)
    else:
        raise AssertionError("overlap accepted")
    s1 = d.Body.sphere([0, 0, 0], 1.0)
    s2 = d.Body.sphere([0, 0, 3], 1.0)
    try:
        d.scene_energy(d.Scene(s1, s2))
    except NotImplementedError:
        pass
    else:
        raise AssertionError("sphere pair has no closed form")
    try:
        d.IntegratorSettings(theta=3.0)
    except ValueError:
        pass
    else:
        raise AssertionError("theta out of range accepted")


def test_monte_carlo_and_sweep():
    a = d.Body.cuboid([0, 0, 0], [1, 1, 1])
    b = a.translated([0, 0, 2])
    scene = d.Scene(a, b)
    mc = d.monte_carlo_oracle(scene, 200_000, seed=3)
    again = d.monte_carlo_oracle(scene, 200_000, seed=3)
    assert mc.value == again.value
    tree = d.pair_energy(scene)
    sigma = math.hypot(mc.rel_error_estimate * mc.value, tree.rel_error_estimate * tree.value)
    assert abs(mc.value - tree.value) <= 4 * sigma
    sweep = d.convergence_sweep(scene, [4, 6, 8])
    assert len(sweep) == 3


def test_run_config():
    config = d.preset_config("molecule-pair")
    report = json.loads(d.run_config(config, timestamp=1))
    assert report["generated_unix_s"] == 1
    assert report["failures"] == []
    assert abs(report["results"]["ratio"] - 1.0) < 1e-12


if __name__ == "__main__":
    for name, fn in sorted(globals().items()):
        if name.startswith("test_") and callable(fn):
            fn()
            print(f"{name}: ok")
