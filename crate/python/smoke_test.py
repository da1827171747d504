"""Smoke test for the hodgebound extension module.

Build and install with `maturin develop -m crates/python/Cargo.toml`, or copy
target/<profile>/libhodgebound.so next to this script as hodgebound.so.
"""

import json
import math
import sys

import hodgebound as hb


def close(a, b, rel):
    return abs(a - b) <= rel * abs(b)


def main():
    assert close(hb.ball_dirichlet_eigenvalue(3, 0.0, 1.0), math.pi ** 2, 1e-12)
    assert close(hb.ball_dirichlet_eigenvalue(2, 0.0, 1.0), 5.783185962946785, 1e-10)
    try:
        hb.ball_dirichlet_eigenvalue(2, 1.0, 4.0)
    except ValueError:
        pass
    else:
        raise AssertionError("radius beyond the sphere cap was accepted")

    mc = hb.ManifoldClass(2, 0.0, D=math.sqrt(2) * math.pi, rH=math.pi, r0=math.pi)
    b = mc.hodge_bound(1, 0)
    assert b.regime == "LargeK" and b.source == "Thm 1.2"
    assert close(b.value, 2.343837, 1e-6)
    assert close(mc.hodge_bound(1, 1).value, 4 * b.value, 1e-14)
    try:
        hb.ManifoldClass(2, 0.0, rH=math.pi).hodge_bound(1, 0)
    except hb.HypothesisError as e:
        assert "diameter" in str(e)
    else:
        raise AssertionError("missing diameter was accepted")
    assert hb.savo_hyperbolic_sigma(3, 3) == 1.0

    torus = hb.Mesh.torus(16)
    assert torus.betti_numbers == [1, 2, 1]
    s = torus.spectrum(0, 6)
    assert s.kernel_dim == 1
    assert all(close(x, 1.0, 0.02) for x in s.positive[:4])
    assert torus.spectrum(1, 4).kernel_dim == 2

    centers, separated, covered = torus.eps_net(math.pi / 4)
    assert separated and covered and len(centers) > 1

    report = json.loads(torus.verify_main(k_max=5, p_list=[0, 1]))
    assert report["summary"]["failed"] == 0, report["summary"]
    decomp = json.loads(hb.Mesh("torus:8").verify_decomposition([math.pi / 2]))
    assert decomp["summary"]["failed"] == 0

    sphere = hb.Mesh.icosphere(2)
    assert sphere.betti_numbers == [1, 0, 1]
    assert sphere.spectrum(1, 3).kernel_dim == 0

    print("smoke test passed:", hb.__version__, torus, sphere)
    return 0


if __name__ == "__main__":
    sys.exit(main())
