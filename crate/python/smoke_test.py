"""Smoke test for the `steiner` extension module.

    pip install --no-build-isolation -e crates/py
    python python/smoke_test.py
"""

import json
import math
import tempfile

import steiner


def close(a, b, tol):
    assert abs(a - b) <= tol, (a, b)


def one_dimensional():
    f = steiner.PlConvex1D([0.0], [0.0], left=-2.0, right=1.0)
    s = f.symmetrize()
    for x in (-3.0, -0.5, 0.0, 1.25, 4.0):
        close(s(x), 4.0 * abs(x) / 3.0, 1e-12)
    close(f.exp_integral(), 1.5, 1e-12)
    close(s.exp_integral(), 1.5, 1e-12)
    assert f.symmetrize_amk()(2.0) <= s(2.0)
    close(f.legendre().legendre()(0.7), f(0.7), 1e-12)
    g = steiner.PlConvex1D.from_json(f.to_json())
    assert g.breakpoints == f.breakpoints and g.left == -2.0

    wall = steiner.PlConvex1D([-1.0, 2.0], [0.0, 0.0])
    assert wall.left is None and math.isinf(wall(3.0))
    close(wall.symmetrize().domain()[1], 1.5, 1e-12)

    try:
        steiner.PlConvex1D([0.0, 1.0], [0.0, 5.0], left=-1.0, right=0.5)
    except ValueError:
        pass
    else:
        raise AssertionError("non-convex input accepted")


def catalog():
    ids = steiner.catalog()
    assert len(ids) >= 10 and "example31" in ids
    entry = steiner.describe("example31", verify=True)
    assert all(fact["passed"] for fact in entry["facts"])
    ex = steiner.lookup("example31")
    close(ex.symmetrize().exp_integral(), ex.exp_integral(), 1e-9)


def santalo():
    r = steiner.santalo_product(steiner.lookup("abs"), "abs")
    close(r["product"], 4.0, 1e-12)
    close(r["slack"], 2.0 * math.pi - 4.0, 1e-12)
    try:
        steiner.santalo_product(steiner.lookup("two_slope"))
    except steiner.HypothesisError:
        pass
    else:
        raise AssertionError("non-even input accepted")
    rad = steiner.radial_bound(lambda t: 0.5 * t * t, 3)
    assert rad["holds"]
    close(rad["product"], (2.0 * math.pi) ** 3, 1e-6 * rad["bound"])
    close(steiner.omega(2), 2.0 * math.pi, 1e-15)


def grids():
    f = steiner.GridFn.from_callable(lambda x, y: (x - 0.5) ** 2 + 2.0 * y * y, 2, 6.0, 121)
    assert f.shape == [121, 121]
    s = f.symmetrize([1.0, 0.0])
    close(s.exp_integral(), f.exp_integral(), 1e-3 * f.exp_integral())
    close(s.eval([0.5, 0.0]), 0.25, 1e-2)
    close(s.eval([-0.5, 0.0]), 0.25, 1e-2)

    dm = steiner.dual_monotonicity(steiner.lookup("aniso_quad", points=121), [1.0, 1.0])
    assert dm["passed"], dm

    g = steiner.lookup("gauss2d", points=101)
    r = steiner.santalo_product(g, "gauss2d")
    close(r["product"], r["bound"], 1e-3 * r["bound"])

    trace, last = steiner.converge(steiner.lookup("aniso_quad", points=81), steps=10, seed=7)
    again, _ = steiner.converge(steiner.lookup("aniso_quad", points=81), steps=10, seed=7)
    assert json.dumps(trace) == json.dumps(again)
    assert len(trace["steps"]) == 11
    assert last.radial_deviation() < trace["steps"][0]["radial_deviation"]

    with tempfile.TemporaryDirectory() as d:
        s.save(d + "/s")
        back = steiner.GridFn.load(d + "/s")
        assert back.values == s.values


if __name__ == "__main__":
    one_dimensional()
    catalog()
    santalo()
    grids()
    print("smoke test passed")
