"""Smoke test for the edsat extension module.

Build and install first, e.g. ``maturin develop -m crates/py/Cargo.toml``,
then run ``python crates/py/python/smoke.py``.
"""

import math

import edsat


def close(a, b, tol):
    return abs(a - b) <= tol * max(1.0, abs(b))


def main():
    assert close(edsat.hyp1f1(1.0, 1.0, 0.5), math.exp(0.5), 1e-12)
    assert close(edsat.hyp2f1(1.0, 1.0, 2.0, 0.25), -math.log(0.75) / 0.25, 1e-12)

    model = edsat.SaturationModel(-1.0, 2.0)
    energy, branch = model.solve(1.5)
    assert close(energy, 0.6, 1e-14) and branch == "unique"
    assert model.saturation_limit() == 1.0
    generic, _ = edsat.SaturationModel(-0.3, 3.0).solve(2.0, method="generic")
    assert abs(edsat.SaturationModel(-0.3, 3.0).level_residual(generic, 2.0)) < 1e-10

    levels = edsat.spectrum("ho", -1.0, 2.0, 3)
    assert [round(l.energy, 6) for l in levels] == [0.6, 0.714286, 0.777778, 0.818182]

    fit = edsat.fit("ccbar", -0.4)
    assert max(abs(r) for r in fit.residuals) < 1e-8
    assert close(fit.mass(1) - fit.mass(0), 3.649 - 3.096, 1e-8)
    rows = edsat.mass_table("bbbar", [0.0, -0.3], n_max=5)
    assert len(rows) == 12 and rows[0][0] == "1S"

    phi = edsat.ho_eigenfunction(0, 0, 0.0, 2.0, 1.0, 0.7)
    assert close(phi, 0.7 * math.exp(-0.245), 1e-14)

    x, w, v = edsat.transform_sample("ho", 1.0, k=2.0, c=1.5)
    assert close(w, 2.0 / 2.0 - 1.0, 1e-8)
    grid = [0.2 + 0.1 * i for i in range(49)]
    assert close(edsat.transform_energy("hydrogen", grid, k=2.0, c=2.0), -0.5, 1e-6)

    try:
        edsat.SaturationModel(0.1, -1.0)
    except ValueError:
        pass
    else:
        raise AssertionError("negative q accepted")

    print("edsat smoke test passed")


if __name__ == "__main__":
    main()
