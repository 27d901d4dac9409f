"""Smoke test for the qipa Python extension.

Uses an installed `qipa` module when available; otherwise loads the library
built by `cargo build --release -p qipa-py`.
"""

import importlib.util
import math
import pathlib
import shutil
import sys
import tempfile


def load_qipa():
    try:
        import qipa

        return qipa
    except ImportError:
        pass
    root = pathlib.Path(__file__).resolve().parent.parent
    for name in ("libqipa.so", "libqipa.dylib", "qipa.dll"):
        built = root / "target" / "release" / name
        if built.exists():
            break
    else:
        sys.exit("qipa extension not found; run `cargo build --release -p qipa-py` first")
    suffix = ".pyd" if built.suffix == ".dll" else ".so"
    target = pathlib.Path(tempfile.mkdtemp()) / f"qipa{suffix}"
    shutil.copy(built, target)
    spec = importlib.util.spec_from_file_location("qipa", target)
    module = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(module)
    return module


def main():
    qipa = load_qipa()

    triangle = qipa.Graph(3, [(0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0)])
    assert triangle.cut_value("100") == 2.0
    value, optimal = triangle.brute_force_maxcut()
    assert value == 2.0 and len(optimal) == 6

    h = qipa.Hamiltonian.from_maxcut(triangle)
    s = h.spectrum()
    assert (s.ground_energy, s.lambda1, s.lambda2) == (-1.0, 5.0, 1.0)
    up = h.upscale(7.0).spectrum()
    assert math.isclose(up.absolute_gap, 7 * s.absolute_gap, rel_tol=1e-12)
    assert math.isclose(up.ratio, s.ratio, rel_tol=1e-12)

    assert qipa.kappa_bounds(3, 2.0, 1.0) == (3.0, 3.0)
    spectrum = qipa.degenerate_rest_spectrum(3, 2.0, 1.0)
    assert qipa.iterations_to_majority(spectrum, "exp:1") == 1
    assert qipa.iterations_to_majority(spectrum, "identity") == 2
    assert qipa.closed_form_majority_count(3, 2.0, 1.0, "identity") == 2
    assert qipa.iterations_to_majority(spectrum, "identity", max_iter=1) is None

    assert qipa.check_inequality_system(10, 1025.0, 1024.0)["separated"]
    assert math.isclose(qipa.lambda2_lower_bound(10), 147.23253627121868, rel_tol=1e-12)
    assert qipa.minimal_upscale_alpha(2.0**-10, 10) == 1024.0

    traj = qipa.run_evolution(h, mode="varqite", steps=200, dtau=0.05, seed=1)
    assert len(traj["energy"]) == 200
    assert abs(traj["energy"][-1] + 1.0) <= 0.05

    edge = qipa.Hamiltonian.from_maxcut(qipa.Graph(2, [(0, 1, 5.0)]))
    rows = qipa.alpha_blowup_scan(edge, [1.0, 2.0, 4.0])
    assert [r["var"] / rows[0]["var"] for r in rows] == [1.0, 4.0, 16.0]

    try:
        qipa.Graph.parse("0 1\n")
    except ValueError as e:
        assert "line 1" in str(e)
    else:
        raise AssertionError("malformed edge list accepted")

    print("python smoke test passed")


if __name__ == "__main__":
    main()
