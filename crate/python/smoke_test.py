"""Smoke test for the tits_py extension.

Uses an installed ``tits_py`` if there is one; otherwise loads the shared library
from ``target/release`` or ``target/debug`` (build it with
``cargo build -p tits-py --release --features extension-module``).
"""

import importlib.machinery
import importlib.util
import json
import math
import pathlib
import sys

ROOT = pathlib.Path(__file__).resolve().parent.parent


def load():
    try:
        import tits_py

        return tits_py
    except ImportError:
        pass
    for profile in ("release", "debug"):
        lib = ROOT / "target" / profile / "libtits_py.so"
        if lib.exists():
            loader = importlib.machinery.ExtensionFileLoader("tits_py", str(lib))
            spec = importlib.util.spec_from_file_location("tits_py", str(lib), loader=loader)
            module = importlib.util.module_from_spec(spec)
            loader.exec_module(module)
            return module
    sys.exit("tits_py not found: build it with cargo build -p tits-py --release --features extension-module")


def main():
    t = load()

    g = t.Isometry.sl2_real([[math.e, 0.0], [0.0, 1.0 / math.e]])
    cls = g.classify()
    assert cls["kind"] == "hyperbolic", cls
    assert abs(cls["tau"] - 2.0) < 1e-12
    assert g.model == "sl2-real"
    assert abs(g.pow(3).translation_length() - 6.0) < 1e-12
    assert abs(g.displacement([0.0, 0.0, 1.0]) - 2.0) < 1e-12

    # JSON round trip, plain and framed
    same = t.Isometry(g.to_json())
    assert same.to_json() == g.to_json()
    far = t.Isometry.framed(g, t.Isometry({"model": "sl2-real", "matrix": [[math.cosh(10), math.sinh(10)], [math.sinh(10), math.cosh(10)]]}))
    assert "conjugator" in json.loads(far.to_json())

    assert t.constants(eps=0.1, n=2)["N_case1"] == 2957

    a = t.Isometry.sl2_real([[1.0, 2.0], [0.0, 1.0]])
    b = t.Isometry.sl2_real([[1.0, 0.0], [2.0, 1.0]])
    cert = t.certify(a, b, oracle_depth=6)
    assert cert["case"] == 2 and cert["N"] == 1 and cert["status"] == "verified", cert["status"]
    report = t.verify_certificate(cert)
    assert report["consistent"], report

    relator = t.oracle(t.Isometry.sl2_real([[1.0, 1.0], [0.0, 1.0]]), t.Isometry.sl2_real([[1.0, 0.0], [-2.0, 1.0]]), depth=4)
    assert relator == {"result": "relation", "word": "abab", "depth": 4, "exact": True, "words_checked": relator["words_checked"]}

    rep = t.propcheck("ra-triangle", samples=500, seed=1)
    assert rep["passed"] and rep["violations"] == 0
    assert "decrease-speed" in t.suites()

    try:
        t.certify(t.Isometry.sl2_real([[0.0, -1.0], [1.0, 0.0]]), a)
    except t.TitsError as e:
        assert str(e).startswith("EllipticInput"), e
    else:
        raise AssertionError("elliptic input accepted")
    try:
        t.propcheck("nope", samples=1)
    except t.TitsError as e:
        assert "UnknownSuite" in str(e)
    else:
        raise AssertionError("unknown suite accepted")
    assert issubclass(t.OracleRefuted, t.TitsError)

    print("python smoke test ok")


if __name__ == "__main__":
    main()
