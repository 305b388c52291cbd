"""Smoke test for the pbw_workbench extension module.

Build first with `cargo build -p pbw-py` (or `maturin develop` from
crates/python). Set PBW_WORKBENCH_LIB to point at a specific shared library.
"""

import importlib.machinery
import importlib.util
import os
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def load():
    try:
        import pbw_workbench

        return pbw_workbench
    except ImportError:
        pass
    env = os.environ.get("PBW_WORKBENCH_LIB")
    candidates = [Path(env)] if env else [
        ROOT / "target" / profile / name
        for profile in ("release", "debug")
        for name in ("libpbw_workbench.so", "libpbw_workbench.dylib", "pbw_workbench.dll")
    ]
    for path in candidates:
        if path.exists():
            loader = importlib.machinery.ExtensionFileLoader("pbw_workbench", str(path))
            spec = importlib.util.spec_from_file_location("pbw_workbench", str(path), loader=loader)
            module = importlib.util.module_from_spec(spec)
            loader.exec_module(module)
            return module
    sys.exit("pbw_workbench not found; run `cargo build -p pbw-py` first")


def main():
    pw = load()

    sl2 = pw.Presentation({"lie": {"n": 3, "c": [
        {"i": 1, "j": 2, "k": 3, "value": "1"},
        {"i": 3, "j": 1, "k": 1, "value": "2"},
        {"i": 3, "j": 2, "k": 2, "value": "-2"},
    ]}})
    assert sl2.n == 3 and sl2.source == "lie" and sl2.is_linear()
    assert sl2.validate()["valid"]
    cert = sl2.certify("lie")
    assert cert["verdict"] == "pass", cert
    assert sl2.obstruction() is None
    h = sl2.hilbert(4)
    assert h["dims"] == [1, 3, 6, 10, 15], h

    commutator = [{"word": [1, 2], "coeff": "1"}, {"word": [2, 1], "coeff": "-1"}, {"word": [3], "coeff": "-h"}]
    assert sl2.member(commutator, 3, at=2) is True
    assert sl2.member(commutator, 2) is None

    nonjacobi = pw.Presentation({"lie": {"n": 3, "c": [{"i": 1, "j": 2, "k": 3, "value": 1}, {"i": 2, "j": 3, "k": 2, "value": 1}]}})
    ob = nonjacobi.obstruction()
    assert ob is not None and ob["hbar_order"] == 2, ob

    strange = pw.Potential({"potential": {"n": 3, "terms": [{"word": [3, 2, 1], "coeff": "-h"}]}})
    assert strange.derivative(1)["display"] == "-h*x3*x2"
    p = strange.to_presentation()
    assert p.certify()["verdict"] == "pass"
    at1 = p.pbw(3, at=1)
    assert at1["dims"] == [1, 3, 6, 12], at1

    element = {"n": 3, "terms": [{"word": "x3*x2*x1", "coeff": "-1"}, {"word": "x1*x3*x2", "coeff": "1"}]}
    t = p.torsion(element, "1-h", 5)
    assert t["outcome"] == "witness" and t["nonmember_at"] == "1", t
    try:
        p.torsion(element, "1-h", 1)
    except ValueError:
        pass
    else:
        raise AssertionError("degree bound 1 should be rejected")

    try:
        pw.Presentation('{"lie": ')
    except ValueError as e:
        assert "line" in str(e) or "EOF" in str(e), e
    else:
        raise AssertionError("broken JSON accepted")

    print("smoke test ok:", pw.__version__)


if __name__ == "__main__":
    main()
