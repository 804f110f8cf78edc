"""Smoke test for the tracepoisson extension module.

Build and install first:

    pip install --no-build-isolation -e crates/python
"""

import json

import tracepoisson as tp


def main():
    a2 = tp.parse("tr(A^2)")
    b2 = tp.parse("tr(B^2)")
    assert str(tp.bracket(a2, b2)) == "4*tr(A B)"
    assert tp.bracket_unreduced(a2, b2) == "4*tr(A B) - 4*n^-1*tr(A)*tr(B)"
    assert str(tp.TracePolynomial("tr(A^3)").reduce(2)) == "0"

    pt = tp.CMPoint.sample(3, seed=7)
    assert pt.rank_residual < 1e-10
    again = tp.CMPoint.from_json(pt.to_json())
    assert again.x == pt.x and again.y == pt.y

    f, g = tp.parse("tr(A^2 B)"), tp.parse("tr(A B^3)")
    exact = tp.bracket(f, g).evaluate(pt)
    numeric = tp.numeric_bracket(f, g, pt)
    assert abs(exact - numeric) <= 1e-9 * max(1.0, abs(exact))

    moved = pt.flow("scaling", 1 + 1j)
    assert moved.rank_residual < 1e-9

    report = tp.verify_catalog(n=2, samples=100)
    assert report["failed"] == 0, report["failed"]
    assert tp.replay_lemma_chain("trAj&trBk")["passed"]

    basis = tp.LieClosureBasis(2, degree=6)
    certs = basis.check_membership([tp.parse("tr(A B) tr(A^2)")])
    assert certs[0]["status"] == "certified", json.dumps(certs[0])

    plane = tp.model_generation("plane", 5)
    assert plane["passed"]

    records = tp.certify_flow("cubicShear", 1.0, 2, samples=3)
    assert all(r["passed"] for r in records)
    print(f"ok: {len(report['entries'])} catalog entries, closure of {len(basis)} elements")


if __name__ == "__main__":
    main()
