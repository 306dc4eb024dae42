"""Smoke test for the Python bindings.

Build first with `pip install --no-build-isolation -e crates/py` (needs maturin).
"""

import json

import cyclic_ainf_py as ainf


def main():
    doc = ainf.generate(7)
    assert ainf.check(doc) == [], "generated fixture should validate"

    broken = json.loads(doc)
    op = next(o for o in broken["ops"] if any(len(set(t)) > 1 for t, _ in o["entries"]))
    entry = next(e for e in op["entries"] if len(set(e[0])) > 1)
    entry[1][0] += entry[1][1]
    try:
        ainf.check(json.dumps(broken))
    except ValueError as e:
        assert "not cyclic" in str(e), e
    else:
        raise AssertionError("a non-cyclic entry should be rejected")

    terms = ainf.psi(doc)
    print("psi:", " + ".join(f"{n}/{d} T^({en}/{ed})" for n, d, en, ed in terms) or "0")

    auts = sorted(aut for _, aut in ainf.trees(0, 2, [1, 2]))
    assert auts == [1, 2], auts

    passed, text, report = ainf.run(["transfer", "--seed", "3"])
    assert passed, text
    assert "Ψ(f_*(b)) = Ψ^can(b): pass" in text
    assert json.loads(report)["command"] == "transfer"
    print("smoke test passed")


if __name__ == "__main__":
    main()
