"""Regenerate crates/core/data/{catalog,chains}.json."""

import json
from fractions import Fraction
from pathlib import Path

DATA = Path(__file__).resolve().parent.parent / "crates" / "core" / "data"
MAX_EXP = 5
MAX_TUPLE = 10


def word(a, b, x="A", y="B"):
    parts = []
    for letter, e in ((x, a), (y, b)):
        if e == 1:
            parts.append(letter)
        elif e > 1:
            parts.append(f"{letter}^{e}")
    return "tr(" + " ".join(parts) + ")"


def term(coeff, factors, n_power=0):
    """coeff * n^n_power * prod(factors) with a leading sign."""
    c = Fraction(coeff)
    if c == 0:
        return None
    sign = "-" if c < 0 else "+"
    c = abs(c)
    head = [] if c == 1 and factors else [str(c)]
    if n_power:
        head.append(f"n^{n_power}")
    return sign, "*".join(head + list(factors))


def poly(*terms):
    ts = [t for t in terms if t is not None]
    if not ts:
        return "0"
    out = ""
    for i, (sign, body) in enumerate(ts):
        if i == 0:
            out = body if sign == "+" else "-" + body
        else:
            out += f" {sign} {body}"
    return out


def record(id_, lhs, rhs, expected, kind="exact", degree_bound=None, mode=None):
    r = {"id": id_, "lhs": lhs, "rhs": rhs, "expected": expected, "kind": kind, "degree_bound": degree_bound}
    if mode:
        r["mode"] = mode
    return r


def catalog():
    out = []
    r = range(1, MAX_EXP + 1)
    for j in r:
        for q in r:
            out.append(record(
                f"AjBk/j={j},q={q}", word(j, 0), word(0, q),
                poly(term(j * q, [word(j - 1, q - 1)]),
                     term(-j * q, [word(j - 1, 0), word(0, q - 1)], -1))))
    for j in range(MAX_EXP + 1):
        for k in range(MAX_EXP + 1):
            if j + k == 0:
                continue
            out.append(record(
                f"ABweight/j={j},k={k}", word(j, k), word(1, 1),
                poly(term(j - k, [word(j, k)]))))
    for j in r:
        out.append(record(f"trAjB/j={j}", word(j, 0), word(0, 2), poly(term(2 * j, [word(j - 1, 1)]))))
    for j in r:
        for k in r:
            out.append(record(f"commute/A/j={j},k={k}", word(j, 0), word(k, 0), "0"))
            out.append(record(f"commute/B/j={j},k={k}", word(0, j), word(0, k), "0"))
    for j in range(MAX_EXP + 1):
        for k in range(MAX_EXP + 1):
            if j + k == 0:
                continue
            for c in ("X", "Y"):
                out.append(record(
                    f"poissonCommute/{c}/j={j},k={k}", f"tr({c})", word(j, k), "0", mode="plain"))
    for s1 in range(2, MAX_TUPLE - 1):
        for j in range(s1 + 1):
            k = s1 - j
            for s2 in range(2, MAX_TUPLE - s1 + 1):
                for p in range(s2 + 1):
                    q = s2 - p
                    d = j + k + p + q - 6
                    out.append(record(
                        f"bracketformular/j={j},k={k},p={p},q={q}", word(j, k), word(p, q),
                        poly(term(j * q - k * p, [word(j + p - 1, k + q - 1)]),
                             term(-j * q, [word(j - 1, k), word(p, q - 1)], -1) if j and q else None,
                             term(k * p, [word(j, k - 1), word(p - 1, q)], -1) if k and p else None),
                        kind="leading", degree_bound=d))
    return out


def step(lemma, i, lhs, rhs, expected, kind="exact", degree_bound=None):
    return {"lemma_id": lemma, "step": i, "lhs": lhs, "rhs": rhs, "expected": expected,
            "kind": kind, "degree_bound": degree_bound}


def chains():
    out = []
    lem = "trAj&trBk"
    s = iter(range(1, 1000))
    # tr B^3 from tr A^3 by applying {tr B^2, .} three times
    out.append(step(lem, next(s), "tr(B^2)", "tr(A^3)", "-6*tr(A^2 B)"))
    out.append(step(lem, next(s), "tr(B^2)", "-6*tr(A^2 B)", "24*tr(A B^2)"))
    out.append(step(lem, next(s), "tr(B^2)", "24*tr(A B^2)", "-48*tr(B^3)"))
    # (tr A^2)^2 and (tr B^2)^2
    out.append(step(lem, next(s), "tr(A^2)", "tr(A B)*tr(A B)", "4*tr(A^2)*tr(A B)"))
    out.append(step(lem, next(s), "tr(A^2)", "4*tr(A^2)*tr(A B)", "8*tr(A^2)*tr(A^2)"))
    out.append(step(lem, next(s), "tr(B^2)", "tr(A B)*tr(A B)", "-4*tr(B^2)*tr(A B)"))
    out.append(step(lem, next(s), "tr(B^2)", "-4*tr(B^2)*tr(A B)", "8*tr(B^2)*tr(B^2)"))
    for k in range(3, MAX_EXP):
        out.append(step(lem, next(s), word(k, 0), "tr(B^2)", poly(term(2 * k, [word(k - 1, 1)]))))
        out.append(step(lem, next(s), word(k - 1, 0), "tr(B^2)", poly(term(2 * (k - 1), [word(k - 2, 1)]))))
        out.append(step(lem, next(s), "tr(A^2)*tr(A^2)", word(k - 2, 1),
                        poly(term(4, ["tr(A^2)", word(k - 1, 0)]))))
        out.append(step(lem, next(s), "tr(A^3)", word(k - 1, 1),
                        poly(term(3, [word(k + 1, 0)]), term(-3, ["tr(A^2)", word(k - 1, 0)], -1))))
        out.append(step(lem, next(s), word(0, k), "tr(A^2)", poly(term(-2 * k, [word(1, k - 1)]))))
        out.append(step(lem, next(s), word(0, k - 1), "tr(A^2)", poly(term(-2 * (k - 1), [word(1, k - 2)]))))
        out.append(step(lem, next(s), "tr(B^2)*tr(B^2)", word(1, k - 2),
                        poly(term(-4, ["tr(B^2)", word(0, k - 1)]))))
        out.append(step(lem, next(s), "tr(B^3)", word(1, k - 1),
                        poly(term(-3, [word(0, k + 1)]), term(3, ["tr(B^2)", word(0, k - 1)], -1))))

    lem = "squares"
    s = iter(range(1, 1000))
    for j in range(2, MAX_EXP + 1):
        out.append(step(lem, next(s), word(j, 0), "tr(A B)*tr(A B)", poly(term(2 * j, [word(j, 0), "tr(A B)"]))))
        out.append(step(lem, next(s), word(j, 0), f"{word(j, 0)}*tr(A B)", poly(term(j, [word(j, 0), word(j, 0)]))))
        out.append(step(lem, next(s), word(0, j), "tr(A B)*tr(A B)", poly(term(-2 * j, [word(0, j), "tr(A B)"]))))
        out.append(step(lem, next(s), word(0, j), f"{word(0, j)}*tr(A B)", poly(term(-j, [word(0, j), word(0, j)]))))

    lem = "pullingright"
    s = iter(range(1, 1000))
    for total in range(3, 9):
        out.append(step(lem, next(s), "tr(A^2)", word(0, total), poly(term(2 * total, [word(1, total - 1)]))))
        for j in range(1, total):
            m = total - j
            out.append(step(lem, next(s), "tr(A^2)", word(j, m), poly(term(2 * m, [word(j + 1, m - 1)])),
                            kind="leading", degree_bound=total - 4))

    lem = "all-p_k=0"
    s = iter(range(1, 1000))
    for j in (2, 3):
        for prod in ([2], [3], [4], [2, 2], [2, 3], [2, 2, 2]):
            factors = [word(i, 0) for i in prod]
            p = "*".join(factors)
            out.append(step(lem, next(s), f"{word(j, 0)}*tr(A B)", p,
                            poly(term(-sum(prod), [word(j, 0)] + factors))))
    return out


def dump(path, obj):
    path.write_text(json.dumps(obj, indent=1) + "\n")


if __name__ == "__main__":
    DATA.mkdir(parents=True, exist_ok=True)
    dump(DATA / "catalog.json", {"entries": catalog()})
    dump(DATA / "chains.json", {"steps": chains()})
