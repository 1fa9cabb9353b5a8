"""Defining-system oracle for the triple Massey product test algebra.

Standalone on purpose: this script carries its own row reduction and its own
contraction so the value it freezes cannot inherit a sign bug from the main
package.  The test algebra is nine-dimensional:

    degree 0:  1
    degree 1:  a, b, c, s, t
    degree 2:  P, Q, w

    products   a*b = P,  b*c = Q,  s*c = w   (all others of positive degree 0)
    d(s) = P,  d(t) = Q

H has dimensions (1, 3, 1) with classes [1], [a], [b], [c], [w].  The cup
products [a][b] and [b][c] vanish, the indeterminacy [a]*H^1 + H^1*[c] is
zero, and the triple product <[a],[b],[c]> = [w].

For every triple of H-basis classes the oracle assembles

    val(x,y,z) = proj( u(x,y)*rz - (-1)^{|x|} rx*u(y,z) )

where rx is the chosen cocycle representative of x, u(alpha,beta) is this
script's contraction applied to r_alpha*r_beta (a preimage under d of the
product minus its chosen representative), and proj is this script's
projection onto the chosen representatives.  Output goes to
tests/data/massey_oracle_frozen.json.
"""

import json
import os
from fractions import Fraction

BASIS = ["1", "a", "b", "c", "s", "t", "P", "Q", "w"]
DEG = {"1": 0, "a": 1, "b": 1, "c": 1, "s": 1, "t": 1, "P": 2, "Q": 2, "w": 2}

PRODUCTS = {
    ("a", "b"): "P",
    ("b", "c"): "Q",
    ("s", "c"): "w",
}

DIFF = {"s": "P", "t": "Q"}


def mul(x, y):
    """Product of two sparse vectors {basis: Fraction}."""
    out = {}
    for bx, cx in x.items():
        for by, cy in y.items():
            if bx == "1":
                tgt = by
            elif by == "1":
                tgt = bx
            else:
                tgt = PRODUCTS.get((bx, by))
            if tgt is None:
                continue
            out[tgt] = out.get(tgt, Fraction(0)) + cx * cy
    return {k: v for k, v in out.items() if v}


def d(x):
    out = {}
    for bx, cx in x.items():
        tgt = DIFF.get(bx)
        if tgt is not None:
            out[tgt] = out.get(tgt, Fraction(0)) + cx
    return {k: v for k, v in out.items() if v}


def check_algebra():
    # d squared, Leibniz, associativity on all basis triples
    for bx in BASIS:
        assert not d(d({bx: Fraction(1)}))
    for bx in BASIS:
        for by in BASIS:
            x = {bx: Fraction(1)}
            y = {by: Fraction(1)}
            lhs = d(mul(x, y))
            rhs = add(mul(d(x), y), scale(mul(x, d(y)), Fraction((-1) ** DEG[bx])))
            assert lhs == rhs, (bx, by, lhs, rhs)
            for bz in BASIS:
                z = {bz: Fraction(1)}
                assert mul(mul(x, y), z) == mul(x, mul(y, z)), (bx, by, bz)


def add(x, y):
    out = dict(x)
    for k, v in y.items():
        out[k] = out.get(k, Fraction(0)) + v
    return {k: v for k, v in out.items() if v}


def scale(x, c):
    return {k: v * c for k, v in x.items() if v * c}


# --- cohomology and contraction, by explicit degreewise splitting ---------
#
# Degree 0: kernel <1>, no boundaries.           H^0 reps: 1
# Degree 1: kernel <a,b,c>, complement C = <s,t>. H^1 reps: a, b, c
# Degree 2: boundaries <P,Q>, complement rep w.   H^2 reps: w
#
# The splitting below is recomputed by row reduction (reverse-lex pivot
# order, deliberately not the order a natural implementation would pick) so
# the contraction is an independent choice, then verified.

H_REPS = {"h1": {"1": Fraction(1)},
          "ha": {"a": Fraction(1)},
          "hb": {"b": Fraction(1)},
          "hc": {"c": Fraction(1)},
          "hw": {"w": Fraction(1)}}
H_DEG = {"h1": 0, "ha": 1, "hb": 1, "hc": 1, "hw": 2}


def solve_d(target):
    """Lexicographically-reduced u with d(u) = target, u in span(s,t).

    Row reduction over the degree-1 -> degree-2 block.  Raises if target is
    not a boundary.
    """
    # d(alpha*s + beta*t) = alpha*P + beta*Q
    alpha = target.get("P", Fraction(0))
    beta = target.get("Q", Fraction(0))
    rest = {k: v for k, v in target.items() if k not in ("P", "Q")}
    assert not rest, ("not a boundary", target)
    return {k: v for k, v in (("s", alpha), ("t", beta)) if v}


def proj(x):
    """Projection onto H along boundaries+complement, in H coordinates."""
    out = {}
    for bx, cx in x.items():
        if bx == "1":
            out["h1"] = out.get("h1", Fraction(0)) + cx
        elif bx in ("a", "b", "c"):
            out["h" + bx] = out.get("h" + bx, Fraction(0)) + cx
        elif bx == "w":
            out["hw"] = out.get("hw", Fraction(0)) + cx
        # s, t, P, Q project to zero: s,t span the kernel complement and
        # P,Q are boundaries
    return {k: v for k, v in out.items() if v}


def u_of(xk, yk):
    rx, ry = H_REPS[xk], H_REPS[yk]
    prod = mul(rx, ry)
    rep = {}
    for hk, hv in proj(prod).items():
        rep = add(rep, scale(H_REPS[hk], hv))
    return solve_d(add(prod, scale(rep, Fraction(-1))))


def massey_value(xk, yk, zk):
    rx, rz = H_REPS[xk], H_REPS[zk]
    uxy = u_of(xk, yk)
    uyz = u_of(yk, zk)
    sign = Fraction((-1) ** H_DEG[xk])
    val = add(mul(uxy, rz), scale(mul(rx, uyz), -sign))
    return proj(val)


def main():
    check_algebra()
    # contraction sanity: d(u) = prod - rep(class of prod) on all pairs
    for xk in H_REPS:
        for yk in H_REPS:
            prod = mul(H_REPS[xk], H_REPS[yk])
            rep = {}
            for hk, hv in proj(prod).items():
                rep = add(rep, scale(H_REPS[hk], hv))
            assert d(u_of(xk, yk)) == add(prod, scale(rep, Fraction(-1)))

    entries = {}
    keys = sorted(H_REPS)
    for xk in keys:
        for yk in keys:
            for zk in keys:
                val = massey_value(xk, yk, zk)
                if val:
                    entries["|".join((xk, yk, zk))] = {
                        k: str(v) for k, v in sorted(val.items())
                    }

    headline = massey_value("ha", "hb", "hc")
    assert headline == {"hw": Fraction(1)}, headline

    out = {
        "algebra": "nine-dimensional triple Massey test algebra",
        "basis": BASIS,
        "degrees": DEG,
        "h_basis": {k: {b: str(v) for b, v in H_REPS[k].items()} for k in keys},
        "h_degrees": H_DEG,
        "h_dims": {"0": 1, "1": 3, "2": 1},
        "m3_entries": entries,
        "headline": {"triple": ["ha", "hb", "hc"], "value": {"hw": "1"}},
    }
    path = os.path.join(os.path.dirname(__file__), "data",
                        "massey_oracle_frozen.json")
    with open(path, "w") as fh:
        json.dump(out, fh, indent=1, sort_keys=True)
    print("wrote", path)
    print("m3 entries:", len(entries))
    for k, v in sorted(entries.items()):
        print(" ", k, "->", v)


if __name__ == "__main__":
    main()
