"""The relative complex of an algebra with coefficients in a bimodule.

A relative cochain of arity n couples one algebra cochain with a tuple of
module-slot cochains of the same arity, one per position of the module
input.  The differential, pre-Lie product, bracket and cup product are all
the generic insertion formulas against the multiplication pieces of the
square-zero extension; slot typing by space identity makes the case
analysis automatic.  The explicit per-case formulas serve as test oracles,
not as the implementation.

For the diagonal bimodule the complex retracts onto two copies of the
algebra complex, one carrying a square-zero tag of bidegree (1,0); kappa
realizes the retraction by inserting the unit into the module slot.
"""

from __future__ import annotations

import itertools

from .algebras import AlgebraData, BimoduleData, diagonal_bimodule
from .graded import GradedSpaceError
from .multilinear import (Cochain, CochainFamily, as_family, brace,
                          infinitesimal_compose, fill_brace,
                          generic_differential, family_bracket, family_sq,
                          cochain_units, cochain_coords)
from .hochschild import CochainSlice, d_hoch


def bim_cochain(M: BimoduleData, p: int, q: int, r: int,
                entries) -> Cochain:
    A = M.over.space
    inputs = (A,) * p + (M.space,) + (A,) * q
    return Cochain(M.field, inputs, M.space, r, entries)


def bim_position(c: Cochain, M: BimoduleData) -> int:
    """0-based index of the module slot; raises if not exactly one."""
    hits = [i for i, sp in enumerate(c.inputs) if sp is M.space]
    if len(hits) != 1 or c.output is not M.space:
        raise GradedSpaceError("not a one-module-slot cochain")
    return hits[0]


class RelComplex:
    """Context for the relative complex of (A, M)."""

    def __init__(self, A: AlgebraData, M: BimoduleData):
        if M.over is not A:
            raise GradedSpaceError("bimodule is not over this algebra")
        if A.m1 is not None or M.m1 is not None:
            # a differential mixes the (arity, vertical) bidegrees, which
            # breaks the fixed-arity slices; differential structure is the
            # business of the A-infinity layer
            raise GradedSpaceError("relative complex wants a plain graded"
                                   " algebra and bimodule")
        self.A = A
        self.M = M
        self.field = A.field
        self.pieces = CochainFamily(self.field, [A.m2, M.act_l, M.act_r])

    # -- component classification ---------------------------------------

    def classify(self, c: Cochain):
        """("hc", None) or ("bim", p) for a component cochain."""
        if all(sp is self.A.space for sp in c.inputs) \
                and c.output is self.A.space:
            return ("hc", None)
        return ("bim", bim_position(c, self.M))

    def rel(self, n: int, r: int, hc=None, bim=()) -> "RelCochain":
        return RelCochain(self, n, r, hc, bim)

    def zero_rel(self, n: int, r: int) -> "RelCochain":
        return RelCochain(self, n, r, None, ())

    def from_family(self, fam: CochainFamily, n: int, r: int) -> "RelCochain":
        hc = None
        bim = []
        for c in fam.cochains():
            if c.is_zero():
                continue
            kind, _ = self.classify(c)
            if kind == "hc":
                if c.vdeg != r or len(c.inputs) != n:
                    raise GradedSpaceError("stray algebra component")
                hc = c if hc is None else hc + c
            else:
                if c.vdeg != r or len(c.inputs) != n:
                    raise GradedSpaceError("stray module component")
                bim.append(c)
        return RelCochain(self, n, r, hc, bim)

    # -- operations -------------------------------------------------------

    def d_rel(self, x: "RelCochain") -> "RelCochain":
        fam = generic_differential(self.pieces, x.family())
        return self.from_family(fam, x.n + 1, x.r)

    def d_bim(self, c: Cochain) -> "RelCochain":
        """Differential of a single module-slot cochain, aggregated: the
        two summands live at different module-slot positions."""
        kind, _ = self.classify(c)
        if kind != "bim":
            raise GradedSpaceError("d_bim wants a module-slot cochain")
        fam = generic_differential(self.pieces, c)
        return self.from_family(fam, len(c.inputs) + 1, c.vdeg)

    def pre_lie_rel(self, x: "RelCochain", y: "RelCochain") -> "RelCochain":
        fam = brace(x.family(), y.family())
        return self.from_family(fam, x.n + y.n - 1, x.r + y.r)

    def bracket_rel(self, x: "RelCochain", y: "RelCochain") -> "RelCochain":
        fam = family_bracket(x.family(), y.family())
        return self.from_family(fam, x.n + y.n - 1, x.r + y.r)

    def sq_rel(self, x: "RelCochain") -> "RelCochain":
        fam = family_sq(x.family())
        return self.from_family(fam, 2 * x.n - 1, 2 * x.r)

    def cup_rel(self, x: "RelCochain", y: "RelCochain") -> "RelCochain":
        sgn = self.field.sign_pow(x.n + x.r - 1)
        fam = CochainFamily(self.field)
        for piece in self.pieces.cochains():
            if len(piece.inputs) != 2:
                continue
            for c1 in x.family().cochains():
                for c2 in y.family().cochains():
                    fam._accumulate(fill_brace(piece, [c1, c2]).scale(sgn))
        return self.from_family(fam, x.n + y.n, x.r + y.r)

    def delta_connecting(self, c: Cochain) -> "RelCochain":
        """Connecting map on algebra cochains, aggregated over slots.

        The cup with the module identity from the left, plus the cup from
        the right; once the arity shift between the module subcomplex and
        the ambient complex is tracked, both terms enter with a plus and
        the result is exactly the module part of d_rel of the algebra
        component.
        """
        kind, _ = self.classify(c)
        if kind != "hc":
            raise GradedSpaceError("delta_connecting wants an algebra"
                                   " cochain")
        one = identity_bim(self.M)
        parts = []
        for piece in self.pieces.cochains():
            if len(piece.inputs) != 2:
                continue
            l = fill_brace(piece, [one, c])
            r = fill_brace(piece, [c, one])
            if not l.is_zero():
                parts.append(l)
            if not r.is_zero():
                parts.append(r)
        return self.from_family(CochainFamily(self.field, parts),
                                c.hdeg + 1, c.vdeg)

    def yoneda(self, c1: Cochain, c2: Cochain) -> Cochain:
        """Composition product on module-slot cochains."""
        p1 = bim_position(c1, self.M)
        return infinitesimal_compose(c1, p1 + 1, c2)

    # -- slices -----------------------------------------------------------

    def _bim_units(self, arity: int, r: int):
        out = []
        if arity < 1:
            return out
        A, Msp = self.A.space, self.M.space
        for p in range(arity):
            inputs = (A,) * p + (Msp,) + (A,) * (arity - 1 - p)
            for key, name in cochain_units(inputs, Msp, r):
                out.append(("bim", p, key, name))
        return out

    def _hc_units(self, arity: int, r: int):
        if arity < 0:
            return []
        A = self.A.space
        return [("hc", None, key, name)
                for key, name in cochain_units((A,) * arity, A, r)]

    def _unit_cochain(self, u, arity: int, r: int) -> "RelCochain":
        kind, p, key, name = u
        one = self.field.one()
        if kind == "hc":
            c = Cochain(self.field, (self.A.space,) * arity, self.A.space,
                        r, {key: {name: one}}, _checked=True)
            return self.rel(arity, r, hc=c)
        inputs = (self.A.space,) * p + (self.M.space,) \
            + (self.A.space,) * (arity - 1 - p)
        c = Cochain(self.field, inputs, self.M.space, r,
                    {key: {name: one}}, _checked=True)
        return self.rel(arity, r, bim=[c])

    def hh_rel(self, n: int, r: int) -> "RelSlice":
        return RelSlice(self, n, r, with_hc=True)

    def bimhh(self, n: int, r: int) -> "RelSlice":
        """Cohomology of the module-slot subcomplex at arity n."""
        return RelSlice(self, n, r, with_hc=False)


class RelCochain:
    """One element of the relative complex: arity n, vertical degree r."""

    def __init__(self, ctx: RelComplex, n: int, r: int, hc=None, bim=()):
        self.ctx = ctx
        self.n = n
        self.r = r
        if hc is not None:
            if len(hc.inputs) != n or hc.vdeg != r \
                    or ctx.classify(hc)[0] != "hc":
                raise GradedSpaceError("bad algebra component")
        self.hc = hc
        parts = {}
        for c in bim:
            if c.is_zero():
                continue
            kind, p = ctx.classify(c)
            if kind != "bim" or len(c.inputs) != n or c.vdeg != r:
                raise GradedSpaceError("bad module component")
            parts[p] = parts[p] + c if p in parts else c
        self.bim = {p: c for p, c in parts.items() if not c.is_zero()}

    def family(self) -> CochainFamily:
        parts = []
        if self.hc is not None:
            parts.append(self.hc)
        parts.extend(self.bim.values())
        return CochainFamily(self.ctx.field, parts)

    def bim_part(self, p: int) -> Cochain | None:
        return self.bim.get(p)

    def is_zero(self) -> bool:
        return (self.hc is None or self.hc.is_zero()) and not self.bim

    def __add__(self, other: "RelCochain") -> "RelCochain":
        if other.ctx is not self.ctx or other.n != self.n \
                or other.r != self.r:
            raise GradedSpaceError("relative sum across bidegrees")
        hc = self.hc
        if other.hc is not None:
            hc = other.hc if hc is None else hc + other.hc
        bim = list(self.bim.values()) + list(other.bim.values())
        return RelCochain(self.ctx, self.n, self.r, hc, bim)

    def scale(self, scalar) -> "RelCochain":
        hc = None if self.hc is None else self.hc.scale(scalar)
        return RelCochain(self.ctx, self.n, self.r, hc,
                          [c.scale(scalar) for c in self.bim.values()])

    def __sub__(self, other: "RelCochain") -> "RelCochain":
        f = self.ctx.field
        return self + other.scale(f.neg(f.one()))

    def __eq__(self, other):
        return (isinstance(other, RelCochain) and other.ctx is self.ctx
                and (self - other).is_zero())

    def coords(self) -> dict:
        out = {}
        if self.hc is not None:
            for (key, name), v in cochain_coords(self.hc).items():
                out[("hc", None, key, name)] = v
        for p, c in self.bim.items():
            for (key, name), v in cochain_coords(c).items():
                out[("bim", p, key, name)] = v
        return out

    def __repr__(self):
        return (f"<rel cochain n={self.n} r={self.r}"
                f" hc={self.hc is not None} bim={sorted(self.bim)}>")


class RelSlice:
    """Cohomology of the relative (or module-only) complex at (n, r)."""

    def __init__(self, ctx: RelComplex, n: int, r: int, with_hc: bool):
        self.ctx = ctx
        self.n = n
        self.r = r
        self.with_hc = with_hc

        def units(arity):
            us = []
            if with_hc:
                us.extend(ctx._hc_units(arity, r))
            us.extend(ctx._bim_units(arity, r))
            return us

        def diff(arity):
            def of_unit(u):
                x = ctx._unit_cochain(u, arity, r)
                out = ctx.d_rel(x).coords()
                if not with_hc:
                    out = {k: v for k, v in out.items() if k[0] == "bim"}
                return out
            return of_unit

        self.slice = CochainSlice(ctx.field, units(n - 1), units(n),
                                  diff(n - 1), diff(n))

    @property
    def dim(self) -> int:
        return self.slice.dim

    def _wrap(self, coords) -> RelCochain:
        hc_ent = {}
        bim_ent = {}
        for (kind, p, key, name), v in coords.items():
            if kind == "hc":
                hc_ent.setdefault(tuple(key), {})[name] = v
            else:
                bim_ent.setdefault(p, {}).setdefault(tuple(key), {})[name] = v
        ctx, n, r = self.ctx, self.n, self.r
        hc = None
        if hc_ent:
            hc = Cochain(ctx.field, (ctx.A.space,) * n, ctx.A.space, r,
                         hc_ent, _checked=True)
        bims = []
        for p, ent in bim_ent.items():
            inputs = (ctx.A.space,) * p + (ctx.M.space,) \
                + (ctx.A.space,) * (n - 1 - p)
            bims.append(Cochain(ctx.field, inputs, ctx.M.space, r, ent,
                                _checked=True))
        return RelCochain(ctx, n, r, hc, bims)

    def reps(self):
        return [self._wrap(c) for c in self.slice.rep_coords()]

    def class_coords(self, x: RelCochain):
        return self.slice.class_coords(x.coords())

    def is_cocycle(self, x: RelCochain) -> bool:
        return self.slice.is_cocycle(x.coords())

    def exact_witness(self, x: RelCochain):
        w = self.slice.exact_witness(x.coords())
        if w is None:
            return None
        return self._wrap(w)

    def same_class(self, x: RelCochain, y: RelCochain) -> bool:
        return self.exact_witness(x - y) is not None


def _target_keys(spaces):
    pools = [list(sp.basis()) for sp in spaces]
    return itertools.product(*pools)


def dh(ctx: RelComplex, c: Cochain) -> Cochain:
    """Horizontal differential of a module-slot cochain, by its display.

    Three groups: left action on a new first input, adjacent products of
    the left inputs, absorption of the last left input into the module
    slot.  Signs (-1)^{r|x_1|+r}, (-1)^{i+r}, (-1)^{p+1+r}.
    """
    M, A, f = ctx.M, ctx.A, ctx.field
    p = bim_position(c, M)
    q = len(c.inputs) - 1 - p
    r = c.vdeg
    inputs = (A.space,) * (p + 1) + (M.space,) + (A.space,) * q
    ent = {}
    for key in _target_keys(inputs):
        X = key[:p + 1]
        km = key[p + 1]
        Y = key[p + 2:]
        xv = [A.space.basis_vec(*k) for k in X]
        mv = M.space.basis_vec(*km)
        yv = [A.space.basis_vec(*k) for k in Y]
        out = None

        def push(vec, exp):
            nonlocal out
            t = vec.scale(f.sign_pow(exp))
            out = t if out is None else out + t

        inner = c.evaluate(xv[1:] + [mv] + yv)
        if not inner.is_zero():
            push(M.lmul(xv[0], inner), r * X[0][0] + r)
        for i in range(1, p + 1):
            prod = A.mul(xv[i - 1], xv[i])
            if prod.is_zero():
                continue
            v = c.evaluate(xv[:i - 1] + [prod] + xv[i + 1:] + [mv] + yv)
            if not v.is_zero():
                push(v, i + r)
        xm = M.lmul(xv[p], mv)
        if not xm.is_zero():
            v = c.evaluate(xv[:p] + [xm] + yv)
            if not v.is_zero():
                push(v, p + 1 + r)
        if out is not None and not out.is_zero():
            ent[key] = dict(out.coeffs)
    return Cochain(f, inputs, M.space, r, ent, _checked=True)


def dv(ctx: RelComplex, c: Cochain) -> Cochain:
    """Vertical differential of a module-slot cochain, by its display.

    Three groups: absorption of the first right input into the module
    slot, adjacent products of the right inputs, right action on a new
    last input.  Signs (-1)^{p+1+r}, (-1)^{p+1+j+r}, (-1)^{p+q+r}.
    """
    M, A, f = ctx.M, ctx.A, ctx.field
    p = bim_position(c, M)
    q = len(c.inputs) - 1 - p
    r = c.vdeg
    inputs = (A.space,) * p + (M.space,) + (A.space,) * (q + 1)
    ent = {}
    for key in _target_keys(inputs):
        X = key[:p]
        km = key[p]
        Y = key[p + 1:]
        xv = [A.space.basis_vec(*k) for k in X]
        mv = M.space.basis_vec(*km)
        yv = [A.space.basis_vec(*k) for k in Y]
        out = None

        def push(vec, exp):
            nonlocal out
            t = vec.scale(f.sign_pow(exp))
            out = t if out is None else out + t

        my = M.rmul(mv, yv[0])
        if not my.is_zero():
            v = c.evaluate(xv + [my] + yv[1:])
            if not v.is_zero():
                push(v, p + 1 + r)
        for j in range(1, q + 1):
            prod = A.mul(yv[j - 1], yv[j])
            if prod.is_zero():
                continue
            v = c.evaluate(xv + [mv] + yv[:j - 1] + [prod] + yv[j + 1:])
            if not v.is_zero():
                push(v, p + 1 + j + r)
        v = c.evaluate(xv + [mv] + yv[:q])
        if not v.is_zero():
            push(M.rmul(v, yv[q]), p + q + r)
        if out is not None and not out.is_zero():
            ent[key] = dict(out.coeffs)
    return Cochain(f, inputs, M.space, r, ent, _checked=True)


def identity_bim(M: BimoduleData) -> Cochain:
    one = M.field.one()
    ent = {((d, n),): {n: one} for d, n in M.space.basis()}
    return Cochain(M.field, (M.space,), M.space, 0, ent, _checked=True)


def unit_into_module(M: BimoduleData) -> Cochain:
    """The unit of A, seen inside the diagonal module copy, as a 0-ary
    cochain.  Only meaningful when M is a diagonal copy of A."""
    coeffs = dict(M.over.unit.coeffs)
    for n in coeffs:
        if not M.space.has(0, n):
            raise GradedSpaceError("module does not contain the unit copy")
    return Cochain(M.field, (), M.space, 0, {(): coeffs}, _checked=True)


# --- the tagged two-copy model and kappa ------------------------------------


class EpsCochain:
    """Pair (main, tag) standing for main + tag * eps, eps of bidegree
    (1,0) and square zero; both components are algebra cochains."""

    def __init__(self, A: AlgebraData, main: Cochain | None,
                 tag: Cochain | None):
        self.A = A
        self.main = main
        self.tag = tag

    def is_zero(self):
        return ((self.main is None or self.main.is_zero())
                and (self.tag is None or self.tag.is_zero()))

    def __sub__(self, other: "EpsCochain") -> "EpsCochain":
        def comb(a, b):
            if a is None:
                return None if b is None else -b
            return a if b is None else a - b
        return EpsCochain(self.A, comb(self.main, other.main),
                          comb(self.tag, other.tag))

    def __eq__(self, other):
        return isinstance(other, EpsCochain) and (self - other).is_zero()


def kappa(ctx: RelComplex, x: RelCochain) -> EpsCochain:
    """Retract a relative cochain onto the tagged two-copy model.

    The algebra part passes through; each module-slot component c with p
    algebra inputs on the left contributes its unit insertion, an algebra
    cochain of one lower arity, to the tag.  Requires the diagonal module:
    the module copy of the unit must exist and the module space must be a
    degreewise copy of the algebra.
    """
    one0 = unit_into_module(ctx.M)
    f = ctx.field
    tag = None
    for p, c in sorted(x.bim.items()):
        ins = infinitesimal_compose(c, p + 1, one0)
        # repatriate: inputs and output are all the algebra space now,
        # except the output which still carries the module label
        ent = {k: dict(v) for k, v in ins.entries.items()}
        back = Cochain(f, (ctx.A.space,) * (x.n - 1), ctx.A.space, x.r,
                       ent)
        tag = back if tag is None else tag + back
    return EpsCochain(ctx.A, x.hc, tag)


def kappa_aggregated_oracle(ctx: RelComplex, x: RelCochain) -> Cochain | None:
    """Independent route: sum the unit insertions with explicit signs.

    For the component with p left inputs in an arity-n cochain, inserting
    the unit in slot p+1 carries (-1)^{n-1-p}; mismatch against kappa is a
    bug in one of the two routes.
    """
    f = ctx.field
    n, r = x.n, x.r
    out = None
    unit_names = dict(ctx.M.over.unit.coeffs)
    for p, c in sorted(x.bim.items()):
        ent = {}
        sgn = f.sign_pow(n - 1 - p)
        for key, img in c.entries.items():
            mslot = key[p]
            if mslot[0] != 0 or mslot[1] not in unit_names:
                continue
            w = f.mul(sgn, unit_names[mslot[1]])
            newkey = key[:p] + key[p + 1:]
            acc = ent.setdefault(newkey, {})
            for name, v in img.items():
                acc[name] = f.add(acc.get(name, f.zero()), f.mul(w, v))
        c_out = Cochain(f, (ctx.A.space,) * (n - 1), ctx.A.space, r, ent)
        out = c_out if out is None else out + c_out
    return out


def diagonal_rel_complex(A: AlgebraData) -> RelComplex:
    return RelComplex(A, diagonal_bimodule(A))
