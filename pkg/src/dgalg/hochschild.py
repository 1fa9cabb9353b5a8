"""Hochschild cochains of an algebra: differential, bracket, cup, slices.

Cochains here are plain multilinear cochains whose inputs and output are
the algebra space; all operations reduce to the insertion calculus.  The
cohomology of one bidegree is exposed as a slice object with deterministic
representatives, class coordinates and exactness witnesses.
"""

from __future__ import annotations

from .algebras import AlgebraData
from .graded import GradedSpaceError
from .multilinear import (Cochain, CochainFamily, as_family, brace,
                          infinitesimal_compose, mult_brace,
                          generic_differential, family_bracket, family_sq,
                          cochain_units, cochain_coords)
from . import linalg

pre_lie = brace
bracket = family_bracket
sq = family_sq


def hc_cochain(A: AlgebraData, p: int, r: int, entries) -> Cochain:
    return Cochain(A.field, (A.space,) * p, A.space, r, entries)


def d_hoch(A: AlgebraData, c) -> CochainFamily:
    """Hochschild differential against the full multiplication of A."""
    return generic_differential(A.multiplication(), c)


def cup(A: AlgebraData, c1: Cochain, c2: Cochain) -> Cochain:
    """Cup product on Hochschild cochains of A."""
    sgn = A.field.sign_pow(c1.sdeg)
    return mult_brace(A.m2, c1, c2).scale(sgn)


def brace2(c: Cochain, a: Cochain, b: Cochain) -> CochainFamily:
    """Two-argument brace: all order-preserving disjoint double insertions.

    Consistent with fill_brace on binary c; this is the homotopy making the
    bracket a derivation of the cup product up to boundary.
    """
    out = CochainFamily(c.field)
    p = len(c.inputs)
    ha = len(a.inputs)
    for i in range(1, p + 1):
        ca = infinitesimal_compose(c, i, a)
        for j in range(i + 1, p + 1):
            out._accumulate(infinitesimal_compose(ca, j + ha - 1, b))
    return out


class CharacteristicObstruction(Exception):
    """A scaled degree map has an eigenvalue killed by the characteristic."""


def euler_derivation(A: AlgebraData, d: int) -> Cochain:
    """The scaled degree map x -> (|x|/d) x as a (1,0)-cochain.

    Refuses when some basis degree is not divisible by d, and refuses when
    a nonzero eigenvalue |x|/d reduces to zero in positive characteristic:
    in that case the derivation silently degenerates and any argument that
    leans on its eigenvalues is unsound.
    """
    from fractions import Fraction
    char = A.field.char
    ent = {}
    for deg, name in A.space.basis():
        if deg % d != 0:
            raise CharacteristicObstruction(
                "basis degree %d is not a multiple of %d" % (deg, d))
        k = deg // d
        if char and k % char == 0 and k != 0:
            raise CharacteristicObstruction(
                "eigenvalue %d vanishes in characteristic %d" % (k, char))
        coeff = A.field.of(Fraction(deg, d))
        if coeff:
            ent[((deg, name),)] = {name: coeff}
    return Cochain(A.field, (A.space,), A.space, 0, ent, _checked=True)


def transport_hc(iso, c: Cochain) -> Cochain:
    """Conjugate a cochain by a degree-0 isomorphism of algebra spaces."""
    import itertools
    if iso.deg != 0:
        raise GradedSpaceError("transport needs a degree-0 isomorphism")
    inv = invert_graded_map_pair(iso)
    src, tgt = iso.src, iso.tgt
    if any(sp is not src for sp in c.inputs) or c.output is not src:
        raise GradedSpaceError("cochain does not live over the source")
    p = len(c.inputs)
    ent = {}
    for key in itertools.product(list(tgt.basis()), repeat=p):
        args = [inv.apply_basis(d, n) for d, n in key]
        val = iso.apply(c.evaluate(args))
        if val.coeffs:
            ent[key] = dict(val.coeffs)
    return Cochain(c.field, (tgt,) * p, tgt, c.vdeg, ent, _checked=True)


def invert_graded_map_pair(m):
    """Inverse of a degree-0 isomorphism between two different spaces."""
    from .graded import GradedMap
    f = m.src.field
    blocks = {}
    for deg in m.tgt.degrees():
        tnames = list(m.tgt.basis_of(deg))
        snames = list(m.src.basis_of(deg))
        cols = {n: dict(m.blocks.get(deg, {}).get(n, {})) for n in snames}
        for n in tnames:
            sol = linalg.solve(f, cols, snames, {n: f.one()})
            if sol is None:
                raise GradedSpaceError(f"not invertible in degree {deg}")
            blocks.setdefault(deg, {})[n] = sol
    return GradedMap(m.tgt, m.src, 0, blocks)


class CochainSlice:
    """Cohomology of one bidegree of a cochain complex of cochains.

    Generic over the differential: callers provide the units of the three
    relevant spots and a function computing the differential of a unit
    cochain as coordinates.  Representatives come back as coordinate dicts;
    callers wrap them into their own cochain containers.
    """

    def __init__(self, field, units_in, units_mid, diff_in, diff_mid):
        self.field = field
        self.units_in = list(units_in)
        self.units_mid = list(units_mid)
        d_in_cols = {u: diff_in(u) for u in self.units_in}
        d_out_cols = {u: diff_mid(u) for u in self.units_mid}
        self._slice = linalg.SliceCohomology(
            field, d_in_cols, self.units_in, d_out_cols, self.units_mid)

    @property
    def dim(self) -> int:
        return self._slice.dim

    def rep_coords(self):
        return [dict(r) for r in self._slice.reps]

    def class_coords(self, coords: dict):
        return self._slice.class_coords(coords)

    def is_cocycle(self, coords: dict) -> bool:
        return self._slice.is_cycle(coords)

    def exact_witness(self, coords: dict):
        return self._slice.is_exact(coords)

    def boundaries_are_cycles(self) -> bool:
        ech = linalg.Echelon(self.field, self._slice.mid_order)
        for z in self._slice.cycle_basis:
            ech.insert(z)
        before = ech.rank()
        for u in self.units_in:
            ech.insert(self._slice.d_in_cols.get(u, {}))
        return ech.rank() == before


class HochschildSlice:
    """Hochschild cohomology of A at one bidegree (p, r)."""

    def __init__(self, A: AlgebraData, p: int, r: int):
        if A.m1 is not None:
            raise GradedSpaceError("bigraded slices need an algebra without"
                                   " differential")
        if p < 0:
            raise GradedSpaceError("negative arity")
        self.A = A
        self.p = p
        self.r = r

        def units(arity):
            if arity < 0:
                return []
            return list(cochain_units((A.space,) * arity, A.space, r))

        def diff(arity):
            def of_unit(u):
                key, name = u
                c = Cochain(A.field, (A.space,) * arity, A.space, r,
                            {key: {name: A.field.one()}}, _checked=True)
                out = d_hoch(A, c)
                cs = out.cochains()
                if not cs:
                    return {}
                return cochain_coords(out.single())
            return of_unit

        self.slice = CochainSlice(A.field, units(p - 1), units(p),
                                  diff(p - 1), diff(p))

    @property
    def dim(self) -> int:
        return self.slice.dim

    def _wrap(self, coords) -> Cochain:
        ent = {}
        for (key, name), v in coords.items():
            ent.setdefault(tuple(key), {})[name] = v
        return Cochain(self.A.field, (self.A.space,) * self.p, self.A.space,
                       self.r, ent, _checked=True)

    def reps(self):
        return [self._wrap(r) for r in self.slice.rep_coords()]

    def class_coords(self, c: Cochain):
        return self.slice.class_coords(cochain_coords(c))

    def is_cocycle(self, c: Cochain) -> bool:
        return self.slice.is_cocycle(cochain_coords(c))

    def exact_witness(self, c: Cochain):
        w = self.slice.exact_witness(cochain_coords(c))
        if w is None:
            return None
        ent = {}
        for (key, name), v in w.items():
            ent.setdefault(tuple(key), {})[name] = v
        return Cochain(self.A.field, (self.A.space,) * (self.p - 1),
                       self.A.space, self.r, ent, _checked=True)

    def same_class(self, c1: Cochain, c2: Cochain) -> bool:
        return self.exact_witness(c1 - c2) is not None


def hh(A: AlgebraData, p: int, r: int) -> HochschildSlice:
    return HochschildSlice(A, p, r)
