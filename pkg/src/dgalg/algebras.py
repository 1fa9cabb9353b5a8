"""Structure-constant presentations: dg algebras, bimodules, and the
windowed twisted Laurent algebra.

An algebra is a graded space with a binary product cochain, a unit vector,
and an optional unary differential cochain; a bimodule over it carries two
action cochains and its own optional differential.  Everything validates
against the axioms exactly; nothing is assumed from construction.

Windowed materialization of a periodic presentation keeps a finite strip of
powers.  Products falling off the strip are flagged and element-level
multiplication raises on them rather than silently truncating; cochain
level computations on a windowed algebra are approximations whose users are
expected to compare two nested windows before believing anything.
"""

from __future__ import annotations

from .fields import FieldSpec
from .graded import (GradedVectorSpace, Vec, GradedMap, GradedSpaceError,
                     shift_space, dual_space, VERTICAL_SHIFT)
from .multilinear import Cochain, CochainFamily, identity_cochain
from . import linalg


class AlgebraError(ValueError):
    pass


class WindowOverflow(RuntimeError):
    def __init__(self, degree: int):
        super().__init__(f"product falls outside the window, degree {degree}")
        self.degree = degree


class AlgebraData:
    """Graded (dg) algebra by structure constants."""

    def __init__(self, space: GradedVectorSpace, m2: Cochain, unit: Vec,
                 m1: Cochain | None = None, window_overflow=None):
        if m2.inputs != (space, space) or m2.output is not space or m2.vdeg:
            raise AlgebraError("m2 must be a binary degree-0 cochain on the"
                               " algebra space")
        if m1 is not None and (m1.inputs != (space,) or m1.output is not space
                               or m1.vdeg != 1):
            raise AlgebraError("m1 must be unary of vertical degree 1")
        if unit.space is not space or unit.deg != 0:
            raise AlgebraError("unit must be a degree-0 vector of the space")
        self.field = space.field
        self.space = space
        self.m2 = m2
        self.m1 = m1
        self.unit = unit
        self.window_overflow = dict(window_overflow or {})

    def mul(self, x: Vec, y: Vec) -> Vec:
        if self.window_overflow:
            for kx in x.coeffs:
                for ky in y.coeffs:
                    bad = self.window_overflow.get(((x.deg, kx), (y.deg, ky)))
                    if bad is not None:
                        raise WindowOverflow(bad)
        return self.m2.evaluate([x, y])

    def d(self, x: Vec) -> Vec:
        if self.m1 is None:
            return Vec(self.space, x.deg + 1, {})
        return self.m1.evaluate([x])

    def multiplication(self) -> CochainFamily:
        parts = [self.m2]
        if self.m1 is not None:
            parts.append(self.m1)
        return CochainFamily(self.field, parts)

    def basis_vec(self, deg, name) -> Vec:
        return self.space.basis_vec(deg, name)

    def _flagged(self, kx, ky) -> bool:
        return (kx, ky) in self.window_overflow

    def validate(self):
        """Unit, associativity, d squared, Leibniz; exact, all triples.

        On a windowed algebra, triples whose partial products are flagged
        are skipped: their failure is a window artifact, not an axiom
        violation, and element-level mul raises on them anyway.
        """
        sp = self.space
        for b in sp.basis():
            v = sp.basis_vec(*b)
            if self.mul(self.unit, v) != v or self.mul(v, self.unit) != v:
                raise AlgebraError(f"unit fails on {b}")
            if not self.d(self.d(v)).is_zero():
                raise AlgebraError(f"d^2 != 0 on {b}")
        if self.m1 is not None and not self.d(self.unit).is_zero():
            raise AlgebraError("unit is not a cocycle")
        basis = list(sp.basis())
        for kx in basis:
            x = sp.basis_vec(*kx)
            for ky in basis:
                y = sp.basis_vec(*ky)
                if not self._flagged(kx, ky):
                    xy = self.mul(x, y)
                    lhs = self.d(xy)
                    rhs = self.mul(self.d(x), y) + self.mul(
                        x, self.d(y)).scale(self.field.sign_pow(kx[0]))
                    if lhs != rhs:
                        raise AlgebraError(f"Leibniz fails on {kx},{ky}")
                for kz in basis:
                    z = sp.basis_vec(*kz)
                    if (self._flagged(kx, ky) or self._flagged(ky, kz)):
                        continue
                    xy = self.mul(x, y)
                    yz = self.mul(y, z)
                    try:
                        left = self.mul(xy, z)
                        right = self.mul(x, yz)
                    except WindowOverflow:
                        continue
                    if left != right:
                        raise AlgebraError(
                            f"associativity fails on {kx},{ky},{kz}")


def algebra_from_table(field, degrees: dict, products: dict, unit_name: str,
                       differential: dict | None = None,
                       label=None) -> AlgebraData:
    """Convenience constructor from name-level tables.

    degrees: name -> degree; products: (name, name) -> {name: coeff} with
    the unit row/column implied; differential: name -> {name: coeff}.
    """
    comps = {}
    for name, deg in degrees.items():
        comps.setdefault(deg, []).append(name)
    space = GradedVectorSpace(field, comps, label)
    ent = {}
    one = field.one()
    for name, deg in degrees.items():
        ent[((0, unit_name), (deg, name))] = {name: one}
        if name != unit_name:
            ent[((deg, name), (0, unit_name))] = {name: one}
    for (a, b), img in products.items():
        if unit_name in (a, b):
            continue
        key = ((degrees[a], a), (degrees[b], b))
        ent[key] = {n: field.of(c) for n, c in img.items()}
    m2 = Cochain(field, (space, space), space, 0, ent)
    m1 = None
    if differential:
        d_ent = {}
        for name, img in differential.items():
            d_ent[((degrees[name], name),)] = {n: field.of(c)
                                               for n, c in img.items()}
        m1 = Cochain(field, (space,), space, 1, d_ent)
    unit = space.basis_vec(0, unit_name)
    return AlgebraData(space, m2, unit, m1)


class BimoduleData:
    """Graded (dg) bimodule by structure constants."""

    def __init__(self, over: AlgebraData, space: GradedVectorSpace,
                 act_l: Cochain, act_r: Cochain, m1: Cochain | None = None):
        A = over.space
        if act_l.inputs != (A, space) or act_l.output is not space \
                or act_l.vdeg:
            raise AlgebraError("act_l must map (A, M) -> M in degree 0")
        if act_r.inputs != (space, A) or act_r.output is not space \
                or act_r.vdeg:
            raise AlgebraError("act_r must map (M, A) -> M in degree 0")
        if m1 is not None and (m1.inputs != (space,)
                               or m1.output is not space or m1.vdeg != 1):
            raise AlgebraError("bimodule m1 must be unary of degree 1")
        self.over = over
        self.field = over.field
        self.space = space
        self.act_l = act_l
        self.act_r = act_r
        self.m1 = m1

    def lmul(self, a: Vec, m: Vec) -> Vec:
        return self.act_l.evaluate([a, m])

    def rmul(self, m: Vec, a: Vec) -> Vec:
        return self.act_r.evaluate([m, a])

    def d(self, m: Vec) -> Vec:
        if self.m1 is None:
            return Vec(self.space, m.deg + 1, {})
        return self.m1.evaluate([m])

    def validate(self):
        A = self.over
        f = self.field
        mbasis = list(self.space.basis())
        abasis = list(A.space.basis())
        for km in mbasis:
            m = self.space.basis_vec(*km)
            if self.lmul(A.unit, m) != m or self.rmul(m, A.unit) != m:
                raise AlgebraError(f"unit action fails on {km}")
            if not self.d(self.d(m)).is_zero():
                raise AlgebraError(f"d^2 != 0 on {km}")
        for ka in abasis:
            a = A.space.basis_vec(*ka)
            for kb in abasis:
                b = A.space.basis_vec(*kb)
                for km in mbasis:
                    m = self.space.basis_vec(*km)
                    if self.lmul(A.mul(a, b), m) != self.lmul(a, self.lmul(b, m)):
                        raise AlgebraError(f"(ab)m fails on {ka},{kb},{km}")
                    if self.rmul(self.rmul(m, a), b) != self.rmul(m, A.mul(a, b)):
                        raise AlgebraError(f"m(ab) fails on {km},{ka},{kb}")
                    if self.rmul(self.lmul(a, m), b) != self.lmul(a, self.rmul(m, b)):
                        raise AlgebraError(f"(am)b fails on {ka},{km},{kb}")
        for ka in abasis:
            a = A.space.basis_vec(*ka)
            for km in mbasis:
                m = self.space.basis_vec(*km)
                lhs = self.d(self.lmul(a, m))
                rhs = self.lmul(A.d(a), m) + self.lmul(
                    a, self.d(m)).scale(f.sign_pow(ka[0]))
                if lhs != rhs:
                    raise AlgebraError(f"left Leibniz fails on {ka},{km}")
                lhs = self.d(self.rmul(m, a))
                rhs = self.rmul(self.d(m), a) + self.rmul(
                    m, A.d(a)).scale(f.sign_pow(km[0]))
                if lhs != rhs:
                    raise AlgebraError(f"right Leibniz fails on {km},{ka}")


def diagonal_bimodule(A: AlgebraData) -> BimoduleData:
    """The algebra over itself, on a fresh copy of the space.

    The copy matters: slot typing distinguishes module inputs from algebra
    inputs by object identity, so the diagonal bimodule may not literally
    reuse the algebra space.
    """
    Msp = GradedVectorSpace(A.field, dict(A.space.components),
                            A.space.label + "#")
    retype = lambda ins, out: Cochain(
        A.field, ins, out, 0,
        {k: dict(v) for k, v in A.m2.entries.items()}, _checked=True)
    act_l = retype((A.space, Msp), Msp)
    act_r = retype((Msp, A.space), Msp)
    m1 = None
    if A.m1 is not None:
        m1 = Cochain(A.field, (Msp,), Msp, 1,
                     {k: dict(v) for k, v in A.m1.entries.items()},
                     _checked=True)
    return BimoduleData(A, Msp, act_l, act_r, m1)


# --- square-zero extension --------------------------------------------------

A_TAG = "A."
M_TAG = "M."


def tag_split(name: str):
    if name.startswith(A_TAG):
        return ("A", name[len(A_TAG):])
    if name.startswith(M_TAG):
        return ("M", name[len(M_TAG):])
    raise AlgebraError(f"untagged name {name!r}")


class SquareZeroData:
    """Trivial extension algebra on A + M with M squaring to zero."""

    def __init__(self, algebra: AlgebraData, base: AlgebraData,
                 bimodule: BimoduleData, inj_a, inj_m, proj_a, proj_m):
        self.algebra = algebra
        self.base = base
        self.bimodule = bimodule
        self.inj_a = inj_a
        self.inj_m = inj_m
        self.proj_a = proj_a
        self.proj_m = proj_m


def square_zero(A: AlgebraData, M: BimoduleData) -> SquareZeroData:
    if M.over is not A:
        raise AlgebraError("bimodule is not over the given algebra")
    f = A.field
    comps = {}
    for d, names in A.space.components.items():
        comps.setdefault(d, []).extend(A_TAG + n for n in names)
    for d, names in M.space.components.items():
        comps.setdefault(d, []).extend(M_TAG + n for n in names)
    total = GradedVectorSpace(f, comps,
                              f"({A.space.label}+{M.space.label})")

    def a_key(k):
        return (k[0], A_TAG + k[1])

    def m_key(k):
        return (k[0], M_TAG + k[1])

    ent = {}
    for key, img in A.m2.entries.items():
        ent[(a_key(key[0]), a_key(key[1]))] = {A_TAG + n: c
                                               for n, c in img.items()}
    for key, img in M.act_l.entries.items():
        ent[(a_key(key[0]), m_key(key[1]))] = {M_TAG + n: c
                                               for n, c in img.items()}
    for key, img in M.act_r.entries.items():
        ent[(m_key(key[0]), a_key(key[1]))] = {M_TAG + n: c
                                               for n, c in img.items()}
    m2 = Cochain(f, (total, total), total, 0, ent)

    d_ent = {}
    if A.m1 is not None:
        for key, img in A.m1.entries.items():
            d_ent[(a_key(key[0]),)] = {A_TAG + n: c for n, c in img.items()}
    if M.m1 is not None:
        for key, img in M.m1.entries.items():
            d_ent[(m_key(key[0]),)] = {M_TAG + n: c for n, c in img.items()}
    m1 = Cochain(f, (total,), total, 1, d_ent) if d_ent else None

    unit = Vec(total, 0, {A_TAG + n: c for n, c in A.unit.coeffs.items()})
    alg = AlgebraData(total, m2, unit, m1)

    inj_a = GradedMap(A.space, total, 0,
                      {d: {n: {A_TAG + n: f.one()} for n in names}
                       for d, names in A.space.components.items()})
    inj_m = GradedMap(M.space, total, 0,
                      {d: {n: {M_TAG + n: f.one()} for n in names}
                       for d, names in M.space.components.items()})
    proj_a = GradedMap(total, A.space, 0,
                       {d: {A_TAG + n: {n: f.one()} for n in names}
                        for d, names in A.space.components.items()})
    proj_m = GradedMap(total, M.space, 0,
                       {d: {M_TAG + n: {n: f.one()} for n in names}
                        for d, names in M.space.components.items()})
    return SquareZeroData(alg, A, M, inj_a, inj_m, proj_a, proj_m)


# --- shifts and duals of bimodules -----------------------------------------


def bimodule_shift(M: BimoduleData, n: int) -> BimoduleData:
    """Vertical shift: same names, degrees moved down by n.

    Left action and differential pick up the usual conjugation signs; the
    right action is sign-free.
    """
    f = M.field
    sp = shift_space(M.space, n, VERTICAL_SHIFT)
    al = {}
    for ((da, na), (dm, nm)), img in M.act_l.entries.items():
        sgn = f.sign_pow(n * da)
        al[((da, na), (dm - n, nm))] = {k: f.mul(v, sgn)
                                        for k, v in img.items()}
    ar = {}
    for ((dm, nm), (da, na)), img in M.act_r.entries.items():
        ar[((dm - n, nm), (da, na))] = dict(img)
    act_l = Cochain(f, (M.over.space, sp), sp, 0, al, _checked=True)
    act_r = Cochain(f, (sp, M.over.space), sp, 0, ar, _checked=True)
    m1 = None
    if M.m1 is not None:
        sgn = f.sign_pow(n)
        ent = {((dm - n, nm),): {k: f.mul(v, sgn) for k, v in img.items()}
               for ((dm, nm),), img in M.m1.entries.items()}
        m1 = Cochain(f, (sp,), sp, 1, ent, _checked=True)
    return BimoduleData(M.over, sp, act_l, act_r, m1)


def bimodule_dual(M: BimoduleData) -> BimoduleData:
    """Linear dual with the transposed actions.

    (a f)(m) = (-1)^{|a|(|f|+|m|)} f(m a),  (f a)(m) = f(a m),
    (d f)(m) = -(-1)^{|f|} f(d m).
    """
    f = M.field
    sp = dual_space(M.space)
    A = M.over.space
    al = {}
    for ((dm, nm), (da, na)), img in M.act_r.entries.items():
        # f = dual of an output basis vector w in degree dm+da
        for w, c in img.items():
            df = -(dm + da)
            sgn = f.sign_pow(da * (df + dm))
            key = ((da, na), (df, w))
            acc = al.setdefault(key, {})
            acc[nm] = f.add(acc.get(nm, f.zero()), f.mul(sgn, c))
    ar = {}
    for ((da, na), (dm, nm)), img in M.act_l.entries.items():
        for w, c in img.items():
            df = -(dm + da)
            key = ((df, w), (da, na))
            acc = ar.setdefault(key, {})
            acc[nm] = f.add(acc.get(nm, f.zero()), c)
    act_l = Cochain(f, (A, sp), sp, 0, al)
    act_r = Cochain(f, (sp, A), sp, 0, ar)
    m1 = None
    if M.m1 is not None:
        ent = {}
        for ((dm, nm),), img in M.m1.entries.items():
            for w, c in img.items():
                df = -(dm + 1)
                sgn = f.sign_pow(df + 1)
                acc = ent.setdefault(((df, w),), {})
                acc[nm] = f.add(acc.get(nm, f.zero()), f.mul(sgn, c))
        m1 = Cochain(f, (sp,), sp, 1, ent)
    return BimoduleData(M.over, sp, act_l, act_r, m1)


# --- periodic presentations -------------------------------------------------


def invert_graded_map(m: GradedMap) -> GradedMap:
    if m.deg != 0 or m.src is not m.tgt:
        raise AlgebraError("only degree-0 endomorphisms are inverted here")
    f = m.src.field
    blocks = {}
    for deg in m.src.degrees():
        names = list(m.src.basis_of(deg))
        cols = {n: dict(m.blocks.get(deg, {}).get(n, {})) for n in names}
        for n in names:
            sol = linalg.solve(f, cols, names, {n: f.one()})
            if sol is None:
                raise AlgebraError(f"map not invertible in degree {deg}")
            blocks.setdefault(deg, {})[n] = sol
    return GradedMap(m.src, m.tgt, 0, blocks)


class PeriodicPresentation:
    """Degree-0 algebra with an automorphism, a period d, and a window."""

    def __init__(self, lam: AlgebraData, sigma: GradedMap, d: int, window):
        if lam.space.degrees() not in ([0], []):
            raise AlgebraError("base algebra must sit in degree 0")
        if lam.m1 is not None:
            raise AlgebraError("base algebra must have no differential")
        if d <= 0:
            raise AlgebraError("period must be positive")
        lo, hi = window
        if lo > 0 or hi < 0:
            raise AlgebraError("window must contain 0")
        if lo % d or hi % d:
            raise AlgebraError("window ends must be multiples of d")
        if sigma.src is not lam.space or sigma.tgt is not lam.space \
                or sigma.deg != 0:
            raise AlgebraError("sigma must be a degree-0 endomorphism")
        self.lam = lam
        self.sigma = sigma
        self.d = d
        self.window = (lo, hi)
        self._check_sigma()

    def _check_sigma(self):
        lam, s = self.lam, self.sigma
        if s.apply(lam.unit) != lam.unit:
            raise AlgebraError("sigma does not fix the unit")
        for ka in lam.space.basis():
            a = lam.space.basis_vec(*ka)
            for kb in lam.space.basis():
                b = lam.space.basis_vec(*kb)
                if s.apply(lam.mul(a, b)) != lam.mul(s.apply(a), s.apply(b)):
                    raise AlgebraError("sigma is not multiplicative")
        invert_graded_map(s)   # raises if singular


def materialize_twisted_laurent(P: PeriodicPresentation) -> AlgebraData:
    """Finite strip of the twisted Laurent algebra.

    Basis name "x@k" stands for the k-th twist of x and sits in degree d*k;
    the product of x@k and y@l is (sigma^l x * y)@(k+l).  Pairs landing
    outside the strip are flagged; element-level multiplication raises a
    window-overflow error on them.
    """
    f = P.lam.field
    lo, hi = P.window[0] // P.d, P.window[1] // P.d
    names0 = list(P.lam.space.basis_of(0))
    comps = {P.d * k: [f"{n}@{k}" for n in names0]
             for k in range(lo, hi + 1)}
    space = GradedVectorSpace(f, comps, f"L[{P.window[0]},{P.window[1]}]")

    sig_pow = {0: GradedMap.identity(P.lam.space)}
    inv = invert_graded_map(P.sigma)
    for l in range(1, max(abs(lo), abs(hi)) + 1):
        sig_pow[l] = P.sigma.compose(sig_pow[l - 1])
        sig_pow[-l] = inv.compose(sig_pow[-(l - 1)])

    ent = {}
    overflow = {}
    for k in range(lo, hi + 1):
        for l in range(lo, hi + 1):
            for nx in names0:
                x = P.lam.space.basis_vec(0, nx)
                tw = sig_pow[l].apply(x)
                for ny in names0:
                    y = P.lam.space.basis_vec(0, ny)
                    prod = P.lam.mul(tw, y)
                    key = ((P.d * k, f"{nx}@{k}"), (P.d * l, f"{ny}@{l}"))
                    if prod.is_zero():
                        continue
                    if lo <= k + l <= hi:
                        ent[key] = {f"{n}@{k + l}": c
                                    for n, c in prod.coeffs.items()}
                    else:
                        overflow[key] = P.d * (k + l)
    m2 = Cochain(f, (space, space), space, 0, ent)
    unit = Vec(space, 0, {f"{n}@0": c
                          for n, c in P.lam.unit.coeffs.items()})
    return AlgebraData(space, m2, unit, None, window_overflow=overflow)


# --- strong deformation retractions ----------------------------------------


class SDRData:
    """Inclusion, projection, homotopy presenting cohomology as a retract."""

    def __init__(self, H, include: GradedMap, project: GradedMap,
                 homotopy: GradedMap):
        self.H = H
        self.include = include
        self.project = project
        self.homotopy = homotopy


def _differential_map(space, m1: Cochain | None) -> GradedMap:
    if m1 is None:
        return GradedMap.zero(space, space, 1)
    return m1.to_graded_map()


def cohomology_with_sdr(space: GradedVectorSpace, m1: Cochain | None,
                        h_label=None) -> SDRData:
    """Split a finite complex: representatives, projection, homotopy.

    All choices are deterministic in the stored basis order.  The five
    retract identities are verified before returning.
    """
    f = space.field
    d = _differential_map(space, m1)

    # per degree: C = complement of the kernel (preimage coordinates),
    # B = boundary space with chosen preimages, reps = surviving cycles
    c_names = {}        # deg -> ordered basis names spanning C
    b_from = {}         # deg -> list of (boundary vec dict, preimage name)
    for deg in space.degrees():
        ech = linalg.Echelon(f, sorted(space.basis_of(deg + 1)))
        for n in space.basis_of(deg):
            img = d.apply_basis(deg, n)
            pk, _ = ech.insert(dict(img.coeffs))
            if pk is not None:
                c_names.setdefault(deg, []).append(n)
                b_from.setdefault(deg + 1, []).append(
                    (dict(img.coeffs), n))

    h_comps = {}
    rep_vecs = {}
    for deg in space.degrees():
        names = list(space.basis_of(deg))
        ech = linalg.Echelon(f, names)
        for bvec, _ in b_from.get(deg, []):
            ech.insert(bvec)
        cols = {n: dict(d.apply_basis(deg, n).coeffs) for n in names}
        for z in linalg.kernel_basis(f, cols, names):
            pk, _ = ech.insert(z)
            if pk is not None:
                rep_name = f"[{pk}]"
                h_comps.setdefault(deg, []).append(rep_name)
                rep_vecs[(deg, rep_name)] = z

    H = GradedVectorSpace(f, h_comps,
                          h_label or ("H(" + space.label + ")"))
    inc_blocks = {}
    for (deg, rn), z in rep_vecs.items():
        inc_blocks.setdefault(deg, {})[rn] = dict(z)
    include = GradedMap(H, space, 0, inc_blocks)

    # express every basis vector in the frame (boundaries, reps, C) and
    # read off projection and homotopy
    proj_blocks = {}
    hom_blocks = {}
    for deg in space.degrees():
        frame = []        # (kind, payload, vec)
        for bvec, pre in b_from.get(deg, []):
            frame.append(("b", pre, bvec))
        for rn in h_comps.get(deg, ()):
            frame.append(("h", rn, rep_vecs[(deg, rn)]))
        for cn in c_names.get(deg, ()):
            frame.append(("c", cn, {cn: f.one()}))
        cols = {idx: vec for idx, (_, _, vec) in enumerate(frame)}
        order = list(range(len(frame)))
        for n in space.basis_of(deg):
            sol = linalg.solve(f, cols, order, {n: f.one()})
            if sol is None:
                raise AlgebraError("frame failed to span; not a complex?")
            pcol = {}
            hcol = {}
            for idx, c in sol.items():
                kind, payload, _ = frame[idx]
                if kind == "h":
                    pcol[payload] = c
                elif kind == "b":
                    hcol[payload] = c
            if pcol:
                proj_blocks.setdefault(deg, {})[n] = pcol
            if hcol:
                hom_blocks.setdefault(deg, {})[n] = hcol
    project = GradedMap(space, H, 0, proj_blocks)
    homotopy = GradedMap(space, space, -1, hom_blocks)

    sdr = SDRData(H, include, project, homotopy)
    verify_sdr(space, d, sdr)
    return sdr


def verify_sdr(space, d: GradedMap, sdr: SDRData):
    i, p, h = sdr.include, sdr.project, sdr.homotopy
    if not p.compose(i) == GradedMap.identity(sdr.H):
        raise AlgebraError("projection of inclusion is not the identity")
    lhs = d.compose(h) + h.compose(d)
    rhs = GradedMap.identity(space) - i.compose(p)
    if not lhs == rhs:
        raise AlgebraError("homotopy does not contract the complement")
    if not p.compose(h).is_zero():
        raise AlgebraError("p h != 0")
    if not h.compose(i).is_zero():
        raise AlgebraError("h i != 0")
    if not h.compose(h).is_zero():
        raise AlgebraError("h^2 != 0")
    if not d.compose(i).is_zero():
        raise AlgebraError("inclusion image is not closed")
    if not p.compose(d).is_zero():
        raise AlgebraError("projection does not kill boundaries")
