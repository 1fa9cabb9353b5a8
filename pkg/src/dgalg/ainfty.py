"""Homotopy-associative structures as finite truncations.

A structure is a dictionary of operation cochains up to a recorded arity
bound; the structure equation, the bimodule equation and the morphism
equation are all checked as brace residuals, one arity at a time, and the
reports carry the failing residual cochains instead of raising.  Bimodules
keep their module space as a distinct object from the algebra space so
that slot typing of insertions sorts the mixed terms automatically; a
diagonal copy constructor is provided.  The square-zero bridge turns a
bimodule into an algebra on a tagged sum and back, shift and dual move
structures componentwise through the entrywise transports, restriction
pulls a bimodule back along a morphism, and unit insertions of the higher
operations are removed by solving for a gauge arity by arity.
"""

from __future__ import annotations

import itertools

from .algebras import (AlgebraData, BimoduleData, AlgebraError,
                       A_TAG, M_TAG, tag_split)
from .graded import (GradedVectorSpace, Vec, GradedMap, GradedSpaceError,
                     shift_space, dual_space, VERTICAL_SHIFT)
from .multilinear import (Cochain, CochainFamily, as_family, brace,
                          fill_brace, identity_cochain, cochain_units)
from .transport import psi_shift, theta_dual, phi_transport
from .hochschild import transport_hc
from . import linalg


def compositions(n: int, r: int):
    """Ordered tuples of r positive integers summing to n."""
    for cuts in itertools.combinations(range(1, n), r - 1):
        prev, parts = 0, []
        for c in cuts + (n,):
            parts.append(c - prev)
            prev = c
        yield tuple(parts)


def _sparse_ok(space: GradedVectorSpace, d: int) -> bool:
    return all(deg % d == 0 for deg in space.degrees())


def _collapse(fam, inputs, output, vdeg, field) -> Cochain:
    if isinstance(fam, Cochain):
        return fam
    out = Cochain.zero_of(field, inputs, output, vdeg)
    for c in fam.cochains():
        out = out + c
    return out


class CheckReport:
    """Outcome of a structure, bimodule or morphism check.

    residuals maps the arity of a failing equation to the leftover cochain
    family; ok means every checked arity vanished.  The truncation bound
    the check ran to is recorded, claims beyond it are not made.
    """

    def __init__(self, kind: str, trunc: int, residuals: dict,
                 messages=None):
        self.kind = kind
        self.trunc = trunc
        self.residuals = residuals
        self.ok = not residuals
        self.messages = list(messages or [])

    def failing(self):
        return sorted(self.residuals)

    def __repr__(self):
        state = "ok" if self.ok else f"fails at {self.failing()}"
        return f"<{self.kind} check to arity {self.trunc}: {state}>"


# --- structures --------------------------------------------------------------


class AInftyStructure:
    """Operations n -> m_n of vertical degree 2-n on one graded space.

    Arities run from 1 to the truncation bound; missing arities are zero.
    A declared sparsity step d restricts the space to degrees in d*Z and
    the nonzero operations to arities in 2+d*Z (arity one only for d=1).
    """

    def __init__(self, space: GradedVectorSpace, ops: dict, trunc: int,
                 unit: Vec | None = None, d: int | None = None):
        self.space = space
        self.field = space.field
        self.trunc = trunc
        self.unit = unit
        self.d = d
        if d is not None and not _sparse_ok(space, d):
            raise AlgebraError(f"space degrees are not multiples of {d}")
        if unit is not None and (unit.space is not space or unit.deg != 0):
            raise AlgebraError("unit must be a degree-0 vector of the space")
        self.ops = {}
        for n, c in ops.items():
            if c is None or c.is_zero():
                continue
            if not 1 <= n <= trunc:
                raise AlgebraError(f"operation arity {n} outside 1..{trunc}")
            if (len(c.inputs) != n or c.output is not space
                    or any(sp is not space for sp in c.inputs)):
                raise GradedSpaceError(f"operation {n} has the wrong shape")
            if c.vdeg != 2 - n:
                raise GradedSpaceError(f"operation {n} has vertical degree "
                                       f"{c.vdeg}, wants {2 - n}")
            if d is not None and (n - 2) % d != 0:
                raise AlgebraError(f"nonzero operation at arity {n} breaks "
                                   f"{d}-step sparsity")
            self.ops[n] = c

    def op(self, n: int) -> Cochain:
        c = self.ops.get(n)
        if c is not None:
            return c
        return Cochain.zero_of(self.field, (self.space,) * n, self.space,
                               2 - n)

    def family(self) -> CochainFamily:
        return CochainFamily(self.field, self.ops.values())

    @property
    def minimal(self) -> bool:
        return 1 not in self.ops

    def __repr__(self):
        ns = sorted(self.ops)
        return (f"<structure on {self.space.label}, ops {ns},"
                f" trunc {self.trunc}>")


def from_algebra(A: AlgebraData, trunc: int, d: int | None = None
                 ) -> AInftyStructure:
    ops = {2: A.m2}
    if A.m1 is not None:
        ops[1] = A.m1
    return AInftyStructure(A.space, ops, trunc, unit=A.unit, d=d)


def check_algebra(S: AInftyStructure) -> CheckReport:
    """Brace residual of the structure equation, one arity at a time."""
    res = {}
    for p, cp in S.ops.items():
        for q, cq in S.ops.items():
            n = p + q - 1
            if n > S.trunc:
                continue
            acc = res.get(n)
            term = brace(cp, cq)
            res[n] = term if acc is None else acc + term
    bad = {n: fam for n, fam in res.items() if not fam.is_zero()}
    return CheckReport("structure", S.trunc, bad)


# --- bimodules ---------------------------------------------------------------


class AInftyBimodule:
    """Operations (p,q) -> m_{p,q} on a module space over a structure.

    The component at (p,q) has arity p+1+q and vertical degree 1-p-q.  The
    module space must be a different object from the algebra space, build
    a diagonal copy when they coincide.
    """

    def __init__(self, over: AInftyStructure, space: GradedVectorSpace,
                 ops: dict, trunc: int | None = None):
        if space is over.space:
            raise GradedSpaceError("module space must be a distinct object,"
                                   " take a diagonal copy")
        self.over = over
        self.space = space
        self.field = space.field
        self.trunc = over.trunc if trunc is None else trunc
        self.ops = {}
        asp = over.space
        for (p, q), c in ops.items():
            if c is None or c.is_zero():
                continue
            n = p + 1 + q
            if not 1 <= n <= self.trunc:
                raise AlgebraError(f"component {(p, q)} outside the "
                                   f"truncation {self.trunc}")
            shape = (asp,) * p + (space,) + (asp,) * q
            if (len(c.inputs) != n or c.output is not space
                    or any(a is not b for a, b in zip(c.inputs, shape))):
                raise GradedSpaceError(f"component {(p, q)} has the wrong"
                                       " shape")
            if c.vdeg != 1 - p - q:
                raise GradedSpaceError(f"component {(p, q)} has vertical"
                                       f" degree {c.vdeg}, wants {1 - p - q}")
            self.ops[(p, q)] = c

    def op(self, p: int, q: int) -> Cochain:
        c = self.ops.get((p, q))
        if c is not None:
            return c
        asp = self.over.space
        shape = (asp,) * p + (self.space,) + (asp,) * q
        return Cochain.zero_of(self.field, shape, self.space, 1 - p - q)

    def ops_arity(self, n: int):
        return [c for (p, q), c in self.ops.items() if p + 1 + q == n]

    def family(self) -> CochainFamily:
        return CochainFamily(self.field, self.ops.values())

    @property
    def minimal(self) -> bool:
        return (0, 0) not in self.ops

    def __repr__(self):
        ks = sorted(self.ops)
        return (f"<bimodule on {self.space.label} over "
                f"{self.over.space.label}, components {ks}>")


def from_bimodule(S: AInftyStructure, M: BimoduleData) -> AInftyBimodule:
    if M.over.space is not S.space:
        raise AlgebraError("bimodule lives over a different space")
    ops = {(1, 0): M.act_l, (0, 1): M.act_r}
    if M.m1 is not None:
        ops[(0, 0)] = M.m1
    return AInftyBimodule(S, M.space, ops)


def diagonal_ai(S: AInftyStructure) -> AInftyBimodule:
    """The structure over itself, on a fresh copy of the space."""
    msp = GradedVectorSpace(S.field, dict(S.space.components),
                            S.space.label + "#")
    ops = {}
    for n, c in S.ops.items():
        for k in range(n):
            shape = (S.space,) * k + (msp,) + (S.space,) * (n - 1 - k)
            ops[(k, n - 1 - k)] = Cochain(
                S.field, shape, msp, c.vdeg,
                {key: dict(img) for key, img in c.entries.items()},
                _checked=True)
    return AInftyBimodule(S, msp, ops)


def check_bimodule(B: AInftyBimodule) -> CheckReport:
    """Residual of the bimodule equation split by arity.

    Insertions of algebra operations land only in algebra slots and module
    components only in the module slot, the slot typing of the insertion
    calculus does the bookkeeping.
    """
    S = B.over
    res = {}

    def accum(n, fam):
        if n > B.trunc:
            return
        acc = res.get(n)
        res[n] = fam if acc is None else acc + fam

    for (p, q), cm in B.ops.items():
        nm = p + 1 + q
        for na, ca in S.ops.items():
            if nm + na - 1 <= B.trunc:
                accum(nm + na - 1, brace(cm, ca))
        for (p2, q2), cm2 in B.ops.items():
            if nm + p2 + q2 <= B.trunc:
                accum(nm + p2 + q2, brace(cm, cm2))
    bad = {n: fam for n, fam in res.items() if not fam.is_zero()}
    return CheckReport("bimodule", B.trunc, bad)


# --- morphisms ---------------------------------------------------------------


class AInftyMorphism:
    """Components n -> f_n of vertical degree 1-n between two structures."""

    def __init__(self, src: AInftyStructure, tgt: AInftyStructure,
                 comps: dict, trunc: int | None = None):
        self.src = src
        self.tgt = tgt
        self.field = src.field
        self.trunc = min(src.trunc, tgt.trunc) if trunc is None else trunc
        self.comps = {}
        for n, c in comps.items():
            if c is None or c.is_zero():
                continue
            if not 1 <= n <= self.trunc:
                raise AlgebraError(f"component arity {n} outside the"
                                   f" truncation {self.trunc}")
            if (len(c.inputs) != n or c.output is not tgt.space
                    or any(sp is not src.space for sp in c.inputs)):
                raise GradedSpaceError(f"component {n} has the wrong shape")
            if c.vdeg != 1 - n:
                raise GradedSpaceError(f"component {n} has vertical degree"
                                       f" {c.vdeg}, wants {1 - n}")
            self.comps[n] = c

    def comp(self, n: int) -> Cochain:
        c = self.comps.get(n)
        if c is not None:
            return c
        return Cochain.zero_of(self.field, (self.src.space,) * n,
                               self.tgt.space, 1 - n)

    def __repr__(self):
        return (f"<morphism {self.src.space.label} -> "
                f"{self.tgt.space.label}, components {sorted(self.comps)}>")


def check_morphism(f: AInftyMorphism) -> CheckReport:
    """Residual of the morphism equation per arity.

    The left side inserts source operations into components, the right
    side fills target operations with tuples of components over ordered
    decompositions of the arity.
    """
    res = {}

    def accum(n, fam):
        if n > f.trunc:
            return
        acc = res.get(n)
        res[n] = fam if acc is None else acc + fam

    for p, fp in f.comps.items():
        for q, mq in f.src.ops.items():
            if p + q - 1 <= f.trunc:
                accum(p + q - 1, brace(fp, mq))
    for r, mr in f.tgt.ops.items():
        for n in range(r, f.trunc + 1):
            for parts in compositions(n, r):
                if any(i not in f.comps for i in parts):
                    continue
                args = [f.comps[i] for i in parts]
                accum(n, as_family(fill_brace(mr, args)).scale(
                    f.field.neg(f.field.one())))
    bad = {n: fam for n, fam in res.items() if not fam.is_zero()}
    return CheckReport("morphism", f.trunc, bad)


class AInftyBimoduleMorphism:
    """Components (p,q) -> f_{p,q} of vertical degree -(p+q) between two
    bimodules over one structure."""

    def __init__(self, src: AInftyBimodule, tgt: AInftyBimodule,
                 comps: dict, trunc: int | None = None):
        if src.over is not tgt.over:
            raise AlgebraError("bimodule morphism needs one base structure")
        self.src = src
        self.tgt = tgt
        self.field = src.field
        self.trunc = min(src.trunc, tgt.trunc) if trunc is None else trunc
        self.comps = {}
        asp = src.over.space
        for (p, q), c in comps.items():
            if c is None or c.is_zero():
                continue
            n = p + 1 + q
            if not 1 <= n <= self.trunc:
                raise AlgebraError(f"component {(p, q)} outside the"
                                   f" truncation {self.trunc}")
            shape = (asp,) * p + (src.space,) + (asp,) * q
            if (len(c.inputs) != n or c.output is not tgt.space
                    or any(a is not b for a, b in zip(c.inputs, shape))):
                raise GradedSpaceError(f"component {(p, q)} has the wrong"
                                       " shape")
            if c.vdeg != -(p + q):
                raise GradedSpaceError(f"component {(p, q)} has vertical"
                                       f" degree {c.vdeg}, wants {-(p + q)}")
            self.comps[(p, q)] = c

    def comp(self, p: int, q: int) -> Cochain:
        c = self.comps.get((p, q))
        if c is not None:
            return c
        asp = self.src.over.space
        shape = (asp,) * p + (self.src.space,) + (asp,) * q
        return Cochain.zero_of(self.field, shape, self.tgt.space, -(p + q))

    def __repr__(self):
        return (f"<bimodule morphism {self.src.space.label} -> "
                f"{self.tgt.space.label}, components {sorted(self.comps)}>")


def check_bimodule_morphism(f: AInftyBimoduleMorphism) -> CheckReport:
    """A bimodule morphism is identity-plus-f on the square-zero bridges."""
    S = f.src.over
    br_s = squarezero_bridge(S, f.src)
    br_t = squarezero_bridge(S, f.tgt)
    one = f.field.one()
    ida = {((d, A_TAG + nm),): {A_TAG + nm: one}
           for d, nm in S.space.basis()}
    comps = {1: Cochain(f.field, (br_s.space,), br_t.space, 0, ida,
                        _checked=True)}
    for (p, q), c in f.comps.items():
        n = p + 1 + q
        emb = _embed(c, br_s.space, br_t.space,
                     "A" * p + "M" + "A" * q, M_TAG)
        acc = comps.get(n)
        comps[n] = emb if acc is None else acc + emb
    lifted = AInftyMorphism(br_s.structure, br_t.structure, comps, f.trunc)
    rep = check_morphism(lifted)
    return CheckReport("bimodule morphism", rep.trunc, rep.residuals,
                       rep.messages)


# --- the square-zero bridge ---------------------------------------------------


class BridgeData:
    """Structure on the tagged sum of a structure and a bimodule."""

    __slots__ = ("structure", "base", "module", "space")

    def __init__(self, structure: AInftyStructure, base: AInftyStructure,
                 module: AInftyBimodule):
        self.structure = structure
        self.base = base
        self.module = module
        self.space = structure.space


def _embed(c: Cochain, total_in: GradedVectorSpace,
           total_out: GradedVectorSpace, slots: str, out_tag: str) -> Cochain:
    tags = [A_TAG if s == "A" else M_TAG for s in slots]
    ent = {}
    for key, img in c.entries.items():
        nk = tuple((d, t + nm) for (d, nm), t in zip(key, tags))
        ent[nk] = {out_tag + n: v for n, v in img.items()}
    return Cochain(c.field, (total_in,) * len(slots), total_out, c.vdeg,
                   ent, _checked=True)


def squarezero_bridge(S: AInftyStructure, B: AInftyBimodule) -> BridgeData:
    """Tagged sum with the module multiplying to zero against itself."""
    if B.over is not S:
        raise AlgebraError("bimodule is not over the given structure")
    f = S.field
    comps = {}
    for d, names in S.space.components.items():
        comps.setdefault(d, []).extend(A_TAG + n for n in names)
    for d, names in B.space.components.items():
        comps.setdefault(d, []).extend(M_TAG + n for n in names)
    total = GradedVectorSpace(f, comps,
                              f"({S.space.label}+{B.space.label})")
    trunc = min(S.trunc, B.trunc)
    ops = {}
    for n, c in S.ops.items():
        if n <= trunc:
            ops[n] = _embed(c, total, total, "A" * n, A_TAG)
    for (p, q), c in B.ops.items():
        n = p + 1 + q
        if n > trunc:
            continue
        emb = _embed(c, total, total, "A" * p + "M" + "A" * q, M_TAG)
        acc = ops.get(n)
        ops[n] = emb if acc is None else acc + emb
    unit = None
    if S.unit is not None:
        unit = Vec(total, 0, {A_TAG + n: v for n, v in S.unit.coeffs.items()})
    d_ok = S.d if S.d is not None and _sparse_ok(B.space, S.d) else None
    structure = AInftyStructure(total, ops, trunc, unit=unit, d=d_ok)
    return BridgeData(structure, S, B)


def squarezero_split(T: AInftyStructure, Aspace: GradedVectorSpace,
                     Mspace: GradedVectorSpace,
                     d: int | None = None):
    """Undo a tagged-sum structure into a structure and a bimodule.

    Rejects any component that a square-zero extension cannot carry: two
    or more module inputs, a module input with an algebra output, or an
    all-algebra input with a module output.
    """
    for deg, name in T.space.basis():
        side, bare = tag_split(name)
        sp = Aspace if side == "A" else Mspace
        if not sp.has(deg, bare):
            raise AlgebraError(f"tagged vector {name!r} in degree {deg} has"
                               " no untagged counterpart")
    if (Aspace.total_dim() + Mspace.total_dim()) != T.space.total_dim():
        raise AlgebraError("untagged spaces do not fill the tagged sum")

    a_ops = {}
    m_ops = {}
    for n, c in T.ops.items():
        buckets = {}
        for key, img in c.entries.items():
            sides = [tag_split(nm) for _, nm in key]
            mpos = [i for i, (s, _) in enumerate(sides) if s == "M"]
            if len(mpos) > 1:
                raise AlgebraError("split found a component with two module"
                                   " inputs")
            nk = tuple((d0, bare) for (d0, _), (_, bare)
                       in zip(key, sides))
            a_img, m_img = {}, {}
            for nm, v in img.items():
                side, bare = tag_split(nm)
                (a_img if side == "A" else m_img)[bare] = v
            if mpos:
                if a_img:
                    raise AlgebraError("split found a module input with an"
                                       " algebra output")
                if m_img:
                    buckets.setdefault(("M", mpos[0]), {})[nk] = m_img
            else:
                if m_img:
                    raise AlgebraError("split found algebra inputs with a"
                                       " module output")
                if a_img:
                    buckets.setdefault(("A", None), {})[nk] = a_img
        for (side, pos), ent in buckets.items():
            if side == "A":
                a_ops[n] = Cochain(T.field, (Aspace,) * n, Aspace,
                                   c.vdeg, ent, _checked=True)
            else:
                p, q = pos, n - 1 - pos
                shape = (Aspace,) * p + (Mspace,) + (Aspace,) * q
                m_ops[(p, q)] = Cochain(T.field, shape, Mspace, c.vdeg,
                                        ent, _checked=True)
    unit = None
    if T.unit is not None:
        coeffs = {}
        for nm, v in T.unit.coeffs.items():
            side, bare = tag_split(nm)
            if side != "A":
                raise AlgebraError("unit sticks out of the algebra half")
            coeffs[bare] = v
        unit = Vec(Aspace, 0, coeffs)
    S = AInftyStructure(Aspace, a_ops, T.trunc, unit=unit,
                        d=T.d if d is None else d)
    B = AInftyBimodule(S, Mspace, m_ops, T.trunc)
    return S, B


# --- shift, dual, transport ---------------------------------------------------


def shift_bimodule_ai(B: AInftyBimodule, n: int) -> AInftyBimodule:
    """Componentwise shift transport of every operation."""
    msp = shift_space(B.space, n, VERTICAL_SHIFT)
    ops = {pq: psi_shift(c, n, B.space, msp) for pq, c in B.ops.items()}
    return AInftyBimodule(B.over, msp, ops, B.trunc)


def dual_bimodule_ai(B: AInftyBimodule) -> AInftyBimodule:
    """Componentwise dual transport; the (p,q) component of the dual is
    the transposed transport of the (q,p) component."""
    dsp = dual_space(B.space)
    ops = {}
    for (q, p), c in B.ops.items():
        ops[(p, q)] = theta_dual(c, B.space, dsp)
    return AInftyBimodule(B.over, dsp, ops, B.trunc)


def shift_morphism_ai(f: AInftyBimoduleMorphism, n: int,
                      srcn: AInftyBimodule | None = None,
                      tgtn: AInftyBimodule | None = None
                      ) -> AInftyBimoduleMorphism:
    if srcn is None:
        srcn = shift_bimodule_ai(f.src, n)
    if tgtn is None:
        tgtn = shift_bimodule_ai(f.tgt, n)
    comps = {pq: psi_shift(c, n, f.src.space, srcn.space,
                           f.tgt.space, tgtn.space)
             for pq, c in f.comps.items()}
    return AInftyBimoduleMorphism(srcn, tgtn, comps, f.trunc)


def dual_morphism_ai(f: AInftyBimoduleMorphism,
                     dsrc: AInftyBimodule | None = None,
                     dtgt: AInftyBimodule | None = None
                     ) -> AInftyBimoduleMorphism:
    """Contravariant dual: a morphism M -> N dualizes to DN -> DM."""
    if dsrc is None:
        dsrc = dual_bimodule_ai(f.src)
    if dtgt is None:
        dtgt = dual_bimodule_ai(f.tgt)
    comps = {}
    for (p, q), c in f.comps.items():
        comps[(q, p)] = theta_dual(c, f.src.space, dsrc.space,
                                   slot_dual=dtgt.space)
    return AInftyBimoduleMorphism(dtgt, dsrc, comps, f.trunc)


def restrict_scalars(phi: AInftyMorphism, B: AInftyBimodule
                     ) -> AInftyBimodule:
    """Pull a bimodule over the target back along a morphism.

    The (p,q) component fills a component of B with tuples of morphism
    components around the identity of the module slot.
    """
    if B.over is not phi.tgt:
        raise AlgebraError("bimodule is not over the morphism target")
    idm = identity_cochain(B.space)
    trunc = min(phi.trunc, B.trunc)
    ops = {}
    for p in range(0, trunc):
        for q in range(0, trunc - p):
            if p + 1 + q > trunc:
                continue
            acc = None
            for (a, b), cm in B.ops.items():
                lefts = ([()] if (a, p) == (0, 0) else
                         list(compositions(p, a)) if a >= 1 and p >= a
                         else [])
                rights = ([()] if (b, q) == (0, 0) else
                          list(compositions(q, b)) if b >= 1 and q >= b
                          else [])
                for li in lefts:
                    if any(i not in phi.comps for i in li):
                        continue
                    for rj in rights:
                        if any(j not in phi.comps for j in rj):
                            continue
                        args = ([phi.comps[i] for i in li] + [idm]
                                + [phi.comps[j] for j in rj])
                        term = fill_brace(cm, args)
                        acc = term if acc is None else acc + term
            if acc is not None and not acc.is_zero():
                ops[(p, q)] = acc
    return AInftyBimodule(phi.src, B.space, ops, trunc)


def strict_iso_check(iso: GradedMap, B1: AInftyBimodule,
                     B2: AInftyBimodule) -> bool:
    """Componentwise conjugation by a degree-0 module isomorphism."""
    keys = set(B1.ops) | set(B2.ops)
    for (p, q) in keys:
        moved = phi_transport(iso, B1.op(p, q), B1.space, B2.space)
        if not (as_family(moved) - as_family(B2.op(p, q))).is_zero():
            return False
    return True


def strict_iso_check_algebra(iso: GradedMap, S1: AInftyStructure,
                             S2: AInftyStructure) -> bool:
    for n in set(S1.ops) | set(S2.ops):
        moved = transport_hc(iso, S1.op(n))
        if not (as_family(moved) - as_family(S2.op(n))).is_zero():
            return False
    return True


# --- unit strictification -----------------------------------------------------


def unit_insertion_defects(c: Cochain, unit: Vec) -> dict:
    """Values of c with the unit in one slot, indexed by slot, the basis
    tuple of the remaining slots, and the output name."""
    n = len(c.inputs)
    f = c.field
    out = {}
    slots_basis = [list(sp.basis()) for sp in c.inputs]
    for j in range(n):
        rest = slots_basis[:j] + slots_basis[j + 1:]
        for key in itertools.product(*rest):
            args = [c.inputs[i].basis_vec(*key[i]) for i in range(j)]
            args.append(unit)
            args += [c.inputs[i].basis_vec(*key[i - 1])
                     for i in range(j + 1, n)]
            val = c.evaluate(args)
            for name, coeff in val.coeffs.items():
                if coeff:
                    out[(j, key, name)] = f.add(
                        out.get((j, key, name), f.zero()), coeff)
    return {k: v for k, v in out.items() if v}


def _gauge_step(m2: Cochain, g: Cochain) -> Cochain:
    """Change of the next operation caused by a gauge component g, the
    commutator of g with the binary operation."""
    sp = m2.output
    n = len(g.inputs) + 1
    fam = brace(g, m2)
    idc = identity_cochain(sp)
    fam = fam - as_family(fill_brace(m2, [g, idc]))
    fam = fam - as_family(fill_brace(m2, [idc, g]))
    return _collapse(fam, (sp,) * n, sp, 2 - n, m2.field)


def strictify_unit(S: AInftyStructure, unit: Vec | None = None,
                   trunc: int | None = None):
    """Gauge away unit insertions of the higher operations.

    Wants a minimal structure whose binary operation is already strictly
    unital; the gauge is found arity by arity, each stage solving a linear
    system for the component one below the arity being cleaned.  Returns
    the cleaned structure, the gauge morphism and a report; failure of a
    stage raises, since a unital minimal structure always admits one.
    """
    unit = S.unit if unit is None else unit
    if unit is None or unit.is_zero():
        raise AlgebraError("strict unitalization needs a unit vector")
    if not S.minimal:
        raise AlgebraError("strict unitalization wants a minimal structure")
    N = S.trunc if trunc is None else trunc
    f = S.field
    sp = S.space
    m2 = S.op(2)
    for deg, name in sp.basis():
        x = sp.basis_vec(deg, name)
        if (m2.evaluate([unit, x]) - x).coeffs or \
           (m2.evaluate([x, unit]) - x).coeffs:
            raise AlgebraError("binary operation is not strictly unital")

    ops2 = {2: m2}
    comps = {1: identity_cochain(sp)}
    messages = []
    for n in range(3, N + 1):
        base = None
        for p, fp in comps.items():
            q = n + 1 - p
            if q in S.ops and p <= n - 2:
                term = brace(fp, S.ops[q])
                base = term if base is None else base + term
        for r in range(2, n):
            if r not in ops2:
                continue
            for parts in compositions(n, r):
                if max(parts) > n - 2 or any(i not in comps for i in parts):
                    continue
                args = [comps[i] for i in parts]
                term = as_family(fill_brace(ops2[r], args)).scale(
                    f.neg(f.one()))
                base = term if base is None else base + term
        cn = _collapse(base if base is not None else
                       CochainFamily(f), (sp,) * n, sp, 2 - n, f)

        target = unit_insertion_defects(cn, unit)
        if target:
            units = list(cochain_units((sp,) * (n - 1), sp, 2 - n))
            cols = {}
            for key, name in units:
                u = Cochain(f, (sp,) * (n - 1), sp, 2 - n,
                            {key: {name: f.one()}}, _checked=True)
                col = unit_insertion_defects(_gauge_step(m2, u), unit)
                if col:
                    cols[(key, name)] = col
            order = sorted(cols)
            goal = {k: f.neg(v) for k, v in target.items()}
            sol = linalg.solve(f, cols, order, goal)
            if sol is None:
                raise AlgebraError(f"no gauge clears the unit insertions at"
                                   f" arity {n}")
            ent = {}
            for (key, name), v in sol.items():
                if v:
                    ent.setdefault(key, {})[name] = v
            if ent:
                g = Cochain(f, (sp,) * (n - 1), sp, 2 - n, ent,
                            _checked=True)
                comps[n - 1] = g
                cn = cn + _gauge_step(m2, g)
            messages.append(f"arity {n}: cleared {len(target)} unit"
                            f" insertions with {len(ent)} corrector keys")
        else:
            messages.append(f"arity {n}: already clean")
        if not cn.is_zero():
            ops2[n] = cn

    S2 = AInftyStructure(sp, ops2, N, unit=unit, d=S.d)
    gauge = AInftyMorphism(S, S2, comps, N)
    residuals = {}
    for n in range(3, N + 1):
        left = unit_insertion_defects(S2.op(n), unit)
        if left:
            residuals[("unit", n)] = left
    rep_morph = check_morphism(gauge)
    rep_str = check_algebra(S2)
    for n, fam in rep_morph.residuals.items():
        residuals[("gauge", n)] = fam
    for n, fam in rep_str.residuals.items():
        residuals[("structure", n)] = fam
    report = CheckReport("strict unit", N, residuals, messages)
    return S2, gauge, report


# --- serialization ------------------------------------------------------------


def _cochain_to_obj(c: Cochain):
    rows = []
    for key in sorted(c.entries):
        img = c.entries[key]
        for name in sorted(img):
            rows.append([[list(k) for k in key], name,
                         c.field.scalar_to_str(img[name])])
    return rows


def _cochain_from_obj(field, inputs, output, vdeg, rows) -> Cochain:
    ent = {}
    for key, name, val in rows:
        k = tuple((int(d), str(nm)) for d, nm in key)
        ent.setdefault(k, {})[str(name)] = field.of(val)
    return Cochain(field, inputs, output, vdeg, ent)


def structure_to_obj(S: AInftyStructure) -> dict:
    obj = {"trunc": S.trunc,
           "ops": {str(n): _cochain_to_obj(c)
                   for n, c in sorted(S.ops.items())}}
    if S.d is not None:
        obj["d"] = S.d
    if S.unit is not None:
        obj["unit"] = {n: S.field.scalar_to_str(v)
                       for n, v in sorted(S.unit.coeffs.items())}
    return obj


def structure_from_obj(space: GradedVectorSpace, obj: dict
                       ) -> AInftyStructure:
    f = space.field
    trunc = int(obj["trunc"])
    ops = {}
    for ns, rows in obj.get("ops", {}).items():
        n = int(ns)
        ops[n] = _cochain_from_obj(f, (space,) * n, space, 2 - n, rows)
    unit = None
    if obj.get("unit"):
        unit = Vec(space, 0, {str(n): f.of(v)
                              for n, v in obj["unit"].items()})
    return AInftyStructure(space, ops, trunc, unit=unit, d=obj.get("d"))


def bimodule_to_obj(B: AInftyBimodule) -> dict:
    return {"trunc": B.trunc,
            "ops": {f"{p},{q}": _cochain_to_obj(c)
                    for (p, q), c in sorted(B.ops.items())}}


def bimodule_from_obj(S: AInftyStructure, space: GradedVectorSpace,
                      obj: dict) -> AInftyBimodule:
    f = space.field
    ops = {}
    for key, rows in obj.get("ops", {}).items():
        p, q = (int(x) for x in key.split(","))
        shape = (S.space,) * p + (space,) + (S.space,) * q
        ops[(p, q)] = _cochain_from_obj(f, shape, space, 1 - p - q, rows)
    return AInftyBimodule(S, space, ops, int(obj["trunc"]))
