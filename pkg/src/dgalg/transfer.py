"""Minimal models by homotopy transfer over planar binary trees.

Each tree of arity n encodes one summand of the transferred operation
m_n: leaves carry the section, internal edges the contracting homotopy,
internal vertices the binary product, and the root the projection.  Every
summand is computed twice: once by the recursive four-case infinitesimal
composition and once from the one-step closed tensor form with its global
sign.  A disagreement raises instead of degrading into a warning, so a
finished transfer certifies its own sign bookkeeping tree by tree.

Bimodule transfer rides on the algebra case: transfer the square-zero
extension along the tagged direct sum of two retractions, then split the
result back into an algebra and a bimodule.
"""

from __future__ import annotations

import itertools
from functools import lru_cache
from math import comb

from .graded import GradedVectorSpace, GradedMap, Vec
from .multilinear import (Cochain, SignMismatch, infinitesimal_compose,
                          fill_brace)
from .algebras import (AlgebraData, BimoduleData, SDRData, A_TAG, M_TAG,
                       cohomology_with_sdr, verify_sdr, square_zero)
from . import ainfty


LEAF = ()


def catalan(n: int) -> int:
    return comb(2 * n, n) // (n + 1)


@lru_cache(maxsize=None)
def arity(tree) -> int:
    if tree == LEAF:
        return 1
    return arity(tree[0]) + arity(tree[1])


def signature(tree) -> int:
    """Sign exponent attached to the root: a(left) * (a(right) + 1)."""
    if tree == LEAF:
        raise ValueError("a leaf has no signature")
    return arity(tree[0]) * (arity(tree[1]) + 1)


@lru_cache(maxsize=None)
def enumerate_pbt(n: int):
    """All planar binary trees with n leaves, ordered by split position.

    Returns a tuple; there are catalan(n-1) trees.
    """
    if n < 1:
        raise ValueError("tree arity must be positive")
    if n == 1:
        return (LEAF,)
    out = []
    for k in range(1, n):
        for left in enumerate_pbt(k):
            for right in enumerate_pbt(n - k):
                out.append((left, right))
    return tuple(out)


def _unary(m: GradedMap) -> Cochain:
    ent = {}
    for d, col in m.blocks.items():
        for n, img in col.items():
            ent[((d, n),)] = dict(img)
    return Cochain(m.src.field, (m.src,), m.tgt, m.deg, ent, _checked=True)


class _TreeEngine:
    """Shared tables for transferring one product across one retraction."""

    def __init__(self, space: GradedVectorSpace, m2: Cochain, sdr: SDRData):
        self.field = space.field
        self.space = space
        self.m2 = m2
        self.sdr = sdr
        self.H = sdr.H
        self.i_c = _unary(sdr.include)
        self.p_c = _unary(sdr.project)
        self.h_c = _unary(sdr.homotopy)
        self._mtilde = {}
        self._hm = {}
        self.signs_checked = 0
        # reverse index of the section: big basis vector -> section preimages
        self._backs = {}
        for hd, hn in self.H.basis():
            img = sdr.include.apply_basis(hd, hn)
            for an, c in img.coeffs.items():
                self._backs.setdefault((hd, an), []).append((hn, c))

    def mtilde(self, tree) -> Cochain:
        got = self._mtilde.get(tree)
        if got is not None:
            return got
        left, right = tree
        if left == LEAF and right == LEAF:
            out = self.m2
        elif right == LEAF:
            out = infinitesimal_compose(self.m2, 1, self.hm(left))
        elif left == LEAF:
            out = infinitesimal_compose(self.m2, 2, self.hm(right))
        else:
            out = infinitesimal_compose(
                infinitesimal_compose(self.m2, 1, self.hm(left)),
                arity(left) + 1, self.hm(right))
        self._mtilde[tree] = out
        return out

    def hm(self, tree) -> Cochain:
        got = self._hm.get(tree)
        if got is None:
            got = infinitesimal_compose(self.h_c, 1, self.mtilde(tree))
            self._hm[tree] = got
        return got

    def summand(self, tree) -> Cochain:
        """Contribution of one tree: project after filling leaves with
        the section."""
        n = arity(tree)
        filled = fill_brace(self.mtilde(tree), [self.i_c] * n)
        return infinitesimal_compose(self.p_c, 1, filled)

    def _factor(self, c: Cochain | None):
        # (input key, value vector) rows of a subtree factor; None stands
        # for the identity on one slot, restricted to the section image
        if c is None:
            for d, n in sorted(self._backs):
                yield ((d, n),), self.space.basis_vec(d, n)
        else:
            for key, img in c.entries.items():
                odeg = sum(d for d, _ in key) + c.vdeg
                yield key, Vec(self.space, odeg, dict(img))

    def _pullback(self, key):
        # section preimages of a big-space input key, with coefficients
        pools = []
        for d, n in key:
            hits = self._backs.get((d, n))
            if not hits:
                return
            pools.append([(d, hn, c) for hn, c in hits])
        f = self.field
        for combo in itertools.product(*pools):
            coeff = f.one()
            for _, _, c in combo:
                coeff = f.mul(coeff, c)
            yield tuple((d, hn) for d, hn, _ in combo), coeff

    def closed_form(self, tree) -> Cochain:
        """The same summand from the one-step tensor description.

        Subtree factors are shared with the recursion, so comparing this
        against summand() isolates the signs the root-level infinitesimal
        compositions produce.
        """
        left, right = tree
        n = arity(tree)
        f = self.field
        hl = None if left == LEAF else self.hm(left)
        hr = None if right == LEAF else self.hm(right)
        rdeg = 0 if right == LEAF else 1 - arity(right)
        root = f.sign_pow(signature(tree))
        ent = {}
        for keyl, vl in self._factor(hl):
            if vl.is_zero():
                continue
            kos = rdeg * sum(d for d, _ in keyl)
            sgn = f.mul(root, f.sign_pow(kos))
            for keyr, vr in self._factor(hr):
                if vr.is_zero():
                    continue
                pair = self.m2.evaluate([vl, vr])
                if pair.is_zero():
                    continue
                outv = self.sdr.project.apply(pair)
                if outv.is_zero():
                    continue
                for hkey, back in self._pullback(keyl + keyr):
                    c = f.mul(sgn, back)
                    acc = ent.setdefault(hkey, {})
                    for on, ov in outv.coeffs.items():
                        acc[on] = f.add(acc.get(on, f.zero()), f.mul(c, ov))
        clean = {}
        for key, img in ent.items():
            img = {k: v for k, v in img.items() if v}
            if img:
                clean[key] = img
        return Cochain(f, (self.H,) * n, self.H, 2 - n, clean, _checked=True)

    def checked_summand(self, tree) -> Cochain:
        s = self.summand(tree)
        if not (s - self.closed_form(tree)).is_zero():
            raise SignMismatch(f"transfer summand of tree {tree} disagrees"
                               " with its closed form")
        self.signs_checked += 1
        return s

    def op(self, n: int, check=True) -> Cochain:
        total = Cochain.zero_of(self.field, (self.H,) * n, self.H, 2 - n)
        for tree in enumerate_pbt(n):
            total = total + (self.checked_summand(tree) if check
                             else self.summand(tree))
        return total


def tree_summand(tree, A: AlgebraData, sdr: SDRData,
                 check_sign=True) -> Cochain:
    """Single-tree contribution to the transferred operation of its arity."""
    eng = _TreeEngine(A.space, A.m2, sdr)
    return eng.checked_summand(tree) if check_sign else eng.summand(tree)


def minimal_model_algebra(A: AlgebraData, N: int, d: int | None = None,
                          check_signs=True):
    """Transfer the product across a retraction onto cohomology.

    Returns the structure on H with operations up to arity N, and the
    retraction used.  Passing d declares the expected sparsity step of the
    result; the constructor then rejects any computed operation that
    breaks it instead of silently keeping it.
    """
    sdr = cohomology_with_sdr(A.space, A.m1)
    eng = _TreeEngine(A.space, A.m2, sdr)
    ops = {}
    for n in range(2, N + 1):
        c = eng.op(n, check=check_signs)
        if not c.is_zero():
            ops[n] = c
    uH = sdr.project.apply(A.unit)
    S = ainfty.AInftyStructure(sdr.H, ops, N,
                               unit=None if uH.is_zero() else uH, d=d)
    return S, sdr


def sum_sdr(sdr_a: SDRData, sdr_m: SDRData,
            total: GradedVectorSpace) -> SDRData:
    """Tagged direct sum of two retractions onto a square-zero total space."""
    f = total.field
    comps = {}
    for d, names in sdr_a.H.components.items():
        comps.setdefault(d, []).extend(A_TAG + n for n in names)
    for d, names in sdr_m.H.components.items():
        comps.setdefault(d, []).extend(M_TAG + n for n in names)
    H = GradedVectorSpace(f, comps, "H(" + total.label + ")")

    def merge(ma, mm, src, tgt, deg):
        blocks = {}
        for d, col in ma.blocks.items():
            dst = blocks.setdefault(d, {})
            for n, img in col.items():
                dst[A_TAG + n] = {A_TAG + k: v for k, v in img.items()}
        for d, col in mm.blocks.items():
            dst = blocks.setdefault(d, {})
            for n, img in col.items():
                dst[M_TAG + n] = {M_TAG + k: v for k, v in img.items()}
        return GradedMap(src, tgt, deg, blocks)

    return SDRData(H,
                   merge(sdr_a.include, sdr_m.include, H, total, 0),
                   merge(sdr_a.project, sdr_m.project, total, H, 0),
                   merge(sdr_a.homotopy, sdr_m.homotopy, total, total, -1))


def minimal_model_pair(A: AlgebraData, M: BimoduleData, N: int,
                       d: int | None = None, check_signs=True):
    """Joint minimal model of an algebra and a bimodule over it.

    Transfers the square-zero extension of the pair along the direct sum
    of one retraction per factor, then splits the tagged result.  Returns
    the algebra structure, the bimodule, and a certificate dict recording
    the per-tree sign checks, the two retractions, and the unsplit total.
    """
    sz = square_zero(A, M)
    sdr_a = cohomology_with_sdr(A.space, A.m1)
    sdr_m = cohomology_with_sdr(M.space, M.m1)
    sdr = sum_sdr(sdr_a, sdr_m, sz.algebra.space)
    sp = sz.algebra.space
    dmap = (GradedMap.zero(sp, sp, 1) if sz.algebra.m1 is None
            else sz.algebra.m1.to_graded_map())
    verify_sdr(sp, dmap, sdr)

    eng = _TreeEngine(sp, sz.algebra.m2, sdr)
    ops = {}
    for n in range(2, N + 1):
        c = eng.op(n, check=check_signs)
        if not c.is_zero():
            ops[n] = c
    uH = sdr.project.apply(sz.algebra.unit)
    big = ainfty.AInftyStructure(sdr.H, ops, N,
                                 unit=None if uH.is_zero() else uH)
    S, B = ainfty.squarezero_split(big, sdr_a.H, sdr_m.H, d=d)
    cert = {"signs_checked": eng.signs_checked,
            "sdr": (sdr_a, sdr_m),
            "total": big}
    return S, B, cert
