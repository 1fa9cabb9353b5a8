"""Multilinear cochains and the insertion calculus that drives everything.

A cochain is a multilinear map from a tuple of graded spaces to a graded
space, shifted vertically; it is stored extensionally on basis tuples.
Evaluation on elements is sign-free multilinear extension.  All Koszul
signs live in the operations on cochains, and the single primitive is
insertion of one cochain into one slot of another: every differential,
bracket, cup product and transfer formula in the package is a sum of
insertions.

Insertions across different slot patterns of module-style cochains land in
different input signatures, so sums of insertions are kept as families of
cochains grouped by signature.  A family with one component behaves like a
plain cochain.

Setting DEBUG_SIGNS (or the context manager debug_signs) recomputes the
sign of every insertion by an independent route, the suspension bookkeeping
that weights slot j of an n-tuple by (n-j), and aborts on mismatch.
"""

from __future__ import annotations

import contextlib
import itertools

from .graded import GradedVectorSpace, Vec, GradedMap, GradedSpaceError

DEBUG_SIGNS = False

ARITY_BUDGET = 8


class BudgetExceeded(RuntimeError):
    def __init__(self, arity: int, budget: int):
        super().__init__(f"arity {arity} exceeds budget {budget}")
        self.arity = arity
        self.budget = budget


class SignMismatch(AssertionError):
    pass


@contextlib.contextmanager
def debug_signs():
    global DEBUG_SIGNS
    old = DEBUG_SIGNS
    DEBUG_SIGNS = True
    try:
        yield
    finally:
        DEBUG_SIGNS = old


@contextlib.contextmanager
def arity_budget(n):
    global ARITY_BUDGET
    old = ARITY_BUDGET
    ARITY_BUDGET = n
    try:
        yield
    finally:
        ARITY_BUDGET = old


class Cochain:
    """Multilinear map inputs -> output of vertical degree vdeg.

    entries maps a key, a tuple of (degree, name) pairs picking one basis
    vector per input slot, to a sparse output vector over basis names; the
    output degree is the key degree sum plus vdeg and is not stored.
    """

    __slots__ = ("field", "inputs", "output", "vdeg", "entries")

    def __init__(self, field, inputs, output, vdeg: int, entries=None,
                 _checked=False):
        self.field = field
        self.inputs = tuple(inputs)
        self.output = output
        self.vdeg = vdeg
        ent = {}
        if entries:
            for key, img in entries.items():
                img = {k: v for k, v in img.items() if v}
                if img:
                    ent[tuple(key)] = img
        self.entries = ent
        if not _checked:
            self._validate()

    def _validate(self):
        for key, img in self.entries.items():
            if len(key) != len(self.inputs):
                raise GradedSpaceError(f"key arity {len(key)} != "
                                       f"{len(self.inputs)}")
            for (d, n), sp in zip(key, self.inputs):
                if not sp.has(d, n):
                    raise GradedSpaceError(
                        f"bad key entry {(d, n)} for space {sp.label}")
            odeg = sum(d for d, _ in key) + self.vdeg
            for n in img:
                if not self.output.has(odeg, n):
                    raise GradedSpaceError(
                        f"bad output {n!r} in degree {odeg}"
                        f" of {self.output.label}")

    # -- basic structure -------------------------------------------------

    @property
    def hdeg(self) -> int:
        return len(self.inputs)

    @property
    def total_deg(self) -> int:
        return len(self.inputs) + self.vdeg

    @property
    def sdeg(self) -> int:
        """Parity-relevant suspended degree: hdeg + vdeg - 1."""
        return len(self.inputs) + self.vdeg - 1

    def signature(self):
        return (tuple(sp.label for sp in self.inputs), self.output.label)

    def is_zero(self) -> bool:
        return not self.entries

    def __add__(self, other: "Cochain") -> "Cochain":
        self._check_same_type(other)
        f = self.field
        ent = {k: dict(v) for k, v in self.entries.items()}
        for key, img in other.entries.items():
            acc = ent.setdefault(key, {})
            for n, c in img.items():
                acc[n] = f.add(acc.get(n, f.zero()), c)
        return Cochain(f, self.inputs, self.output, self.vdeg, ent,
                       _checked=True)

    def scale(self, scalar) -> "Cochain":
        f = self.field
        ent = {k: {n: f.mul(c, scalar) for n, c in img.items()}
               for k, img in self.entries.items()}
        return Cochain(f, self.inputs, self.output, self.vdeg, ent,
                       _checked=True)

    def __sub__(self, other: "Cochain") -> "Cochain":
        return self + other.scale(self.field.neg(self.field.one()))

    def __neg__(self) -> "Cochain":
        return self.scale(self.field.neg(self.field.one()))

    def _check_same_type(self, other):
        if (not isinstance(other, Cochain)
                or other.vdeg != self.vdeg
                or other.output is not self.output
                or len(other.inputs) != len(self.inputs)
                or any(a is not b for a, b in zip(other.inputs, self.inputs))):
            raise GradedSpaceError("cochain sum across mismatched types")

    def __eq__(self, other):
        return (isinstance(other, Cochain)
                and other.vdeg == self.vdeg
                and other.output is self.output
                and len(other.inputs) == len(self.inputs)
                and all(a is b for a, b in zip(other.inputs, self.inputs))
                and other.entries == self.entries)

    def __repr__(self):
        ins = ",".join(sp.label for sp in self.inputs)
        return (f"<cochain ({ins})->{self.output.label} vdeg {self.vdeg},"
                f" {len(self.entries)} entries>")

    # -- evaluation --------------------------------------------------------

    def evaluate_basis(self, key) -> Vec:
        key = tuple(key)
        odeg = sum(d for d, _ in key) + self.vdeg
        return Vec(self.output, odeg, dict(self.entries.get(key, {})))

    def evaluate(self, args) -> Vec:
        """Multilinear extension to homogeneous vectors; no signs here."""
        if len(args) != len(self.inputs):
            raise GradedSpaceError("wrong argument count")
        for v, sp in zip(args, self.inputs):
            if v.space is not sp:
                raise GradedSpaceError("argument from wrong space")
        f = self.field
        odeg = sum(v.deg for v in args) + self.vdeg
        out = {}
        for combo in itertools.product(*[list(v.coeffs.items())
                                         for v in args]):
            key = tuple((v.deg, n) for v, (n, _) in zip(args, combo))
            img = self.entries.get(key)
            if not img:
                continue
            c = f.one()
            for _, coeff in combo:
                c = f.mul(c, coeff)
            for n, w in img.items():
                out[n] = f.add(out.get(n, f.zero()), f.mul(w, c))
        return Vec(self.output, odeg, out)

    # -- conversions -------------------------------------------------------

    @classmethod
    def from_graded_map(cls, m: GradedMap) -> "Cochain":
        ent = {}
        for i, col in m.blocks.items():
            for name, img in col.items():
                ent[((i, name),)] = dict(img)
        return cls(m.src.field, (m.src,), m.tgt, m.deg, ent, _checked=True)

    def to_graded_map(self) -> GradedMap:
        if len(self.inputs) != 1:
            raise GradedSpaceError("only unary cochains become maps")
        blocks = {}
        for ((d, n),), img in self.entries.items():
            blocks.setdefault(d, {})[n] = dict(img)
        return GradedMap(self.inputs[0], self.output, self.vdeg, blocks)

    @classmethod
    def zero_of(cls, field, inputs, output, vdeg) -> "Cochain":
        return cls(field, inputs, output, vdeg, {}, _checked=True)


def identity_cochain(space: GradedVectorSpace) -> Cochain:
    one = space.field.one()
    ent = {((d, n),): {n: one} for d, n in space.basis()}
    return Cochain(space.field, (space,), space, 0, ent, _checked=True)


# --- the insertion primitive ----------------------------------------------


def _bar_route_parity(key1, key2, i, s, t) -> int:
    """Independent sign derivation through suspension bookkeeping.

    Suspending an n-tuple weights slot j by (n-j) times the reduced degree;
    on the suspended side composition costs only the evaluation sign of the
    inner map against the passed prefix.  Converting back must reproduce the
    closed-form insertion sign.
    """
    p = len(key1)
    n = p + s - 1
    prefix = [d for d, _ in key1[:i - 1]]
    inner = [d for d, _ in key2]
    suffix = [d for d, _ in key1[i:]]
    full = prefix + inner + suffix
    sign_inner = (s + t - 1) * sum(d - 1 for d in prefix)
    phi_inner = sum((s - k) * (inner[k - 1] - 1) for k in range(1, s + 1))
    d_b = t + sum(inner)
    outer = prefix + [d_b] + suffix
    phi_outer = sum((p - j) * (outer[j - 1] - 1) for j in range(1, p + 1))
    phi_full = sum((n - j) * (full[j - 1] - 1) for j in range(1, n + 1))
    return (sign_inner + phi_inner + phi_outer + phi_full) % 2


def compose_signature(c1: Cochain, i: int, c2: Cochain):
    inputs = c1.inputs[:i - 1] + c2.inputs + c1.inputs[i:]
    return inputs, c1.output, c1.vdeg + c2.vdeg


def infinitesimal_compose(c1: Cochain, i: int, c2: Cochain) -> Cochain:
    """Insert c2 into slot i of c1 (slots are 1-based).

    Zero, with the composite signature, when the output space of c2 is not
    the space expected in slot i.  The sign on basis input x_1..x_{i-1},
    y_1..y_s, x_{i+1}..x_p is (-1) to the
    (s-1)(p-i) + t(p-1 + |x_1|+..+|x_{i-1}|), for c2 of arity s and
    vertical degree t.
    """
    p = len(c1.inputs)
    if not 1 <= i <= p:
        raise GradedSpaceError(f"slot {i} out of range 1..{p}")
    inputs, output, vdeg = compose_signature(c1, i, c2)
    if ARITY_BUDGET is not None and len(inputs) > ARITY_BUDGET:
        raise BudgetExceeded(len(inputs), ARITY_BUDGET)
    f = c1.field
    if c1.inputs[i - 1] is not c2.output:
        return Cochain.zero_of(f, inputs, output, vdeg)

    s, t = len(c2.inputs), c2.vdeg
    by_out = {}
    for key2, img2 in c2.entries.items():
        odeg = sum(d for d, _ in key2) + t
        for name, coeff in img2.items():
            by_out.setdefault((odeg, name), []).append((key2, coeff))

    static = (s - 1) * (p - i) + t * (p - 1)
    ent = {}
    for key1, img1 in c1.entries.items():
        hits = by_out.get(key1[i - 1])
        if not hits:
            continue
        elem = sum(d for d, _ in key1[:i - 1])
        parity = (static + t * elem) % 2
        sgn = f.sign_pow(parity)
        for key2, c2coeff in hits:
            if DEBUG_SIGNS:
                bar = _bar_route_parity(key1, key2, i, s, t)
                if bar != parity:
                    raise SignMismatch(
                        f"insertion sign {parity} vs suspension route {bar}"
                        f" at slot {i}, keys {key1} / {key2}")
            newkey = key1[:i - 1] + key2 + key1[i:]
            w = f.mul(sgn, c2coeff)
            acc = ent.setdefault(newkey, {})
            for name, c1coeff in img1.items():
                acc[name] = f.add(acc.get(name, f.zero()),
                                  f.mul(w, c1coeff))
    return Cochain(f, inputs, output, vdeg, ent, _checked=True)


# --- families ---------------------------------------------------------------


class CochainFamily:
    """Finite formal sum of cochains grouped by input/output signature."""

    __slots__ = ("field", "parts")

    def __init__(self, field, cochains=()):
        self.field = field
        self.parts = {}
        for c in cochains:
            self._accumulate(c)

    def _accumulate(self, c: Cochain):
        if c.is_zero():
            return
        sig = c.signature() + (c.vdeg,)
        if sig in self.parts:
            self.parts[sig] = self.parts[sig] + c
            if self.parts[sig].is_zero():
                del self.parts[sig]
        else:
            self.parts[sig] = c

    def cochains(self):
        return [self.parts[k] for k in sorted(self.parts)]

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.parts.values())

    def single(self) -> Cochain:
        cs = [c for c in self.parts.values() if not c.is_zero()]
        if len(cs) != 1:
            raise GradedSpaceError(f"family has {len(cs)} components, not 1")
        return cs[0]

    def __add__(self, other):
        other = as_family(other, self.field)
        out = CochainFamily(self.field, self.cochains())
        for c in other.cochains():
            out._accumulate(c)
        return out

    def scale(self, scalar):
        return CochainFamily(self.field,
                             [c.scale(scalar) for c in self.cochains()])

    def __sub__(self, other):
        other = as_family(other, self.field)
        return self + other.scale(self.field.neg(self.field.one()))

    def __eq__(self, other):
        if isinstance(other, Cochain):
            other = as_family(other, self.field)
        if not isinstance(other, CochainFamily):
            return NotImplemented
        return (self - other).is_zero()

    def __repr__(self):
        return f"<family of {len(self.parts)}: {self.cochains()!r}>"

    def total_parity(self) -> int:
        """Common parity of hdeg+vdeg across components; error if mixed."""
        ps = {c.total_deg % 2 for c in self.parts.values() if not c.is_zero()}
        if len(ps) > 1:
            raise GradedSpaceError("family mixes total parities")
        return ps.pop() if ps else 0


def as_family(x, field=None) -> CochainFamily:
    if isinstance(x, CochainFamily):
        return x
    if isinstance(x, Cochain):
        return CochainFamily(x.field, [x])
    raise TypeError(f"not a cochain or family: {x!r}")


def brace(c1, c2) -> CochainFamily:
    """Sum of all single insertions of components of c2 into c1."""
    f1, f2 = as_family(c1), as_family(c2)
    out = CochainFamily(f1.field)
    for a in f1.cochains():
        for b in f2.cochains():
            for i in range(1, len(a.inputs) + 1):
                out._accumulate(infinitesimal_compose(a, i, b))
    return out


def fill_brace(c: Cochain, args) -> Cochain:
    """Insert args left to right into consecutive slots, filling all of c.

    len(args) must equal the arity of c; the result is the brace of c with
    the full argument tuple.
    """
    if len(args) != len(c.inputs):
        raise GradedSpaceError("fill_brace needs one argument per slot")
    cur = c
    pos = 1
    for a in args:
        cur = infinitesimal_compose(cur, pos, a)
        pos += len(a.inputs)
    return cur


def mult_brace(m, c1: Cochain, c2: Cochain) -> Cochain:
    """Two-argument brace {m}{c1,c2} of a binary m, one per signature."""
    out = None
    for piece in as_family(m).cochains():
        if len(piece.inputs) != 2:
            continue
        val = fill_brace(piece, [c1, c2])
        out = val if out is None else out + val
    if out is None:
        raise GradedSpaceError("no binary component in multiplication")
    return out


def generic_differential(m, c) -> CochainFamily:
    """Differential of c against a degree-2 multiplication family m.

    The formula is {m}{c} - (-1)^{|c|-1} {c}{m}; every component of m must
    have odd suspended parity (total degree 2), which makes the sign depend
    only on c.
    """
    mf, cf = as_family(m), as_family(c)
    if mf.total_parity() != 0:
        raise GradedSpaceError("multiplication must have even total degree")
    sgn = mf.field.sign_pow(cf.total_parity() + 1)
    return brace(mf, cf) - brace(cf, mf).scale(sgn)


def family_bracket(c1, c2) -> CochainFamily:
    """Graded pre-Lie commutator of braces."""
    f1, f2 = as_family(c1), as_family(c2)
    sgn = f1.field.sign_pow((f1.total_parity() + 1) * (f2.total_parity() + 1))
    return brace(f1, f2) - brace(f2, f1).scale(sgn)


def family_sq(c) -> CochainFamily:
    """Brace square {c}{c}; the square only descends to cohomology for
    even total degree or characteristic two, so other inputs are rejected."""
    cf = as_family(c)
    if cf.field.char != 2 and cf.total_parity() != 0:
        raise GradedSpaceError("square needs even degree or char 2")
    return brace(cf, cf)


def cochain_units(inputs, output, vdeg: int):
    """Deterministic basis of the cochain space at one bidegree.

    Yields (key, output_name) pairs; a unit is the cochain sending that key
    to that output basis vector and all other keys to zero.
    """
    slots = [list(sp.basis()) for sp in inputs]
    for key in itertools.product(*slots):
        odeg = sum(d for d, _ in key) + vdeg
        for name in output.basis_of(odeg):
            yield (key, name)


def cochain_coords(c: Cochain) -> dict:
    out = {}
    for key, img in c.entries.items():
        for name, v in img.items():
            out[(key, name)] = v
    return out


def cochain_from_coords(field, inputs, output, vdeg, coords) -> Cochain:
    ent = {}
    for (key, name), v in coords.items():
        if v:
            ent.setdefault(tuple(key), {})[name] = v
    return Cochain(field, inputs, output, vdeg, ent)
