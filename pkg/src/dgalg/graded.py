"""Graded vector spaces over an exact field: vectors, maps, signs, shifts.

Spaces carry named bases per integer degree and compare by identity, not by
shape; two spaces with the same dimensions are still different objects and
maps between mismatched spaces are type errors.  All sign conventions in the
package reduce to the one rule implemented by koszul_sign: moving a degree-i
symbol past a degree-j symbol costs (-1)^{ij}.
"""

from __future__ import annotations

import itertools

from .fields import FieldSpec

_label_counter = itertools.count()


class GradedSpaceError(ValueError):
    pass


class GradedVectorSpace:
    """Finitely supported collection of based components, one per degree."""

    __slots__ = ("field", "components", "label")

    def __init__(self, field: FieldSpec, components, label: str | None = None):
        self.field = field
        comp = {}
        for deg, names in components.items():
            names = tuple(names)
            if len(set(names)) != len(names):
                raise GradedSpaceError(f"duplicate basis names in degree {deg}")
            if names:
                comp[int(deg)] = names
        self.components = comp
        self.label = label if label is not None else f"V{next(_label_counter)}"

    def __repr__(self):
        dims = {d: len(n) for d, n in sorted(self.components.items())}
        return f"<space {self.label} dims={dims}>"

    def degrees(self):
        return sorted(self.components)

    def basis_of(self, deg: int):
        return self.components.get(deg, ())

    def dim(self, deg: int) -> int:
        return len(self.components.get(deg, ()))

    def total_dim(self) -> int:
        return sum(len(n) for n in self.components.values())

    def has(self, deg: int, name: str) -> bool:
        return name in self.components.get(deg, ())

    def basis(self):
        """All (degree, name) pairs, degree-then-name order."""
        for deg in sorted(self.components):
            for name in self.components[deg]:
                yield (deg, name)

    def basis_vec(self, deg: int, name: str) -> "Vec":
        if not self.has(deg, name):
            raise GradedSpaceError(f"no basis vector {name!r} in degree {deg}"
                                   f" of {self.label}")
        return Vec(self, deg, {name: self.field.one()})

    def zero_vec(self, deg: int) -> "Vec":
        return Vec(self, deg, {})


class Vec:
    """Homogeneous element: a sparse coordinate vector in one degree."""

    __slots__ = ("space", "deg", "coeffs")

    def __init__(self, space: GradedVectorSpace, deg: int, coeffs: dict):
        self.space = space
        self.deg = deg
        self.coeffs = {k: v for k, v in coeffs.items() if v}

    def is_zero(self) -> bool:
        return not self.coeffs

    def __add__(self, other: "Vec") -> "Vec":
        if other.space is not self.space or (other.deg != self.deg
                                             and other.coeffs and self.coeffs):
            raise GradedSpaceError("vector sum across spaces or degrees")
        f = self.space.field
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = f.add(out.get(k, f.zero()), v)
        return Vec(self.space, self.deg if self.coeffs else other.deg, out)

    def __sub__(self, other: "Vec") -> "Vec":
        return self + other.scale(self.space.field.neg(self.space.field.one()))

    def scale(self, scalar) -> "Vec":
        f = self.space.field
        return Vec(self.space, self.deg,
                   {k: f.mul(v, scalar) for k, v in self.coeffs.items()})

    def __eq__(self, other):
        return (isinstance(other, Vec) and other.space is self.space
                and (self.coeffs == other.coeffs)
                and (self.deg == other.deg or not self.coeffs))

    def __repr__(self):
        if not self.coeffs:
            return f"<0 in {self.space.label}^{self.deg}>"
        terms = " + ".join(f"{v}*{k}" for k, v in sorted(self.coeffs.items()))
        return f"<{terms} in {self.space.label}^{self.deg}>"


class GradedMap:
    """Degree-homogeneous linear map, stored as sparse blocks per degree.

    blocks[i][name] is the image of basis vector (i, name) as a coefficient
    dict over the target basis in degree i + deg.
    """

    __slots__ = ("src", "tgt", "deg", "blocks")

    def __init__(self, src, tgt, deg: int, blocks):
        self.src = src
        self.tgt = tgt
        self.deg = deg
        cleaned = {}
        for i, col in blocks.items():
            keep = {}
            for name, img in col.items():
                img = {k: v for k, v in img.items() if v}
                if img:
                    keep[name] = img
            if keep:
                cleaned[int(i)] = keep
        self.blocks = cleaned

    @classmethod
    def zero(cls, src, tgt, deg: int) -> "GradedMap":
        return cls(src, tgt, deg, {})

    @classmethod
    def identity(cls, space) -> "GradedMap":
        one = space.field.one()
        blocks = {d: {n: {n: one} for n in names}
                  for d, names in space.components.items()}
        return cls(space, space, 0, blocks)

    def apply(self, v: Vec) -> Vec:
        if v.space is not self.src:
            raise GradedSpaceError("map applied to vector from wrong space")
        f = self.src.field
        col = self.blocks.get(v.deg, {})
        out = {}
        for name, c in v.coeffs.items():
            for k, w in col.get(name, {}).items():
                out[k] = f.add(out.get(k, f.zero()), f.mul(w, c))
        return Vec(self.tgt, v.deg + self.deg, out)

    def apply_basis(self, deg: int, name: str) -> Vec:
        img = self.blocks.get(deg, {}).get(name, {})
        return Vec(self.tgt, deg + self.deg, dict(img))

    def compose(self, other: "GradedMap") -> "GradedMap":
        """self after other."""
        if other.tgt is not self.src:
            raise GradedSpaceError("composition across mismatched spaces")
        blocks = {}
        for i, col in other.blocks.items():
            new_col = {}
            for name in col:
                img = self.apply(other.apply_basis(i, name))
                if img.coeffs:
                    new_col[name] = img.coeffs
            if new_col:
                blocks[i] = new_col
        return GradedMap(other.src, self.tgt, self.deg + other.deg, blocks)

    def __add__(self, other: "GradedMap") -> "GradedMap":
        if (other.src is not self.src or other.tgt is not self.tgt
                or other.deg != self.deg):
            raise GradedSpaceError("map sum across mismatched types")
        f = self.src.field
        blocks = {i: {n: dict(img) for n, img in col.items()}
                  for i, col in self.blocks.items()}
        for i, col in other.blocks.items():
            dst = blocks.setdefault(i, {})
            for name, img in col.items():
                acc = dst.setdefault(name, {})
                for k, v in img.items():
                    acc[k] = f.add(acc.get(k, f.zero()), v)
        return GradedMap(self.src, self.tgt, self.deg, blocks)

    def scale(self, scalar) -> "GradedMap":
        f = self.src.field
        blocks = {i: {n: {k: f.mul(v, scalar) for k, v in img.items()}
                      for n, img in col.items()}
                  for i, col in self.blocks.items()}
        return GradedMap(self.src, self.tgt, self.deg, blocks)

    def __sub__(self, other: "GradedMap") -> "GradedMap":
        return self + other.scale(self.src.field.neg(self.src.field.one()))

    def is_zero(self) -> bool:
        return not self.blocks

    def __eq__(self, other):
        return (isinstance(other, GradedMap) and other.src is self.src
                and other.tgt is self.tgt and other.deg == self.deg
                and other.blocks == self.blocks)

    def __repr__(self):
        return (f"<map {self.src.label}->{self.tgt.label} deg {self.deg},"
                f" {sum(len(c) for c in self.blocks.values())} cols>")


def koszul_sign(perm, degrees) -> int:
    """Sign exponent parity for permuting homogeneous symbols.

    perm[k] is the original position of the symbol that lands in slot k;
    degrees are in original order.  Returns +1 or -1 as a plain int; callers
    convert via FieldSpec.sign_pow-style logic or multiply Fractions.
    """
    exp = 0
    n = len(perm)
    for k in range(n):
        for l in range(k + 1, n):
            if perm[k] > perm[l]:
                exp += degrees[perm[k]] * degrees[perm[l]]
    return -1 if exp % 2 else 1


def tensor_name(*parts) -> str:
    return "(" + ")(".join(f"{d}:{n}" for d, n in parts) + ")"


def tensor_space(spaces, label=None) -> GradedVectorSpace:
    """Tensor product with basis names recording factor degrees and names."""
    if not spaces:
        raise GradedSpaceError("empty tensor product not supported")
    field = spaces[0].field
    comps = {}
    for combo in itertools.product(*[list(s.basis()) for s in spaces]):
        deg = sum(d for d, _ in combo)
        comps.setdefault(deg, []).append(tensor_name(*combo))
    lab = label or "(" + "*".join(s.label for s in spaces) + ")"
    return GradedVectorSpace(field, comps, lab)


COMPLEX_SHIFT = "complex-shift"
VERTICAL_SHIFT = "vertical-shift"


def shift_space(space, n: int, kind=COMPLEX_SHIFT) -> GradedVectorSpace:
    """Degree shift: component in new degree i is the old component in i+n.

    Both shift kinds relabel the grading the same way; they differ in the
    signs their induced operations on maps and cochains pick up, which is
    handled where those operations live.  kind is recorded in the label.
    """
    if kind not in (COMPLEX_SHIFT, VERTICAL_SHIFT):
        raise GradedSpaceError(f"unknown shift kind {kind!r}")
    comps = {d - n: names for d, names in space.components.items()}
    mark = "[%d]" % n if kind == COMPLEX_SHIFT else "(%d)" % n
    return GradedVectorSpace(space.field, comps, space.label + mark)


def shift_map(f: GradedMap, n: int, src_shifted, tgt_shifted) -> GradedMap:
    """Conjugate by the shift, with sign (-1)^{n.|f|}.

    src_shifted and tgt_shifted must be shift_space results for the same n;
    in particular the shifted differential is (-1)^n times the old one.
    """
    sgn = f.src.field.sign_pow(n * f.deg)
    blocks = {}
    for i, col in f.blocks.items():
        blocks[i - n] = {name: {k: f.src.field.mul(v, sgn)
                                for k, v in img.items()}
                         for name, img in col.items()}
    return GradedMap(src_shifted, tgt_shifted, f.deg, blocks)


def dual_space(space) -> GradedVectorSpace:
    """Graded dual: component in degree i is dual to the old degree -i."""
    comps = {-d: names for d, names in space.components.items()}
    return GradedVectorSpace(space.field, comps, "D" + space.label)


def dual_map(f: GradedMap, src_dual, tgt_dual) -> GradedMap:
    """f*: (dual of tgt) -> (dual of src), f*(g) = (-1)^{|f||g|} g o f.

    src_dual must be dual_space(f.tgt) and tgt_dual dual_space(f.src).
    """
    fld = f.src.field
    blocks = {}
    for i, col in f.blocks.items():
        # basis functional over f.tgt in degree i+f.deg pulls back against
        # every source basis vector in degree i
        for name, img in col.items():
            for k, v in img.items():
                gdeg = -(i + f.deg)
                sgn = fld.sign_pow(f.deg * gdeg)
                dst = blocks.setdefault(gdeg, {}).setdefault(k, {})
                dst[name] = fld.add(dst.get(name, fld.zero()),
                                    fld.mul(sgn, v))
    return GradedMap(src_dual, tgt_dual, f.deg, blocks)


def eval_dual(space, g: Vec, v: Vec):
    """Pair a dual vector against a vector of the original space."""
    fld = space.field
    if g.deg + v.deg != 0:
        return fld.zero()
    out = fld.zero()
    for name, c in g.coeffs.items():
        if name in v.coeffs:
            out = fld.add(out, fld.mul(c, v.coeffs[name]))
    return out


def shuffle_shift_iso(u_deg: int, n: int, field: FieldSpec):
    """Sign moving a shift symbol of weight n past a degree-u_deg prefix.

    The underlying identification of u (x) shifted-v (x) w with the shift of
    u (x) v (x) w is the identity on names; only this sign appears.
    """
    return field.sign_pow(n * u_deg)
