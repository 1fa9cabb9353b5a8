"""Exact sparse linear algebra over the coefficient fields.

Everything here works on sparse vectors (dicts keyed by arbitrary hashable
keys) together with an explicit ordered key list, so that pivot choices and
hence every representative the package ever prints are deterministic.
"""

from __future__ import annotations

from .fields import FieldSpec


class LinearError(ValueError):
    pass


def vec_add(f: FieldSpec, x: dict, y: dict) -> dict:
    out = dict(x)
    for k, v in y.items():
        s = f.add(out.get(k, f.zero()), v)
        if s:
            out[k] = s
        else:
            out.pop(k, None)
    return out


def vec_scale(f: FieldSpec, x: dict, c) -> dict:
    if not c:
        return {}
    return {k: f.mul(v, c) for k, v in x.items()}


def vec_sub(f: FieldSpec, x: dict, y: dict) -> dict:
    return vec_add(f, x, vec_scale(f, y, f.neg(f.one())))


class Echelon:
    """Reduced row echelon accumulator with optional coefficient tracking.

    Rows are sparse dicts over a fixed ordered key universe.  When tracking
    is on, each inserted row remembers its expression in terms of the
    originally inserted vectors, which turns membership tests into solves.
    """

    def __init__(self, field: FieldSpec, key_order, track=False):
        self.field = field
        self.key_index = {k: i for i, k in enumerate(key_order)}
        self.rows = []          # (pivot_key, row_dict, combo_dict | None)
        self.track = track
        self._n_inserted = 0

    def _pivot(self, row: dict):
        best = None
        for k in row:
            i = self.key_index[k]
            if best is None or i < best[0]:
                best = (i, k)
        return best[1] if best else None

    def reduce(self, row: dict, combo=None):
        """Eliminate row against the stored rows; returns (row, combo)."""
        f = self.field
        combo = dict(combo or {})
        row = dict(row)
        for pk, r, rc in self.rows:
            c = row.get(pk)
            if c:
                row = vec_sub(f, row, vec_scale(f, r, c))
                if self.track and rc is not None:
                    combo = vec_sub(f, combo, vec_scale(f, rc, c))
        return row, combo

    def insert(self, row: dict):
        """Insert a vector; returns (pivot_key or None, residual combo).

        pivot None means the vector was already in the span, and the combo
        expresses it in terms of previously inserted vectors (track only).
        """
        f = self.field
        tag = self._n_inserted
        self._n_inserted += 1
        combo = {tag: f.one()} if self.track else None
        row, combo = self.reduce(row, combo)
        pk = self._pivot(row)
        if pk is None:
            if self.track:
                # row == 0: tag-combination of earlier inserts equals this one
                neg = vec_scale(f, vec_sub(f, {}, combo), f.one())
                neg.pop(tag, None)
                return None, neg
            return None, None
        inv = f.inv(row[pk])
        row = vec_scale(f, row, inv)
        if self.track:
            combo = vec_scale(f, combo, inv)
        # back-substitute into existing rows to keep the basis reduced
        new_rows = []
        for opk, orow, ocombo in self.rows:
            c = orow.get(pk)
            if c:
                orow = vec_sub(f, orow, vec_scale(f, row, c))
                if self.track and ocombo is not None:
                    ocombo = vec_sub(f, ocombo, vec_scale(f, combo, c))
            new_rows.append((opk, orow, ocombo))
        new_rows.append((pk, row, combo))
        new_rows.sort(key=lambda t: self.key_index[t[0]])
        self.rows = new_rows
        return pk, combo

    def rank(self) -> int:
        return len(self.rows)

    def membership_combo(self, vec: dict):
        """Combination of inserted vectors equal to vec, or None.

        Requires track=True.  The returned dict maps insertion tags to
        coefficients.
        """
        if not self.track:
            raise LinearError("echelon built without tracking")
        f = self.field
        row, combo = self.reduce(vec, {})
        if row:
            return None
        return vec_scale(f, vec_sub(f, {}, combo), f.one())


class PivotEchelon:
    """Forward-only echelon keyed by pivot, for large sparse rank work.

    Unlike Echelon, inserted rows are reduced only on the way in (no back
    substitution) and pivot lookup is a dict access, so ranks of matrices
    with hundreds of thousands of near-triangular sparse columns stay
    affordable.  Keys must be mutually comparable; the minimum key of a
    row is its pivot.
    """

    __slots__ = ("field", "rows")

    def __init__(self, field: FieldSpec):
        self.field = field
        self.rows = {}          # pivot key -> row dict, normalized at pivot

    def reduce(self, row: dict):
        """Eliminate against stored pivots; returns (pivot or None, residual).

        pivot None means the row lies in the current span.  The residual is
        a linear function of the input for a fixed set of stored rows, so
        callers may use it as a deterministic projection modulo the span.
        """
        f = self.field
        row = {k: v for k, v in row.items() if v}
        while row:
            k = min(row)
            piv = self.rows.get(k)
            if piv is None:
                return k, row
            c = f.neg(row.pop(k))
            for kk, vv in piv.items():
                if kk == k:
                    continue
                s = f.add(row.get(kk, f.zero()), f.mul(c, vv))
                if s:
                    row[kk] = s
                else:
                    row.pop(kk, None)
        return None, row

    def insert(self, row: dict):
        """Insert a row; returns its pivot key, or None if dependent."""
        k, red = self.reduce(row)
        if k is None:
            return None
        inv = self.field.inv(red[k])
        self.rows[k] = {kk: self.field.mul(vv, inv) for kk, vv in red.items()}
        return k

    def rank(self) -> int:
        return len(self.rows)

    def contains(self, row: dict) -> bool:
        k, _ = self.reduce(row)
        return k is None


class BlockedEchelon:
    """Family of PivotEchelons split along an invariant of the column keys.

    block_of maps a coordinate key to a block id; every inserted column
    must be supported on a single block, which is checked, so the total
    rank is the sum of the block ranks.
    """

    def __init__(self, field: FieldSpec, block_of):
        self.field = field
        self.block_of = block_of
        self.blocks = {}

    def _block(self, row: dict):
        ids = {self.block_of(k) for k in row}
        if len(ids) != 1:
            raise LinearError("column crosses echelon blocks: %r" %
                              sorted(map(repr, ids)))
        return ids.pop()

    def insert(self, row: dict):
        if not row:
            return None
        b = self._block(row)
        ech = self.blocks.get(b)
        if ech is None:
            ech = self.blocks[b] = PivotEchelon(self.field)
        return ech.insert(row)

    def reduce(self, row: dict):
        if not row:
            return None, {}
        b = self._block(row)
        ech = self.blocks.get(b)
        if ech is None:
            return min(row), dict(row)
        return ech.reduce(row)

    def contains(self, row: dict) -> bool:
        k, _ = self.reduce(row)
        return k is None

    def rank(self) -> int:
        return sum(e.rank() for e in self.blocks.values())


def solve(field: FieldSpec, cols: dict, col_order, target: dict):
    """One solution x with sum_j x_j col_j = target, or None.

    Deterministic: echelonize columns in col_order; free variables are zero,
    so the answer is supported on the earliest spanning subset.
    """
    ech = Echelon(field, _key_universe(cols, target), track=True)
    inserted = []
    for ck in col_order:
        col = cols.get(ck, {})
        ech.insert(col)
        inserted.append(ck)
    combo = ech.membership_combo(target)
    if combo is None:
        return None
    return {inserted[tag]: c for tag, c in combo.items() if c}


def _key_universe(cols: dict, extra: dict | None = None):
    keys = []
    seen = set()
    for col in cols.values():
        for k in col:
            if k not in seen:
                seen.add(k)
                keys.append(k)
    if extra:
        for k in extra:
            if k not in seen:
                seen.add(k)
                keys.append(k)
    keys.sort(key=repr)
    return keys


def kernel_basis(field: FieldSpec, cols: dict, col_order):
    """Basis of {x : sum x_j col_j = 0}, reduced and deterministic."""
    ech = Echelon(field, _key_universe(cols), track=True)
    out = []
    for idx, ck in enumerate(col_order):
        pk, combo = ech.insert(cols.get(ck, {}))
        if pk is None:
            rel = {col_order[tag]: c for tag, c in combo.items() if c}
            rel[ck] = field.neg(field.one())
            out.append(vec_scale(field, rel, field.neg(field.one())))
    return out


def rank(field: FieldSpec, cols: dict, col_order) -> int:
    ech = Echelon(field, _key_universe(cols))
    for ck in col_order:
        ech.insert(cols.get(ck, {}))
    return ech.rank()


class SliceCohomology:
    """Kernel-mod-image data for one spot of a complex.

    d_in and d_out are given as column dicts over arbitrary key universes;
    mid_order fixes the basis order of the middle term.  Exposes dimensions,
    representatives, class coordinates and exactness witnesses.
    """

    def __init__(self, field: FieldSpec, d_in_cols: dict, d_in_order,
                 d_out_cols: dict, mid_order):
        self.field = field
        self.d_in_cols = d_in_cols
        self.d_in_order = list(d_in_order)
        self.mid_order = list(mid_order)
        self.cycle_basis = kernel_basis(field, d_out_cols, self.mid_order)

        self._bnd = Echelon(field, self.mid_order, track=True)
        self._bnd_cols = []
        for ck in self.d_in_order:
            col = d_in_cols.get(ck, {})
            pk, _ = self._bnd.insert(col)
            self._bnd_cols.append(ck)
        self.boundary_rank = self._bnd.rank()

        # survivors of the cycle basis modulo boundaries are the class reps
        probe = Echelon(field, self.mid_order)
        for _, row, _ in self._bnd.rows:
            probe.insert(row)
        self.reps = []
        for z in self.cycle_basis:
            pk, _ = probe.insert(z)
            if pk is not None:
                self.reps.append(z)

        # combined echelon for coordinates: reps first, boundaries after
        self._coords = Echelon(field, self.mid_order, track=True)
        for r in self.reps:
            self._coords.insert(r)
        for ck in self.d_in_order:
            self._coords.insert(d_in_cols.get(ck, {}))

    @property
    def dim(self) -> int:
        return len(self.reps)

    def is_cycle(self, vec: dict) -> bool:
        ech = Echelon(self.field, self.mid_order, track=True)
        for z in self.cycle_basis:
            ech.insert(z)
        return ech.membership_combo(vec) is not None

    def class_coords(self, vec: dict):
        """Coordinates of [vec] in the rep basis; vec must be a cycle."""
        combo = self._coords.membership_combo(vec)
        if combo is None:
            raise LinearError("vector is not in cycles + boundaries")
        return {tag: c for tag, c in combo.items() if tag < len(self.reps)}

    def is_exact(self, vec: dict):
        """Witness u with d_in(u) = vec, or None."""
        return solve(self.field, self.d_in_cols, self.d_in_order, vec)
