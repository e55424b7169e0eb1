"""Finite-dimensional algebras over Q as structure-constant tensors.

``StructureAlgebra`` is a plain bilinear algebra (no axioms imposed);
``LieAlgebra`` adds the Lie layer: validation of antisymmetry and the Jacobi
identity, adjoint maps, the Killing form and its conjugation, centroid
computation, root decomposition with respect to a supplied Cartan basis,
and enumeration of closed symmetric root subsystems.

Builders cover the classical ``sl_n`` family (2 <= n <= 6), abelian
algebras, direct sums, full matrix algebras, and raw structure constants.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from . import qlinalg as ql
from .errors import (
    DecompositionError,
    DimensionMismatchError,
    EnumerationBudgetError,
    SingularFormError,
)
from .exact import UniPoly
from .qlinalg import QBilinear, QMat, QVec
from .reports import Report

SUBSYSTEM_PAIR_BUDGET = 12


class StructureAlgebra:
    """Bilinear algebra given by sparse products of basis pairs."""

    def __init__(self, dim: int, labels: Sequence[str], products: Mapping[tuple[int, int], QVec]):
        if len(labels) != dim:
            raise DimensionMismatchError("label count differs from dimension")
        self.dim = dim
        self.labels = tuple(labels)
        self.products = {
            key: vec for key, vec in products.items() if not vec.is_zero()
        }
        for (i, j), vec in self.products.items():
            if not (0 <= i < dim and 0 <= j < dim) or vec.n != dim:
                raise DimensionMismatchError("structure entry out of range")
        self._bilinear: QBilinear | None = None
        self._left_mats: dict[int, QMat] = {}

    def product_basis(self, i: int, j: int) -> QVec:
        vec = self.products.get((i, j))
        return vec if vec is not None else QVec.zero(self.dim)

    def _get_bilinear(self) -> QBilinear:
        if self._bilinear is None:
            terms = []
            for (i, j), vec in sorted(self.products.items()):
                for k in vec.nonzero_indices():
                    terms.append((i, j, k, vec[k]))
            self._bilinear = QBilinear(self.dim, terms)
        return self._bilinear

    def product(self, x: QVec, y: QVec) -> QVec:
        if x.n != self.dim or y.n != self.dim:
            raise DimensionMismatchError("element size differs from algebra dimension")
        return self._get_bilinear().apply(x, y)

    def left_mul_basis(self, i: int) -> QMat:
        """Matrix of x -> basis_i * x (cached)."""
        mat = self._left_mats.get(i)
        if mat is None:
            mat = QMat.from_cols(
                [self.product_basis(i, j) for j in range(self.dim)]
            )
            self._left_mats[i] = mat
        return mat

    def left_mul(self, x: QVec) -> QMat:
        cols = [self.product(x, QVec.unit(self.dim, j)) for j in range(self.dim)]
        return QMat.from_cols(cols)

    def unit_vec(self, i: int) -> QVec:
        return QVec.unit(self.dim, i)


class LieAlgebra(StructureAlgebra):
    """Structure-constant algebra with the Lie toolbox attached."""

    def __init__(self, dim, labels, products):
        super().__init__(dim, labels, products)
        self._killing: QMat | None = None
        self._killing_inv: QMat | None = None

    bracket = StructureAlgebra.product

    def ad_basis(self, i: int) -> QMat:
        return self.left_mul_basis(i)

    def ad(self, x: QVec) -> QMat:
        return self.left_mul(x)

    def validate(self) -> Report:
        report = Report()
        anti_witness = None
        for i in range(self.dim):
            for j in range(i, self.dim):
                lhs = self.product_basis(i, j)
                rhs = self.product_basis(j, i)
                if lhs != -rhs:
                    anti_witness = {
                        "pair": (i, j),
                        "labels": (self.labels[i], self.labels[j]),
                    }
                    break
            if anti_witness:
                break
        report.add("antisymmetry", anti_witness is None, anti_witness)
        jac_witness = None
        for i, j, k in combinations(range(self.dim), 3):
            s = (
                self.product(self.product_basis(i, j), self.unit_vec(k))
                + self.product(self.product_basis(j, k), self.unit_vec(i))
                + self.product(self.product_basis(k, i), self.unit_vec(j))
            )
            if not s.is_zero():
                jac_witness = {
                    "triple": (i, j, k),
                    "labels": (self.labels[i], self.labels[j], self.labels[k]),
                    "value": [str(f) for f in s.fractions()],
                }
                break
        report.add("jacobi", jac_witness is None, jac_witness)
        return report

    def killing_gram(self) -> QMat:
        if self._killing is None:
            ads = [self.ad_basis(i) for i in range(self.dim)]
            rows = []
            for i in range(self.dim):
                a = ads[i]
                row = []
                for j in range(self.dim):
                    b = ads[j]
                    acc = 0
                    for r in range(self.dim):
                        arow = a.rows[r]
                        for c in range(self.dim):
                            x = arow[c]
                            if x:
                                y = b.rows[c][r]
                                if y:
                                    acc += x * y
                    row.append(Fraction(acc, a.den * b.den))
                rows.append(row)
            self._killing = QMat.from_fractions(rows)
        return self._killing

    def killing_pair(self, x: QVec, y: QVec) -> Fraction:
        return x.dot(self.killing_gram().apply(y))

    def _killing_inverse(self) -> QMat:
        if self._killing_inv is None:
            try:
                self._killing_inv = ql.inverse(self.killing_gram())
            except SingularFormError:
                raise SingularFormError("Killing form is degenerate")
        return self._killing_inv

    def killing_adjoint(self, p: QMat) -> QMat:
        """The conjugate p* with <p x, y> = <x, p* y> for the Killing form."""
        if p.nrows != self.dim or p.ncols != self.dim:
            raise DimensionMismatchError("operator size differs from algebra dimension")
        gram = self.killing_gram()
        return self._killing_inverse() @ p.transpose() @ gram

    def is_semisimple(self) -> bool:
        try:
            self._killing_inverse()
            return True
        except SingularFormError:
            return False

    def centroid_basis(self) -> list[QMat]:
        """Basis of {T : T[x,y] = [Tx,y] = [x,Ty]}, deterministic order.

        For antisymmetric products both conditions reduce to T commuting
        with every ad(basis_i); the commutant is intersected incrementally.
        """
        n = self.dim
        basis: list[QMat] | None = None
        for i in range(n):
            a = self.ad_basis(i)
            if basis is None:
                rows = []
                for r in range(n):
                    for c in range(n):
                        # row of the operator T -> a T - T a at output slot (r, c)
                        row = [Fraction(0)] * (n * n)
                        for k in range(n):
                            row[k * n + c] += a.entry(r, k)
                            row[r * n + k] -= a.entry(k, c)
                        rows.append(row)
                kernel = ql.nullspace(QMat.from_fractions(rows))
                basis = [_unflatten(v, n) for v in kernel]
            else:
                if not basis:
                    return []
                cols = [_flatten(a @ b - b @ a) for b in basis]
                coeffs = ql.nullspace(QMat.from_cols(cols))
                basis = [_combine(basis, c) for c in coeffs]
        if basis is None:
            return []
        # canonical output: RREF of the flattened span
        flat, _ = ql.rref_rows([_flatten(b) for b in basis], n * n)
        return [_unflatten(v, n) for v in flat]


def _flatten(m: QMat) -> QVec:
    return QVec(m.den, (a for row in m.rows for a in row))


def _unflatten(v: QVec, n: int) -> QMat:
    return QMat(v.den, [v.nums[i * n : (i + 1) * n] for i in range(n)], ncols=n)


def _combine(mats: Sequence[QMat], coeffs: QVec) -> QMat:
    out = QMat.zeros(mats[0].nrows, mats[0].ncols)
    for m, c in zip(mats, coeffs.fractions()):
        if c:
            out = out + m.scale(c)
    return out


# ---------------------------------------------------------------------------
# builders


def from_structure(dim: int, labels: Sequence[str], entries: Mapping[tuple[int, int], QVec]) -> LieAlgebra:
    return LieAlgebra(dim, labels, dict(entries))


def abelian_algebra(dim: int, labels: Sequence[str] | None = None) -> LieAlgebra:
    if labels is None:
        labels = [f"z{i+1}" for i in range(dim)]
    return LieAlgebra(dim, labels, {})


def _traceless_diag_coords(diag: Sequence[Fraction], n: int) -> list[Fraction]:
    """Coordinates of diag (sum zero) in the basis H_i = E_ii - E_{i+1,i+1}."""
    coords = []
    acc = Fraction(0)
    for k in range(n - 1):
        acc += diag[k]
        coords.append(acc)
    return coords


def build_sl(n: int) -> tuple[LieAlgebra, "RootDatum"]:
    """sl_n over Q: Cartan H_i = E_ii - E_{i+1,i+1} first, then the E_ij
    sorted by root functional; structure constants from matrix commutators."""
    if not 2 <= n <= 6:
        raise ValueError("build_sl supports 2 <= n <= 6")
    rank = n - 1
    offdiag = [(i, j) for i in range(n) for j in range(n) if i != j]

    def functional(pos):
        i, j = pos
        return tuple(
            Fraction((1 if i == k else 0) - (1 if i == k + 1 else 0)
                     - (1 if j == k else 0) + (1 if j == k + 1 else 0))
            for k in range(rank)
        )

    offdiag.sort(key=functional)
    dim = rank + len(offdiag)
    labels = [f"h{k+1}" for k in range(rank)] + [f"e{i+1}{j+1}" for i, j in offdiag]

    def as_matrix(idx) -> list[list[Fraction]]:
        m = [[Fraction(0)] * n for _ in range(n)]
        if idx < rank:
            m[idx][idx] = Fraction(1)
            m[idx + 1][idx + 1] = Fraction(-1)
        else:
            i, j = offdiag[idx - rank]
            m[i][j] = Fraction(1)
        return m

    def to_coords(m: Sequence[Sequence[Fraction]]) -> QVec:
        diag = [m[i][i] for i in range(n)]
        coords = _traceless_diag_coords(diag, n)
        for i, j in offdiag:
            coords.append(m[i][j])
        return QVec.from_fractions(coords)

    mats = [as_matrix(idx) for idx in range(dim)]
    products: dict[tuple[int, int], QVec] = {}
    for a in range(dim):
        for b in range(dim):
            ma, mb = mats[a], mats[b]
            comm = [
                [
                    sum(ma[i][k] * mb[k][j] - mb[i][k] * ma[k][j] for k in range(n))
                    for j in range(n)
                ]
                for i in range(n)
            ]
            vec = to_coords(comm)
            if not vec.is_zero():
                products[(a, b)] = vec

    g = LieAlgebra(dim, labels, products)
    cartan = [QVec.unit(dim, k) for k in range(rank)]
    rd = root_decomposition(g, cartan)
    return g, rd


def matrix_associative_algebra(n: int) -> StructureAlgebra:
    """Full matrix algebra gl_n with its associative product, basis E_ij
    in row-major order."""
    dim = n * n
    labels = [f"E{i+1}{j+1}" for i in range(n) for j in range(n)]
    products: dict[tuple[int, int], QVec] = {}
    for a in range(dim):
        i, j = divmod(a, n)
        for b in range(dim):
            k, l = divmod(b, n)
            if j == k:
                products[(a, b)] = QVec.unit(dim, i * n + l)
    return StructureAlgebra(dim, labels, products)


def commutator_lie(alg: StructureAlgebra) -> LieAlgebra:
    """The Lie algebra on the same space with bracket x*y - y*x."""
    products: dict[tuple[int, int], QVec] = {}
    for i in range(alg.dim):
        for j in range(alg.dim):
            vec = alg.product_basis(i, j) - alg.product_basis(j, i)
            if not vec.is_zero():
                products[(i, j)] = vec
    return LieAlgebra(alg.dim, alg.labels, products)


def direct_sum(a: LieAlgebra, b: LieAlgebra) -> LieAlgebra:
    dim = a.dim + b.dim
    labels = [f"s0.{l}" for l in a.labels] + [f"s1.{l}" for l in b.labels]
    products: dict[tuple[int, int], QVec] = {}
    for (i, j), vec in a.products.items():
        products[(i, j)] = QVec(vec.den, tuple(vec.nums) + (0,) * b.dim)
    for (i, j), vec in b.products.items():
        products[(i + a.dim, j + a.dim)] = QVec(vec.den, (0,) * a.dim + tuple(vec.nums))
    return LieAlgebra(dim, labels, products)


# ---------------------------------------------------------------------------
# root data


@dataclass(frozen=True)
class RootDatum:
    """Root decomposition of an algebra relative to a fixed Cartan basis.

    ``roots[i]`` is the tuple of values of the i-th root on the Cartan basis;
    ``root_vectors[i]`` spans its (one-dimensional) root space and
    ``coroots[i] = [x_root, x_{-root}]``.
    """

    algebra: LieAlgebra
    cartan: tuple[QVec, ...]
    roots: tuple[tuple[Fraction, ...], ...]
    root_vectors: tuple[QVec, ...]
    coroots: tuple[QVec, ...]

    @property
    def n_roots(self) -> int:
        return len(self.roots)

    def negative_index(self, i: int) -> int:
        target = tuple(-x for x in self.roots[i])
        return self.roots.index(target)

    def root_index(self, functional: tuple[Fraction, ...]) -> int | None:
        try:
            return self.roots.index(functional)
        except ValueError:
            return None


def _restricted_matrix(op: QMat, basis: list[QVec], span_mat: QMat) -> QMat:
    cols = []
    for b in basis:
        img = op.apply(b)
        sol = ql.solve(span_mat, img)
        if sol is None:
            raise DecompositionError("operator does not preserve a joint eigenspace")
        cols.append(sol)
    return QMat.from_cols(cols)


def root_decomposition(g: LieAlgebra, cartan: Sequence[QVec]) -> RootDatum:
    """Simultaneous eigenspace decomposition of {ad h : h in cartan}.

    Requires the Cartan basis to be abelian and to act diagonalizably with
    rational eigenvalues; nonzero joint weights must have one-dimensional
    eigenspaces (these are the roots).
    """
    cartan = list(cartan)
    for i, h in enumerate(cartan):
        for h2 in cartan[i:]:
            if not g.bracket(h, h2).is_zero():
                raise DecompositionError("supplied Cartan basis is not abelian")
    spaces: list[tuple[list[QVec], tuple[Fraction, ...]]] = [
        ([QVec.unit(g.dim, i) for i in range(g.dim)], ())
    ]
    for h in cartan:
        adh = g.ad(h)
        refined: list[tuple[list[QVec], tuple[Fraction, ...]]] = []
        for basis, weights in spaces:
            span_mat = QMat.from_cols(basis)
            small = _restricted_matrix(adh, basis, span_mat)
            poly = UniPoly.make(ql.char_poly_coeffs(small), "t")
            found = 0
            for lam in poly.rational_roots():
                shifted = small - QMat.identity(small.nrows).scale(lam)
                for coeff in ql.nullspace(shifted):
                    vec = QVec.zero(g.dim)
                    for b, c in zip(basis, coeff.fractions()):
                        if c:
                            vec = vec + b.scale(c)
                    refined.append(([vec], weights + (lam,)))
                    found += 1
            # group same-eigenvalue vectors back into joint subspaces
            merged: dict[tuple[Fraction, ...], list[QVec]] = {}
            cut = len(refined) - found
            for basis2, w2 in refined[cut:]:
                merged.setdefault(w2, []).extend(basis2)
            refined = refined[:cut] + [(bs, w) for w, bs in sorted(merged.items())]
            dim_sum = sum(len(bs) for bs, _ in refined[cut:])
            if dim_sum != len(basis):
                raise DecompositionError(
                    "Cartan action is not diagonalizable with rational eigenvalues"
                )
        spaces = refined
    roots: list[tuple[Fraction, ...]] = []
    vectors: list[QVec] = []
    for basis, weights in spaces:
        if all(w == 0 for w in weights):
            continue
        if len(basis) != 1:
            raise DecompositionError("root space is not one-dimensional")
        roots.append(weights)
        vectors.append(_normalize_first_one(basis[0]))
    order = sorted(range(len(roots)), key=lambda i: roots[i])
    roots = [roots[i] for i in order]
    vectors = [vectors[i] for i in order]
    for r in roots:
        if tuple(-x for x in r) not in roots:
            raise DecompositionError("roots do not come in opposite pairs")
    coroots = []
    for i, r in enumerate(roots):
        j = roots.index(tuple(-x for x in r))
        coroots.append(g.bracket(vectors[i], vectors[j]))
    return RootDatum(g, tuple(cartan), tuple(roots), tuple(vectors), tuple(coroots))


def _normalize_first_one(v: QVec) -> QVec:
    for i in range(v.n):
        if v.nums[i]:
            return v.scale(Fraction(v.den, v.nums[i]))
    return v


@dataclass(frozen=True)
class RootSubsystem:
    """Symmetric closed subset of roots with its irreducible components."""

    members: tuple[int, ...]
    components: tuple[tuple[int, ...], ...]

    @property
    def n_components(self) -> int:
        return len(self.components)


def _root_sum_index(rd: RootDatum, i: int, j: int) -> int | None:
    s = tuple(x + y for x, y in zip(rd.roots[i], rd.roots[j]))
    if all(x == 0 for x in s):
        return None
    return rd.root_index(s)


def is_closed_symmetric(rd: RootDatum, members: Iterable[int]) -> bool:
    mset = set(members)
    for i in mset:
        if rd.negative_index(i) not in mset:
            return False
    for i in mset:
        for j in mset:
            s = _root_sum_index(rd, i, j)
            if s is not None and s not in mset:
                return False
    return True


def _components(rd: RootDatum, members: tuple[int, ...]) -> tuple[tuple[int, ...], ...]:
    mset = set(members)
    adj: dict[int, set[int]] = {i: set() for i in members}
    for i in members:
        for j in members:
            if i >= j:
                continue
            linked = rd.algebra.killing_pair(rd.coroots[i], rd.coroots[j]) != 0
            if not linked:
                s = _root_sum_index(rd, i, j)
                d = _root_sum_index(rd, i, rd.negative_index(j))
                linked = (s in mset and s is not None) or (d in mset and d is not None)
            if linked:
                adj[i].add(j)
                adj[j].add(i)
    seen: set[int] = set()
    comps = []
    for i in members:
        if i in seen:
            continue
        stack = [i]
        comp = set()
        while stack:
            k = stack.pop()
            if k in comp:
                continue
            comp.add(k)
            stack.extend(adj[k] - comp)
        seen |= comp
        comps.append(tuple(sorted(comp)))
    return tuple(sorted(comps))


def enumerate_closed_symmetric(rd: RootDatum) -> list[RootSubsystem]:
    """All symmetric closed subsets of the root system, deterministic order.

    Brute force over sign-pair indicator vectors; refuses instances with
    more than SUBSYSTEM_PAIR_BUDGET opposite pairs.
    """
    pairs = []
    seen: set[int] = set()
    for i in range(rd.n_roots):
        if i in seen:
            continue
        j = rd.negative_index(i)
        pairs.append((i, j))
        seen.add(i)
        seen.add(j)
    if len(pairs) > SUBSYSTEM_PAIR_BUDGET:
        raise EnumerationBudgetError(
            f"{len(pairs)} root pairs exceeds the enumeration budget of "
            f"{SUBSYSTEM_PAIR_BUDGET}"
        )
    sum_table: dict[tuple[int, int], int | None] = {}
    out = []
    masks = sorted(range(1 << len(pairs)), key=lambda m: (bin(m).count("1"), m))
    for mask in masks:
        members = []
        for k, (i, j) in enumerate(pairs):
            if mask >> k & 1:
                members.extend((i, j))
        members = tuple(sorted(members))
        mset = set(members)
        ok = True
        for i in members:
            for j in members:
                key = (i, j)
                if key not in sum_table:
                    sum_table[key] = _root_sum_index(rd, i, j)
                s = sum_table[key]
                if s is not None and s not in mset:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            out.append(RootSubsystem(members, _components(rd, members)))
    return out
