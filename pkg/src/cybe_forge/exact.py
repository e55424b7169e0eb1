"""Exact scalar and polynomial arithmetic.

Scalars are arbitrary-precision rationals (``fractions.Fraction``, aliased
``Rat``).  ``UniPoly`` is a dense univariate polynomial, ``BiPoly`` a sparse
bivariate polynomial, and ``PoleForm`` an exact rational function whose
denominator is a monomial in the fixed basis ``u, v, u+v``:

    PoleForm  =  numerator(u, v) / (u^a * v^b * (u+v)^c)

The pole basis is fixed because every expression produced by substituting
operator-valued Laurent polynomials into the Yang-Baxter operator identity
lies in this localization; deciding equality-to-zero then reduces to a
polynomial zero test, with no rounding anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import TagMismatchError

Rat = Fraction


def rat_from_str(s: str) -> Fraction:
    return Fraction(str(s).strip())


def rat_to_str(r: Fraction) -> str:
    r = Fraction(r)
    return str(r)


@dataclass(frozen=True)
class UniPoly:
    """Dense univariate polynomial over Q with a variable tag."""

    coeffs: tuple[Fraction, ...]
    var: str = "u"

    @staticmethod
    def make(coeffs: Iterable[Fraction | int], var: str = "u") -> "UniPoly":
        cs = [Fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        return UniPoly(tuple(cs), var)

    @staticmethod
    def zero(var: str = "u") -> "UniPoly":
        return UniPoly((), var)

    @staticmethod
    def const(c: Fraction | int, var: str = "u") -> "UniPoly":
        return UniPoly.make([c], var)

    @staticmethod
    def x(var: str = "u") -> "UniPoly":
        return UniPoly.make([0, 1], var)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def _check(self, other: "UniPoly"):
        if self.var != other.var:
            raise TagMismatchError(f"variable tags differ: {self.var} vs {other.var}")

    def __add__(self, other: "UniPoly") -> "UniPoly":
        self._check(other)
        n = max(len(self.coeffs), len(other.coeffs))
        a = list(self.coeffs) + [Fraction(0)] * (n - len(self.coeffs))
        b = list(other.coeffs) + [Fraction(0)] * (n - len(other.coeffs))
        return UniPoly.make([x + y for x, y in zip(a, b)], self.var)

    def __sub__(self, other: "UniPoly") -> "UniPoly":
        return self + (-other)

    def __neg__(self) -> "UniPoly":
        return UniPoly(tuple(-c for c in self.coeffs), self.var)

    def __mul__(self, other: "UniPoly") -> "UniPoly":
        self._check(other)
        if self.is_zero() or other.is_zero():
            return UniPoly.zero(self.var)
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if not a:
                continue
            for j, b in enumerate(other.coeffs):
                if b:
                    out[i + j] += a * b
        return UniPoly.make(out, self.var)

    def scale(self, c: Fraction | int) -> "UniPoly":
        c = Fraction(c)
        return UniPoly.make([c * a for a in self.coeffs], self.var)

    def evaluate(self, point: Fraction | int) -> Fraction:
        point = Fraction(point)
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * point + c
        return acc

    def derivative(self) -> "UniPoly":
        return UniPoly.make(
            [i * c for i, c in enumerate(self.coeffs)][1:], self.var
        )

    def monic(self) -> "UniPoly":
        if self.is_zero():
            return self
        lead = self.coeffs[-1]
        return UniPoly.make([c / lead for c in self.coeffs], self.var)

    def divmod(self, other: "UniPoly") -> tuple["UniPoly", "UniPoly"]:
        self._check(other)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        div = other.coeffs
        dd = len(div) - 1
        if len(rem) - 1 < dd:
            return UniPoly.zero(self.var), self
        q = [Fraction(0)] * (len(rem) - dd)
        for k in range(len(rem) - 1, dd - 1, -1):
            f = rem[k] / div[-1]
            q[k - dd] = f
            if f:
                for j in range(dd + 1):
                    rem[k - dd + j] -= f * div[j]
        return UniPoly.make(q, self.var), UniPoly.make(rem[:dd], self.var)

    def gcd(self, other: "UniPoly") -> "UniPoly":
        a, b = self, other
        while not b.is_zero():
            a, b = b, a.divmod(b)[1]
        return a.monic()

    def squarefree_part(self) -> "UniPoly":
        if self.degree < 1:
            return self.monic()
        g = self.gcd(self.derivative())
        return self.divmod(g)[0].monic()

    def rational_roots(self) -> list[Fraction]:
        """All rational roots, each listed once, ascending."""
        if self.is_zero():
            raise ValueError("zero polynomial has every root")
        p = self.squarefree_part()
        roots = []
        cs = list(p.coeffs)
        k = 0
        while cs and cs[0] == 0:
            cs.pop(0)
            k += 1
        if k:
            roots.append(Fraction(0))
        if len(cs) <= 1:
            return sorted(roots)
        den = 1
        for c in cs:
            den = den * c.denominator // _int_gcd(den, c.denominator)
        ics = [int(c * den) for c in cs]
        for num in _divisors(abs(ics[0])):
            for q in _divisors(abs(ics[-1])):
                for cand in (Fraction(num, q), Fraction(-num, q)):
                    if cand not in roots and p.evaluate(cand) == 0:
                        roots.append(cand)
        return sorted(roots)


def _int_gcd(a: int, b: int) -> int:
    from math import gcd

    return gcd(a, b)


def _divisors(n: int) -> list[int]:
    if n == 0:
        return []
    out = set()
    d = 1
    while d * d <= n:
        if n % d == 0:
            out.add(d)
            out.add(n // d)
        d += 1
    return sorted(out)


class BiPoly:
    """Sparse bivariate polynomial: map (i, j) exponent pair -> coefficient."""

    __slots__ = ("coeffs", "vars")

    def __init__(self, coeffs: Mapping[tuple[int, int], Fraction], vars: tuple[str, str] = ("u", "v")):
        cleaned = {}
        for (i, j), c in coeffs.items():
            c = Fraction(c)
            if c:
                if i < 0 or j < 0:
                    raise ValueError("BiPoly exponents must be nonnegative")
                cleaned[(int(i), int(j))] = c
        object.__setattr__(self, "coeffs", cleaned)
        object.__setattr__(self, "vars", tuple(vars))

    def __setattr__(self, name, value):
        raise AttributeError("BiPoly is immutable")

    @staticmethod
    def zero(vars: tuple[str, str] = ("u", "v")) -> "BiPoly":
        return BiPoly({}, vars)

    @staticmethod
    def const(c: Fraction | int, vars: tuple[str, str] = ("u", "v")) -> "BiPoly":
        return BiPoly({(0, 0): Fraction(c)}, vars)

    @staticmethod
    def monomial(i: int, j: int, c: Fraction | int = 1, vars: tuple[str, str] = ("u", "v")) -> "BiPoly":
        return BiPoly({(i, j): Fraction(c)}, vars)

    def is_zero(self) -> bool:
        return not self.coeffs

    def _check(self, other: "BiPoly"):
        if self.vars != other.vars:
            raise TagMismatchError(f"variable tags differ: {self.vars} vs {other.vars}")

    def __add__(self, other: "BiPoly") -> "BiPoly":
        self._check(other)
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            out[e] = out.get(e, Fraction(0)) + c
        return BiPoly(out, self.vars)

    def __sub__(self, other: "BiPoly") -> "BiPoly":
        self._check(other)
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            out[e] = out.get(e, Fraction(0)) - c
        return BiPoly(out, self.vars)

    def __neg__(self) -> "BiPoly":
        return BiPoly({e: -c for e, c in self.coeffs.items()}, self.vars)

    def __mul__(self, other: "BiPoly") -> "BiPoly":
        self._check(other)
        out: dict[tuple[int, int], Fraction] = {}
        for (i, j), a in self.coeffs.items():
            for (k, l), b in other.coeffs.items():
                e = (i + k, j + l)
                out[e] = out.get(e, Fraction(0)) + a * b
        return BiPoly(out, self.vars)

    def scale(self, c: Fraction | int) -> "BiPoly":
        c = Fraction(c)
        return BiPoly({e: c * a for e, a in self.coeffs.items()}, self.vars)

    def evaluate(self, x: Fraction | int, y: Fraction | int) -> Fraction:
        x, y = Fraction(x), Fraction(y)
        acc = Fraction(0)
        for (i, j), c in self.coeffs.items():
            acc += c * x**i * y**j
        return acc

    def total_degree(self) -> int:
        return max((i + j for (i, j) in self.coeffs), default=-1)

    def divisible_by_first(self) -> bool:
        return all(i >= 1 for (i, _) in self.coeffs)

    def div_first(self) -> "BiPoly":
        return BiPoly({(i - 1, j): c for (i, j), c in self.coeffs.items()}, self.vars)

    def divisible_by_second(self) -> bool:
        return all(j >= 1 for (_, j) in self.coeffs)

    def div_second(self) -> "BiPoly":
        return BiPoly({(i, j - 1): c for (i, j), c in self.coeffs.items()}, self.vars)

    def div_sum(self) -> tuple["BiPoly", bool]:
        """Divide by (x + y); returns (quotient, remainder_is_zero)."""
        by_xdeg: dict[int, dict[int, Fraction]] = {}
        for (i, j), c in self.coeffs.items():
            by_xdeg.setdefault(i, {})[j] = c
        d = max(by_xdeg, default=-1)
        if d < 0:
            return BiPoly.zero(self.vars), True
        # synthetic division by (x - r) with r = -y over Q[y]
        quot: dict[tuple[int, int], Fraction] = {}
        carry: dict[int, Fraction] = {}
        for k in range(d, 0, -1):
            coef = dict(by_xdeg.get(k, {}))
            for j, c in carry.items():
                coef[j] = coef.get(j, Fraction(0)) + c
            for j, c in coef.items():
                if c:
                    quot[(k - 1, j)] = c
            carry = {j + 1: -c for j, c in coef.items() if c}
        rem = dict(by_xdeg.get(0, {}))
        for j, c in carry.items():
            rem[j] = rem.get(j, Fraction(0)) + c
        rem_zero = all(c == 0 for c in rem.values())
        return BiPoly(quot, self.vars), rem_zero

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, BiPoly)
            and self.vars == other.vars
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((self.vars, tuple(sorted(self.coeffs.items()))))

    def __repr__(self):
        if self.is_zero():
            return "0"
        u, v = self.vars
        parts = []
        for (i, j), c in sorted(self.coeffs.items()):
            mono = "".join(
                f"*{var}^{e}" for var, e in ((u, i), (v, j)) if e
            )
            parts.append(f"{c}{mono}")
        return " + ".join(parts)


def binomial_expand_sum(k: int, vars: tuple[str, str] = ("u", "v")) -> BiPoly:
    """The polynomial (x + y)^k for k >= 0."""
    from math import comb

    return BiPoly({(i, k - i): Fraction(comb(k, i)) for i in range(k + 1)}, vars)


class PoleForm:
    """Exact rational function numerator / (u^a * v^b * (u+v)^c), canonical."""

    __slots__ = ("numerator", "poles")

    def __init__(self, numerator: BiPoly, poles: tuple[int, int, int] = (0, 0, 0)):
        a, b, c = (int(p) for p in poles)
        if a < 0 or b < 0 or c < 0:
            raise ValueError("pole exponents must be nonnegative")
        num = numerator
        if num.is_zero():
            a = b = c = 0
        else:
            while a > 0 and num.divisible_by_first():
                num = num.div_first()
                a -= 1
            while b > 0 and num.divisible_by_second():
                num = num.div_second()
                b -= 1
            while c > 0:
                quot, exact = num.div_sum()
                if not exact:
                    break
                num = quot
                c -= 1
        object.__setattr__(self, "numerator", num)
        object.__setattr__(self, "poles", (a, b, c))

    def __setattr__(self, name, value):
        raise AttributeError("PoleForm is immutable")

    @staticmethod
    def zero() -> "PoleForm":
        return PoleForm(BiPoly.zero())

    @staticmethod
    def const(c: Fraction | int) -> "PoleForm":
        return PoleForm(BiPoly.const(c))

    @staticmethod
    def monomial(coeff: Fraction | int, u_exp: int = 0, v_exp: int = 0, sum_exp: int = 0) -> "PoleForm":
        """The term coeff * u^u_exp * v^v_exp * (u+v)^sum_exp, any exponent signs."""
        coeff = Fraction(coeff)
        if not coeff:
            return PoleForm.zero()
        num = BiPoly.monomial(max(u_exp, 0), max(v_exp, 0), coeff)
        if sum_exp > 0:
            num = num * binomial_expand_sum(sum_exp)
        poles = (max(-u_exp, 0), max(-v_exp, 0), max(-sum_exp, 0))
        return PoleForm(num, poles)

    def is_zero(self) -> bool:
        return self.numerator.is_zero()

    def __add__(self, other: "PoleForm") -> "PoleForm":
        return poleform_combine([(self, 1), (other, 1)])

    def __sub__(self, other: "PoleForm") -> "PoleForm":
        return poleform_combine([(self, 1), (other, -1)])

    def __neg__(self) -> "PoleForm":
        return PoleForm(-self.numerator, self.poles)

    def scale(self, c: Fraction | int) -> "PoleForm":
        c = Fraction(c)
        if not c:
            return PoleForm.zero()
        return PoleForm(self.numerator.scale(c), self.poles)

    def __mul__(self, other: "PoleForm") -> "PoleForm":
        a1, b1, c1 = self.poles
        a2, b2, c2 = other.poles
        return PoleForm(self.numerator * other.numerator, (a1 + a2, b1 + b2, c1 + c2))

    def evaluate(self, u: Fraction | int, v: Fraction | int) -> Fraction:
        u, v = Fraction(u), Fraction(v)
        if u == 0 or v == 0 or u + v == 0:
            raise ZeroDivisionError("evaluation point lies on a pole locus")
        a, b, c = self.poles
        return self.numerator.evaluate(u, v) / (u**a * v**b * (u + v) ** c)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, PoleForm)
            and self.poles == other.poles
            and self.numerator == other.numerator
        )

    def __hash__(self):
        return hash((self.poles, self.numerator))

    def __repr__(self):
        a, b, c = self.poles
        den = "".join(
            f"{s}^{e}" for s, e in (("u", a), ("v", b), ("(u+v)", c)) if e
        )
        return f"({self.numerator!r})" + (f"/{den}" if den else "")


def poleform_combine(terms: Sequence[tuple[PoleForm, int]]) -> PoleForm:
    """Signed sum of PoleForms over the common denominator, canonicalized."""
    live = [(p, s) for p, s in terms if not p.is_zero()]
    if not live:
        return PoleForm.zero()
    for p, _ in live:
        if p.numerator.vars != live[0][0].numerator.vars:
            raise TagMismatchError("mixed variable tags in poleform_combine")
    A = max(p.poles[0] for p, _ in live)
    B = max(p.poles[1] for p, _ in live)
    C = max(p.poles[2] for p, _ in live)
    vars = live[0][0].numerator.vars
    total = BiPoly.zero(vars)
    for p, sign in live:
        a, b, c = p.poles
        num = p.numerator
        if A - a:
            num = num * BiPoly.monomial(A - a, 0, 1, vars)
        if B - b:
            num = num * BiPoly.monomial(0, B - b, 1, vars)
        if C - c:
            num = num * binomial_expand_sum(C - c, vars)
        total = total + (num if sign >= 0 else -num)
    return PoleForm(total, (A, B, C))


def poleform_is_zero(p: PoleForm) -> bool:
    return p.is_zero()


# Fixed rational evaluation grid avoiding all pole loci for positive points.
EVAL_GRID: tuple[tuple[int, int], ...] = tuple(
    (u, v) for u in (1, 2, 3, 5, 7) for v in (1, 2, 3, 5, 7)
)


def eval_grid_is_zero(p: PoleForm) -> bool:
    return all(p.evaluate(u, v) == 0 for u, v in EVAL_GRID)


def substitute_shift(laurent: Mapping[int, Fraction], rule: str) -> PoleForm:
    """Promote a one-variable Laurent scalar sum(c_k * t^k) into two variables.

    ``rule`` picks the image of the variable: "u+v" (shift), "v" (rebinding
    to the second slot), or "u" (plain embedding).  Negative exponents land
    in the corresponding pole slot of the result.
    """
    if rule not in ("u+v", "v", "u"):
        raise ValueError(f"unknown substitution rule: {rule!r}")
    terms = []
    for k, c in laurent.items():
        if rule == "u+v":
            terms.append((PoleForm.monomial(c, sum_exp=k), 1))
        elif rule == "v":
            terms.append((PoleForm.monomial(c, v_exp=k), 1))
        else:
            terms.append((PoleForm.monomial(c, u_exp=k), 1))
    return poleform_combine(terms)
