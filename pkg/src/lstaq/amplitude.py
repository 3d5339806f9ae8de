"""Amplitude domains used on automaton leaves.

Three commutative semirings share the leaf-transition slot of an automaton:

* :class:`AlgebraicComplex` / :class:`AmplitudePoly` — exact complex numbers
  of the form ``(a + b*w + c*w^2 + d*w^3) / sqrt2^k`` with ``w = e^{i*pi/4}``,
  and polynomials over named complex variables with such coefficients.
* tag amplitudes — finite sets of term indices; addition is set union and
  multiplication set intersection, with the empty set as absorbing zero.
* :class:`ValAmp` — indexed families of boolean valuations recording, per
  term index, which of the term's inequality constraints have already been
  satisfied by the qubits seen so far.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce

from .errors import InternalError, UnboundComplexVarError

_OMEGA = cmath.exp(1j * cmath.pi / 4)
_SQRT2 = 2 ** 0.5


class ExactDivisionError(InternalError):
    """The divisor has no inverse in the ring Z[w, 1/sqrt2]."""


@dataclass(frozen=True)
class AlgebraicComplex:
    """An element of Z[w, 1/sqrt2] with w = e^{i*pi/4}, kept in canonical form.

    The value is ``(a + b*w + c*w^2 + d*w^3) / sqrt2^k``.  Canonical form
    means the numerator is not divisible by sqrt2 unless ``k == 0``, so two
    equal values always have identical components.  Construct through
    :meth:`make` (or the arithmetic operators), never by mutating fields.
    """

    a: int
    b: int
    c: int
    d: int
    k: int = 0

    @classmethod
    def make(cls, a: int, b: int, c: int, d: int, k: int = 0) -> "AlgebraicComplex":
        if k < 0:
            # Negative powers denote multiplication by sqrt2: fold them in.
            a, b, c, d = _mul_sqrt2((a, b, c, d), -k)
            k = 0
        # Divide numerator and sqrt2^k by sqrt2 while both allow it.
        while k > 0 and (a - c) % 2 == 0 and (b - d) % 2 == 0:
            a, b, c, d = (b - d) // 2, (a + c) // 2, (b + d) // 2, (c - a) // 2
            k -= 1
        if a == b == c == d == 0:
            k = 0
        return cls(a, b, c, d, k)

    @classmethod
    def from_int(cls, n: int) -> "AlgebraicComplex":
        return cls(n, 0, 0, 0, 0)

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other: "AlgebraicComplex") -> "AlgebraicComplex":
        k = max(self.k, other.k)
        x = _mul_sqrt2((self.a, self.b, self.c, self.d), k - self.k)
        y = _mul_sqrt2((other.a, other.b, other.c, other.d), k - other.k)
        return AlgebraicComplex.make(*(p + q for p, q in zip(x, y)), k)

    def __neg__(self) -> "AlgebraicComplex":
        return AlgebraicComplex(-self.a, -self.b, -self.c, -self.d, self.k)

    def __sub__(self, other: "AlgebraicComplex") -> "AlgebraicComplex":
        return self + (-other)

    def __mul__(self, other: "AlgebraicComplex") -> "AlgebraicComplex":
        num = _mul_omega_poly(
            (self.a, self.b, self.c, self.d), (other.a, other.b, other.c, other.d)
        )
        return AlgebraicComplex.make(*num, self.k + other.k)

    def __truediv__(self, other: "AlgebraicComplex") -> "AlgebraicComplex":
        if other.is_zero:
            raise ExactDivisionError("division by zero")
        u = (other.a, other.b, other.c, other.d)
        # Inverse via the three Galois conjugates: 1/u = conj_product / norm.
        p = _mul_omega_poly(_sigma3(u), _mul_omega_poly(_sigma5(u), _sigma7(u)))
        norm = _mul_omega_poly(u, p)
        assert norm[1] == norm[2] == norm[3] == 0
        n = norm[0]
        sign = 1 if n > 0 else -1
        n *= sign
        t = 0
        while n % 2 == 0:
            n //= 2
            t += 1
        if n != 1:
            raise ExactDivisionError(
                f"result of division is outside the ring (norm has odd factor {n})"
            )
        inv = AlgebraicComplex.make(*(sign * x for x in p), 2 * t - other.k)
        return self * inv

    def __pow__(self, n: int) -> "AlgebraicComplex":
        if n < 0:
            return AlgebraicComplex.from_int(1) / self ** (-n)
        out = AlgebraicComplex.from_int(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    # -- views --------------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return self.a == self.b == self.c == self.d == 0

    def to_complex(self) -> complex:
        num = self.a + self.b * _OMEGA + self.c * 1j + self.d * _OMEGA ** 3
        return num / _SQRT2 ** self.k

    def real_parts(self) -> tuple[Fraction, Fraction]:
        """Real part expressed exactly as ``p + q*sqrt2``."""
        return _scale_down(Fraction(self.a), Fraction(self.b - self.d, 2), self.k)

    def imag_parts(self) -> tuple[Fraction, Fraction]:
        """Imaginary part expressed exactly as ``p + q*sqrt2``."""
        return _scale_down(Fraction(self.c), Fraction(self.b + self.d, 2), self.k)

    def __str__(self) -> str:
        """Exact expression text for the constant, using 1, i and sqrt2.

        The eighth root of unity never appears: ``w = (1 + i)/sqrt2``, so
        the w and w^3 components fold into one Gaussian numerator over an
        extra power of sqrt2.  The result re-parses to the same value.
        """
        parts = []
        if self.a or self.c:
            parts.append(_over_sqrt2(_gaussian(self.a, self.c), self.k))
        if self.b or self.d:
            num = _gaussian(self.b, self.d)
            text = f"{num} * (1 + i)" if num != "1" else "(1 + i)"
            parts.append(_over_sqrt2(text, self.k + 1))
        if not parts:
            return "0"
        return " + ".join(parts)


def _gaussian(x: int, y: int) -> str:
    if y == 0:
        return str(x)
    itext = "i" if y == 1 else ("-i" if y == -1 else f"{y}*i")
    if x == 0:
        return itext
    return f"({x} + {itext})" if y > 0 else f"({x} - {itext.lstrip('-')})"


def _over_sqrt2(num: str, k: int) -> str:
    if k == 0:
        return num
    den = "sqrt2" if k == 1 else f"sqrt2^{k}"
    return f"{num}/{den}"


def _mul_sqrt2(num: tuple[int, int, int, int], times: int) -> tuple[int, int, int, int]:
    a, b, c, d = num
    for _ in range(times):
        a, b, c, d = b - d, a + c, b + d, c - a
    return a, b, c, d


def _mul_omega_poly(
    x: tuple[int, int, int, int], y: tuple[int, int, int, int]
) -> tuple[int, int, int, int]:
    out = [0, 0, 0, 0]
    for i, xi in enumerate(x):
        if not xi:
            continue
        for j, yj in enumerate(y):
            if not yj:
                continue
            e = i + j
            coef = xi * yj
            if e >= 4:
                e -= 4
                coef = -coef
            out[e] += coef
    return out[0], out[1], out[2], out[3]


def _sigma3(u: tuple[int, int, int, int]) -> tuple[int, int, int, int]:
    a, b, c, d = u
    return a, d, -c, b


def _sigma5(u: tuple[int, int, int, int]) -> tuple[int, int, int, int]:
    a, b, c, d = u
    return a, -b, c, -d


def _sigma7(u: tuple[int, int, int, int]) -> tuple[int, int, int, int]:
    a, b, c, d = u
    return a, -d, -c, -b


def _scale_down(p: Fraction, q: Fraction, k: int) -> tuple[Fraction, Fraction]:
    """Divide the value ``p + q*sqrt2`` by ``sqrt2^k`` within Q(sqrt2)."""
    half, odd = divmod(k, 2)
    scale = Fraction(1, 2 ** half)
    p, q = p * scale, q * scale
    if odd:
        p, q = q, p / 2
    return p, q


AC_ZERO = AlgebraicComplex.from_int(0)
AC_ONE = AlgebraicComplex.from_int(1)
AC_I = AlgebraicComplex(0, 0, 1, 0, 0)
AC_OMEGA = AlgebraicComplex(0, 1, 0, 0, 0)
AC_SQRT2 = AlgebraicComplex(0, 1, 0, -1, 0)
AC_INV_SQRT2 = AlgebraicComplex(1, 0, 0, 0, 1)


# ---------------------------------------------------------------------------
# Polynomials over named complex variables.
# ---------------------------------------------------------------------------

Monomial = tuple[tuple[str, int], ...]


@dataclass(frozen=True)
class AmplitudePoly:
    """Polynomial in named variables with :class:`AlgebraicComplex` coefficients.

    Stored as a sorted tuple of (monomial, coefficient) pairs with no zero
    coefficients, so structural equality is semantic equality.
    """

    terms: tuple[tuple[Monomial, AlgebraicComplex], ...] = ()

    @classmethod
    def const(cls, value: AlgebraicComplex) -> "AmplitudePoly":
        if value.is_zero:
            return cls(())
        return cls((((), value),))

    @classmethod
    def var(cls, name: str) -> "AmplitudePoly":
        return cls(((((name, 1),), AC_ONE),))

    @classmethod
    def from_int(cls, n: int) -> "AmplitudePoly":
        return cls.const(AlgebraicComplex.from_int(n))

    @classmethod
    def _from_dict(cls, d: dict[Monomial, AlgebraicComplex]) -> "AmplitudePoly":
        items = tuple(sorted((m, c) for m, c in d.items() if not c.is_zero))
        return cls(items)

    def __add__(self, other: "AmplitudePoly") -> "AmplitudePoly":
        acc = dict(self.terms)
        for mono, coef in other.terms:
            cur = acc.get(mono)
            acc[mono] = coef if cur is None else cur + coef
        return AmplitudePoly._from_dict(acc)

    def __neg__(self) -> "AmplitudePoly":
        return AmplitudePoly(tuple((m, -c) for m, c in self.terms))

    def __sub__(self, other: "AmplitudePoly") -> "AmplitudePoly":
        return self + (-other)

    def __mul__(self, other: "AmplitudePoly") -> "AmplitudePoly":
        acc: dict[Monomial, AlgebraicComplex] = {}
        for m1, c1 in self.terms:
            for m2, c2 in other.terms:
                mono = _merge_monomials(m1, m2)
                coef = c1 * c2
                cur = acc.get(mono)
                acc[mono] = coef if cur is None else cur + coef
        return AmplitudePoly._from_dict(acc)

    def __truediv__(self, other: "AmplitudePoly") -> "AmplitudePoly":
        if not other.is_constant:
            raise ExactDivisionError("division by a non-constant amplitude")
        inv = AC_ONE / other.constant_value
        return AmplitudePoly(tuple((m, c * inv) for m, c in self.terms))

    def __pow__(self, n: int) -> "AmplitudePoly":
        if n < 0:
            if not self.is_constant:
                raise ExactDivisionError("negative power of a non-constant amplitude")
            return AmplitudePoly.const(self.constant_value ** n)
        return reduce(
            lambda x, y: x * y, [self] * n, AmplitudePoly.from_int(1)
        )

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def is_constant(self) -> bool:
        return all(m == () for m, _ in self.terms)

    @property
    def constant_value(self) -> AlgebraicComplex:
        if not self.terms:
            return AC_ZERO
        assert self.is_constant
        return self.terms[0][1]

    def variables(self) -> frozenset[str]:
        return frozenset(name for mono, _ in self.terms for name, _ in mono)

    def substitute(self, theta: dict[str, AlgebraicComplex]) -> "AmplitudePoly":
        """Replace every variable using ``theta``; the result is constant."""
        out = AC_ZERO
        for mono, coef in self.terms:
            val = coef
            for name, exp in mono:
                if name not in theta:
                    raise UnboundComplexVarError(name)
                val = val * theta[name] ** exp
            out = out + val
        return AmplitudePoly.const(out)

    def to_complex(self, theta: dict[str, complex] | None = None) -> complex:
        out = 0j
        for mono, coef in self.terms:
            val = coef.to_complex()
            for name, exp in mono:
                if theta is None or name not in theta:
                    raise UnboundComplexVarError(name)
                val *= theta[name] ** exp
            out += val
        return out

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for mono, coef in self.terms:
            factors = [] if mono and coef == AC_ONE else [str(coef)]
            for name, exp in mono:
                factors.append(name if exp == 1 else f"{name}^{exp}")
            parts.append(" * ".join(factors))
        return " + ".join(parts)


def _merge_monomials(m1: Monomial, m2: Monomial) -> Monomial:
    acc: dict[str, int] = {}
    for name, exp in m1 + m2:
        acc[name] = acc.get(name, 0) + exp
    return tuple(sorted(acc.items()))


POLY_ZERO = AmplitudePoly(())
POLY_ONE = AmplitudePoly.from_int(1)


# ---------------------------------------------------------------------------
# Tag amplitudes: subsets of term indices.
# ---------------------------------------------------------------------------

TagAmp = frozenset
TAG_ZERO: frozenset[int] = frozenset()


def tag(*indices: int) -> frozenset[int]:
    return frozenset(indices)


def tag_add(x: frozenset[int], y: frozenset[int]) -> frozenset[int]:
    return x | y


def tag_mul(x: frozenset[int], y: frozenset[int]) -> frozenset[int]:
    return x & y


# ---------------------------------------------------------------------------
# Valuation amplitudes.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ValAmp:
    """A family ``{f_m}`` of boolean valuations indexed by term number.

    Each entry maps a term index ``m`` to a tuple of booleans aligned with
    that term's ordered inequality-constraint list.  Addition unions the
    index sets, combining colliding entries by pointwise disjunction;
    multiplication intersects the index sets, again with pointwise
    disjunction.  The empty family is the absorbing zero.
    """

    entries: tuple[tuple[int, tuple[bool, ...]], ...] = ()

    @classmethod
    def of(cls, mapping: dict[int, tuple[bool, ...]]) -> "ValAmp":
        return cls(tuple(sorted(mapping.items())))

    @property
    def is_zero(self) -> bool:
        return not self.entries

    def as_dict(self) -> dict[int, tuple[bool, ...]]:
        return dict(self.entries)

    def __str__(self) -> str:
        if not self.entries:
            return "{}"
        bits = ",".join(
            "f%d[%s]" % (m, "".join("T" if b else "F" for b in f))
            for m, f in self.entries
        )
        return "{%s}" % bits


VAL_ZERO = ValAmp(())


def _val_or(f: tuple[bool, ...], g: tuple[bool, ...]) -> tuple[bool, ...]:
    if len(f) != len(g):
        raise InternalError(
            "valuation amplitudes disagree on a constraint-list length"
        )
    return tuple(x or y for x, y in zip(f, g))


def valamp_add(x: ValAmp, y: ValAmp) -> ValAmp:
    acc = x.as_dict()
    for m, f in y.entries:
        acc[m] = _val_or(acc[m], f) if m in acc else f
    return ValAmp.of(acc)


def valamp_mul(x: ValAmp, y: ValAmp) -> ValAmp:
    ys = y.as_dict()
    acc = {m: _val_or(f, ys[m]) for m, f in x.entries if m in ys}
    return ValAmp.of(acc)


# ---------------------------------------------------------------------------
# Semiring descriptors: one object per leaf-amplitude domain.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Semiring:
    name: str

    @property
    def zero(self):
        return {"complex": POLY_ZERO, "tag": TAG_ZERO, "valuation": VAL_ZERO}[self.name]

    def add(self, x, y):
        if self.name == "tag":
            return tag_add(x, y)
        if self.name == "valuation":
            return valamp_add(x, y)
        return x + y

    def mul(self, x, y):
        if self.name == "tag":
            return tag_mul(x, y)
        if self.name == "valuation":
            return valamp_mul(x, y)
        return x * y

    def is_zero(self, x) -> bool:
        if self.name == "tag":
            return not x
        return x.is_zero

    def render(self, x) -> str:
        if self.name == "tag":
            return "t0" if not x else "+".join(f"t{i}" for i in sorted(x))
        return str(x)

    def variables(self, x) -> frozenset[str]:
        if self.name == "complex":
            return x.variables()
        return frozenset()


COMPLEX = Semiring("complex")
TAG = Semiring("tag")
VALUATION = Semiring("valuation")


# ---------------------------------------------------------------------------
# Exact arithmetic in Q(sqrt2), used to evaluate amplitude comparisons.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class QSqrt2:
    """The real field Q(sqrt2): values ``p + q*sqrt2`` with exact sign tests."""

    p: Fraction
    q: Fraction = Fraction(0)

    @classmethod
    def of(cls, p) -> "QSqrt2":
        return cls(Fraction(p))

    def __add__(self, o: "QSqrt2") -> "QSqrt2":
        return QSqrt2(self.p + o.p, self.q + o.q)

    def __sub__(self, o: "QSqrt2") -> "QSqrt2":
        return QSqrt2(self.p - o.p, self.q - o.q)

    def __neg__(self) -> "QSqrt2":
        return QSqrt2(-self.p, -self.q)

    def __mul__(self, o: "QSqrt2") -> "QSqrt2":
        return QSqrt2(self.p * o.p + 2 * self.q * o.q, self.p * o.q + self.q * o.p)

    def __truediv__(self, o: "QSqrt2") -> "QSqrt2":
        norm = o.p * o.p - 2 * o.q * o.q
        if norm == 0:
            raise ZeroDivisionError("division by zero in Q(sqrt2)")
        conj = QSqrt2(o.p / norm, -o.q / norm)
        return self * conj

    @property
    def sign(self) -> int:
        if self.p == 0 and self.q == 0:
            return 0
        if self.p >= 0 and self.q >= 0:
            return 1
        if self.p <= 0 and self.q <= 0:
            return -1
        big = self.p * self.p > 2 * self.q * self.q
        return (1 if big else -1) * (1 if self.p > 0 else -1)

    def __lt__(self, o: "QSqrt2") -> bool:
        return (self - o).sign < 0

    def __le__(self, o: "QSqrt2") -> bool:
        return (self - o).sign <= 0

    def to_float(self) -> float:
        return float(self.p) + float(self.q) * _SQRT2
