"""Exact Gaussian-rational arithmetic and row reduction."""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Sequence, Union

Number = Union[int, Fraction, "GaussianRational"]


class GaussianRational:
    """a + b i with a, b rational."""

    __slots__ = ("re", "im")

    def __init__(self, re: int | Fraction = 0, im: int | Fraction = 0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    @staticmethod
    def of(x: Number) -> "GaussianRational":
        if isinstance(x, GaussianRational):
            return x
        if isinstance(x, complex):
            raise TypeError("floating point complex values are not exact")
        return GaussianRational(x)

    def __add__(self, other: Number) -> "GaussianRational":
        o = GaussianRational.of(other)
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self) -> "GaussianRational":
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, other: Number) -> "GaussianRational":
        o = GaussianRational.of(other)
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other: Number) -> "GaussianRational":
        return GaussianRational.of(other) - self

    def __mul__(self, other: Number) -> "GaussianRational":
        o = GaussianRational.of(other)
        return GaussianRational(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def norm(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def inverse(self) -> "GaussianRational":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero")
        return GaussianRational(self.re / n, -self.im / n)

    def __truediv__(self, other: Number) -> "GaussianRational":
        return self * GaussianRational.of(other).inverse()

    def __rtruediv__(self, other: Number) -> "GaussianRational":
        return GaussianRational.of(other) * self.inverse()

    def conj(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def __bool__(self) -> bool:
        return bool(self.re) or bool(self.im)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = GaussianRational(other)
        if not isinstance(other, GaussianRational):
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self) -> int:
        return hash((self.re, self.im))

    def __repr__(self) -> str:
        return f"GaussianRational({format_entry(self)!r})"

    def __str__(self) -> str:
        return format_entry(self)


G = GaussianRational
ZERO = G(0)
ONE = G(1)
I = G(0, 1)

def _rational(t: str) -> Fraction:
    if not re.fullmatch(r"[+-]?\d+(/\d+)?", t):
        raise ValueError(f"bad rational {t!r}")
    return Fraction(t)


def parse_entry(text: str) -> GaussianRational:
    """Parse ``a/b+c/di``, ``-3``, ``2i``, ``-i``, ``1/2-3/4i``."""
    t = text.replace(" ", "")
    if not t:
        raise ValueError("empty entry")
    if not t.endswith("i"):
        return G(_rational(t))
    body = t[:-1]
    cut = max(body.rfind("+"), body.rfind("-"))
    real, imag = (body[:cut], body[cut:]) if cut > 0 else ("", body)
    if imag in ("", "+", "-"):
        imag += "1"
    return G(_rational(real) if real else 0, _rational(imag))


def format_entry(x: GaussianRational) -> str:
    if not x.im:
        return str(x.re)
    im = "" if abs(x.im) == 1 else str(abs(x.im))
    if not x.re:
        return ("-" if x.im < 0 else "") + im + "i"
    return f"{x.re}{'-' if x.im < 0 else '+'}{im}i"


def vec(*xs: Number) -> tuple[GaussianRational, ...]:
    return tuple(G.of(x) for x in xs)


def conj_vec(v: Sequence[GaussianRational]) -> tuple[GaussianRational, ...]:
    return tuple(x.conj() for x in v)


def inner(u: Sequence[GaussianRational], v: Sequence[GaussianRational]) -> GaussianRational:
    """<u, v>, conjugate-linear in the first argument."""
    acc = G(0)
    for a, b in zip(u, v):
        acc = acc + a.conj() * b
    return acc


def matvec(M: Sequence[Sequence[GaussianRational]], v: Sequence[GaussianRational]) -> tuple[GaussianRational, ...]:
    out = []
    for row in M:
        acc = G(0)
        for a, b in zip(row, v):
            acc = acc + a * b
        out.append(acc)
    return tuple(out)


def matmul(A: Sequence[Sequence[GaussianRational]], B: Sequence[Sequence[GaussianRational]]) -> list[list[GaussianRational]]:
    cols = list(zip(*B))
    return [[sum((a * b for a, b in zip(row, col)), G(0)) for col in cols] for row in A]


def transpose(M: Sequence[Sequence[GaussianRational]]) -> list[list[GaussianRational]]:
    return [list(c) for c in zip(*M)]


def conj_matrix(M: Sequence[Sequence[GaussianRational]]) -> list[list[GaussianRational]]:
    return [[x.conj() for x in row] for row in M]


def adjoint(M: Sequence[Sequence[GaussianRational]]) -> list[list[GaussianRational]]:
    return conj_matrix(transpose(M))


def kron(u: Sequence[GaussianRational], v: Sequence[GaussianRational]) -> tuple[GaussianRational, ...]:
    return tuple(a * b for a in u for b in v)


def kron_matrix(A: Sequence[Sequence[GaussianRational]], B: Sequence[Sequence[GaussianRational]]) -> list[list[GaussianRational]]:
    return [[a * b for a in ra for b in rb] for ra in A for rb in B]


def normalize(v: Sequence[GaussianRational]) -> tuple[GaussianRational, ...]:
    """Scale so that the first nonzero coordinate is 1."""
    for x in v:
        if x:
            inv = x.inverse()
            return tuple(y * inv for y in v)
    raise ValueError("zero vector")


def rref(rows: Iterable[Sequence[GaussianRational]], ncols: int) -> list[tuple[GaussianRational, ...]]:
    """Reduced row echelon form with zero rows dropped; canonical for the row space."""
    M = [list(G.of(x) for x in r) for r in rows]
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        pr = next((i for i in range(r, len(M)) if M[i][c]), None)
        if pr is None:
            continue
        M[r], M[pr] = M[pr], M[r]
        inv = M[r][c].inverse()
        M[r] = [x * inv for x in M[r]]
        for i in range(len(M)):
            if i != r and M[i][c]:
                f = M[i][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
        if r == len(M):
            break
    return [tuple(row) for row in M[:r]]


def pivot_columns(R: Sequence[Sequence[GaussianRational]]) -> list[int]:
    return [next(i for i, x in enumerate(row) if x) for row in R]


def rank(rows: Iterable[Sequence[GaussianRational]], ncols: int) -> int:
    return len(rref(rows, ncols))


def nullspace(rows: Sequence[Sequence[GaussianRational]], ncols: int) -> list[tuple[GaussianRational, ...]]:
    """Basis of {x : M x = 0}."""
    R = rref(rows, ncols)
    piv = pivot_columns(R)
    free = [c for c in range(ncols) if c not in piv]
    basis = []
    for f in free:
        x = [G(0)] * ncols
        x[f] = G(1)
        for row, p in zip(R, piv):
            x[p] = -row[f]
        basis.append(tuple(x))
    return basis


def solve_in_span(R: Sequence[Sequence[GaussianRational]], v: Sequence[GaussianRational]) -> tuple[GaussianRational, ...] | None:
    """Coefficients c with sum c_i R_i = v for an RREF basis R, or None."""
    piv = pivot_columns(R)
    coeffs = tuple(v[p] for p in piv)
    rest = list(v)
    for c, row in zip(coeffs, R):
        if c:
            rest = [a - c * b for a, b in zip(rest, row)]
    return coeffs if not any(rest) else None
