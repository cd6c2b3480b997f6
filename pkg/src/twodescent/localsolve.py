"""Solvability of y^2 = f(z) for integer quartics f, over R and over Q_p.

The p-adic decision runs a worklist of residue classes z = r (mod p^k).
A class is settled when one of these fires:

  (i)   f(r) = 0 exactly: a rational root, hence a point (r, 0).
  (ii)  val(f(r)) > 2*val(f'(r)): a Hensel root of f in Z_p nearby.
  (iii) with e = val(f(r)), k - e >= 1 (odd p) or >= 3 (p = 2): the
        square class of f on the whole residue class equals that of
        f(r), so is_padic_square(f(r), p) decides it.
  (iv)  otherwise the class splits into its p children at depth k + 1.

Depth is capped at val_p(disc f) + 6; reaching the cap raises, because
for nonzero discriminant the recursion must resolve earlier.  Points
with z outside Z_p are caught by running the reversed quartic
t^4 * f(1/t), whose t = 0 classes are the points at infinity.

Real solvability is decided exactly: positive leading coefficient, or a
real root detected by a Sturm chain on the squarefree part.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction

from .arith import is_padic_square, legendre, val

__all__ = [
    "LocalSolveError",
    "PrecisionExhausted",
    "QuarticForm",
    "Witness",
    "LocalVerdict",
    "poly_disc",
    "brute_mod_oracle",
    "zp_soluble",
    "qp_soluble",
    "r_soluble",
]

_NODE_BUDGET = 500_000


class LocalSolveError(ValueError):
    pass


class PrecisionExhausted(LocalSolveError):
    """Depth cap hit; must not happen for nonzero discriminant."""


def poly_disc(coeffs: tuple[int, ...]) -> int:
    """Discriminant of a polynomial of degree <= 4, coefficients descending."""
    cs = list(coeffs)
    while cs and cs[0] == 0:
        cs.pop(0)
    if len(cs) <= 1:
        raise LocalSolveError("discriminant needs degree >= 1")
    if len(cs) == 2:
        return 1
    if len(cs) == 3:
        a, b, c = cs
        return b * b - 4 * a * c
    if len(cs) == 4:
        a, b, c, d = cs
        return (
            18 * a * b * c * d - 4 * b**3 * d + b * b * c * c - 4 * a * c**3 - 27 * a * a * d * d
        )
    a, b, c, d, e = cs
    return (
        256 * a**3 * e**3
        - 192 * a * a * b * d * e * e
        - 128 * a * a * c * c * e * e
        + 144 * a * a * c * d * d * e
        - 27 * a * a * d**4
        + 144 * a * b * b * c * e * e
        - 6 * a * b * b * d * d * e
        - 80 * a * b * c * c * d * e
        + 18 * a * b * c * d**3
        + 16 * a * c**4 * e
        - 4 * a * c**3 * d * d
        - 27 * b**4 * e * e
        + 18 * b**3 * c * d * e
        - 4 * b**3 * d**3
        - 4 * b * b * c**3 * e
        + b * b * c * c * d * d
    )


@dataclass(frozen=True)
class QuarticForm:
    """f(z) = c[0]*z^4 + c[1]*z^3 + c[2]*z^2 + c[3]*z + c[4], integer c."""

    c: tuple[int, int, int, int, int]

    def __post_init__(self):
        if len(self.c) != 5:
            raise LocalSolveError("need exactly five coefficients")
        if all(v == 0 for v in self.c):
            raise LocalSolveError("the zero form has no model")

    @property
    def degree(self) -> int:
        for i, v in enumerate(self.c):
            if v != 0:
                return 4 - i
        raise LocalSolveError("zero form")

    def __call__(self, z):
        r = 0
        for v in self.c:
            r = r * z + v
        return r

    def deriv(self, z):
        c4, c3, c2, c1, _ = self.c
        return ((4 * c4 * z + 3 * c3) * z + 2 * c2) * z + c1

    def reverse(self) -> "QuarticForm":
        """t^4 * f(1/t): swaps z = 0 with the points at infinity."""
        return QuarticForm(tuple(reversed(self.c)))

    def disc(self) -> int:
        return poly_disc(self.c)

    def strip_square_content(self, p: int) -> "QuarticForm":
        """Divide out p^(2m); square scaling never changes a verdict."""
        m = min(val(v, p) for v in self.c if v != 0)
        t = p ** (2 * (m // 2))
        if t == 1:
            return self
        return QuarticForm(tuple(v // t for v in self.c))


@dataclass(frozen=True)
class Witness:
    kind: str  # "exact-root", "square-value", "hensel", "infinity", "real"
    z: Fraction | None
    note: str


@dataclass(frozen=True)
class LocalVerdict:
    soluble: bool
    witness: Witness | None

    def __bool__(self) -> bool:
        return self.soluble


_INSOLUBLE = LocalVerdict(False, None)


def brute_mod_oracle(f: QuarticForm, p: int, k: int) -> set[int]:
    """Residues r mod p^k with f(r) congruent to a square mod p^k.

    Exhaustive; test oracle only.  The modulus is capped at 10**7.
    """
    if k < 1:
        raise LocalSolveError("need k >= 1")
    pk = p**k
    if pk > 10**7:
        raise LocalSolveError("modulus too large for the brute oracle")
    squares = bytearray(pk)
    for w in range(pk // 2 + 1):
        squares[w * w % pk] = 1
    cs = [v % pk for v in f.c]
    out = set()
    for r in range(pk):
        acc = 0
        for v in cs:
            acc = (acc * r + v) % pk
        if squares[acc]:
            out.add(r)
    return out


def _settle_exact(f: QuarticForm, p: int, r: int, k: int, th: int):
    """Decide the class (r, k) from exact values, or return None to split."""
    v = f(r)
    if v == 0:
        return LocalVerdict(
            True, Witness("exact-root", Fraction(r), f"f({r}) = 0")
        )
    vd = f.deriv(r)
    if vd != 0 and val(v, p) > 2 * val(vd, p):
        return LocalVerdict(
            True,
            Witness("hensel", None, f"simple root of f in Z_{p} near {r} mod {p}^{k}"),
        )
    e = val(v, p)
    if k - e >= th:
        if is_padic_square(v, p):
            return LocalVerdict(
                True,
                Witness("square-value", Fraction(r), f"f({r}) is a square in Q_{p}"),
            )
        return _INSOLUBLE
    return None


def zp_soluble(f: QuarticForm, p: int) -> LocalVerdict:
    """Whether y^2 = f(z) has z in Z_p, y in Q_p."""
    if f.degree < 2:
        raise LocalSolveError("need degree >= 2")
    f = f.strip_square_content(p)
    disc = f.disc()
    if disc == 0:
        raise LocalSolveError("zero discriminant")
    cap = val(disc, p) + 6
    th = 3 if p == 2 else 1
    budget = _NODE_BUDGET
    work: deque[tuple[int, int]] = deque()

    if p > 2:
        # Depth-1 classes mod an odd p in machine arithmetic: a nonzero
        # residue decides by its quadratic character, only roots go deep.
        squares = bytearray(p)
        for w in range(p // 2 + 1):
            squares[w * w % p] = 1
        cs = [v % p for v in f.c]
        dead = True
        for r in range(p):
            acc = 0
            for v in cs:
                acc = (acc * r + v) % p
            if acc == 0:
                work.append((r, 1))
                dead = False
            elif squares[acc]:
                return LocalVerdict(
                    True,
                    Witness("square-value", Fraction(r), f"f({r}) is a square in Q_{p}"),
                )
        if dead and not work:
            return _INSOLUBLE
    else:
        work.append((0, 1))
        work.append((1, 1))

    while work:
        r, k = work.popleft()
        budget -= 1
        if budget <= 0:
            raise LocalSolveError("worklist budget exceeded")
        verdict = _settle_exact(f, p, r, k, th)
        if verdict is not None:
            if verdict.soluble:
                return verdict
            continue
        if k + 1 > cap:
            raise PrecisionExhausted(
                f"depth {k + 1} exceeds cap {cap} at p = {p}; nonzero discriminant "
                "should have resolved earlier"
            )
        step = p**k
        for j in range(p):
            work.append((r + j * step, k + 1))
    return _INSOLUBLE


def qp_soluble(f: QuarticForm, p: int) -> LocalVerdict:
    """Whether the smooth projective model of y^2 = f(z) has a Q_p point.

    z in Z_p via f itself, the rest via the reversed quartic; a reversed
    witness at t = 0 is one of the two points at infinity.
    """
    if f.degree != 4:
        raise LocalSolveError("need an honest quartic")
    v = zp_soluble(f, p)
    if v.soluble:
        return v
    w = zp_soluble(f.reverse(), p)
    if not w.soluble:
        return _INSOLUBLE
    wit = w.witness
    if wit.z is None:
        return LocalVerdict(True, Witness("hensel", None, "reversed form: " + wit.note))
    if wit.z == 0:
        return LocalVerdict(
            True,
            Witness("infinity", None, f"leading coefficient is a square in Q_{p}"),
        )
    return LocalVerdict(
        True, Witness(wit.kind, 1 / wit.z, "reversed form: " + wit.note)
    )


# ---------------------------------------------------------------------------
# Real place: exact sign analysis via Sturm chains.


def _poly_trim(cs: list[Fraction]) -> list[Fraction]:
    i = 0
    while i < len(cs) and cs[i] == 0:
        i += 1
    return cs[i:]


def _poly_divmod(num: list[Fraction], den: list[Fraction]):
    num = num[:]
    q: list[Fraction] = []
    while len(num) >= len(den):
        coef = num[0] / den[0]
        q.append(coef)
        for i in range(len(den)):
            num[i] -= coef * den[i]
        num.pop(0)
    return q, _poly_trim(num)


def _poly_deriv(cs: list[Fraction]) -> list[Fraction]:
    n = len(cs) - 1
    return [c * (n - i) for i, c in enumerate(cs[:-1])]


def _sturm_distinct_real_roots(cs: list[Fraction]) -> int:
    """Number of distinct real roots; expects a squarefree polynomial."""
    chain = [cs, _poly_trim(_poly_deriv(cs))]
    while chain[-1]:
        _, rem = _poly_divmod(chain[-2], chain[-1])
        if not rem:
            break
        chain.append([-c for c in rem])

    def changes(at_plus_inf: bool) -> int:
        signs = []
        for poly in chain:
            if not poly:
                continue
            s = 1 if poly[0] > 0 else -1
            if not at_plus_inf and (len(poly) - 1) % 2 == 1:
                s = -s
            signs.append(s)
        return sum(1 for a, b in zip(signs, signs[1:]) if a != b)

    return changes(False) - changes(True)


def r_soluble(f: QuarticForm) -> LocalVerdict:
    """Whether f takes a nonnegative real value."""
    if f.degree < 1:
        raise LocalSolveError("need degree >= 1")
    cs = _poly_trim([Fraction(v) for v in f.c])
    if cs[0] > 0:
        return LocalVerdict(
            True, Witness("real", None, "positive leading coefficient")
        )
    if (len(cs) - 1) % 2 == 1:
        return LocalVerdict(True, Witness("real", None, "odd degree"))
    # negative leading coefficient, even degree: need a real root
    deriv = _poly_trim(_poly_deriv(cs))
    g = cs
    if deriv:
        # squarefree part g = f / gcd(f, f')
        a, b = cs, deriv
        while b:
            _, r = _poly_divmod(a, b)
            a, b = b, r
        gcd = a
        if len(gcd) > 1:
            g, _ = _poly_divmod(cs, gcd)
    if _sturm_distinct_real_roots(g) > 0:
        return LocalVerdict(True, Witness("real", None, "real root"))
    return _INSOLUBLE
