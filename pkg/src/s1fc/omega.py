"""Zero-temperature two-point calculus.

At zero temperature the two-point function depends on the difference of its
arguments only.  Integer shifts of the kernel reduce through the difference
equation  w(x+1) + w(x) = p(x) - phi(x),  p(x) = pi/(2 sin pi x),  together
with evenness of w and oddness of p; the phi parts cancel inside every
dressed kernel entry, leaving three atom families:

    p(x_ij)        odd, with the exact Laurent series in pi^2
    w(x_ij + k)    the even kernel atom (k = 0 after reduction; must
                   cancel from observables)
    s              the coincident-argument kernel value (must cancel too)

Expressions are polynomials in these atoms with rational-function
coefficients in the spectral variables.  The explicit solution of the
difference equation is never constructed: observables are exactly the
combinations from which every w atom cancels.
"""

from __future__ import annotations

from fractions import Fraction
from math import factorial

from .errors import PoleAtZ, ResidualOmega
from .exact import LaurentSeries, PiPoly, Poly, RationalFunction

__all__ = [
    "phi_value",
    "phi_ratfunc",
    "p_unit_series",
    "p_series_at",
    "OmegaExpr",
    "omega_reduce",
    "assert_omega_cancellation",
    "kernel_entry",
    "expand_homogeneous",
]


def phi_value(z: Fraction) -> Fraction:
    """phi(z) = (1/4)(-3/(z+1) - 1/(z-1) + 3/z + 1/(z+2))."""
    z = Fraction(z)
    if z in (-2, -1, 0, 1):
        raise PoleAtZ(f"phi has a pole at z = {z}")
    return (
        Fraction(-3, 1) / (z + 1)
        - Fraction(1, 1) / (z - 1)
        + Fraction(3, 1) / z
        + Fraction(1, 1) / (z + 2)
    ) / 4


def phi_ratfunc(nvars: int, i: int, j: int, shift: int = 0) -> RationalFunction:
    """phi(lambda_i - lambda_j + shift) as a rational function."""
    z = RationalFunction.variable(nvars, i) - RationalFunction.variable(nvars, j) + shift
    quarter = Fraction(1, 4)
    return (
        (-3) / (z + 1) - 1 / (z - 1) + 3 / z + 1 / (z + 2)
    ) * quarter


_P_CACHE: dict[int, LaurentSeries] = {}


def p_unit_series(prec: int) -> LaurentSeries:
    """Laurent series of p(t) = pi/(2 sin pi t) to O(t^prec).

    Derived by inverting sin(pi t)/(pi t) = sum (-1)^k (pi t)^(2k)/(2k+1)!,
    whose pi-dependence enters only through even powers.
    """
    if prec in _P_CACHE:
        return _P_CACHE[prec]
    m = prec + 3
    coeffs = []
    for k in range(0, m // 2 + 1):
        coeffs.append(PiPoly.pi_power(2 * k, Fraction((-1) ** k, factorial(2 * k + 1))))
        coeffs.append(PiPoly())
    base = LaurentSeries.from_coeffs(0, coeffs[: m + 1], m + 1)
    inv = base.invert()
    half = LaurentSeries.monomial(PiPoly.constant(Fraction(1, 2)), -1, prec + 2)
    result = (inv * half).truncate(prec)
    _P_CACHE[prec] = result
    return result


def p_series_at(direction, prec: int) -> LaurentSeries:
    """Series of p(t*d) in t for a fixed direction value d != 0."""
    unit = p_unit_series(prec + 2)
    coeffs = []
    offset = unit.offset
    dpow = direction ** offset if offset >= 0 else 1 / (direction ** (-offset))
    for idx, c in enumerate(unit.coeffs):
        coeffs.append(c.map_coeffs(lambda v: v * dpow) if isinstance(c, PiPoly) else c * dpow)
        dpow = dpow * direction
    return LaurentSeries.from_coeffs(offset, coeffs, prec)


# -- atom algebra ------------------------------------------------------------

# atoms: ("p", i, j), ("om", i, j, shift) with i < j, and ("ss",)
Atom = tuple


def _canonical_atom(kind: str, i: int, j: int, shift: int = 0) -> tuple[Atom, int]:
    """Canonicalize an atom for argument x = lambda_i - lambda_j + shift.

    p is odd with p(x+k) = (-1)^k p(x); w is even, so flipping the sites
    negates the shift.  Returns (atom, sign).
    """
    if i == j:
        raise ValueError("atom needs distinct sites")
    if kind == "p":
        sign = -1 if shift % 2 else 1
        if i < j:
            return ("p", i, j), sign
        return ("p", j, i), -sign
    if i < j:
        return ("om", i, j, shift), 1
    return ("om", j, i, -shift), 1


class OmegaExpr:
    """Polynomial in two-point atoms over RationalFunction coefficients."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int):
        self.nvars = nvars
        self.terms: dict[tuple[Atom, ...], RationalFunction] = {}

    @classmethod
    def constant(cls, nvars: int, value) -> "OmegaExpr":
        out = cls(nvars)
        coeff = (
            value
            if isinstance(value, RationalFunction)
            else RationalFunction.constant(nvars, value)
        )
        out._add_term((), coeff)
        return out

    @classmethod
    def atom(cls, nvars: int, kind: str, i: int, j: int, coeff=1, shift: int = 0) -> "OmegaExpr":
        out = cls(nvars)
        a, sign = _canonical_atom(kind, i, j, shift)
        c = (
            coeff
            if isinstance(coeff, RationalFunction)
            else RationalFunction.constant(nvars, coeff)
        )
        out._add_term((a,), c * sign)
        return out

    @classmethod
    def same_site(cls, nvars: int, coeff=1) -> "OmegaExpr":
        out = cls(nvars)
        c = (
            coeff
            if isinstance(coeff, RationalFunction)
            else RationalFunction.constant(nvars, coeff)
        )
        out._add_term((("ss",),), c)
        return out

    def _add_term(self, mono: tuple[Atom, ...], coeff: RationalFunction):
        if coeff.is_zero():
            return
        mono = tuple(sorted(mono))
        if mono in self.terms:
            total = self.terms[mono] + coeff
            if total.is_zero():
                del self.terms[mono]
            else:
                self.terms[mono] = total
        else:
            self.terms[mono] = coeff

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other):
        if not isinstance(other, OmegaExpr):
            other = OmegaExpr.constant(self.nvars, other)
        out = OmegaExpr(self.nvars)
        out.terms = dict(self.terms)
        for mono, coeff in other.terms.items():
            out._add_term(mono, coeff)
        return out

    __radd__ = __add__

    def __neg__(self):
        out = OmegaExpr(self.nvars)
        out.terms = {m: -c for m, c in self.terms.items()}
        return out

    def __sub__(self, other):
        if not isinstance(other, OmegaExpr):
            other = OmegaExpr.constant(self.nvars, other)
        return self + (-other)

    def __mul__(self, other):
        out = OmegaExpr(self.nvars)
        if not isinstance(other, OmegaExpr):
            factor = (
                other
                if isinstance(other, RationalFunction)
                else RationalFunction.constant(self.nvars, other)
            )
            for mono, coeff in self.terms.items():
                out._add_term(mono, coeff * factor)
            return out
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                out._add_term(tuple(sorted(m1 + m2)), c1 * c2)
        return out

    __rmul__ = __mul__

    def coefficient(self, mono: tuple[Atom, ...]) -> RationalFunction:
        return self.terms.get(
            tuple(sorted(mono)), RationalFunction.constant(self.nvars, 0)
        )

    def residual_atoms(self) -> "OmegaExpr":
        """Terms containing unreduced w or coincident-argument atoms."""
        out = OmegaExpr(self.nvars)
        for mono, coeff in self.terms.items():
            if any(a[0] in ("om", "ss") for a in mono):
                out._add_term(mono, coeff)
        return out

    def assert_reduced(self, context: str = ""):
        bad = self.residual_atoms()
        if not bad.is_zero():
            raise ResidualOmega(
                f"unreduced two-point atoms survive{': ' + context if context else ''}: "
                + ", ".join(str(m) for m in bad.terms)
            )

    def __eq__(self, other):
        if not isinstance(other, OmegaExpr):
            other = OmegaExpr.constant(self.nvars, other)
        return (self - other).is_zero()

    def __repr__(self):
        if not self.terms:
            return "0"
        bits = []
        for mono in sorted(self.terms):
            name = "*".join(_atom_name(a) for a in mono)
            bits.append(f"({self.terms[mono]!r})" + (f"*{name}" if name else ""))
        return " + ".join(bits)


def _atom_name(a: Atom) -> str:
    if a[0] == "ss":
        return "s"
    if a[0] == "p":
        return f"p({a[1]},{a[2]})"
    kind, i, j, shift = a
    arg = f"{i},{j}"
    if shift:
        arg += f"{shift:+d}"
    return f"w({arg})"


def omega_reduce(expr: OmegaExpr) -> OmegaExpr:
    """Eliminate every shifted kernel atom w(x+k), k != 0.

    Repeatedly applies  w(x+1) = p(x) - phi(x) - w(x)  (and, for negative
    shifts,  w(x-1) = -p(x) - phi(x-1) - w(x), using p(x-1) = -p(x)) until
    only base-shift atoms remain.  The shift magnitude drops by one per
    step, so the rewriting terminates.
    """
    nvars = expr.nvars
    current = expr
    while True:
        target = None
        for mono in current.terms:
            for a in mono:
                if a[0] == "om" and a[3] != 0:
                    target = (mono, a)
                    break
            if target:
                break
        if target is None:
            return current
        mono, atom = target
        _, i, j, k = atom
        if k > 0:
            # w(x+k) = p(x+k-1) - phi(x+k-1) - w(x+k-1)
            replacement = (
                OmegaExpr.atom(nvars, "p", i, j, shift=k - 1)
                - OmegaExpr.constant(nvars, phi_ratfunc(nvars, i, j, k - 1))
                - OmegaExpr.atom(nvars, "om", i, j, shift=k - 1)
            )
        else:
            # w(x+k) = p(x+k) - phi(x+k) - w(x+k+1)
            replacement = (
                OmegaExpr.atom(nvars, "p", i, j, shift=k)
                - OmegaExpr.constant(nvars, phi_ratfunc(nvars, i, j, k))
                - OmegaExpr.atom(nvars, "om", i, j, shift=k + 1)
            )
        rest = list(mono)
        rest.remove(atom)
        coeff = current.terms[mono]
        partial = OmegaExpr(nvars)
        partial._add_term(tuple(rest), coeff)
        delta = partial * replacement
        remainder = OmegaExpr(nvars)
        remainder.terms = {m: c for m, c in current.terms.items() if m != mono}
        current = remainder + delta


def assert_omega_cancellation(expr: OmegaExpr, context: str = "") -> OmegaExpr:
    """Reduce shifts, then demand that every kernel atom cancels.

    Returns the w-free remainder; raises ResidualOmega when a w or
    coincident-argument atom survives with a nonzero coefficient.
    """
    reduced = omega_reduce(expr)
    reduced.assert_reduced(context)
    return reduced


def kernel_entry(nvars: int, site_b: int, shift_b: int, site_c: int, shift_c: int) -> OmegaExpr:
    """Reduced dressed kernel entry for a (b-side, c-side) fermion pair.

    Arguments are the site indices and half-shifts (+1 for +1/2, -1 for
    -1/2).  With x = lambda_b - lambda_c the entry is w(x + (shift_b -
    shift_c)/2) plus the phi dressing attached to mixed shifts; the
    difference equation collapses the mixed entries to +-p(x) - w(x), and
    the phi parts cancel exactly.  Coincident sites collapse to the
    same-site atom.
    """
    if shift_b not in (1, -1) or shift_c not in (1, -1):
        raise ValueError("shifts are +-1 meaning +-1/2")
    if site_b == site_c:
        if shift_b == shift_c:
            raise ValueError("coincident letters with equal shifts")
        return OmegaExpr.same_site(nvars)
    step = (shift_b - shift_c) // 2
    entry = OmegaExpr.atom(nvars, "om", site_b, site_c, shift=step)
    if step == 1:
        entry = entry + OmegaExpr.constant(
            nvars, phi_ratfunc(nvars, site_b, site_c, 0)
        )
    elif step == -1:
        entry = entry + OmegaExpr.constant(
            nvars, phi_ratfunc(nvars, site_b, site_c, -1)
        )
    return omega_reduce(entry)


def expand_homogeneous(expr: OmegaExpr, directions, prec_floor: int = 2) -> LaurentSeries:
    """Laurent expansion in t after lambda_i -> t * directions[i].

    The expression must already be reduced (p atoms only).  Directions are
    pairwise-distinct nonzero field values (Fraction for the numeric path).
    """
    expr.assert_reduced("expand_homogeneous input")
    nvars = expr.nvars
    if len(directions) != nvars:
        raise ValueError("one direction per spectral variable required")
    total: LaurentSeries | None = None
    for mono, coeff in expr.terms.items():
        n_p = len(mono)
        num_coeffs = coeff.num.scale_coeffs(list(directions))
        if not num_coeffs or all(_zero(c) for c in num_coeffs):
            continue
        v_num = _valuation(num_coeffs)
        v_den = 0
        for factor, power in coeff.den.items():
            fc = factor.scale_coeffs(list(directions))
            v_f = _valuation(fc)
            v_den += power * v_f
        v_term = v_num - v_den - n_p
        rel = max(prec_floor - v_term, 2) + 2
        series = coeff.scaled_series(list(directions), v_term + n_p + rel)
        for a in mono:
            _, i, j = a
            d = directions[i] - directions[j]
            if _zero(d):
                raise ZeroDivisionError("directions collide")
            series = series * p_series_at(d, rel - 1)
        series = series.truncate(prec_floor)
        total = series if total is None else total + series
    if total is None:
        return LaurentSeries.zero(prec_floor)
    return total.truncate(prec_floor)


def _valuation(coeffs) -> int:
    for i, c in enumerate(coeffs):
        if not _zero(c):
            return i
    return len(coeffs)


def _zero(c) -> bool:
    if isinstance(c, (int, Fraction)):
        return c == 0
    return c.is_zero() if hasattr(c, "is_zero") else c == 0
