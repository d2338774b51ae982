"""Exact arithmetic kernel: polynomials, rational functions, pi-polynomials,
truncated Laurent series and high-precision evaluation.

Everything here is coefficient-exact (fractions.Fraction); floats only enter
through explicit mpmath evaluation at a requested precision.
"""

from __future__ import annotations

import re
from fractions import Fraction
from math import gcd

import mpmath

from .errors import SingularLimit, ZeroDenominator

__all__ = [
    "Poly",
    "RationalFunction",
    "PiPoly",
    "LaurentSeries",
    "BigFloat",
    "pipoly_eval",
    "decimal_str",
]


def _frac_gcd(a: Fraction, b: Fraction) -> Fraction:
    """gcd on rationals: gcd of numerators over lcm of denominators."""
    if a == 0:
        return abs(b)
    if b == 0:
        return abs(a)
    num = gcd(a.numerator, b.numerator)
    den = (a.denominator * b.denominator) // gcd(a.denominator, b.denominator)
    return Fraction(num, den)


class Poly:
    """Multivariate polynomial over Fraction, sparse exponent-tuple dict."""

    __slots__ = ("nvars", "terms", "_hash")

    def __init__(self, nvars: int, terms: dict | None = None):
        self.nvars = nvars
        clean: dict[tuple, Fraction] = {}
        if terms:
            for expo, coeff in terms.items():
                coeff = Fraction(coeff)
                if coeff != 0:
                    if len(expo) != nvars:
                        raise ValueError("exponent arity mismatch")
                    clean[tuple(expo)] = coeff
        self.terms = clean
        self._hash = None

    # -- constructors -------------------------------------------------
    @classmethod
    def constant(cls, nvars: int, value) -> "Poly":
        value = Fraction(value)
        if value == 0:
            return cls(nvars)
        return cls(nvars, {(0,) * nvars: value})

    @classmethod
    def variable(cls, nvars: int, index: int) -> "Poly":
        expo = [0] * nvars
        expo[index] = 1
        return cls(nvars, {tuple(expo): Fraction(1)})

    # -- basic queries -------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(all(e == 0 for e in expo) for expo in self.terms)

    def constant_value(self) -> Fraction:
        return self.terms.get((0,) * self.nvars, Fraction(0))

    def total_degree(self) -> int:
        if not self.terms:
            return 0
        return max(sum(expo) for expo in self.terms)

    def degree_in(self, index: int) -> int:
        if not self.terms:
            return 0
        return max(expo[index] for expo in self.terms)

    def leading(self) -> tuple[tuple, Fraction]:
        """Lex-leading term."""
        expo = max(self.terms)
        return expo, self.terms[expo]

    def content(self) -> Fraction:
        c = Fraction(0)
        for coeff in self.terms.values():
            c = _frac_gcd(c, coeff)
        return c

    # -- arithmetic ----------------------------------------------------
    def _check(self, other: "Poly"):
        if self.nvars != other.nvars:
            raise ValueError("variable count mismatch")

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Poly.constant(self.nvars, other)
        self._check(other)
        terms = dict(self.terms)
        for expo, coeff in other.terms.items():
            new = terms.get(expo, Fraction(0)) + coeff
            if new == 0:
                terms.pop(expo, None)
            else:
                terms[expo] = new
        return Poly(self.nvars, terms)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Poly.constant(self.nvars, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Fraction(other)
            if other == 0:
                return Poly(self.nvars)
            return Poly(self.nvars, {e: c * other for e, c in self.terms.items()})
        self._check(other)
        out: dict[tuple, Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                expo = tuple(a + b for a, b in zip(e1, e2))
                new = out.get(expo, Fraction(0)) + c1 * c2
                if new == 0:
                    out.pop(expo, None)
                else:
                    out[expo] = new
        return Poly(self.nvars, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power on Poly")
        result = Poly.constant(self.nvars, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def divide_exact(self, divisor: "Poly") -> "Poly | None":
        """Exact multivariate division; None if not divisible."""
        self._check(divisor)
        if divisor.is_zero():
            raise ZeroDivisionError("division by zero polynomial")
        rem = dict(self.terms)
        out: dict[tuple, Fraction] = {}
        dexpo, dcoeff = divisor.leading()
        while rem:
            expo = max(rem)
            coeff = rem[expo]
            q = tuple(a - b for a, b in zip(expo, dexpo))
            if any(e < 0 for e in q):
                return None
            qc = coeff / dcoeff
            out[q] = out.get(q, Fraction(0)) + qc
            for e2, c2 in divisor.terms.items():
                key = tuple(a + b for a, b in zip(q, e2))
                new = rem.get(key, Fraction(0)) - qc * c2
                if new == 0:
                    rem.pop(key, None)
                else:
                    rem[key] = new
        return Poly(self.nvars, out)

    # -- evaluation / substitution --------------------------------------
    def eval(self, point):
        """Evaluate at a full point (sequence of field values)."""
        if len(point) != self.nvars:
            raise ValueError("point arity mismatch")
        total = None
        for expo, coeff in self.terms.items():
            term = coeff
            for value, e in zip(point, expo):
                for _ in range(e):
                    term = term * value
            total = term if total is None else total + term
        if total is None:
            return Fraction(0)
        return total

    def scale_coeffs(self, point) -> list:
        """Coefficients of t after substituting var_i -> t * point_i.

        Returns a dense list c where self(t*a) = sum c[k] t^k; entries live in
        the field generated by the point values.
        """
        if len(point) != self.nvars:
            raise ValueError("point arity mismatch")
        out: dict[int, object] = {}
        for expo, coeff in self.terms.items():
            term = coeff
            for value, e in zip(point, expo):
                for _ in range(e):
                    term = term * value
            k = sum(expo)
            out[k] = out.get(k, 0) + term
        if not out:
            return []
        top = max(out)
        return [out.get(k, Fraction(0)) for k in range(top + 1)]

    # -- canonical form / hashing ----------------------------------------
    def normalized(self) -> tuple["Poly", Fraction]:
        """(unit-content poly with positive lex-leading coeff, scale)."""
        if self.is_zero():
            return self, Fraction(1)
        c = self.content()
        _, lead = self.leading()
        if lead < 0:
            c = -c
        return Poly(self.nvars, {e: v / c for e, v in self.terms.items()}), c

    def _key(self):
        if self._hash is None:
            self._hash = (self.nvars, tuple(sorted(self.terms.items())))
        return self._hash

    def __eq__(self, other):
        if not isinstance(other, Poly):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        if not self.terms:
            return "0"
        bits = []
        for expo in sorted(self.terms, reverse=True):
            coeff = self.terms[expo]
            mono = "*".join(
                f"x{i}" + (f"^{e}" if e > 1 else "")
                for i, e in enumerate(expo)
                if e
            )
            if mono:
                bits.append(f"{coeff}*{mono}" if coeff != 1 else mono)
            else:
                bits.append(str(coeff))
        return " + ".join(bits)


class RationalFunction:
    """Quotient of multivariate polynomials with a factored denominator.

    The denominator is kept as a multiset of normalized irreducible-ish
    factors so that sums stay over structured common denominators instead of
    requiring a general multivariate gcd.
    """

    __slots__ = ("nvars", "num", "den")

    def __init__(self, num: Poly, den: dict[Poly, int] | None = None):
        self.nvars = num.nvars
        self.num = num
        self.den: dict[Poly, int] = {}
        if den:
            for factor, power in den.items():
                if power == 0:
                    continue
                if power < 0:
                    raise ValueError("negative factor power")
                if factor.is_zero():
                    raise ZeroDenominator("zero factor in denominator")
                self._mul_factor(factor, power)
        self._reduce()

    # internal: multiply a (normalized-on-entry) factor into self.den,
    # folding any scalar into the numerator
    def _mul_factor(self, factor: Poly, power: int):
        norm, scale = factor.normalized()
        if norm.is_constant():
            self.num = self.num * (Fraction(1) / (scale ** power))
            return
        self.num = self.num * (Fraction(1) / (scale ** power))
        self.den[norm] = self.den.get(norm, 0) + power
        if self.den[norm] == 0:
            del self.den[norm]

    def _reduce(self):
        if self.num.is_zero():
            self.den = {}
            return
        for factor in list(self.den):
            power = self.den[factor]
            while power > 0:
                q = self.num.divide_exact(factor)
                if q is None:
                    break
                self.num = q
                power -= 1
            if power:
                self.den[factor] = power
            else:
                del self.den[factor]

    # -- constructors ----------------------------------------------------
    @classmethod
    def from_poly(cls, p: Poly) -> "RationalFunction":
        return cls(p)

    @classmethod
    def constant(cls, nvars: int, value) -> "RationalFunction":
        return cls(Poly.constant(nvars, value))

    @classmethod
    def variable(cls, nvars: int, index: int) -> "RationalFunction":
        return cls(Poly.variable(nvars, index))

    # -- queries -----------------------------------------------------------
    def is_zero(self) -> bool:
        return self.num.is_zero()

    def den_poly(self) -> Poly:
        d = Poly.constant(self.nvars, 1)
        for factor, power in self.den.items():
            d = d * factor ** power
        return d

    # -- arithmetic ----------------------------------------------------
    def _coerce(self, other) -> "RationalFunction":
        if isinstance(other, RationalFunction):
            return other
        if isinstance(other, Poly):
            return RationalFunction(other)
        if isinstance(other, (int, Fraction)):
            return RationalFunction.constant(self.nvars, other)
        raise TypeError(f"cannot coerce {type(other)!r}")

    def __add__(self, other):
        other = self._coerce(other)
        if self.nvars != other.nvars:
            raise ValueError("variable count mismatch")
        lcd: dict[Poly, int] = dict(self.den)
        for factor, power in other.den.items():
            lcd[factor] = max(lcd.get(factor, 0), power)
        n1 = self.num
        for factor, power in lcd.items():
            missing = power - self.den.get(factor, 0)
            if missing:
                n1 = n1 * factor ** missing
        n2 = other.num
        for factor, power in lcd.items():
            missing = power - other.den.get(factor, 0)
            if missing:
                n2 = n2 * factor ** missing
        return RationalFunction(n1 + n2, lcd)

    __radd__ = __add__

    def __neg__(self):
        out = RationalFunction.__new__(RationalFunction)
        out.nvars = self.nvars
        out.num = -self.num
        out.den = dict(self.den)
        return out

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if self.nvars != other.nvars:
            raise ValueError("variable count mismatch")
        den = dict(self.den)
        for factor, power in other.den.items():
            den[factor] = den.get(factor, 0) + power
        return RationalFunction(self.num * other.num, den)

    __rmul__ = __mul__

    def invert(self) -> "RationalFunction":
        if self.is_zero():
            raise ZeroDenominator("inverting zero rational function")
        num = Poly.constant(self.nvars, 1)
        for factor, power in self.den.items():
            num = num * factor ** power
        norm, scale = self.num.normalized()
        return RationalFunction(num * (Fraction(1) / scale), {norm: 1})

    def __truediv__(self, other):
        return self * self._coerce(other).invert()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.invert()

    def __pow__(self, k: int):
        if k < 0:
            return self.invert() ** (-k)
        out = RationalFunction.constant(self.nvars, 1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return (self - other).is_zero()

    def __hash__(self):
        raise TypeError("RationalFunction is unhashable")

    # -- evaluation ------------------------------------------------------
    def eval(self, point):
        dval = None
        for factor, power in self.den.items():
            v = factor.eval(point)
            term = v ** power
            dval = term if dval is None else dval * term
        if dval is None:
            dval = Fraction(1)
        if dval == 0:
            raise ZeroDivisionError("denominator vanishes at point")
        return self.num.eval(point) / dval

    def scaled_series(self, point, prec: int) -> "LaurentSeries":
        """Laurent expansion in t of self(t*point) to O(t^prec)."""
        den_coeffs = [Fraction(1)]
        for factor, power in self.den.items():
            fc = factor.scale_coeffs(point)
            for _ in range(power):
                den_coeffs = _list_mul(den_coeffs, fc)
        v_den = _poly_valuation(den_coeffs)
        num_coeffs = self.num.scale_coeffs(point)
        num_series = LaurentSeries.from_coeffs(0, num_coeffs, prec + v_den + 4)
        den_series = LaurentSeries.from_coeffs(0, den_coeffs, prec + 2 * v_den + 4)
        if den_series.is_zero():
            raise ZeroDivisionError("denominator vanishes along direction")
        return (num_series * den_series.invert()).truncate(prec)

    def __repr__(self):
        if not self.den:
            return repr(self.num)
        dens = " * ".join(
            f"({factor!r})" + (f"^{power}" if power > 1 else "")
            for factor, power in self.den.items()
        )
        return f"({self.num!r}) / ({dens})"


def _poly_valuation(coeffs: list) -> int:
    for i, c in enumerate(coeffs):
        if not _is_zero_coeff(c):
            return i
    return 0


def _list_mul(a: list, b: list) -> list:
    out = [Fraction(0)] * (len(a) + len(b) - 1) if a and b else []
    for i, x in enumerate(a):
        if _is_zero_coeff(x):
            continue
        for j, y in enumerate(b):
            out[i + j] = out[i + j] + x * y
    return out


def _is_zero_coeff(c) -> bool:
    if isinstance(c, (int, Fraction)):
        return c == 0
    is_zero = getattr(c, "is_zero", None)
    if is_zero is not None:
        return c.is_zero()
    return c == 0


class PiPoly:
    """Polynomial in pi^2 over a field; keys are even powers of pi."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: dict | None = None):
        self.coeffs: dict[int, object] = {}
        if coeffs:
            for power, value in coeffs.items():
                power = int(power)
                if power < 0 or power % 2:
                    raise ValueError("pi powers must be even and nonnegative")
                if isinstance(value, (int, str)):
                    value = Fraction(value)
                if not _is_zero_coeff(value):
                    self.coeffs[power] = value

    @classmethod
    def constant(cls, value) -> "PiPoly":
        return cls({0: Fraction(value)})

    @classmethod
    def pi_power(cls, power: int, value=1) -> "PiPoly":
        return cls({power: Fraction(value)})

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_rational(self) -> bool:
        return all(p == 0 for p in self.coeffs)

    def rational_value(self) -> Fraction:
        if not self.is_rational():
            raise ValueError("PiPoly has pi-dependence")
        return self.coeffs.get(0, Fraction(0))

    def _coerce(self, other) -> "PiPoly":
        if isinstance(other, PiPoly):
            return other
        return PiPoly({0: other})

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.coeffs)
        for power, value in other.coeffs.items():
            new = out.get(power, 0) + value
            if _is_zero_coeff(new):
                out.pop(power, None)
            else:
                out[power] = new
        result = PiPoly.__new__(PiPoly)
        result.coeffs = out
        return result

    __radd__ = __add__

    def __neg__(self):
        result = PiPoly.__new__(PiPoly)
        result.coeffs = {p: -v for p, v in self.coeffs.items()}
        return result

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, PiPoly):
            if isinstance(other, (int, Fraction)) and other == 0:
                return PiPoly()
            result = PiPoly.__new__(PiPoly)
            result.coeffs = {p: v * other for p, v in self.coeffs.items()}
            result.coeffs = {
                p: v for p, v in result.coeffs.items() if not _is_zero_coeff(v)
            }
            return result
        out: dict[int, object] = {}
        for p1, v1 in self.coeffs.items():
            for p2, v2 in other.coeffs.items():
                power = p1 + p2
                new = out.get(power, 0) + v1 * v2
                if _is_zero_coeff(new):
                    out.pop(power, None)
                else:
                    out[power] = new
        result = PiPoly.__new__(PiPoly)
        result.coeffs = out
        return result

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = PiPoly({0: other})
        if not isinstance(other, PiPoly):
            return NotImplemented
        return (self - other).is_zero()

    def __hash__(self):
        return hash(tuple(sorted((p, v) for p, v in self.coeffs.items())))

    def map_coeffs(self, fn) -> "PiPoly":
        out = PiPoly.__new__(PiPoly)
        out.coeffs = {}
        for power, value in self.coeffs.items():
            new = fn(value)
            if not _is_zero_coeff(new):
                out.coeffs[power] = new
        return out

    def max_power(self) -> int:
        return max(self.coeffs, default=0)

    def to_json(self) -> dict:
        return {str(p): str(v) for p, v in sorted(self.coeffs.items())}

    @classmethod
    def from_json(cls, data: dict) -> "PiPoly":
        return cls({int(p): Fraction(v) for p, v in data.items()})

    def pretty(self) -> str:
        if self.is_zero():
            return "0"
        bits = []
        for power in sorted(self.coeffs):
            value = self.coeffs[power]
            if power == 0:
                bits.append(str(value))
            else:
                head = "pi^%d" % power if power != 2 else "pi^2"
                if value == 1:
                    bits.append(head)
                else:
                    bits.append(f"{value}*{head}")
        return " + ".join(bits).replace("+ -", "- ")

    def __repr__(self):
        return f"PiPoly({self.pretty()})"


_PI_TERM = re.compile(
    r"^\s*([+-]?\s*\d+(?:/\d+)?)\s*(?:\*?\s*pi(?:\^(\d+))?)?\s*$"
)


def parse_pipoly(text: str) -> PiPoly:
    """Parse strings like '-34/3 + 8/9*pi^2' into a PiPoly."""
    text = text.replace("-", "+-").replace("++-", "+-")
    out = PiPoly()
    for chunk in text.split("+"):
        chunk = chunk.strip()
        if not chunk:
            continue
        if "pi" in chunk:
            m = re.match(r"^([+-]?\s*\d+(?:/\d+)?)?\s*\*?\s*pi(?:\^(\d+))?$", chunk)
            if not m:
                raise ValueError(f"cannot parse pi term {chunk!r}")
            coeff = Fraction(m.group(1).replace(" ", "") or 1)
            power = int(m.group(2) or 1)
            out = out + PiPoly.pi_power(power, coeff)
        else:
            out = out + PiPoly.constant(Fraction(chunk.replace(" ", "")))
    return out


class LaurentSeries:
    """Truncated Laurent series c[0]*t^offset + ... + O(t^prec).

    Coefficients live in any commutative ring with +, -, * and a zero test
    (Fraction, PiPoly over Fraction, PiPoly over RationalFunction, ...).
    """

    __slots__ = ("offset", "coeffs", "prec")

    def __init__(self, offset: int, coeffs: list, prec: int):
        # normalize: strip leading/trailing zeros, clamp to prec
        n = len(coeffs)
        if offset + n > prec:
            coeffs = coeffs[: max(0, prec - offset)]
            n = len(coeffs)
        start = 0
        while start < n and _is_zero_coeff(coeffs[start]):
            start += 1
        end = n
        while end > start and _is_zero_coeff(coeffs[end - 1]):
            end -= 1
        self.coeffs = list(coeffs[start:end])
        self.offset = offset + start if self.coeffs else 0
        self.prec = prec

    @classmethod
    def from_coeffs(cls, offset: int, coeffs: list, prec: int) -> "LaurentSeries":
        return cls(offset, list(coeffs), prec)

    @classmethod
    def zero(cls, prec: int) -> "LaurentSeries":
        return cls(0, [], prec)

    @classmethod
    def monomial(cls, value, power: int, prec: int) -> "LaurentSeries":
        return cls(power, [value], prec)

    def is_zero(self) -> bool:
        return not self.coeffs

    def valuation(self) -> int:
        """Order of the first nonzero coefficient (prec if zero)."""
        return self.offset if self.coeffs else self.prec

    def coefficient(self, power: int):
        if not self.coeffs:
            return Fraction(0)
        i = power - self.offset
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return Fraction(0)

    def truncate(self, prec: int) -> "LaurentSeries":
        prec = min(prec, self.prec)
        return LaurentSeries(self.offset, self.coeffs, prec)

    def __add__(self, other):
        if not isinstance(other, LaurentSeries):
            raise TypeError("LaurentSeries addition requires same type")
        prec = min(self.prec, other.prec)
        if self.is_zero():
            return other.truncate(prec)
        if other.is_zero():
            return self.truncate(prec)
        lo = min(self.offset, other.offset)
        hi = max(self.offset + len(self.coeffs), other.offset + len(other.coeffs))
        out = []
        for k in range(lo, hi):
            out.append(self.coefficient(k) + other.coefficient(k))
        return LaurentSeries(lo, out, prec)

    def __neg__(self):
        return LaurentSeries(self.offset, [-c for c in self.coeffs], self.prec)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, LaurentSeries):
            # scalar multiply
            return LaurentSeries(
                self.offset, [c * other for c in self.coeffs], self.prec
            )
        if self.is_zero() or other.is_zero():
            return LaurentSeries.zero(min(self.prec, other.prec))
        # truncation tracking: product known to O(t^prec) with
        # prec = min(p1 + v2, p2 + v1)
        prec = min(self.prec + other.valuation(), other.prec + self.valuation())
        out = _list_mul(self.coeffs, other.coeffs)
        return LaurentSeries(self.offset + other.offset, out, prec)

    __rmul__ = __mul__

    def shift(self, k: int) -> "LaurentSeries":
        return LaurentSeries(self.offset + k, self.coeffs, self.prec + k)

    def invert(self) -> "LaurentSeries":
        """Multiplicative inverse; leading coefficient must be invertible."""
        if self.is_zero():
            raise ZeroDivisionError("inverting zero series")
        lead = self.coeffs[0]
        if isinstance(lead, PiPoly):
            lead_inv = PiPoly.constant(Fraction(1) / lead.rational_value())
        elif isinstance(lead, RationalFunction):
            lead_inv = lead.invert()
        else:
            lead_inv = Fraction(1) / Fraction(lead)
        # solve (sum a_i t^i)(sum b_k t^k) = 1 term by term
        a = self.coeffs
        m = self.prec - self.offset  # relative orders known
        b = [lead_inv]
        for k in range(1, m):
            acc = None
            for j in range(1, min(k, len(a) - 1) + 1):
                term = a[j] * b[k - j]
                acc = term if acc is None else acc + term
            if acc is None:
                b.append(Fraction(0))
            else:
                b.append(-(lead_inv * acc))
        return LaurentSeries(-self.offset, b, self.prec - 2 * self.offset)

    def singular_part(self) -> "LaurentSeries":
        if self.is_zero() or self.offset >= 0:
            return LaurentSeries.zero(self.prec)
        n = min(len(self.coeffs), -self.offset)
        return LaurentSeries(self.offset, self.coeffs[:n], 0)

    def require_regular(self, context: str = "") -> None:
        sing = self.singular_part()
        if not sing.is_zero():
            raise SingularLimit(
                f"singular part survives{': ' + context if context else ''}: {sing!r}"
            )

    def constant_term(self):
        if self.prec <= 0:
            raise ValueError("series not computed to order 0")
        return self.coefficient(0)

    def map_coeffs(self, fn) -> "LaurentSeries":
        return LaurentSeries(self.offset, [fn(c) for c in self.coeffs], self.prec)

    def __eq__(self, other):
        if not isinstance(other, LaurentSeries):
            return NotImplemented
        prec = min(self.prec, other.prec)
        return (self - other).truncate(prec).is_zero()

    def __repr__(self):
        if not self.coeffs:
            return f"O(t^{self.prec})"
        bits = []
        for i, c in enumerate(self.coeffs):
            if _is_zero_coeff(c):
                continue
            k = self.offset + i
            cs = c.pretty() if isinstance(c, PiPoly) else str(c)
            if k == 0:
                bits.append(f"({cs})")
            else:
                bits.append(f"({cs})*t^{k}")
        bits.append(f"O(t^{self.prec})")
        return " + ".join(bits)


class BigFloat:
    """An mpmath value tagged with the working precision in decimal digits."""

    __slots__ = ("value", "digits")

    def __init__(self, value, digits: int):
        self.value = value
        self.digits = digits

    def __repr__(self):
        return f"BigFloat({mpmath.nstr(self.value, min(self.digits, 20))}, digits={self.digits})"

    def __float__(self):
        return float(self.value)


def pipoly_eval(p: PiPoly, digits: int = 50) -> BigFloat:
    """Evaluate a PiPoly (over Fraction) numerically at the given precision."""
    with mpmath.workdps(digits + 15):
        total = mpmath.mpf(0)
        for power, value in p.coeffs.items():
            if not isinstance(value, Fraction):
                raise TypeError("pipoly_eval needs Fraction coefficients")
            total += (
                mpmath.mpf(value.numerator)
                / value.denominator
                * mpmath.pi ** power
            )
        result = +total
    return BigFloat(result, digits)


def decimal_str(x, sig: int = 10) -> str:
    """Round-half-even decimal string with `sig` significant digits."""
    import decimal

    if isinstance(x, PiPoly):
        x = pipoly_eval(x, max(sig + 20, 30))
    if isinstance(x, BigFloat):
        guard = max(x.digits, sig + 10)
        with mpmath.workdps(guard):
            raw = mpmath.nstr(
                mpmath.mpf(x.value), sig + 8, strip_zeros=False, min_fixed=1, max_fixed=0
            )
    elif isinstance(x, Fraction):
        with mpmath.workdps(sig + 18):
            raw = mpmath.nstr(
                mpmath.mpf(x.numerator) / x.denominator,
                sig + 8,
                strip_zeros=False,
                min_fixed=1,
                max_fixed=0,
            )
    else:
        with mpmath.workdps(sig + 18):
            raw = mpmath.nstr(mpmath.mpf(x), sig + 8, strip_zeros=False, min_fixed=1, max_fixed=0)
    d = decimal.Decimal(raw)
    if d == 0:
        return "0.000000000"
    ctx = decimal.Context(prec=sig, rounding=decimal.ROUND_HALF_EVEN)
    return str(ctx.plus(d))
