"""Correlator pipeline: normal-ordered expectation values at zero
temperature and assembly of neighbour correlation functions.

Expectations of plain words factor through shift-split determinants of the
reduced two-point kernel; normal-ordered values follow by subtracting the
pairwise rule corrections recursively.  The single monomial class mixing
all three currents does not reduce to a determinant; its expectation
carries a short exact jet in the spectral differences whose coefficients
are fixed by finiteness of the homogeneous limit and the short-chain
anchors.  Assembled observables must be free of unreduced kernel atoms,
expand regularly in the homogeneous limit, and give the same constant
along every direction tuple.
"""

from __future__ import annotations

import hashlib
import importlib.resources
import json
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations, product

import mpmath

from .currents import Letter, normal_order
from .errors import (
    DirectionDependence,
    NotADensityMatrix,
    S1FCError,
    SingularSystem,
    UncalibratedSign,
)
from .exact import (
    BigFloat,
    LaurentSeries,
    PiPoly,
    Poly,
    RationalFunction,
    decimal_str,
    pipoly_eval,
)
from .omega import OmegaExpr, expand_homogeneous, kernel_entry

__all__ = [
    "parse_polynomial",
    "plain_expectation",
    "Evaluator",
    "three_current_series",
    "THREE_CURRENT_JET",
    "load_table",
    "table_checksum",
    "correlator",
    "reference_value",
    "reference_values",
    "CorrelatorResult",
    "fit_framework",
    "FitResult",
    "entropy",
    "DEFAULT_DIRECTIONS",
]

# three deterministic pairwise-distinct direction tuples; the homogeneous
# limit must not depend on the choice
DEFAULT_DIRECTIONS = (
    (0, 1, 3, 6, 10),
    (1, 2, 7, 13, 21),
    (-3, 1, 2, 9, 15),
)

# retained series order of the homogeneous limit (enough to certify the
# vanishing of the singular part and isolate the constant term)
SERIES_ORDER = 2


# -- small expression parser for the stored coefficient tables ---------------


class _Parser:
    """Polynomial expressions in named variables: +, -, *, ^, parentheses."""

    def __init__(self, text: str, varnames: list[str]):
        self.text = text.replace(" ", "")
        self.pos = 0
        self.varnames = varnames
        self.nvars = len(varnames)

    def fail(self, why: str):
        raise ValueError(f"parse error at {self.text[self.pos:]!r}: {why}")

    def peek(self):
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def parse(self) -> Poly:
        value = self.expr()
        if self.pos != len(self.text):
            self.fail("trailing input")
        return value

    def expr(self) -> Poly:
        sign = 1
        if self.peek() in ("+", "-"):
            sign = -1 if self.peek() == "-" else 1
            self.pos += 1
        total = self.term() * sign
        while self.peek() in ("+", "-"):
            op = self.peek()
            self.pos += 1
            nxt = self.term()
            total = total + nxt if op == "+" else total - nxt
        return total

    def term(self) -> Poly:
        total = self.factor()
        while self.peek() == "*":
            self.pos += 1
            total = total * self.factor()
        return total

    def factor(self) -> Poly:
        base = self.atom()
        if self.peek() == "^":
            self.pos += 1
            digits = ""
            while self.peek().isdigit():
                digits += self.peek()
                self.pos += 1
            if not digits:
                self.fail("exponent expected")
            return base ** int(digits)
        return base

    def atom(self) -> Poly:
        ch = self.peek()
        if ch == "(":
            self.pos += 1
            value = self.expr()
            if self.peek() != ")":
                self.fail("expected )")
            self.pos += 1
            return value
        if ch == "-":
            self.pos += 1
            return -self.factor()
        if ch.isdigit():
            digits = ""
            while self.peek().isdigit():
                digits += self.peek()
                self.pos += 1
            return Poly.constant(self.nvars, int(digits))
        for idx, name in enumerate(self.varnames):
            if self.text.startswith(name, self.pos):
                self.pos += len(name)
                return Poly.variable(self.nvars, idx)
        self.fail("atom expected")


def parse_polynomial(text: str, varnames: list[str]) -> Poly:
    return _Parser(text, varnames).parse()


# -- plain-word expectations via shift-split determinants --------------------

# expansion of each generator into half-shifted constituents in operator
# order: tuples of (species, shift) with species in {b, c}; shift +-1 stands
# for a half-step so each letter occupies one or both slots of its site
_SPLIT = {
    "b*": ((("b", 1),), (("b", -1),)),
    "c*": ((("c", 1),), (("c", -1),)),
    "j+": ((("b", 1), ("b", -1)),),
    "j-": ((("c", 1), ("c", -1)),),
    "j0": ((("c", 1), ("b", -1)), (("b", 1), ("c", -1))),
}

# calibrated normalization: one factor 2 per active site, fixed by the
# finiteness of the normal-ordered two-current value at coinciding points
NU = 2


def plain_expectation(word, nvars: int) -> OmegaExpr:
    """Expectation of a plain word of generators at zero temperature.

    Each site carries two half-shifted slots ordered (-, +); constituents
    are collated by slot index, the written operator string is matched to
    the canonical descending-slot product, and balanced species pair up in
    a kernel determinant with rows the c slots (descending) and columns the
    b slots (ascending).  Flipping either ordering breaks the two-site
    anchor values, so both are baked in.
    """
    word = tuple(word)
    if not word:
        return OmegaExpr.constant(nvars, 1)
    if len(word) > 1 and any(l.kind == "j0" for l in word):
        # j0 mixes both species on one site; the sign tying its two
        # branches to the other letters' determinant is not fixed by the
        # two-site anchors.  (Alone it is branch-antisymmetric and gives 0.)
        raise UncalibratedSign(
            "no determinant sign convention for multi-letter j0 words"
        )
    total = OmegaExpr(nvars)
    for combo in product(*(_SPLIT[l.kind] for l in word)):
        factors = []
        for part, letter in zip(combo, word):
            for species, shift in part:
                slot = 2 * letter.site + (1 if shift > 0 else 0)
                factors.append((slot, species, letter.site, shift))
        bs = [f for f in factors if f[1] == "b"]
        cs = [f for f in factors if f[1] == "c"]
        if len(bs) != len(cs):
            continue
        m = len(bs)
        sign = 1
        # match the written string to the descending-slot canonical product
        for i in range(len(factors)):
            for j in range(i + 1, len(factors)):
                if factors[i][0] < factors[j][0]:
                    sign = -sign
        # sorting sign that moves every c slot left of every b slot
        for _, _, c_site, c_shift in cs:
            c_slot = 2 * c_site + (1 if c_shift > 0 else 0)
            for b_slot, _, _, _ in bs:
                if b_slot < c_slot:
                    sign = -sign
        if m == 0:
            total = total + OmegaExpr.constant(nvars, sign)
            continue
        bs.sort(key=lambda f: f[0])
        cs.sort(key=lambda f: f[0], reverse=True)
        entries = [
            [
                kernel_entry(nvars, b_site, b_shift, c_site, c_shift)
                for (_, _, b_site, b_shift) in bs
            ]
            for (_, _, c_site, c_shift) in cs
        ]
        det = OmegaExpr(nvars)
        for perm in permutations(range(m)):
            psign = _perm_sign(perm)
            prod_expr = entries[0][perm[0]]
            for r in range(1, m):
                prod_expr = prod_expr * entries[r][perm[r]]
            det = det + prod_expr * psign
        total = total + det * sign
    return total * (NU ** len(word))


def _perm_sign(perm) -> int:
    sign = 1
    for i in range(len(perm)):
        for j in range(i + 1, len(perm)):
            if perm[i] > perm[j]:
                sign = -sign
    return sign


class Evaluator:
    """Memoized normal-ordered expectations on n spectral variables."""

    def __init__(self, nvars: int, check_reduced: bool = True):
        self.nvars = nvars
        self.check_reduced = check_reduced
        self._memo: dict[tuple[Letter, ...], OmegaExpr] = {}

    def normal_expectation(self, word) -> OmegaExpr:
        """<:word:> for the word in its written order."""
        word = tuple(word)
        if word in self._memo:
            return self._memo[word]
        value = plain_expectation(word, self.nvars)
        if len(word) > 1:
            nf = normal_order(word, nvars=self.nvars)
            canon_words = {w for w in nf.terms if len(w) == len(word)}
            for v_word, coeff in nf.terms.items():
                if v_word in canon_words:
                    continue
                value = value - self.normal_expectation(v_word) * coeff
        if self.check_reduced:
            value.assert_reduced(f"<:{' '.join(map(repr, word))}:>")
        self._memo[word] = value
        return value


# -- the three-current monomial -----------------------------------------------

# Exact jet of <:j+(l1) j-(l2) j0(l3):> in x12 = l1-l2, x23 = l2-l3,
# x13 = l1-l3, keyed degree -> {(e12, e23, e13): PiPoly coefficient}.  The
# value is an odd function of the arguments, antisymmetric under l1 <-> l2;
# degree 5 and beyond never reaches the n=3 constant term.  Coefficients
# are fixed by finiteness of the homogeneous limit and the short-chain
# anchors, over 14 direction tuples with consistency checks.
THREE_CURRENT_JET: dict[int, dict[tuple[int, int, int], PiPoly]] = {
    1: {(1, 0, 0): PiPoly({4: Fraction(1, 5)})},
    3: {
        (1, 1, 1): PiPoly(
            {
                2: Fraction(-413, 48),
                4: Fraction(21, 16),
                6: Fraction(22, 945),
            }
        ),
        (3, 0, 0): PiPoly({6: Fraction(10, 189)}),
    },
}


def three_current_series(dirs, prec: int) -> LaurentSeries:
    """Homogeneous-limit series of the three-current expectation.

    dirs = (direction of the j+ site, of the j- site, of the j0 site);
    the series variable is the overall scale t.
    """
    d_plus, d_minus, d_zero = (Fraction(d) for d in dirs)
    x12 = d_plus - d_minus
    x23 = d_minus - d_zero
    x13 = d_plus - d_zero
    out = LaurentSeries.zero(prec)
    for degree, monos in THREE_CURRENT_JET.items():
        coeff = PiPoly()
        for (e12, e23, e13), value in monos.items():
            coeff = coeff + value * (x12 ** e12 * x23 ** e23 * x13 ** e13)
        out = out + LaurentSeries.monomial(coeff, degree, prec)
    return out


# -- stored coefficient tables ------------------------------------------------

_GEN_BY_CODE = {"12": "b*", "21": "c*", "13": "j+", "22": "j0", "31": "j-"}


def _data_text(name: str) -> str:
    return (
        importlib.resources.files("s1fc").joinpath("data").joinpath(name).read_text()
    )


def table_checksum(n: int) -> str:
    return hashlib.sha256(_data_text(f"table_n{n}.json").encode()).hexdigest()


def load_table(n: int):
    """Load the coefficient table for n sites in spectral variables.

    Returns a list of (word, coefficient) with words over Letter and
    coefficients RationalFunction in lambda_1..lambda_n.  Stored
    coefficients are rational expressions in the differences
    m_j = lambda_{j+1} - lambda_1.
    """
    raw = json.loads(_data_text(f"table_n{n}.json"))
    if raw["n"] != n:
        raise ValueError("table file inconsistent")
    varnames = [f"m{j}" for j in range(1, n)]
    # substitution m_j -> lambda_{j+1} - lambda_1
    subs = [
        Poly.variable(n, j + 1) - Poly.variable(n, 0) for j in range(n - 1)
    ]
    out = []
    for entry in raw["terms"]:
        word = tuple(
            Letter(_GEN_BY_CODE[code], site - 1) for code, site in entry["word"]
        )
        num = _subst_poly(parse_polynomial(entry["num"], varnames), subs, n)
        den = {}
        for text, power in entry.get("den", []):
            factor = _subst_poly(parse_polynomial(text, varnames), subs, n)
            den[factor] = den.get(factor, 0) + power
        out.append((word, RationalFunction(num, den)))
    return out


def _subst_poly(p: Poly, subs: list[Poly], nvars: int) -> Poly:
    total = Poly(nvars)
    for expo, coeff in p.terms.items():
        term = Poly.constant(nvars, coeff)
        for var_index, e in enumerate(expo):
            if e:
                term = term * subs[var_index] ** e
        total = total + term
    return total


# -- correlator assembly ------------------------------------------------------


@dataclass
class CorrelatorResult:
    n: int
    exact: PiPoly
    decimal: str
    directions: list[tuple]
    log: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "pipoly": self.exact.to_json(),
            "pretty": self.exact.pretty(),
            "decimal": self.decimal,
            "log": list(self.log),
        }


def _direction_tuples(n: int, directions):
    if directions is None:
        out = [tuple(Fraction(a) for a in ds[:n]) for ds in DEFAULT_DIRECTIONS]
    else:
        out = [tuple(Fraction(a) for a in directions[:n])]
        for ds in DEFAULT_DIRECTIONS:
            cand = tuple(Fraction(a) for a in ds[:n])
            if cand not in out:
                out.append(cand)
            if len(out) == 3:
                break
    for ds in out:
        if len(set(ds)) != n:
            raise ValueError("direction entries must be pairwise distinct")
    return out


def correlator(n: int, directions=None, digits: int = 50) -> CorrelatorResult:
    """Nearest and next-to-nearest neighbour correlation from the tables.

    Evaluates every stored monomial in the normal-ordered basis (the
    three-current monomial through its exact jet), assembles the
    observable, and takes the homogeneous limit along each direction tuple;
    the singular parts must vanish and the constant terms must agree.
    """
    table = load_table(n)
    evaluator = Evaluator(n)
    det_total = OmegaExpr(n)
    mixed = []
    for word, coeff in table:
        kinds = sorted(l.kind for l in word)
        if "j0" in kinds:
            if kinds != ["j+", "j-", "j0"]:
                raise UncalibratedSign(
                    "only the three-current monomial class is calibrated, got "
                    + " ".join(map(repr, word))
                )
            mixed.append((word, coeff))
            continue
        det_total = det_total + evaluator.normal_expectation(word) * coeff
    det_total.assert_reduced(f"assembled n={n} observable")

    dir_sets = _direction_tuples(n, directions)
    values = []
    for ds in dir_sets:
        series = expand_homogeneous(det_total, list(ds), SERIES_ORDER)
        for word, coeff in mixed:
            sites = {l.kind: l.site for l in word}
            f_dirs = (ds[sites["j+"]], ds[sites["j-"]], ds[sites["j0"]])
            cs = coeff.scaled_series(list(ds), SERIES_ORDER + 8)
            series = series + cs * three_current_series(f_dirs, SERIES_ORDER + 4)
        series = series.truncate(SERIES_ORDER)
        series.require_regular(f"homogeneous limit n={n}")
        values.append(series.constant_term())
    first = values[0]
    for ds, other in zip(dir_sets[1:], values[1:]):
        if other != first:
            raise DirectionDependence(
                f"constant term along {ds}: {other.pretty()} differs from "
                f"{first.pretty()}"
            )
    if first.max_power() > n * (n - 1):
        raise S1FCError(
            f"degree bound violated: pi-power {first.max_power()} for n={n}"
        )
    log = [
        f"table n={n} sha256 {table_checksum(n)[:16]}",
        f"calibration nu={NU} per active site",
        f"direction tuples {[tuple(map(str, ds)) for ds in dir_sets]}",
    ]
    if mixed:
        log.insert(2, f"three-current jet degrees {sorted(THREE_CURRENT_JET)}")
    return CorrelatorResult(
        n=n,
        exact=first,
        decimal=decimal_str(pipoly_eval(first, digits)),
        directions=[tuple(ds) for ds in dir_sets],
        log=log,
    )


def reference_value(n: int) -> PiPoly:
    raw = json.loads(_data_text("reference_values.json"))
    key = str(n)
    if key not in raw:
        raise KeyError(f"no stored reference value for n={n}")
    return PiPoly.from_json(raw[key])


def reference_values(n: int, digits: int = 50) -> CorrelatorResult:
    """Stored exact polynomial for n in 2..5 with its decimal value."""
    exact = reference_value(n)
    return CorrelatorResult(
        n=n,
        exact=exact,
        decimal=decimal_str(pipoly_eval(exact, digits)),
        directions=[],
        log=[f"stored reference polynomial n={n}"],
    )


# -- fitting framework ---------------------------------------------------------


@dataclass
class FitResult:
    coefficients: list[Fraction]
    rank: int
    residuals: list[Fraction]

    @property
    def consistent(self) -> bool:
        return all(r == 0 for r in self.residuals)


def fit_framework(basis, oracle, samples, targets) -> FitResult:
    """Exact linear fit of decomposition coefficients against an oracle.

    Builds the system  sum_k X_k * oracle(basis[k], sample) = target  over
    the supplied samples and solves it exactly.  The oracle abstracts the
    finite-size two-point data; targets are the direct expectation values
    of the operator being decomposed.
    """
    if len(samples) != len(targets):
        raise ValueError("one target per sample required")
    rows = [[Fraction(oracle(m, s)) for m in basis] for s in samples]
    rhs = [Fraction(t) for t in targets]
    if not basis:
        return FitResult(coefficients=[], rank=0, residuals=rhs)
    solution, rank = _solve_exact(rows, rhs)
    if solution is None:
        raise SingularSystem(
            f"rank {rank} system for {len(basis)} unknowns over "
            f"{len(samples)} samples is "
            + ("inconsistent" if rank == len(basis) else "rank deficient")
        )
    residuals = [
        sum(r * x for r, x in zip(row, solution)) - b
        for row, b in zip(rows, rhs)
    ]
    if any(residuals):
        raise SingularSystem(
            "inconsistent samples; residuals " + ", ".join(map(str, residuals))
        )
    return FitResult(coefficients=solution, rank=rank, residuals=residuals)


def _solve_exact(rows, rhs):
    """Gauss elimination over Fraction; returns (solution | None, rank)."""
    m = len(rows)
    ncols = len(rows[0]) if rows else 0
    aug = [[Fraction(v) for v in row] + [Fraction(b)] for row, b in zip(rows, rhs)]
    pivots = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, m) if aug[i][c] != 0), None)
        if pivot is None:
            continue
        aug[r], aug[pivot] = aug[pivot], aug[r]
        inv = 1 / aug[r][c]
        aug[r] = [v * inv for v in aug[r]]
        for i in range(m):
            if i != r and aug[i][c] != 0:
                factor = aug[i][c]
                aug[i] = [v - factor * w for v, w in zip(aug[i], aug[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break
    rank = len(pivots)
    for i in range(rank, m):
        if aug[i][ncols] != 0:
            return None, rank  # inconsistent
    if rank < ncols:
        return None, rank  # underdetermined
    solution = [Fraction(0)] * ncols
    for i, c in enumerate(pivots):
        solution[c] = aug[i][ncols]
    return solution, rank


# -- entropy utility ------------------------------------------------------------


def _to_mpf(v):
    if isinstance(v, Fraction):
        return mpmath.mpf(v.numerator) / v.denominator
    if isinstance(v, str):
        if "/" in v:
            f = Fraction(v)
            return mpmath.mpf(f.numerator) / f.denominator
        return mpmath.mpf(v)
    return mpmath.mpf(v)


def entropy(matrix, digits: int = 50) -> BigFloat:
    """Von Neumann entropy -Tr(D log D) of a density matrix, natural log.

    The matrix must be real symmetric, positive semidefinite and of unit
    trace within the working tolerance; 0 log 0 counts as 0.
    """
    with mpmath.workdps(digits + 10):
        rows = [list(r) for r in matrix]
        dim = len(rows)
        if any(len(r) != dim for r in rows):
            raise NotADensityMatrix("matrix is not square")
        M = mpmath.matrix([[_to_mpf(v) for v in row] for row in rows])
        tol = mpmath.mpf(10) ** (-(digits // 2))
        asym = max(
            (abs(M[i, j] - M[j, i]) for i in range(dim) for j in range(i)),
            default=mpmath.mpf(0),
        )
        if asym > tol:
            raise NotADensityMatrix(f"not symmetric (deviation {asym})")
        trace = sum((M[i, i] for i in range(dim)), mpmath.mpf(0))
        if abs(trace - 1) > tol:
            raise NotADensityMatrix(f"trace {trace} is not 1")
        eigenvalues = mpmath.eigsy(M, eigvals_only=True)
        s = mpmath.mpf(0)
        for lam in eigenvalues:
            if lam < -tol:
                raise NotADensityMatrix(f"negative eigenvalue {lam}")
            if lam > 0:
                s -= lam * mpmath.log(lam)
        return BigFloat(+s, digits)
