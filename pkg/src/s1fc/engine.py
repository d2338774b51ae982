"""Dominant Matsubara eigenvector and the direct expectation functional.

The dominant state is selected on the fused transfer matrix at zero;
eigenpairs are exact rationals whenever the characteristic polynomial
splits rationally (and always for scalar transfer matrices), otherwise
high-precision floats with a posteriori residual certification.  The
expectation of a length-n operator contracts the fused monodromy entries
against the operator and divides by the eigenvalue product and the norm.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import mpmath

from .errors import (
    DegenerateDominantEigenvalue,
    DimensionMismatch,
    ZeroEigenvalue,
)
from .exact import BigFloat
from .lattice import (
    MatsubaraData,
    Matrix,
    fused_monodromy_blocks,
    fused_transfer_matrix,
    identity,
    kron,
    kron_all,
    mat_eq,
    mat_mul,
    mat_scale,
    spin_matrices,
    transfer_matrix,
    zeros,
)

__all__ = [
    "SpectralState",
    "LocalOperator",
    "dominant_state",
    "direct_expectation",
    "build_ss_operator",
    "brute_force_expectation",
    "char_poly",
    "check_sl2_invariant",
]


# -- exact linear algebra helpers ------------------------------------------------


def char_poly(a: Matrix) -> list:
    """Coefficients of det(x*Id - A), highest power first, exact.

    Faddeev-LeVerrier: M_0 = Id, c_{k} = -tr(A M_{k-1})/k,
    M_k = A M_{k-1} + c_k Id.
    """
    n = len(a)
    coeffs = [Fraction(1)]
    m = identity(n)
    for k in range(1, n + 1):
        am = mat_mul(a, m)
        c = -sum(am[i][i] for i in range(n)) / k
        coeffs.append(c)
        m = [
            [am[i][j] + (c if i == j else 0) for j in range(n)]
            for i in range(n)
        ]
    return coeffs


def _poly_eval(coeffs, x):
    acc = coeffs[0] * 0
    for c in coeffs:
        acc = acc * x + c
    return acc


def _poly_deflate(coeffs, root: Fraction):
    """Divide by (x - root); remainder must vanish."""
    out = [coeffs[0]]
    for c in coeffs[1:]:
        out.append(c + out[-1] * root)
    rem = out.pop()
    if rem != 0:
        raise ValueError("not a root")
    return out


def _poly_derivative(coeffs):
    n = len(coeffs) - 1
    return [c * (n - i) for i, c in enumerate(coeffs[:-1])]


def _poly_mod(a, b):
    """Remainder of a by b over the rationals."""
    a = list(a)
    while len(a) >= len(b) and any(a):
        if a[0] == 0:
            a.pop(0)
            continue
        f = a[0] / b[0]
        for i in range(len(b)):
            a[i] -= f * b[i]
        a.pop(0)
    while a and a[0] == 0:
        a.pop(0)
    return a


def _poly_gcd(a, b):
    """Monic gcd over the rationals."""
    a, b = list(a), list(b)
    while b:
        a, b = b, _poly_mod(a, b)
    lead = a[0]
    return [c / lead for c in a]


def _poly_div(a, b):
    """Exact quotient a / b (remainder must vanish)."""
    a = list(a)
    out = []
    while len(a) >= len(b):
        f = a[0] / b[0]
        out.append(f)
        for i in range(len(b)):
            a[i] -= f * b[i]
        a.pop(0)
    if any(a):
        raise ValueError("non-exact polynomial division")
    return out


def _square_free(coeffs):
    """(square-free part, repeated-root part) of an exact polynomial."""
    d = _poly_derivative(coeffs)
    g = _poly_gcd(coeffs, d)
    if len(g) == 1:
        return list(coeffs), [Fraction(1)]
    return _poly_div(coeffs, g), g


def _rational_reconstruct(x, coeffs):
    """Exact rational root near the float x, or None."""
    scaled = int(mpmath.floor(x * mpmath.mpf(2) ** 120 + mpmath.mpf(1) / 2))
    cand = Fraction(scaled, 2 ** 120).limit_denominator(10 ** 24)
    return cand if _poly_eval(coeffs, cand) == 0 else None


def _nullspace_vector(a: Matrix):
    """One exact kernel vector of A, plus the kernel dimension."""
    n = len(a)
    m = [row[:] for row in a]
    pivots = []
    r = 0
    for c in range(n):
        p = next((i for i in range(r, n) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(n):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(n) if c not in pivots]
    if not free:
        return None, 0
    # set the first free variable to 1
    v = [Fraction(0)] * n
    v[free[0]] = Fraction(1)
    for row_idx, c in enumerate(pivots):
        v[c] = -m[row_idx][free[0]]
    return v, len(free)


def _is_scalar(a: Matrix):
    val = a[0][0]
    for i in range(len(a)):
        for j in range(len(a)):
            if a[i][j] != (val if i == j else 0):
                return None
    return val


# -- spectral state ----------------------------------------------------------------


@dataclass
class SpectralState:
    md: MatsubaraData
    digits: int
    eigenvalue: object
    vector: list
    left: list
    exact: bool
    scalar_transfer: bool = False
    _eig_cache: dict = field(default_factory=dict, repr=False)

    @property
    def norm(self):
        return _dot(self.left, self.vector)

    def fused_eigenvalue(self, lam):
        """Eigenvalue of the fused transfer matrix at lam on this state."""
        key = ("f", Fraction(lam)) if self.exact else ("f", lam)
        if key not in self._eig_cache:
            a = fused_transfer_matrix(Fraction(lam), self.md)
            self._eig_cache[key] = self._eigenvalue_on(a)
        return self._eig_cache[key]

    def transfer_eigenvalue(self, lam):
        """Eigenvalue of the spin-1/2 transfer matrix at lam on this state."""
        key = ("t", Fraction(lam)) if self.exact else ("t", lam)
        if key not in self._eig_cache:
            a = transfer_matrix(Fraction(lam), self.md)
            self._eig_cache[key] = self._eigenvalue_on(a)
        return self._eig_cache[key]

    def _eigenvalue_on(self, a: Matrix):
        if self.exact:
            w = _mat_vec(a, self.vector)
            pivot = next(i for i, x in enumerate(self.vector) if x != 0)
            t = w[pivot] / self.vector[pivot]
            if any(wi != t * vi for wi, vi in zip(w, self.vector)):
                raise DegenerateDominantEigenvalue(
                    "state is not a joint eigenvector of the commuting family"
                )
            return t
        af = [[mpmath.mpf(str(x)) for x in row] for row in a]
        w = _mat_vec(af, self.vector)
        t = _dot(self.left, w) / self.norm
        resid = max(abs(wi - t * vi) for wi, vi in zip(w, self.vector))
        scale = max(abs(x) for x in self.vector)
        if resid > mpmath.mpf(10) ** (-self.digits) * max(scale, 1) * 10 ** 6:
            raise DegenerateDominantEigenvalue(
                "joint-eigenvector residual exceeds certification bound"
            )
        return t


def _dot(u, v):
    return sum(x * y for x, y in zip(u, v))


def _mat_vec(a, v):
    return [sum(x * y for x, y in zip(row, v) if x) for row in a]


def dominant_state(md: MatsubaraData, digits: int = 50) -> SpectralState:
    """Eigenvector of the fused transfer matrix at 0 with maximal |eigenvalue|.

    Scalar transfer matrices (single-site chains) keep every vector; the
    first basis vector is returned and flagged.  Otherwise the exact
    characteristic polynomial is computed; rational dominant roots give an
    exact rational eigenpair, irrational ones a certified high-precision
    pair.
    """
    a = fused_transfer_matrix(0, md)
    n = len(a)
    scalar = _is_scalar(a)
    if scalar == 0:
        raise DegenerateDominantEigenvalue(
            "fused transfer matrix vanishes identically at 0"
        )
    if scalar is not None and md.L == 1:
        # single irrep: every vector is an eigenvector; pick e1
        e1 = [Fraction(1)] + [Fraction(0)] * (n - 1)
        return SpectralState(
            md=md,
            digits=digits,
            eigenvalue=scalar,
            vector=e1,
            left=list(e1),
            exact=True,
            scalar_transfer=True,
        )
    coeffs = char_poly(a)
    # distinct eigenvalues are the roots of the square-free part; the
    # repeated part flags multiplicity without huge-integer factoring
    square_free, repeated = _square_free(coeffs)
    mpmath.mp.dps = digits + 30
    roots = mpmath.polyroots(
        [mpmath.mpf(str(c)) for c in square_free], maxsteps=300, extraprec=250
    )
    by_mod = sorted(roots, key=lambda r: -abs(r))
    top, second = by_mod[0], (by_mod[1] if len(by_mod) > 1 else None)
    tol = mpmath.mpf(10) ** (-(digits + 5))
    if second is not None and abs(abs(top) - abs(second)) <= tol * max(abs(top), 1):
        raise DegenerateDominantEigenvalue(
            f"two eigenvalues share the maximal modulus |{top}|"
        )
    if abs(mpmath.im(top)) > tol * max(abs(top), 1):
        raise DegenerateDominantEigenvalue(
            "maximal-modulus eigenvalue is a complex pair"
        )
    top = mpmath.re(top)
    exact_root = _rational_reconstruct(top, coeffs)
    if exact_root is not None:
        mult = 0
        work = list(coeffs)
        while True:
            try:
                work = _poly_deflate(work, exact_root)
                mult += 1
            except ValueError:
                break
        if mult > 1:
            raise DegenerateDominantEigenvalue(
                f"dominant eigenvalue {exact_root} has multiplicity {mult}"
            )
        shifted = [
            [a[i][j] - (exact_root if i == j else 0) for j in range(n)]
            for i in range(n)
        ]
        v, kdim = _nullspace_vector(shifted)
        if v is None or kdim != 1:
            raise DegenerateDominantEigenvalue(
                f"eigenspace of {exact_root} is {kdim}-dimensional"
            )
        at = [[a[j][i] for j in range(n)] for i in range(n)]
        if mat_eq(a, at):
            w = list(v)
        else:
            shifted_t = [
                [at[i][j] - (exact_root if i == j else 0) for j in range(n)]
                for i in range(n)
            ]
            w, wk = _nullspace_vector(shifted_t)
            if w is None or wk != 1:
                raise DegenerateDominantEigenvalue("left eigenspace degenerate")
        state = SpectralState(
            md=md, digits=digits, eigenvalue=exact_root,
            vector=v, left=w, exact=True,
        )
        if state.norm == 0:
            raise DegenerateDominantEigenvalue("left/right pairing vanishes")
        return state
    # certified float path: Newton-polish the root of the exact polynomial
    if len(repeated) > 1 and abs(
        _poly_eval([mpmath.mpf(str(c)) for c in repeated], top)
    ) <= tol * max(abs(top), 1):
        raise DegenerateDominantEigenvalue(
            "dominant eigenvalue has multiplicity > 1"
        )
    root = top
    for _ in range(80):
        p = _poly_eval([mpmath.mpf(str(c)) for c in coeffs], root)
        dp_coeffs = [
            mpmath.mpf(str(c * (len(coeffs) - 1 - i)))
            for i, c in enumerate(coeffs[:-1])
        ]
        dp = _poly_eval(dp_coeffs, root)
        step = p / dp
        root -= step
        if abs(step) <= mpmath.mpf(10) ** (-(digits + 15)) * max(abs(root), 1):
            break
    af = [[mpmath.mpf(str(x)) for x in row] for row in a]
    v = _inverse_iteration(af, root, digits)
    at = [[af[j][i] for j in range(n)] for i in range(n)]
    symmetric = mat_eq(a, [[a[j][i] for j in range(n)] for i in range(n)])
    w = list(v) if symmetric else _inverse_iteration(at, root, digits)
    state = SpectralState(
        md=md, digits=digits, eigenvalue=root, vector=v, left=w, exact=False,
    )
    resid = max(
        abs(x - root * y) for x, y in zip(_mat_vec(af, v), v)
    )
    if resid > mpmath.mpf(10) ** (-digits) * 10 ** 5:
        raise DegenerateDominantEigenvalue(
            f"eigenpair residual {resid} exceeds certification bound"
        )
    if abs(state.norm) <= mpmath.mpf(10) ** (-digits):
        raise DegenerateDominantEigenvalue("left/right pairing vanishes")
    return state


def _inverse_iteration(af, root, digits):
    n = len(af)
    eps = mpmath.mpf(10) ** (-(digits + 10))
    shifted = mpmath.matrix(
        [[af[i][j] - (root + eps if i == j else 0) for j in range(n)] for i in range(n)]
    )
    v = mpmath.matrix([mpmath.mpf(1) + mpmath.mpf(k) / n for k in range(n)])
    for _ in range(4):
        v = mpmath.lu_solve(shifted, v)
        scale = max(abs(x) for x in v)
        v = v / scale
    return [v[i] for i in range(n)]


# -- local operators ----------------------------------------------------------------


@dataclass(frozen=True)
class LocalOperator:
    n: int
    matrix: tuple

    def __post_init__(self):
        d = 3 ** self.n
        if len(self.matrix) != d or any(len(r) != d for r in self.matrix):
            raise DimensionMismatch(
                f"operator on [1,{self.n}] must be {d}x{d}"
            )

    @classmethod
    def from_rows(cls, n: int, rows) -> "LocalOperator":
        return cls(n=n, matrix=tuple(tuple(Fraction(x) for x in row) for row in rows))

    def scaled(self, s) -> "LocalOperator":
        s = Fraction(s)
        return LocalOperator(
            n=self.n, matrix=tuple(tuple(x * s for x in row) for row in self.matrix)
        )


def build_ss_operator(n: int) -> LocalOperator:
    """Neighbour coupling of the boundary sites of [1,n]:
    h/2 (x) Id (x) h/2 * 2 + e (x) Id (x) f + f (x) Id (x) e,
    i.e. 1/2 h(x)h + e(x)f + f(x)e with identity on interior sites.
    """
    if n < 2:
        raise ValueError("interval length must be >= 2")
    h, e, f = spin_matrices(2)
    mid = identity(3 ** (n - 2))
    total = mat_scale(kron_all([h, mid, h]), Fraction(1, 2))
    total = [
        [x + y for x, y in zip(r1, r2)]
        for r1, r2 in zip(total, kron_all([e, mid, f]))
    ]
    total = [
        [x + y for x, y in zip(r1, r2)]
        for r1, r2 in zip(total, kron_all([f, mid, e]))
    ]
    return LocalOperator.from_rows(n, total)


def check_sl2_invariant(op: LocalOperator) -> bool:
    """Commutation with the global generators on [1,n], exactly."""
    h, e, f = spin_matrices(2)
    n = op.n
    m = [list(row) for row in op.matrix]
    for gen in (h, e, f):
        total = zeros(3 ** n)
        for k in range(n):
            parts = [identity(3)] * n
            parts[k] = gen
            total = [
                [x + y for x, y in zip(r1, r2)]
                for r1, r2 in zip(total, kron_all(parts))
            ]
        if not mat_eq(mat_mul(total, m), mat_mul(m, total)):
            return False
    return True


# -- direct expectation ---------------------------------------------------------------


def direct_expectation(
    op: LocalOperator, lambdas, md: MatsubaraData, digits: int = 50,
    state: SpectralState | None = None,
):
    """<Psi| Tr_[1,n] (TT_1(l_1)...TT_n(l_n) O) |Psi> / (prod TT(l_j) <Psi|Psi>).

    Exact Fraction when the dominant eigenpair is rational, else BigFloat.
    """
    n = op.n
    lambdas = [Fraction(l) for l in lambdas]
    if len(lambdas) != n:
        raise DimensionMismatch(
            f"operator length {n} needs {n} spectral parameters, got {len(lambdas)}"
        )
    if state is None:
        state = dominant_state(md, digits)
    exact = state.exact
    blocks = []
    for lam in lambdas:
        blk = fused_monodromy_blocks(lam, md)
        if not exact:
            blk = [
                [[[mpmath.mpf(str(x)) for x in row] for row in b] for b in brow]
                for brow in blk
            ]
        blocks.append(blk)
    # eigenvalue denominators
    denom = state.norm
    for lam in lambdas:
        t = state.fused_eigenvalue(lam)
        if (exact and t == 0) or (not exact and abs(t) < mpmath.mpf(10) ** (-digits)):
            raise ZeroEigenvalue(f"fused transfer eigenvalue vanishes at {lam}")
        denom = denom * t
    # right-to-left vector chains: chains[(i_k.., j_k..)] = TT_k .. TT_n |Psi>
    chains = {((), ()): list(state.vector)}
    for k in range(n - 1, -1, -1):
        new = {}
        for (i_suf, j_suf), vec in chains.items():
            for i in range(3):
                for j in range(3):
                    w = _mat_vec(blocks[k][i][j], vec)
                    new[((i,) + i_suf, (j,) + j_suf)] = w
        chains = new
    total = None
    mat = op.matrix
    for (i_vec, j_vec), vec in chains.items():
        i_flat = 0
        j_flat = 0
        for a, b in zip(i_vec, j_vec):
            i_flat = i_flat * 3 + a
            j_flat = j_flat * 3 + b
        o = mat[j_flat][i_flat]
        if not o:
            continue
        contrib = _dot(state.left, vec)
        term = (Fraction(o) if exact else mpmath.mpf(str(o))) * contrib
        total = term if total is None else total + term
    if total is None:
        total = Fraction(0) if exact else mpmath.mpf(0)
    value = total / denom
    if exact:
        return value
    return BigFloat(value, digits)


def brute_force_expectation(op: LocalOperator, lambdas, md: MatsubaraData):
    """Independent oracle: assemble the full (3^n * dim) matrices, multiply,
    partial-trace the auxiliary interval, then sandwich.  Exact path only.
    """
    n = op.n
    dim = md.dim
    lambdas = [Fraction(l) for l in lambdas]
    state = dominant_state(md)
    if not state.exact:
        raise ValueError("oracle requires a rational eigenpair")
    big = None
    for k, lam in enumerate(lambdas):
        dense = zeros(3 ** n * dim)
        blk = fused_monodromy_blocks(lam, md)
        for i in range(3):
            for j in range(3):
                for r in range(dim):
                    for c in range(dim):
                        v = blk[i][j][r][c]
                        if not v:
                            continue
                        # lift auxiliary index to factor k of the 3^n space
                        before = 3 ** k
                        after = 3 ** (n - 1 - k)
                        for a in range(before):
                            for b in range(after):
                                row = ((a * 3 + i) * after + b) * dim + r
                                col = ((a * 3 + j) * after + b) * dim + c
                                dense[row][col] = v
        big = dense if big is None else mat_mul(big, dense)
    op_lift = kron([[Fraction(x) for x in row] for row in op.matrix], identity(dim))
    big = mat_mul(big, op_lift)
    # partial trace over the 3^n auxiliary factor
    traced = zeros(dim)
    for a in range(3 ** n):
        for r in range(dim):
            for c in range(dim):
                traced[r][c] += big[a * dim + r][a * dim + c]
    num = _dot(state.left, _mat_vec(traced, state.vector))
    denom = state.norm
    for lam in lambdas:
        denom *= state.fused_eigenvalue(lam)
    return num / denom
