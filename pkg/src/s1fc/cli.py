"""Command-line front end: exact identity checks, direct expectations,
correlator evaluation, reference regression, entropy and normal ordering.

Machine-readable JSON goes to stdout (deterministic for a fixed config:
sorted keys, exact values serialized as strings); a short human-readable
table goes to stderr.  Exit code 0 on success, 1 on a failed invariant,
2 on configuration errors, with a structured diagnostic either way.
"""

from __future__ import annotations

import json
import random
import sys
from fractions import Fraction

import click

from . import engine as en
from . import lattice as lt
from . import pipeline as pl
from .currents import normal_order, parse_word
from .errors import ConfigError, S1FCError
from .exact import BigFloat, decimal_str

# invariant names surfaced with failure diagnostics
_INVARIANTS = {
    "CheckFailed": "exact lattice identity",
    "ConfigError": "valid run configuration",
    "DimensionMismatch": "operator/state dimension consistency",
    "DegenerateDominantEigenvalue": "unique dominant Matsubara eigenvalue",
    "ZeroEigenvalue": "nonvanishing transfer eigenvalues at the spectral points",
    "CalibrationFailure": "fusion calibration against the explicit R-matrix",
    "NotADensityMatrix": "density-matrix positivity/trace normalization",
    "ResidualOmega": "complete two-point-kernel cancellation",
    "UncalibratedSign": "calibrated sign convention for the monomial class",
    "DirectionDependence": "direction-independent homogeneous limit",
    "SingularExtraction": "regular coincident-point limit",
    "NonTerminating": "terminating normal-ordering recursion",
    "SingularSystem": "solvable exact linear system",
    "ZeroDenominator": "nonvanishing denominators",
    "S1FCError": "library invariant",
    "ValueError": "valid input data",
}


class CheckFailed(S1FCError):
    """An exact identity check returned false."""


def _emit(payload: dict, out: str | None, table_rows) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
        print(f"wrote {out}", file=sys.stderr)
    else:
        sys.stdout.write(text)
    if table_rows:
        width = max(len(k) for k, _ in table_rows)
        for k, v in table_rows:
            print(f"  {k.ljust(width)}  {v}", file=sys.stderr)


def _fail(exc: BaseException) -> None:
    name = type(exc).__name__
    payload = {
        "error": name,
        "message": str(exc),
        "invariant": _INVARIANTS.get(name, "library invariant"),
    }
    sys.stdout.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    sys.exit(2 if isinstance(exc, ConfigError) else 1)


def _frac(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"cannot parse rational {text!r}") from exc


def _frac_list(text: str) -> list:
    return [_frac(t) for t in text.split(",") if t.strip()]


def _load_md(path: str) -> lt.MatsubaraData:
    try:
        return lt.MatsubaraData.from_file(path)
    except (OSError, KeyError, ValueError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read Matsubara data from {path}: {exc}") from exc


def _parse_operator(spec: str, n_lambdas: int) -> en.LocalOperator:
    if spec in ("id", "identity"):
        n = n_lambdas
    elif spec.startswith("id:"):
        n = int(spec.split(":", 1)[1])
    elif spec == "ss":
        n = n_lambdas
    elif spec.startswith("ss:"):
        n = int(spec.split(":", 1)[1])
    else:
        try:
            with open(spec) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(
                f"operator spec {spec!r} is neither a builtin nor a readable JSON file"
            ) from exc
        rows = data["matrix"] if isinstance(data, dict) else data
        size = len(rows)
        n = 0
        d = 1
        while d < size:
            d *= 3
            n += 1
        if d != size:
            raise ConfigError(f"operator size {size} is not a power of 3")
        return en.LocalOperator.from_rows(n, rows)
    if spec.startswith("ss") :
        return en.build_ss_operator(n)
    d = 3 ** n
    return en.LocalOperator.from_rows(
        n, [[1 if i == j else 0 for j in range(d)] for i in range(d)]
    )


@click.group()
def main() -> None:
    """Exact correlation-function toolkit for the integrable spin-1 chain."""


@main.group()
def check() -> None:
    """Exact identity checks (Yang-Baxter, fusion, commutation, eigenvalue)."""


@check.command("yang-baxter")
@click.option("--seed", default=0, show_default=True, help="Seed for random spectral points.")
@click.option("--trials", default=20, show_default=True, help="Random (zeta, eta) pairs.")
def check_yang_baxter(seed: int, trials: int) -> None:
    """Spin-1 R-matrix Yang-Baxter identity, plus the mixed Lax check."""
    try:
        rng = random.Random(seed)
        pairs = [(Fraction(1, 3), Fraction(2, 5)), (Fraction(0), Fraction(0))]
        for _ in range(trials):
            pairs.append(
                (
                    Fraction(rng.randint(-40, 40), rng.randint(1, 12)),
                    Fraction(rng.randint(-40, 40), rng.randint(1, 12)),
                )
            )
        lax_s1 = lambda x: lt.lax(x, 2)  # noqa: E731
        for z, e in pairs:
            if not lt.check_yang_baxter(lt.r_s1, lt.r_s1, lt.r_s1, z, e):
                raise CheckFailed(f"Yang-Baxter fails for the spin-1 R at ({z}, {e})")
            if not lt.check_yang_baxter(
                lax_s1, lax_s1, lt.r_s1, z, e, dims=(2, 3, 3)
            ):
                raise CheckFailed(f"mixed Lax/R Yang-Baxter fails at ({z}, {e})")
        payload = {
            "command": "check.yang-baxter",
            "ok": True,
            "points": len(pairs),
            "seed": seed,
        }
        _emit(payload, None, [("yang-baxter", f"ok at {len(pairs)} points")])
    except (S1FCError, ValueError) as exc:
        _fail(exc)


@check.command("fusion")
@click.option("--matsubara", required=True, help="Matsubara data file (JSON/TOML).")
@click.option("--n", default=1, show_default=True, help="Number of fused pairs.")
@click.option("--lam", default="1/3", show_default=True, help="Spectral point.")
def check_fusion_cmd(matsubara: str, n: int, lam: str) -> None:
    """Fused pair product preserves the symmetric auxiliary subspace."""
    try:
        md = _load_md(matsubara)
        point = _frac(lam)
        if not lt.check_fusion(point, md, n=n):
            raise CheckFailed(f"fusion identity fails at lambda={point}, n={n}")
        payload = {
            "command": "check.fusion",
            "ok": True,
            "lambda": str(point),
            "n": n,
            "matsubara": md.to_json(),
        }
        _emit(payload, None, [("fusion", f"ok at lambda={point}, n={n}")])
    except (S1FCError, ValueError) as exc:
        _fail(exc)


@check.command("commute")
@click.option("--matsubara", required=True, help="Matsubara data file (JSON/TOML).")
@click.option("--lam", default="1/3", show_default=True)
@click.option("--mu", default="2/5", show_default=True)
@click.option("--fused/--no-fused", default=True, show_default=True,
              help="Also check the fused transfer matrix against the unfused one.")
def check_commute(matsubara: str, lam: str, mu: str, fused: bool) -> None:
    """[T(lam), T(mu)] = 0 exactly (optionally [TT(lam), T(mu)] = 0)."""
    try:
        md = _load_md(matsubara)
        a, b = _frac(lam), _frac(mu)
        if not lt.check_commutation(md, a, b):
            raise CheckFailed(f"[T({a}), T({b})] does not vanish")
        if fused and not lt.check_commutation(md, a, b, fused=True):
            raise CheckFailed(f"[TT({a}), T({b})] does not vanish")
        payload = {
            "command": "check.commute",
            "ok": True,
            "lambda": str(a),
            "mu": str(b),
            "fused": fused,
        }
        _emit(payload, None, [("commute", f"ok at ({a}, {b})")])
    except (S1FCError, ValueError) as exc:
        _fail(exc)


@check.command("eigenrelation")
@click.option("--matsubara", required=True, help="Matsubara data file (JSON/TOML).")
@click.option("--lam", default="1/3,5/7,9/2", show_default=True,
              help="Comma-separated spectral points.")
def check_eigenrelation(matsubara: str, lam: str) -> None:
    """TT(l) = T(l-1/2) T(l+1/2) - Delta(l) as exact matrices."""
    try:
        md = _load_md(matsubara)
        points = _frac_list(lam)
        if not points:
            raise ConfigError("need at least one spectral point")
        if not lt.check_eigen_relation(md, points):
            raise CheckFailed("fused/unfused eigenvalue relation fails")
        payload = {
            "command": "check.eigenrelation",
            "ok": True,
            "points": [str(p) for p in points],
            "delta": {str(p): str(lt.quantum_determinant(p, md)) for p in points},
        }
        _emit(payload, None, [("eigenrelation", f"ok at {len(points)} points")])
    except (S1FCError, ValueError) as exc:
        _fail(exc)


@main.command()
@click.option("--op", required=True,
              help='Operator: "ss:n", "id", or a JSON matrix file (entries "p/q").')
@click.option("--matsubara", required=True, help="Matsubara data file (JSON/TOML).")
@click.option("--lam", required=True, help="Comma-separated spectral parameters.")
@click.option("--digits", default=50, show_default=True)
def direct(op: str, matsubara: str, lam: str, digits: int) -> None:
    """Direct Matsubara expectation of a local operator on [1, n]."""
    try:
        md = _load_md(matsubara)
        lambdas = _frac_list(lam)
        operator = _parse_operator(op, len(lambdas))
        value = en.direct_expectation(operator, lambdas, md, digits=digits)
        exact = not isinstance(value, BigFloat)
        payload = {
            "command": "direct",
            "op": op,
            "lambdas": [str(l) for l in lambdas],
            "digits": digits,
            "exact": exact,
            "value": str(value) if exact else decimal_str(value, digits),
        }
        if exact:
            payload["decimal"] = decimal_str(value, min(digits, 30))
        _emit(payload, None, [("direct", payload["value"])])
    except (S1FCError, ValueError) as exc:
        _fail(exc)


@main.command()
@click.option("--n", "n", required=True, type=int, help="Interval length (2 or 3).")
@click.option("--digits", default=50, show_default=True)
@click.option("--directions", default=None,
              help="Homogeneous-limit direction tuple a1,a2,... (default 0,1,3).")
@click.option("--out", default=None, help="Write the JSON report to this path.")
def correlator(n: int, digits: int, directions: str | None, out: str | None) -> None:
    """Boundary two-spin correlator of [1, n] via the exact pipeline."""
    try:
        if n not in (2, 3):
            raise ConfigError("correlator supports n = 2 or 3 (4, 5 are reference-only)")
        dirs = tuple(_frac_list(directions)) if directions else None
        if dirs is not None and len(dirs) != n:
            raise ConfigError(f"direction tuple needs {n} entries")
        result = pl.correlator(n, directions=dirs, digits=digits)
        payload = {"command": "correlator", **result.to_json()}
        _emit(payload, out, [
            ("n", str(n)),
            ("exact", result.exact.pretty()),
            ("decimal", result.decimal),
        ])
    except (S1FCError, ValueError) as exc:
        _fail(exc)


@main.command()
@click.option("--n", "n", required=True, type=int, help="Interval length (2..5).")
@click.option("--digits", default=50, show_default=True)
@click.option("--out", default=None, help="Write the JSON report to this path.")
def reference(n: int, digits: int, out: str | None) -> None:
    """Stored exact boundary-correlator polynomials, evaluated numerically."""
    try:
        if n not in (2, 3, 4, 5):
            raise ConfigError("reference data covers n = 2..5")
        result = pl.reference_values(n, digits=digits)
        payload = {"command": "reference", **result.to_json()}
        _emit(payload, out, [
            ("n", str(n)),
            ("exact", result.exact.pretty()),
            ("decimal", result.decimal),
        ])
    except (S1FCError, ValueError) as exc:
        _fail(exc)


@main.command()
@click.option("--matrix", required=True, help='JSON density matrix (entries "p/q" or floats).')
@click.option("--digits", default=50, show_default=True)
def entropy(matrix: str, digits: int) -> None:
    """Von Neumann entropy -Tr(D log D) of a density matrix file."""
    try:
        try:
            with open(matrix) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read density matrix from {matrix}: {exc}") from exc
        rows = data["matrix"] if isinstance(data, dict) else data
        value = pl.entropy(rows, digits=digits)
        payload = {
            "command": "entropy",
            "digits": digits,
            "entropy": decimal_str(value, digits),
        }
        _emit(payload, None, [("entropy", payload["entropy"])])
    except (S1FCError, ValueError) as exc:
        _fail(exc)


@main.command("normal-order")
@click.option("--word", required=True,
              help='Product of letters, e.g. "j+(1) j0(2) j-(3)" (sites 1-based).')
@click.option("--out", default=None, help="Write the JSON report to this path.")
def normal_order_cmd(word: str, out: str | None) -> None:
    """Rewrite a plain product of currents into the normal-ordered basis."""
    try:
        letters = parse_word(word)
        nf = normal_order(letters)
        payload = {
            "command": "normal-order",
            "word": word,
            "terms": nf.to_json(),
        }
        rows = []
        for term in sorted(
            nf.terms, key=lambda w: (len(w), [l.sort_key() for l in w])
        ):
            name = (
                ":" + " ".join(f"{l.kind}({l.site + 1})" for l in term) + ":"
                if term
                else "1"
            )
            rows.append((name, repr(nf.terms[term])))
        _emit(payload, out, rows or [("normal-order", "0")])
    except (S1FCError, ValueError) as exc:
        _fail(exc)


if __name__ == "__main__":
    main()
