"""Fermion-current generator algebra: letters, normal ordering, modes.

Letters are the five generating functions b*, c*, j+, j0, j- attached to a
spectral variable (identified by site index).  A plain product is rewritten
into the normal-ordered basis pairwise: every letter pair carrying a rule
emits its correction word, and emitted lower-degree words are re-normal-
ordered until no rule applies.  The pair sum runs over unordered pairs of
the input, so the result cannot depend on rule-application order.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .errors import NonTerminating, SingularExtraction
from .exact import Poly, RationalFunction

__all__ = [
    "Letter",
    "KINDS",
    "RULES",
    "normal_order",
    "NormalForm",
    "mode_extract",
    "admissible",
    "parse_word",
]

KINDS = ("b*", "c*", "j+", "j0", "j-")
_KIND_ORDER = {k: i for i, k in enumerate(KINDS)}
_FERMIONS = {"b*", "c*"}


@dataclass(frozen=True, order=False)
class Letter:
    kind: str
    site: int

    def __post_init__(self):
        if self.kind not in _KIND_ORDER:
            raise ValueError(f"unknown generator kind {self.kind!r}")

    @property
    def fermionic(self) -> bool:
        return self.kind in _FERMIONS

    def sort_key(self):
        return (_KIND_ORDER[self.kind], self.site)

    def __repr__(self):
        return f"{self.kind}({self.site})"


# Two-point rule table: plain A(l) B(m) = :A(l)B(m): + sum over corrections
# coeff * emission(m) / (l - m)^pole  (emission None means the identity).
# Keys are (kind_A, kind_B); pairs absent in both orientations are regular.
RULES: dict[tuple[str, str], list[tuple[int, str | None, Fraction]]] = {
    ("j0", "j0"): [(2, None, Fraction(2))],
    ("j+", "j-"): [(1, "j0", Fraction(-1)), (2, None, Fraction(-1))],
    ("j+", "j0"): [(1, "j+", Fraction(-2))],
    ("j0", "j-"): [(1, "j-", Fraction(-2))],
    ("b*", "j-"): [(1, "c*", Fraction(1))],
    ("c*", "j+"): [(1, "b*", Fraction(-1))],
    ("b*", "j0"): [(1, "b*", Fraction(-1))],
    ("c*", "j0"): [(1, "c*", Fraction(1))],
}

MAX_WORD_LEN = 24


def pair_corrections(a: Letter, b: Letter):
    """Corrections for the unordered letter pair {a, b}.

    Returns a list of (pole, emission Letter | None, coeff, lam_site, mu_site)
    where the correction reads coeff * emission(mu)/(lam - mu)^pole.
    """
    rule = RULES.get((a.kind, b.kind))
    if rule is not None:
        lam, mu = a.site, b.site
    else:
        rule = RULES.get((b.kind, a.kind))
        if rule is None:
            return []
        lam, mu = b.site, a.site
    out = []
    for pole, emission, coeff in rule:
        letter = Letter(emission, mu) if emission is not None else None
        out.append((pole, letter, coeff, lam, mu))
    return out


def canonicalize(word) -> tuple[int, tuple[Letter, ...]] | None:
    """Stable-sort a word into canonical order with fermion parity.

    Returns (sign, sorted word); None when two identical fermion letters
    collide (the square of a fermion generator vanishes).
    """
    word = list(word)
    indexed = list(enumerate(word))
    indexed.sort(key=lambda item: (item[1].sort_key(), item[0]))
    # fermion parity: inversions of the original positions restricted to
    # fermionic letters
    fermion_positions = [idx for idx, let in indexed if let.fermionic]
    sign = 1
    for i in range(len(fermion_positions)):
        for j in range(i + 1, len(fermion_positions)):
            if fermion_positions[i] > fermion_positions[j]:
                sign = -sign
    sorted_word = tuple(let for _, let in indexed)
    for x, y in zip(sorted_word, sorted_word[1:]):
        if x.fermionic and x == y:
            return None
    return sign, sorted_word


class NormalForm:
    """Linear combination of normal-ordered words over RationalFunction."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int):
        self.nvars = nvars
        self.terms: dict[tuple[Letter, ...], RationalFunction] = {}

    def add(self, word: tuple[Letter, ...], coeff: RationalFunction):
        if coeff.is_zero():
            return
        if word in self.terms:
            total = self.terms[word] + coeff
            if total.is_zero():
                del self.terms[word]
            else:
                self.terms[word] = total
        else:
            self.terms[word] = coeff

    def __add__(self, other: "NormalForm") -> "NormalForm":
        out = NormalForm(self.nvars)
        out.terms = dict(self.terms)
        for word, coeff in other.terms.items():
            out.add(word, coeff)
        return out

    def scale(self, factor) -> "NormalForm":
        out = NormalForm(self.nvars)
        for word, coeff in self.terms.items():
            out.add(word, coeff * factor)
        return out

    def __eq__(self, other):
        if not isinstance(other, NormalForm):
            return NotImplemented
        keys = set(self.terms) | set(other.terms)
        zero = RationalFunction.constant(self.nvars, 0)
        for key in keys:
            if self.terms.get(key, zero) != other.terms.get(key, zero):
                return False
        return True

    def __repr__(self):
        if not self.terms:
            return "0"
        bits = []
        for word in sorted(self.terms, key=lambda w: (len(w), [l.sort_key() for l in w])):
            coeff = self.terms[word]
            name = ":" + " ".join(map(repr, word)) + ":" if word else "1"
            bits.append(f"({coeff!r}) * {name}")
        return " + ".join(bits)

    def to_json(self) -> list:
        out = []
        for word in sorted(self.terms, key=lambda w: (len(w), [l.sort_key() for l in w])):
            coeff = self.terms[word]
            out.append(
                {
                    "word": [[l.kind, l.site] for l in word],
                    "coeff": _ratfunc_json(coeff),
                }
            )
        return out


def _poly_json(p: Poly) -> list:
    return [[list(expo), str(coeff)] for expo, coeff in sorted(p.terms.items())]


def _ratfunc_json(r: RationalFunction) -> dict:
    return {
        "num": _poly_json(r.num),
        "den": [[_poly_json(f), k] for f, k in sorted(r.den.items(), key=lambda kv: kv[0]._key())],
    }


def _difference(nvars: int, i: int, j: int) -> Poly:
    return Poly.variable(nvars, i) - Poly.variable(nvars, j)


def normal_order(word, nvars: int | None = None, coeff=None) -> NormalForm:
    """Normal form of a plain product of letters.

    plain(word) = sign * :sorted word: + sum over unordered rule pairs of
    coeff * normal_order(word with the pair replaced by its emission).
    Emitted words are one letter shorter, so the recursion terminates; the
    pair sum is symmetric, so the result is independent of the order in
    which rules are applied.
    """
    word = tuple(word)
    if len(word) > MAX_WORD_LEN:
        raise NonTerminating(f"word length {len(word)} exceeds guard")
    if nvars is None:
        nvars = 1 + max((l.site for l in word), default=0)
    if coeff is None:
        coeff = RationalFunction.constant(nvars, 1)
    nf = NormalForm(nvars)
    canon = canonicalize(word)
    if canon is not None:
        sign, sorted_word = canon
        nf.add(sorted_word, coeff * sign)
    for p in range(len(word)):
        for q in range(p + 1, len(word)):
            a, b = word[p], word[q]
            if a.site == b.site:
                # same spectral variable: the two-point kernel has no
                # separation to expand in; such pairs never carry rules here
                if pair_corrections(a, b):
                    raise SingularExtraction(
                        f"coincident arguments in correction pair {a!r}, {b!r}"
                    )
                continue
            for pole, emission, c, lam, mu in pair_corrections(a, b):
                # fermion transport parity: a fermionic letter of the pair
                # crosses every fermion strictly between positions p and q
                sign = 1
                if a.fermionic or b.fermionic:
                    crossings = sum(
                        1 for r in range(p + 1, q) if word[r].fermionic
                    )
                    sign = -1 if crossings % 2 else 1
                emitted = [
                    letter for r, letter in enumerate(word) if r != p and r != q
                ]
                if emission is not None:
                    # insert at the position of the mu-slot letter
                    mu_pos = q if word[q].site == mu else p
                    insert_at = sum(
                        1 for r in range(mu_pos) if r != p and r != q
                    )
                    emitted.insert(insert_at, emission)
                diff = _difference(nvars, lam, mu)
                factor = RationalFunction(
                    Poly.constant(nvars, c * sign), {diff: pole}
                )
                lower = normal_order(tuple(emitted), nvars, coeff * factor)
                nf = nf + lower
    return nf


def admissible(counts: dict[str, int], n: int) -> bool:
    """Counting constraints for products of modes on an n-site chain."""
    total = sum(counts.get(k, 0) for k in KINDS)
    if total > n:
        return False
    charge = (
        counts.get("b*", 0)
        - counts.get("c*", 0)
        + 2 * counts.get("j+", 0)
        - 2 * counts.get("j-", 0)
    )
    return charge == 0


_TOKEN = re.compile(r"(b\*|c\*|j\+|j0|j-)\s*\(\s*(\d+)\s*\)")


def parse_word(text: str) -> list[Letter]:
    """Parse 'j+(1) j-(2)' style words; site indices are 1-based outside."""
    text = text.strip()
    if text.startswith(":") and text.endswith(":"):
        text = text[1:-1]
    letters = []
    pos = 0
    while pos < len(text):
        if text[pos] in " ,\t":
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if not m:
            raise ValueError(f"cannot parse word at {text[pos:]!r}")
        letters.append(Letter(m.group(1), int(m.group(2)) - 1))
        pos = m.end()
    if not letters:
        raise ValueError("empty word")
    return letters


def mode_extract(nf: NormalForm, modes: list[int]) -> dict:
    """Coefficient of prod_i lambda_i^(modes[i]-1) as normal-ordered modes.

    Each normal-form term must carry at most one letter per site.  The
    rational coefficient must be polynomial after exact cancellation of
    spectral-difference denominators; a surviving pole raises
    SingularExtraction.
    """
    nvars = nf.nvars
    if len(modes) != nvars:
        raise ValueError("one target mode per spectral variable required")
    if any(p < 1 for p in modes):
        raise ValueError("modes are positive integers")
    out: dict[tuple, Fraction] = {}
    for word, coeff in nf.terms.items():
        sites = [l.site for l in word]
        if len(set(sites)) != len(sites):
            raise SingularExtraction("two letters share a spectral variable")
        num = coeff.num
        for factor, power in coeff.den.items():
            for _ in range(power):
                q = num.divide_exact(factor)
                if q is None:
                    raise SingularExtraction(
                        f"pole {factor!r} has no regular part at the origin"
                    )
                num = q
        # num is now a polynomial; distribute its monomials over letter modes
        for expo, value in num.terms.items():
            target: dict[tuple, int] = {}
            ok = True
            letter_modes = []
            for letter in word:
                d = expo[letter.site]
                q = modes[letter.site] - d
                if q < 1:
                    ok = False
                    break
                letter_modes.append((letter.kind, q))
            if not ok:
                continue
            for site in range(nvars):
                if site in sites:
                    continue
                if expo[site] != modes[site] - 1:
                    ok = False
                    break
            if not ok:
                continue
            sign, key = _sort_modes(word, letter_modes)
            out[key] = out.get(key, Fraction(0)) + sign * value
    return {k: v for k, v in out.items() if v != 0}


def _sort_modes(word, letter_modes):
    indexed = list(enumerate(letter_modes))
    indexed.sort(key=lambda item: (_KIND_ORDER[item[1][0]], item[1][1], item[0]))
    fermion_positions = [
        idx for idx, (kind, _) in indexed if kind in _FERMIONS
    ]
    sign = 1
    for i in range(len(fermion_positions)):
        for j in range(i + 1, len(fermion_positions)):
            if fermion_positions[i] > fermion_positions[j]:
                sign = -sign
    return sign, tuple(lm for _, lm in indexed)
