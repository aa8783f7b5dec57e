"""Bernoulli schemes on ``{0, ..., p-1}``, cylinder sets and the factor maps.

Index convention: non-negative indices are the p-adic side, negative indices
the real side, as in ``(..., a_{-2}, a_{-1} | t_0, t_1, ...)``. Words are
finite windows; reading outside the known window raises
:class:`PrecisionExhausted`.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import PrecisionExhausted, PrimeMismatch
from .padic import PadicInt, check_prime
from .rng import uniform_digits
from .solenoid import BasePFraction, SolenoidPoint


def _digit_tuple(p, digits):
    digits = tuple(int(d) for d in digits)
    if any(not 0 <= d < p for d in digits):
        raise ValueError(f"digits must lie in [0, {p})")
    return digits


@dataclass(frozen=True)
class TwoSidedWord:
    p: int
    neg: tuple = ()  # a_{-1}, a_{-2}, ..., a_{-L}
    nonneg: tuple = ()  # t_0, t_1, ..., t_{R-1}

    def __post_init__(self):
        p = check_prime(self.p)
        object.__setattr__(self, "neg", _digit_tuple(p, self.neg))
        object.__setattr__(self, "nonneg", _digit_tuple(p, self.nonneg))

    def __getitem__(self, i):
        if i >= 0:
            if i >= len(self.nonneg):
                raise PrecisionExhausted(f"index {i} outside window [-{len(self.neg)}, {len(self.nonneg)})")
            return self.nonneg[i]
        if -i > len(self.neg):
            raise PrecisionExhausted(f"index {i} outside window [-{len(self.neg)}, {len(self.nonneg)})")
        return self.neg[-i - 1]

    def to_json(self):
        return {"p": self.p, "neg": list(self.neg), "nonneg": list(self.nonneg)}

    @classmethod
    def from_json(cls, obj):
        if isinstance(obj, str):
            obj = json.loads(obj)
        return cls(obj["p"], tuple(obj["neg"]), tuple(obj["nonneg"]))


@dataclass(frozen=True)
class OneSidedWord:
    p: int
    digits: tuple = ()

    def __post_init__(self):
        p = check_prime(self.p)
        object.__setattr__(self, "digits", _digit_tuple(p, self.digits))

    def __getitem__(self, i):
        if not 0 <= i < len(self.digits):
            raise PrecisionExhausted(f"index {i} outside window [0, {len(self.digits)})")
        return self.digits[i]

    def __len__(self):
        return len(self.digits)


class EmptySet:
    """The empty cylinder intersection."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "EMPTY"


EMPTY = EmptySet()


@dataclass(frozen=True)
class CylinderSpec:
    """Finite partial digit assignment; stored as sorted ``(index, digit)`` pairs."""

    p: int
    constraints: tuple = ()

    def __post_init__(self):
        p = check_prime(self.p)
        items = self.constraints
        if isinstance(items, dict):
            items = items.items()
        pairs = tuple(sorted((int(i), int(d)) for i, d in items))
        idx = [i for i, _ in pairs]
        if len(set(idx)) != len(idx):
            raise ValueError("cylinder indices must be distinct")
        if any(not 0 <= d < p for _, d in pairs):
            raise ValueError(f"digits must lie in [0, {p})")
        object.__setattr__(self, "constraints", pairs)

    @classmethod
    def block(cls, p, start, digits):
        """Contiguous constraint ``start -> digits[0], start+1 -> digits[1], ...``."""
        return cls(p, tuple((start + j, d) for j, d in enumerate(digits)))

    def as_dict(self):
        return dict(self.constraints)

    def __len__(self):
        return len(self.constraints)

    def to_json(self):
        return [[i, d] for i, d in self.constraints]


# -- shifts --------------------------------------------------------------------


def shift2(w):
    """Left Bernoulli shift: ``b_0`` moves to index ``-1``."""
    if not w.nonneg:
        raise PrecisionExhausted("no non-negative digit left to shift")
    return TwoSidedWord(w.p, (w.nonneg[0],) + w.neg, w.nonneg[1:])


def shift1(w):
    """One-sided shift dropping ``t_0``."""
    if not w.digits:
        raise PrecisionExhausted("empty word")
    return OneSidedWord(w.p, w.digits[1:])


def forget_negative(w):
    return OneSidedWord(w.p, w.nonneg)


# -- cylinders -----------------------------------------------------------------


def cylinder_measure(c):
    """Uniform Bernoulli measure ``p^{-|I|}`` (0 for the empty set)."""
    if c is EMPTY:
        return Fraction(0)
    return Fraction(1, c.p ** len(c.constraints))


def cylinder_contains(w, c):
    if c is EMPTY:
        return False
    if w.p != c.p:
        raise PrimeMismatch(f"primes differ: {w.p} vs {c.p}")
    # read every index first so unknown indices always raise
    return all([w[i] == d for i, d in c.constraints])


def cylinder_intersect(c1, c2):
    if c1 is EMPTY or c2 is EMPTY:
        return EMPTY
    if c1.p != c2.p:
        raise PrimeMismatch(f"primes differ: {c1.p} vs {c2.p}")
    merged = dict(c1.constraints)
    for i, d in c2.constraints:
        if merged.get(i, d) != d:
            return EMPTY
        merged[i] = d
    return CylinderSpec(c1.p, merged)


def translate_cylinder(c, alpha):
    """Re-index every constraint by ``+alpha``."""
    if c is EMPTY:
        return EMPTY
    return CylinderSpec(c.p, tuple((i + alpha, d) for i, d in c.constraints))


def all_block_specs(p, start, depth):
    """All ``p**depth`` contiguous cylinders on ``start .. start+depth-1``."""
    out = []
    for code in range(p**depth):
        digits = []
        for _ in range(depth):
            code, d = divmod(code, p)
            digits.append(d)
        out.append(CylinderSpec.block(p, start, digits))
    return out


# -- factor maps -----------------------------------------------------------------


def pi_Y(w):
    """One-sided word -> p-adic integer with the same digits."""
    return PadicInt(w.p, w.digits)


def pi_Z(neg_digits, p):
    """Negative-side digits ``a_{-1}, a_{-2}, ...`` -> base-p fraction."""
    return BasePFraction(p, neg_digits)


def pi(w):
    return SolenoidPoint(PadicInt(w.p, w.nonneg), BasePFraction(w.p, w.neg))


# -- sampling --------------------------------------------------------------------


def sample_uniform_words(seed, p, L, R, count):
    """``count`` uniform words as an int array of shape ``(count, L + R)``.

    Column ``j < L`` holds ``a_{-(j+1)}``; column ``L + i`` holds ``t_i``.
    Word ``k`` consumes digits ``k(L+R) .. (k+1)(L+R) - 1`` of stream 0 of
    ``seed``, so a batch is a prefix-extension of any smaller batch.
    """
    p = check_prime(p)
    width = L + R
    return uniform_digits(seed, p, count * width).reshape(count, width)


def word_from_row(row, p, L):
    return TwoSidedWord(p, tuple(row[:L].tolist()), tuple(row[L:].tolist()))


def sample_uniform_word(seed, p, L, R, index=0):
    rows = sample_uniform_words(seed, p, L, R, index + 1)
    return word_from_row(rows[index], p, L)


def spec_indicator(rows, L, c):
    """Vectorised ``cylinder_contains`` over a sampled word matrix."""
    hit = np.ones(rows.shape[0], dtype=bool)
    for i, d in c.constraints:
        col = L + i if i >= 0 else -i - 1
        if (i < 0 and -i > L) or col >= rows.shape[1]:
            raise PrecisionExhausted(f"index {i} outside sampled window")
        hit &= rows[:, col] == d
    return hit


def default_intervals(p, max_n=2):
    return [(a, n) for n in range(1, max_n + 1) for a in range(p**n) if math.gcd(a, p) == 1]


def check_interval(a, n, p):
    if n < 1 or not 0 <= a < p**n:
        raise ValueError(f"interval ({a}, {n}): need n >= 1 and 0 <= a < p^n")
    if math.gcd(a, p) != 1:
        raise ValueError(f"interval ({a}, {n}): gcd(a, p) = 1 required")
    return a, n


def measure_check(p, M, seed, depth, intervals, z_threshold, L=32):
    """Monte Carlo pushforward checks of the uniform Bernoulli measure.

    Samples ``M`` words with ``L`` negative and ``max(depth, 1)`` non-negative
    digits. Interval tests compare the frequency of ``pi_Z(word)`` in the open
    interval ``(a/p^n, (a+1)/p^n)`` with ``p^{-n}``; cylinder tests cover every
    contiguous block of depth ``k <= depth`` on the windows starting at
    ``-k, ..., 0`` (so p-adic, real and straddling blocks). Returns one dict
    per test with its z-score.
    """
    from .equidist import z_score

    R = max(depth, 1)
    rows = sample_uniform_words(seed, p, L, R, M)
    neg = rows[:, :L]
    tests = []

    def add(name, hits, mu):
        z = z_score(int(hits), M, mu)
        tests.append({"test": name, "hits": int(hits), "samples": M, "frequency": int(hits) / M,
                      "expected": float(mu), "z": z, "pass": abs(z) <= z_threshold})

    for a, n in intervals:
        check_interval(a, n, p)
        if n > L:
            raise PrecisionExhausted(f"interval depth {n} exceeds sampled window {L}")
        lead = np.zeros(M, dtype=np.int64)
        for j in range(n):
            lead = lead * p + neg[:, j]
        # open interval: exclude the left endpoint a/p^n itself
        inside = (lead == a) & neg[:, n:].any(axis=1)
        add(f"pi_Z interval ({a}/{p}^{n},{a + 1}/{p}^{n})", inside.sum(), Fraction(1, p**n))

    for k in range(1, depth + 1):
        for start in range(-k, 1):
            for spec in all_block_specs(p, start, k):
                hits = spec_indicator(rows, L, spec).sum()
                label = "cylinder " + " ".join(f"{i}:{d}" for i, d in spec.constraints)
                add(label, hits, Fraction(1, p**k))
    return tests


def write_indicator_csv(rows, fh):
    """Rows of ``(label, count, frequency, expected, z)`` as RFC-4180 CSV."""
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["test", "hits", "samples", "frequency", "expected", "z"])
    for r in rows:
        w.writerow([r["test"], r["hits"], r["samples"], repr(r["frequency"]), repr(r["expected"]), repr(r["z"])])
