"""Truncated p-adic integers with an explicit precision budget.

A :class:`PadicInt` knows the first ``N`` base-``p`` digits of an element of
``Z_p`` and nothing more. Arithmetic keeps ``min`` of the operand precisions,
operations that consume digits (shifts, unit extraction) shrink the budget,
and every read past the budget raises :class:`PrecisionExhausted`.
"""

from __future__ import annotations

import functools
import json

import gmpy2
import numpy as np

from .errors import AllDigitsZero, NotAUnit, PrecisionExhausted, PrimeMismatch
from .rng import uniform_digits

# gmpy2 handles bases up to 36 with the lowercase alphabet below
_GMP_ALPHABET = b"0123456789abcdefghijklmnopqrstuvwxyz"
_GMP_MAX_BASE = 36
_CHAR_TO_DIGIT = np.full(256, -1, dtype=np.int64)
for _i, _c in enumerate(_GMP_ALPHABET):
    _CHAR_TO_DIGIT[_c] = _i
_DIGIT_TO_CHAR = np.frombuffer(_GMP_ALPHABET, dtype=np.uint8)


@functools.lru_cache(maxsize=None)
def check_prime(p):
    """Validate that ``p`` is an odd prime and return it as an ``int``."""
    p = int(p)
    if p < 3 or not gmpy2.is_prime(p):
        raise ValueError(f"expected an odd prime >= 3, got {p}")
    return p


def digits_to_int(digits, p):
    """Little-endian base-p digit array -> non-negative integer."""
    digits = np.asarray(digits, dtype=np.int64)
    n = digits.size
    if n == 0:
        return 0
    if p <= _GMP_MAX_BASE:
        text = _DIGIT_TO_CHAR[digits[::-1]].tobytes().decode("ascii")
        return int(gmpy2.mpz(text, p))
    return _digits_to_int_split(digits.tolist(), p)


def _digits_to_int_split(digits, p):
    if len(digits) <= 32:
        v = 0
        for d in reversed(digits):
            v = v * p + d
        return v
    h = len(digits) // 2
    return _digits_to_int_split(digits[:h], p) + p**h * _digits_to_int_split(digits[h:], p)


def int_to_digits(value, p, n):
    """Lowest ``n`` base-p digits of ``value`` (reduced mod p**n), little-endian."""
    value = int(value) % (p**n) if n else 0
    if n == 0:
        return np.zeros(0, dtype=np.int64)
    if p <= _GMP_MAX_BASE:
        text = gmpy2.mpz(value).digits(p).encode("ascii")
        raw = _CHAR_TO_DIGIT[np.frombuffer(text, dtype=np.uint8)][::-1]
        out = np.zeros(n, dtype=np.int64)
        out[: raw.size] = raw
        return out
    return np.asarray(_int_to_digits_split(value, p, n), dtype=np.int64)


def _int_to_digits_split(value, p, n):
    if n <= 32:
        out = []
        for _ in range(n):
            value, d = divmod(value, p)
            out.append(d)
        return out
    h = n // 2
    hi, lo = divmod(value, p**h)
    return _int_to_digits_split(lo, p, h) + _int_to_digits_split(hi, p, n - h)


def _frozen(digits):
    arr = np.array(digits, dtype=np.int64, copy=True).reshape(-1)
    arr.flags.writeable = False
    return arr


class PadicInt:
    """First ``precision`` digits of an element of ``Z_p``.

    Immutable. ``digits[i]`` is the coefficient of ``p**i``. Precision 0 is
    allowed as the end state of a fully consumed orbit; every digit read on
    it fails.
    """

    __slots__ = ("p", "digits", "_value")

    def __init__(self, p, digits, *, _value=None):
        p = check_prime(p)
        digits = _frozen(digits)
        if digits.size and (digits.min() < 0 or digits.max() >= p):
            raise ValueError(f"digits must lie in [0, {p})")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "digits", digits)
        object.__setattr__(self, "_value", _value)

    def __setattr__(self, name, value):
        raise AttributeError("PadicInt is immutable")

    @property
    def precision(self):
        return int(self.digits.size)

    @property
    def modulus(self):
        return self.p**self.precision

    @property
    def value(self):
        """Integer representative in ``[0, p**precision)``."""
        if self._value is None:
            object.__setattr__(self, "_value", digits_to_int(self.digits, self.p))
        return self._value

    @classmethod
    def _from_value(cls, value, p, n):
        value = int(value) % (p**n)
        return cls(p, int_to_digits(value, p, n), _value=value)

    # -- digit access -----------------------------------------------------

    def digit(self, n):
        if not 0 <= n < self.precision:
            raise PrecisionExhausted(f"digit {n} requested, precision is {self.precision}")
        return int(self.digits[n])

    def partial_sum(self, n):
        """``t_0 + t_1 p + ... + t_n p^n``."""
        if not 0 <= n < self.precision:
            raise PrecisionExhausted(f"partial sum s_{n} requested, precision is {self.precision}")
        return self.value % (self.p ** (n + 1))

    def shift(self, k=1):
        """Drop the lowest ``k`` digits: ``(a - s_{k-1}(a)) / p^k``."""
        if k < 0:
            raise ValueError("shift must be non-negative")
        if k == 0:
            return self
        if k > self.precision:
            raise PrecisionExhausted(f"cannot shift by {k} at precision {self.precision}")
        return PadicInt(self.p, self.digits[k:])

    def truncate(self, n):
        if not 0 <= n <= self.precision:
            raise PrecisionExhausted(f"cannot truncate precision {self.precision} to {n}")
        return PadicInt(self.p, self.digits[:n])

    # -- ring operations --------------------------------------------------

    def _check(self, other):
        if not isinstance(other, PadicInt):
            return NotImplemented
        if other.p != self.p:
            raise PrimeMismatch(f"primes differ: {self.p} vs {other.p}")
        return min(self.precision, other.precision)

    def __add__(self, other):
        n = self._check(other)
        if n is NotImplemented:
            return n
        return PadicInt._from_value(self.value + other.value, self.p, n)

    def __sub__(self, other):
        n = self._check(other)
        if n is NotImplemented:
            return n
        return PadicInt._from_value(self.value - other.value, self.p, n)

    def __mul__(self, other):
        n = self._check(other)
        if n is NotImplemented:
            return n
        mod = self.p**n
        return PadicInt._from_value((self.value % mod) * (other.value % mod), self.p, n)

    def __neg__(self):
        return PadicInt._from_value(-self.value, self.p, self.precision)

    def scale(self, k):
        """Multiply by the rational integer ``k``."""
        return PadicInt._from_value(int(k) * self.value, self.p, self.precision)

    def __pow__(self, e):
        return PadicInt._from_value(pow(self.value, int(e), self.modulus), self.p, self.precision)

    # -- misc -------------------------------------------------------------

    def is_zero(self):
        return not self.digits.any()

    def __eq__(self, other):
        if not isinstance(other, PadicInt):
            return NotImplemented
        return self.p == other.p and np.array_equal(self.digits, other.digits)

    def __hash__(self):
        return hash((self.p, self.digits.tobytes()))

    def __repr__(self):
        head = ",".join(map(str, self.digits[:12].tolist()))
        tail = ",..." if self.precision > 12 else ""
        return f"PadicInt(p={self.p}, N={self.precision}, digits=[{head}{tail}])"

    def to_json(self):
        return {"p": self.p, "digits": self.digits.tolist()}

    @classmethod
    def from_json(cls, obj):
        if isinstance(obj, str):
            obj = json.loads(obj)
        return cls(obj["p"], obj["digits"])


class ValUnit:
    """``source = p**val * unit`` with ``unit`` a p-adic unit."""

    __slots__ = ("val", "unit")

    def __init__(self, val, unit):
        self.val = val
        self.unit = unit

    def recompose(self):
        u = self.unit
        return PadicInt(u.p, np.concatenate([np.zeros(self.val, dtype=np.int64), u.digits]))

    def __iter__(self):
        yield self.val
        yield self.unit

    def __repr__(self):
        return f"ValUnit(val={self.val}, unit={self.unit!r})"


def from_integer(v, p, n):
    """Base-p digits of the integer ``v``, truncated or zero-padded to ``n``.

    Negative integers are accepted and represented by their p-adic expansion.
    """
    p = check_prime(p)
    if n < 1:
        raise ValueError("precision must be >= 1")
    return PadicInt._from_value(v, p, n)


def digit(a, n):
    return a.digit(n)


def partial_sum(a, n):
    return a.partial_sum(n)


def add(a, b):
    return a + b


def mul(a, b):
    return a * b


def neg(a):
    return -a


def val_unit(sigma):
    nz = np.flatnonzero(sigma.digits)
    if nz.size == 0:
        raise AllDigitsZero(f"all {sigma.precision} known digits are zero")
    v = int(nz[0])
    return ValUnit(v, PadicInt(sigma.p, sigma.digits[v:]))


def inverse_unit(u):
    if u.digits[0] == 0:
        raise NotAUnit("leading digit is zero")
    return PadicInt._from_value(int(gmpy2.invert(u.value, u.modulus)), u.p, u.precision)


FIXED_POINT_MAX_PRECISION = 64


def teichmuller_fixed_point(a, p, n):
    """Fixed point of ``x -> x**p mod p**n`` started at ``a``.

    Each step gains at least one correct digit, so at most ``n`` steps.
    """
    mod = p**n
    x = a % mod
    for _ in range(n + 1):
        nxt = pow(x, p, mod)
        if nxt == x:
            return x
        x = nxt
    raise AssertionError("Teichmuller iteration did not converge")  # pragma: no cover


@functools.lru_cache(maxsize=256)
def _teichmuller_value(a, p, n):
    if n <= FIXED_POINT_MAX_PRECISION:
        return teichmuller_fixed_point(a, p, n)
    # Newton on x^(p-1) - 1, doubling the known digits each round
    half = (n + 1) // 2
    x = _teichmuller_value(a, p, half)
    mod = gmpy2.mpz(p) ** n
    x = gmpy2.mpz(x)
    f = gmpy2.powmod(x, p - 1, mod) - 1
    df = (p - 1) * gmpy2.powmod(x, p - 2, mod)
    return int((x - f * gmpy2.invert(df, mod)) % mod)


def teichmuller(a, p, n):
    """The (p-1)-th root of unity congruent to ``a`` mod p, to ``n`` digits.

    Small precisions use the fixed-point iteration directly; larger ones are
    lifted from it by Newton steps.
    """
    p = check_prime(p)
    if not 1 <= a <= p - 1:
        raise ValueError(f"residue must be in [1, {p - 1}], got {a}")
    return PadicInt._from_value(_teichmuller_value(a, p, n), p, n)


def random_padic(seed, p, n, stream=0):
    """Haar-random element: ``n`` iid uniform digits from the seeded stream."""
    p = check_prime(p)
    return PadicInt(p, uniform_digits(seed, p, n, stream=stream))
