"""Skew-product dynamics on Z_p x [0, 1) and the solenoid characters.

Points of the solenoid ``Z \\ (Z_p x R)`` are always stored in the
fundamental domain ``Z_p x [0, 1)``; the real coordinate is a finite base-p
expansion so the dynamics below are exact. The lattice ``Z`` sits inside
``Z_p x R`` as ``k -> (-k, k)``, which is why an integer carry out of the
real coordinate is *added* to the p-adic coordinate.
"""

from __future__ import annotations

import cmath
import csv
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import PrecisionExhausted, PrimeMismatch, ZeroVector
from .padic import PadicInt, check_prime, digits_to_int, from_integer, int_to_digits

MAX_CHARACTER_LEVEL = 40


class BasePFraction:
    """``sum_j a_{-j} p^{-j}`` for the stored digits ``a_{-1}, ..., a_{-M}``."""

    __slots__ = ("p", "digits")

    def __init__(self, p, digits=()):
        self.p = check_prime(p)
        digits = tuple(int(d) for d in digits)
        if any(not 0 <= d < self.p for d in digits):
            raise ValueError(f"digits must lie in [0, {self.p})")
        self.digits = digits

    @property
    def precision(self):
        return len(self.digits)

    @property
    def value(self):
        m = len(self.digits)
        if m == 0:
            return Fraction(0)
        # a_{-1} is the most significant digit
        return Fraction(digits_to_int(self.digits[::-1], self.p), self.p**m)

    @classmethod
    def from_fraction(cls, x, p, m=None):
        """Expand ``x`` in [0, 1). The denominator must be a power of ``p``
        unless ``m`` truncates the expansion."""
        x = Fraction(x)
        if not 0 <= x < 1:
            raise ValueError(f"real coordinate must lie in [0, 1), got {x}")
        if m is None:
            m = 0
            d = x.denominator
            while d % p == 0:
                d //= p
                m += 1
            if d != 1:
                raise ValueError(f"{x} has no finite base-{p} expansion; pass m to truncate")
        num = math.floor(x * p**m)
        return cls(p, int_to_digits(num, p, m)[::-1].tolist() if m else ())

    def prepend(self, d):
        return BasePFraction(self.p, (d,) + self.digits)

    def __float__(self):
        return float(self.value)

    def __eq__(self, other):
        if not isinstance(other, BasePFraction):
            return NotImplemented
        return self.p == other.p and self.digits == other.digits

    def __hash__(self):
        return hash((self.p, self.digits))

    def __repr__(self):
        return f"BasePFraction(p={self.p}, digits={list(self.digits)})"


@dataclass(frozen=True)
class SolenoidPoint:
    padic: PadicInt
    real: BasePFraction

    def __post_init__(self):
        if self.padic.p != self.real.p:
            raise PrimeMismatch(f"primes differ: {self.padic.p} vs {self.real.p}")

    @property
    def p(self):
        return self.padic.p

    @classmethod
    def at_zero(cls, gamma):
        return cls(gamma, BasePFraction(gamma.p))

    def to_json(self):
        return {"padic": self.padic.to_json(), "real_digits": list(self.real.digits)}

    @classmethod
    def from_json(cls, obj):
        padic = PadicInt.from_json(obj["padic"])
        return cls(padic, BasePFraction(padic.p, obj["real_digits"]))


@dataclass(frozen=True)
class ProductPoint:
    components: tuple

    def __post_init__(self):
        comps = tuple(self.components)
        if not comps:
            raise ValueError("a product point needs r >= 1 components")
        if len({c.p for c in comps}) != 1:
            raise PrimeMismatch("components use different primes")
        object.__setattr__(self, "components", comps)

    @property
    def r(self):
        return len(self.components)

    @property
    def p(self):
        return self.components[0].p

    def __iter__(self):
        return iter(self.components)


@dataclass(frozen=True)
class CharacterIndex:
    m: tuple
    t: int

    def __post_init__(self):
        m = tuple(int(v) for v in self.m)
        if not any(m):
            raise ZeroVector("character index m must be non-zero")
        if self.t < 0:
            raise ValueError("level t must be non-negative")
        object.__setattr__(self, "m", m)


@dataclass(frozen=True)
class PadicRational:
    """``p**(-shift) * num``."""

    num: PadicInt
    shift: int

    def __post_init__(self):
        if not 0 <= self.shift <= self.num.precision:
            raise PrecisionExhausted(f"shift {self.shift} exceeds precision {self.num.precision}")


# -- dynamics ----------------------------------------------------------------


def tcal3_step(alpha):
    """The digit shift ``alpha -> (alpha - t_0) / p`` on Z_p."""
    if alpha.precision < 1:
        raise PrecisionExhausted("no digit left to shift out")
    return alpha.shift(1)


def t3_step(s):
    """One step of ``(alpha, x) -> ((alpha - t_0)/p, (x + t_0)/p)``."""
    t0 = s.padic.digit(0)
    return SolenoidPoint(s.padic.shift(1), s.real.prepend(t0))


def t3_iterate(s, n):
    for _ in range(n):
        s = t3_step(s)
    return s


def t2_step_product(P):
    return ProductPoint(tuple(t3_step(c) for c in P))


def orbit_closed_form(gamma, n):
    """``T_3^{n+1}(gamma, 0) = ((gamma - s_n)/p^{n+1}, s_n/p^{n+1})``."""
    if n + 1 > gamma.precision:
        raise PrecisionExhausted(f"need {n + 1} digits, have {gamma.precision}")
    real = BasePFraction(gamma.p, gamma.digits[: n + 1][::-1].tolist())
    return SolenoidPoint(gamma.shift(n + 1), real)


def real_decay(gamma, x, x_prime, n):
    """Difference of real coordinates after ``n`` steps from two base points."""
    a = t3_iterate(SolenoidPoint(gamma, x), n).real.value
    b = t3_iterate(SolenoidPoint(gamma, x_prime), n).real.value
    return a - b


# -- X_0 coordinates and characters -----------------------------------------


def x0_coordinate(s, t):
    """Level-``t`` coordinate ``x + s_{t-1}(beta) mod p^t`` as an exact rational."""
    if t < 0:
        raise ValueError("level must be non-negative")
    x = s.real.value
    if t == 0:
        return x % 1
    if t > s.padic.precision:
        raise PrecisionExhausted(f"level {t} needs {t} p-adic digits, have {s.padic.precision}")
    return (x + s.padic.partial_sum(t - 1)) % (s.p**t)


def character_phase(P, chi):
    """Exact phase in [0, 1) of the character ``chi`` at ``P``."""
    if len(chi.m) != P.r:
        raise ValueError(f"index has length {len(chi.m)}, point has r={P.r}")
    if chi.t > MAX_CHARACTER_LEVEL:
        raise ValueError(f"level capped at {MAX_CHARACTER_LEVEL}")
    mod = P.p**chi.t
    total = sum((m * x0_coordinate(c, chi.t) for m, c in zip(chi.m, P)), Fraction(0))
    return (total % mod) / mod


def character_eval(P, chi):
    """``exp(2 pi i * sum_j m_j coord_t(P_j) / p^t)``."""
    return cmath.exp(2j * math.pi * float(character_phase(P, chi)))


def linear_combination(P, m):
    """``sum_j m_j P_j`` in canonical form, integer carry moved to Z_p."""
    m = tuple(int(v) for v in m)
    if len(m) != P.r:
        raise ValueError(f"coefficient vector has length {len(m)}, point has r={P.r}")
    if not any(m):
        raise ZeroVector("m must be non-zero")
    p = P.p
    n = min(c.padic.precision for c in P)
    acc = 0
    real = Fraction(0)
    for mj, c in zip(m, P):
        acc += mj * c.padic.value
        real += mj * c.real.value
    carry = math.floor(real)
    frac = real - carry
    depth = max(c.real.precision for c in P)
    return SolenoidPoint(
        from_integer(acc + carry, p, n) if n else PadicInt(p, ()),
        BasePFraction.from_fraction(frac, p, depth),
    )


def floor_padic(beta):
    """Split ``beta`` in Q_p as ``floor(beta) + r`` with ``r`` in [0, 1) and ``p^e r`` integral.

    Returns ``(floor(beta), r)``.
    """
    e = beta.shift
    num = beta.num
    if e == 0:
        return num, Fraction(0)
    rem = Fraction(num.partial_sum(e - 1), num.p**e)
    return num.shift(e), rem


def enumerate_V(r, bound):
    """All non-zero ``m`` in Z^r with ``max |m_j| <= bound``.

    Order: lexicographic on ``m`` with each entry running ``-bound .. bound``.
    """
    if bound < 1:
        raise ValueError("bound must be >= 1")
    if r < 1:
        raise ValueError("r must be >= 1")
    rng = range(-bound, bound + 1)
    return [m for m in itertools.product(rng, repeat=r) if any(m)]


def linear_combination_padic(betas, m):
    """``sum_i m_i beta_i`` in Z_p (the elements of V)."""
    if not any(m):
        raise ZeroVector("m must be non-zero")
    p = betas[0].p
    n = min(b.precision for b in betas)
    if any(b.p != p for b in betas):
        raise PrimeMismatch("betas use different primes")
    return from_integer(sum(mi * b.value for mi, b in zip(m, betas)), p, n)


# -- export -------------------------------------------------------------------


def orbit_rows(gamma, steps, lead=8):
    """Rows ``(step, real value, leading p-adic digits)`` of the orbit of ``(gamma, 0)``.

    Row ``n`` describes ``T_3^{n+1}(gamma, 0)``.
    """
    if steps > gamma.precision:
        raise PrecisionExhausted(f"{steps} steps need {steps} digits, have {gamma.precision}")
    p = gamma.p
    digits = gamma.digits
    value = 0
    for n in range(steps):
        value += int(digits[n]) * p**n
        x = Fraction(value, p ** (n + 1))
        ahead = digits[n + 1 : n + 1 + lead].tolist()
        yield n, x, ahead


def format_decimal(x, places=20):
    """Exact rational -> fixed decimal string, truncated (not rounded)."""
    x = Fraction(x)
    scaled = x.numerator * 10**places // x.denominator
    whole, frac = divmod(scaled, 10**places)
    return f"{whole}.{frac:0{places}d}"


def write_orbit_csv(gamma, steps, fh, lead=8):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["step", "real_value", "real_exact", "padic_leading_digits"])
    for n, x, ahead in orbit_rows(gamma, steps, lead):
        w.writerow([n, format_decimal(x), f"{x.numerator}/{x.denominator}", " ".join(map(str, ahead))])

