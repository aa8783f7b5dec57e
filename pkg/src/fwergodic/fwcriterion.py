"""The digit-sum criterion over Teichmuller roots of unity and the Stickelberger table.

For an odd ``3 <= d <= p-2`` the criterion sum is

    sum_{a=1}^{p-1} t_n(alpha * eta_a) * a^d  (mod p)

where ``eta_a`` is the Teichmuller lift of ``a``. Since ``eta_a = a mod p``
the power ``eta_a^d`` is taken as ``a^d mod p``; the lift itself is only
needed to read off the digit ``t_n``.
"""

from __future__ import annotations

import csv
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

from .errors import PrecisionExhausted
from .padic import PadicInt, check_prime, from_integer, int_to_digits, teichmuller


def odd_exponents(p):
    return list(range(3, p - 1, 2))


@dataclass(frozen=True)
class CriterionQuery:
    p: int
    d: int
    alpha: PadicInt
    n: int

    def __post_init__(self):
        check_prime(self.p)
        if self.d % 2 == 0 or not 3 <= self.d <= self.p - 2:
            raise ValueError(f"d must be odd with 3 <= d <= p-2, got d={self.d}, p={self.p}")
        if self.alpha.p != self.p:
            raise ValueError("alpha uses a different prime")
        if self.n < 0:
            raise ValueError("n must be non-negative")


def _lift_digits(alpha_value, p, n_max):
    """Digit arrays of ``alpha * eta_a`` mod ``p^{n_max+1}`` for ``a = 1..p-1``."""
    N = n_max + 1
    mod = p**N
    return [
        int_to_digits(alpha_value * teichmuller(a, p, N).value % mod, p, N)
        for a in range(1, p)
    ]


def criterion_sum(q):
    """Residue mod p of the criterion sum for ``q``."""
    p, d, n = q.p, q.d, q.n
    if q.alpha.precision < n + 1:
        raise PrecisionExhausted(f"t_{n} needs precision {n + 1}, have {q.alpha.precision}")
    mod = p ** (n + 1)
    a_val = q.alpha.value % mod
    total = 0
    for a in range(1, p):
        eta = teichmuller(a, p, n + 1).value
        t_n = (a_val * eta % mod) // p**n
        total += t_n * pow(a, d, p)
    return total % p


def criterion_sums(alpha, p, d, n_max):
    """Criterion sums for ``n = 0 .. n_max`` at once."""
    if alpha.precision < n_max + 1:
        raise PrecisionExhausted(f"need precision {n_max + 1}, have {alpha.precision}")
    lifts = _lift_digits(alpha.value, p, n_max)
    weights = [pow(a, d, p) for a in range(1, p)]
    return [sum(int(ds[n]) * w for ds, w in zip(lifts, weights)) % p for n in range(n_max + 1)]


@dataclass
class ScanResult:
    p: int
    d: int
    witness: tuple | None  # (alpha, n)
    scanned: int
    alphas_scanned: int

    def to_dict(self):
        w = None
        if self.witness is not None:
            alpha, n = self.witness
            w = [alpha.digits.tolist(), n]
        return {"p": self.p, "d": self.d, "witness": w, "scanned": {"pairs": self.scanned, "alphas": self.alphas_scanned}}


def _first_nonzero(args):
    alpha_json, p, d, n_max = args
    alpha = PadicInt.from_json(alpha_json)
    for n, s in enumerate(criterion_sums(alpha, p, d, n_max)):
        if s:
            return n
    return None


def scan_criterion(p, d, alphas, n_max, workers=1):
    """First ``(alpha, n)`` in alpha-major, n-minor order with a non-zero sum.

    With ``workers > 1`` the alphas are evaluated in parallel and merged in
    scan order, so the witness is identical to the sequential scan.
    """
    p = check_prime(p)
    alphas = list(alphas)
    for a in alphas:
        if a.precision < n_max + 1:
            raise PrecisionExhausted(f"alpha needs precision {n_max + 1}")
    tasks = [(a.to_json(), p, d, n_max) for a in alphas]
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            firsts = list(ex.map(_first_nonzero, tasks))
    else:
        firsts = []
        for tk in tasks:
            firsts.append(_first_nonzero(tk))
            if firsts[-1] is not None:
                break
    scanned = 0
    for i, n in enumerate(firsts):
        if n is not None:
            return ScanResult(p, d, (alphas[i], n), scanned + n + 1, i + 1)
        scanned += n_max + 1
    return ScanResult(p, d, None, scanned, len(alphas))


def integer_alphas(p, lo, hi, n_max):
    """``alpha = lo .. hi`` as p-adic integers with precision ``n_max + 1``."""
    return [from_integer(v, p, n_max + 1) for v in range(lo, hi + 1)]


@dataclass
class StickelbergerElement:
    """Coefficient table ``(u, a) -> s_n(u eta_a) / p^{n+1}``.

    ``u`` runs over ``1 <= u <= p^{n+1}`` with ``u = 1 mod p``; ``a`` over
    ``1 .. p-1``. No group-ring multiplication is provided.
    """

    p: int
    n: int
    coefficients: dict

    def rows(self):
        for (u, a), c in sorted(self.coefficients.items()):
            yield u, a, c.numerator * (self.p ** (self.n + 1) // c.denominator), self.p ** (self.n + 1)


def stickelberger_element(p, n, N=None):
    p = check_prime(p)
    if N is None:
        N = n + 1
    if N < n + 1:
        raise PrecisionExhausted(f"precision {N} < n + 1 = {n + 1}")
    mod = p ** (n + 1)
    etas = {a: teichmuller(a, p, N).value for a in range(1, p)}
    coeffs = {}
    for u in range(1, mod + 1, p):
        for a, eta in etas.items():
            coeffs[(u, a)] = Fraction(u * eta % mod, mod)
    return StickelbergerElement(p, n, coeffs)


def write_stickelberger_csv(elem, fh):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["u", "a", "numerator", "denominator"])
    w.writerows(elem.rows())
