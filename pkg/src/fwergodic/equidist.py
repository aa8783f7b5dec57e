"""Orbit statistics and operational equidistribution verdicts.

Exact arithmetic is used up to the statistics boundary. The real coordinates
``s_n(gamma) / p^{n+1}`` of long orbits are produced from exact integer
windows of the last ``W`` digits (``p**W`` fits in int64), so the only
floating error is the final int -> double conversion (about 3e-16).

A verdict here is an operational finite-sample test, never a certificate:
genericity is an asymptotic property.
"""

from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np

from .errors import DepthTooLarge, PrecisionExhausted, ZeroVector
from .padic import PadicInt
from .solenoid import enumerate_V, linear_combination_padic

MAX_BOXES = 10**7
EXACT_LIMIT = 4096

DEFAULT_Z = 5.0
DEFAULT_DSTAR = 0.02
DEFAULT_DEPTH = 3
DEFAULT_WEYL_MAX = 3


@dataclass(frozen=True)
class SequenceSample:
    """``M`` points in ``[0, 1)^r``.

    ``points`` is always a float array of shape ``(M, r)``. When ``exact`` is
    not ``None`` it holds the same rows as tuples of ``Fraction``.
    """

    p: int
    points: np.ndarray
    exact: tuple | None = None

    @property
    def M(self):
        return self.points.shape[0]

    @property
    def r(self):
        return self.points.shape[1]

    @property
    def is_exact(self):
        return self.exact is not None


def window_width(p):
    """Largest ``W`` with ``p**W`` representable in int64."""
    w = 0
    while p ** (w + 1) <= np.iinfo(np.int64).max:
        w += 1
    return w


def real_coordinates(gamma, count, offset=0):
    """Float values of ``s_n(gamma) / p^{n+1}`` for ``n = offset .. offset+count-1``."""
    end = offset + count
    if end > gamma.precision:
        raise PrecisionExhausted(f"need {end} digits, have {gamma.precision}")
    p = gamma.p
    W = window_width(p)
    t = gamma.digits[:end]
    padded = np.concatenate([np.zeros(W - 1, dtype=np.int64), t])
    v = np.zeros(end, dtype=np.int64)
    for j in range(W):
        # t_{n-j} contributes p^{W-1-j}
        v += padded[W - 1 - j : W - 1 - j + end] * np.int64(p ** (W - 1 - j))
    return v[offset:].astype(np.float64) / float(p**W)


def partial_sum_sequence(alpha, betas, M, exact=None):
    """Rows ``(s_n(alpha beta_i) / p^{n+1})_i`` for ``n = 0 .. M-1``.

    ``exact`` defaults to ``M <= EXACT_LIMIT``.
    """
    gammas = [alpha * b for b in betas]
    for g in gammas:
        if g.precision < M:
            raise PrecisionExhausted(f"need precision {M}, product has {g.precision}")
    if exact is None:
        exact = M <= EXACT_LIMIT
    pts = np.column_stack([real_coordinates(g, M) for g in gammas])
    rows = None
    if exact:
        p = alpha.p
        cols = []
        for g in gammas:
            s = 0
            col = []
            for n in range(M):
                s += int(g.digits[n]) * p**n
                col.append(Fraction(s, p ** (n + 1)))
            cols.append(col)
        rows = tuple(zip(*cols))
    return SequenceSample(alpha.p, pts, rows)


# -- discrepancy and Weyl sums ------------------------------------------------


def star_discrepancy_1d(xs):
    """Exact star discrepancy via order statistics (input order irrelevant)."""
    x = np.sort(np.asarray(xs, dtype=np.float64).reshape(-1))
    M = x.size
    if M == 0:
        raise ValueError("empty sample")
    i = np.arange(1, M + 1, dtype=np.float64)
    return float(max(np.max(i / M - x), np.max(x - (i - 1) / M)))


def box_indices(sample, k):
    """Flat index of the depth-``k`` p-adic box containing each point."""
    p = sample.p
    side = p**k
    if side ** sample.r > MAX_BOXES:
        raise DepthTooLarge(f"{side ** sample.r} boxes exceed the {MAX_BOXES} guard")
    if sample.exact is not None:
        cells = np.array([[math.floor(x * side) for x in row] for row in sample.exact], dtype=np.int64)
        cells = cells.reshape(sample.M, sample.r)
    else:
        cells = np.clip(np.floor(sample.points * side).astype(np.int64), 0, side - 1)
    flat = np.zeros(sample.M, dtype=np.int64)
    for j in range(sample.r):
        flat = flat * side + cells[:, j]
    return flat


def box_counts(sample, k):
    return np.bincount(box_indices(sample, k), minlength=sample.p ** (k * sample.r))


def box_discrepancy(sample, k):
    """``max_box |empirical - p^{-rk}|`` over the ``p^{rk}`` boxes of side ``p^{-k}``."""
    counts = box_counts(sample, k)
    return float(np.max(np.abs(counts / sample.M - 1.0 / counts.size)))


def weyl_average(sample, k):
    """``(1/M) sum_n exp(2 pi i k . x_n)``."""
    k = np.asarray(k, dtype=np.int64).reshape(-1)
    if not k.any():
        raise ZeroVector("frequency vector must be non-zero")
    if k.size != sample.r:
        raise ValueError(f"frequency has length {k.size}, sample has r={sample.r}")
    if sample.exact is not None:
        phase = np.array([float(sum((int(kj) * x for kj, x in zip(k, row)), Fraction(0)) % 1) for row in sample.exact])
    else:
        phase = np.mod(sample.points @ k.astype(np.float64), 1.0)
    return complex(np.mean(np.exp(2j * np.pi * phase)))


def frequency_vectors(r, kmax):
    """Non-zero ``k`` with ``|k|_inf <= kmax``, one of each ``{k, -k}`` pair."""
    out = []
    for k in enumerate_V(r, kmax):
        first = next(v for v in k if v)
        if first > 0:
            out.append(k)
    return out


# -- cylinder frequencies -------------------------------------------------------------


def z_score(hits, M, mu):
    """Binomial z-score; ``0/0`` (degenerate ``mu``) is read as 0."""
    freq = hits / M
    var = float(mu * (1 - mu))
    if var == 0:
        return 0.0 if freq == mu else math.copysign(math.inf, freq - float(mu))
    return (freq - float(mu)) / math.sqrt(var / M)


def cylinder_frequency(words, c):
    """Empirical frequency of ``c`` among ``words`` and its z-score vs ``p^{-|c|}``."""
    from .symbolic import cylinder_contains, cylinder_measure

    words = list(words)
    M = len(words)
    if M == 0:
        raise ValueError("no words")
    hits = sum(1 for w in words if cylinder_contains(w, c))
    mu = cylinder_measure(c)
    return hits / M, z_score(hits, M, mu)


def orbit_words(alpha, M):
    """The ``M`` one-sided words of the digit-shift orbit of ``alpha``."""
    from .symbolic import OneSidedWord

    return [OneSidedWord(alpha.p, alpha.digits[n:]) for n in range(M)]


def block_codes(digits, p, count, depth, start=0):
    """Code ``sum_j d[n+j] p^j`` of the depth-``depth`` block at each orbit step."""
    end = start + count + depth - 1
    if end > len(digits):
        raise PrecisionExhausted(f"need {end} digits, have {len(digits)}")
    codes = np.zeros(count, dtype=np.int64)
    for j in range(depth):
        codes += np.asarray(digits[start + j : start + j + count], dtype=np.int64) * p**j
    return codes


def block_counts(digits, p, count, depth, start=0):
    return np.bincount(block_codes(digits, p, count, depth, start), minlength=p**depth)


def _code_digits(code, p, depth):
    out = []
    for _ in range(depth):
        code, d = divmod(code, p)
        out.append(d)
    return out


# -- genericity -------------------------------------------------------------------------


@dataclass
class GenericityReport:
    p: int
    M: int
    depth: int
    z_threshold: float
    dstar_threshold: float
    cylinders: list = field(default_factory=list)  # [{"spec": [[i, d], ...], "hits", "frequency", "z"}]
    star_discrepancy: float = 0.0
    box_discrepancy: float = 0.0
    weyl: list = field(default_factory=list)  # [{"k": [...], "abs": float}]
    verdict: bool = False

    @property
    def max_abs_z(self):
        return max((abs(c["z"]) for c in self.cylinders), default=0.0)

    def decide(self):
        """Verdict recomputed from the stored statistics and thresholds."""
        return self.max_abs_z <= self.z_threshold and self.star_discrepancy <= self.dstar_threshold

    def to_dict(self):
        d = asdict(self)
        d["max_abs_z"] = self.max_abs_z
        return d

    def csv_rows(self):
        for c in self.cylinders:
            spec = " ".join(f"{i}:{d}" for i, d in c["spec"])
            yield ["cylinder", spec, c["hits"], repr(c["frequency"]), repr(c["z"])]
        yield ["star_discrepancy", "", "", repr(self.star_discrepancy), ""]
        yield ["box_discrepancy", str(self.depth), "", repr(self.box_discrepancy), ""]
        for w in self.weyl:
            yield ["weyl", " ".join(map(str, w["k"])), "", repr(w["abs"]), ""]


def genericity_test(
    alpha,
    M,
    max_depth=DEFAULT_DEPTH,
    z_threshold=DEFAULT_Z,
    dstar_threshold=DEFAULT_DSTAR,
    weyl_max=DEFAULT_WEYL_MAX,
):
    """Finite-orbit normality test for ``alpha`` under the digit shift.

    Uses orbit steps ``n = 0 .. M-1``: every cylinder of depth ``<= max_depth``
    anchored at index 0 gets a binomial z-score, and the real coordinates
    ``s_n(alpha) / p^{n+1}`` get a star discrepancy.
    """
    if alpha.precision < M + max_depth:
        raise PrecisionExhausted(f"need precision {M + max_depth}, have {alpha.precision}")
    p = alpha.p
    cylinders = []
    for depth in range(1, max_depth + 1):
        counts = block_counts(alpha.digits, p, M, depth)
        mu = Fraction(1, p**depth)
        for code, hits in enumerate(counts.tolist()):
            spec = [[j, d] for j, d in enumerate(_code_digits(code, p, depth))]
            cylinders.append({"spec": spec, "hits": hits, "frequency": hits / M, "z": z_score(hits, M, mu)})
    xs = real_coordinates(alpha, M)
    sample = SequenceSample(p, xs.reshape(-1, 1))
    box_k = max_depth
    while box_k > 1 and p**box_k > MAX_BOXES:
        box_k -= 1
    report = GenericityReport(
        p=p,
        M=M,
        depth=max_depth,
        z_threshold=float(z_threshold),
        dstar_threshold=float(dstar_threshold),
        cylinders=cylinders,
        star_discrepancy=star_discrepancy_1d(xs),
        box_discrepancy=box_discrepancy(sample, box_k),
        weyl=[{"k": [k], "abs": abs(weyl_average(sample, (k,)))} for k in range(1, weyl_max + 1)],
    )
    report.verdict = report.decide()
    return report


# -- characters along orbits ----------------------------------------------------------


def _zero_reals(gammas):
    for c in gammas:
        if c.real.value != 0:
            raise ValueError("character_average expects points with zero real coordinate")
    return [c.padic for c in gammas]


def character_average(gammas, m, t, M, route="combined"):
    """``(1/M) sum_{n=1}^{M} chi_{m,t}(T_2^n(gamma, 0))``.

    ``route="combined"`` pushes the orbit through ``sum m_i gamma_i`` first;
    ``route="componentwise"`` advances each coordinate separately. At step
    ``n`` the level-``t`` phase of ``(gamma, 0)`` is ``s_{n+t-1}(gamma)/p^{n+t}``.
    """
    comps = _zero_reals(gammas)
    m = tuple(int(v) for v in m)
    if not any(m):
        raise ZeroVector("m must be non-zero")
    if len(m) != len(comps):
        raise ValueError("length of m must equal r")
    if min(c.precision for c in comps) < M + t:
        raise PrecisionExhausted(f"need precision {M + t}")
    if route == "combined":
        sigma = linear_combination_padic(comps, m)
        phase = real_coordinates(sigma, M, offset=t)
    elif route == "componentwise":
        phase = np.zeros(M)
        for mj, g in zip(m, comps):
            phase = np.mod(phase + mj * real_coordinates(g, M, offset=t), 1.0)
    else:
        raise ValueError(f"unknown route {route!r}")
    return complex(np.mean(np.exp(2j * np.pi * phase)))


def character_average_orbit(P, chi, M):
    """Reference route: iterate ``T_2^r`` on the exact point and evaluate the character."""
    from .solenoid import character_eval, t2_step_product

    total = 0j
    for _ in range(M):
        P = t2_step_product(P)
        total += character_eval(P, chi)
    return total / M


# -- joint test and reduction --------------------------------------------------------


@dataclass
class JointReport:
    M: int
    depths: list
    discrepancies: list
    limits: list
    verdict: bool

    def to_dict(self):
        return asdict(self)


def joint_box_limit(p, r, k, M, z_threshold):
    mu = p ** (-r * k)
    return z_threshold * math.sqrt(mu * (1 - mu) / M)


def joint_test(gammas, M, depth=2, z_threshold=DEFAULT_Z):
    """Box-discrepancy test for the joint orbit of ``(gamma_1, ..., gamma_r)``.

    Depth ``k`` passes iff the worst box deviates from ``p^{-rk}`` by at most
    ``z_threshold`` binomial standard deviations.
    """
    p = gammas[0].p
    r = len(gammas)
    pts = np.column_stack([real_coordinates(g, M) for g in gammas])
    sample = SequenceSample(p, pts)
    depths, discs, limits = [], [], []
    for k in range(1, depth + 1):
        if p ** (r * k) > MAX_BOXES:
            break
        depths.append(k)
        discs.append(box_discrepancy(sample, k))
        limits.append(joint_box_limit(p, r, k, M, z_threshold))
    verdict = bool(depths) and all(d <= lim for d, lim in zip(discs, limits))
    return JointReport(M, depths, discs, limits, verdict)


@dataclass
class ReductionReport:
    p: int
    r: int
    bound: int
    M: int
    joint: JointReport
    sigmas: list  # [{"m": [...], "val": int, "verdict": bool, "max_abs_z": float, "star_discrepancy": float}]
    all_sigma_pass: bool
    joint_pass: bool
    agree: bool

    def to_dict(self):
        d = asdict(self)
        d["joint"] = self.joint.to_dict()
        return d


def _sigma_task(args):
    m, sigma_alpha_json, val, M, depth, z, d = args
    gen = genericity_test(PadicInt.from_json(sigma_alpha_json), M, depth, z, d)
    return {
        "m": list(m),
        "val": val,
        "verdict": gen.verdict,
        "max_abs_z": gen.max_abs_z,
        "star_discrepancy": gen.star_discrepancy,
    }


def reduction_check(
    alpha,
    betas,
    bound,
    M,
    max_depth=DEFAULT_DEPTH,
    z_threshold=DEFAULT_Z,
    dstar_threshold=DEFAULT_DSTAR,
    joint_depth=2,
    workers=1,
):
    """Compare the joint test on ``(alpha beta_i)`` with the tests on ``sigma alpha``, ``sigma`` in V."""
    r = len(betas)
    need = M + max_depth
    gammas = [alpha * b for b in betas]
    if min(g.precision for g in gammas) < need:
        raise PrecisionExhausted(f"need precision {need}, have {min(g.precision for g in gammas)}")
    joint = joint_test(gammas, M, joint_depth, z_threshold)
    tasks = []
    for m in enumerate_V(r, bound):
        sigma = linear_combination_padic(betas, m)
        nz = np.flatnonzero(sigma.digits)
        val = int(nz[0]) if nz.size else None
        tasks.append((m, (sigma * alpha).to_json(), val, M, max_depth, z_threshold, dstar_threshold))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            sigmas = list(ex.map(_sigma_task, tasks))
    else:
        sigmas = [_sigma_task(tk) for tk in tasks]
    all_pass = all(s["verdict"] for s in sigmas)
    return ReductionReport(
        p=alpha.p,
        r=r,
        bound=bound,
        M=M,
        joint=joint,
        sigmas=sigmas,
        all_sigma_pass=all_pass,
        joint_pass=joint.verdict,
        agree=all_pass == joint.verdict,
    )


def dump_json(obj, fh):
    json.dump(obj, fh, indent=2, sort_keys=True)
    fh.write("\n")


def write_rows_csv(header, rows, fh):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
