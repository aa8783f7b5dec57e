import io
import json
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from fwergodic.errors import DepthTooLarge, PrecisionExhausted, ZeroVector
from fwergodic.equidist import (
    SequenceSample,
    block_counts,
    box_counts,
    box_discrepancy,
    character_average,
    character_average_orbit,
    cylinder_frequency,
    dump_json,
    frequency_vectors,
    genericity_test,
    joint_box_limit,
    joint_test,
    orbit_words,
    partial_sum_sequence,
    real_coordinates,
    reduction_check,
    star_discrepancy_1d,
    weyl_average,
    window_width,
    write_rows_csv,
    z_score,
)
from fwergodic.padic import from_integer, random_padic, teichmuller
from fwergodic.solenoid import CharacterIndex, ProductPoint, SolenoidPoint
from fwergodic.symbolic import CylinderSpec, OneSidedWord, all_block_specs, sample_uniform_words

M_BIG = 100_000

unit_floats = st.floats(0, 1, exclude_max=True, allow_nan=False)


def sample_1d(xs, p=3):
    return SequenceSample(p, np.asarray(xs, dtype=float).reshape(-1, 1))


# -- discrepancy --------------------------------------------------------------


def test_star_discrepancy_examples():
    assert star_discrepancy_1d([0.5]) == 0.5
    M = 100
    grid = [(2 * i - 1) / (2 * M) for i in range(1, M + 1)]
    assert star_discrepancy_1d(grid) == pytest.approx(1 / (2 * M), abs=1e-15)
    assert star_discrepancy_1d([0.0] * 7) == 1.0


@given(st.lists(unit_floats, min_size=1, max_size=200), st.randoms())
def test_star_discrepancy_bounds_and_permutation(xs, rnd):
    d = star_discrepancy_1d(xs)
    M = len(xs)
    assert 1 / (2 * M) - 1e-15 <= d <= 1
    shuffled = list(xs)
    rnd.shuffle(shuffled)
    assert star_discrepancy_1d(shuffled) == d


def test_box_discrepancy_examples():
    p = 3
    for r in (1, 2, 3):
        origin = SequenceSample(p, np.zeros((10, r)))
        assert box_discrepancy(origin, 1) == pytest.approx(1 - p**-r)
    centres = (np.arange(9) + 0.5) / 9
    balanced = SequenceSample(p, np.array([[x, y] for x in centres[::3] for y in centres[::3]]))
    assert box_discrepancy(balanced, 1) == pytest.approx(0, abs=1e-15)
    with pytest.raises(DepthTooLarge):
        box_discrepancy(SequenceSample(3, np.zeros((2, 3))), 6)


def test_box_discrepancy_random_sample():
    rng = np.random.default_rng(7)
    sample = SequenceSample(3, rng.random((M_BIG, 2)))
    assert box_discrepancy(sample, 2) <= 0.005


@given(arrays(np.float64, st.tuples(st.integers(1, 60), st.integers(1, 2)), elements=unit_floats), st.integers(1, 2))
def test_box_coarsening(points, k):
    p, r = 3, points.shape[1]
    s = SequenceSample(p, points)
    fine = box_counts(s, k + 1).reshape((p ** (k + 1),) * r)
    coarse = box_counts(s, k).reshape((p**k,) * r)
    # summing each block of p fine cells along every axis gives the coarse counts
    summed = fine
    for axis in range(r):
        shape = list(summed.shape)
        shape[axis : axis + 1] = [p**k, p]
        summed = summed.reshape(shape).sum(axis=axis + 1)
    assert np.array_equal(summed, coarse)
    assert box_counts(s, k).sum() == points.shape[0]


def test_exact_and_float_boxes_agree():
    alpha = random_padic(5, 3, 300)
    exact = partial_sum_sequence(alpha, [from_integer(1, 3, 300)], 200, exact=True)
    approx = partial_sum_sequence(alpha, [from_integer(1, 3, 300)], 200, exact=False)
    assert exact.is_exact and not approx.is_exact
    for k in (1, 2, 3):
        assert np.array_equal(box_counts(exact, k), box_counts(approx, k))


# -- Weyl averages -------------------------------------------------------------


def test_weyl_examples():
    assert weyl_average(sample_1d(np.zeros(10)), (1,)) == 1
    M = 1000
    for k in (1, 2, 3):
        assert abs(weyl_average(sample_1d(np.arange(M) / M), (k,))) <= 1e-10
    with pytest.raises(ZeroVector):
        weyl_average(sample_1d([0.1]), (0,))


@given(st.lists(unit_floats, min_size=1, max_size=100), st.integers(-5, 5).filter(bool))
def test_weyl_bounded_and_reversal_invariant(xs, k):
    a = weyl_average(sample_1d(xs), (k,))
    b = weyl_average(sample_1d(xs[::-1]), (k,))
    assert abs(a) <= 1 + 1e-12
    assert abs(a - b) <= 1e-12


def test_frequency_vectors():
    assert frequency_vectors(1, 3) == [(1,), (2,), (3,)]
    ks = frequency_vectors(2, 3)
    assert len(ks) == 24
    assert not any(tuple(-v for v in k) in ks for k in ks)


def test_weyl_exact_matches_float():
    alpha = random_padic(9, 5, 400)
    betas = [from_integer(1, 5, 400), teichmuller(2, 5, 400)]
    exact = partial_sum_sequence(alpha, betas, 300, exact=True)
    approx = partial_sum_sequence(alpha, betas, 300, exact=False)
    for k in frequency_vectors(2, 3):
        assert abs(weyl_average(exact, k) - weyl_average(approx, k)) <= 1e-10


# -- partial sum sequences -----------------------------------------------------


def test_partial_sum_sequence_of_one():
    one = from_integer(1, 3, 30)
    s = partial_sum_sequence(one, [one], 20)
    assert [row[0] for row in s.exact] == [Fraction(1, 3 ** (n + 1)) for n in range(20)]
    assert star_discrepancy_1d(s.points) > 0.8


@given(st.integers(0, 2**32), st.sampled_from([3, 5, 7]))
def test_partial_sum_rows_in_unit_cube(seed, p):
    alpha = random_padic(seed, p, 80)
    s = partial_sum_sequence(alpha, [from_integer(1, p, 80), teichmuller(p - 1, p, 80)], 60)
    for row in s.exact:
        assert all(0 <= x < 1 for x in row)
    assert np.all((s.points >= 0) & (s.points < 1))
    exact = np.array([[float(x) for x in row] for row in s.exact])
    assert np.allclose(exact, s.points, atol=1e-15)


def test_partial_sum_sequence_random_alpha():
    alpha = random_padic(11, 3, M_BIG)
    s = partial_sum_sequence(alpha, [from_integer(1, 3, M_BIG)], M_BIG)
    assert not s.is_exact
    assert star_discrepancy_1d(s.points) <= 0.02
    for k in (1, 2, 3):
        assert abs(weyl_average(s, (k,))) <= 0.02


def test_partial_sum_sequence_precision():
    with pytest.raises(PrecisionExhausted):
        partial_sum_sequence(random_padic(1, 3, 10), [from_integer(1, 3, 10)], 11)


@pytest.mark.parametrize("p", [3, 5, 13, 101])
def test_real_coordinates_window(p):
    W = window_width(p)
    assert p**W <= np.iinfo(np.int64).max < p ** (W + 1)
    gamma = random_padic(4, p, 120)
    xs = real_coordinates(gamma, 100, offset=3)
    exact = [float(Fraction(gamma.partial_sum(n), p ** (n + 1))) for n in range(3, 103)]
    assert np.allclose(xs, exact, rtol=0, atol=max(2.0 * p**-W, 1e-15))


# -- cylinder frequencies --------------------------------------------------------


def test_z_score_guards():
    assert z_score(10, 10, Fraction(1)) == 0
    assert z_score(0, 10, Fraction(0)) == 0
    assert z_score(5, 10, Fraction(1, 2)) == 0


def test_cylinder_frequency_examples():
    words = orbit_words(from_integer(0, 3, 60), 50)
    assert cylinder_frequency(words, CylinderSpec(3)) == (1.0, 0.0)
    freq, z = cylinder_frequency(words, CylinderSpec(3, {0: 0}))
    assert freq == 1 and z > 5
    with pytest.raises(PrecisionExhausted):
        cylinder_frequency([OneSidedWord(3, (1,))], CylinderSpec(3, {1: 0}))


def test_cylinder_frequency_random_orbit():
    alpha = random_padic(21, 3, M_BIG + 3)
    for depth in (1, 2, 3):
        counts = block_counts(alpha.digits, 3, M_BIG, depth)
        mu = Fraction(1, 3**depth)
        assert max(abs(z_score(int(c), M_BIG, mu)) for c in counts) <= 5


def test_block_counts_match_word_membership():
    alpha = random_padic(2, 3, 200)
    words = orbit_words(alpha, 150)
    counts = block_counts(alpha.digits, 3, 150, 2)
    for code, spec in enumerate(all_block_specs(3, 0, 2)):
        freq, _ = cylinder_frequency(words, spec)
        assert round(freq * 150) == counts[code]


def test_block_counts_chunking():
    alpha = random_padic(3, 5, 10_010)
    whole = block_counts(alpha.digits, 5, 10_000, 3)
    chunks = sum(block_counts(alpha.digits, 5, 2500, 3, start=s) for s in range(0, 10_000, 2500))
    assert np.array_equal(whole, chunks)


def test_uniform_words_match_measure():
    M, L = M_BIG, 2
    rows = sample_uniform_words(17, 3, L, 3, M)
    from fwergodic.symbolic import spec_indicator

    for depth in (1, 2, 3):
        for spec in all_block_specs(3, 0, depth):
            hits = int(spec_indicator(rows, L, spec).sum())
            assert abs(z_score(hits, M, Fraction(1, 3**depth))) <= 5


# -- genericity ------------------------------------------------------------------


@pytest.mark.parametrize("c", [1, 2, 17])
def test_small_integers_are_not_generic(c):
    rep = genericity_test(from_integer(c, 3, 2003), 2000)
    assert not rep.verdict
    assert rep.max_abs_z > 5


def test_random_alpha_is_generic():
    rep = genericity_test(random_padic(7, 3, M_BIG + 3), M_BIG)
    assert rep.verdict
    assert rep.max_abs_z <= 5 and rep.star_discrepancy <= 0.02
    assert len(rep.cylinders) == 3 + 9 + 27
    assert all(w["abs"] <= 0.02 for w in rep.weyl)


def test_verdict_is_reproducible_from_statistics():
    rep = genericity_test(random_padic(8, 5, 5003), 5000)
    d = json.loads(json.dumps(rep.to_dict()))
    assert d["z_threshold"] == 5.0 and d["dstar_threshold"] == 0.02
    recomputed = max(abs(c["z"]) for c in d["cylinders"]) <= d["z_threshold"] and d["star_discrepancy"] <= d["dstar_threshold"]
    assert recomputed == d["verdict"] == rep.decide()
    strict = genericity_test(random_padic(8, 5, 5003), 5000, z_threshold=0.1)
    assert not strict.verdict


def test_unit_multiple_has_same_verdict():
    alpha = random_padic(7, 3, M_BIG + 3)
    u = teichmuller(2, 3, M_BIG + 3)
    assert genericity_test(alpha, M_BIG).verdict and genericity_test(u * alpha, M_BIG).verdict


def test_genericity_precision():
    with pytest.raises(PrecisionExhausted):
        genericity_test(random_padic(1, 3, 100), 98)


def test_genericity_csv_rows():
    rep = genericity_test(random_padic(1, 3, 103), 100, weyl_max=2)
    rows = list(rep.csv_rows())
    assert sum(r[0] == "cylinder" for r in rows) == 39
    assert [r[0] for r in rows[-4:]] == ["star_discrepancy", "box_discrepancy", "weyl", "weyl"]


# -- character averages -------------------------------------------------------------


def zero_points(*gammas):
    return ProductPoint(tuple(SolenoidPoint.at_zero(g) for g in gammas))


def test_character_average_of_zero():
    z = from_integer(0, 5, 50)
    for route in ("combined", "componentwise"):
        assert character_average(zero_points(z, z), (1, 2), 3, 40, route=route) == 1


def test_character_average_random():
    g = random_padic(13, 3, M_BIG + 1)
    assert abs(character_average(zero_points(g), (1,), 1, M_BIG)) <= 0.02


@pytest.mark.parametrize("m,t", [((1, -2), 2), ((3, 1), 0), ((2, 2), 4)])
def test_character_routes_agree(m, t):
    a, b = random_padic(1, 3, 5000), random_padic(2, 3, 5000)
    P = zero_points(a, b)
    combined = character_average(P, m, t, 4000)
    split = character_average(P, m, t, 4000, route="componentwise")
    assert abs(combined - split) <= 1e-10


def test_character_average_matches_orbit_iteration():
    a, b = random_padic(3, 5, 80), random_padic(4, 5, 80)
    P = zero_points(a, b)
    for m, t in [((1, 1), 1), ((2, -1), 3)]:
        ref = character_average_orbit(P, CharacterIndex(m, t), 60)
        assert abs(character_average(P, m, t, 60) - ref) <= 1e-10


def test_character_average_errors():
    g = random_padic(1, 3, 10)
    with pytest.raises(PrecisionExhausted):
        character_average(zero_points(g), (1,), 2, 9)
    with pytest.raises(ZeroVector):
        character_average(zero_points(g), (0,), 1, 5)


# -- joint test and reduction --------------------------------------------------------


def test_joint_box_limit():
    assert joint_box_limit(3, 2, 1, 100, 5) == pytest.approx(5 * math.sqrt((1 / 9) * (8 / 9) / 100))


def test_joint_test_random_and_degenerate():
    N = 20_003
    a = random_padic(5, 5, N)
    good = joint_test([a, a * teichmuller(2, 5, N)], 20_000)
    assert good.verdict and good.depths == [1, 2]
    bad = joint_test([a, a], 20_000)
    assert not bad.verdict


def test_reduction_r1_agrees():
    alpha = random_padic(2, 3, 20_003)
    rep = reduction_check(alpha, [from_integer(1, 3, 20_003)], 1, 20_000)
    assert rep.agree and rep.joint_pass and rep.all_sigma_pass
    assert [s["m"] for s in rep.sigmas] == [[-1], [1]]


def test_reduction_zero_alpha_fails_both():
    N = 2003
    rep = reduction_check(from_integer(0, 5, N), [from_integer(1, 5, N), teichmuller(2, 5, N)], 1, 2000)
    assert rep.agree and not rep.joint_pass and not rep.all_sigma_pass


def test_reduction_parallel_matches_serial():
    N = 5003
    alpha = random_padic(6, 5, N)
    betas = [from_integer(1, 5, N), teichmuller(2, 5, N)]
    a = reduction_check(alpha, betas, 1, 5000).to_dict()
    b = reduction_check(alpha, betas, 1, 5000, workers=2).to_dict()
    assert a == b


def test_json_and_csv_writers():
    buf = io.StringIO()
    dump_json({"b": 1, "a": [1.5]}, buf)
    assert buf.getvalue().startswith('{\n  "a"')
    buf = io.StringIO()
    write_rows_csv(["x", "y"], [["a,b", 1]], buf)
    assert buf.getvalue() == 'x,y\n"a,b",1\n'
