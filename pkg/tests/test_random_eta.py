import math
from fractions import Fraction

import pytest
import scipy.stats
from hypothesis import given, settings
from hypothesis import strategies as st

from pierce_expansion import (
    DigitDistribution,
    Purity,
    StochasticMatrix,
    ValidationError,
    cylinder,
    discreteness_criterion,
    invariance_check,
    ks_uniform,
    parse_matrix,
    sample_eta,
    singularity_experiment,
)
from pierce_expansion.random_eta import ks_critical_value, sample_eta_batch
from pierce_expansion.rng import sample_generator

GEOMETRIC = DigitDistribution.geometric()
ONE_MINUS_INV_E = 1 - 1 / math.e


def finite_law(weights):
    total = sum(weights)
    return DigitDistribution(tuple(Fraction(w, total) for w in weights))


finite_laws = st.lists(st.integers(0, 9), min_size=1, max_size=6).filter(any).map(finite_law)


def test_distribution_validation():
    with pytest.raises(ValidationError):
        DigitDistribution((Fraction(1, 2), Fraction(1, 3)))
    with pytest.raises(ValidationError):
        DigitDistribution((Fraction(3, 2), Fraction(-1, 2)))
    with pytest.raises(ValidationError):
        DigitDistribution((Fraction(1, 2),), ratio=Fraction(1))


def test_geometric_law_probabilities():
    for m in range(1, 30):
        assert GEOMETRIC.prob(m) == Fraction(1, 2**m)
    assert GEOMETRIC.mass_above(20) == Fraction(1, 2**20)
    assert GEOMETRIC.support_max is None
    mixed = DigitDistribution((Fraction(1, 2),), Fraction(1, 2))
    assert [mixed.prob(m) for m in (1, 2, 3)] == [Fraction(1, 2), Fraction(1, 4), Fraction(1, 8)]
    total = sum(mixed.prob(m) for m in range(1, 60)) + mixed.mass_above(59)
    assert total == 1


@settings(max_examples=30)
@given(finite_laws, st.integers(0, 8))
def test_mass_above_matches_sum(law, cutoff):
    assert law.mass_above(cutoff) == 1 - sum(law.prob(m) for m in range(1, cutoff + 1))


def test_parse_matrix():
    m = parse_matrix("# two rows\n1/2 1/2\n1/4 geom:1/3\n")
    assert m.row(1).prob(2) == Fraction(1, 2)
    assert m.row(7) == m.row(2)
    assert m.row(2).prob(2) == Fraction(3, 4) * Fraction(2, 3)
    for bad in ["", "1/2 1/3", "geom:1/2 1/4", "1/2 geom:1/2 geom:1/3", "x"]:
        with pytest.raises(ValidationError):
            parse_matrix(bad)


def test_degenerate_eta_is_one_minus_inverse_e():
    s = sample_eta(StochasticMatrix.iid(DigitDistribution.point(1)), 100, 0)
    assert s.digits.digits == (1,) * 100
    assert s.cylinder.length == Fraction(1, math.factorial(100) * 101)
    assert float(s.cylinder.left) <= ONE_MINUS_INV_E <= float(s.cylinder.right)
    # 1/e = sum (-1)^j / j!, alternating, so 200 terms pin it within 1/201!
    inv_e = sum(Fraction((-1) ** j, math.factorial(j)) for j in range(201))
    err = Fraction(1, math.factorial(201))
    assert s.cylinder.left <= 1 - inv_e - err
    assert s.cylinder.right >= 1 - inv_e + err


def test_sample_is_reproducible():
    matrix = StochasticMatrix.iid(GEOMETRIC)
    assert sample_eta(matrix, 30, 5, 3) == sample_eta(matrix, 30, 5, 3)
    assert sample_eta(matrix, 30, 5, 3) != sample_eta(matrix, 30, 5, 4)
    batch = sample_eta_batch(matrix, 20, 40, 9)
    assert batch == sample_eta_batch(matrix, 20, 40, 9, workers=3)
    assert batch[17] == sample_eta(matrix, 20, 9, 17)


@settings(max_examples=20, deadline=None)
@given(finite_laws, st.integers(0, 2**63))
def test_finite_support_samples_stay_in_support(law, seed):
    support = {m for m in range(1, len(law.head) + 1) if law.prob(m) > 0}
    s = sample_eta(StochasticMatrix.iid(law), 25, seed)
    assert set(s.digits.digits) <= support


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 40), st.integers(0, 2**32))
def test_enclosing_cylinder_width_bound(depth, seed):
    s = sample_eta(StochasticMatrix.iid(GEOMETRIC), depth, seed)
    assert s.cylinder.length <= Fraction(1, math.factorial(depth) * (depth + 1))
    assert s.cylinder == cylinder(s.digits.digits)


def test_exact_sampler_matches_law():
    law = DigitDistribution((Fraction(1, 3), Fraction(1, 6)), Fraction(1, 4))
    gen = sample_generator(1, 99, 0)
    n = 20000
    draws = [law.sample(gen) for _ in range(n)]
    for m in (1, 2, 3, 4, 5):
        p = float(law.prob(m))
        assert draws.count(m) / n == pytest.approx(p, abs=5 * (p / n) ** 0.5)


def test_geometric_digit_one_frequency():
    drawn = sample_eta_batch(StochasticMatrix.iid(GEOMETRIC), 100, 2000, 3)
    freq = sum(s.digits.digits.count(1) for s in drawn) / (2000 * 100)
    assert freq == pytest.approx(0.5, abs=0.01)


# -- purity -------------------------------------------------------------------


def test_degenerate_law_is_discrete():
    verdict = discreteness_criterion(StochasticMatrix.iid(DigitDistribution.point(3)), 10)
    assert verdict.purity is Purity.DISCRETE
    assert verdict.witness["max_product"] == "1/1"


def test_half_max_law_is_singular():
    law = DigitDistribution((Fraction(1, 2), Fraction(1, 4), Fraction(1, 4)))
    verdict = discreteness_criterion(StochasticMatrix.iid(law), 12)
    assert verdict.purity is Purity.SINGULAR_CONTINUOUS
    assert verdict.witness["max_product"] == "1/4096"
    assert verdict.witness["divergent_digit"] == 1


def test_eventually_degenerate_rows_are_discrete():
    matrix = StochasticMatrix((GEOMETRIC, finite_law([1, 1]), DigitDistribution.point(2)))
    verdict = discreteness_criterion(matrix, 20)
    assert verdict.purity is Purity.DISCRETE
    assert verdict.witness["limit_product"] == "1/4"


def test_row_function_is_undetermined_with_witness():
    def row(k):
        q = Fraction(1, 4**k)
        return DigitDistribution((1 - q, q))

    verdict = discreteness_criterion(StochasticMatrix.from_function(row), 12)
    assert verdict.purity is Purity.UNDETERMINED
    partials = [Fraction(p) for p in verdict.witness["max_product_partials"]]
    assert all(b < a for a, b in zip(partials, partials[1:]))
    # prod (1 - a_k) >= 1 - sum a_k = 2/3 bounds the partial products below
    assert all(p > Fraction(2, 3) for p in partials)
    assert float(partials[-1]) == pytest.approx(math.prod(1 - 4.0**-k for k in range(1, 13)))


def test_no_absolutely_continuous_class():
    assert {p.value for p in Purity} == {"discrete", "singular-continuous", "undetermined"}


# -- invariance on cylinders ------------------------------------------------------


@settings(max_examples=40)
@given(finite_laws, st.lists(st.integers(1, 6), max_size=4))
def test_finite_support_invariance_exact(law, prefix):
    assert invariance_check(law, prefix, len(law.head)) == 0


def test_geometric_invariance_residual():
    assert invariance_check(GEOMETRIC, (1,), 20) == Fraction(1, 2**21)
    assert invariance_check(GEOMETRIC, (), 20) == Fraction(1, 2**20)


@given(st.lists(st.integers(1, 8), max_size=5), st.integers(1, 40))
def test_residual_is_cylinder_mass_times_tail(prefix, cutoff):
    mass = Fraction(1)
    for c in prefix:
        mass *= GEOMETRIC.prob(c)
    assert invariance_check(GEOMETRIC, prefix, cutoff) == mass * GEOMETRIC.mass_above(cutoff)


# -- Kolmogorov-Smirnov -----------------------------------------------------------


@settings(max_examples=30)
@given(st.lists(st.fractions(0, 1), min_size=1, max_size=50))
def test_ks_matches_scipy(points):
    ours = ks_uniform(points)
    ref = scipy.stats.kstest([float(p) for p in points], "uniform").statistic
    assert 0 <= ours <= 1
    assert float(ours) == pytest.approx(ref, abs=1e-12)


def test_ks_point_mass():
    assert ks_uniform([Fraction(1, 2)] * 10) == Fraction(1, 2)
    assert ks_uniform([Fraction(2 * i + 1, 20) for i in range(10)]) == Fraction(1, 20)


def test_ks_critical_value():
    assert ks_critical_value(10**4) == pytest.approx(1.9495 / 100, rel=2e-3)


# -- singularity experiment --------------------------------------------------------


def test_singularity_geometric_small():
    report = singularity_experiment(StochasticMatrix.iid(GEOMETRIC), 1, 600, 60, 4, bits=512)
    assert float(report.eta_freq) == pytest.approx(0.5, abs=0.03)
    assert report.lebesgue_freq <= Fraction(5, 100)
    assert report.divergence_partial == 30
    assert report.divergent is True
    assert report.ks_rejects_uniform


def test_singularity_degenerate_ks():
    report = singularity_experiment(
        StochasticMatrix.iid(DigitDistribution.point(1)), 1, 50, 30, 1, bits=256
    )
    assert report.ks_statistic >= Fraction(1, 2)
    assert report.eta_freq == 1


def test_singularity_divergence_partial_linear():
    law = finite_law([1, 3])
    report = singularity_experiment(StochasticMatrix.iid(law), 2, 5, 40, 0, bits=256)
    assert report.divergence_partial == 40 * Fraction(3, 4)


def test_singularity_without_condition_has_no_verdict():
    def row(k):
        q = Fraction(1, 2**k)
        return DigitDistribution((q, 1 - q))

    report = singularity_experiment(StochasticMatrix.from_function(row), 1, 20, 20, 0, bits=256)
    assert report.divergent is None
    assert report.summary()["divergence_condition"] is None
    assert report.divergence_partial == 1 - Fraction(1, 2**20)
