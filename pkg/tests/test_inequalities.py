import csv
import math

import numpy as np
import pytest

from fracnls import Field, NonlinearitySpec, TorusGrid
from fracnls.constants import HardyConstants, c_N_alpha
from fracnls.errors import InvalidExponent, NotLocalized
from fracnls.inequalities import (
    default_scan,
    epsilon_bound_check,
    gn_check,
    gn_empirical_constant,
    gn_exponents,
    hardy_check,
    hardy_translation_decay,
    write_hardy_csv,
)

from conftest import gaussian, random_bumps


def test_zero_field_passes_trivially():
    g = TorusGrid(3, 12.0, 16)
    r = hardy_check(Field.zeros(g), HardyConstants.of(3, 1.0))
    assert r.lhs == 0.0 and r.rhs == 0.0 and r.passed


def test_gaussian_both_sides_against_exact_integrals():
    # u = e^{-|x|^2}: <(-Lap)^{1/2}u, u> = pi and int u^2/|x| = pi in 3-D.
    # The torus form approaches the whole-space one as L grows, hence the wide
    # box for the kinetic side; the singular side is Richardson-extrapolated.
    hc = HardyConstants.of(3, 1.0)
    wide = hardy_check(gaussian(TorusGrid(3, 32.0, 96), width=math.sqrt(0.5)), hc)
    assert wide.lhs == pytest.approx(math.pi / c_N_alpha(3, 1.0), rel=1e-4)
    reps = []
    for M in (64, 128):
        g = TorusGrid(3, 12.0, M)
        reps.append(hardy_check(gaussian(g, width=math.sqrt(0.5)), hc))
    rhs = (4 * reps[1].rhs - reps[0].rhs) / 3
    assert rhs == pytest.approx(math.pi, rel=1e-4)
    assert all(r.slack > 0 for r in reps)


def test_local_case_uses_dirichlet_integral():
    g = TorusGrid(3, 12.0, 32)
    r = hardy_check(gaussian(g), HardyConstants.of(3, 2.0))
    assert r.constant == pytest.approx(0.25, rel=1e-12)
    assert r.passed


def test_delocalized_field_is_rejected():
    g = TorusGrid(3, 8.0, 16)
    with pytest.raises(NotLocalized):
        hardy_check(Field(g, 1.0), HardyConstants.of(3, 1.0))


def test_dimension_must_match():
    with pytest.raises(ValueError):
        hardy_check(Field.zeros(TorusGrid(2, 8.0, 16)), HardyConstants.of(3, 1.0))


def test_hardy_csv(tmp_path, rng):
    g = TorusGrid(3, 12.0, 16)
    hc = HardyConstants.of(3, 0.5)
    reps = [hardy_check(random_bumps(g, rng, spread=0.5, widths=(0.5, 1.0)), hc) for _ in range(3)]
    path = tmp_path / "hardy.csv"
    write_hardy_csv(path, reps)
    rows = list(csv.DictReader(open(path)))
    assert len(rows) == 3
    assert float(rows[1]["slack"]) == reps[1].slack


def test_gn_bookkeeping_and_errors():
    for r, N, a in ((2.0, 1, 0.5), (1.5, 3, 1.0), (2.5, 2, 1.5)):
        a_, b_ = gn_exponents(r, N, a)
        assert a_ + b_ == r + 1.0
    g = TorusGrid(1, 20.0, 128)
    assert gn_check(Field.zeros(g), 2.0, 0.5).ratio == 0.0
    with pytest.raises(InvalidExponent):
        gn_check(gaussian(g), 1.0, 0.5)
    with pytest.raises(InvalidExponent):
        gn_check(gaussian(g), 3.5, 0.5)  # r + 1 > 2*_alpha = 4


def test_gn_ratio_is_amplitude_invariant():
    g = TorusGrid(1, 20.0, 128)
    u = gaussian(g)
    assert gn_check(u * 7.0, 2.0, 0.5).ratio == pytest.approx(gn_check(u, 2.0, 0.5).ratio, rel=1e-12)


def test_gn_dilation_family_is_bounded():
    g = TorusGrid(1, 40.0, 512)
    family = [gaussian(g, width=w) for w in (0.5, 0.8, 1.0, 1.5, 2.0)]
    C = gn_empirical_constant(family, 2.0, 0.5)
    assert all(gn_check(u, 2.0, 0.5).ratio <= C for u in family)
    assert math.isfinite(C) and C > 0


def test_epsilon_bound_pure_power():
    for eps in (1e-3, 0.1, 1.0, 10.0):
        b = epsilon_bound_check(NonlinearitySpec(3.5, 2.5), eps)
        assert b.C == pytest.approx(1.0, abs=1e-12)


def test_epsilon_bound_blend_holds_on_finer_scan():
    p, q, eps = 3.5, 2.5, 0.1

    def f(s):
        return np.abs(s) ** (q - 2) * s + np.abs(s) ** (p - 2) * s

    b = epsilon_bound_check(f, eps, p=p)
    fine = default_scan(40001)
    a = np.abs(fine)
    assert np.all(np.abs(f(fine)) <= eps * a + b.C * a ** (p - 1) * (1 + 1e-12))
    # sup over y = 1/|s| of 1 + y - eps y^{3/2} is 1 + 4/(27 eps^2)
    assert b.C == pytest.approx(1 + 4 / (27 * eps**2), rel=1e-10)


def test_epsilon_bound_is_monotone_in_eps():
    def f(s):
        return np.abs(s) ** 0.5 * s + np.abs(s) ** 1.5 * s

    Cs = [epsilon_bound_check(f, e, p=3.5).C for e in (0.01, 0.1, 1.0)]
    assert Cs[0] >= Cs[1] >= Cs[2]


def test_epsilon_bound_needs_exponent_for_callables():
    with pytest.raises(ValueError):
        epsilon_bound_check(np.sin, 0.1)
    with pytest.raises(ValueError):
        epsilon_bound_check(NonlinearitySpec(3.5, 2.5), 0.0)


def test_hardy_term_decays_under_translation():
    g = TorusGrid(1, 40.0, 400)
    u = gaussian(g)
    curve = hardy_translation_decay(u, [0, 50, 100], 0.5)
    base = float(np.sum(u.values**2 * np.abs(g.axes[0]) ** -0.5) * g.spacing[0])
    assert curve.values[0] == pytest.approx(base, rel=1e-14)
    assert curve.values[2] < curve.values[1] < curve.values[0]
    assert list(curve.distances) == pytest.approx([0.0, 5.0, 10.0])
    zero = hardy_translation_decay(Field.zeros(g), [0, 10], 0.5)
    assert not np.any(zero.values)
