import math

import numpy as np
import pytest
from scipy.integrate import quad

from fracnls import (
    Bump,
    Field,
    Lattice,
    NonlinearitySpec,
    PotentialSpec,
    PowerWell,
    TorusGrid,
    frac_laplacian_fourier,
    frac_laplacian_pv,
    hardy_weight,
    l2_inner,
)
from fracnls.constants import c_N_alpha, mu_star
from fracnls.errors import InvalidOrder, InvalidSpec, NotLocalized
from fracnls.inequalities import _kinetic, gagliardo_seminorm
from fracnls.operators import apply_f, defocusing_term, primitive_F

from conftest import gaussian


def _rel(a, b):
    return np.linalg.norm(a - b) / np.linalg.norm(b)


def test_constant_field_is_annihilated():
    g = TorusGrid(2, 6.0, 16)
    for a in (0.5, 1.0, 2.0):
        assert np.max(np.abs(frac_laplacian_fourier(Field(g, 3.0), a).values)) < 1e-13


@pytest.mark.parametrize("alpha", [0.0, -0.5, 2.5])
def test_order_out_of_range(alpha):
    g = TorusGrid(1, 1.0, 8)
    with pytest.raises(InvalidOrder):
        frac_laplacian_fourier(Field.zeros(g), alpha)


def test_order_two_is_the_spectral_laplacian(rng):
    g = TorusGrid(2, (4.0, 6.0), (16, 32))
    u = Field(g, rng.standard_normal(g.shape))
    kx, ky = np.meshgrid(*g.wavenumbers, indexing="ij")
    ref = np.fft.ifftn((kx**2 + ky**2) * np.fft.fftn(u.values)).real
    assert _rel(frac_laplacian_fourier(u, 2.0).values, ref) < 1e-13


def test_gaussian_second_derivative():
    g = TorusGrid(1, 30.0, 256)
    u = gaussian(g)
    x = g.axes[0]
    exact = (1 - x * x) * np.exp(-x * x / 2)
    assert np.max(np.abs(frac_laplacian_fourier(u, 2.0).values - exact)) < 1e-12


def test_half_laplacian_of_lorentzian_profile():
    # (-Lap)^{1/2} (1+x^2)^{-1} = (1-x^2)/(1+x^2)^2 on the line; the torus
    # version differs by the periodic images, so only a loose check is possible
    g = TorusGrid(1, 400.0, 8192)
    x = g.axes[0]
    u = Field(g, 1 / (1 + x * x))
    out = frac_laplacian_fourier(u, 1.0).values
    exact = (1 - x * x) / (1 + x * x) ** 2
    core = np.abs(x) < 5
    assert np.max(np.abs(out[core] - exact[core])) < 1e-3


def test_pv_zero_and_reflection_symmetry():
    g = TorusGrid(1, 40.0, 256)
    assert not np.any(frac_laplacian_pv(Field.zeros(g), 0.5).values)
    u = gaussian(g, center=(1.3,)) + gaussian(g, width=0.7, center=(-2.0,), amp=0.5)
    ur = Field(g, u.values[::-1])
    a = frac_laplacian_pv(u, 0.8).values
    b = frac_laplacian_pv(ur, 0.8).values
    assert np.max(np.abs(a[::-1] - b)) <= 1e-13 * np.max(np.abs(a))


def test_pv_agrees_with_fourier_on_gaussian():
    g = TorusGrid(1, 40.0, 512)
    u = gaussian(g)
    assert _rel(frac_laplacian_pv(u, 0.5).values, frac_laplacian_fourier(u, 0.5).values) < 0.02


def test_pv_errors():
    g = TorusGrid(1, 40.0, 256)
    with pytest.raises(InvalidOrder):
        frac_laplacian_pv(gaussian(g), 2.0)
    with pytest.raises(NotLocalized):
        frac_laplacian_pv(Field(g, 1.0), 0.5)
    with pytest.raises(NotImplementedError):
        frac_laplacian_pv(Field(TorusGrid(2, 10.0, 16), 0.0), 0.5)


@pytest.mark.parametrize("alpha", [0.5, 1.0, 1.5])
def test_form_constant_against_double_integral(alpha):
    # spectral quadratic form vs. c_{1,alpha} times the Gagliardo double integral
    g = TorusGrid(1, 20.0, 64)
    u = Field.from_function(g, lambda x: np.exp(-x * x / 4) * (1 + 0.3 * np.sin(x)))
    ratio = _kinetic(u, alpha) / (c_N_alpha(1, alpha) * gagliardo_seminorm(u, alpha))
    assert ratio == pytest.approx(1.0, abs=1e-3)


def test_hardy_weight_is_one_at_unit_distance():
    g = TorusGrid(1, 16.0, 8)  # h = 2: nodes at +-1, +-3, ...
    x = g.axes[0]
    w = hardy_weight(g, 0.7).values
    assert np.all(w[np.abs(x) == 1.0] == 1.0)


def test_hardy_weight_is_even():
    g = TorusGrid(2, 5.0, 16)
    w = hardy_weight(g, 1.5).values
    assert np.array_equal(w, w[::-1, ::-1])


def test_hardy_weight_quadrature_against_exact_integral():
    # int e^{-2|x|^2}/|x| dx = pi in 3-D; nodal sums converge at O(h^2), so
    # two levels of Richardson extrapolation are compared with the exact value
    vals = []
    for M in (64, 128):
        g = TorusGrid(3, 12.0, M)
        u = gaussian(g, width=math.sqrt(0.5))
        vals.append(l2_inner(u, u * hardy_weight(g, 1.0)))
    extrap = (4 * vals[1] - vals[0]) / 3
    assert extrap == pytest.approx(math.pi, rel=1e-4)


def test_nonlinearity_direct_values():
    g = TorusGrid(1, 1.0, 8)
    nl = NonlinearitySpec(4.0, 3.0, 1.0, 0.0)
    u = Field(g, 2.0)
    assert np.all(apply_f(u, nl).values == 8.0)
    assert np.all(primitive_F(u, nl).values == 4.0)
    assert not np.any(apply_f(Field.zeros(g), nl).values)
    nk = NonlinearitySpec(4.0, 3.0, 1.0, 0.5)
    assert np.all(defocusing_term(u, nk).values == pytest.approx(2.0))


def test_superlinear_growth_over_defocusing_power():
    # f(u)/u^q increasing on a log grid when p - 1 > q
    g = TorusGrid(1, 1.0, 8)
    nl = NonlinearitySpec(4.0, 2.5, 1.0, 0.0)
    s = np.logspace(-8, 8, 400)
    ratio = [apply_f(Field(g, v), nl).values[0] / v**nl.q for v in s]
    assert np.all(np.diff(ratio) > 0)


def test_potential_validation():
    g = TorusGrid(1, 10.0, 64)
    PotentialSpec("periodic", Lattice(1.0, 0.3, 1.0)).validate(g, 0.5)
    PotentialSpec("close_to_periodic", 1.0, Bump(-0.3)).validate(g, 0.5)
    PotentialSpec("coercive", coercive=PowerWell(1.0, 0.5, 2.0)).validate(g, 0.5)
    bad = [
        PotentialSpec("sticky"),
        PotentialSpec("periodic", 1.0, Bump(0.1)),
        PotentialSpec("periodic", mu=0.1),
        PotentialSpec("hardy", 1.0, mu=mu_star(1, 0.5)),
        PotentialSpec("hardy", 1.0, mu=-0.1),
        PotentialSpec("coercive"),
        PotentialSpec("coercive", coercive=PowerWell(0.0)),
        PotentialSpec("periodic", Lattice(0.2, 0.3)),
        PotentialSpec("close_to_periodic", 1.0, Bump(-1.5)),
        PotentialSpec("close_to_periodic", 1.0, Field.from_function(g, np.sin)),
    ]
    for pot in bad:
        with pytest.raises(InvalidSpec):
            pot.validate(g, 0.5)


def test_positive_bump_only_needs_positive_periodic_part():
    g = TorusGrid(1, 10.0, 64)
    PotentialSpec("close_to_periodic", 1.0, Bump(5.0)).validate(g, 0.5)
    assert PotentialSpec("close_to_periodic", 1.0, Bump(5.0)).v_loc_sign(g) == "positive"


def test_coercive_profile_grows():
    g = TorusGrid(1, 20.0, 64)
    V = PotentialSpec("coercive", coercive=PowerWell(1.0, 0.5, 2.0)).arrays(g)[0]
    r = np.abs(g.axes[0])
    assert V.min() == pytest.approx(1.0 + 0.5 * r.min() ** 2)
    assert V[np.argmax(r)] == V.max()


def test_nonlinearity_validation():
    g = TorusGrid(1, 10.0, 64)
    NonlinearitySpec(3.5, 2.5).validate(g, 0.5)
    for nl in (
        NonlinearitySpec(3.0, 2.0),
        NonlinearitySpec(3.0, 3.5),
        NonlinearitySpec(5.0, 2.5),
        NonlinearitySpec(3.5, 2.5, gamma=0.0),
        NonlinearitySpec(3.5, 2.5, K=-1.0),
    ):
        with pytest.raises(InvalidSpec):
            nl.validate(g, 0.5)
    with pytest.raises(InvalidSpec, match="2\\*_alpha"):
        NonlinearitySpec(5.0, 2.5).validate(g, 0.5)


def test_lattice_quadrature_of_cosine_integrand():
    # the mean of a cos-lattice over whole periods is exact
    g = TorusGrid(1, 8.0, 64)
    v = Lattice(2.0, 0.5, 2.0).on(g)
    assert v.mean() == pytest.approx(2.0, rel=1e-14)
    exact = quad(lambda x: 2.0 + 0.5 * math.cos(math.pi * x), -4, 4)[0]
    assert v.sum() * g.spacing[0] == pytest.approx(exact, rel=1e-13)
