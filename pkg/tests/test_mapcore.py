import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import finite_difference
from saddlefocus import (Branch, DomainError, MapParams, NonFiniteError, Status, Variant, derivative,
                         invariant_bound, iterate, step, step_from_origin)
from saddlefocus.mapcore import envelope_threshold

rhos = st.floats(0.1, 3.0)
mus = st.floats(-1.0, 1.0).filter(lambda m: m != 0.0)
omegas = st.floats(0.5, 12.0)
phis = st.floats(-math.pi, math.pi)
states = st.floats(1e-6, 5.0)


def test_step_hand_values():
    # ln 1 = 0, so f(1) = mu + cos(phi)
    assert step(MapParams(0.5, 0.05, 10.0), 1.0) == 1.05
    assert step(MapParams(0.5, 0.05, 10.0), -1.0) == -1.05
    assert step(MapParams(2.0, 0.1, 3.0, phi=math.pi / 2), 1.0) == pytest.approx(0.1, abs=1e-15)
    # omega ln x = pi: f(x) = mu - x**rho
    x = math.exp(math.pi / 4.0)
    assert step(MapParams(2.0, 0.3, 4.0), x) == pytest.approx(0.3 - x * x, rel=1e-14)


def test_one_sided_matches_symmetric_on_positive_axis():
    sym = MapParams(0.7, 0.2, 5.0)
    one = MapParams(0.7, 0.2, 5.0, variant=Variant.ONE_SIDED)
    for x in (0.01, 0.3, 1.7):
        assert step(sym, x) == step(one, x)


def test_domain_errors():
    one = MapParams(0.7, 0.2, 5.0, variant="one-sided")
    with pytest.raises(DomainError):
        step(one, -0.5)
    with pytest.raises(DomainError):
        step(one, 0.0)
    with pytest.raises(DomainError):
        step_from_origin(one, Branch.NEGATIVE)
    with pytest.raises(DomainError):
        MapParams(0.0, 0.1, 1.0)
    with pytest.raises(DomainError):
        MapParams(0.5, 0.1, -1.0)
    with pytest.raises(DomainError):
        MapParams(0.5, math.nan, 1.0)
    with pytest.raises(DomainError):
        step(MapParams(0.5, 0.1, 1.0), math.inf)


def test_overflow_is_reported():
    with pytest.raises(NonFiniteError):
        step(MapParams(3.0, 0.1, 1.0), 1e200)


def test_step_from_origin():
    p = MapParams(0.5, 0.3, 10.0)
    assert step_from_origin(p) == 0.3
    assert step_from_origin(p, Branch.NEGATIVE) == -0.3


@settings(max_examples=300, deadline=None)
@given(rhos, mus, omegas, phis, states)
def test_symmetric_map_is_odd_bit_exact(rho, mu, omega, phi, x):
    p = MapParams(rho, mu, omega, phi)
    assert step(p, -x) == -step(p, x)


@settings(max_examples=300, deadline=None)
@given(rhos, omegas, phis, states)
def test_derivative_even_and_matches_finite_difference(rho, omega, phi, x):
    # mu shifts f by a constant; mu = 0 keeps the difference quotient free of cancellation
    p = MapParams(rho, 0.0, omega, phi)
    d = derivative(p, x)
    assert derivative(p, -x) == d
    h = 1e-4 * x / omega
    fd = finite_difference(lambda t: step(p, t), x, h)
    # scale by the amplitude of f' so zeros of the cosine do not blow up the ratio
    scale = math.hypot(rho, omega) * x ** (rho - 1.0)
    assert abs(fd - d) <= 1e-5 * scale


@settings(max_examples=200, deadline=None)
@given(st.floats(0.1, 0.95), mus, omegas, phis)
def test_orbit_stays_inside_bound_rho_below_one(rho, mu, omega, phi):
    p = MapParams(rho, mu, omega, phi)
    beta = invariant_bound(p)
    traj = iterate(p, mu, 300)
    assert np.all(np.abs(traj.points) <= beta * (1 + 1e-12))


@settings(max_examples=200, deadline=None)
@given(st.floats(1.05, 3.0), st.floats(0.01, 0.99), omegas, st.booleans())
def test_orbit_stays_inside_bound_below_envelope(rho, frac, omega, negative):
    mu = frac * envelope_threshold(rho) * (-1 if negative else 1)
    p = MapParams(rho, mu, omega)
    beta = invariant_bound(p)
    assert beta is not None
    assert abs(beta ** rho - beta + abs(mu)) < 1e-12
    traj = iterate(p, mu, 300)
    assert np.all(np.abs(traj.points) <= beta * (1 + 1e-12))


def test_invariant_bound_cases():
    assert invariant_bound(MapParams(0.5, 0.5, 3.0)) == pytest.approx(2.25)
    assert invariant_bound(MapParams(1.0, 0.5, 3.0)) is None
    assert invariant_bound(MapParams(2.0, 0.3, 3.0)) is None
    # rho = 2: x^2 - x + mu = 0 has smallest root (1 - sqrt(1 - 4 mu)) / 2
    assert invariant_bound(MapParams(2.0, 0.16, 3.0)) == pytest.approx(0.2, rel=1e-14)
    assert invariant_bound(MapParams(2.0, 0.25, 3.0)) == pytest.approx(0.5, rel=1e-7)


def test_iterate_statuses():
    p = MapParams(0.5, 0.05, 10.0)
    t = iterate(p, 0.05, 100)
    assert t.status is Status.MAX_ITERATIONS and len(t) == 101
    assert t.points[0] == 0.05 and not t.points.flags.writeable
    # mu = -1, x = -1: f(-1) = -(mu + 1) = 0 exactly
    z = iterate(MapParams(0.5, -1.0, 5.0), -1.0, 10)
    assert z.status is Status.REACHED_ZERO and z.last == 0.0 and len(z) == 2
    d = iterate(MapParams(3.0, 0.5, 1.0), 0.5, 100)
    assert d.status is Status.DIVERGED and abs(d.last) > 1e12
    one = MapParams(0.5, 0.05, 10.0, variant="one-sided")
    o = iterate(one, 0.05, 100)
    assert o.status is Status.LEFT_DOMAIN and o.last < 0.0
