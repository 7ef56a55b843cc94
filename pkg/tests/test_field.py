import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import all_fields, sample_points
from umbilic import (Direction, DomainError, Jet2, Point2, PolarPoint,
                     decay_profile, directional, eval_jet, fd_jet,
                     make_field, rotate_frame, tabulated_field,
                     uniform_field)


def test_point_types_validate():
    with pytest.raises(ValueError):
        Point2(float("nan"), 0.0)
    with pytest.raises(ValueError):
        PolarPoint(-1.0, 0.0)
    p = PolarPoint(2.0, -math.pi / 2)
    assert 0.0 <= p.theta < 2 * math.pi
    assert abs(p.to_point().y + 2.0) < 1e-12


def test_direction_unit_norm():
    for theta in (0.0, 0.3, 2.0, -1.0, 11.0):
        d = Direction(theta)
        assert abs(d.x ** 2 + d.y ** 2 - 1.0) < 1e-14


def test_eval_jet_paraboloid_origin():
    assert eval_jet(make_field("paraboloid"), (0.0, 0.0)) == Jet2(0, 0, 0, 2, 0, 2)


def test_eval_jet_saddle():
    assert eval_jet(make_field("saddle"), (1.0, 2.0)) == Jet2(2, 2, 1, 0, 1, 0)


def test_eval_jet_gaussian_origin():
    j = eval_jet(make_field("gaussian_bump"), Point2(0.0, 0.0))
    assert j == Jet2(1, 0, 0, -2, 0, -2)


def test_directional_reads_jet():
    j = eval_jet(make_field("saddle"), (1.0, 2.0))
    fX, fXX = directional(j, Direction(0.0))
    assert (fX, fXX) == (2.0, 0.0)


def test_directional_isotropic():
    j = eval_jet(make_field("paraboloid"), (0.0, 0.0))
    for theta in (0.0, 0.7, 2.1):
        fX, fXX = directional(j, Direction(theta))
        assert abs(fX) < 1e-15
        assert abs(fXX - 2.0) < 1e-13


def test_directional_saddle_diagonal():
    j = eval_jet(make_field("saddle"), (0.0, 0.0))
    fX, fXX = directional(j, Direction(math.pi / 4))
    assert abs(fX) < 1e-15
    assert abs(fXX - 1.0) < 1e-14


def test_rotate_frame_identity_and_flip():
    j = eval_jet(make_field("saddle"), (0.3, -0.4))
    assert rotate_frame(j, 0.0) == j
    jr = rotate_frame(eval_jet(make_field("saddle"), (0.0, 0.0)), math.pi / 2)
    assert np.allclose([jr.f11, jr.f12, jr.f22], [0.0, -1.0, 0.0], atol=1e-15)


def test_rotate_frame_full_turn():
    j = eval_jet(make_field("asym_bump"), (0.4, 0.9))
    jr = rotate_frame(j, 2 * math.pi)
    assert np.allclose(list(jr), list(j), atol=1e-14)


@settings(max_examples=40, deadline=None)
@given(st.floats(-2, 2), st.floats(-2, 2),
       st.floats(0, 2 * math.pi), st.floats(0, 2 * math.pi))
def test_rotate_frame_group_action(x, y, t1, t2):
    j = eval_jet(make_field("asym_bump"), (x, y))
    a = rotate_frame(rotate_frame(j, t2), t1)
    b = rotate_frame(j, t1 + t2)
    assert np.allclose(list(a), list(b), atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.floats(-2, 2), st.floats(-2, 2), st.floats(0, 2 * math.pi))
def test_directional_trace_identity(x, y, theta):
    j = eval_jet(make_field("bates_like"), (x, y))
    _, fXX = directional(j, Direction(theta))
    _, fYY = directional(j, Direction(theta).perp())
    assert abs(fXX + fYY - (j.f11 + j.f22)) < 1e-12


@pytest.mark.parametrize("field", all_fields(), ids=lambda f: f.name)
def test_analytic_jets_match_finite_differences(field, rng):
    def value(x, y):
        return float(field.value(x, y))

    for x, y in sample_points(field, 100, rng):
        j = field.jet((x, y))
        scale = max(1.0, math.hypot(x, y))
        fd = fd_jet(value, (x, y), grad_step=1e-5 * scale, hess_step=1e-5 * scale)
        assert abs(j.f1 - fd.f1) < 1e-7
        assert abs(j.f2 - fd.f2) < 1e-7
        for a, b in ((j.f11, fd.f11), (j.f12, fd.f12), (j.f22, fd.f22)):
            assert abs(a - b) < 1e-4


def test_decay_profile_inverse_quadratic():
    # analytic: |grad f| = 2r/(1+r^2)^2, so r|grad f| at r=10 is 200/101^2
    prof = decay_profile(make_field("inverse_quadratic"), [10.0])
    expected = 2.0 * 10.0 ** 2 / (1.0 + 10.0 ** 2) ** 2
    assert abs(prof.sup_rgrad[0] - expected) < 1e-12
    assert prof.c_source == "metadata"


def test_decay_profile_constant_field():
    prof = decay_profile(uniform_field(1.0), [1.0, 5.0, 25.0])
    assert prof.sup_dev == (0.0, 0.0, 0.0)
    assert prof.sup_rgrad == (0.0, 0.0, 0.0)


def test_decay_profile_loglog_tail():
    # analytic gradient 1/(r log r) outside the cutoff: r|grad f| = 1/log r
    prof = decay_profile(make_field("loglog_tail"), [100.0])
    assert abs(prof.sup_rgrad[0] - 1.0 / math.log(100.0)) < 1e-12
    assert prof.c_source == "ring-mean"  # family is unbounded, no metadata c


def test_decay_profile_nonnegative_and_validates():
    prof = decay_profile(make_field("gaussian_bump"), [1.0, 2.0, 4.0])
    assert all(v >= 0.0 for v in prof.sup_dev + prof.sup_rgrad)
    with pytest.raises(ValueError):
        decay_profile(make_field("gaussian_bump"), [2.0, 1.0])
    with pytest.raises(ValueError):
        decay_profile(make_field("gaussian_bump"), [1.0], n_theta=4)


def test_tabulated_field_matches_source_and_guards_domain():
    src = make_field("gaussian_bump")
    xs = np.linspace(-2.0, 2.0, 61)
    vals = src.value(*np.meshgrid(xs, xs, indexing="ij"))
    tab = tabulated_field(xs, xs, vals, "tab-gaussian")
    assert tab.jet_kind == "spline"
    rng = np.random.default_rng(7)
    for x, y in rng.uniform(-1.5, 1.5, size=(25, 2)):
        a = src.jet((x, y))
        b = tab.jet((x, y))
        assert abs(a.f - b.f) < 1e-6
        assert abs(a.f1 - b.f1) < 1e-4
        assert abs(a.f11 - b.f11) < 1e-2
    with pytest.raises(DomainError):
        tab.jet((3.0, 0.0))


def test_sphere_cap_domain_error():
    with pytest.raises(DomainError):
        make_field("sphere_cap").jet((0.8, 0.8))
