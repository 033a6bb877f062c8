from fractions import Fraction
from random import Random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tracestab import catalog
from tracestab.errors import MismatchedModel
from tracestab.packets import (
    GR_ZERO,
    GaussianRational,
    ParameterModel,
    TestVector,
    TwoGroup,
    adjoint_factor,
    adjoint_factor_closed,
    invert_transfer,
    theta_transfer,
    transfer_factor,
    transfer_factor_closed,
    transfer_factor_tagged,
    verify_adjoint,
    with_flipped_pairing,
)

ALL_DIMS = [(sm, r) for sm in range(3) for r in range(3)]


def _model(sm, r, model_id=None):
    return ParameterModel(model_id or f"m{sm}{r}", TwoGroup(sm), TwoGroup(r))


def test_gaussian_rational_arithmetic():
    a = GaussianRational(Fraction(1, 2), Fraction(1, 3))
    b = GaussianRational(Fraction(2), Fraction(-1))
    assert a + b == GaussianRational(Fraction(5, 2), Fraction(-2, 3))
    assert a * b == GaussianRational(Fraction(4, 3), Fraction(1, 6))
    assert a.conjugate().conjugate() == a
    assert (a * a.conjugate()).im == 0


def test_trivial_model_factors():
    m = _model(0, 0)
    assert transfer_factor(m, (0, 0), (0, 0)) == 1
    assert adjoint_factor(m, (0, 0), (0, 0)) == 1
    assert verify_adjoint(m)


def test_transfer_factor_r_only_model():
    m = _model(0, 1)
    r0 = 1
    assert transfer_factor(m, (0, r0), (0, r0)) == 1
    assert transfer_factor(m, (0, r0), (0, 0)) == 0


def test_adjoint_factor_closed_form_examples():
    m = _model(1, 1)
    eta, r0, x0 = 1, 1, 1
    # x with matching R-part evaluates the S_M character at the S_M part.
    assert adjoint_factor(m, (x0, r0), (eta, r0)) == TwoGroup.char(eta, x0) == -1
    # mismatched R-part vanishes.
    assert adjoint_factor(m, (x0, 0), (eta, r0)) == 0


@pytest.mark.parametrize("dims", ALL_DIMS)
def test_route_agreement_exhaustive(dims):
    m = _model(*dims)
    for tau in m.taus():
        for x in m.s_elements():
            assert transfer_factor(m, tau, x) == transfer_factor_closed(m, tau, x)
            assert adjoint_factor(m, x, tau) == adjoint_factor_closed(m, x, tau)


@pytest.mark.parametrize("dims", ALL_DIMS)
def test_scaling_law(dims):
    m = _model(*dims)
    ratio = Fraction(m.r.size, m.s_size)
    for tau in m.taus():
        for x in m.s_elements():
            value = transfer_factor(m, tau, x)
            assert value == ratio * adjoint_factor(m, x, tau)
            assert Fraction(value).denominator >= 1  # rational, hence real


@pytest.mark.parametrize("dims", ALL_DIMS)
def test_adjoint_relations_exhaustive(dims):
    assert verify_adjoint(_model(*dims))


def test_corrupted_pairing_fails_adjoint():
    m = _model(1, 1)
    bad = with_flipped_pairing(m, (1, 0), (1, 1))
    assert not verify_adjoint(bad)


def test_corrupted_pairing_breaks_route_agreement():
    m = _model(1, 1)
    bad = with_flipped_pairing(m, (1, 1), (0, 1))
    mismatches = [
        (tau, x)
        for tau in bad.taus() for x in bad.s_elements()
        if transfer_factor(bad, tau, x) != transfer_factor_closed(bad, tau, x)
    ]
    assert mismatches


def test_theta_transfer_constant_vector():
    m = _model(2, 1)
    ones = TestVector.constant([m], 1)
    for r in m.r.elements():
        assert theta_transfer(m, (0, r), ones) == GaussianRational(Fraction(1))
        for eta in m.s_m.elements():
            if eta != 0:
                assert theta_transfer(m, (eta, r), ones) == GR_ZERO


def test_theta_transfer_trivial_model_constant():
    m = _model(0, 0)
    c = GaussianRational(Fraction(3, 7), Fraction(-2, 5))
    f = TestVector({(m.model_id, (0, 0)): c})
    assert theta_transfer(m, (0, 0), f) == c


def test_invert_transfer_recovers_constants():
    m = _model(1, 1)
    ones = TestVector.constant([m], 1)
    theta = {tau: theta_transfer(m, tau, ones) for tau in m.taus()}
    for x in m.s_elements():
        assert invert_transfer(m, x, theta) == GaussianRational(Fraction(1))


def test_invert_transfer_zero():
    m = _model(1, 1)
    for x in m.s_elements():
        assert invert_transfer(m, x, {}) == GR_ZERO


@pytest.mark.parametrize("dims", [(1, 1), (2, 2), (2, 1), (0, 2)])
def test_transfer_inversion_roundtrip_random(dims):
    m = _model(*dims)
    rng = Random(20_000 + dims[0] * 10 + dims[1])
    for _ in range(50):
        f = catalog.random_test_vector(rng, [m])
        theta = {tau: theta_transfer(m, tau, f) for tau in m.taus()}
        for x in m.s_elements():
            assert invert_transfer(m, x, theta) == f.value(m.model_id, x)


@given(st.integers(-40, 40), st.integers(1, 12), st.integers(-40, 40), st.integers(1, 12))
@settings(max_examples=40, deadline=None)
def test_roundtrip_single_point_mass(p, q, r, s):
    m = _model(1, 1)
    value = GaussianRational(Fraction(p, q), Fraction(r, s))
    f = TestVector({(m.model_id, (1, 0)): value})
    theta = {tau: theta_transfer(m, tau, f) for tau in m.taus()}
    assert invert_transfer(m, (1, 0), theta) == value
    assert invert_transfer(m, (0, 1), theta) == GR_ZERO


def test_out_of_packet_vanishing():
    m = _model(1, 1)
    assert transfer_factor_tagged(m, ("another-model", (0, 0)), (0, 0)) == 0
    assert transfer_factor_tagged(m, (m.model_id, (0, 0)), (0, 0)) != 0


def test_mismatched_model_rejected():
    m = _model(1, 1)
    with pytest.raises(MismatchedModel):
        transfer_factor(m, (5, 0), (0, 0))
    with pytest.raises(MismatchedModel):
        adjoint_factor(m, (0, 4), (0, 0))


def test_iota_respects_projection():
    m = _model(2, 2)
    for tau in m.taus():
        assert m.iota(tau)[1] == tau[1]


def test_iota_is_bijective():
    m = _model(2, 1)
    images = {m.iota(tau) for tau in m.taus()}
    assert len(images) == len(m.taus()) == m.s_size


def test_dual_group_cocycle_enforced():
    from tracestab.errors import MismatchedModel as MM
    from tracestab.packets import DualGroupModel

    base = catalog.datum("gl1")
    # Nonidentity twist on the identity component is rejected.
    with pytest.raises(MM):
        ParameterModel("bad", TwoGroup(0), TwoGroup(1),
                       DualGroupModel(base, {(0, 0): ((-1,),), (0, 1): ((1,),)}))
