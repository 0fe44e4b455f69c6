"""Kernel values, metadata and the compact text descriptions."""

import math

import numpy as np
import pytest

from oracles import rp_scalar, tps_scalar
from polyharm import KernelInfo, RadialPower, ThinPlateSpline, kernel_spec, parse_kernel


def test_tps_matches_scalar_oracle():
    rng = np.random.default_rng(101)
    for k in (1, 2, 3):
        kernel = ThinPlateSpline(k)
        for r in rng.uniform(1e-6, 5.0, size=50):
            expected = tps_scalar(k, float(r))
            got = kernel.value(float(r))
            assert got == pytest.approx(expected, rel=1e-14)


def test_tps_exact_zeros():
    kernel = ThinPlateSpline(2)
    # r = 0 is the analytic limit, r = 1 follows from log(1.0) == 0.0
    assert kernel.value(0.0) == 0.0
    assert kernel.value(1.0) == 0.0
    arr = kernel.value(np.array([0.0, 1.0, 0.5]))
    assert arr[0] == 0.0 and arr[1] == 0.0 and arr[2] < 0.0


def test_tps_sign_pattern():
    kernel = ThinPlateSpline(1)
    r = np.array([0.25, 0.999, 1.001, 3.0])
    v = kernel.value(r)
    assert (v[:2] < 0.0).all() and (v[2:] > 0.0).all()


def test_tps_order_validation():
    for bad in (0, -1, 1.5, "2", True):
        with pytest.raises(ValueError):
            ThinPlateSpline(bad)
    assert ThinPlateSpline(np.int64(2)).k == 2


def test_rp_matches_scalar_oracle():
    rng = np.random.default_rng(202)
    for nu in (0.5, 1.0, 1.5, 3.0, 4.5):
        kernel = RadialPower(nu)
        for r in rng.uniform(0.0, 5.0, size=50):
            assert kernel.value(float(r)) == pytest.approx(rp_scalar(nu, float(r)), rel=1e-14)
    assert RadialPower(0.5).value(0.0) == 0.0


def test_rp_exponent_validation():
    for bad in (0.0, -1.0, 2, 2.0, 4, 6.0, math.inf, math.nan):
        with pytest.raises(ValueError):
            RadialPower(bad)
    # odd integers and non-integers are fine
    RadialPower(1)
    RadialPower(3.0)
    RadialPower(2.5)


def test_negative_radius_rejected():
    with pytest.raises(ValueError):
        ThinPlateSpline(1).value(-0.1)
    with pytest.raises(ValueError):
        RadialPower(1.5).value(np.array([0.5, -0.5]))


def test_value_scaled_is_value_of_scaled_radius():
    r = np.linspace(0.0, 3.0, 17)
    for kernel in (ThinPlateSpline(1), ThinPlateSpline(2), RadialPower(1.5)):
        assert np.array_equal(kernel.value_scaled(0.7, r), kernel.value(r * 0.7))
    for bad in (0.0, -1.0, math.inf, math.nan):
        with pytest.raises(ValueError):
            ThinPlateSpline(1).value_scaled(bad, r)


def test_rp_homogeneity():
    # value(eps * r) == eps**nu * value(r) up to rounding
    kernel = RadialPower(1.5)
    r = np.linspace(0.1, 4.0, 23)
    np.testing.assert_allclose(
        kernel.value_scaled(2.0, r), 2.0**1.5 * kernel.value(r), rtol=1e-14
    )


def test_kernel_info():
    assert ThinPlateSpline(1).info() == KernelInfo(2, 2, False)
    assert ThinPlateSpline(3).info() == KernelInfo(4, 6, False)
    assert RadialPower(0.5).info() == KernelInfo(1, 1, False)
    assert RadialPower(1.0).info() == KernelInfo(1, 1, True)
    assert RadialPower(1.5).info() == KernelInfo(1, 2, False)
    assert RadialPower(2.5).info() == KernelInfo(2, 3, False)
    assert RadialPower(3.0).info() == KernelInfo(2, 3, True)
    assert RadialPower(5.0).info() == KernelInfo(3, 5, True)


def test_parse_kernel_round_trip():
    for text, expected in (
        ("tps:k=1", ThinPlateSpline(1)),
        ("TPS:K=2", ThinPlateSpline(2)),
        (" rp:nu=1.5 ", RadialPower(1.5)),
        ("rp:nu=3", RadialPower(3.0)),
        ("RP:NU=0.5", RadialPower(0.5)),
    ):
        assert parse_kernel(text) == expected
    for kernel in (ThinPlateSpline(1), ThinPlateSpline(2), RadialPower(0.5), RadialPower(3.0)):
        assert parse_kernel(kernel_spec(kernel)) == kernel


def test_kernel_spec_text():
    assert kernel_spec(ThinPlateSpline(2)) == "tps:k=2"
    assert kernel_spec(RadialPower(3.0)) == "rp:nu=3"
    assert kernel_spec(RadialPower(1.5)) == "rp:nu=1.5"
    with pytest.raises(TypeError):
        kernel_spec("tps:k=1")


def test_parse_kernel_rejects_malformed():
    for bad in (
        "tps", "tps:", "tps:k=", "tps:j=2", "tps:k=half", "tps:k=1.5",
        "rp", "rp:nu=", "rp:mu=1", "rp:nu=abc", "rp:nu=2", "rp:nu=-1",
        "gauss:k=1", "", 7,
    ):
        with pytest.raises(ValueError):
            parse_kernel(bad)
