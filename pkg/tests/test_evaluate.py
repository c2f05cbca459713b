import math
import warnings
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import BENCH, mp_central_difference, mp_eval, random_params
from svmom import mdl_1fsv, mdl_1fsvj
from svmom.evaluate import (PARAM_NAMES, HestonParams, ParamFileError, SingularEvaluation, SlotRegistry,
                            SvjParams, UnknownParameter, UnsupportedSignature, diff_poly,
                            eval_poly, load_params, parse_params)
from svmom.ito_mom import cond_ieii_moment
from svmom.poly import GPoly, SlotSignature, UnknownSlot

SIG = mdl_1fsv.FINAL_SIG


def P(terms):
    return GPoly(SIG, terms)


def test_eval_examples():
    p = dict(mu=0.125, k=0.1, theta=0.25, sigma_v=0.1, rho=-0.7, h=1.0)
    assert eval_poly(mdl_1fsv.moment_y(1), p) == pytest.approx(0.0)
    assert eval_poly(P({(1, 0, 0, 0, 0, 0, 0, 0): 1}), p) == pytest.approx(math.exp(-0.1))
    assert eval_poly(P({(0, 0, 2, 0, 0, 0, 0, 2): Fraction(1, 2)}), p) == pytest.approx(0.5 * 0.51 / 0.01)
    assert eval_poly(GPoly.zero(SIG), p) == 0.0


def test_eval_accepts_dataclasses():
    assert eval_poly(mdl_1fsvj.moment_y(2), BENCH) == eval_poly(mdl_1fsvj.moment_y(2), BENCH.as_dict())


def test_eval_singularities():
    p = dict(mu=0.1, k=0.0, theta=0.2, sigma_v=0.1, rho=0.0, h=1.0)
    with pytest.raises(SingularEvaluation):
        eval_poly(P({(0, 0, 1, 0, 0, 0, 0, 0): 1}), p)
    with pytest.raises(SingularEvaluation):
        eval_poly(P({(0, 0, 0, 0, 0, 0, 0, 1): 1}), dict(p, k=1.0, rho=1.5))
    signed = GPoly(SlotSignature(["rho", "sqrt(1-rho^2)"]), {(0, -2): 1})
    with pytest.raises(SingularEvaluation):
        eval_poly(signed, {"rho": 1.0})


def test_eval_missing_and_unknown():
    with pytest.raises(UnknownParameter):
        eval_poly(mdl_1fsv.moment_y(1), {"mu": 0.1})
    with pytest.raises(UnknownSlot):
        eval_poly(GPoly(SlotSignature(["zeta"]), {(1,): 1}), {})


def test_feller_warning():
    with pytest.warns(RuntimeWarning, match="Feller"):
        eval_poly(mdl_1fsv.moment_y(2), HestonParams(mu=0, k=0.1, theta=0.1, sigma_v=0.5, rho=0))
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        eval_poly(mdl_1fsv.moment_y(2), BENCH)


def test_local_slots_and_custom_registry():
    p = cond_ieii_moment(0, 0, 2)
    v = {"k": 0.5, "theta": 0.2, "sigma_v": 0.1}
    expected = 0.2 * 2 + (0.3 - 0.2) * (1 - math.exp(-1)) / 0.5
    assert eval_poly(p, v, tau=2.0, v0=0.3) == pytest.approx(expected, rel=1e-13)
    reg = SlotRegistry(x=lambda v: 2.0 * v["a"])
    assert eval_poly(GPoly(SlotSignature(["x"]), {(3,): 1}), {"a": 1.5}, registry=reg) == 27.0


def test_diff_examples():
    mu_h = P({(0, 1, 0, 1, 0, 0, 0, 0): 1})
    assert diff_poly(mu_h, "mu") == P({(0, 1, 0, 0, 0, 0, 0, 0): 1})
    assert diff_poly(mu_h, "k").is_zero()
    # d/dk e^{-kh}/k = -h e^{-kh}/k - e^{-kh}/k^2
    q = P({(1, 0, 1, 0, 0, 0, 0, 0): 1})
    assert diff_poly(q, "k") == P({(1, 1, 1, 0, 0, 0, 0, 0): -1, (1, 0, 2, 0, 0, 0, 0, 0): -1})
    # d/dh e^{-kh} = -k e^{-kh} needs a positive power of k
    d = diff_poly(P({(1, 0, 0, 0, 0, 0, 0, 0): 1}), "h")
    assert d.keyfor[-1] == "k^{+}" and d.terms == {(1, 0, 0, 0, 0, 0, 0, 0, 1): -1}
    # d/drho sqrt(1-rho^2)^2 = -2 rho
    assert diff_poly(P({(0, 0, 0, 0, 0, 0, 0, 2): 1}), "rho") == P({(0, 0, 0, 0, 0, 0, 1, 0): -2})


def test_diff_errors():
    with pytest.raises(UnknownParameter):
        diff_poly(mdl_1fsv.moment_y(1), "nu")
    with pytest.raises(UnsupportedSignature):
        diff_poly(cond_ieii_moment(0, 0, 2), "k")


@pytest.mark.parametrize("name", PARAM_NAMES)
def test_diff_finite_differences(name):
    rng = np.random.default_rng(PARAM_NAMES.index(name))
    p = random_params(rng)
    for poly in (mdl_1fsvj.cmom_y(3), mdl_1fsvj.cov_yy(1, 2), mdl_1fsv.moment_y(4)):
        exact = mp_eval(diff_poly(poly, name), p)
        fd = mp_central_difference(poly, p, name)
        assert abs(exact - fd) <= 1e-6 * abs(fd) + mpmath.mpf(10) ** -30
        assert eval_poly(diff_poly(poly, name), p) == pytest.approx(float(fd), rel=1e-6, abs=1e-12)


def test_diff_drops_unused_kplus():
    d = diff_poly(mdl_1fsv.cov_yy(1, 1), "theta")
    assert "k^{+}" not in d.keyfor


terms8 = st.dictionaries(st.tuples(*[st.integers(0, 2)] * 8),
                         st.fractions(min_value=-50, max_value=50, max_denominator=20), max_size=4)
VALUES = dict(mu=0.07, k=0.9, theta=0.3, sigma_v=0.35, rho=-0.4, h=1.3)


@settings(max_examples=100, deadline=None)
@given(terms8, terms8, st.fractions(min_value=-10, max_value=10, max_denominator=10))
def test_eval_is_linear_and_multiplicative(a, b, c):
    p, q = P(a), P(b)
    ep, eq = eval_poly(p, VALUES), eval_poly(q, VALUES)
    assert eval_poly(p + q.scale(c), VALUES) == pytest.approx(ep + float(c) * eq, rel=1e-9, abs=1e-9)
    assert eval_poly(p * q, VALUES) == pytest.approx(ep * eq, rel=1e-9, abs=1e-9)


@settings(max_examples=50, deadline=None)
@given(terms8, terms8, st.sampled_from(["mu", "k", "theta", "sigma_v", "rho", "h"]))
def test_diff_is_linear_and_leibniz(a, b, name):
    p, q = P(a), P(b)
    dp, dq = diff_poly(p, name), diff_poly(q, name)
    if dp.signature == dq.signature:
        assert diff_poly(p + q, name) == dp + dq
    else:
        assert eval_poly(diff_poly(p + q, name), VALUES) == pytest.approx(
            eval_poly(dp, VALUES) + eval_poly(dq, VALUES), rel=1e-9, abs=1e-9)
    lhs = eval_poly(diff_poly(p * q, name), VALUES)
    rhs = (eval_poly(diff_poly(p, name), VALUES) * eval_poly(q, VALUES)
           + eval_poly(p, VALUES) * eval_poly(diff_poly(q, name), VALUES))
    assert lhs == pytest.approx(rhs, rel=1e-9, abs=1e-9)


# -- parameter files ---------------------------------------------------------------

def test_parse_key_value_and_json():
    text = "# benchmark setting\nmu = 0.125\nk=0.1\ntheta=0.25\nsigma_v=0.1\nrho=-0.7\nh=1\nlambda=0.01\n"
    d = parse_params(text)
    assert d["lambda"] == 0.01 and d["rho"] == -0.7
    assert parse_params('{"mu": 0.1, "k": 1, "theta": 0.2, "sigma_v": 0.1, "rho": 0, "h": 1}')["k"] == 1.0


@pytest.mark.parametrize("text", [
    "", "mu=1\n", "{bad", "[1, 2]", "mu=1\nk=1\ntheta=1\nsigma_v=1\nrho=0\nh=1\nnu=3\n",
    "mu=x\nk=1\ntheta=1\nsigma_v=1\nrho=0\nh=1\n", "mu=1\nmu=2\n", "just words\n",
])
def test_parse_errors(text):
    with pytest.raises(ParamFileError):
        parse_params(text)


def test_load_params_defaults(tmp_path):
    f = tmp_path / "p.txt"
    f.write_text("mu=0.1\nk=1\ntheta=0.2\nsigma_v=0.1\nrho=0\nh=1\n")
    p = load_params(f)
    assert isinstance(p, SvjParams) and p.lam == 0.0 and p.sigma_j == 0.0
    assert p.as_dict()["lambda"] == 0.0
