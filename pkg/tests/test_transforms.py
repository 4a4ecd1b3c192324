import numpy as np
import pytest

from newton_transforms.checks import check_loss, check_transform
from newton_transforms.errors import DomainError, InputError, SingularScalingError
from newton_transforms.losses import as_1d_loss, make_benchmark, make_radial
from newton_transforms.transforms import (
    compose,
    exponential,
    forward_stepsize,
    induced_stepsize,
    linear,
    logarithmic,
    make_table1,
    polynomial,
    scaling_factor,
    sigmoid,
    transform_from_spec,
)


def _sigma(y):
    return 1.0 / (1.0 + np.exp(-y))


class TestTable1Zoo:
    def test_linear_values(self):
        t = linear(2.0, 5.0)
        assert t.phi(3.0) == pytest.approx(11.0)
        assert t.phi_prime(3.0) == pytest.approx(2.0)
        assert t.phi_double_prime(3.0) == 0.0

    def test_exponential_ratio_constant(self):
        t = exponential(1.7)
        for y in [-2.0, 0.0, 3.5]:
            assert t.ratio(y) == pytest.approx(1.7)

    def test_polynomial_ratio(self):
        t = polynomial(0.5)
        for y in [0.1, 1.0, 7.0]:
            assert t.ratio(y) == pytest.approx((0.5 - 1.0) / y)

    def test_polynomial_rejects_zero_exponent(self):
        with pytest.raises(InputError):
            polynomial(0.0)

    def test_logarithmic_domain(self):
        t = logarithmic(1.0)
        with pytest.raises(DomainError):
            t.ratio(-1.0)
        assert t.ratio(0.0) == pytest.approx(-1.0)

    def test_linear_requires_positive_slope(self):
        with pytest.raises(InputError):
            linear(0.0)

    def test_make_table1_dispatch(self):
        assert make_table1("polynomial", r=2.0).name == "poly(r=2.0)"
        with pytest.raises(InputError):
            make_table1("cubic")

    @pytest.mark.parametrize("t,ys", [
        (linear(2.0, 1.0), np.linspace(-3, 3, 15)),
        (polynomial(0.5), np.linspace(0.05, 4, 15)),
        (polynomial(3.0), np.linspace(0.05, 4, 15)),
        (exponential(0.7), np.linspace(-2, 2, 15)),
        (logarithmic(1.0), np.linspace(-0.5, 4, 15)),
        (sigmoid(), np.linspace(-4, 4, 15)),
    ])
    def test_derivative_consistency(self, t, ys):
        assert check_transform(t, ys) == []

    @pytest.mark.parametrize("t,ys", [
        (polynomial(0.5), np.linspace(0.05, 4, 10)),
        (exponential(0.7), np.linspace(-2, 2, 10)),
        (logarithmic(1.0), np.linspace(-0.5, 4, 10)),
        (sigmoid(), np.linspace(-4, 4, 10)),
    ])
    def test_monotone_increasing(self, t, ys):
        assert all(t.phi_prime(y) > 0 for y in ys)


class TestScalingFactor:
    def test_linear_always_one(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            a, b = rng.uniform(0.1, 5.0), rng.uniform(-5, 5)
            q = rng.uniform(0, 10)
            assert scaling_factor(linear(a, b), rng.uniform(-3, 3), q) == 1.0

    def test_exponential(self):
        assert scaling_factor(exponential(2.0), 0.3, 1.5) == pytest.approx(1.0 + 2.0 * 1.5)

    def test_logarithmic(self):
        a, f, q = 1.0, 2.0, 4.5
        assert scaling_factor(logarithmic(a), f, q) == pytest.approx(1.0 - q / (a + f))

    def test_sigmoid_identity(self):
        rng = np.random.default_rng(4)
        t = sigmoid()
        for _ in range(25):
            f, q = rng.uniform(-5, 5), rng.uniform(0, 8)
            expected = 1.0 + (1.0 - 2.0 * _sigma(f)) * q
            assert scaling_factor(t, f, q) == pytest.approx(expected, abs=1e-12)

    def test_polynomial_row(self):
        r, f, q = 0.25, 2.0, 3.0
        assert scaling_factor(polynomial(r), f, q) == pytest.approx(1.0 + (r - 1.0) / f * q)


class TestStepsizeConversion:
    def test_induced_examples(self):
        assert induced_stepsize(1.0, 2.0) == pytest.approx(0.5)
        assert induced_stepsize(1.0, 1.0) == pytest.approx(1.0)
        assert induced_stepsize(1.0, -0.5) == pytest.approx(-2.0)

    def test_forward_examples(self):
        assert forward_stepsize(1.0, 3.0) == pytest.approx(3.0)
        assert forward_stepsize(0.5, 1.0) == pytest.approx(0.5)

    def test_round_trip_identity(self):
        rng = np.random.default_rng(8)
        for _ in range(100):
            alpha = rng.uniform(-3, 3)
            scaling = rng.uniform(-5, 5)
            if abs(scaling) <= 1e-6:
                continue
            back = forward_stepsize(induced_stepsize(alpha, scaling), scaling)
            assert back == pytest.approx(alpha, rel=1e-14)

    def test_singular_scaling_raises(self):
        with pytest.raises(SingularScalingError):
            induced_stepsize(1.0, 1e-13)


class TestCompose:
    def test_identity_transform_matches_base(self):
        base = make_benchmark("rosenbrock")
        L = compose(base, linear(1.0, 0.0))
        x = np.array([-0.4, 0.7])
        f0, g0, H0 = base.evaluate(x)
        f1, g1, H1 = L.evaluate(x)
        assert f1 == pytest.approx(f0)
        np.testing.assert_allclose(g1, g0)
        np.testing.assert_allclose(H1, H0)

    def test_exponential_of_quadratic_hand_chain_rule(self):
        # f = x^2/2, L = e^f: L'' = e^f (1 + x^2) in one dimension
        from newton_transforms.losses import make_polynorm

        base = make_polynorm(np.eye(1), 2)
        L = compose(base, exponential(1.0))
        for x in [0.3, -1.2, 2.0]:
            f, g, H = L.evaluate([x])
            e = np.exp(x * x / 2)
            assert f == pytest.approx(e)
            assert g[0] == pytest.approx(e * x)
            assert H[0, 0] == pytest.approx(e * (1 + x * x))

    def test_star_cauchy_closed_form(self):
        # phi_cauchy(ln(1+x^2)) = 2 x arctan x
        base = as_1d_loss(make_radial("cauchy"))
        L = compose(base, transform_from_spec("star:cauchy"))
        for x in np.linspace(0.1, 3.0, 12):
            assert L.value([x]) == pytest.approx(2 * x * np.arctan(x), abs=1e-8)

    def test_domain_error_propagates(self):
        base = make_benchmark("rosenbrock")
        L = compose(base, polynomial(0.5))
        with pytest.raises(DomainError):
            L.evaluate([1.0, 1.0])  # f = 0 not inside (0, inf)

    def test_minimizer_carried_over(self):
        base = make_benchmark("beale")
        L = compose(base, exponential(0.5))
        np.testing.assert_allclose(L.minimizer, base.minimizer)
        assert L.min_value == pytest.approx(1.0)

    @pytest.mark.parametrize("tname", ["linear", "polynomial", "exponential", "logarithmic", "sigmoid"])
    @pytest.mark.parametrize("lname", ["rosenbrock", "beale", "goldstein_price"])
    def test_chain_rule_consistency_against_finite_differences(self, tname, lname):
        params = {"linear": dict(a=2.0, b=1.0), "polynomial": dict(r=2.0),
                  "exponential": dict(a=0.05), "logarithmic": dict(a=1.0), "sigmoid": {}}[tname]
        base = make_benchmark(lname)
        L = compose(base, make_table1(tname, **params))
        rng = np.random.default_rng(17)
        if tname in ("sigmoid", "exponential"):
            # saturating transforms: stay where phi has representable slope
            spread = 0.12 if lname == "goldstein_price" else 0.35
            box = rng.uniform(-spread, spread, size=(80, 2)) + base.minimizer
            pts = [x for x in box if base.value(x) <= 15.0]
        else:
            pts = [x for x in rng.uniform(-1.2, 1.2, size=(50, 2)) if L.transform.contains(base.value(x))]
        assert len(pts) >= 15
        assert check_loss(L, pts, rtol_grad=1e-4, rtol_hess=1e-4) == []


class TestSpecStrings:
    @pytest.mark.parametrize("spec", ["none", ""])
    def test_none(self, spec):
        assert transform_from_spec(spec) is None

    def test_examples(self):
        assert transform_from_spec("poly:r=0.25").ratio(1.0) == pytest.approx(-0.75)
        assert transform_from_spec("exp:a=2").ratio(0.0) == pytest.approx(2.0)
        assert transform_from_spec("log:a=1").ratio(0.0) == pytest.approx(-1.0)
        assert transform_from_spec("linear:a=2:b=1").phi(1.0) == pytest.approx(3.0)
        assert transform_from_spec("sigmoid").phi(0.0) == pytest.approx(0.5)

    def test_unknown(self):
        with pytest.raises(InputError):
            transform_from_spec("fourier:n=3")
