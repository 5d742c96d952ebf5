import cmath
import math
from fractions import Fraction

import numpy as np
import pytest

from asymconv.convolution_engine import CaseTag
from asymconv.fiber_demo import (
    MonomialGerm,
    bump_profile,
    measure_singular_exponent,
    monomial_fiber_integral,
    thom_sebastiani_demo,
)
from asymconv.quadrature_oracle import SampleGrid

F = Fraction


class TestMonomialGerm:
    def test_defaults(self):
        germ = MonomialGerm(2)
        assert germ.plateau == 0.9
        assert germ.support == 1.0

    def test_rejects_bad_exponent(self):
        with pytest.raises(ValueError):
            MonomialGerm(0)
        with pytest.raises(ValueError):
            MonomialGerm(True)
        with pytest.raises(ValueError):
            MonomialGerm(2.0)

    def test_rejects_bad_radii(self):
        with pytest.raises(ValueError):
            MonomialGerm(2, plateau=0.9, support=0.9)
        with pytest.raises(ValueError):
            MonomialGerm(2, plateau=0.0, support=0.5)
        with pytest.raises(ValueError):
            MonomialGerm(2, plateau=0.9, support=1.1)


class TestBumpProfile:
    def test_plateau_and_support(self):
        germ = MonomialGerm(1, plateau=0.6, support=0.9)
        assert bump_profile(germ, 0.0) == 1.0
        assert bump_profile(germ, 0.6) == 1.0
        assert bump_profile(germ, 0.9) == 0.0
        assert bump_profile(germ, 1.5) == 0.0

    def test_monotone_transition(self):
        germ = MonomialGerm(1, plateau=0.6, support=0.9)
        radii = np.linspace(0.6, 0.9, 40)
        vals = bump_profile(germ, radii)
        assert vals.shape == radii.shape
        assert all(v1 >= v2 for v1, v2 in zip(vals, vals[1:]))
        mid = bump_profile(germ, 0.75)
        assert mid == pytest.approx(0.5, abs=1e-12)


class TestMonomialFiberIntegral:
    def test_zero_is_domain_error(self):
        with pytest.raises(ValueError):
            monomial_fiber_integral(MonomialGerm(2), 0.0)

    def test_identity_germ(self):
        germ = MonomialGerm(1)
        assert monomial_fiber_integral(germ, 0.3) == 1.0
        assert monomial_fiber_integral(germ, 0.95) == pytest.approx(
            bump_profile(germ, 0.95)
        )
        assert monomial_fiber_integral(germ, 1.2) == 0.0

    def test_square_germ_on_plateau(self):
        germ = MonomialGerm(2)
        for s in (0.5, 0.1, 0.5j, -0.3 + 0.2j):
            assert monomial_fiber_integral(germ, s) == pytest.approx(
                1.0 / (2.0 * abs(s)), rel=1e-13
            )

    def test_root_set_symmetry(self):
        germ = MonomialGerm(3)
        omega = cmath.exp(2j * math.pi / 3)
        for s in (0.2, 0.05 + 0.1j, -0.3):
            a = monomial_fiber_integral(germ, s)
            b = monomial_fiber_integral(germ, s * omega)
            assert b == pytest.approx(a, rel=1e-12)

    def test_plateau_leading_constant(self):
        germ = MonomialGerm(3)
        plateau_cubed = 0.9 ** 3
        for sigma in (plateau_cubed * 0.99, 0.1, 1e-3, 1e-8):
            value = monomial_fiber_integral(germ, sigma) * sigma ** (2 * (1 - 1 / 3))
            assert value == pytest.approx(1.0 / 3.0, abs=1e-10)


class TestThomSebastianiDemo:
    def test_square_square_is_resonant_with_log(self):
        report = thom_sebastiani_demo(MonomialGerm(2), MonomialGerm(2))
        assert report.case is CaseTag.RESONANT
        assert report.fitted_coeffs.degree == 1
        coeff = report.fitted_coeffs.coefficient(1).real
        assert abs(coeff) > 0.1
        assert coeff == pytest.approx(-0.125, rel=1e-6)
        assert report.closed_form == pytest.approx(-0.125)
        assert report.relative_error < 1e-6

    def test_square_cube_matches_engine(self):
        report = thom_sebastiani_demo(MonomialGerm(2), MonomialGerm(3))
        assert report.case is CaseTag.GENERIC
        assert report.spec.a == F(-1, 2)
        assert report.spec.b == F(-2, 3)
        fitted = report.fitted_coeffs.coefficient(0).real
        assert fitted == pytest.approx(0.81298187, abs=1e-6)
        assert report.relative_error < 1e-8
        assert report.normalization_used == pytest.approx(0.5, abs=1e-6)

    def test_order_of_germs_does_not_change_the_value(self):
        one = thom_sebastiani_demo(MonomialGerm(2), MonomialGerm(3))
        two = thom_sebastiani_demo(MonomialGerm(3), MonomialGerm(2))
        a = one.fitted_coeffs.coefficient(0).real
        b = two.fitted_coeffs.coefficient(0).real
        assert a == pytest.approx(b, rel=1e-9)

    def test_identity_pair_is_smooth(self):
        report = thom_sebastiani_demo(MonomialGerm(1), MonomialGerm(1))
        assert report.case is CaseTag.SMOOTH
        assert report.closed_form == 0.0
        assert report.normalization_used is None
        # the cutoff is only C^2, so its Taylor tail leaks a little into
        # the probe column; the singular cases above sit at 0.125-0.81
        assert report.relative_error < 0.02

    def test_identity_square_is_smooth(self):
        report = thom_sebastiani_demo(MonomialGerm(1), MonomialGerm(2))
        assert report.case is CaseTag.SMOOTH
        assert report.relative_error < 1e-3

    def test_geometry_validation(self):
        with pytest.raises(ValueError):
            thom_sebastiani_demo(
                MonomialGerm(1, plateau=0.5, support=0.8), MonomialGerm(2)
            )
        with pytest.raises(ValueError):
            thom_sebastiani_demo(
                MonomialGerm(2), MonomialGerm(1, plateau=0.3, support=0.9)
            )
        wide = SampleGrid(radii=tuple(0.25 * 2.0 ** -i for i in range(10)))
        with pytest.raises(ValueError):
            thom_sebastiani_demo(MonomialGerm(2), MonomialGerm(2), wide)

    def test_reports_are_deterministic(self):
        first = thom_sebastiani_demo(MonomialGerm(2), MonomialGerm(3))
        second = thom_sebastiani_demo(MonomialGerm(2), MonomialGerm(3))
        assert first.to_csv_row() == second.to_csv_row()


class TestMeasureSingularExponent:
    def test_square_cube_exponent(self):
        x = measure_singular_exponent(MonomialGerm(2), MonomialGerm(3))
        assert x == pytest.approx(-1.0 / 6.0, abs=1e-3)

    def test_resonant_pair_rejected(self):
        with pytest.raises(ValueError):
            measure_singular_exponent(MonomialGerm(2), MonomialGerm(2))
