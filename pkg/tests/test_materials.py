import math

import numpy as np
import pytest

from portbalance import (
    DEFAULT_TABLES,
    EN_AW_6063_O,
    HanselSpittelCoefficients,
    PropertyTable,
    hansel_spittel_stress,
    interpolate_property,
    levanov_friction,
)
from portbalance.materials import (
    CONTACT_HEAT_TRANSFER_W_PER_M2K,
    STEEL_POISSON_RATIO,
)

# frozen from an independent hand evaluation of the flow stress formula
HS_450_05_1 = 37.41538985493207


class TestHanselSpittel:
    def test_default_set_is_6063(self):
        c = EN_AW_6063_O
        assert (c.A, c.m1, c.m2, c.m3, c.m4, c.m5) == \
            (265.0, -0.00458, -0.12712, 0.12, -0.0161, 0.00026)
        assert (c.m7, c.m8, c.m9) == (0.0, 0.0, 0.0)

    def test_all_zero_exponents_collapse_to_A(self):
        c = HanselSpittelCoefficients(A=265.0, m1=0, m2=0, m3=0, m4=0, m5=0,
                                      m7=0, m8=0, m9=0)
        for t, e, r in ((450, 0.5, 1.0), (20, 0.01, 100.0), (555, 1.2, 0.3)):
            assert hansel_spittel_stress(t, e, r, c) == 265.0

    def test_reference_point(self):
        sigma = hansel_spittel_stress(450.0, 0.5, 1.0)
        assert sigma == pytest.approx(HS_450_05_1, rel=1e-6)
        # second route through log space
        log_sigma = (
            math.log(265.0) + (-0.00458) * 450.0 + (-0.12712) * math.log(0.5)
            + (-0.0161) / 0.5 + 0.00026 * 450.0 * math.log(1.5)
            + 0.12 * math.log(1.0)
        )
        assert sigma == pytest.approx(math.exp(log_sigma), rel=1e-9)

    def test_decreasing_over_hot_working_range(self):
        # net temperature exponent m1 + m5*ln(1.5) is negative
        temps = np.linspace(350.0, 550.0, 21)
        stresses = [hansel_spittel_stress(t, 0.5, 1.0) for t in temps]
        assert all(a > b for a, b in zip(stresses, stresses[1:]))

    def test_log_stress_affine_in_log_rate(self):
        c = HanselSpittelCoefficients(A=200.0, m1=-0.004, m2=-0.1, m3=0.1,
                                      m4=-0.01, m5=0.0002, m7=0.01, m8=0.0003,
                                      m9=0.05)
        t, e = 420.0, 0.4
        slope = c.m3 + c.m8 * t
        for r1, r2 in ((0.01, 0.1), (0.5, 5.0), (10.0, 400.0)):
            s1 = hansel_spittel_stress(t, e, r1, c)
            s2 = hansel_spittel_stress(t, e, r2, c)
            assert math.log(s2 / s1) == pytest.approx(
                slope * math.log(r2 / r1), rel=1e-9
            )

    def test_always_positive(self):
        rng = np.random.default_rng(81)
        for _ in range(200):
            t = float(rng.uniform(20, 600))
            e = float(rng.uniform(0.01, 2.0))
            r = float(rng.uniform(0.01, 500.0))
            assert hansel_spittel_stress(t, e, r) > 0.0

    def test_domain_errors(self):
        with pytest.raises(ValueError, match="strain must"):
            hansel_spittel_stress(450, 0.0, 1.0)
        with pytest.raises(ValueError, match="strain rate"):
            hansel_spittel_stress(450, 0.5, -1.0)
        c = HanselSpittelCoefficients(m9=0.1)
        with pytest.raises(ValueError, match="temperature"):
            hansel_spittel_stress(-10.0, 0.5, 1.0, c)

    def test_nonpositive_A_rejected(self):
        with pytest.raises(ValueError, match="A must"):
            HanselSpittelCoefficients(A=0.0)


class TestLevanov:
    def test_zero_pressure_zero_traction(self):
        assert levanov_friction(1.0, 100.0, 0.0) == 0.0

    def test_reference_point(self):
        assert levanov_friction(1.0, 100.0, 100.0) == pytest.approx(
            41.1936647598276, rel=1e-9
        )

    def test_high_pressure_saturates_to_constant_friction(self):
        m, sbar = 1.0, 120.0
        limit = m * sbar / math.sqrt(3.0)
        assert levanov_friction(m, sbar, 100.0 * sbar) == pytest.approx(
            limit, rel=1e-3
        )

    def test_low_pressure_nearly_linear(self):
        m, sbar = 0.7, 150.0
        sn = 0.05 * sbar
        linear = 1.25 * m * sn / math.sqrt(3.0)
        actual = levanov_friction(m, sbar, sn)
        assert abs(linear - actual) / actual < 0.05

    def test_monotone_and_bounded(self):
        m, sbar = 0.8, 90.0
        bound = m * sbar / math.sqrt(3.0)
        last = -1.0
        for sn in np.linspace(0.0, 20.0 * sbar, 60):
            f = levanov_friction(m, sbar, float(sn))
            assert f >= last
            assert f <= bound
            last = f

    def test_linear_in_friction_factor(self):
        f1 = levanov_friction(0.25, 100.0, 50.0)
        f2 = levanov_friction(0.5, 100.0, 50.0)
        assert f2 == pytest.approx(2.0 * f1, rel=1e-12)

    def test_domain_errors(self):
        with pytest.raises(ValueError, match="friction factor"):
            levanov_friction(1.5, 100.0, 10.0)
        with pytest.raises(ValueError, match="flow stress"):
            levanov_friction(0.5, 0.0, 10.0)
        with pytest.raises(ValueError, match="pressure"):
            levanov_friction(0.5, 100.0, -1.0)


class TestPropertyTables:
    def test_h13_young_modulus_at_knot(self):
        table = DEFAULT_TABLES["h13-young-modulus"]
        assert interpolate_property(table, 20.0) == 210000.0

    def test_h13_young_modulus_interpolated(self):
        table = DEFAULT_TABLES["h13-young-modulus"]
        assert interpolate_property(table, 160.0) == pytest.approx(198500.0, abs=1e-9)

    def test_every_knot_exact(self):
        for table in DEFAULT_TABLES.values():
            for t, v in table.breakpoints:
                assert interpolate_property(table, t) == v

    def test_clamping(self):
        table = DEFAULT_TABLES["h13-yield-stress"]
        assert interpolate_property(table, -40.0) == 1500.0
        assert interpolate_property(table, 1000.0) == 1020.0

    def test_monotone_table_monotone_interpolant(self):
        table = DEFAULT_TABLES["aw6063-young-modulus"]
        temps = np.linspace(-10, 600, 80)
        values = [interpolate_property(table, float(t)) for t in temps]
        assert all(a >= b for a, b in zip(values, values[1:]))

    def test_continuity_at_knots(self):
        table = DEFAULT_TABLES["h13-specific-heat"]
        for t, _ in table.breakpoints:
            below = interpolate_property(table, t - 1e-9)
            above = interpolate_property(table, t + 1e-9)
            assert below == pytest.approx(above, abs=1e-5)

    def test_shipped_tables_complete(self):
        assert set(DEFAULT_TABLES) == {
            "h13-young-modulus", "h13-yield-stress", "h13-density",
            "h13-thermal-conductivity", "h13-specific-heat",
            "aw6063-density", "aw6063-young-modulus",
            "aw6063-thermal-conductivity", "aw6063-specific-heat",
            "aw6063-thermal-expansion", "aw6063-poisson-ratio",
        }

    def test_named_constants(self):
        assert STEEL_POISSON_RATIO == 0.3
        assert CONTACT_HEAT_TRANSFER_W_PER_M2K == 30000.0

    def test_validation(self):
        with pytest.raises(ValueError, match="at least 2"):
            PropertyTable("tiny", [(20, 1.0)])
        with pytest.raises(ValueError, match="increase"):
            PropertyTable("bad", [(20, 1.0), (20, 2.0)])
