import numpy as np
import pytest

from spherebot import control

CFG = control.ControllerConfig()  # kp=1, kd=0.05, pi gains 1 and 2


class TestModes:
    def test_normalization(self):
        assert control.normalize_mode("PD") == "pd"
        assert control.normalize_mode(" Pid+FNN ") == "pid+fnn"

    def test_unknown_mode_rejected(self):
        with pytest.raises(ValueError):
            control.normalize_mode("lqr")

    def test_family_helpers(self):
        assert control.uses_fnn("pd+fnn") and not control.uses_fnn("pid")
        assert control.base_law("pid+fnn") == "pid"
        assert control.base_law("pd") == "pd"


class TestPdLaw:
    def test_zero_error_zero_torque(self):
        assert control.pd_law(CFG, 0.0, 0.0) == 0.0

    def test_benchmark_gain_value(self):
        assert control.pd_law(CFG, 1.0, 0.0) == 1.0
        assert control.pd_law(CFG, 0.0, 1.0) == pytest.approx(0.05)

    def test_linearity(self):
        rng = np.random.default_rng(30)
        for _ in range(50):
            e, ed, a = rng.normal(size=3)
            assert control.pd_law(CFG, a * e, a * ed) == pytest.approx(
                a * control.pd_law(CFG, e, ed), rel=1e-12, abs=1e-12)


class TestPidLaw:
    def test_degenerates_to_pd_with_zero_integral_gain(self):
        import dataclasses
        cfg = dataclasses.replace(CFG, pi_alpha=1.0, pi_beta=0.0)
        state = control.ControlState()
        for e, ed in [(1.0, 0.0), (0.3, -2.0), (-0.7, 1.1)]:
            assert control.pid_law(cfg, state, e, ed, 0.001) == control.pd_law(cfg, e, ed)

    def test_ramp_under_constant_drive(self):
        # u_pd = 1 held for 1 s with direct gain 1 and integral gain 2
        # ramps the output from 1 to 3
        state = control.ControlState()
        out = 0.0
        for _ in range(1000):
            out = control.pid_law(CFG, state, 1.0, 0.0, 0.001)
        assert out == pytest.approx(3.0, rel=1e-12)

    def test_zero_history_zero_output(self):
        state = control.ControlState()
        assert control.pid_law(CFG, state, 0.0, 0.0, 0.001) == 0.0

    def test_anti_windup_clamp_counts(self):
        import dataclasses
        cfg = dataclasses.replace(CFG, integrator_limit=0.01)
        state = control.ControlState()
        for _ in range(100):
            control.pid_law(cfg, state, 1.0, 0.0, 0.001)
        assert state.integrator_clamps > 0
        assert abs(state.integral) <= 0.01

    def test_rejects_nonpositive_dt(self):
        with pytest.raises(ValueError):
            control.pid_law(CFG, control.ControlState(), 1.0, 0.0, 0.0)


class TestCombine:
    def test_network_inactive_passthrough(self):
        assert control.combine(0.7, 0.0) == 0.7

    def test_exact_handover(self):
        assert control.combine(1.3, 1.3) == 0.0

    def test_subtraction(self):
        assert control.combine(1.2, 0.9) == pytest.approx(0.3)


class TestSlidingSurfaces:
    def test_origin(self):
        assert control.sliding_surfaces(CFG, 0.0, 0.0, 0.0) == (0.0, 0.0)

    def test_benchmark_values(self):
        # slope kp/kd = 20
        tau_c = control.pd_law(CFG, 0.1, 0.0)
        s_p, s_c = control.sliding_surfaces(CFG, 0.1, 0.0, tau_c)
        assert s_p == pytest.approx(2.0, rel=1e-12)
        assert s_c == pytest.approx(0.1, rel=1e-12)

    def test_pd_mode_surface_identity(self):
        # S_c = kd * S_p whenever tau_c comes from the PD law
        rng = np.random.default_rng(31)
        for _ in range(200):
            e, ed = rng.normal(size=2) * [1.0, 10.0]
            tau_c = control.pd_law(CFG, e, ed)
            s_p, s_c = control.sliding_surfaces(CFG, e, ed, tau_c)
            assert abs(s_c - CFG.kd * s_p) < 1e-12


class TestValidation:
    @pytest.mark.parametrize("field,value", [
        ("kp", 0.0), ("kd", 0.0), ("kp", -1.0), ("integrator_limit", 0.0), ("mode", "nope"),
    ])
    def test_invalid_config_rejected(self, field, value):
        import dataclasses
        with pytest.raises(ValueError):
            dataclasses.replace(CFG, **{field: value}).validate()

    def test_surface_slope(self):
        assert CFG.surface_slope == pytest.approx(20.0)
