import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from helpers import SMINUS, SZ
from weakinv import model
from weakinv.errors import ConfigError, ModelValidationError, ScheduleDomainError


class TestSchedules:
    def test_constant_scalar(self):
        s = model.constant(0.5)
        assert s(0.0) == 0.5 and s(37.2) == 0.5
        assert s.is_constant and not s.is_operator_valued

    def test_constant_operator(self):
        s = model.constant(SZ)
        assert s.is_operator_valued
        assert_allclose(s(1.0), SZ)

    def test_sinusoidal(self):
        s = model.sinusoidal(0.1, 0.2, 1.0)
        assert s(4.8) == pytest.approx(0.1 + 0.2 * math.sin(4.8))
        assert not s.is_constant

    def test_sinusoidal_rejects_non_finite(self):
        with pytest.raises(ValueError, match="finite"):
            model.sinusoidal(float("inf"), 0.1, 1.0)

    def test_tabulated_interpolation(self):
        s = model.tabulated([0.0, 2.0], [0.0, 1.0])
        assert s(0.5) == pytest.approx(0.25)
        assert s(0.0) == 0.0 and s(2.0) == 1.0

    def test_tabulated_no_extrapolation(self):
        s = model.tabulated([0.0, 2.0], [0.0, 1.0], name="alpha-table")
        with pytest.raises(ScheduleDomainError, match="alpha-table"):
            s(2.5)
        # roundoff past the edge is not extrapolation
        assert s(2.0 + 1e-14) == pytest.approx(1.0)

    def test_tabulated_strictly_increasing(self):
        with pytest.raises(ValueError, match="increasing"):
            model.tabulated([0.0, 0.0, 1.0], [1.0, 2.0, 3.0])

    def test_tabulated_operator_values(self):
        s = model.tabulated([0.0, 1.0], [np.zeros((2, 2)), SZ])
        assert_allclose(s(0.5), 0.5 * SZ)

    def test_scaled_operator(self):
        omega = model.sinusoidal(1.0, 0.1, 1.0)
        s = model.scaled(omega, np.diag([0.0, 1.0]))
        assert_allclose(s(math.pi / 2), np.diag([0.0, 1.1]))

    def test_scaled_requires_scalar_factor(self):
        with pytest.raises(ValueError, match="scalar"):
            model.scaled(model.constant(SZ), SZ)


def _amp_damp_model(gamma=0.5):
    return model.LindbladModel(2, np.diag([0.0, 1.0]).astype(complex), [(SMINUS, gamma)])


class TestSnapshot:
    def test_constant_model_time_independent(self):
        m = _amp_damp_model()
        s0 = m.snapshot(0.0)
        s1 = m.snapshot(17.3)
        assert_allclose(s0.h, s1.h)
        assert_allclose(s0.channels[0].l_dag_l, s1.channels[0].l_dag_l)

    def test_pure_and_deterministic(self):
        m = model.LindbladModel(
            2,
            model.scaled(model.sinusoidal(1.0, 0.1, 1.0), np.diag([0.0, 1.0])),
            [(SMINUS, model.tabulated([0.0, 2.0], [0.0, 1.0]))],
        )
        a = m.snapshot(0.7)
        b = m.snapshot(0.7)
        assert np.array_equal(a.h, b.h)
        assert a.channels[0].alpha == b.channels[0].alpha

    def test_tabulated_alpha_interpolated(self):
        m = model.LindbladModel(2, SZ, [(SMINUS, model.tabulated([0.0, 2.0], [0.0, 1.0]))])
        assert m.snapshot(0.5).channels[0].alpha == pytest.approx(0.25)

    def test_scaled_hamiltonian_value(self):
        m = model.LindbladModel(
            2, model.scaled(model.sinusoidal(1.0, 0.1, 1.0), np.diag([0.0, 1.0]))
        )
        assert_allclose(m.snapshot(math.pi / 2).h, np.diag([0.0, 1.1]))

    def test_caches_products(self):
        s = _amp_damp_model().snapshot(0.0)
        assert_allclose(s.channels[0].l_dag, SMINUS.conj().T)
        assert_allclose(s.channels[0].l_dag_l, np.diag([0.0, 1.0]))

    def test_rejects_negative_alpha(self):
        m = model.LindbladModel(2, SZ, [(SMINUS, model.sinusoidal(0.1, 0.2, 1.0))])
        with pytest.raises(ModelValidationError, match="negative"):
            m.snapshot(4.8)

    def test_rejects_non_hermitian_hamiltonian(self):
        m = model.LindbladModel(2, SMINUS)
        with pytest.raises(ModelValidationError, match="Hermitian"):
            m.snapshot(0.0)

    def test_out_of_domain_names_schedule(self):
        m = model.LindbladModel(2, SZ, [(SMINUS, model.tabulated([0.0, 1.0], [0.1, 0.2]))])
        with pytest.raises(ScheduleDomainError, match=r"channels\[0\]\.alpha"):
            m.snapshot(3.0)


class TestValidate:
    def test_valid_model_empty_report(self):
        issues = _amp_damp_model().validate([0.0, 1.0, 2.0])
        assert issues == []

    def test_flags_negative_rate(self):
        m = model.LindbladModel(2, SZ, [(SMINUS, model.sinusoidal(0.1, 0.2, 1.0))])
        issues = m.validate([4.8])
        assert len(issues) == 1
        assert issues[0].kind == "negative-rate"
        assert issues[0].channel == 0
        assert issues[0].magnitude == pytest.approx(0.1 + 0.2 * math.sin(4.8))
        assert issues[0].magnitude < 0

    def test_flags_non_hermitian_hamiltonian(self):
        # sigma_+ as H: defect |H - H†| = 1
        issues = model.LindbladModel(2, SMINUS.conj().T).validate([0.0])
        assert len(issues) == 1
        assert issues[0].kind == "hamiltonian-not-hermitian"
        assert issues[0].magnitude == pytest.approx(1.0)


class TestModelConstruction:
    def test_dim_mismatch_in_constant_operator(self):
        with pytest.raises(ValueError, match="dimension"):
            model.LindbladModel(3, SZ)

    def test_alpha_must_be_scalar(self):
        with pytest.raises(ValueError, match="scalar"):
            model.Channel(SMINUS, model.constant(SZ))

    def test_op_must_be_operator(self):
        with pytest.raises(ValueError, match="operator-valued"):
            model.Channel(model.constant(0.5), 0.5)


class TestConfigParsing:
    def test_round_trip(self):
        cfg = {
            "dim": 2,
            "hamiltonian": {"kind": "constant", "value": [[0, 0], [0, 0], [0, 0], [1, 0]]},
            "channels": [
                {
                    "op": {"kind": "constant", "value": [[0, 0], [1, 0], [0, 0], [0, 0]]},
                    "alpha": {"kind": "constant", "value": 0.5},
                }
            ],
        }
        m = model.model_from_config(cfg)
        assert m.dim == 2
        s = m.snapshot(0.0)
        assert_allclose(s.h, np.diag([0.0, 1.0]))
        assert s.channels[0].alpha == 0.5

    def test_sinusoidal_and_tabulated(self):
        cfg = {
            "dim": 2,
            "hamiltonian": {
                "kind": "scaled",
                "scalar": {"kind": "sinusoidal", "offset": 1.0, "amplitude": 0.1, "omega": 1.0},
                "matrix": [[0, 0], [0, 0], [0, 0], [1, 0]],
            },
            "channels": [
                {
                    "op": {"kind": "constant", "value": [[0, 0], [1, 0], [0, 0], [0, 0]]},
                    "alpha": {"kind": "tabulated", "times": [0.0, 2.0], "values": [0.0, 1.0]},
                }
            ],
        }
        m = model.model_from_config(cfg)
        assert m.snapshot(0.5).channels[0].alpha == pytest.approx(0.25)

    @pytest.mark.parametrize(
        "mutate, field",
        [
            (lambda c: c.pop("dim"), "model.dim"),
            (lambda c: c.update(dim=0), "model.dim"),
            (lambda c: c["hamiltonian"].update(kind="spline"), "model.hamiltonian.kind"),
            (lambda c: c["hamiltonian"].pop("value"), "model.hamiltonian.value"),
            (
                lambda c: c["channels"][0]["op"].update(value=[[1, 0], [0, 0], [0, 0]]),
                "model.channels[0].op.value",
            ),
        ],
    )
    def test_errors_name_fields(self, mutate, field):
        cfg = {
            "dim": 2,
            "hamiltonian": {"kind": "constant", "value": [[0, 0], [0, 0], [0, 0], [1, 0]]},
            "channels": [
                {
                    "op": {"kind": "constant", "value": [[0, 0], [1, 0], [0, 0], [0, 0]]},
                    "alpha": {"kind": "constant", "value": 0.5},
                }
            ],
        }
        mutate(cfg)
        with pytest.raises(ConfigError) as err:
            model.model_from_config(cfg)
        assert err.value.field == field
