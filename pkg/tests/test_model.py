import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ptqsim import SystemParams, build_hamiltonian, pt_residual_of_matrix, pt_symmetry_residual
from ptqsim.model import EXCHANGE, exchange_residual

params_st = st.builds(
    SystemParams,
    omega=st.floats(0.0, 3.0),
    j=st.floats(0.0, 1.2),
    gamma=st.floats(0.0, 2.0),
)


class TestHamiltonian:
    def test_diagonal_when_omega_vanishes(self):
        h = build_hamiltonian(SystemParams(omega=0.0, j=0.3, gamma=1.0))
        expected = np.diag([0.3 + 1j, -0.3, -0.3, 0.3 - 1j])
        assert np.allclose(h, expected, atol=1e-15)

    def test_hermitian_limit(self):
        h = build_hamiltonian(SystemParams(omega=1.5, j=0.0, gamma=0.0))
        assert np.allclose(h, h.conj().T)
        assert np.allclose(np.diag(h), 0)
        # single-qubit flips carry omega/2, double flips vanish
        for a, b in ((0, 1), (0, 2), (1, 3), (2, 3)):
            assert h[a, b] == pytest.approx(0.75)
        assert h[0, 3] == 0 and h[3, 0] == 0

    def test_traceless_and_no_double_flip(self):
        h = build_hamiltonian(SystemParams(omega=2.0, j=0.7, gamma=1.0))
        assert abs(np.trace(h)) == 0
        assert h[0, 3] == 0 and h[3, 0] == 0


class TestPtSymmetry:
    @pytest.mark.parametrize("params", [(2.0, 0.4, 1.0), (0.0, 0.0, 1.0), (1.3, 0.9, 0.0)])
    def test_residual_vanishes(self, params):
        assert pt_symmetry_residual(SystemParams(*params)) <= 1e-14

    def test_perturbed_single_diagonal_entry(self):
        h = build_hamiltonian(SystemParams(2.0, 0.4, 1.0))
        h[1, 1] += 0.1j
        assert pt_residual_of_matrix(h) == pytest.approx(0.1)

    def test_perturbed_exchange_pair(self):
        # perturbing both parity-partner diagonal entries doubles the defect
        h = build_hamiltonian(SystemParams(2.0, 0.4, 1.0))
        h[1, 1] += 0.1j
        h[2, 2] += 0.1j
        assert pt_residual_of_matrix(h) == pytest.approx(0.2)


@given(params_st)
def test_pt_residual_always_zero(params):
    assert pt_symmetry_residual(params) <= 1e-13


@given(params_st)
def test_trace_always_zero(params):
    assert abs(np.trace(build_hamiltonian(params))) <= 1e-14


@given(params_st)
def test_qubit_exchange_symmetry(params):
    assert exchange_residual(params) <= 1e-14


def test_exchange_is_permutation():
    assert np.allclose(EXCHANGE @ EXCHANGE, np.eye(4))


class TestSystemParams:
    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            SystemParams(omega=np.inf, j=0.0)
        with pytest.raises(ValueError):
            SystemParams(omega=1.0, j=np.nan)

    def test_rejects_negative_gamma(self):
        with pytest.raises(ValueError):
            SystemParams(omega=1.0, j=0.0, gamma=-0.5)

    def test_preset_domain_flagging(self):
        assert SystemParams(2.0, 0.3).in_preset_domain()
        assert not SystemParams(-1.0, 0.3).in_preset_domain()
        assert not SystemParams(2.0, 0.3, gamma=0.0).in_preset_domain()

    def test_replace(self):
        p = SystemParams(2.0, 0.3).replace(j=0.7)
        assert (p.omega, p.j, p.gamma) == (2.0, 0.7, 1.0)
