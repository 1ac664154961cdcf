import numpy as np
import pytest

from ptqsim import (
    SystemParams,
    auxiliary_quantities,
    build_hamiltonian,
    coalesced_eigenvector,
    eigenvalues_closed_form,
    eigenvectors_closed_form,
    ep_curve,
    ep_residual,
    locate_ep,
)
from ptqsim.ep import EpPoint, ep_order_is_two
from ptqsim.errors import EmptyCurveError, NoSignChangeError, NotAtEpError


class TestEpResidual:
    def test_decoupled_not_an_ep(self):
        res_theta, _ = ep_residual(SystemParams(2.0, 0.0, 1.0))
        assert res_theta == pytest.approx(np.pi / 6)

    def test_free_limit_not_an_ep(self):
        res_theta, res_x = ep_residual(SystemParams(0.0, 0.0, 1.0))
        assert res_theta == 0.0
        assert res_x == pytest.approx(-6.0)

    def test_near_critical_point(self):
        # the 3-digit critical pair sits ~1e-3 inside the unbroken phase,
        # where the phase residual is 0.016 and the radial residual exactly 0
        res_theta, res_x = ep_residual(SystemParams(2.000, 0.589, 1.0))
        assert abs(res_x) < 1e-10
        assert 0.01 < abs(res_theta) < 0.02


class TestLocateEp:
    def test_fixed_omega_2000(self):
        point = locate_ep("omega", 2.000, (0.3, 0.9))
        assert 0.586 <= point.j_c <= 0.591
        assert point.omega_c == 2.000

    def test_fixed_j_0300(self):
        point = locate_ep("j", 0.300, (1.2, 2.2))
        assert point.omega_c == pytest.approx(1.649, abs=2e-3)

    def test_fixed_omega_1700(self):
        point = locate_ep("omega", 1.700, (0.1, 0.6))
        assert point.j_c == pytest.approx(0.338, abs=2e-3)

    def test_certificate_invariants(self):
        point = locate_ep("omega", 2.000, (0.3, 0.9))
        assert abs(point.residual_theta) <= 1e-6
        assert abs(point.residual_x) <= 1e-6
        assert point.gap <= 1e-6
        assert abs(point.e_degenerate.imag) <= 1e-8

    def test_degenerate_pair_real_and_equal(self):
        point = locate_ep("omega", 2.000, (0.3, 0.9))
        values = eigenvalues_closed_form(point.params())
        assert abs(values[2].imag) <= 1e-8 and abs(values[3].imag) <= 1e-8
        assert abs(values[2].real - values[3].real) <= 1e-8

    def test_second_order(self):
        point = locate_ep("omega", 2.000, (0.3, 0.9))
        assert ep_order_is_two(point)

    def test_no_sign_change(self):
        with pytest.raises(NoSignChangeError):
            locate_ep("omega", 2.000, (0.1, 0.2))

    def test_bad_axis(self):
        with pytest.raises(ValueError):
            locate_ep("theta", 2.000, (0.1, 0.2))

    def test_agrees_with_radical_zero(self):
        """Phase bisection lands on the zero of the radical discriminant."""
        point = locate_ep("omega", 2.000, (0.3, 0.9))
        lo, hi = 0.3, 0.9
        for _ in range(100):
            mid = 0.5 * (lo + hi)
            if mid in (lo, hi):
                break
            if auxiliary_quantities(SystemParams(2.0, mid, 1.0)).z < 0:
                lo = mid
            else:
                hi = mid
        assert abs(point.j_c - 0.5 * (lo + hi)) <= 1e-6

    def test_imag_grows_continuously_on_broken_side(self):
        jc = locate_ep("omega", 2.000, (0.3, 0.9)).j_c
        imags = []
        for d in (1e-6, 1e-4, 1e-2):
            values = eigenvalues_closed_form(SystemParams(2.0, jc + d, 1.0))
            imags.append(np.max(np.abs(values.imag)))
            pts = eigenvalues_closed_form(SystemParams(2.0, jc - d, 1.0))
            assert np.max(np.abs(pts.imag)) == 0.0
        assert imags[0] < imags[1] < imags[2]


class TestEpCurve:
    def test_endpoints(self):
        entries = ep_curve((1.649, 2.000), 3)
        assert all(e.point is not None for e in entries)
        assert entries[0].point.j_c == pytest.approx(0.300, abs=2e-3)
        assert entries[-1].point.j_c == pytest.approx(0.590, abs=2e-3)
        omegas = [e.omega for e in entries]
        assert omegas == sorted(omegas)

    def test_single_point(self):
        entries = ep_curve((1.900, 1.900), 1)
        assert entries[0].point.j_c == pytest.approx(0.500, abs=1e-3)

    def test_empty_curve(self):
        with pytest.raises(EmptyCurveError):
            ep_curve((0.1, 0.2), 2, j_bracket=(1e-6, 0.05))

    def test_failures_marked_not_dropped(self):
        # omega below gamma never leaves the broken phase: those points fail
        entries = ep_curve((0.5, 2.0), 4)
        assert len(entries) == 4
        assert entries[0].point is None and entries[0].failure
        assert entries[-1].point is not None


@pytest.fixture(scope="module")
def point():
    return locate_ep("omega", 2.000, (0.3, 0.9))


class TestCoalescedEigenvector:

    def test_eigen_residual(self, point):
        vec = coalesced_eigenvector(point)
        h = build_hamiltonian(point.params())
        assert np.linalg.norm(h @ vec - point.e_degenerate * vec) <= 1e-6

    def test_exchange_symmetric(self, point):
        vec = coalesced_eigenvector(point)
        assert vec[1] == pytest.approx(vec[2])

    def test_overlap_with_both_branches(self, point):
        vec = coalesced_eigenvector(point)
        for d in (1e-4, -1e-4):
            nearby = SystemParams(2.0, point.j_c + d, 1.0)
            vecs = eigenvectors_closed_form(nearby)
            assert abs(np.vdot(vec, vecs[2])) >= 0.999
            assert abs(np.vdot(vec, vecs[3])) >= 0.999
            assert abs(np.vdot(vecs[2], vecs[3])) >= 0.999

    def test_not_at_ep(self):
        fake = EpPoint(
            j_c=0.4, omega_c=2.0, gamma=1.0, residual_theta=0.2,
            residual_x=-3.0, gap=0.5, e_degenerate=1.0 + 0j,
        )
        with pytest.raises(NotAtEpError):
            coalesced_eigenvector(fake)
