"""Two-qubit concurrence: general Wootters form, pure-state shortcut, and the
radical-coefficient closed form for the symmetric-sector eigenstates.

The closed form is kept verbatim for cross-checking but is *not*
authoritative: it disagrees with the Wootters value away from the
Hermitian limit (its second root is identically zero), so any mismatch is
surfaced as data via DiscrepancyError / scan_closed_form_discrepancies.
"""
from __future__ import annotations

import numpy as np

from .errors import (
    DiscrepancyError,
    InvalidDensityError,
    NotNormalizedError,
    OmegaSingularError,
)
from .model import SIGMA_YY, SystemParams, as_state
from .spectrum import _char_poly, eigenvalues_closed_form, eigenvectors_closed_form

_NORM_TOL = 1e-10


def _validate_density(rho: np.ndarray):
    if rho.shape != (4, 4):
        raise InvalidDensityError(f"expected 4x4, got {rho.shape}")
    if np.max(np.abs(rho - rho.conj().T)) > 1e-10:
        raise InvalidDensityError("not Hermitian within 1e-10")
    if abs(np.trace(rho) - 1) > 1e-10:
        raise InvalidDensityError(f"trace {np.trace(rho)} != 1 within 1e-10")
    if np.min(np.linalg.eigvalsh(rho)) < -1e-10:
        raise InvalidDensityError("negative eigenvalue below -1e-10 floor")


def concurrence_mixed(rho, validate: bool = True) -> float:
    """Wootters concurrence of a two-qubit density matrix.

    Uses the characteristic-quartic oracle for the eigenvalues of
    rho * (sy x sy) * conj(rho) * (sy x sy); round-off negatives are
    clamped at zero before the square roots.
    """
    rho = np.asarray(rho, dtype=complex)
    if validate:
        _validate_density(rho)
    flipped = SIGMA_YY @ rho.conj() @ SIGMA_YY
    coeff = _char_poly(rho @ flipped)
    # Deflate exact-zero eigenvalues first (rank-deficient products are the
    # norm here, and companion solves lose half the digits on repeated zeros).
    degree = 4
    while degree > 0 and abs(coeff[degree]) < 1e-12:
        degree -= 1
    mu = np.zeros(4, dtype=complex)
    if degree > 0:
        mu[:degree] = np.roots(coeff[: degree + 1])
    mu = np.clip(np.sort(mu.real)[::-1], 0.0, None)
    roots = np.sqrt(mu)
    return float(min(1.0, max(0.0, roots[0] - roots[1] - roots[2] - roots[3])))


def concurrence_pure(psi) -> float:
    """Concurrence of a unit state via the spin-flip overlap |<psi|sy x sy|psi*>|."""
    psi = as_state(psi)
    if abs(np.linalg.norm(psi) - 1.0) > _NORM_TOL:
        raise NotNormalizedError(f"norm {np.linalg.norm(psi)} != 1 within {_NORM_TOL}")
    return float(min(1.0, 2.0 * abs(psi[1] * psi[2] - psi[0] * psi[3])))


def _radical_coefficients(params: SystemParams, s: int):
    if s not in (3, 4):
        raise ValueError(f"s must be 3 or 4, got {s}")
    if params.omega <= 1e-12:
        raise OmegaSingularError("closed-form coefficients divide by omega")
    e = eigenvalues_closed_form(params)[s - 1]
    r1 = -2 * (params.j + e) * (params.j - e + 1j * params.gamma) / params.omega**2 - 1
    r2 = -(params.j - e + 1j * params.gamma) / params.omega
    n2 = 1.0 / (1 + abs(r1) ** 2 + 2 * abs(r2) ** 2)  # |N|^2
    return r1, r2, n2


def eigenstate_concurrence_closed(
    params: SystemParams, s: int, check: bool = True
) -> float:
    """Closed-form concurrence of eigenstate s in {3, 4} from the R coefficients.

    check=True compares against concurrence_pure of the same eigenvector and
    raises DiscrepancyError beyond 1e-6 - the Wootters path is authoritative,
    mismatches are reported, never silently overridden.
    """
    r1, r2, n2 = _radical_coefficients(params, s)
    a = 2 * r1.real - 2 * abs(r2) ** 2
    b = -a
    common = (2 * r1.real) ** 2 + 2 * b * abs(r2) ** 2 - 4 * abs(r2) ** 2 * r1.real
    lam1 = 0.5 * n2**2 * (common + a * a)
    lam2 = 0.5 * n2**2 * (common - a * a)
    value = float(np.sqrt(max(lam1, 0.0)) - np.sqrt(max(lam2, 0.0)))
    if check:
        reference = eigenstate_concurrence_wootters(params, s)
        if abs(value - reference) > 1e-6:
            raise DiscrepancyError(
                f"closed form {value:.9f} vs Wootters {reference:.9f} at "
                f"omega={params.omega}, j={params.j}, s={s}",
                closed=value,
                wootters=reference,
            )
    return value


def eigenstate_concurrence_wootters(params: SystemParams, s: int) -> float:
    """Authoritative eigenstate concurrence: Wootters form on the unit eigenvector."""
    if s not in (1, 2, 3, 4):
        raise ValueError(f"s must be in 1..4, got {s}")
    vec = eigenvectors_closed_form(params)[s - 1]
    return concurrence_pure(vec)


def scan_closed_form_discrepancies(points, states=(3, 4)) -> list[dict]:
    """Closed-form vs Wootters table over parameter points; one record per (point, s)."""
    records = []
    for params in points:
        for s in states:
            closed = eigenstate_concurrence_closed(params, s, check=False)
            wootters = eigenstate_concurrence_wootters(params, s)
            records.append(
                {
                    "omega": params.omega,
                    "j": params.j,
                    "gamma": params.gamma,
                    "s": s,
                    "closed": closed,
                    "wootters": wootters,
                    "abs_diff": abs(closed - wootters),
                }
            )
    return records
