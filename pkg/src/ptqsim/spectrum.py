"""Eigensystem of the two-qubit Hamiltonian: closed forms and an oracle.

The characteristic quartic factors into the exact singlet root E1 = -j and
a cubic for the exchange-symmetric sector, solved here in radicals.  The
cube-root branch is fixed so that

* labels E3/E4 always name the pair that coalesces on the critical curve
  (E2 stays separated), continuously across the phase transition;
* eigenvalues are produced as exact conjugate pairs / exact reals, so the
  unbroken phase has max|Im E| == 0 in floating point.

An independent oracle path (characteristic polynomial by trace recursion,
companion-matrix roots, SVD null-space eigenvectors) cross-checks every
closed form and handles the rare parameter sets where the radicals
degenerate.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from itertools import permutations

import numpy as np

from .errors import (
    DegenerateCubicError,
    NearDefectiveError,
    NoConvergenceError,
    OmegaSingularError,
)
from .model import SystemParams, build_hamiltonian

_W3 = np.exp(2j * np.pi / 3)  # primitive cube root of unity
_SQ27 = 3.0 * np.sqrt(3.0)

#: Residual tolerance for eigenpairs, relaxed near a coalescence where
#: eigenvector conditioning diverges.
RESIDUAL_TOL = 1e-9
NEAR_EP_GAP = 1e-4
NEAR_EP_RESIDUAL_TOL = 1e-6


class Source(Enum):
    CLOSED_FORM = "closed-form"
    ORACLE = "oracle"


class Phase(Enum):
    PT_SYMMETRIC = "pt-symmetric"
    PT_BROKEN = "pt-broken"
    NEAR_EP = "near-ep"


@dataclass(frozen=True)
class Auxiliaries:
    """Cubic invariants (x, z) and the principal cube root y = r*exp(i*theta_y)."""

    x: float
    z: float
    y: complex
    r: float
    theta_y: float


@dataclass(frozen=True)
class PhaseLabel:
    phase: Phase
    max_imag: float


@dataclass(frozen=True)
class Spectrum:
    """Labeled eigenpairs; eigenvectors[k] is the unit right eigenvector of eigenvalues[k]."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    source: Source
    max_residual: float


def _cubic_data(params: SystemParams):
    """(x, z, a) with a the real part of the cubed radical."""
    om2, j, g2 = params.omega**2, params.j, params.gamma**2
    x = 4 * j * j + 3 * om2 - 3 * g2
    z = 16 * j**4 * g2 + j * j * (8 * g2 * g2 + 20 * g2 * om2 - om2 * om2) + (g2 - om2) ** 3
    a = -8 * j**3 - 9 * j * (om2 + 2 * g2)
    return x, z, a


def auxiliary_quantities(params: SystemParams) -> Auxiliaries:
    """Cubic invariants with the principal-branch cube root.

    For z < 0 the square root is taken as +i*sqrt(|z|) and y is the
    principal cube root of the resulting complex radicand.
    """
    x, z, a = _cubic_data(params)
    radicand = a + _SQ27 * np.sqrt(complex(z))
    y = radicand ** (1.0 / 3.0)
    return Auxiliaries(x=x, z=z, y=y, r=abs(y), theta_y=float(np.angle(y)))


def _branch_pair(params: SystemParams):
    """Cube-root pair (y, v) with v = x/y, on the label-continuous branch.

    z >= 0: both radicands are real; the real cube roots are used (exact,
    cancellation-free since x^3 = a^2 - 27z factors through them).
    z < 0: |y|^2 = x there, so v is exactly conj(y); the principal root is
    rotated onto the continuation of the negative-real branch when the
    radicand has negative real part.
    """
    x, z, a = _cubic_data(params)
    if z >= 0:
        s = _SQ27 * np.sqrt(z)
        y = complex(np.cbrt(a + s))
        v = complex(np.cbrt(a - s))
    else:
        radicand = complex(a, _SQ27 * np.sqrt(-z))
        y = radicand ** (1.0 / 3.0)
        if radicand.real < 0:
            y = y * _W3
        v = y.conjugate()
    return y, v


def eigenvalues_closed_form(params: SystemParams, verify: bool = False) -> np.ndarray:
    """Labeled eigenvalues (E1..E4); E1 = -j exactly, (E3, E4) the coalescing pair.

    verify=True additionally checks the multiset against the oracle within
    1e-9 (optimal pairing); useful outside hot loops.
    """
    j = params.j
    y, v = _branch_pair(params)
    if abs(y) < 1e-12:
        raise DegenerateCubicError(
            f"cube-root radical vanished at omega={params.omega}, j={j}, "
            f"gamma={params.gamma}; use eigensystem_oracle"
        )
    e2 = (j + v + y) / 3.0
    e3 = (j + _W3.conjugate() * v + _W3 * y) / 3.0
    e4 = (j + _W3 * v + _W3.conjugate() * y) / 3.0
    values = np.array([-j, e2, e3, e4], dtype=complex)
    if verify:
        oracle = eigensystem_oracle(build_hamiltonian(params), deflate_root=-j)
        dev = pairing_distance(values, oracle.eigenvalues)
        if dev > 1e-9:
            raise NoConvergenceError(
                f"closed-form eigenvalues deviate from oracle by {dev:.3e}"
            )
    return values


def _phase_fix(vec: np.ndarray) -> np.ndarray:
    """Make the largest-magnitude amplitude real-positive (deterministic output).

    Magnitude ties resolve toward the higher index, which keeps the
    canonical singlet sign pattern (0, -1, 1, 0)/sqrt(2).
    """
    mags = np.abs(vec)
    k = len(vec) - 1 - int(np.argmax(mags[::-1]))
    return vec * (mags[k] / vec[k])


def eigenvectors_closed_form(
    params: SystemParams, eigenvalues: np.ndarray | None = None
) -> np.ndarray:
    """Unit right eigenvectors as rows, phase-fixed; Psi1 is the singlet.

    Component layout in the fixed basis puts the unit amplitude on |00>
    and the quadratic coefficient on |11>; residuals ||Hv - Ev|| are
    checked against RESIDUAL_TOL (relaxed to NEAR_EP_RESIDUAL_TOL when the
    smallest eigenvalue gap is below NEAR_EP_GAP).
    """
    om, j, g = params.omega, params.j, params.gamma
    if om <= 1e-12:
        raise OmegaSingularError(
            f"eigenvector coefficients divide by omega (omega={om}); use the oracle"
        )
    if eigenvalues is None:
        eigenvalues = eigenvalues_closed_form(params)
    vecs = np.zeros((4, 4), dtype=complex)
    vecs[0] = np.array([0, -1, 1, 0], dtype=complex) / np.sqrt(2.0)
    for k in (1, 2, 3):
        e = eigenvalues[k]
        r1 = -2 * (j + e) * (j - e + 1j * g) / om**2 - 1
        r2 = -(j - e + 1j * g) / om
        norm = (1 + abs(r1) ** 2 + 2 * abs(r2) ** 2) ** -0.5
        vecs[k] = _phase_fix(norm * np.array([1, r2, r2, r1]))
    h = build_hamiltonian(params)
    residual = max(
        float(np.linalg.norm(h @ vecs[k] - eigenvalues[k] * vecs[k])) for k in range(4)
    )
    tol = NEAR_EP_RESIDUAL_TOL if _min_gap(eigenvalues) < NEAR_EP_GAP else RESIDUAL_TOL
    if residual > tol:
        raise NearDefectiveError(
            f"eigenvector residual {residual:.3e} exceeds {tol:.0e} at "
            f"omega={om}, j={j}, gamma={g} (min gap {_min_gap(eigenvalues):.3e})"
        )
    return vecs


def _min_gap(values: np.ndarray) -> float:
    diffs = [abs(values[i] - values[k]) for i in range(4) for k in range(i + 1, 4)]
    return float(min(diffs))


def _char_poly(h: np.ndarray) -> np.ndarray:
    """Monic characteristic polynomial coefficients via the trace recursion."""
    coeff = np.zeros(5, dtype=complex)
    coeff[0] = 1.0
    m = np.zeros_like(h)
    eye = np.eye(4, dtype=complex)
    for k in range(1, 5):
        m = h @ (m + coeff[k - 1] * eye)
        coeff[k] = -np.trace(m) / k
    return coeff


def eigensystem_oracle(
    h: np.ndarray, deflate_root: complex | None = None
) -> Spectrum:
    """Independent eigensolve: characteristic quartic + SVD null spaces.

    deflate_root, when given, is divided out synthetically before the
    companion-matrix solve (used for the exactly known singlet root).
    Raises NoConvergenceError when residuals stay above tolerance; callers
    may retry with a ~1e-8 perturbation of the matrix.
    """
    h = np.asarray(h, dtype=complex)
    if h.shape != (4, 4):
        raise ValueError(f"expected a 4x4 matrix, got shape {h.shape}")
    if not np.all(np.isfinite(h.view(float))):
        raise ValueError("matrix entries must be finite")

    coeff = _char_poly(h)
    if deflate_root is not None:
        reduced = np.zeros(4, dtype=complex)
        reduced[0] = coeff[0]
        for i in range(1, 4):
            reduced[i] = coeff[i] + deflate_root * reduced[i - 1]
        roots = np.concatenate([[complex(deflate_root)], np.roots(reduced)]).astype(complex)
    else:
        roots = np.roots(coeff).astype(complex)

    deriv = np.polyder(coeff)
    start = 0 if deflate_root is None else 1  # keep the exact root untouched
    for _ in range(2):  # Newton polish
        dp = np.polyval(deriv, roots[start:])
        ok = np.abs(dp) > 1e-30
        roots[start:] = np.where(
            ok, roots[start:] - np.polyval(coeff, roots[start:]) / np.where(ok, dp, 1.0), roots[start:]
        )

    scale = max(1.0, float(np.max(np.abs(h))))
    roots = _refine_close_pair(coeff, roots, scale)

    eye = np.eye(4, dtype=complex)
    vecs = np.zeros((4, 4), dtype=complex)
    residuals = np.zeros(4)
    assigned = np.zeros(4, dtype=bool)
    for k in range(4):
        if assigned[k]:
            continue
        group = [m for m in range(4) if abs(roots[m] - roots[k]) <= 1e-9 * scale]
        lam = roots[group].mean()
        _, sing, vh = np.linalg.svd(h - lam * eye)
        # a repeated eigenvalue may still span several null directions;
        # hand out as many independent ones as are numerically null
        null_dim = max(1, int(np.sum(sing <= 1e-7 * scale)))
        for slot, m in enumerate(group):
            row = vh[-1 - min(slot, null_dim - 1)]
            vec = _phase_fix(row.conj())
            vecs[m] = vec
            residuals[m] = np.linalg.norm(h @ vec - roots[m] * vec)
            assigned[m] = True

    if residuals.max() > 1e-5 * scale:
        raise NoConvergenceError(
            f"oracle residual {residuals.max():.3e} above budget; matrix may be "
            "defective - retry with a 1e-8 perturbation"
        )
    return Spectrum(
        eigenvalues=roots,
        eigenvectors=vecs,
        source=Source.ORACLE,
        max_residual=float(residuals.max()),
    )


def _refine_close_pair(coeff: np.ndarray, roots: np.ndarray, scale: float) -> np.ndarray:
    """Re-solve the closest root pair from a deflated quadratic.

    Companion/Newton accuracy degrades to ~sqrt(eps) on (nearly) repeated
    roots; dividing out the two well-separated roots and solving the
    remaining quadratic in closed form restores full precision for the
    cluster (the usual double-eigenvalue case, e.g. a coalescing pair).
    """
    pairs = [
        (abs(roots[i] - roots[k]), i, k) for i in range(4) for k in range(i + 1, 4)
    ]
    gap, i, k = min(pairs, key=lambda t: t[0])
    if gap > 1e-6 * scale:
        return roots
    others = [m for m in range(4) if m not in (i, k)]
    if min(abs(roots[m] - roots[n]) for m in (i, k) for n in others) < 1e-3 * scale:
        return roots  # three-way cluster: leave to the caller's tolerance
    poly = coeff
    for m in others:  # synthetic division by the accurate simple roots
        out = np.empty(len(poly) - 1, dtype=complex)
        out[0] = poly[0]
        for q in range(1, len(out)):
            out[q] = poly[q] + roots[m] * out[q - 1]
        poly = out
    b, c = poly[1], poly[2]
    refined = roots.copy()
    disc_sq = b * b - 4.0 * c
    if abs(disc_sq) <= 1e-12 * max(1.0, abs(b) ** 2, abs(c)):
        # at coefficient noise level the pair is a genuine double root; its
        # mean -b/2 is a Newton sum and fully conditioned
        refined[i] = refined[k] = -0.5 * b
        return refined
    disc = np.sqrt(disc_sq)
    if abs(-b + disc) < abs(-b - disc):
        disc = -disc
    r_big = 0.5 * (-b + disc)
    r_small = c / r_big if r_big != 0 else 0.5 * (-b - disc)
    refined[i], refined[k] = r_big, r_small
    return refined


def pairing_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Smallest max-deviation between two eigenvalue quadruples over all pairings."""
    return min(max(abs(a[list(p)] - b)) for p in permutations(range(4)))


def spectrum_closed_form(params: SystemParams) -> Spectrum:
    """Closed-form spectrum, cross-checked against the oracle multiset."""
    values = eigenvalues_closed_form(params)
    vecs = eigenvectors_closed_form(params, values)
    h = build_hamiltonian(params)
    residual = max(
        float(np.linalg.norm(h @ vecs[k] - values[k] * vecs[k])) for k in range(4)
    )
    oracle = eigensystem_oracle(h, deflate_root=-params.j)
    dev = pairing_distance(values, oracle.eigenvalues)
    if dev > 1e-9:
        raise NoConvergenceError(f"closed form deviates from oracle by {dev:.3e}")
    return Spectrum(values, vecs, Source.CLOSED_FORM, residual)


def spectrum_oracle(params: SystemParams) -> Spectrum:
    """Oracle spectrum with labels aligned to the closed-form convention."""
    spec = eigensystem_oracle(build_hamiltonian(params), deflate_root=-params.j)
    try:
        reference = eigenvalues_closed_form(params)
    except DegenerateCubicError:
        order = np.lexsort((spec.eigenvalues.imag, spec.eigenvalues.real))
    else:
        best = min(
            permutations(range(4)),
            key=lambda p: max(abs(spec.eigenvalues[list(p)] - reference)),
        )
        order = np.array(best)
    return Spectrum(
        spec.eigenvalues[order],
        spec.eigenvectors[order],
        Source.ORACLE,
        spec.max_residual,
    )


def classify_phase(
    params: SystemParams, tol_phase: float = 1e-8, tol_gap: float = 1e-6
) -> PhaseLabel:
    """Phase from max |Im E|; NEAR_EP when a real spectrum also nearly degenerates.

    Real crossings that are not coalescences (e.g. j = 0, where the singlet
    meets a symmetric-sector root) also report NEAR_EP.
    """
    try:
        values = eigenvalues_closed_form(params)
    except DegenerateCubicError:
        values = eigensystem_oracle(
            build_hamiltonian(params), deflate_root=-params.j
        ).eigenvalues
    max_imag = float(np.max(np.abs(values.imag)))
    if max_imag <= tol_phase:
        if _min_gap(values) <= tol_gap:
            return PhaseLabel(Phase.NEAR_EP, max_imag)
        return PhaseLabel(Phase.PT_SYMMETRIC, max_imag)
    return PhaseLabel(Phase.PT_BROKEN, max_imag)
