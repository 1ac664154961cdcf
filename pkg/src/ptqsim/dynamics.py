"""Non-unitary time evolution with per-step renormalization, steady-state and
collapse/revival detection, and the passive gain/loss rescaling map.

The integrator is the classical fixed-step 4th-order scheme; for a
time-independent generator its one-step map is the quartic Taylor matrix of
exp(-iH dt), so steps are applied from a precomputed power table in chunks.
Per-step renormalization semantics (states and cumulative log-norm) are
preserved exactly; chunk length is capped so unnormalized growth stays
within exp(5) between renormalizations.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import (
    NonFiniteError,
    NotNormalizedError,
    NumericalError,
    StepTooLargeError,
)
from .model import SIGMA_X1, SystemParams, as_state, build_hamiltonian
from .spectrum import eigensystem_oracle

#: dt * (max row sum of |H|) must stay below this for the fixed-step scheme.
STABILITY_LIMIT = 0.1


@dataclass(frozen=True)
class Trajectory:
    """Normalized states and derived observables on a strictly increasing grid.

    norm_log accumulates the log of the norm growth the renormalization
    discarded, so exp(norm_log) recovers the unnormalized magnitude.
    """

    times: np.ndarray
    states: np.ndarray
    norm_log: np.ndarray
    concurrence: np.ndarray
    coherence_x: np.ndarray

    def __len__(self):
        return len(self.times)


def initial_state(theta_init: float) -> np.ndarray:
    """Product state (sin(theta)|0> + cos(theta)|1>) (x) |0>."""
    return np.array(
        [np.sin(theta_init), 0.0, np.cos(theta_init), 0.0], dtype=complex
    )


def _rk4_step_matrix(h: np.ndarray, dt: float) -> np.ndarray:
    a = -1j * dt * h
    m = np.eye(4, dtype=complex)
    term = np.eye(4, dtype=complex)
    for k in range(1, 5):
        term = term @ a / k
        m = m + term
    return m


def propagate(
    params: SystemParams,
    psi0,
    t_max: float,
    dt: float,
    record_every: int = 1,
    validate: bool = False,
) -> Trajectory:
    """Integrate d(psi)/dt = -iH psi, renormalizing every step.

    Records every record_every-th step (plus t=0 and the final step).
    validate=True cross-checks the final state against the
    eigendecomposition propagator (overlap >= 1 - 1e-8).
    """
    psi0 = as_state(psi0)
    if abs(np.linalg.norm(psi0) - 1.0) > 1e-10:
        raise NotNormalizedError("psi0 must be unit-norm")
    if dt <= 0 or t_max < dt:
        raise ValueError("require dt > 0 and t_max >= dt")
    if record_every < 1:
        raise ValueError("record_every must be >= 1")

    h = build_hamiltonian(params)
    row_sum = float(np.max(np.abs(h).sum(axis=1)))
    if dt * row_sum > STABILITY_LIMIT:
        raise StepTooLargeError(
            f"dt*||H|| = {dt * row_sum:.3f} exceeds {STABILITY_LIMIT} "
            f"(use dt <= {STABILITY_LIMIT / row_sum:.2e})"
        )

    n_steps = int(round(t_max / dt))
    step = _rk4_step_matrix(h, dt)

    # Power table: growth within a chunk stays below exp(~5).
    chunk = int(min(n_steps, max(1, round(5.0 / (dt * max(params.gamma, 1.0))))))
    chunk = min(chunk, 4096)
    powers = np.empty((chunk, 4, 4), dtype=complex)
    powers[0] = step
    for m in range(1, chunk):
        powers[m] = step @ powers[m - 1]

    rec_idx = [0]
    rec_states = [psi0.copy()]
    rec_norm = [0.0]
    psi = psi0.copy()
    log_acc = 0.0
    done = 0
    while done < n_steps:
        k = min(chunk, n_steps - done)
        block = powers[:k] @ psi
        norms = np.linalg.norm(block, axis=1)
        if not np.all(np.isfinite(norms)) or np.any(norms == 0):
            raise NonFiniteError(f"amplitudes left the finite range near t={done * dt}")
        block /= norms[:, None]
        logs = log_acc + np.log(norms)
        steps = np.arange(done + 1, done + k + 1)
        mask = (steps % record_every == 0) | (steps == n_steps)
        if mask.any():
            rec_idx.extend(steps[mask].tolist())
            rec_states.extend(block[mask])
            rec_norm.extend(logs[mask].tolist())
        psi = block[-1]
        log_acc = logs[-1]
        done += k

    states = np.asarray(rec_states)
    times = np.asarray(rec_idx, dtype=float) * dt
    traj = Trajectory(
        times=times,
        states=states,
        norm_log=np.asarray(rec_norm),
        concurrence=2.0 * np.abs(states[:, 1] * states[:, 2] - states[:, 0] * states[:, 3]),
        coherence_x=np.einsum("ti,ij,tj->t", states.conj(), SIGMA_X1, states).real,
    )
    if validate:
        exact = exact_state(params, psi0, times[-1])
        overlap = abs(np.vdot(traj.states[-1], exact))
        if overlap < 1.0 - 1e-8:
            raise NumericalError(
                f"integrator disagrees with eigendecomposition propagator: "
                f"overlap {overlap:.12f}"
            )
    return traj


def exact_state(params: SystemParams, psi0, t: float) -> np.ndarray:
    """Normalized V exp(-i E t) V^-1 psi0 from the oracle eigendecomposition.

    Ill-conditioned at an EP (V is singular there); intended for
    cross-validation away from the critical curve.
    """
    psi0 = as_state(psi0)
    spec = eigensystem_oracle(build_hamiltonian(params), deflate_root=-params.j)
    v = spec.eigenvectors.T
    x = np.linalg.solve(v, psi0)
    psi = v @ (np.exp(-1j * spec.eigenvalues * t) * x)
    return psi / np.linalg.norm(psi)


def dominant_eigenvector(params: SystemParams) -> np.ndarray:
    """Eigenvector with the largest Im E; attracts normalized broken-phase dynamics."""
    spec = eigensystem_oracle(build_hamiltonian(params), deflate_root=-params.j)
    return spec.eigenvectors[int(np.argmax(spec.eigenvalues.imag))]


def _window_len(times: np.ndarray, width: float) -> int:
    dt = times[1] - times[0]
    return max(2, int(round(width / dt)))


def steady_state_of_series(times, values, window: float, tol: float):
    """Earliest time after which every trailing window varies less than tol.

    Returns (t_ss, mean value from t_ss on) or None.
    """
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    if window >= times[-1] - times[0]:
        raise ValueError("window must be shorter than the trajectory")
    w = _window_len(times, window)
    spans = sliding_window_view(values, w)
    variation = spans.max(axis=1) - spans.min(axis=1)
    bad = np.nonzero(variation >= tol)[0]
    if len(bad) == 0:
        start = 0
    elif bad[-1] + 1 >= len(variation):
        return None
    else:
        start = bad[-1] + 1
    return float(times[start]), float(values[start:].mean())


def detect_steady_state(traj: Trajectory, window: float, tol: float):
    """Steady concurrence of a trajectory; None when oscillations persist."""
    return steady_state_of_series(traj.times, traj.concurrence, window, tol)


def envelope_of_series(times, values, window: float) -> np.ndarray:
    """Sliding-window maxima (forward-looking, end-padded with the final value)."""
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    w = _window_len(times, window)
    padded = np.concatenate([values, np.full(w - 1, values[-1])])
    return sliding_window_view(padded, w).max(axis=1)


def revival_times_of_series(
    times, values, envelope_window: float = 5.0, collapse_fraction: float = 0.3
) -> np.ndarray:
    """Times of envelope maxima separated by collapses (dips below the fraction)."""
    times = np.asarray(times, dtype=float)
    env = envelope_of_series(times, values, envelope_window)
    threshold = collapse_fraction * env.max()
    active = env >= threshold
    revivals = []
    seen_collapse = False
    i, n = 0, len(env)
    while i < n:
        if active[i]:
            stop = i
            while stop < n and active[stop]:
                stop += 1
            if seen_collapse:
                revivals.append(times[i + int(np.argmax(env[i:stop]))])
            i = stop
        else:
            seen_collapse = True
            i += 1
    return np.asarray(revivals)


def detect_revivals(
    traj: Trajectory, envelope_window: float = 5.0, collapse_fraction: float = 0.3
) -> np.ndarray:
    """Revival times of the concurrence envelope (empty when nothing collapses)."""
    return revival_times_of_series(
        traj.times, traj.concurrence, envelope_window, collapse_fraction
    )


def passive_pt_map(rho_eff, gamma: float, t: float) -> np.ndarray:
    """Rescale a pure-loss evolved matrix onto the balanced gain/loss picture.

    Returns exp(2*gamma*t) * rho_eff; generally not trace-one, the caller
    renormalizes.
    """
    if t < 0 or gamma < 0:
        raise ValueError("require t >= 0 and gamma >= 0")
    rho_eff = np.asarray(rho_eff, dtype=complex)
    return np.exp(2.0 * gamma * t) * rho_eff
