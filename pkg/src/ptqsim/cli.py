"""Command-line front end: sweeps, evolution, sensing, and figure-data presets.

Output contract: every CSV starts with the magic line ``# ptq-sim v1`` and a
``# params: ...`` comment (extra ``# key: value`` metadata lines may
follow), then a header row.  Complex numbers are exported as ``re_*`` /
``im_*`` column pairs; undefined values are left empty next to a ``flag``
column.  JSON output is one object with ``params``, ``results`` and
``diagnostics`` keys.  Exit codes: 0 success, 2 validation/usage error,
3 numerical failure.  Identical configurations produce byte-identical files.
"""
from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import __version__
from .dynamics import detect_revivals, initial_state, propagate
from .entanglement import (
    eigenstate_concurrence_closed,
    eigenstate_concurrence_wootters,
)
from .ep import ep_curve, locate_ep
from .errors import (
    DegenerateCubicError,
    NumericalError,
    OmegaSingularError,
    ValidationError,
)
from .model import SystemParams
from .sensing import qfi, sensing_sweep, sensitivity_variance, coherence_expectation
from .spectrum import (
    classify_phase,
    eigenvalues_closed_form,
    eigenvectors_closed_form,
    spectrum_closed_form,
    spectrum_oracle,
)

MAGIC = "# ptq-sim v1"


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float) and math.isnan(x):
        return ""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.12g}"
    return str(x)


def _jsonable(x):
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return None if math.isnan(x) else x
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, complex):
        return {"re": x.real, "im": x.imag}
    if isinstance(x, np.ndarray):
        return [_jsonable(v) for v in x.tolist()]
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    return x


def _write(out_path: str, text: str):
    if out_path == "-":
        sys.stdout.write(text)
    else:
        with open(out_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _emit(args, params_desc: str, header: list[str], rows: list[list], meta: dict):
    if args.format == "json":
        payload = {
            "params": params_desc,
            "results": {"columns": header, "rows": [_jsonable(r) for r in rows]},
            "diagnostics": _jsonable(meta),
        }
        _write(args.out, json.dumps(payload, indent=2) + "\n")
        return
    lines = [MAGIC, f"# params: {params_desc}"]
    for key, value in meta.items():
        lines.append(f"# {key}: {_fmt(value)}")
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    _write(args.out, "\n".join(lines) + "\n")


def _emit_object(args, params_desc: str, results: dict, meta: dict,
                 header: list[str] | None = None, rows: list[list] | None = None):
    """JSON-first commands; CSV fallback uses the supplied tabular form."""
    if args.format == "csv":
        _emit(args, params_desc, header, rows, meta)
        return
    payload = {
        "params": params_desc,
        "results": _jsonable(results),
        "diagnostics": _jsonable(meta),
    }
    _write(args.out, json.dumps(payload, indent=2) + "\n")


def _params_from(args) -> SystemParams:
    return SystemParams(omega=args.omega, j=args.j, gamma=args.gamma)


def _params_desc(params: SystemParams, **extra) -> str:
    parts = [f"omega={_fmt(params.omega)}", f"j={_fmt(params.j)}", f"gamma={_fmt(params.gamma)}"]
    parts += [f"{k}={_fmt(v)}" for k, v in extra.items()]
    return " ".join(parts)


def _sweep_range(text: str) -> tuple[float, float]:
    try:
        lo, hi = text.split(":")
        return float(lo), float(hi)
    except Exception:
        raise argparse.ArgumentTypeError(f"expected a:b, got {text!r}")


# ---------------------------------------------------------------- commands


def cmd_spectrum(args) -> int:
    params = _params_from(args)
    try:
        spec = spectrum_closed_form(params)
    except (DegenerateCubicError, OmegaSingularError):
        spec = spectrum_oracle(params)
    label = classify_phase(params)
    results = {
        "eigenvalues": [
            {"label": f"E{k+1}", "re": spec.eigenvalues[k].real, "im": spec.eigenvalues[k].imag}
            for k in range(4)
        ],
        "eigenvectors": [_jsonable(spec.eigenvectors[k]) for k in range(4)],
        "source": spec.source.value,
        "max_residual": spec.max_residual,
        "phase": label.phase.value,
        "max_imag": label.max_imag,
    }
    header = ["label", "re_e", "im_e"] + [f"{p}_v{i}" for i in range(4) for p in ("re", "im")]
    rows = []
    for k in range(4):
        row = [f"E{k+1}", spec.eigenvalues[k].real, spec.eigenvalues[k].imag]
        for i in range(4):
            row += [spec.eigenvectors[k][i].real, spec.eigenvectors[k][i].imag]
        rows.append(row)
    meta = {"source": spec.source.value, "phase": label.phase.value,
            "max_residual": spec.max_residual}
    _emit_object(args, _params_desc(params), results, meta, header, rows)
    return 0


def _ep_point_payload(point):
    return {
        "j_c": point.j_c,
        "omega_c": point.omega_c,
        "gamma": point.gamma,
        "residual_theta": point.residual_theta,
        "residual_x": point.residual_x,
        "gap": point.gap,
        "re_e_degenerate": point.e_degenerate.real,
        "im_e_degenerate": point.e_degenerate.imag,
    }


def cmd_ep_locate(args) -> int:
    if args.sweep_axis == "j":
        fix, fixed_value = "omega", args.omega
    else:
        fix, fixed_value = "j", args.j
    point = locate_ep(fix, fixed_value, args.sweep_range, gamma=args.gamma)
    payload = _ep_point_payload(point)
    header = list(payload)
    desc = f"fix={fix} value={_fmt(fixed_value)} gamma={_fmt(args.gamma)} " \
           f"bracket={_fmt(args.sweep_range[0])}:{_fmt(args.sweep_range[1])}"
    _emit_object(args, desc, payload, {}, header, [list(payload.values())])
    return 0


def cmd_ep_curve(args) -> int:
    entries = ep_curve(args.sweep_range, args.n, gamma=args.gamma)
    header = ["omega", "j_c", "residual_theta", "residual_x", "gap",
              "re_e_degenerate", "im_e_degenerate", "failure"]
    rows = []
    for entry in entries:
        if entry.point is None:
            rows.append([entry.omega] + [float("nan")] * 6 + [entry.failure])
        else:
            p = entry.point
            rows.append([entry.omega, p.j_c, p.residual_theta, p.residual_x, p.gap,
                         p.e_degenerate.real, p.e_degenerate.imag, None])
    desc = f"gamma={_fmt(args.gamma)} omega_range=" \
           f"{_fmt(args.sweep_range[0])}:{_fmt(args.sweep_range[1])} n={args.n}"
    _emit(args, desc, header, rows, {"n_failed": sum(r[-1] is not None for r in rows)})
    return 0


def _concurrence_row(params: SystemParams):
    c3 = eigenstate_concurrence_wootters(params, 3)
    c4 = eigenstate_concurrence_wootters(params, 4)
    cc3 = eigenstate_concurrence_closed(params, 3, check=False)
    cc4 = eigenstate_concurrence_closed(params, 4, check=False)
    return c3, c4, cc3, cc4


def cmd_concurrence(args) -> int:
    params = _params_from(args)
    if args.sweep_axis is None:
        c3, c4, cc3, cc4 = _concurrence_row(params)
        results = {"c_psi3": c3, "c_psi4": c4,
                   "closed_form": {"c_psi3": cc3, "c_psi4": cc4},
                   "max_closed_form_discrepancy": max(abs(c3 - cc3), abs(c4 - cc4))}
        header = ["c_psi3", "c_psi4", "c_closed_psi3", "c_closed_psi4"]
        _emit_object(args, _params_desc(params), results, {}, header, [[c3, c4, cc3, cc4]])
        return 0
    if args.sweep_range is None or args.n is None:
        raise ValidationError("sweep requires --sweep-range and --n")
    grid = np.linspace(args.sweep_range[0], args.sweep_range[1], args.n)
    rows = []
    for x in grid:
        p = params.replace(**{args.sweep_axis: float(x)})
        rows.append([float(x), *_concurrence_row(p)])
    header = [args.sweep_axis, "c_psi3", "c_psi4", "c_closed_psi3", "c_closed_psi4"]
    _emit(args, _params_desc(params, sweep=args.sweep_axis), header, rows, {})
    return 0


def cmd_evolve(args) -> int:
    params = _params_from(args)
    traj = propagate(params, initial_state(args.theta), args.tmax, args.dt,
                     record_every=args.record_every)
    header = ["t", "concurrence", "coherence_x", "norm_log"]
    rows = list(zip(traj.times, traj.concurrence, traj.coherence_x, traj.norm_log))
    desc = _params_desc(params, theta=args.theta, tmax=args.tmax, dt=args.dt)
    _emit(args, desc, header, rows, {})
    return 0


def cmd_revivals(args) -> int:
    params = _params_from(args)
    traj = propagate(params, initial_state(args.theta), args.tmax, args.dt,
                     record_every=args.record_every)
    revivals = detect_revivals(traj, envelope_window=args.envelope_window,
                               collapse_fraction=args.collapse_fraction)
    meta = {
        "n_revivals": len(revivals),
        "first_revival": float(revivals[0]) if len(revivals) else None,
        "envelope_window": args.envelope_window,
        "collapse_fraction": args.collapse_fraction,
    }
    desc = _params_desc(params, theta=args.theta, tmax=args.tmax, dt=args.dt)
    _emit(args, desc, ["revival_index", "revival_time"],
          [[k, t] for k, t in enumerate(revivals)], meta)
    return 0


def cmd_qfi(args) -> int:
    params = _params_from(args)
    if args.sweep_range is not None:
        return cmd_sense(args)
    kappa = args.sweep_axis or "omega"
    f = qfi(params, kappa)
    var = sensitivity_variance(params, kappa)
    results = {
        "kappa": kappa,
        "qfi": f,
        "cr_bound": 1.0 / math.sqrt(f),
        "variance_sq": var,
        "inv_variance_sq": 1.0 / var,
        "coherence": coherence_expectation(eigenvectors_closed_form(params)[2]),
    }
    header = list(results)
    _emit_object(args, _params_desc(params), results, {}, header, [list(results.values())])
    return 0


def cmd_sense(args) -> int:
    kappa = args.sweep_axis
    if kappa is None:
        raise ValidationError("sense requires --sweep-axis j|omega")
    if args.sweep_range is None or args.n is None:
        raise ValidationError("sense requires --sweep-range and --n")
    fixed_value = args.omega if kappa == "j" else args.j
    points = sensing_sweep(kappa, fixed_value, args.sweep_range, args.n, gamma=args.gamma)
    header = [kappa, "qfi", "variance_sq", "inv_variance_sq", "coherence", "cr_bound", "flag"]
    rows = [
        [p.value, p.qfi, p.variance_sq,
         (1.0 / p.variance_sq) if p.variance_sq and not math.isnan(p.variance_sq) else float("nan"),
         p.coherence, p.cr_bound, p.flag]
        for p in points
    ]
    fixed_name = "omega" if kappa == "j" else "j"
    desc = f"kappa={kappa} {fixed_name}={_fmt(fixed_value)} gamma={_fmt(args.gamma)} " \
           f"range={_fmt(args.sweep_range[0])}:{_fmt(args.sweep_range[1])} n={args.n}"
    _emit(args, desc, header, rows,
          {"n_flagged": sum(p.flag is not None for p in points)})
    return 0


# ---------------------------------------------------------------- presets


def _preset_fig2(args):
    omegas = np.linspace(0.0, 3.0, 61)
    js = np.linspace(0.0, 1.2, 61)
    rows = []
    for om in omegas:
        for j in js:
            p = SystemParams(omega=float(om), j=float(j), gamma=1.0)
            try:
                values = eigenvalues_closed_form(p)
            except DegenerateCubicError:
                values = spectrum_oracle(p).eigenvalues
            rows.append([om, j, values[2].real, values[2].imag,
                         values[3].real, values[3].imag])
    header = ["omega", "j", "re_e3", "im_e3", "re_e4", "im_e4"]
    _emit(args, "gamma=1 omega=0:3 j=0:1.2 grid=61x61", header, rows, {})


def _preset_fig3(args, fix: str, fixed_value: float, sweep: tuple, n: int, bracket: tuple):
    point = locate_ep(fix, fixed_value, bracket)
    grid = np.linspace(sweep[0], sweep[1], n)
    rows = []
    for x in grid:
        if fix == "omega":
            p = SystemParams(omega=fixed_value, j=float(x), gamma=1.0)
        else:
            p = SystemParams(omega=float(x), j=fixed_value, gamma=1.0)
        rows.append([x, eigenstate_concurrence_wootters(p, 3),
                     eigenstate_concurrence_wootters(p, 4)])
    axis = "j" if fix == "omega" else "omega"
    header = [axis, "c_psi3", "c_psi4"]
    critical = {"j_c": point.j_c} if fix == "omega" else {"omega_c": point.omega_c}
    desc = f"{fix}={_fmt(fixed_value)} gamma=1 {axis}={_fmt(sweep[0])}:{_fmt(sweep[1])} n={n}"
    _emit(args, desc, header, rows, critical)


def _evolve_columns(runs, t_max, dt, record_every, theta=np.pi / 2):
    series = []
    times = None
    for params in runs:
        traj = propagate(params, initial_state(theta), t_max, dt, record_every=record_every)
        times = traj.times
        series.append(traj.concurrence)
    return times, series


def _preset_fig4(args):
    runs = [SystemParams(2.0, 0.4), SystemParams(2.0, 0.7)]
    times, (c_pts, c_ptb) = _evolve_columns(runs, 40.0, 1e-3, 10)
    rows = list(zip(times, c_pts, c_ptb))
    _emit(args, "gamma=1 theta=pi/2 tmax=40 dt=0.001 pts=(2.0,0.4) ptb=(2.0,0.7)",
          ["t", "concurrence_pts", "concurrence_ptb"], rows, {})


def _preset_fig5(args, fixed: str):
    if fixed == "a":
        runs = [SystemParams(1.7, 0.336), SystemParams(1.7, 0.337)]
        cols = ["concurrence_j0336", "concurrence_j0337"]
        desc = "omega=1.7 gamma=1 j=0.336,0.337 theta=pi/2 tmax=2000 dt=0.005"
    else:
        runs = [SystemParams(1.901, 0.5), SystemParams(1.902, 0.5)]
        cols = ["concurrence_omega1901", "concurrence_omega1902"]
        desc = "j=0.5 gamma=1 omega=1.901,1.902 theta=pi/2 tmax=2000 dt=0.005"
    times, series = _evolve_columns(runs, 2000.0, 5e-3, 4)
    rows = list(zip(times, *series))
    _emit(args, desc, ["t"] + cols, rows, {})


def _preset_fig6(args, gamma: float):
    runs = [SystemParams(1.5, 0.01, gamma)] * 2
    thetas = (np.pi / 2, np.pi / 4)
    series = []
    times = None
    for params, theta in zip(runs, thetas):
        traj = propagate(params, initial_state(theta), 200.0, 1e-3, record_every=10)
        times = traj.times
        series.append(traj.concurrence)
    rows = list(zip(times, *series))
    _emit(args, f"omega=1.5 j=0.01 gamma={_fmt(gamma)} tmax=200 dt=0.001 theta=pi/2,pi/4",
          ["t", "c_theta_pi_2", "c_theta_pi_4"], rows, {})


def _preset_sense(args, kappa, fixed_value, rng, n, fix, bracket):
    point = locate_ep(fix, fixed_value, bracket)
    sense_args = argparse.Namespace(
        sweep_axis=kappa, sweep_range=rng, n=n, omega=fixed_value, j=fixed_value,
        gamma=1.0, format="csv", out=args.out)
    points = sensing_sweep(kappa, fixed_value, rng, n, gamma=1.0)
    header = [kappa, "qfi", "variance_sq", "inv_variance_sq", "coherence", "cr_bound", "flag"]
    rows = [
        [p.value, p.qfi, p.variance_sq,
         (1.0 / p.variance_sq) if p.variance_sq and not math.isnan(p.variance_sq) else float("nan"),
         p.coherence, p.cr_bound, p.flag]
        for p in points
    ]
    fixed_name = "omega" if kappa == "j" else "j"
    critical = {"j_c": point.j_c, "omega_c": point.omega_c}
    desc = f"kappa={kappa} {fixed_name}={_fmt(fixed_value)} gamma=1 " \
           f"range={_fmt(rng[0])}:{_fmt(rng[1])} n={n}"
    _emit(sense_args, desc, header, rows, critical)


PRESETS = {
    "fig2": _preset_fig2,
    "fig3a": lambda a: _preset_fig3(a, "omega", 2.000, (0.30, 0.90), 121, (0.3, 0.9)),
    "fig3b": lambda a: _preset_fig3(a, "j", 0.300, (1.20, 2.20), 201, (1.2, 2.2)),
    "fig4": _preset_fig4,
    "fig5a": lambda a: _preset_fig5(a, "a"),
    "fig5b": lambda a: _preset_fig5(a, "b"),
    "fig6a": lambda a: _preset_fig6(a, 0.0),
    "fig6b": lambda a: _preset_fig6(a, 1.1),
    "fig7a": lambda a: _preset_sense(a, "omega", 0.300, (1.4, 2.0), 601, "j", (1.4, 2.0)),
    "fig7b": lambda a: _preset_sense(a, "j", 2.000, (0.3, 0.9), 601, "omega", (0.3, 0.9)),
    "fig8a": lambda a: _preset_sense(a, "omega", 0.300, (1.4, 2.0), 200, "j", (1.4, 2.0)),
    "fig8b": lambda a: _preset_sense(a, "j", 1.700, (0.25, 0.45), 200, "omega", (0.25, 0.45)),
}


def cmd_reproduce(args) -> int:
    PRESETS[args.preset](args)
    return 0


# ---------------------------------------------------------------- wiring


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ptq-sim",
        description="Gain/loss two-qubit simulator: spectra, critical points, "
                    "entanglement dynamics, parameter sensing.",
    )
    parser.add_argument("--version", action="version", version=f"ptq-sim {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, fmt_default):
        p.add_argument("--omega", type=float, default=0.0)
        p.add_argument("--j", type=float, default=0.0)
        p.add_argument("--gamma", type=float, default=1.0)
        p.add_argument("--sweep-axis", choices=("j", "omega"), default=None)
        p.add_argument("--sweep-range", type=_sweep_range, default=None, metavar="A:B")
        p.add_argument("--n", type=int, default=None)
        p.add_argument("--out", default="-", metavar="PATH")
        p.add_argument("--format", choices=("csv", "json"), default=fmt_default)

    p = sub.add_parser("spectrum", help="eigenvalues, eigenvectors, phase label")
    common(p, "json")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("ep-locate", help="bisect one critical point")
    common(p, "json")
    p.set_defaults(func=cmd_ep_locate)

    p = sub.add_parser("ep-curve", help="critical curve j_c(omega)")
    common(p, "csv")
    p.set_defaults(func=cmd_ep_curve)

    p = sub.add_parser("concurrence", help="eigenstate concurrence (point or sweep)")
    common(p, "json")
    p.set_defaults(func=cmd_concurrence)

    for name, handler, helptext in (
        ("evolve", cmd_evolve, "propagate and record concurrence / coherence"),
        ("revivals", cmd_revivals, "propagate and detect envelope revivals"),
    ):
        p = sub.add_parser(name, help=helptext)
        common(p, "csv")
        p.add_argument("--theta", type=float, default=np.pi / 2)
        p.add_argument("--tmax", type=float, required=True)
        p.add_argument("--dt", type=float, default=1e-3)
        p.add_argument("--record-every", type=int, default=1)
        if name == "revivals":
            p.add_argument("--envelope-window", type=float, default=5.0)
            p.add_argument("--collapse-fraction", type=float, default=0.3)
        p.set_defaults(func=handler)

    p = sub.add_parser("qfi", help="Fisher information at a point (or sweep)")
    common(p, "json")
    p.set_defaults(func=cmd_qfi)

    p = sub.add_parser("sense", help="QFI + coherence-sensitivity sweep")
    common(p, "csv")
    p.set_defaults(func=cmd_sense)

    p = sub.add_parser("reproduce", help="bundled figure-data presets")
    p.add_argument("preset", choices=sorted(PRESETS))
    p.add_argument("--out", default="-", metavar="PATH")
    p.set_defaults(func=cmd_reproduce, format="csv")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValidationError, ValueError) as exc:
        sys.stderr.write(json.dumps(
            {"error": type(exc).__name__, "message": str(exc)}) + "\n")
        return 2
    except NumericalError as exc:
        sys.stderr.write(json.dumps(
            {"error": type(exc).__name__, "message": str(exc)}) + "\n")
        return 3


if __name__ == "__main__":
    sys.exit(main())
