"""Command-line front end: scenario loading, dispatch, CSV/JSON artifacts.

Exit codes: 0 success, 1 validation or verification failure, 2 usage error,
3 solver failure. Errors go to stderr as one JSON object.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import acceptance, serialize
from .analysis import (
    convergence_rate,
    global_stability_experiment,
    perturbation_sweep,
    spectral_gap,
)
from .dynamics import integrate
from .entropy import EntropyKernel, decompose, dissipation
from .equilibrium import equilibrium_homotopy, equilibrium_uniform
from .errors import (
    AsymmetricMutation,
    DimensionMismatch,
    Hypothesis3Violated,
    InnerNoConvergence,
    InsufficientTail,
    KernelMismatch,
    LeftAprioriBox,
    LvmutError,
    NegativeMutation,
    NoConvergence,
    NonFiniteState,
    NonPositivePerron,
    NonPositiveRate,
    NonPositiveReference,
    NotIrreducible,
    NotStationaryReference,
    NotSymmetric,
    OutOfTheoremScope,
    SingularMatrix,
    StepSizeUnderflow,
    TooFewSamples,
    WrongInteractionKind,
    ZeroInitialMass,
    ZeroReference,
)
from .model import (
    Model,
    Perturbed,
    UniformLinear,
    build_model,
    mutation_symmetric,
    uniform_linear,
    validate,
)
from .presets import catalog, get_preset

_TASKS = (
    "validate", "simulate", "equilibrium", "spectrum", "entropy",
    "rates", "stability", "sweep",
)

_USAGE_ERRORS = (
    ValueError, KeyError, OSError, json.JSONDecodeError,
    DimensionMismatch, NonPositiveRate, NegativeMutation, NotSymmetric,
    WrongInteractionKind, NotIrreducible, AsymmetricMutation,
    ZeroInitialMass, NonPositiveReference, ZeroReference,
)
_VALIDATION_ERRORS = (
    Hypothesis3Violated, OutOfTheoremScope, NotStationaryReference,
    KernelMismatch,
)
_SOLVER_ERRORS = (
    NoConvergence, InnerNoConvergence, LeftAprioriBox, StepSizeUnderflow,
    NonFiniteState, SingularMatrix, NonPositivePerron, TooFewSamples,
    InsufficientTail,
)

_FORCE_BANNER = (
    "WARNING: model is outside the supported convergence statements; "
    "results are exploratory"
)


class _UsageAbort(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # keep stderr as a single JSON object: no argparse usage dumps
    def error(self, message):
        raise _UsageAbort(message)


@dataclass
class Job:
    model: Model
    v0: np.ndarray | None
    sampler: dict | None
    t_end: float
    rtol: float
    atol: float
    record_every: float | None
    out_dir: str | None
    preset_name: str | None


def _fail(code: int, kind: str, message: str) -> int:
    sys.stderr.write(serialize.dumps_json({"error": kind, "message": message}))
    return code


def _emit(out_dir: str | None, filename: str, text: str) -> None:
    if out_dir is None:
        sys.stdout.write(text)
        return
    path = Path(out_dir)
    path.mkdir(parents=True, exist_ok=True)
    (path / filename).write_text(text)


def _parse_vector(text: str) -> np.ndarray:
    return np.array([float(x) for x in text.split(",") if x.strip() != ""])


def _parse_matrix(text: str) -> np.ndarray:
    return np.array([[float(x) for x in row.split(",")] for row in text.split(";")])


def _load_scenario(path: str) -> dict:
    obj = json.loads(Path(path).read_text())
    if not isinstance(obj, dict):
        raise ValueError("scenario must be a JSON object")
    if "model" not in obj:
        raise ValueError("missing key 'model' in scenario")
    tasks = obj.get("tasks")
    if tasks is not None:
        if not isinstance(tasks, list) or not tasks:
            raise ValueError("key 'tasks' in scenario must be a nonempty list")
        for task in tasks:
            if task not in _TASKS:
                raise ValueError(f"unknown task {task!r} in scenario key 'tasks'")
    return obj


def _build_job(args) -> Job:
    preset_name = getattr(args, "preset", None)
    scenario_path = getattr(args, "scenario", None)
    if preset_name is None and scenario_path is None:
        raise ValueError("provide --preset <name> or --scenario <file>")

    v0 = None
    sampler = None
    t_end = 50.0
    rtol, atol = 1e-8, 1e-10
    record_every = None
    out_dir = None

    if preset_name is not None:
        preset = get_preset(preset_name)
        model = preset.model
        v0 = preset.v0.copy()
        t_end = preset.t_end
    else:
        obj = _load_scenario(scenario_path)
        model = serialize.model_from_dict(obj["model"])
        initial = obj.get("initial")
        if isinstance(initial, dict):
            for key in ("count", "seed"):
                if key not in initial:
                    raise ValueError(f"missing key {key!r} in scenario key 'initial'")
            sampler = initial
        elif initial is not None:
            v0 = np.asarray(initial, dtype=float)
        t_end = float(obj.get("t_end", t_end))
        rtol = float(obj.get("rtol", rtol))
        atol = float(obj.get("atol", atol))
        if obj.get("record_every") is not None:
            record_every = float(obj["record_every"])
        out_dir = obj.get("outputs")

    for attr, cast in (
        ("t_end", float), ("rtol", float), ("atol", float),
        ("record_every", float),
    ):
        val = getattr(args, attr, None)
        if val is not None:
            if attr == "t_end":
                t_end = cast(val)
            elif attr == "rtol":
                rtol = cast(val)
            elif attr == "atol":
                atol = cast(val)
            else:
                record_every = cast(val)
    if getattr(args, "v0", None) is not None:
        v0 = _parse_vector(args.v0)
    if getattr(args, "out", None) is not None:
        out_dir = args.out
    return Job(model, v0, sampler, t_end, rtol, atol, record_every,
               out_dir, preset_name)


def _require_v0(job: Job) -> np.ndarray:
    if job.v0 is None:
        raise ValueError(
            "this command needs a concrete initial state; samplers only "
            "apply to 'stability'"
        )
    return job.v0


def _solve(model: Model, method: str):
    if method == "perron":
        return equilibrium_uniform(model)
    if method == "homotopy":
        return equilibrium_homotopy(model)
    if isinstance(model.interaction, UniformLinear):
        return equilibrium_uniform(model)
    return equilibrium_homotopy(model)


def _parse_kernel(text: str) -> EntropyKernel:
    if text == "linear":
        return EntropyKernel.linear()
    if text == "quadratic":
        return EntropyKernel.quadratic()
    if text.startswith("poly:"):
        coeffs = [float(x) for x in text[len("poly:"):].split(",")]
        return EntropyKernel.polynomial(coeffs)
    raise ValueError(
        f"unknown kernel {text!r}; expected linear, quadratic, or poly:<coeffs>"
    )


# -- subcommand bodies --------------------------------------------------------

def _cmd_validate(args) -> int:
    job = _build_job(args)
    report = validate(job.model)
    obj = {
        "h1_positivity": report.h1_positivity,
        "h1_symmetry": report.h1_symmetry,
        "h1_irreducible": report.h1_irreducible,
        "h1_monotone": report.h1_monotone,
        "h2_coercive": report.h2_coercive,
        "h3_half": report.h3_half,
        "h4_third": report.h4_third,
        "details": report.details,
    }
    _emit(job.out_dir, "report.json", serialize.dumps_json(obj))
    core = (
        report.h1_positivity and report.h1_symmetry and report.h1_irreducible
        and report.h1_monotone and report.h2_coercive and report.h3_half
    )
    return 0 if core else 1


def _cmd_simulate(args) -> int:
    job = _build_job(args)
    v0 = _require_v0(job)
    traj = integrate(
        job.model, v0, job.t_end, rtol=job.rtol, atol=job.atol,
        record_every=job.record_every,
    )
    _emit(job.out_dir, "trajectory.csv", serialize.trajectory_csv(traj))
    return 0


def _cmd_equilibrium(args) -> int:
    job = _build_job(args)
    result = _solve(job.model, args.method)
    _emit(job.out_dir, "equilibrium.json",
          serialize.dumps_json(serialize.equilibrium_to_dict(result)))
    return 0


def _cmd_spectrum(args) -> int:
    job = _build_job(args)
    eq = _solve(job.model, "auto")
    report = spectral_gap(job.model, eq.v_bar)
    _emit(job.out_dir, "spectrum.json",
          serialize.dumps_json(serialize.spectrum_to_dict(report)))
    return 0


def _cmd_entropy(args) -> int:
    job = _build_job(args)
    kernel = _parse_kernel(args.kernel)
    v0 = _require_v0(job)
    eq = _solve(job.model, "auto")
    traj = integrate(
        job.model, v0, job.t_end, rtol=job.rtol, atol=job.atol,
        record_every=job.record_every,
    )
    reports = [dissipation(job.model, v, eq.v_bar, kernel) for v in traj.states]
    decomps = [decompose(v, eq.v_bar) for v in traj.states]
    _emit(job.out_dir, "entropy.csv",
          serialize.entropy_csv(traj.times, reports, decomps))
    return 0


def _cmd_rates(args) -> int:
    job = _build_job(args)
    v0 = _require_v0(job)
    eq = _solve(job.model, "auto")
    predicted = None
    if mutation_symmetric(job.model):
        predicted = spectral_gap(job.model, eq.v_bar).c1
    traj = integrate(
        job.model, v0, job.t_end, rtol=job.rtol, atol=job.atol,
        record_every=job.record_every,
    )
    report = convergence_rate(
        traj, eq.v_bar, tail_fraction=args.tail, predicted_c1=predicted
    )
    _emit(job.out_dir, "report.json",
          serialize.dumps_json(serialize.rate_to_dict(report)))
    return 0


def _cmd_stability(args) -> int:
    job = _build_job(args)
    n_samples = args.samples
    seed = args.seed
    if job.sampler is not None:
        n_samples = int(job.sampler["count"])
        seed = int(job.sampler["seed"])
    report = global_stability_experiment(
        job.model, n_samples=n_samples, seed=seed, t_end=job.t_end,
        tol=args.tol, force=args.force,
    )
    obj = serialize.stability_to_dict(report)
    if args.force and not report.in_scope:
        obj["warning"] = _FORCE_BANNER
        sys.stderr.write(_FORCE_BANNER + "\n")
    _emit(job.out_dir, "report.json", serialize.dumps_json(obj))
    if job.out_dir is not None:
        rows = [
            [i, *report.endpoints[i]] for i in range(report.endpoints.shape[0])
        ]
        header = ["sample"] + [f"v_{j + 1}" for j in range(job.model.n)]
        _emit(job.out_dir, "report.csv", serialize.table_csv(header, rows))
    return 0


def _cmd_sweep(args) -> int:
    job = _build_job(args)
    model = job.model
    if isinstance(model.interaction, Perturbed):
        amp = model.interaction.amp
        w = model.interaction.w
        base = build_model(
            model.n, model.r, model.big_k, model.mu,
            uniform_linear(model.interaction.base.a),
        )
    else:
        if args.amp is None or args.w is None:
            raise ValueError(
                "sweep on a uniform model needs --amp and --w (or use a "
                "perturbed model)"
            )
        amp = _parse_vector(args.amp)
        w = _parse_matrix(args.w)
        base = model
    eps_grid = [float(x) for x in args.eps.split(",")]
    table = perturbation_sweep(base, amp, w, eps_grid)
    _emit(job.out_dir, "report.json",
          serialize.dumps_json(serialize.sweep_to_dict(table)))
    if job.out_dir is not None:
        _emit(job.out_dir, "report.csv", serialize.sweep_csv(table))
    return 0


def _cmd_verify(args) -> int:
    results = acceptance.run_all(preset_filter=args.preset)
    if not results:
        raise ValueError(f"no acceptance criteria touch preset {args.preset!r}")
    lines = []
    for res in results:
        status = "PASS" if res.passed else "FAIL"
        lines.append(f"criterion {res.number:02d} {res.name}: {status} - {res.detail}")
    text = "\n".join(lines) + "\n"
    sys.stdout.write(text)
    if getattr(args, "out", None):
        obj = {
            "results": [
                {
                    "number": r.number,
                    "name": r.name,
                    "passed": r.passed,
                    "detail": r.detail,
                }
                for r in results
            ],
            "all_passed": all(r.passed for r in results),
        }
        _emit(args.out, "report.json", serialize.dumps_json(obj))
    return 0 if all(r.passed for r in results) else 1


def _cmd_presets(args) -> int:
    entries = catalog()
    if args.json:
        obj = [
            {
                "name": p.name,
                "description": p.description,
                "n": p.model.n,
                "K": p.model.big_k,
                "t_end": p.t_end,
            }
            for p in entries
        ]
        sys.stdout.write(serialize.dumps_json(obj))
    else:
        width = max(len(p.name) for p in entries)
        for p in entries:
            sys.stdout.write(f"{p.name:<{width}}  {p.description}\n")
    return 0


# -- parser -------------------------------------------------------------------

def _add_source_args(sub, with_sim_params=True):
    sub.add_argument("--preset", help="named preset model")
    sub.add_argument("--scenario", help="scenario JSON file")
    sub.add_argument("--out", help="output directory (default: stdout)")
    if with_sim_params:
        sub.add_argument("--v0", help="initial state, comma separated")
        sub.add_argument("--t-end", dest="t_end", type=float)
        sub.add_argument("--rtol", type=float)
        sub.add_argument("--atol", type=float)
        sub.add_argument("--record-every", dest="record_every", type=float)


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="lvmut",
        description="competition dynamics with mutation: simulate, solve, certify",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    sub = subs.add_parser("validate", help="check model hypotheses")
    _add_source_args(sub, with_sim_params=False)
    sub.set_defaults(fn=_cmd_validate)

    sub = subs.add_parser("simulate", help="integrate and write trajectory.csv")
    _add_source_args(sub)
    sub.set_defaults(fn=_cmd_simulate)

    sub = subs.add_parser("equilibrium", help="solve for the stationary state")
    _add_source_args(sub, with_sim_params=False)
    sub.add_argument("--method", choices=("perron", "homotopy", "auto"),
                     default="auto")
    sub.set_defaults(fn=_cmd_equilibrium)

    sub = subs.add_parser("spectrum", help="spectral gap at the equilibrium")
    _add_source_args(sub, with_sim_params=False)
    sub.set_defaults(fn=_cmd_spectrum)

    sub = subs.add_parser("entropy", help="entropy diagnostics along a trajectory")
    _add_source_args(sub)
    sub.add_argument("--kernel", required=True,
                     help="linear | quadratic | poly:<c0,c1,...>")
    sub.set_defaults(fn=_cmd_entropy)

    sub = subs.add_parser("rates", help="fit tail decay rates")
    _add_source_args(sub)
    sub.add_argument("--tail", type=float, default=0.5)
    sub.set_defaults(fn=_cmd_rates)

    sub = subs.add_parser("stability", help="random-start convergence experiment")
    _add_source_args(sub)
    sub.add_argument("--samples", type=int, default=20)
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--tol", type=float, default=1e-6)
    sub.add_argument("--force", action="store_true",
                     help="run outside the supported scope, with a warning")
    sub.set_defaults(fn=_cmd_stability)

    sub = subs.add_parser("sweep", help="equilibrium displacement vs eps")
    _add_source_args(sub, with_sim_params=False)
    sub.add_argument("--eps", default="1e-4,4e-4,1.6e-3,6.4e-3",
                     help="comma-separated ascending grid")
    sub.add_argument("--amp", help="perturbation amplitudes, comma separated")
    sub.add_argument("--w", help="perturbation weights, rows ; separated")
    sub.set_defaults(fn=_cmd_sweep)

    sub = subs.add_parser("verify", help="run the acceptance criteria")
    sub.add_argument("--preset", help="only criteria touching this preset")
    sub.add_argument("--out", help="also write report.json here")
    sub.set_defaults(fn=_cmd_verify)

    sub = subs.add_parser("presets", help="list named models")
    sub.add_argument("--json", action="store_true")
    sub.set_defaults(fn=_cmd_presets)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageAbort as exc:
        return _fail(2, "UsageError", str(exc))
    except SystemExit as exc:
        # argparse exits directly only for --help and friends
        if exc.code in (0, None):
            return 0
        return _fail(2, "UsageError", "invalid command line; see --help")
    try:
        return args.fn(args)
    except _VALIDATION_ERRORS as exc:
        return _fail(1, type(exc).__name__, str(exc))
    except _SOLVER_ERRORS as exc:
        return _fail(3, type(exc).__name__, str(exc))
    except _USAGE_ERRORS as exc:
        return _fail(2, type(exc).__name__, str(exc))
    except LvmutError as exc:
        return _fail(3, type(exc).__name__, str(exc))


if __name__ == "__main__":
    raise SystemExit(main())
