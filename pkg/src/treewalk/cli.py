"""Experiment runner CLI: one subcommand per figure/table family.

Every run is a pure function of its resolved configuration and seed: the
bundle written to disk holds the resolved config, CSV data, SVG plots,
and a manifest.  Re-running with the same seed produces byte-identical
data files regardless of worker count.  ``treewalk verify`` runs the fast
oracle suite and reports one line per check.

Usage::

    treewalk <subcommand> [--config FILE] [--key value]...

The config file is flat ``key = value`` text; command-line flags mirror
every key and take precedence.
"""

from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__, classical, dynamics, ensemble, localdecay, scattering, spectral, svgplot
from .graph import MGT, build_mgt, build_sgt
from .hamiltonian import assemble_h0, disorder_vector
from .numerics import eigh

__all__ = ["main", "run_command", "verify", "ConfigError", "load_config"]

HALF_PI = float(np.pi / 2)


class ConfigError(ValueError):
    """Invalid experiment configuration; the message names the field."""


def _floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(p) for p in str(text).split(",") if p.strip() != "")
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated floats: {text!r}") from exc


def _ints(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(p) for p in str(text).split(",") if p.strip() != "")
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers: {text!r}") from exc


def load_config(path: str | Path) -> dict[str, str]:
    """Parse a flat ``key = value`` config file (blank lines and # comments ok)."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = line.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def _format_value(value) -> str:
    if isinstance(value, (tuple, list)):
        return ",".join(str(v) for v in value)
    return str(value)


def _resolved_config_text(args: argparse.Namespace) -> str:
    skip = {"command", "config", "func"}
    lines = [
        f"{key.replace('_', '-')} = {_format_value(value)}"
        for key, value in sorted(vars(args).items())
        if key not in skip and value is not None
    ]
    return "\n".join(lines) + "\n"


def _git_describe() -> str:
    try:
        out = subprocess.run(
            ["git", "describe", "--always", "--dirty", "--tags"],
            capture_output=True,
            text=True,
            timeout=5,
            cwd=Path(__file__).parent,
        )
        if out.returncode == 0 and out.stdout.strip():
            return out.stdout.strip()
    except OSError:
        pass
    return f"v{__version__}"


class OutputBundle:
    """Collects file payloads in memory, then writes them atomically-ish.

    Nothing touches disk until every result is computed; if a write fails
    midway, the files already written for this run are removed.
    """

    def __init__(self, directory: Path):
        self.directory = Path(directory)
        self.files: dict[str, str] = {}

    def add(self, name: str, text: str):
        self.files[name] = text

    def write(self) -> list[Path]:
        self.directory.mkdir(parents=True, exist_ok=True)
        written: list[Path] = []
        try:
            for name, text in self.files.items():
                path = self.directory / name
                path.write_text(text)
                written.append(path)
        except OSError:
            for path in written:
                path.unlink(missing_ok=True)
            raise
        return written


def _require(condition: bool, message: str):
    if not condition:
        raise ConfigError(message)


def _common_checks(args):
    _require(getattr(args, "seed", None) is not None, "seed is required")
    if hasattr(args, "realizations"):
        reals = args.realizations
        if isinstance(reals, tuple):
            _require(
                len(reals) > 0 and all(r >= 1 for r in reals),
                "realizations must be >= 1",
            )
        else:
            _require(reals >= 1, "realizations must be >= 1")
    if hasattr(args, "w_grid"):
        _require(len(args.w_grid) > 0, "w-grid must be nonempty")
        _require(all(w >= 0 for w in args.w_grid), "w-grid values must be >= 0")


# ---------------------------------------------------------------------------
# experiment runners
# ---------------------------------------------------------------------------


def _run_spectrum(args, bundle: OutputBundle) -> dict:
    closed = spectral.closed_form_spectrum(args.d)
    numerical = eigh(assemble_h0(build_sgt(args.d))).values
    expanded = closed.expand()
    deviation = float(np.abs(expanded - numerical).max())
    lines = ["index,closed_form_E,numerical_E,abs_deviation"]
    for i, (a, b) in enumerate(zip(expanded, numerical)):
        lines.append(f"{i},{float(a)!r},{float(b)!r},{abs(float(a) - float(b))!r}")
    bundle.add("spectrum.csv", "\n".join(lines) + "\n")
    bundle.add(
        "spectrum.svg",
        svgplot.line_plot(
            np.arange(len(expanded)),
            [("closed form", expanded), ("numerical", numerical)],
            title=f"Clean SGT spectrum, d={args.d}",
            xlabel="eigenvalue index",
            ylabel="energy",
        ),
    )
    return {"max_deviation": deviation}


def _run_ipr_phase(args, bundle: OutputBundle) -> dict:
    table = spectral.ipr_phase_diagram(
        args.d,
        args.w_grid,
        delta_e=args.delta_e,
        realizations=args.realizations,
        seed=args.seed,
        gluing=args.gluing,
        workers=args.workers,
    )
    bundle.add("ipr_phase.csv", table.to_csv())
    bundle.add(
        "ipr_phase.svg",
        svgplot.heatmap(
            table.e_centers,
            table.w_values,
            table.mean.T,
            title=f"Averaged IPR, MGT d={args.d}",
            xlabel="energy",
            ylabel="disorder W",
        ),
    )
    return {"shape": [len(table.e_centers), len(table.w_values)]}


def _run_ipr_center(args, bundle: OutputBundle) -> dict:
    reals = args.realizations
    if len(reals) == 1:
        reals = reals * len(args.depths)
    _require(
        len(reals) == len(args.depths),
        "realizations must list one count per depth",
    )
    table = spectral.band_center_ipr_sweep(
        args.depths,
        args.w_grid,
        reals,
        seed=args.seed,
        n_center=args.n_center,
        gluing=args.gluing,
        workers=args.workers,
    )
    crossings = spectral.crossing_points(table)
    bundle.add("ipr_center.csv", table.to_csv())
    lines = ["d1,d2,crossing_W"]
    for (d1, d2), w in sorted(crossings.items()):
        lines.append(f"{d1},{d2},{float(w)!r}")
    bundle.add("crossings.csv", "\n".join(lines) + "\n")
    bundle.add(
        "ipr_center.svg",
        svgplot.line_plot(
            table.w_values,
            [(f"d={d}", table.mean[i]) for i, d in enumerate(table.depths)],
            title="Band-center IPR vs disorder",
            xlabel="disorder W",
            ylabel="mean IPR",
        ),
    )
    return {"crossings": {f"{d1}-{d2}": w for (d1, d2), w in sorted(crossings.items())}}


def _run_dynamics(args, bundle: OutputBundle) -> dict:
    times = dynamics.default_time_grid(args.d, points=args.points)
    phit_series, pcol_series, depth_series = [], [], []
    for w in args.w_grid:
        obs = dynamics.walk_ensemble(
            args.d,
            w,
            args.realizations,
            seed=args.seed,
            times=times,
            workers=args.workers,
        )
        tag = f"w{w:g}"
        for name, label in (("phit", "hit"), ("pcol", "col"), ("depth", "depth")):
            bundle.add(f"{name}_{tag}.csv", obs.to_csv(name))
        phit_series.append((f"W={w:g}", obs.phit_mean))
        pcol_series.append((f"W={w:g}", obs.pcol_mean))
        depth_series.append((f"W={w:g}", obs.depth_mean))
    bundle.add(
        "phit.svg",
        svgplot.line_plot(
            times, phit_series, title=f"Hitting probability, d={args.d}",
            xlabel="time", ylabel="p_hit", ylog=True,
        ),
    )
    bundle.add(
        "pcol.svg",
        svgplot.line_plot(
            times, pcol_series, title=f"Column-space probability, d={args.d}",
            xlabel="time", ylabel="p_col",
        ),
    )
    bundle.add(
        "depth.svg",
        svgplot.line_plot(
            times, depth_series, title=f"Mean depth, d={args.d}",
            xlabel="time", ylabel="depth",
        ),
    )
    return {"t_hit": dynamics.hitting_time_estimate(args.d)}


def _run_local_decay(args, bundle: OutputBundle) -> dict:
    times = dynamics.default_time_grid(args.d, points=args.points)
    phit_series, pcol_series = [], []
    zeros = np.zeros_like(times)
    for w in args.w_grid:
        phit, pcol = localdecay.model_walk_series(args.d, w, times)
        tag = f"w{w:g}"
        bundle.add(f"phit_model_{tag}.csv", dynamics.series_csv(times, phit, zeros, 1, model=True))
        bundle.add(f"pcol_model_{tag}.csv", dynamics.series_csv(times, pcol, zeros, 1, model=True))
        phit_series.append((f"W={w:g}", phit))
        pcol_series.append((f"W={w:g}", pcol))
    bundle.add(
        "phit_model.svg",
        svgplot.line_plot(
            times, phit_series, title=f"Local-decay model p_hit, d={args.d}",
            xlabel="time", ylabel="p_hit", ylog=True,
        ),
    )
    bundle.add(
        "pcol_model.svg",
        svgplot.line_plot(
            times, pcol_series, title=f"Local-decay model p_col, d={args.d}",
            xlabel="time", ylabel="p_col",
        ),
    )
    return {}


def _run_max_depth(args, bundle: OutputBundle) -> dict:
    reals = args.realizations
    if len(reals) == 1:
        reals = reals * len(args.depths)
    _require(len(reals) == len(args.depths), "realizations must list one count per depth")
    table = dynamics.max_depth_sweep(
        args.depths,
        args.w_grid,
        reals,
        seed=args.seed,
        points=args.points,
        workers=args.workers,
    )
    bundle.add("max_depth.csv", table.to_csv())
    bundle.add(
        "max_depth.svg",
        svgplot.line_plot(
            table.w_values,
            [(f"d={d}", table.mean[i]) for i, d in enumerate(table.depths)],
            title="Maximum mean depth vs disorder",
            xlabel="disorder W",
            ylabel="max depth",
        ),
    )
    return {}


def _run_scattering(args, bundle: OutputBundle) -> dict:
    k_grid = (
        np.linspace(0.0, np.pi, args.k_points + 2)[1:-1]
        if args.k_grid is None
        else np.asarray(args.k_grid)
    )
    _require(len(k_grid) > 0, "k-grid must be nonempty")
    _require(all(0 < k < np.pi for k in k_grid), "k-grid values must lie in (0, pi)")
    table = scattering.transmission_sweep(
        args.d,
        k_grid,
        args.w_grid,
        args.realizations,
        seed=args.seed,
        gluing=args.gluing,
        workers=args.workers,
    )
    bundle.add("transmission.csv", table.to_csv())
    bundle.add(
        "transmission.svg",
        svgplot.heatmap(
            table.k_values,
            table.w_values,
            table.mean.T,
            title=f"Transmission, MGT d={args.d}",
            xlabel="momentum k",
            ylabel="disorder W",
        ),
    )
    # Disorder cut at the momentum closest to pi/2, with classical overlays.
    ik = int(np.abs(table.k_values - HALF_PI).argmin())
    w = table.w_values
    bundle.add(
        "transmission_vs_w.svg",
        svgplot.line_plot(
            w,
            [
                (f"quantum k={table.k_values[ik]:.3f}", table.mean[ik]),
                ("fit 0.8/(1+0.2 W^2)", scattering.classical_fit_curve(w)),
                ("diffusive closed form", classical.transmission_vs_disorder(args.d, w)),
            ],
            title=f"Transmission vs disorder, d={args.d}",
            xlabel="disorder W",
            ylabel="T",
        ),
    )
    return {"n_excluded_total": int(table.n_excluded.sum())}


def _run_classical(args, bundle: OutputBundle) -> dict:
    w = np.asarray(args.w_grid, dtype=float)
    tc = classical.transmission_vs_disorder(args.d, w)
    lines = ["W,T_c"]
    for wi, ti in zip(w, tc):
        lines.append(f"{float(wi)!r},{float(ti)!r}")
    bundle.add("classical.csv", "\n".join(lines) + "\n")
    bundle.add(
        "classical.svg",
        svgplot.line_plot(
            w,
            [("T_c", tc)],
            title=f"Classical transmission, d={args.d}",
            xlabel="disorder W",
            ylabel="T_c",
        ),
    )
    return {}


_RUNNERS = {
    "spectrum": _run_spectrum,
    "ipr-phase": _run_ipr_phase,
    "ipr-center": _run_ipr_center,
    "dynamics": _run_dynamics,
    "local-decay": _run_local_decay,
    "max-depth": _run_max_depth,
    "scattering": _run_scattering,
    "classical": _run_classical,
}


def run_command(args: argparse.Namespace) -> Path:
    """Execute one experiment and write its bundle; returns the bundle dir."""
    _common_checks(args)
    bundle = OutputBundle(Path(args.out) / args.command)
    start = time.perf_counter()
    extra = _RUNNERS[args.command](args, bundle)
    wall = time.perf_counter() - start
    bundle.add("config.txt", _resolved_config_text(args))
    manifest = {
        "command": args.command,
        "version": _git_describe(),
        "seed": args.seed,
        "wall_time_s": wall,
        "data_files": sorted(n for n in bundle.files if n.endswith(".csv")),
        **extra,
    }
    bundle.add("manifest.json", json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    bundle.write()
    return bundle.directory


# ---------------------------------------------------------------------------
# verify: fast oracle suite
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CheckResult:
    name: str
    tolerance: float
    deviation: float

    @property
    def passed(self) -> bool:
        return bool(self.deviation <= self.tolerance)


def verify(graph_hook=None, echo=print) -> list[CheckResult]:
    """Run the fast oracle checks and print one pass/fail line per check.

    ``graph_hook`` (tests only) post-processes the clean SGT graph before
    the spectrum check, so a corrupted adjacency fails a named check.
    """
    checks: list[CheckResult] = []

    def record(name, tolerance, deviation):
        checks.append(CheckResult(name, tolerance, float(deviation)))

    # closed-form spectrum against dense diagonalization
    dev = 0.0
    for d in range(1, 7):
        g = build_sgt(d)
        if graph_hook is not None:
            g = graph_hook(g)
        numerical = eigh(assemble_h0(g)).values
        expanded = spectral.closed_form_spectrum(d).expand()
        if len(numerical) != len(expanded):
            dev = np.inf
            break
        dev = max(dev, float(np.abs(numerical - expanded).max()))
    record("sgt-spectrum-closed-form-d1-6", 1e-9, dev)

    # scattering closed forms at k = pi/2
    dev = 0.0
    for d in range(3, 7):
        g = build_mgt(d, gluing="regular")
        t_amp, r_amp = scattering.transmission_amplitudes(
            g, np.zeros(g.n_vertices), HALF_PI
        )
        dev = max(dev, abs(t_amp - scattering.analytic_halfpi_amplitude(d, MGT)))
    record("mgt-halfpi-amplitude-d3-6", 1e-8, dev)

    dev = 0.0
    for d in range(3, 7):
        g = build_sgt(d)
        t_amp, _ = scattering.transmission_amplitudes(g, np.zeros(g.n_vertices), HALF_PI)
        dev = max(dev, abs(t_amp - 1.0))
    record("sgt-halfpi-amplitude-d3-6", 1e-8, dev)

    # plane-wave ansatz against the resolvent, clean MGT
    g = build_mgt(4, gluing="regular")
    zeros = np.zeros(g.n_vertices)
    dev = 0.0
    for k in np.linspace(0.15, np.pi - 0.15, 12):
        t_res, r_res = scattering.transmission_amplitudes(g, zeros, float(k))
        t_ans, r_ans = scattering.clean_transmission_general_k(4, MGT, float(k))
        dev = max(dev, abs(t_res - t_ans), abs(r_res - r_ans))
        dev = max(dev, abs(abs(t_res) ** 2 + abs(r_res) ** 2 - 1.0))
    record("ansatz-vs-resolvent-mgt-d4", 1e-8, dev)

    # classical closed form against the steady-state solve
    rng = np.random.default_rng(20240811)
    dev = 0.0
    for _ in range(20):
        d = int(rng.integers(1, 11))
        lam, lam_left, lam_right = rng.uniform(0.1, 5.0, 3)
        system = classical.build_master(d, lam, lam_left, lam_right, flux_in=1.0)
        p = classical.steady_state(system)
        t_solve = lam_right * p[-1]
        t_closed = classical.analytic_transmission(d, lam, lam_left, lam_right)
        dev = max(dev, abs(t_solve - t_closed))
    record("classical-closed-form-vs-solve", 1e-10, dev)

    # short-time column probability against a small ensemble (2 stderr units)
    d, w, t_probe, n_real = 5, 1.0, 0.3, 200
    g = build_sgt(d)
    times = np.array([0.0, t_probe])
    samples = []
    for r in range(n_real):
        eps = disorder_vector(w, g.n_vertices, ensemble.realization_rng(97, 9, r))
        _, pcol, _ = dynamics.walk_series(g, eps, times, start_column=d)
        samples.append(pcol[-1])
    samples = np.asarray(samples)
    predicted = localdecay.short_time_column_probability(t_probe, w, 2**d)
    stderr = samples.std() / np.sqrt(n_real)
    record(
        "short-time-pcol-2stderr",
        2.0,
        abs(samples.mean() - predicted) / max(stderr, 1e-300),
    )

    for c in checks:
        status = "PASS" if c.passed else "FAIL"
        echo(f"{status}  {c.name}: deviation {c.deviation:.3e} (tolerance {c.tolerance:g})")
    return checks


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="treewalk",
        description="Quantum walks on glued binary trees with static disorder",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    default_out = os.environ.get("TREEWALK_OUTDIR", "treewalk-runs")

    def common(p: argparse.ArgumentParser):
        p.add_argument("--config", help="flat key = value config file")
        p.add_argument("--seed", type=int, default=None, help="master RNG seed (required)")
        p.add_argument("--out", default=default_out, help="output directory")
        p.add_argument("--workers", type=int, default=1, help="realization worker count (0 = all cores)")

    p = sub.add_parser("spectrum", help="closed-form vs numerical clean SGT spectrum")
    common(p)
    p.add_argument("--d", type=int, default=6)

    p = sub.add_parser("ipr-phase", help="IPR phase diagram over (E, W) for the MGT")
    common(p)
    p.add_argument("--d", type=int, default=8)
    p.add_argument("--w-grid", type=_floats, default=(1, 2, 4, 8, 12, 16, 20, 25))
    p.add_argument("--delta-e", type=float, default=0.15)
    p.add_argument("--realizations", type=int, default=500)
    p.add_argument("--gluing", choices=["regular", "random"], default="random")

    p = sub.add_parser("ipr-center", help="band-center IPR vs disorder for several depths")
    common(p)
    p.add_argument("--depths", type=_ints, default=(5, 6, 7, 8))
    p.add_argument("--w-grid", type=_floats, default=(8, 11, 14, 17, 20, 23, 26))
    p.add_argument("--realizations", type=_ints, default=(500, 250, 125, 50))
    p.add_argument("--n-center", type=int, default=100)
    p.add_argument("--gluing", choices=["regular", "random"], default="random")

    p = sub.add_parser("dynamics", help="walk observables vs time, disorder ensemble")
    common(p)
    p.add_argument("--d", type=int, default=10)
    p.add_argument("--w-grid", type=_floats, default=(0, 0.4, 0.8, 1.2))
    p.add_argument("--realizations", type=int, default=10)
    p.add_argument("--points", type=int, default=300)

    p = sub.add_parser("local-decay", help="reduced local-decay model curves")
    common(p)
    p.add_argument("--d", type=int, default=10)
    p.add_argument("--w-grid", type=_floats, default=(0, 0.4, 0.8, 1.2))
    p.add_argument("--points", type=int, default=300)

    p = sub.add_parser("max-depth", help="max mean depth vs disorder")
    common(p)
    p.add_argument("--depths", type=_ints, default=(5, 8))
    p.add_argument("--w-grid", type=_floats, default=(0, 1, 2, 3, 4, 8, 12, 16, 20))
    p.add_argument("--realizations", type=_ints, default=(40, 10))
    p.add_argument("--points", type=int, default=300)

    p = sub.add_parser("scattering", help="transmission over (k, W) for the MGT")
    common(p)
    p.add_argument("--d", type=int, default=5)
    p.add_argument("--k-grid", type=_floats, default=None, help="explicit momenta in (0, pi)")
    p.add_argument("--k-points", type=int, default=24, help="uniform momentum count if no k-grid")
    p.add_argument("--w-grid", type=_floats, default=(0.25, 0.5, 1, 2, 3, 4, 6))
    p.add_argument("--realizations", type=int, default=250)
    p.add_argument("--gluing", choices=["regular", "random"], default="random")

    p = sub.add_parser("classical", help="diffusive transmission closed form vs disorder")
    common(p)
    p.add_argument("--d", type=int, default=7)
    p.add_argument("--w-grid", type=_floats, default=(0, 0.5, 1, 2, 3, 4, 6))

    p = sub.add_parser("verify", help="run the fast oracle suite")
    p.add_argument("--config", help=argparse.SUPPRESS)

    return parser


def _apply_config(parser: argparse.ArgumentParser, command: str, config: dict[str, str]):
    sub_actions = [
        a for a in parser._actions if isinstance(a, argparse._SubParsersAction)
    ]
    subparser = sub_actions[0].choices[command]
    actions = {a.dest: a for a in subparser._actions}
    for key, raw in config.items():
        dest = key.replace("-", "_")
        if dest not in actions:
            raise ConfigError(f"unknown config key for {command}: {key}")
        action = actions[dest]
        try:
            value = action.type(raw) if action.type is not None else raw
        except (argparse.ArgumentTypeError, ValueError) as exc:
            raise ConfigError(f"bad value for {key}: {exc}") from exc
        subparser.set_defaults(**{dest: value})


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "config", None):
            _apply_config(parser, args.command, load_config(args.config))
            args = parser.parse_args(argv)
        if args.command == "verify":
            results = verify()
            return 0 if all(c.passed for c in results) else 1
        out_dir = run_command(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {out_dir}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
