"""End-to-end reconstruction and the Monte Carlo experiment harness.

Sub-seeds: trial ``i`` of cell ``(d, n)`` draws its cloud from
``numpy.random.SeedSequence([master_seed, d, n, i])``, so a trial's result
does not depend on which other cells or trials run, or in what order.
"""

from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
from scipy.spatial import cKDTree

from . import curve as _curve
from . import density as _density
from . import metrics as _metrics
from . import solver as _solver
from .errors import ReconstructionError
from .sampler import NoiseModel, sample_cloud
from .signal_model import PeriodicSignal, make_chirp_like, sine

METRICS = ("eps_T", "eps_2", "eps_inf", "density_err")
RESULT_COLUMNS = ("d", "n", "trial", "seed", "sigma", "delta", "radius", "tau", "T_true",
                  "T_est", "x0", "orientation", "nodes") + METRICS + ("failure_stage", "failure")
BOX_STATS = ("min", "q1", "median", "q3", "max")


@dataclass
class ReconstructOptions:
    grid: int = _density.DEFAULT_GRID
    coarse_grid: int = _solver.COARSE_GRID
    quadrature_points: int = _solver.QUADRATURE_POINTS
    output_resolution: int = 4096


def _stage(name, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except ReconstructionError as exc:
        exc.stage = name
        exc.args = (f"[{name}] {exc.args[0] if exc.args else ''}",)
        raise


def reconstruct_from_chain(cloud, chain, radius: float,
                           options: ReconstructOptions | None = None):
    """Stages after chain building: spline, density, offset, assembly."""
    opts = options or ReconstructOptions()
    curve = _stage("curve", _curve.fit_closed_curve, chain)
    profile = _stage("density", _density.estimate_density, cloud, curve, chain, radius)
    warped = _stage("density", _density.invert_density, profile, curve, opts.grid)
    offset = _stage("offset", _solver.find_offset, warped, opts.coarse_grid,
                    opts.quadrature_points)
    result = _solver.assemble_signal(warped, offset, cloud.tau, opts.output_resolution)
    result.metadata.update(radius=radius, d=cloud.dim, n=cloud.n, tau=cloud.tau,
                           seed=cloud.seed, nodes=len(chain.nodes) - 1)
    result.chain = chain
    result.profile = profile
    return result


def reconstruct(cloud, radius: float, options: ReconstructOptions | None = None):
    """Signal and period estimates from a cloud of sample trains.

    Runs chain building, spline fitting, density estimation and inversion,
    offset search and signal assembly.  Stage failures propagate unchanged
    apart from a ``stage`` attribute (``"curve"``, ``"density"`` or
    ``"offset"``) and a matching message prefix.
    """
    chain = _stage("curve", _curve.build_chain, cloud, radius)
    return reconstruct_from_chain(cloud, chain, radius, options)


def pushforward_density(signal: PeriodicSignal, tau: float, d: int,
                        grid: int = 1 << 16) -> tuple[np.ndarray, np.ndarray]:
    """Dense samples of the train curve and the arc-length density there.

    A uniformly distributed start time induces density ``1 / (T |samp'(t)|)``
    per unit arc length; ``samp'`` is taken by central differences on the grid.
    """
    t = np.arange(grid) * (signal.period / grid)
    h = signal.period / grid
    pts = signal.evaluate(t[:, None] + tau * np.arange(d))
    fwd = signal.evaluate(t[:, None] + h / 2 + tau * np.arange(d))
    bwd = signal.evaluate(t[:, None] - h / 2 + tau * np.arange(d))
    speed = np.linalg.norm(fwd - bwd, axis=1) / h
    return pts, 1.0 / (signal.period * speed)


def density_error(signal: PeriodicSignal, tau: float, chain, profile) -> float:
    """Relative RMS error of the estimated density at the chain nodes."""
    pts, dens = pushforward_density(signal, tau, chain.dim)
    _, idx = cKDTree(pts).query(chain.distinct_nodes)
    truth = dens[idx]
    return float(np.sqrt(np.mean(((profile.values - truth) / truth) ** 2)))


def signal_from_spec(spec) -> PeriodicSignal:
    """Signal from a JSON-style document or a builtin name.

    Builtins: ``{"type": "chirp-like", "period": T}`` and
    ``{"type": "sine", "period": T, "amplitude": A}``.
    """
    if isinstance(spec, PeriodicSignal):
        return spec
    if isinstance(spec, str):
        spec = {"type": spec}
    kind = spec.get("type")
    period = float(spec.get("period", 1.0))
    if kind == "chirp-like":
        return make_chirp_like(period)
    if kind == "sine":
        return sine(period, float(spec.get("amplitude", 1.0)))
    return PeriodicSignal.from_dict(spec)


@dataclass
class ExperimentConfig:
    """Parameters of a Monte Carlo sweep over ``(d, n)`` cells.

    ``radius_rule`` is ``"absolute"`` (R = ``radius``), ``"sigma"``
    (R = ``radius * sigma``) or ``"delta"`` (R = ``radius * quantization``).
    """

    signal: dict = field(default_factory=lambda: {"type": "chirp-like", "period": 1.0})
    tau_ratio: float = 0.39
    d_values: list = field(default_factory=lambda: [3, 4])
    n_values: list = field(default_factory=lambda: [1000, 4000, 16000])
    sigma: float = 0.02
    quantization: float = 0.0
    noise_profile: str = "gaussian-isotropic"
    radius_rule: str = "sigma"
    radius: float = 5.0
    trials: int = 100
    master_seed: int = 0
    workers: int = 1
    results_path: str | None = None
    summary_path: str | None = None

    def __post_init__(self):
        if not 0 < self.tau_ratio < 0.5:
            raise ValueError("tau_ratio must lie in (0, 1/2)")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if not self.d_values or not self.n_values:
            raise ValueError("d_values and n_values must be non-empty")
        if self.radius_rule not in ("absolute", "sigma", "delta"):
            raise ValueError(f"unknown radius_rule {self.radius_rule!r}")
        if self.radius_value() <= 0:
            raise ValueError("the radius rule gives a non-positive radius")

    def radius_value(self) -> float:
        scale = {"absolute": 1.0, "sigma": self.sigma, "delta": self.quantization}
        return self.radius * scale[self.radius_rule]

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, doc: dict) -> "ExperimentConfig":
        return cls(**doc)

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        return cls.from_dict(json.loads(Path(path).read_text()))


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def run_trial(config: ExperimentConfig, d: int, n: int, trial: int) -> dict:
    """One cell trial as a results row; failures become rows, never exceptions."""
    signal = signal_from_spec(config.signal)
    tau = config.tau_ratio * signal.period
    radius = config.radius_value()
    row = dict.fromkeys(RESULT_COLUMNS)
    row.update(d=d, n=n, trial=trial, seed=f"{config.master_seed}-{d}-{n}-{trial}",
               sigma=config.sigma, delta=config.quantization, radius=radius, tau=tau,
               T_true=signal.period)
    seed = np.random.SeedSequence([config.master_seed, d, n, trial])
    cloud = sample_cloud(signal, tau, d, n, NoiseModel(config.sigma, config.noise_profile),
                         config.quantization, seed)
    try:
        res = reconstruct(cloud, radius)
    except ReconstructionError as exc:
        row.update(failure_stage=exc.stage or "unknown", failure=type(exc).__name__)
        return row
    report = _metrics.evaluate(signal, res.signal_estimate, signal.period, res.period_estimate)
    row.update(T_est=res.period_estimate, x0=res.offset.x0,
               orientation=res.offset.orientation, nodes=res.metadata["nodes"],
               eps_T=report.eps_T, eps_2=report.eps_2, eps_inf=report.eps_inf,
               density_err=density_error(signal, tau, res.chain, res.profile))
    return row


def _run_trial_args(args):
    return run_trial(*args)


def summarize(rows: list[dict]) -> list[dict]:
    """Per-cell five-number summaries over successful trials."""
    cells: dict[tuple, list[dict]] = {}
    for row in rows:
        cells.setdefault((row["d"], row["n"]), []).append(row)
    out = []
    for (d, n), cell in cells.items():
        ok = [r for r in cell if not r["failure_stage"]]
        summary = {"d": d, "n": n, "trials": len(cell), "failures": len(cell) - len(ok)}
        for metric in METRICS:
            vals = np.array([r[metric] for r in ok], dtype=float)
            stats = (np.percentile(vals, [0, 25, 50, 75, 100]) if len(vals)
                     else [None] * 5)
            for name, v in zip(BOX_STATS, stats):
                summary[f"{metric}_{name}"] = v
        out.append(summary)
    return out


def rows_to_csv(rows: list[dict], columns=None) -> str:
    columns = list(columns or (rows[0] if rows else RESULT_COLUMNS))
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(row.get(c)) for c in columns])
    return buf.getvalue()


@dataclass
class ExperimentResults:
    rows: list[dict]
    summary: list[dict]

    def results_csv(self) -> str:
        return rows_to_csv(self.rows, RESULT_COLUMNS)

    def summary_csv(self) -> str:
        return rows_to_csv(self.summary)


def run_experiment(config: ExperimentConfig) -> ExperimentResults:
    """Run every trial of every ``(d, n)`` cell and collect metrics.

    Rows come back ordered by ``(d, n, trial)`` whatever ``config.workers``
    is.  When ``results_path`` / ``summary_path`` are set the CSVs are
    written there as well.
    """
    jobs = [(config, d, n, i) for d in config.d_values for n in config.n_values
            for i in range(config.trials)]
    if config.workers > 1:
        with ProcessPoolExecutor(config.workers) as pool:
            rows = list(pool.map(_run_trial_args, jobs))
    else:
        rows = [_run_trial_args(job) for job in jobs]
    results = ExperimentResults(rows, summarize(rows))
    if config.results_path:
        Path(config.results_path).write_text(results.results_csv())
    if config.summary_path:
        Path(config.summary_path).write_text(results.summary_csv())
    return results


def read_results(path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def box_columns(rows: list[dict], metric: str) -> dict[str, list[float]]:
    """Values of ``metric`` per cell, keyed ``"d=<d> n=<n>"``, failures skipped."""
    out: dict[str, list[float]] = {}
    for row in rows:
        key = f"d={row['d']} n={row['n']}"
        out.setdefault(key, [])
        if row.get("failure_stage") in ("", None) and row.get(metric) not in ("", None):
            out[key].append(float(row[metric]))
    return out


def box_columns_csv(rows: list[dict], metric: str) -> str:
    """Wide CSV with one column per cell, ragged columns padded with blanks."""
    cols = box_columns(rows, metric)
    names = list(cols)
    depth = max((len(v) for v in cols.values()), default=0)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(names)
    for i in range(depth):
        writer.writerow([_fmt(cols[k][i]) if i < len(cols[k]) else "" for k in names])
    return buf.getvalue()
