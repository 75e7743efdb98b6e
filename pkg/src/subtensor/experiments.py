"""Monte-Carlo harness for desk-scale checks of the ground-state, algorithmic
and overlap-gap statements.

Every experiment takes an :class:`ExperimentConfig`, returns ``(records,
summary)`` and can be written to CSV plus a JSON summary.  Trial ``i`` of
experiment ``name`` uses the seed ``derive_seed(master_seed, tag(name), i)``
where ``tag`` is the CRC-32 of the experiment name, so any trial can be
replayed on its own.  Trials run on a thread pool but results are always
collected in trial order, so the thread count never changes output bytes.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import itertools
import json
import math
import os
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Iterable, Sequence

import numpy as np

from .algorithms import (
    DEFAULT_ENUM_BUDGET,
    all_subtensor_sums,
    brute_force_max,
    igpt,
    local_search,
)
from .errors import BudgetExceeded, InvalidParam
from .rtensor import (
    DEFAULT_DENSE_CAP,
    DEFAULT_EVAL_BUDGET,
    MultiIndex,
    derive_seed,
    generate_tensor,
    interpolate,
)
from .theory import (
    BoundReport,
    ProblemParams,
    bivariate_tail_upper,
    borell_tis_two_sided,
    build_covariance_model,
    e_max,
    gaussian_tail_bounds,
    igp_informal_estimate,
    igpt_expected_average,
    igpt_guarantee_ratio,
    mvn_tail_bounds,
)

EXPERIMENTS = ("ground-state", "igpt-ratio", "concentration", "ogp-scan", "tail-validate")


def _fmt(x) -> str:
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


# ---------------------------------------------------------------------------
# configuration


@dataclass
class ExperimentConfig:
    """Flat parameter grid for one experiment.

    List-valued fields are swept as a Cartesian grid over ``(n, k, p)``;
    ``taus`` is the interpolation grid for the overlap scan.
    """

    name: str = "ground-state"
    n: list[int] = field(default_factory=lambda: [12])
    k: list[int] = field(default_factory=lambda: [2])
    p: list[int] = field(default_factory=lambda: [2])
    trials: int = 10
    master_seed: int = 0
    backend: str = "auto"
    epsilon: list[float] = field(default_factory=lambda: [0.3])
    # overlap scan
    gamma: float = 0.6
    m: int = 2
    nu1: float = 0.6
    nu2: float = 0.9
    taus: list[float] = field(default_factory=lambda: [0.0])
    tuple_budget: int = 10**6
    restarts: int = 200
    # concentration: deviations u expressed in units of k^(-p/2)
    u_scaled: list[float] = field(default_factory=lambda: [0.0, 0.5, 1.0, 1.5, 2.0, 3.0])
    # tail validation
    x_grid: list[float] = field(default_factory=lambda: [0.5 * i for i in range(1, 17)])
    rho: list[float] = field(default_factory=lambda: [0.0, 0.3, 0.5, 0.8])
    u: list[float] = field(default_factory=lambda: [1.0, 1.5, 2.0])
    mc_samples: int = 10**6
    mvn_dims: list[int] = field(default_factory=lambda: [2, 3])
    mvn_p: int = 10
    mvn_t: float = 2.0
    # budgets
    enum_budget: int = DEFAULT_ENUM_BUDGET
    eval_budget: int = DEFAULT_EVAL_BUDGET
    dense_cap: int = DEFAULT_DENSE_CAP

    def grid(self) -> list[tuple[int, int, int]]:
        return list(itertools.product(self.n, self.k, self.p))

    def validate(self) -> None:
        if self.name not in EXPERIMENTS:
            raise InvalidParam(f"unknown experiment {self.name!r}")
        if self.trials < 1:
            raise InvalidParam("trials must be >= 1")
        if any(not 0.0 <= t <= math.pi / 2 for t in self.taus):
            raise InvalidParam("taus must lie in [0, pi/2]")

    def to_text(self) -> str:
        lines = []
        for f in dataclasses.fields(self):
            v = getattr(self, f.name)
            if isinstance(v, list):
                v = ",".join(_fmt(x) for x in v)
            lines.append(f"{f.name} = {_fmt(v)}")
        return "\n".join(lines) + "\n"


_CASTS: dict[str, Callable[[str], Any]] = {}


def _caster(f: dataclasses.Field) -> Callable[[str], Any]:
    default = f.default_factory() if f.default_factory is not dataclasses.MISSING else f.default
    if isinstance(default, list):
        elem = float if isinstance(default[0], float) else int
        return lambda s: [elem(x) for x in s.split(",") if x.strip()]
    if isinstance(default, bool):
        return lambda s: s.lower() in ("1", "true", "yes")
    if isinstance(default, int):
        return lambda s: int(float(s)) if "e" in s.lower() else int(s)
    if isinstance(default, float):
        return float
    return str


for _f in dataclasses.fields(ExperimentConfig):
    _CASTS[_f.name] = _caster(_f)


def parse_config_text(text: str, base: ExperimentConfig | None = None) -> ExperimentConfig:
    """Parse ``key = value`` lines (``#`` comments) on top of ``base``."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidParam(f"line {lineno}: expected 'key = value'")
        key, val = (s.strip() for s in line.split("=", 1))
        values[key] = val
    return apply_overrides(base or ExperimentConfig(), values)


def apply_overrides(cfg: ExperimentConfig, values: dict[str, str]) -> ExperimentConfig:
    updates = {}
    for key, val in values.items():
        name = key.replace("-", "_")
        if name not in _CASTS:
            raise InvalidParam(f"unknown config key {key!r}")
        try:
            updates[name] = _CASTS[name](val)
        except ValueError as exc:
            raise InvalidParam(f"bad value for {key!r}: {val!r}") from exc
    return dataclasses.replace(cfg, **updates)


def load_config(path) -> ExperimentConfig:
    return parse_config_text(Path(path).read_text())


# ---------------------------------------------------------------------------
# records


@dataclass
class TrialRecord:
    experiment: str
    trial_index: int
    n: int
    k: int
    p: int
    master_seed: int
    trial_seed: int
    algorithm: str
    value_sum: float
    value_average: float
    e_max: float
    ratio: float
    wall_nanos: int = 0

    @property
    def degenerate(self) -> bool:
        return self.e_max == 0.0


TRIAL_FIELDS = [f.name for f in dataclasses.fields(TrialRecord) if f.name != "wall_nanos"]


@dataclass
class OverlapScanRecord:
    assignment: int
    tuple_index: int
    taus: tuple[float, ...]
    gamma: float
    overlaps: dict[tuple[int, int], tuple[float, ...]]  # (i, j) -> a_q / k per axis
    averages: tuple[float, ...]
    qualifies: bool
    band_hit: bool

    def row(self) -> list[str]:
        ov = ";".join(
            f"{i + 1}-{j + 1}:" + "|".join(_fmt(x) for x in v) for (i, j), v in self.overlaps.items()
        )
        return [
            str(self.assignment),
            str(self.tuple_index),
            ";".join(_fmt(t) for t in self.taus),
            _fmt(self.gamma),
            ov,
            ";".join(_fmt(a) for a in self.averages),
            str(int(self.qualifies)),
            str(int(self.band_hit)),
        ]


SCAN_FIELDS = ["assignment", "tuple_index", "taus", "gamma", "overlaps", "averages", "qualifies", "band_hit"]
REPORT_FIELDS = ["name", "inputs", "lower", "upper", "exact_or_mc", "satisfied", "precondition", "note"]


def _report_row(r: BoundReport) -> list[str]:
    def num(x):
        return "" if x is None else _fmt(float(x))

    return [
        r.name,
        json.dumps(r.inputs, sort_keys=True),
        num(r.lower),
        num(r.upper),
        num(r.exact_or_mc),
        str(int(bool(r.satisfied))),
        str(int(bool(r.precondition))),
        r.note,
    ]


def records_to_csv(records: Sequence, include_timing: bool = False) -> str:
    """Serialize records; wall-clock timings are excluded unless requested."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if not records:
        return ""
    first = records[0]
    if isinstance(first, TrialRecord):
        fields = TRIAL_FIELDS + (["wall_nanos"] if include_timing else [])
        w.writerow(fields)
        for r in records:
            w.writerow([_fmt(getattr(r, f)) for f in fields])
    elif isinstance(first, OverlapScanRecord):
        w.writerow(SCAN_FIELDS)
        for r in records:
            w.writerow(r.row())
    elif isinstance(first, BoundReport):
        w.writerow(REPORT_FIELDS)
        for r in records:
            w.writerow(_report_row(r))
    else:
        raise TypeError(f"cannot serialize {type(first).__name__}")
    return buf.getvalue()


def read_trial_csv(path_or_text) -> list[TrialRecord]:
    text = path_or_text
    if isinstance(path_or_text, Path) or (isinstance(path_or_text, str) and "\n" not in path_or_text):
        text = Path(path_or_text).read_text()
    out = []
    for row in csv.DictReader(io.StringIO(text)):
        out.append(
            TrialRecord(
                experiment=row["experiment"],
                trial_index=int(row["trial_index"]),
                n=int(row["n"]),
                k=int(row["k"]),
                p=int(row["p"]),
                master_seed=int(row["master_seed"]),
                trial_seed=int(row["trial_seed"]),
                algorithm=row["algorithm"],
                value_sum=float(row["value_sum"]),
                value_average=float(row["value_average"]),
                e_max=float(row["e_max"]),
                ratio=float(row["ratio"]),
                wall_nanos=int(row.get("wall_nanos") or 0),
            )
        )
    return out


# ---------------------------------------------------------------------------
# execution helpers


def experiment_tag(name: str) -> int:
    return zlib.crc32(name.encode())


def trial_seed(master_seed: int, name: str, trial_index: int) -> int:
    return derive_seed(master_seed, experiment_tag(name), trial_index)


def _pool_map(fn: Callable, items: Iterable, threads: int | None) -> list:
    items = list(items)
    threads = threads or os.cpu_count() or 1
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _trial_record(cfg, name, idx, n, k, p, seed, res) -> TrialRecord:
    em = e_max(ProblemParams(n, k, p))
    ratio = res.value_average / em if em > 0 else math.nan
    return TrialRecord(
        name, idx, n, k, p, cfg.master_seed, seed, res.algorithm,
        res.value_sum, res.value_average, em, ratio, res.stats.wall_nanos,
    )


def _sd(xs: np.ndarray) -> float:
    return float(np.std(xs, ddof=1)) if len(xs) > 1 else 0.0


def _run_trials(cfg, name, solver, threads) -> tuple[list[TrialRecord], list[dict]]:
    records: list[TrialRecord] = []
    errors = []
    for n, k, p in cfg.grid():

        def one(i, n=n, k=k, p=p):
            seed = trial_seed(cfg.master_seed, name, i)
            return _trial_record(cfg, name, i, n, k, p, seed, solver(cfg, n, k, p, seed))

        try:
            records += _pool_map(one, range(cfg.trials), threads)
        except BudgetExceeded as exc:
            errors.append({"n": n, "k": k, "p": p, "error": "BudgetExceeded", "message": str(exc)})
    return records, errors


def _group(records: Sequence[TrialRecord]) -> dict[tuple[int, int, int], list[TrialRecord]]:
    out: dict[tuple[int, int, int], list[TrialRecord]] = {}
    for r in records:
        out.setdefault((r.n, r.k, r.p), []).append(r)
    return out


# ---------------------------------------------------------------------------
# ground state


def _brute(cfg, n, k, p, seed):
    t = generate_tensor(n, p, k, seed, "dense", cfg.dense_cap)
    return brute_force_max(t, k, cfg.enum_budget)


def summarize_ground_state(records: Sequence[TrialRecord], epsilons: Sequence[float]) -> list[dict]:
    out = []
    for (n, k, p), rs in _group(records).items():
        good = [r for r in rs if not r.degenerate]
        entry: dict[str, Any] = {"n": n, "k": k, "p": p, "trials": len(rs), "excluded": len(rs) - len(good)}
        if good:
            ratio = np.array([r.ratio for r in good])
            vals = np.array([r.value_average for r in good])
            em = good[0].e_max
            entry.update(
                e_max=em,
                mean_ratio=float(ratio.mean()),
                sd_ratio=_sd(ratio),
                frac_below_emax=float(np.mean(vals <= em)),
                frac_above={repr(float(e)): float(np.mean(vals >= (1 - e) * em)) for e in epsilons},
            )
        out.append(entry)
    return out


def run_ground_state(cfg: ExperimentConfig, threads: int | None = None):
    """Exact ground states M* against E_max on every grid point."""
    records, errors = _run_trials(cfg, "ground-state", _brute, threads)
    summary = {"experiment": "ground-state", "grid": summarize_ground_state(records, cfg.epsilon), "errors": errors}
    return records, summary


# ---------------------------------------------------------------------------
# igpt ratio


def _igpt(cfg, n, k, p, seed):
    backend = "implicit" if cfg.backend == "auto" else cfg.backend
    t = generate_tensor(n, p, k, seed, backend, cfg.dense_cap)
    return igpt(t, k, cfg.eval_budget)


def summarize_igpt_ratio(records: Sequence[TrialRecord]) -> list[dict]:
    out = []
    for (n, k, p), rs in _group(records).items():
        ratio = np.array([r.ratio for r in rs if not r.degenerate])
        target = igpt_guarantee_ratio(p)
        em = rs[0].e_max
        entry = {
            "n": n, "k": k, "p": p, "trials": len(rs),
            "mean_ratio": float(ratio.mean()) if len(ratio) else math.nan,
            "sd_ratio": _sd(ratio),
            "guarantee_ratio": target,
            "relative_deviation": float(ratio.mean() / target - 1.0) if len(ratio) else math.nan,
            "finite_size_ratio": igpt_expected_average(n, k, p) / em if em > 0 else math.nan,
            "predicted_average": target * em,
        }
        if p == 2:
            informal = igp_informal_estimate(n, k)
            entry["informal_igp_estimate"] = informal
            entry["informal_over_predicted"] = informal / (target * em) if em > 0 else math.nan
        out.append(entry)
    return out


def run_igpt_ratio(cfg: ExperimentConfig, threads: int | None = None):
    """IGPT average over E_max against 2 sqrt(p) / (p + 1)."""
    records, errors = _run_trials(cfg, "igpt-ratio", _igpt, threads)
    return records, {"experiment": "igpt-ratio", "grid": summarize_igpt_ratio(records), "errors": errors}


# ---------------------------------------------------------------------------
# concentration


def concentration_reports(records: Sequence[TrialRecord], u_scaled: Sequence[float]) -> list[BoundReport]:
    """Empirical P[|M* - mean| > u] against 2 exp(-u^2 k^p / 2) + 3 binomial sigma."""
    reports = []
    for (n, k, p), rs in _group(records).items():
        vals = np.array([r.value_average for r in rs])
        mean = float(vals.mean())
        scale = float(k) ** (-p / 2.0)
        for us in u_scaled:
            u = us * scale
            emp = float(np.mean(np.abs(vals - mean) > u))
            bound = borell_tis_two_sided(u, k, p)
            q = min(bound, 1.0)
            sigma = math.sqrt(q * (1.0 - q) / len(vals))
            reports.append(
                BoundReport(
                    "borell_tis_two_sided",
                    {"n": n, "k": k, "p": p, "u": u, "u_scaled": us, "trials": len(vals), "sample_mean": mean},
                    upper=bound + 3.0 * sigma,
                    exact_or_mc=emp,
                    note=f"bound={_fmt(bound)} sigma={_fmt(sigma)}",
                )
            )
    return reports


def run_concentration(cfg: ExperimentConfig, threads: int | None = None):
    records, errors = _run_trials(cfg, "concentration", _brute, threads)
    reports = concentration_reports(records, cfg.u_scaled)
    summary = {
        "experiment": "concentration",
        "reports": [r.to_dict() for r in reports],
        "all_satisfied": all(r.satisfied for r in reports),
        "errors": errors,
    }
    return records, summary


# ---------------------------------------------------------------------------
# overlap-gap scan


@dataclass
class _Qualifiers:
    indicators: np.ndarray  # (count, p, N) boolean membership
    averages: np.ndarray
    exhaustive: bool


def _qualifiers_enumerated(t, k, threshold, budget) -> _Qualifiers:
    sums, combos = all_subtensor_sums(t, k, budget)
    avgs = sums / float(k) ** t.order_p
    hits = np.argwhere(avgs >= threshold)  # C-order: lexicographic in subset ranks
    ind = np.zeros((len(hits), t.order_p, t.dim_n), dtype=bool)
    for q in range(t.order_p):
        rows = combos[hits[:, q]] if len(hits) else np.zeros((0, k), dtype=np.int64)
        np.put_along_axis(ind[:, q, :], rows, True, axis=1)
    return _Qualifiers(ind, avgs[tuple(hits.T)] if len(hits) else np.zeros(0), True)


def _qualifiers_sampled(t, k, threshold, restarts, seed, budget) -> _Qualifiers:
    found: dict[MultiIndex, float] = {}
    for r in range(restarts):
        res = local_search(t, k, seed=derive_seed(seed, r), budget=budget)
        if res.value_average >= threshold:
            found.setdefault(res.solution, res.value_average)
    keys = sorted(found, key=lambda mi: mi.subsets)
    ind = np.zeros((len(keys), t.order_p, t.dim_n), dtype=bool)
    for a, mi in enumerate(keys):
        for q, s in enumerate(mi.zero_based()):
            ind[a, q, s] = True
    return _Qualifiers(ind, np.array([found[mi] for mi in keys]), False)


def _tuples(sizes: Sequence[int], budget: int, seed: int) -> np.ndarray:
    total = math.prod(sizes)
    if total == 0:
        return np.zeros((0, len(sizes)), dtype=np.int64)
    if total <= budget:
        grids = np.meshgrid(*[np.arange(s) for s in sizes], indexing="ij")
        return np.stack([g.ravel() for g in grids], axis=1)
    rng = np.random.default_rng(seed)
    return np.stack([rng.integers(0, s, size=budget) for s in sizes], axis=1)


def run_ogp_scan(cfg: ExperimentConfig, threads: int | None = None):
    """Pairwise overlaps of m-tuples of solutions above gamma * E_max.

    Solution ``l`` of a tuple is taken from the interpolated tensor
    ``cos(tau_l) A0 + sin(tau_l) A_l``.  The scan reports the overlap
    histogram and how many tuples land in the ``[nu1, nu2]`` band on every
    axis; a non-zero band count means the overlap gap is absent at this size.
    """
    name = "ogp-scan"
    n, k, p = cfg.grid()[0]
    m, gamma = cfg.m, cfg.gamma
    em = e_max(ProblemParams(n, k, p))
    threshold = gamma * em
    tag = experiment_tag(name)
    base_seed = derive_seed(cfg.master_seed, tag, 0)
    fresh = [derive_seed(cfg.master_seed, tag, ell) for ell in range(1, m + 1)]
    in_definition = 0.5 < cfg.nu1 < cfg.nu2 < 1.0
    exhaustive = math.comb(n, k) ** p <= cfg.enum_budget
    backend = "dense" if exhaustive else ("implicit" if cfg.backend == "auto" else cfg.backend)
    base = generate_tensor(n, p, k, base_seed, backend, cfg.dense_cap)

    taus = sorted(set(cfg.taus))
    jobs = list(itertools.product(range(m), taus))

    def qualify(job):
        ell, tau = job
        t = interpolate(base, tau, fresh[ell])
        if exhaustive:
            return _qualifiers_enumerated(t, k, threshold, cfg.enum_budget)
        return _qualifiers_sampled(
            t, k, threshold, cfg.restarts, derive_seed(cfg.master_seed, tag, 1000 + ell, taus.index(tau)), cfg.eval_budget
        )

    quals = dict(zip(jobs, _pool_map(qualify, jobs, threads)))

    records: list[OverlapScanRecord] = []
    hist: dict[str, int] = {}
    band_count = 0
    empty_sets = 0
    pairs = list(itertools.combinations(range(m), 2))
    assignments = list(itertools.product(taus, repeat=m))
    for a_idx, assign in enumerate(assignments):
        qs = [quals[(ell, tau)] for ell, tau in enumerate(assign)]
        sizes = [len(q.averages) for q in qs]
        if min(sizes) == 0:
            empty_sets += 1
            continue
        tup = _tuples(sizes, cfg.tuple_budget, derive_seed(cfg.master_seed, tag, 2000, a_idx))
        ov = {
            (i, j): (qs[i].indicators[tup[:, i]] & qs[j].indicators[tup[:, j]]).sum(axis=2) / k
            for i, j in pairs
        }
        band = np.ones(len(tup), dtype=bool)
        for v in ov.values():
            band &= ((v >= cfg.nu1) & (v <= cfg.nu2)).all(axis=1)
            vals, counts = np.unique(v, return_counts=True)
            for x, c in zip(vals, counts):
                hist[_fmt(float(x))] = hist.get(_fmt(float(x)), 0) + int(c)
        band_count += int(band.sum())
        for row in range(len(tup)):
            avgs = tuple(float(qs[ell].averages[tup[row, ell]]) for ell in range(m))
            cond_c = min(avgs) >= threshold
            records.append(
                OverlapScanRecord(
                    a_idx, row, tuple(assign), gamma,
                    {pr: tuple(float(x) for x in ov[pr][row]) for pr in pairs},
                    avgs, bool(cond_c and band[row]), bool(band[row]),
                )
            )

    summary = {
        "experiment": name,
        "n": n, "k": k, "p": p, "m": m, "gamma": gamma,
        "nu1": cfg.nu1, "nu2": cfg.nu2, "taus": taus,
        "e_max": em, "threshold": threshold,
        "mode": "enumeration" if exhaustive else "sampling (lower bound on qualifier sets)",
        "in_definition": in_definition,
        "qualifier_counts": {f"{ell + 1}@{_fmt(tau)}": len(quals[(ell, tau)].averages) for ell, tau in jobs},
        "tuples_examined": len(records),
        "empty_qualifier_assignments": empty_sets,
        "band_count": band_count,
        "overlap_histogram": dict(sorted(hist.items(), key=lambda kv: float(kv[0]))),
    }
    return records, summary


# ---------------------------------------------------------------------------
# tail-bound validation


def _mc_report(name, inputs, emp, n, lower=None, upper=None, note="") -> BoundReport:
    # sigma is evaluated at the bound being tested
    lo = up = None
    if lower is not None:
        q = min(max(lower, 0.0), 1.0)
        lo = lower - 3.0 * math.sqrt(q * (1.0 - q) / n)
    if upper is not None:
        q = min(max(upper, 0.0), 1.0)
        up = upper + 3.0 * math.sqrt(q * (1.0 - q) / n)
    return BoundReport(name, inputs, lo, up, emp, note=note)


def validate_tail_bounds(cfg: ExperimentConfig) -> list[BoundReport]:
    tag = experiment_tag("tail-validate")
    reports = []
    for x in cfg.x_grid:
        lo, up, exact = gaussian_tail_bounds(x)
        reports.append(BoundReport("gaussian_tail", {"x": x}, lo, up, exact))

    n = cfg.mc_samples
    for r_idx, rho in enumerate(cfg.rho):
        rng = np.random.default_rng(derive_seed(cfg.master_seed, tag, 1, r_idx))
        z = rng.standard_normal((2, n))
        zr = rho * z[0] + math.sqrt(1.0 - rho * rho) * z[1]
        for u in cfg.u:
            emp = float(np.mean((z[0] > u) & (zr > u)))
            bound = bivariate_tail_upper(rho, u)
            reports.append(_mc_report("bivariate_tail", {"rho": rho, "u": u, "samples": n}, emp, n, upper=bound))

    cases = [("identity", np.eye(2))]
    for d in cfg.mvn_dims:
        model = build_covariance_model(d, cfg.mvn_p, cfg.nu1, cfg.nu2, "zero")
        cases.append((f"sigma0_m{d}", np.array(model.sigma)))
    for c_idx, (label, sigma) in enumerate(cases):
        d = len(sigma)
        t = np.full(d, cfg.mvn_t)
        lower, upper = mvn_tail_bounds(sigma, t)
        rng = np.random.default_rng(derive_seed(cfg.master_seed, tag, 2, c_idx))
        x = rng.standard_normal((n, d)) @ np.linalg.cholesky(sigma).T
        emp = float(np.mean((x >= t).all(axis=1)))
        reports.append(
            _mc_report(
                "mvn_tail", {"case": label, "d": d, "t": cfg.mvn_t, "samples": n}, emp, n,
                lower=lower, upper=upper, note=f"lower={_fmt(lower)} upper={_fmt(upper)}",
            )
        )
    return reports


def run_tail_validate(cfg: ExperimentConfig, threads: int | None = None):
    reports = validate_tail_bounds(cfg)
    summary = {
        "experiment": "tail-validate",
        "reports": [r.to_dict() for r in reports],
        "all_satisfied": all(r.satisfied for r in reports),
    }
    return reports, summary


# ---------------------------------------------------------------------------

RUNNERS = {
    "ground-state": run_ground_state,
    "igpt-ratio": run_igpt_ratio,
    "concentration": run_concentration,
    "ogp-scan": run_ogp_scan,
    "tail-validate": run_tail_validate,
}


def run_experiment(cfg: ExperimentConfig, output_dir=None, threads: int | None = None):
    """Run ``cfg.name``; if ``output_dir`` is given write ``<name>.csv`` and ``<name>_summary.json``."""
    cfg.validate()
    records, summary = RUNNERS[cfg.name](cfg, threads)
    if output_dir is not None:
        out = Path(output_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / f"{cfg.name}.csv").write_text(records_to_csv(records))
        (out / f"{cfg.name}_summary.json").write_text(
            json.dumps(summary, indent=2, sort_keys=True, default=_json_default) + "\n"
        )
    return records, summary


def _json_default(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(type(o).__name__)
