"""File formats: estimate CSVs, choice data, game configs, fit reports.

Every writer goes through an atomic temp-file rename and emits a fixed
column order, so reruns under the same inputs are byte-identical.
"""

from __future__ import annotations

import csv
import json
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .beliefs import BeliefDistribution
from .curves import PayoffCurve
from .errors import ValidationError
from .mixture import BinaryGame, BootstrapSE, ChoiceRecord, MixtureFit
from .params import ESTIMATION_ENDOWMENT, THEORY_ENDOWMENT, PreferenceParams
from .solver import RegionMapResult, constrained_threshold
from .utility import dg_transfer

SCHEMA_VERSION = 1

# test-sample filter box for individual estimates
ALPHA_RANGE = (-2.0, 2.0)
BETA_RANGE = (-2.0, 2.0)
KAPPA_RANGE = (0.0, 1.0)

_ESTIMATE_HEADER = ["id", "alpha", "beta", "kappa"]
_CHOICE_HEADER = ["subject_id", "game_id", "role", "action"]
_HIST_BINS = 20


# ---------------------------------------------------------------------------
# atomic writes


def _atomic_write(path: str | Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_text(path: str | Path, text: str) -> None:
    """Atomic text write (temp file in the target directory, then rename)."""
    _atomic_write(path, text)


def json_text(payload: dict) -> str:
    """JSON rendering with the schema-version field first."""
    body = {"schema_version": SCHEMA_VERSION}
    body.update(payload)
    return json.dumps(body, indent=2) + "\n"


def write_json(path: str | Path, payload: dict) -> None:
    """JSON with a schema-version field first, atomic replace on write."""
    _atomic_write(path, json_text(payload))


def csv_text(header: list[str], rows) -> str:
    out = [",".join(header)]
    for row in rows:
        out.append(",".join(_cell(c) for c in row))
    return "\n".join(out) + "\n"


def write_csv(path: str | Path, header: list[str], rows) -> None:
    _atomic_write(path, csv_text(header, rows))


def _cell(c) -> str:
    if isinstance(c, float):
        return format(c, ".10g")
    return str(c)


# ---------------------------------------------------------------------------
# individual estimates


@dataclass(frozen=True)
class EstimateRecord:
    subject_id: str
    alpha: float
    beta: float
    kappa: float


@dataclass(frozen=True)
class FilterReport:
    """What the estimate filter kept, what it dropped, and why."""

    n_read: int
    n_kept: int
    n_dropped: int
    dropped_ids: tuple[str, ...]
    stats: dict[str, dict[str, float]]  # param -> min/max/mean/median (kept rows)


def _in_box(alpha: float, beta: float, kappa: float) -> bool:
    return (
        ALPHA_RANGE[0] <= alpha <= ALPHA_RANGE[1]
        and BETA_RANGE[0] <= beta <= BETA_RANGE[1]
        and KAPPA_RANGE[0] <= kappa <= KAPPA_RANGE[1]
    )


def load_estimates(path: str | Path) -> tuple[tuple[EstimateRecord, ...], FilterReport]:
    """Parse an `id,alpha,beta,kappa` CSV and apply the test-sample filter.

    Rows outside alpha, beta in [-2, 2] or kappa in [0, 1] are dropped and
    counted; malformed rows and duplicate ids are errors (with the offending
    line number / id), as is an empty file.
    """
    path = Path(path)
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        rows = list(reader)
    if not rows:
        raise ValidationError(f"{path}: empty estimates file")
    header = [c.strip() for c in rows[0]]
    if header != _ESTIMATE_HEADER:
        raise ValidationError(
            f"{path}: expected header {','.join(_ESTIMATE_HEADER)!r}, got {','.join(header)!r}"
        )
    if len(rows) == 1:
        raise ValidationError(f"{path}: no data rows")

    kept: list[EstimateRecord] = []
    dropped: list[str] = []
    seen: set[str] = set()
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != 4:
            raise ValidationError(f"{path}:{lineno}: expected 4 fields, got {len(row)}")
        sid = row[0].strip()
        if not sid:
            raise ValidationError(f"{path}:{lineno}: empty subject id")
        if sid in seen:
            raise ValidationError(f"{path}:{lineno}: duplicate subject id {sid!r}")
        seen.add(sid)
        try:
            alpha, beta, kappa = (float(c) for c in row[1:])
        except ValueError as exc:
            raise ValidationError(f"{path}:{lineno}: malformed number ({exc})") from None
        if not all(np.isfinite([alpha, beta, kappa])):
            raise ValidationError(f"{path}:{lineno}: non-finite value")
        if _in_box(alpha, beta, kappa):
            kept.append(EstimateRecord(sid, alpha, beta, kappa))
        else:
            dropped.append(sid)

    stats: dict[str, dict[str, float]] = {}
    if kept:
        for name in ("alpha", "beta", "kappa"):
            vals = np.array([getattr(r, name) for r in kept])
            stats[name] = {
                "min": float(vals.min()),
                "max": float(vals.max()),
                "mean": float(vals.mean()),
                "median": float(np.median(vals)),
            }
    report = FilterReport(
        n_read=len(kept) + len(dropped),
        n_kept=len(kept),
        n_dropped=len(dropped),
        dropped_ids=tuple(dropped),
        stats=stats,
    )
    return tuple(kept), report


def convert_external_estimates(
    src: str | Path, dest: str | Path, column_map: dict[str, str]
) -> int:
    """Rewrite an external CSV into the canonical `id,alpha,beta,kappa` schema.

    `column_map` names the source column for each canonical one; the source
    export format varies by provider, so the mapping must be supplied at
    ingest time. Returns the number of data rows written.
    """
    missing = [k for k in _ESTIMATE_HEADER if k not in column_map]
    if missing:
        raise ValidationError(f"column_map missing entries for {missing}")
    with open(src, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise ValidationError(f"{src}: empty file")
        for want in column_map.values():
            if want not in reader.fieldnames:
                raise ValidationError(f"{src}: no column named {want!r}")
        rows = [[row[column_map[k]] for k in _ESTIMATE_HEADER] for row in reader]
    write_csv(dest, _ESTIMATE_HEADER, rows)
    return len(rows)


# ---------------------------------------------------------------------------
# behaviour prediction over an estimate sample


@dataclass(frozen=True)
class PredictionRow:
    subject_id: str
    dg_transfer: float
    ug_threshold: float


@dataclass(frozen=True)
class DistributionSummary:
    mean: float
    mean_share: float  # mean / w
    sd: float
    minimum: float
    q1: float
    median: float
    q3: float
    maximum: float


@dataclass(frozen=True)
class Histogram:
    """20 equal-width bins on [0, w/2]; values beyond w/2 land in overflow."""

    bin_edges: tuple[float, ...]
    counts: tuple[int, ...]
    overflow: int


@dataclass(frozen=True)
class PredictionTable:
    rows: tuple[PredictionRow, ...]
    dg_summary: DistributionSummary
    ug_summary: DistributionSummary
    dg_hist: Histogram
    ug_hist: Histogram
    w: float
    curve_label: str
    kappa_suppressed: bool


def _summarize(vals: np.ndarray, w: float) -> DistributionSummary:
    q1, med, q3 = np.percentile(vals, [25.0, 50.0, 75.0])
    return DistributionSummary(
        mean=float(vals.mean()),
        mean_share=float(vals.mean() / w),
        sd=float(vals.std(ddof=1)) if len(vals) > 1 else 0.0,
        minimum=float(vals.min()),
        q1=float(q1),
        median=float(med),
        q3=float(q3),
        maximum=float(vals.max()),
    )


def _histogram(vals: np.ndarray, w: float) -> Histogram:
    counts, edges = np.histogram(vals, bins=_HIST_BINS, range=(0.0, 0.5 * w))
    return Histogram(
        bin_edges=tuple(float(e) for e in edges),
        counts=tuple(int(c) for c in counts),
        overflow=int((vals > 0.5 * w).sum()),
    )


def predict_all(
    estimates,
    w: float = ESTIMATION_ENDOWMENT,
    curve: PayoffCurve | None = None,
    suppress_kappa: bool = False,
) -> PredictionTable:
    """Per-subject DG transfer and UG rejection threshold, plus summaries.

    The transfer uses the full (alpha, beta, kappa) triple; the threshold
    uses (alpha, kappa) only, since beta never enters the responder root.
    `suppress_kappa` forces kappa = 0, the social-preferences-only variant.
    """
    if curve is None:
        curve = PayoffCurve.shifted_log()
    if not estimates:
        raise ValidationError("predict_all needs at least one estimate")
    rows = []
    for rec in estimates:
        kappa = 0.0 if suppress_kappa else rec.kappa
        p = PreferenceParams(alpha=rec.alpha, beta=rec.beta, kappa=kappa)
        rows.append(
            PredictionRow(
                subject_id=rec.subject_id,
                dg_transfer=dg_transfer(p, curve, w),
                ug_threshold=constrained_threshold(kappa, rec.alpha, curve, w),
            )
        )
    dg = np.array([r.dg_transfer for r in rows])
    ug = np.array([r.ug_threshold for r in rows])
    return PredictionTable(
        rows=tuple(rows),
        dg_summary=_summarize(dg, w),
        ug_summary=_summarize(ug, w),
        dg_hist=_histogram(dg, w),
        ug_hist=_histogram(ug, w),
        w=w,
        curve_label=curve.label(),
        kappa_suppressed=suppress_kappa,
    )


def prediction_payload(table: PredictionTable) -> dict:
    def summ(s: DistributionSummary) -> dict:
        return {
            "mean": s.mean,
            "mean_share": s.mean_share,
            "sd": s.sd,
            "min": s.minimum,
            "q1": s.q1,
            "median": s.median,
            "q3": s.q3,
            "max": s.maximum,
        }

    def hist(h: Histogram) -> dict:
        return {
            "bin_edges": list(h.bin_edges),
            "counts": list(h.counts),
            "overflow": h.overflow,
        }

    return {
        "w": table.w,
        "curve": table.curve_label,
        "kappa_suppressed": table.kappa_suppressed,
        "dg_summary": summ(table.dg_summary),
        "ug_summary": summ(table.ug_summary),
        "dg_histogram": hist(table.dg_hist),
        "ug_histogram": hist(table.ug_hist),
        "subjects": [
            {"id": r.subject_id, "dg_transfer": r.dg_transfer, "ug_threshold": r.ug_threshold}
            for r in table.rows
        ],
    }


def write_predictions_csv(table: PredictionTable, path: str | Path) -> None:
    write_csv(
        path,
        ["subject_id", "dg_transfer", "ug_threshold"],
        [(r.subject_id, r.dg_transfer, r.ug_threshold) for r in table.rows],
    )


# ---------------------------------------------------------------------------
# choice data


def load_choices(path: str | Path) -> tuple[ChoiceRecord, ...]:
    path = Path(path)
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        rows = list(reader)
    if not rows:
        raise ValidationError(f"{path}: empty choices file")
    header = [c.strip() for c in rows[0]]
    if header != _CHOICE_HEADER:
        raise ValidationError(
            f"{path}: expected header {','.join(_CHOICE_HEADER)!r}, got {','.join(header)!r}"
        )
    out = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != 4:
            raise ValidationError(f"{path}:{lineno}: expected 4 fields, got {len(row)}")
        sid, gid, role, action = (c.strip() for c in row)
        if action not in ("0", "1"):
            raise ValidationError(f"{path}:{lineno}: action must be 0 or 1, got {action!r}")
        try:
            out.append(ChoiceRecord(sid, gid, role, int(action)))
        except ValidationError as exc:
            raise ValidationError(f"{path}:{lineno}: {exc}") from None
    if not out:
        raise ValidationError(f"{path}: no data rows")
    return tuple(out)


def save_choices(records, path: str | Path) -> None:
    write_csv(
        path,
        _CHOICE_HEADER,
        [(r.subject_id, r.game_id, r.role, r.action) for r in records],
    )


# ---------------------------------------------------------------------------
# game configs


def _game_payload(g: BinaryGame) -> dict:
    return {
        "game_id": g.game_id,
        "payoff_a": [[list(cell) for cell in row] for row in np.asarray(g.payoff_a).tolist()],
        "payoff_b": [[list(cell) for cell in row] for row in np.asarray(g.payoff_b).tolist()],
        "belief_a": g.belief_a,
        "belief_b": g.belief_b,
    }


def _game_from_payload(entry: dict, where: str) -> BinaryGame:
    if "mini_ug" in entry:
        spec = entry["mini_ug"]
        try:
            return BinaryGame.mini_ug(
                tuple(spec["unequal"]),
                equal=tuple(spec.get("equal", (50.0, 50.0))),
                punish=tuple(spec.get("punish", (10.0, 10.0))),
                game_id=spec.get("game_id"),
            )
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"{where}: bad mini_ug entry ({exc})") from None
    try:
        return BinaryGame(
            game_id=entry["game_id"],
            payoff_a=tuple(tuple(tuple(c) for c in row) for row in entry["payoff_a"]),
            payoff_b=tuple(tuple(tuple(c) for c in row) for row in entry["payoff_b"]),
            belief_a=float(entry.get("belief_a", 0.5)),
            belief_b=float(entry.get("belief_b", 0.5)),
        )
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"{where}: bad game entry ({exc})") from None


def load_games_config(path: str | Path) -> tuple[BinaryGame, ...]:
    """Extra games from a JSON config: full payoff tables or mini-UG shorthand."""
    path = Path(path)
    with open(path) as fh:
        try:
            body = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{path}: invalid JSON ({exc})") from None
    if not isinstance(body, dict) or "games" not in body:
        raise ValidationError(f"{path}: expected an object with a 'games' list")
    games = tuple(
        _game_from_payload(entry, f"{path}: games[{i}]")
        for i, entry in enumerate(body["games"])
    )
    ids = [g.game_id for g in games]
    if len(set(ids)) != len(ids):
        raise ValidationError(f"{path}: duplicate game ids in config")
    return games


def save_games_config(games, path: str | Path) -> None:
    write_json(path, {"games": [_game_payload(g) for g in games]})


# ---------------------------------------------------------------------------
# fit reports


def fit_payload(fit: MixtureFit, se: BootstrapSE | None = None) -> dict:
    body = {
        "k": fit.k,
        "choice_model": fit.choice_model,
        "n_subjects": fit.n_subjects,
        "n_records": fit.n_records,
        "loglik": fit.loglik,
        "en": fit.en,
        "icl": fit.icl,
        "nec": fit.nec,
        "n_iter": fit.n_iter,
        "flags": list(fit.flags),
        "types": [
            {
                "share": float(fit.shares[i]),
                "alpha": p.alpha,
                "beta": p.beta,
                "kappa": p.kappa,
                "lambda": p.lam,
            }
            for i, p in enumerate(fit.params)
        ],
    }
    if se is not None:
        body["bootstrap"] = {
            "replicates": se.b,
            "unresolved": se.unresolved,
            "share_se": [float(v) for v in se.share_se],
            "param_se": [
                {
                    "alpha": float(row[0]),
                    "beta": float(row[1]),
                    "kappa": float(row[2]),
                    "lambda": float(row[3]),
                }
                for row in se.param_se
            ],
        }
    return body


def write_fit_report(fit: MixtureFit, path: str | Path, se: BootstrapSE | None = None) -> None:
    write_json(path, fit_payload(fit, se))


def fit_summary_table(
    fit: MixtureFit, se: BootstrapSE | None = None
) -> tuple[list[str], list[tuple]]:
    """Type-by-parameter summary table, one column per estimated type."""
    header = ["quantity"] + [f"type_{i + 1}" for i in range(fit.k)]
    rows: list[tuple] = []
    for name, get in (
        ("alpha", lambda p: p.alpha),
        ("beta", lambda p: p.beta),
        ("kappa", lambda p: p.kappa),
        ("lambda", lambda p: p.lam),
    ):
        rows.append((name, *(get(p) for p in fit.params)))
        if se is not None:
            col = {"alpha": 0, "beta": 1, "kappa": 2, "lambda": 3}[name]
            rows.append((f"se_{name}", *(float(v) for v in se.param_se[:, col])))
    rows.append(("share", *(float(v) for v in fit.shares)))
    if se is not None:
        rows.append(("se_share", *(float(v) for v in se.share_se)))
    for name, val in (
        ("loglik", fit.loglik),
        ("EN", fit.en),
        ("ICL", fit.icl),
        ("NEC", fit.nec if fit.nec is not None else float("nan")),
    ):
        rows.append((name, *([val] + [""] * (fit.k - 1))))
    return header, rows


def write_fit_summary_csv(
    fit: MixtureFit, path: str | Path, se: BootstrapSE | None = None
) -> None:
    header, rows = fit_summary_table(fit, se)
    write_csv(path, header, rows)


# ---------------------------------------------------------------------------
# region-map emission


def region_map_csv_text(result: RegionMapResult) -> str:
    """Deterministic cell-per-row CSV for golden-file comparison."""
    lines = ["alpha,kappa,region,x1_star,x2_star"]
    for c in result.cells:
        lines.append(
            f"{c.alpha:.6f},{c.kappa:.6f},{c.region},{c.x1_star:.9f},{c.x2_star:.9f}"
        )
    return "\n".join(lines) + "\n"


def write_region_map_csv(result: RegionMapResult, path: str | Path) -> None:
    _atomic_write(path, region_map_csv_text(result))


# ---------------------------------------------------------------------------
# run configuration


@dataclass(frozen=True)
class RunConfig:
    """Validated bundle of endowment, curve, beliefs, grids, seed, and output."""

    w: float
    curve: PayoffCurve
    thresholds: BeliefDistribution
    offers: BeliefDistribution
    alpha_grid: tuple[float, float, int]  # lo, hi, points
    kappa_grid: tuple[float, float, int]
    seed: int
    out_dir: str
    fmt: str

    def alphas(self) -> np.ndarray:
        lo, hi, n = self.alpha_grid
        return np.linspace(lo, hi, n)

    def kappas(self) -> np.ndarray:
        lo, hi, n = self.kappa_grid
        return np.linspace(lo, hi, n)


def curve_from_spec(spec: dict) -> PayoffCurve:
    kind = spec.get("kind")
    if kind == "linear":
        return PayoffCurve.linear()
    if kind == "crra":
        if "rho" not in spec:
            raise ValidationError("crra curve spec needs 'rho'")
        return PayoffCurve.crra(float(spec["rho"]))
    if kind == "shifted_log":
        return PayoffCurve.shifted_log()
    raise ValidationError(f"unknown curve kind {kind!r}")


def beliefs_from_spec(spec: dict, w: float) -> BeliefDistribution:
    kind = spec.get("kind")
    if kind == "scaled_beta":
        return BeliefDistribution.scaled_beta(float(spec["a"]), float(spec["b"]), w)
    if kind == "uniform":
        return BeliefDistribution.uniform_on_half(w)
    if kind == "always_accept":
        return BeliefDistribution.always_accept(w)
    if kind == "empirical":
        return BeliefDistribution.empirical([float(s) for s in spec["sample"]], w)
    raise ValidationError(f"unknown belief kind {kind!r}")


def default_run_config() -> RunConfig:
    """The theory-side configuration: w=10, CRRA rho=0.05, Beta(2,4) beliefs."""
    w = THEORY_ENDOWMENT
    return RunConfig(
        w=w,
        curve=PayoffCurve.crra(0.05),
        thresholds=BeliefDistribution.scaled_beta(2.0, 4.0, w),
        offers=BeliefDistribution.scaled_beta(2.0, 4.0, w),
        alpha_grid=(-1.0, 3.0, 41),
        kappa_grid=(0.0, 0.95, 39),
        seed=0,
        out_dir="",
        fmt="json",
    )


def load_run_config(path: str | Path) -> RunConfig:
    path = Path(path)
    with open(path) as fh:
        try:
            body = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{path}: invalid JSON ({exc})") from None
    base = default_run_config()
    try:
        w = float(body.get("w", base.w))
        if not (w > 0.0 and np.isfinite(w)):
            raise ValidationError(f"{path}: endowment must be positive and finite")
        curve = curve_from_spec(body["curve"]) if "curve" in body else base.curve
        thresholds = (
            beliefs_from_spec(body["threshold_beliefs"], w)
            if "threshold_beliefs" in body
            else BeliefDistribution.scaled_beta(2.0, 4.0, w)
        )
        offers = (
            beliefs_from_spec(body["offer_beliefs"], w)
            if "offer_beliefs" in body
            else BeliefDistribution.scaled_beta(2.0, 4.0, w)
        )
        a_g = body.get("alpha_grid", list(base.alpha_grid))
        k_g = body.get("kappa_grid", list(base.kappa_grid))
        alpha_grid = (float(a_g[0]), float(a_g[1]), int(a_g[2]))
        kappa_grid = (float(k_g[0]), float(k_g[1]), int(k_g[2]))
        if alpha_grid[2] < 2 or kappa_grid[2] < 2:
            raise ValidationError(f"{path}: grids need at least 2 points")
        if not (0.0 <= kappa_grid[0] and kappa_grid[1] <= 1.0):
            raise ValidationError(f"{path}: kappa grid must stay inside [0, 1]")
        seed = int(body.get("seed", base.seed))
        if seed < 0:
            raise ValidationError(f"{path}: seed must be nonnegative")
        return RunConfig(
            w=w,
            curve=curve,
            thresholds=thresholds,
            offers=offers,
            alpha_grid=alpha_grid,
            kappa_grid=kappa_grid,
            seed=seed,
            out_dir=str(body.get("out_dir", base.out_dir)),
            fmt=str(body.get("format", base.fmt)),
        )
    except (KeyError, TypeError, IndexError) as exc:
        raise ValidationError(f"{path}: bad run config ({exc})") from None
