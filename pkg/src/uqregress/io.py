"""File formats: dataset/prediction/curve CSVs, model checkpoints, manifests.

All floats are written with shortest round-trip decimal formatting (repr), so
a write/read cycle reproduces every value bit-exactly and re-running a
command yields byte-identical files. Every writer also drops a sidecar
``<file>.manifest.json`` recording the command and resolved configuration
that produced the file.
"""

from __future__ import annotations

import csv
import json
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .core import LabeledDataset, PredictionSet, RngSeed
from .errors import FileParseError, ReportSchemaError
from .neural import MlpConfig, MlpModel

MODEL_FORMAT = "uqregress-model-v1"
ENSEMBLE_FORMAT = "uqregress-ensemble-v1"
MANIFEST_FORMAT = "uqregress-manifest-v1"


def fmt(x: float) -> str:
    """Shortest decimal string that round-trips to the same float64."""
    return repr(float(x))


def _parse_float(token: str, path: Path, line: int, col: str) -> float:
    try:
        return float(token)
    except ValueError as exc:
        raise FileParseError(f"{path}:{line}: column {col!r}: {token!r} is not a number") from exc


def write_json(path: Path, obj: dict) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n") as f:
        json.dump(obj, f, indent=2, allow_nan=False)
        f.write("\n")


def _read_json(path: Path) -> dict:
    try:
        with open(path) as f:
            return json.load(f)
    except json.JSONDecodeError as exc:
        raise FileParseError(f"{path}:{exc.lineno}: {exc.msg}") from exc


# --- dataset CSV ------------------------------------------------------------

@dataclass(frozen=True)
class DatasetFile:
    """Parsed dataset CSV; ``dataset`` is None for a header-only file."""

    dataset: LabeledDataset | None
    true_sigma: np.ndarray | None
    dim: int


def write_dataset_csv(
    path,
    dim: int,
    ids=(),
    features=None,
    targets=None,
    groups=None,
    true_sigma=None,
) -> None:
    """Write ``id,x0..x{d-1},y[,group][,true_sigma]`` rows."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    header = ["id"] + [f"x{j}" for j in range(dim)] + ["y"]
    if groups is not None:
        header.append("group")
    if true_sigma is not None:
        header.append("true_sigma")
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(header)
        for i, rid in enumerate(ids):
            row = [rid] + [fmt(v) for v in features[i]] + [fmt(targets[i])]
            if groups is not None:
                row.append(groups[i])
            if true_sigma is not None:
                row.append(fmt(true_sigma[i]))
            w.writerow(row)


def read_dataset_csv(path) -> DatasetFile:
    path = Path(path)
    with open(path, newline="") as f:
        rows = list(csv.reader(f))
    if not rows:
        raise FileParseError(f"{path}:1: empty file (expected a header row)")
    header = rows[0]
    if not header or header[0] != "id":
        raise FileParseError(f"{path}:1: first column must be 'id', got {header[:1]}")
    tail = list(header[1:])
    has_sigma = bool(tail) and tail[-1] == "true_sigma"
    if has_sigma:
        tail.pop()
    has_group = bool(tail) and tail[-1] == "group"
    if has_group:
        tail.pop()
    if not tail or tail[-1] != "y":
        raise FileParseError(f"{path}:1: expected a 'y' column, got header {header}")
    xcols = tail[:-1]
    if xcols != [f"x{j}" for j in range(len(xcols))] or not xcols:
        raise FileParseError(f"{path}:1: expected feature columns x0..x{{d-1}}, got {xcols}")
    dim = len(xcols)

    ids, feats, ys, groups, sigmas = [], [], [], [], []
    for ln, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != len(header):
            raise FileParseError(f"{path}:{ln}: expected {len(header)} fields, got {len(row)}")
        ids.append(row[0])
        feats.append([_parse_float(row[1 + j], path, ln, f"x{j}") for j in range(dim)])
        ys.append(_parse_float(row[1 + dim], path, ln, "y"))
        pos = 2 + dim
        if has_group:
            groups.append(row[pos])
            pos += 1
        if has_sigma:
            sigmas.append(_parse_float(row[pos], path, ln, "true_sigma"))
    if not ids:
        return DatasetFile(dataset=None, true_sigma=None, dim=dim)
    ds = LabeledDataset(
        ids=tuple(ids),
        features=np.asarray(feats),
        targets=np.asarray(ys),
        groups=tuple(groups) if has_group else None,
    )
    return DatasetFile(dataset=ds, true_sigma=np.asarray(sigmas) if has_sigma else None, dim=dim)


# --- prediction CSV ---------------------------------------------------------

def write_predictions_csv(path, p: PredictionSet | None) -> None:
    """Write ``id,y_true,y_pred,sigma[,group]``; None writes a header only."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    has_group = p is not None and p.groups is not None
    header = ["id", "y_true", "y_pred", "sigma"] + (["group"] if has_group else [])
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(header)
        if p is None:
            return
        for i in range(p.n):
            row = [p.ids[i], fmt(p.y_true[i]), fmt(p.mu[i]), fmt(p.sigma[i])]
            if has_group:
                row.append(p.groups[i])
            w.writerow(row)


def read_predictions_csv(path) -> PredictionSet | None:
    path = Path(path)
    with open(path, newline="") as f:
        rows = list(csv.reader(f))
    if not rows:
        raise FileParseError(f"{path}:1: empty file (expected a header row)")
    header = rows[0]
    if header[:4] != ["id", "y_true", "y_pred", "sigma"]:
        raise FileParseError(f"{path}:1: expected header id,y_true,y_pred,sigma[,group], got {header}")
    has_group = len(header) == 5 and header[4] == "group"
    if len(header) > 4 and not has_group:
        raise FileParseError(f"{path}:1: unexpected trailing columns {header[4:]}")
    ids, y, mu, sigma, groups = [], [], [], [], []
    for ln, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != len(header):
            raise FileParseError(f"{path}:{ln}: expected {len(header)} fields, got {len(row)}")
        ids.append(row[0])
        y.append(_parse_float(row[1], path, ln, "y_true"))
        mu.append(_parse_float(row[2], path, ln, "y_pred"))
        sigma.append(_parse_float(row[3], path, ln, "sigma"))
        if has_group:
            groups.append(row[4])
    if not ids:
        return None
    return PredictionSet(
        ids=tuple(ids), y_true=np.asarray(y), mu=np.asarray(mu), sigma=np.asarray(sigma),
        groups=tuple(groups) if has_group else None,
    )


# --- plot-ready tables ------------------------------------------------------

def write_curve_csv(path, curve) -> None:
    """``expected,observed`` rows of a calibration curve."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["expected", "observed"])
        for e, o in zip(curve.expected, curve.observed):
            w.writerow([fmt(e), fmt(o)])


def write_adversarial_csv(path, adv) -> None:
    """``fraction,mean_worst_area,std_error`` rows of an adversarial sweep."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["fraction", "mean_worst_area", "std_error"])
        for fr, mw, se in zip(adv.group_fractions, adv.mean_worst_area, adv.std_error):
            w.writerow([fmt(fr), fmt(mw), fmt(se)])


def write_violin_csv(path, summary) -> None:
    """``value,density`` rows of a distribution summary."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["value", "density"])
        for v, d in zip(summary.eval_grid, summary.densities):
            w.writerow([fmt(v), fmt(d)])


# --- model checkpoints ------------------------------------------------------

def _model_dict(m: MlpModel) -> dict:
    return {
        "format": MODEL_FORMAT,
        "layer_widths": list(m.config.layer_widths),
        "activation": m.config.activation,
        "dropout_rate": m.config.dropout_rate,
        "seed": [m.config.seed.seed, m.config.seed.stream_id],
        "weights": [w.tolist() for w in m.weights],
        "biases": [b.tolist() for b in m.biases],
    }


def _model_from_dict(d: dict, path: Path) -> MlpModel:
    if d.get("format") != MODEL_FORMAT:
        raise ReportSchemaError(f"{path}: unsupported model format {d.get('format')!r}")
    cfg = MlpConfig(
        layer_widths=tuple(d["layer_widths"]),
        activation=d["activation"],
        dropout_rate=float(d["dropout_rate"]),
        seed=RngSeed(int(d["seed"][0]), int(d["seed"][1])),
    )
    weights = [np.asarray(w, dtype=np.float64) for w in d["weights"]]
    biases = [np.asarray(b, dtype=np.float64) for b in d["biases"]]
    expect = list(zip(cfg.layer_widths[:-1], cfg.layer_widths[1:]))
    got = [w.shape for w in weights]
    if got != expect:
        raise FileParseError(f"{path}: weight shapes {got} do not match widths {cfg.layer_widths}")
    return MlpModel(weights=weights, biases=biases, config=cfg)


def save_model(path, m: MlpModel) -> None:
    write_json(Path(path), _model_dict(m))


def save_ensemble(path, members: list[MlpModel], member_training: str) -> None:
    write_json(Path(path), {
        "format": ENSEMBLE_FORMAT,
        "k": len(members),
        "member_training": member_training,
        "members": [_model_dict(m) for m in members],
    })


def load_checkpoint(path) -> MlpModel | list[MlpModel]:
    """Load a single model or an ensemble (returned as a list of models)."""
    path = Path(path)
    d = _read_json(path)
    if d.get("format") == ENSEMBLE_FORMAT:
        return [_model_from_dict(md, path) for md in d["members"]]
    return _model_from_dict(d, path)


# --- run manifests ----------------------------------------------------------

def manifest_path(output_path) -> Path:
    return Path(str(output_path) + ".manifest.json")


def write_manifest(output_path, command: str, config: dict, inputs: list[str],
                   outputs: list[str], started: float) -> None:
    """Sidecar manifest for one output file.

    ``config`` holds the fully resolved flag-keyed configuration, so feeding
    the manifest back through ``--config`` re-runs the command bit-exactly
    (the duration field lives only here, never in data outputs).
    """
    write_json(manifest_path(output_path), {
        "format": MANIFEST_FORMAT,
        "artifact_version": f"uqregress/{__version__}",
        "command": command,
        "config": config,
        "inputs": sorted(str(s) for s in inputs),
        "outputs": sorted(str(s) for s in outputs),
        "duration_s": round(time.time() - started, 6),
    })


def read_manifest(path) -> dict:
    d = _read_json(Path(path))
    if d.get("format") != MANIFEST_FORMAT:
        raise ReportSchemaError(f"{path}: unsupported manifest format {d.get('format')!r}")
    return d
