"""Command-line surface: generate, train, predict, evaluate, adversarial,
recalibrate, screen.

Every command takes flags (or a --config JSON whose keys mirror the flags;
a run manifest also works as a config), writes its outputs plus a sidecar
manifest per output, exits 0 on success and 1 on any error. Defaults follow
the reference protocol: k=5 ensemble folds, 1000 dropout samples at rate
0.05, evidential regularization weight 0.05.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import io
from .calibration import DEFAULT_GRID_SIZE, adversarial_group_calibration, calibration_curve
from .core import RngSeed
from .datagen import generate_synthetic
from .errors import DegenerateSampleError, DomainError, FileParseError, UqError
from .metrics import distribution_summary
from .neural import MlpConfig, MlpModel, TrainConfig, train
from .numerics import scott_bandwidth
from .recalibration import apply_scalar, fit_scalar
from .report import evaluate, report_to_dict
from .screening import ScreenCriteria, honesty_rate, screen
from .uq_methods import (
    DropoutSpec,
    EnsembleSpec,
    ensemble_predict,
    evidential_predict,
    mc_dropout_predict,
    train_kfold_members,
)

# seed-stream namespaces per command
_GEN_TRAIN_NS = 21
_GEN_TEST_NS = 22
_MODEL_INIT_NS = 31
_MODEL_TRAIN_NS = 32
_RECAL_SPLIT_NS = 41

METHODS = ("ensemble", "dropout", "evidential")


def _seed(args) -> RngSeed:
    return RngSeed(args.seed)


def _widths(dim: int, hidden: str, out_width: int) -> tuple[int, ...]:
    try:
        hid = tuple(int(w) for w in hidden.split(",") if w.strip())
    except ValueError as exc:
        raise DomainError(f"--hidden must be comma-separated integers, got {hidden!r}") from exc
    if not hid:
        raise DomainError("--hidden must name at least one hidden layer")
    return (dim, *hid, out_width)


def _read_train_dataset(path):
    f = io.read_dataset_csv(path)
    if f.dataset is None:
        raise DomainError(f"{path} has no rows; cannot train")
    return f.dataset


def cmd_generate(args, written: list[str]) -> list[str]:
    base = _seed(args)
    out_dir = Path(args.out)
    train_path = out_dir / "train.csv"
    test_path = out_dir / "test.csv"
    for path, n, ns in ((train_path, args.n_train, _GEN_TRAIN_NS),
                        (test_path, args.n_test, _GEN_TEST_NS)):
        data = generate_synthetic(n, args.dim, base.derive(ns), n_groups=args.groups)
        if data.dataset is None:
            io.write_dataset_csv(path, args.dim, groups=() if args.groups else None,
                                 true_sigma=np.empty(0))
        else:
            ds = data.dataset
            io.write_dataset_csv(
                path, args.dim, ids=ds.ids, features=ds.features, targets=ds.targets,
                groups=ds.groups, true_sigma=data.true_sigma,
            )
        written.append(str(path))
    return written


def cmd_train(args, written: list[str]) -> list[str]:
    data = _read_train_dataset(args.train)
    base = _seed(args)
    if args.method == "ensemble":
        spec = EnsembleSpec(
            k=args.k,
            member_training=args.member_training,
            mlp=MlpConfig(
                layer_widths=_widths(data.dim, args.hidden, 1),
                activation=args.activation,
                dropout_rate=0.0,
                seed=base.derive(_MODEL_INIT_NS),
            ),
            train=TrainConfig(
                epochs=args.epochs, batch_size=args.batch_size,
                learning_rate=args.learning_rate, lr_decay=args.lr_decay,
                loss="squared_error", seed=base.derive(_MODEL_TRAIN_NS),
            ),
        )
        members = train_kfold_members(data, spec)
        io.save_ensemble(args.out, members, args.member_training)
        written.append(str(args.out))
        return written

    out_width = 4 if args.method == "evidential" else 1
    loss = "evidential" if args.method == "evidential" else "squared_error"
    rate = args.dropout_rate if args.method == "dropout" else 0.0
    model = MlpModel.initialize(MlpConfig(
        layer_widths=_widths(data.dim, args.hidden, out_width),
        activation=args.activation,
        dropout_rate=rate,
        seed=base.derive(_MODEL_INIT_NS),
    ))
    cfg = TrainConfig(
        epochs=args.epochs, batch_size=args.batch_size, learning_rate=args.learning_rate,
        lr_decay=args.lr_decay, loss=loss,
        reg_weight=args.reg_weight if loss == "evidential" else 0.0,
        seed=base.derive(_MODEL_TRAIN_NS),
    )
    train(model, data, cfg)
    io.save_model(args.out, model)
    written.append(str(args.out))
    return written


def cmd_predict(args, written: list[str]) -> list[str]:
    f = io.read_dataset_csv(args.test)
    checkpoint = io.load_checkpoint(args.model)
    if f.dataset is None:  # empty test set: header-only predictions, success
        io.write_predictions_csv(args.out, None)
        written.append(str(args.out))
        return written
    test = f.dataset
    if args.method == "ensemble":
        if not isinstance(checkpoint, list):
            raise DomainError(f"{args.model} is a single model; ensemble prediction needs an ensemble checkpoint")
        pred = ensemble_predict(checkpoint, test)
    elif args.method == "dropout":
        if isinstance(checkpoint, list):
            raise DomainError(f"{args.model} is an ensemble; dropout prediction needs a single model")
        rate = checkpoint.config.dropout_rate if args.rate is None else args.rate
        pred = mc_dropout_predict(checkpoint, test, DropoutSpec(args.samples, rate, _seed(args)))
    else:
        if isinstance(checkpoint, list):
            raise DomainError(f"{args.model} is an ensemble; evidential prediction needs a single model")
        pred = evidential_predict(checkpoint, test, uncertainty=args.uncertainty,
                                  apply_sqrt=args.sqrt_uncertainty)
    io.write_predictions_csv(args.out, pred)
    written.append(str(args.out))
    return written


def _require_predictions(path):
    p = io.read_predictions_csv(path)
    if p is None:
        raise DomainError(f"{path} has no prediction rows")
    return p


def cmd_evaluate(args, written: list[str]) -> list[str]:
    p = _require_predictions(args.pred)
    report, curve = evaluate(p, grid_size=args.grid_size, honesty_multiplier=args.honesty_multiplier)
    out = Path(args.out)
    curve_out = Path(args.curve_out) if args.curve_out else out.with_suffix(".curve.csv")
    violin_out = Path(args.violin_out) if args.violin_out else out.with_suffix(".violin.csv")
    if curve is not None:
        io.write_curve_csv(curve_out, curve)
        written.append(str(curve_out))
    try:
        h = scott_bandwidth(p.sigma)
        grid = np.linspace(p.sigma.min() - 3 * h, p.sigma.max() + 3 * h, args.violin_points)
        io.write_violin_csv(violin_out, distribution_summary(p.sigma, grid))
        written.append(str(violin_out))
    except DegenerateSampleError:
        report = dataclasses.replace(report, errors=report.errors + ("DegenerateSample",))
    io.write_json(out, report_to_dict(report))
    written.insert(0, str(out))
    return written


def cmd_adversarial(args, written: list[str]) -> list[str]:
    p = _require_predictions(args.pred)
    fractions = [float(t) for t in args.fractions.split(",") if t.strip()]
    adv = adversarial_group_calibration(
        p, fractions, trials=args.trials, subgroups=args.subgroups,
        seed=_seed(args), grid_size=args.grid_size,
    )
    io.write_adversarial_csv(args.out, adv)
    written.append(str(args.out))
    return written


def cmd_recalibrate(args, written: list[str]) -> list[str]:
    p = _require_predictions(args.pred)
    holdout = None
    if args.fit_on == "split":
        perm = _seed(args).derive(_RECAL_SPLIT_NS).generator().permutation(p.n)
        n_fit = int(round(args.fit_fraction * p.n))
        if n_fit < 2 or p.n - n_fit < 0:
            raise DomainError(f"fit fraction {args.fit_fraction} leaves {n_fit} fit rows")
        fit_set = p.subset(np.sort(perm[:n_fit]))
        holdout_idx = np.sort(perm[n_fit:])
        holdout = p.subset(holdout_idx) if holdout_idx.size >= 2 else None
    else:
        fit_set = p
    result = fit_scalar(fit_set, bracket_lo=args.bracket_lo, bracket_hi=args.bracket_hi,
                        grid_size=args.grid_size)
    recalibrated = apply_scalar(p, result.scalar)

    payload = {
        "format": "uqregress-recalibration-v1",
        "fit_policy": args.fit_on,
        "n_total": p.n,
        "n_fit": fit_set.n,
        "scalar": result.scalar,
        "area_before": result.area_before,
        "area_after": result.area_after,
        "grid_size": result.grid_size,
        "brent": {
            "argmin_log_scalar": result.brent.argmin,
            "value": result.brent.value,
            "iterations": result.brent.iterations,
            "converged": result.brent.converged,
        },
        "holdout": None,
    }
    if holdout is not None:
        payload["holdout"] = {
            "n": holdout.n,
            "area_before": calibration_curve(holdout, args.grid_size).miscalibration_area,
            "area_after": calibration_curve(apply_scalar(holdout, result.scalar),
                                            args.grid_size).miscalibration_area,
        }
    io.write_json(Path(args.out), payload)
    written.append(str(args.out))
    out_pred = Path(args.out_pred) if args.out_pred else Path(args.out).with_suffix(".recalibrated.csv")
    io.write_predictions_csv(out_pred, recalibrated)
    written.append(str(out_pred))
    return written


def cmd_screen(args, written: list[str]) -> list[str]:
    p = _require_predictions(args.pred)
    criteria = ScreenCriteria(
        value_lo=args.lo, value_hi=args.hi,
        sigma_max=args.sigma_max, honesty_multiplier=args.multiplier,
    )
    rep = screen(p, criteria)
    io.write_json(Path(args.out), {
        "format": "uqregress-screen-v1",
        "criteria": {
            "value_lo": criteria.value_lo,
            "value_hi": criteria.value_hi,
            "sigma_max": criteria.sigma_max,
            "honesty_multiplier": criteria.honesty_multiplier,
        },
        "n_selected": rep.n_selected,
        "n_honest": rep.n_honest,
        "n_dishonest": rep.n_dishonest,
        "selected_ids": list(rep.selected_ids),
        "honest_ids": list(rep.honest_ids),
        "dishonest_ids": list(rep.dishonest_ids),
        "overall_honesty_rate": honesty_rate(p, criteria.honesty_multiplier),
    })
    written.append(str(args.out))
    return written


def build_parser() -> tuple[argparse.ArgumentParser, argparse._SubParsersAction]:
    parser = argparse.ArgumentParser(
        prog="uqregress",
        description="Uncertainty quantification pipeline for regression predictions.",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")
    fmt = argparse.ArgumentDefaultsHelpFormatter

    def common(sp):
        sp.add_argument("--seed", type=int, default=0, help="base RNG seed (default 0)")
        sp.add_argument("--config", type=str, default=None,
                        help="JSON config (keys mirror the flags); a run manifest also works")

    g = sub.add_parser("generate", formatter_class=fmt, help="write synthetic train/test dataset CSVs")
    g.add_argument("--out", required=True, help="output directory (train.csv, test.csv)")
    g.add_argument("--n-train", type=int, default=5000, help="training rows")
    g.add_argument("--n-test", type=int, default=2000, help="test rows")
    g.add_argument("--dim", type=int, default=4, help="feature dimension (default 4)")
    g.add_argument("--groups", type=int, default=0, help="number of group tags; 0 disables")
    common(g)
    g.set_defaults(func=cmd_generate)

    t = sub.add_parser("train", formatter_class=fmt, help="train a UQ model on a dataset CSV")
    t.add_argument("--method", required=True, choices=METHODS, help="UQ producer to train")
    t.add_argument("--train", required=True, help="training dataset CSV")
    t.add_argument("--out", required=True, help="checkpoint JSON path")
    t.add_argument("--hidden", default="32,32", help="hidden layer widths, e.g. 32,32")
    t.add_argument("--activation", default="tanh", choices=("relu", "tanh", "softplus"),
                   help="hidden-layer activation")
    t.add_argument("--epochs", type=int, default=60, help="training epochs")
    t.add_argument("--batch-size", type=int, default=64, help="mini-batch size")
    t.add_argument("--learning-rate", type=float, default=0.02, help="SGD step size")
    t.add_argument("--lr-decay", type=float, default=0.0,
                   help="epoch e trains at learning_rate / (1 + lr_decay * e)")
    t.add_argument("--dropout-rate", type=float, default=0.05,
                   help="hidden-unit drop probability (dropout method)")
    t.add_argument("--reg-weight", type=float, default=0.05,
                   help="evidential regularization weight (evidential method)")
    t.add_argument("--k", type=int, default=5, help="ensemble fold count")
    t.add_argument("--member-training", default="one_fold_each",
                   choices=("one_fold_each", "leave_one_fold_out"))
    common(t)
    t.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", formatter_class=fmt, help="predict with uncertainty on a test CSV")
    p.add_argument("--method", required=True, choices=METHODS, help="UQ producer to predict with")
    p.add_argument("--model", required=True, help="checkpoint JSON from `train`")
    p.add_argument("--test", required=True, help="test dataset CSV")
    p.add_argument("--out", required=True, help="prediction CSV path")
    p.add_argument("--samples", type=int, default=1000, help="MC dropout sample count")
    p.add_argument("--rate", type=float, default=None,
                   help="MC dropout rate (default: the model's training rate)")
    p.add_argument("--uncertainty", default="epistemic", choices=("epistemic", "aleatoric"),
                   help="evidential sigma channel")
    p.add_argument("--sqrt-uncertainty", action="store_true",
                   help="treat the evidential channels as variances and take roots")
    common(p)
    p.set_defaults(func=cmd_predict)

    e = sub.add_parser("evaluate", formatter_class=fmt, help="full UQ metric report for a prediction CSV")
    e.add_argument("--pred", required=True, help="prediction CSV")
    e.add_argument("--out", required=True, help="report JSON path")
    e.add_argument("--curve-out", default=None, help="calibration curve CSV (default <out>.curve.csv)")
    e.add_argument("--violin-out", default=None, help="sigma distribution CSV (default <out>.violin.csv)")
    e.add_argument("--grid-size", type=int, default=DEFAULT_GRID_SIZE,
                   help="interior points of the calibration grid")
    e.add_argument("--honesty-multiplier", type=float, default=3.0,
                   help="interval half-width in sigmas for the honesty rate")
    e.add_argument("--violin-points", type=int, default=128, help="KDE grid size")
    common(e)
    e.set_defaults(func=cmd_evaluate)

    a = sub.add_parser("adversarial", formatter_class=fmt, help="adversarial group calibration sweep")
    a.add_argument("--pred", required=True, help="prediction CSV")
    a.add_argument("--out", required=True, help="sweep CSV path")
    a.add_argument("--fractions", default="0.0025,0.005,0.01,0.02,0.05,0.1,0.2,0.5,1.0",
                   help="comma-separated subgroup fractions of the test set")
    a.add_argument("--trials", type=int, default=100, help="trials per fraction")
    a.add_argument("--subgroups", type=int, default=10, help="subgroups per trial")
    a.add_argument("--grid-size", type=int, default=DEFAULT_GRID_SIZE,
                   help="interior points of the calibration grid")
    common(a)
    a.set_defaults(func=cmd_adversarial)

    r = sub.add_parser("recalibrate", formatter_class=fmt, help="fit and apply a scalar sigma multiplier")
    r.add_argument("--pred", required=True, help="prediction CSV")
    r.add_argument("--out", required=True, help="result JSON path")
    r.add_argument("--out-pred", default=None,
                   help="recalibrated prediction CSV (default <out>.recalibrated.csv)")
    r.add_argument("--fit-on", default="split", choices=("split", "self"),
                   help="fit the scalar on a held-out split (default) or on the whole file")
    r.add_argument("--fit-fraction", type=float, default=0.5,
                   help="share of rows used to fit the scalar under --fit-on split")
    r.add_argument("--bracket-lo", type=float, default=1e-3, help="scalar search lower bound")
    r.add_argument("--bracket-hi", type=float, default=1e3, help="scalar search upper bound")
    r.add_argument("--grid-size", type=int, default=DEFAULT_GRID_SIZE,
                   help="interior points of the calibration grid")
    common(r)
    r.set_defaults(func=cmd_recalibrate)

    s = sub.add_parser("screen", formatter_class=fmt, help="window + sigma gate enumeration with honesty audit")
    s.add_argument("--pred", required=True, help="prediction CSV")
    s.add_argument("--out", required=True, help="screen report JSON path")
    s.add_argument("--lo", type=float, default=-0.1, help="window lower edge on y_pred")
    s.add_argument("--hi", type=float, default=0.1, help="window upper edge on y_pred")
    s.add_argument("--sigma-max", type=float, default=0.05, help="sigma selection ceiling")
    s.add_argument("--multiplier", type=float, default=3.0, help="honesty interval multiplier")
    common(s)
    s.set_defaults(func=cmd_screen)
    return parser, sub


def _load_config_defaults(path: str, command: str, sub: argparse._SubParsersAction) -> None:
    with open(path) as f:
        try:
            raw = json.load(f)
        except json.JSONDecodeError as exc:
            raise FileParseError(f"{path}:{exc.lineno}: {exc.msg}") from exc
    if isinstance(raw, dict) and raw.get("format") == io.MANIFEST_FORMAT:
        if raw.get("command") != command:
            raise FileParseError(
                f"{path} is a manifest for {raw.get('command')!r}, not {command!r}"
            )
        raw = raw["config"]
    if not isinstance(raw, dict):
        raise FileParseError(f"{path}: config must be a JSON object")
    sp = sub.choices[command]
    valid = {a.dest for a in sp._actions}
    cfg = {}
    for key, value in raw.items():
        dest = key.replace("-", "_")
        if dest not in valid:
            raise FileParseError(f"{path}: unknown config key {key!r} for command {command!r}")
        cfg[dest] = value
    sp.set_defaults(**cfg)
    for action in sp._actions:
        if action.dest in cfg:  # the config satisfies this flag
            action.required = False


def _resolved_config(args) -> dict:
    skip = {"command", "config", "func"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, sub = build_parser()
    written: list[str] = []
    try:
        if "--config" in argv:
            if not argv or argv[0] not in sub.choices:
                parser.error("--config requires a leading command name")
            at = argv.index("--config")
            if at + 1 >= len(argv):
                parser.error("--config needs a file path")
            _load_config_defaults(argv[at + 1], argv[0], sub)
        args = parser.parse_args(argv)
        started = time.time()
        outputs = args.func(args, written)
        config = _resolved_config(args)
        inputs = [str(getattr(args, k)) for k in ("train", "test", "pred", "model")
                  if getattr(args, k, None)]
        for out in outputs:
            io.write_manifest(out, args.command, config, inputs, outputs, started)
    except (UqError, OSError) as exc:
        # a partial output must never survive without its manifest
        for out in written:
            if not io.manifest_path(out).exists():
                Path(out).unlink(missing_ok=True)
        print(f"uqregress: error: {exc}", file=sys.stderr)
        return 1
    return 0


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
