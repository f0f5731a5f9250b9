"""Command-line front door: simulate | train | eval | covcheck | boundcheck.

Configuration is flat key=value text with one section per command:

    [simulate]
    n = 20000
    dim = 64

Precedence: built-in defaults, then the config file's section for the
command, then --set key=value overrides, then --seed (which replaces the
command's seed). Every stochastic step derives from that one seed, so a
rerun with the same config produces byte-identical outputs. Usage errors
are reported before any file is touched, and all writes are atomic.

Exit codes: 0 success, 1 assertion/violation, 2 usage error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys

import numpy as np

from . import bounds as boundlab
from .bootstrap import batch_size_for, max_subnetworks
from .covariance import CovarianceSet, estimate, pairwise_between_cov
from .linalg import NotPositiveDefinite
from .metrics import hungarian_accuracy, kmeans, nn_match, affinity_report
from .network import TrainConfig, embed, init_model, load_model, save_model, train
from .objective import mv_corr, shared_subspace
from .synthdata import SynthParams, generate, to_multiview_dataset
from .tensorio import (
    atomic_write_bytes,
    atomic_write_text,
    dataset_from_tensor,
    read_labels,
    read_tensor,
    write_labels,
    write_tensor,
)


class UsageError(Exception):
    pass


class CheckFailure(Exception):
    pass


DEFAULTS = {
    "simulate": {
        "n": 20000,
        "dim": 64,
        "k": 10,
        "m_views": 4,
        "alpha": 0.5,
        "beta": 0.7,
        "classes": 1,
        "noise_sigma": 0.1,
        "seed": 1,
    },
    "train": {
        "data": "dataset.mvt",
        "d": 64,
        "hidden": "64,48",
        "m": 0,  # 0: max_subnetworks(d, practical)
        "lr": 0.01,
        "momentum": 0.9,
        "decay": 1e-6,
        "nu": 0.2,
        "max_epochs": 50,
        "early_stop_delta": 1e-3,
        "early_stop_patience": 5,
        "batch": 0,  # 0: ceil(d ln d)
        "seed": 1,
    },
    "eval": {
        "data": "dataset.mvt",
        "checkpoint": "model.mvcm",
        "labels": "",
        "signal": "",
        "clusters": 0,
        "subnet": -1,  # -1: seeded-random sub-network
        "seed": 1,
    },
    "covcheck": {
        "batches": 200,
        "nu": 0.2,
        "inject": "none",  # test hook: "asymmetry" breaks one batch on purpose
        "seed": 1,
    },
    "boundcheck": {
        "m_grid": "2,4,8,16,32",
        "d": 16,
        "n": 256,
        "m_views": 64,
        "trials": 50,
        "nu": 0.2,
        "jitter": 0.1,
        "seed": 1,
    },
}


def parse_config_file(path):
    sections = {}
    current = None
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if line.startswith("[") and line.endswith("]"):
                current = line[1:-1].strip()
                sections.setdefault(current, {})
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key = value, got {line!r}")
            if current is None:
                raise UsageError(f"{path}:{lineno}: key outside any [section]")
            key, value = line.split("=", 1)
            sections[current][key.strip()] = value.strip()
    return sections


def _coerce(command, key, raw):
    defaults = DEFAULTS[command]
    if key not in defaults:
        raise UsageError(f"unknown key {key!r} for command {command!r}")
    target = defaults[key]
    try:
        if isinstance(target, bool):
            return raw.lower() in ("1", "true", "yes")
        if isinstance(target, int):
            return int(raw)
        if isinstance(target, float):
            return float(raw)
        return raw
    except ValueError as exc:
        raise UsageError(f"bad value for {key!r}: {raw!r}") from exc


def build_config(command, config_path=None, overrides=(), seed=None):
    cfg = dict(DEFAULTS[command])
    if config_path:
        if not os.path.exists(config_path):
            raise UsageError(f"config file not found: {config_path}")
        section = parse_config_file(config_path).get(command, {})
        for key, raw in section.items():
            cfg[key] = _coerce(command, key, raw)
    for item in overrides:
        if "=" not in item:
            raise UsageError(f"--set expects key=value, got {item!r}")
        key, raw = item.split("=", 1)
        cfg[key.strip()] = _coerce(command, key.strip(), raw.strip())
    if seed is not None:
        cfg["seed"] = int(seed)
    return cfg


def _json_text(obj):
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _float(x):
    return None if x is None else float(x)


def cmd_simulate(cfg, out_dir):
    params = SynthParams(
        n=cfg["n"],
        dim=cfg["dim"],
        k=cfg["k"],
        m_views=cfg["m_views"],
        alpha=cfg["alpha"],
        beta=cfg["beta"],
        classes=cfg["classes"],
        noise_sigma=cfg["noise_sigma"],
        seed=cfg["seed"],
    )
    try:
        params.validate()
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    dataset = generate(params)
    files = {
        "dataset": "dataset.mvt",
        "labels": "labels.txt",
        "signal": "signal.mvt",
    }
    tensor = np.stack([v.T for v in dataset.measurements], axis=1)
    signal = np.stack([v.T for v in dataset.signal_ground_truth], axis=1)
    write_tensor(os.path.join(out_dir, files["dataset"]), tensor)
    write_labels(os.path.join(out_dir, files["labels"]), dataset.class_labels)
    write_tensor(os.path.join(out_dir, files["signal"]), signal)
    manifest = {"command": "simulate", "files": files}
    manifest.update(
        {
            "n": params.n,
            "dim": params.dim,
            "k": params.k,
            "m_views": params.m_views,
            "alpha": params.alpha,
            "beta": params.beta,
            "classes": params.classes,
            "noise_sigma": params.noise_sigma,
            "seed": params.seed,
        }
    )
    atomic_write_text(os.path.join(out_dir, "manifest.json"), _json_text(manifest))
    print(f"simulate: wrote {files['dataset']} ({params.n}x{params.m_views}x{params.dim})")
    return 0


def cmd_train(cfg, out_dir):
    if cfg["d"] < 2:
        raise UsageError(f"embedding dimension must be >= 2, got {cfg['d']}")
    try:
        hidden = [int(w) for w in str(cfg["hidden"]).split(",") if w.strip()]
    except ValueError as exc:
        raise UsageError(f"bad hidden widths {cfg['hidden']!r}") from exc
    m = cfg["m"] if cfg["m"] else max_subnetworks(cfg["d"], "practical")
    if m < 2:
        raise UsageError(f"need at least 2 sub-networks, got {m}")
    batch = cfg["batch"] if cfg["batch"] else batch_size_for(cfg["d"])
    tensor = read_tensor(cfg["data"])
    data = dataset_from_tensor(tensor)
    if tensor.shape[1] < 2:
        raise UsageError("training needs at least 2 views per instance")
    model = init_model(m, hidden + [cfg["d"]], input_dim=data.dim, seed=cfg["seed"])
    train_cfg = TrainConfig(
        lr=cfg["lr"],
        momentum=cfg["momentum"],
        decay=cfg["decay"],
        nu=cfg["nu"],
        max_epochs=cfg["max_epochs"],
        early_stop_delta=cfg["early_stop_delta"],
        early_stop_patience=cfg["early_stop_patience"],
        batch=batch,
        seed=cfg["seed"] + 1,
    )
    try:
        train_cfg.validate()
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    history = train(model, data, train_cfg)
    save_model(model, os.path.join(out_dir, "model.mvcm"))
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["epoch", "loss", "rho"])
    for stats in history:
        writer.writerow([stats.epoch, repr(stats.loss), repr(stats.rho)])
    atomic_write_text(os.path.join(out_dir, "history.csv"), buf.getvalue())
    print(
        f"train: m={m} d={cfg['d']} batch={batch} epochs={history[-1].epoch} "
        f"final_loss={history[-1].loss:.6f}"
    )
    return 0


def cmd_eval(cfg, out_dir):
    model = load_model(cfg["checkpoint"])
    tensor = read_tensor(cfg["data"])
    if tensor.shape[2] != model.input_dim:
        raise UsageError(
            f"dataset features ({tensor.shape[2]}) do not match model input "
            f"({model.input_dim})"
        )
    n, m_views, _ = tensor.shape
    if m_views < 2:
        raise UsageError("evaluation needs at least 2 views per instance")
    warnings_list = []
    rng = np.random.default_rng(cfg["seed"])
    subnet = cfg["subnet"] if cfg["subnet"] >= 0 else int(rng.integers(model.m))
    if subnet >= model.m:
        raise UsageError(f"sub-network index {subnet} out of range 0..{model.m - 1}")
    embeddings = [
        embed(model, tensor[:, l, :].T, subnet_index=subnet).T for l in range(m_views)
    ]

    labels = None
    if cfg["labels"]:
        labels = read_labels(cfg["labels"])
        if labels.size != n:
            raise UsageError(f"{labels.size} labels for {n} instances")

    ground_truth = None
    if cfg["signal"]:
        signal = read_tensor(cfg["signal"])
        if signal.shape[0] != n or signal.shape[1] != m_views:
            raise UsageError("signal tensor does not match dataset shape")
        ground_truth = [signal[:, l, :] for l in range(m_views)]
    else:
        warnings_list.append("no ground-truth signal: reconstruction affinity skipped")

    report = affinity_report(embeddings, ground_truth)

    clustering = None
    if cfg["clusters"] > 0:
        if labels is None:
            warnings_list.append("clustering requested without labels: skipped")
        else:
            # the trained alignment makes per-view embeddings commensurable,
            # so the per-instance view average is the natural cluster input
            points = np.mean(embeddings, axis=0)
            assign = kmeans(points, cfg["clusters"], seed=cfg["seed"])
            clustering = {
                "k": cfg["clusters"],
                "accuracy": hungarian_accuracy(assign, labels).accuracy,
            }

    nn_accuracy = None
    if labels is not None and m_views >= 2:
        gallery = embeddings[0]
        probes = np.vstack(embeddings[1:])
        probe_labels = np.concatenate([labels] * (m_views - 1))
        nn_accuracy = nn_match(gallery, labels, probes, probe_labels)

    payload = {
        "command": "eval",
        "seed": cfg["seed"],
        "subnet_index": subnet,
        "r_a": _float(report.r_a),
        "r_s": _float(report.r_s),
        "per_view_affinity": [float(v) for v in report.per_view],
        "clustering": clustering,
        "nn_accuracy": _float(nn_accuracy),
        "warnings": warnings_list,
    }
    atomic_write_text(os.path.join(out_dir, "metrics.json"), _json_text(payload))
    print(f"eval: r_s={report.r_s:.4f} r_a={report.r_a} nn={nn_accuracy}")
    return 0


def cmd_covcheck(cfg, out_dir):
    if cfg["inject"] not in ("none", "asymmetry"):
        raise UsageError(f"inject must be 'none' or 'asymmetry', got {cfg['inject']!r}")
    rng = np.random.default_rng(cfg["seed"])
    batches = int(cfg["batches"])
    if batches < 1:
        raise UsageError("need at least one batch")
    nu = cfg["nu"]
    max_identity = 0.0
    max_rho = -np.inf
    max_gev_gap = 0.0
    max_asymmetry = 0.0
    violations = []
    for b in range(batches):
        m = int(rng.integers(2, 9))
        d = int(rng.integers(2, 17))
        views = [rng.standard_normal((d, 4 * d)) for _ in range(m)]
        cov = estimate(views, nu=nu)
        if cfg["inject"] == "asymmetry" and b == 0:
            r_t = cov.r_t.copy()
            r_t[0, -1] += 1e-3  # negative control: break symmetry on purpose
            cov = CovarianceSet(
                r_w=cov.r_w, r_w_shrunk=cov.r_w_shrunk, r_t=r_t,
                r_b=r_t - cov.r_w, m=cov.m, n=cov.n,
            )
        symmetric = True
        for name, mat in (("r_w", cov.r_w), ("r_t", cov.r_t), ("r_b", cov.r_b)):
            asym = float(np.max(np.abs(mat - mat.T)))
            scale = max(1.0, float(np.max(np.abs(mat))))
            max_asymmetry = max(max_asymmetry, asym / scale)
            if asym > 1e-10 * scale:
                violations.append(f"batch {b}: {name} asymmetric by {asym:.3e}")
                symmetric = False
        if not symmetric:
            continue  # downstream checks assume symmetric inputs
        centered = [v - v.mean(axis=1, keepdims=True) for v in views]
        direct = pairwise_between_cov(centered)
        residual = float(np.max(np.abs(cov.r_b - direct)))
        residual /= max(float(np.max(np.abs(direct))), 1e-300)
        max_identity = max(max_identity, residual)
        if residual > 1e-10:
            violations.append(f"batch {b}: identity residual {residual:.3e}")
        try:
            result = mv_corr(cov)
        except ValueError as exc:
            violations.append(f"batch {b}: correlation failed: {exc}")
            continue
        max_rho = max(max_rho, result.rho)
        if result.rho > 1.0 + 1e-8:
            violations.append(f"batch {b}: rho {result.rho!r} above bound")
        gev_mean = float(shared_subspace(cov).values.mean()) / (cov.m - 1)
        gap = abs(result.rho - gev_mean)
        max_gev_gap = max(max_gev_gap, gap)
        if gap > 1e-8:
            violations.append(f"batch {b}: rho vs eigenvalue mean gap {gap:.3e}")
    payload = {
        "command": "covcheck",
        "seed": cfg["seed"],
        "batches": batches,
        "nu": nu,
        "max_identity_residual": max_identity,
        "max_rho": float(max_rho),
        "max_rho_gev_gap": max_gev_gap,
        "max_asymmetry": max_asymmetry,
        "violations": violations,
        "passed": not violations,
    }
    atomic_write_text(os.path.join(out_dir, "covcheck.json"), _json_text(payload))
    print(
        f"covcheck: batches={batches} max_identity={max_identity:.3e} "
        f"max_rho={max_rho:.6f} violations={len(violations)}"
    )
    if violations:
        raise CheckFailure(violations[0])
    return 0


def cmd_boundcheck(cfg, out_dir):
    try:
        m_grid = tuple(int(v) for v in str(cfg["m_grid"]).split(",") if v.strip())
    except ValueError as exc:
        raise UsageError(f"bad m grid {cfg['m_grid']!r}") from exc
    if not m_grid:
        raise UsageError("empty m grid")
    if cfg["trials"] < 1:
        raise UsageError("need at least one trial")
    if any(m < 2 or m > cfg["m_views"] for m in m_grid):
        raise UsageError(f"m grid {m_grid} outside 2..{cfg['m_views']}")
    pool = boundlab.make_camera_pool(
        cfg["n"], cfg["m_views"], cfg["d"], seed=cfg["seed"], jitter=cfg["jitter"]
    )
    rows, summary = boundlab.run_grid(
        pool, m_grid=m_grid, trials=cfg["trials"], seed=cfg["seed"] + 1, nu=cfg["nu"]
    )
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["m", "d", "N", "trial", "delta_w", "delta_t", "rho_m", "rho_full"])
    for row in rows:
        writer.writerow(
            [row.m, row.d, row.n, row.trial, repr(row.delta_w), repr(row.delta_t),
             repr(row.rho_m), repr(row.rho_full)]
        )
    atomic_write_text(os.path.join(out_dir, "bounds.csv"), buf.getvalue())
    payload = {
        "command": "boundcheck",
        "seed": cfg["seed"],
        "m_grid": list(summary.m_grid),
        "trials": cfg["trials"],
        "mean_delta_w": {str(k): v for k, v in summary.mean_delta_w.items()},
        "mean_delta_t": {str(k): v for k, v in summary.mean_delta_t.items()},
        "slope_delta_w": summary.slope_delta_w,
        "delta_t_bound_ok": summary.delta_t_bound_ok,
        "max_delta_t_ratio": summary.max_delta_t_ratio,
        "rho_full": summary.rho_full,
        "rho_gaps": {str(k): v for k, v in summary.rho_gaps.items()},
        "max_rho": summary.max_rho,
        "t_nominal": summary.t_nominal,
    }
    atomic_write_text(os.path.join(out_dir, "summary.json"), _json_text(payload))
    print(
        f"boundcheck: slope={summary.slope_delta_w:.3f} "
        f"delta_t_bound_ok={summary.delta_t_bound_ok} max_rho={summary.max_rho:.4f}"
    )
    if not summary.delta_t_bound_ok or summary.max_rho > 1.0 + 1e-8:
        raise CheckFailure("bound violation in grid")
    return 0


COMMANDS = {
    "simulate": cmd_simulate,
    "train": cmd_train,
    "eval": cmd_eval,
    "covcheck": cmd_covcheck,
    "boundcheck": cmd_boundcheck,
}


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="mvcorr",
        description="Multi-view correlation learning: data, training, "
        "evaluation and verification runs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", default=None, help="key=value config file")
        p.add_argument(
            "--set", action="append", default=[], metavar="KEY=VALUE", dest="sets"
        )
        p.add_argument("--seed", type=int, default=None, help="override all seeds")
        p.add_argument("--out", default=".", help="output directory")
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        cfg = build_config(args.command, args.config, args.sets, args.seed)
        out_dir = args.out
        if not os.path.isdir(out_dir):
            raise UsageError(f"output directory does not exist: {out_dir}")
        return COMMANDS[args.command](cfg, out_dir)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NotPositiveDefinite as exc:
        print(f"violation: {exc}", file=sys.stderr)
        return 1
    except CheckFailure as exc:
        print(f"violation: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3


def console_main():
    raise SystemExit(main())


if __name__ == "__main__":
    console_main()
