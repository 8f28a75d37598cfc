"""Command-line front end: ``gappydmap generate | fit | extend | predict | compare``.

Every subcommand reads its settings from three layers, later ones winning:
built-in defaults, an optional ``--config`` file of ``key = value`` lines
(``#`` starts a comment), and command-line flags. The fully resolved
settings are written next to the outputs, and a hash of the non-path
settings is embedded in every model and CSV file.

Exit codes: 0 success, 2 invalid argument or data, 3 I/O or file format,
4 numerical failure, 5 ill-posed query, 6 model/data mismatch.
"""

import argparse
import csv
import hashlib
import sys
import warnings
from collections import namedtuple
from pathlib import Path

import numpy as np

from . import datagen, dmaps, gappy_pod, harmonics, parsimony, persist, plotting, workflows
from .errors import DataMismatch, FormatError, GappyDmapError, InvalidArgument
from .kernel import KernelConfig, median_bandwidth

EXIT_IO = 3

Opt = namedtuple("Opt", "name type default help")


def _bool(text):
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise InvalidArgument(f"not a boolean: {text!r}")


def _optional(kind):
    def parse(text):
        return None if str(text).strip().lower() in ("", "none") else kind(text)

    parse.__name__ = kind.__name__
    return parse


_int, _float = _optional(int), _optional(float)
_str = _optional(str)

# keys naming files or directories: resolved and logged, but not hashed, so
# that the same run written to another place yields identical artifacts
PATH_KEYS = {"out", "data", "params", "model", "mask", "target_mask", "report_dir"}

OPTIONS = {
    "generate": [
        Opt("dataset", str, None, "slow-manifold or surrogate"),
        Opt("out", _str, None, "output directory (must exist)"),
        Opt("seed", int, 0, "random seed"),
        Opt("eps", float, 0.01, "slow-manifold singular parameter"),
        Opt("n", int, 1000, "slow-manifold sample count"),
        Opt("transient", float, 10.0, "slow-manifold integration time in units of eps"),
        Opt("grid", int, 720, "surrogate parameter grid size"),
        Opt("dim", int, 200, "surrogate ambient dimension"),
        Opt("format", str, "csv", "csv or bin"),
    ],
    "fit": [
        Opt("data", _str, None, "snapshot matrix file"),
        Opt("params", _str, None, "parameter table file (pipeline and gh fits)"),
        Opt("out", _str, None, "model file to write"),
        Opt("kind", str, "pipeline", "pipeline, dmap, gh or pod"),
        Opt("holdout", float, 0.1, "fraction of samples held out for testing (0 keeps all)"),
        Opt("seed", int, 0, "holdout seed"),
        Opt("bandwidth_multiplier", float, workflows.DMAP_BANDWIDTH_MULTIPLIER, "diffusion map bandwidth / median distance"),
        Opt("n_pairs", _int, None, "eigenpairs to compute"),
        Opt("k_max", _int, None, "last coordinate scanned for parsimony"),
        Opt("top_m", _int, None, "keep the m largest residuals"),
        Opt("threshold", _float, None, "keep residuals above this value"),
        Opt("delta", float, harmonics.DEFAULT_DELTA, "geometric harmonics eigenvalue cutoff"),
        Opt("gh_bandwidth_multiplier", float, workflows.GH_BANDWIDTH_MULTIPLIER, "harmonics bandwidth / median distance"),
        Opt("partial_size", _int, None, "entries in a k-center partial-observation mask"),
        Opt("mask", _str, None, "file of 0-based entry indices for the partial map"),
        Opt("rank", _int, None, "POD rank"),
        Opt("energy", _float, None, "POD energy target in percent"),
        Opt("center", _bool, False, "center data before POD"),
        Opt("report_dir", _str, None, "directory for residual CSV and figure"),
    ],
    "extend": [
        Opt("model", _str, None, "model file (pipeline, dmap or gh)"),
        Opt("data", _str, None, "matrix of query points"),
        Opt("out", _str, None, "CSV file to write"),
    ],
    "predict": [
        Opt("model", _str, None, "pipeline model file"),
        Opt("data", _str, None, "snapshot matrix the model was fitted from"),
        Opt("params", _str, None, "parameter table the model was fitted from"),
        Opt("route", str, "params-to-obs", "params-to-obs, obs-to-params, partial-to-params, partial-to-partial or roundtrip"),
        Opt("mask", _str, None, "observed entries for partial routes (default: the model's mask)"),
        Opt("target_mask", _str, None, "predicted entries for partial-to-partial (default: all)"),
        Opt("split", str, "test", "test (held-out rows) or all"),
        Opt("out", _str, None, "output directory (must exist)"),
        Opt("figures", _bool, True, "write SVG figures next to the CSVs"),
    ],
    "compare": [
        Opt("model", _str, None, "pipeline model file"),
        Opt("data", _str, None, "snapshot matrix the model was fitted from"),
        Opt("out", _str, None, "output directory (must exist)"),
        Opt("sweep", str, "both", "mask, rank or both"),
        Opt("rank", _int, None, "POD rank for the mask sweep (default: number of latent coordinates)"),
        Opt("mask_size", int, 3, "entries per mask in the mask sweep"),
        Opt("n_masks", int, 20, "random masks in the mask sweep"),
        Opt("seed", int, 0, "mask sweep seed"),
        Opt("mask", _str, None, "fixed mask for the rank sweep (default: k-center of size 2n+1)"),
        Opt("max_rank", int, 10, "largest POD rank in the rank sweep"),
        Opt("figures", _bool, True, "write SVG figures next to the CSVs"),
    ],
}

REQUIRED = {
    "generate": ("dataset", "out"),
    "fit": ("data", "out"),
    "extend": ("model", "data", "out"),
    "predict": ("model", "data", "out"),
    "compare": ("model", "data", "out"),
}

# --------------------------------------------------------------------- config handling


def read_config_file(path):
    """Parse ``key = value`` lines into a dict of strings."""
    out = {}
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise FormatError(f"cannot read config file {path}: {exc.strerror}") from None
    for n, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise FormatError(f"{path}:{n}: expected key = value, got {line!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def resolve_config(command, flags, config_path=None):
    """Merge defaults, config file and explicit flags (in that order)."""
    opts = {o.name: o for o in OPTIONS[command]}
    cfg = {name: o.default for name, o in opts.items()}
    if config_path:
        for key, value in read_config_file(config_path).items():
            if key not in opts:
                raise InvalidArgument(f"unknown setting {key!r} for '{command}' in {config_path}")
            try:
                cfg[key] = opts[key].type(value)
            except ValueError:
                raise InvalidArgument(f"{config_path}: bad value {value!r} for {key}") from None
    for key, value in flags.items():
        if value is not None:
            cfg[key] = value
    missing = [k for k in REQUIRED[command] if cfg.get(k) is None]
    if missing:
        raise InvalidArgument(f"'{command}' needs: " + ", ".join("--" + k.replace("_", "-") for k in missing))
    return cfg


def format_config(cfg):
    return "".join(f"{k} = {_fmt(v)}\n" for k, v in sorted(cfg.items()))


def _fmt(v):
    if v is None:
        return "none"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def hashed_settings(cfg):
    return {k: v for k, v in cfg.items() if k not in PATH_KEYS}


def config_hash(cfg):
    return hashlib.sha256(format_config(hashed_settings(cfg)).encode()).hexdigest()


def write_resolved_config(path, command, cfg):
    text = f"# resolved settings for '{command}'\n# config_hash = {config_hash(cfg)}\n" + format_config(cfg)
    Path(path).write_text(text)


# --------------------------------------------------------------------- small I/O helpers


def _out_dir(path):
    p = Path(path)
    if not p.is_dir():
        raise FileNotFoundError(f"output directory does not exist: {p}")
    return p


def _out_file(path):
    p = Path(path)
    if not p.parent.is_dir():
        raise FileNotFoundError(f"output directory does not exist: {p.parent}")
    return p


def read_mask_file(path, d):
    """Whitespace- or comma-separated 0-based indices; ``#`` comments allowed."""
    tokens = []
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise FormatError(f"cannot read mask file {path}: {exc.strerror}") from None
    for line in lines:
        tokens += line.split("#", 1)[0].replace(",", " ").split()
    try:
        idx = [int(t) for t in tokens]
    except ValueError as exc:
        raise FormatError(f"{path}: {exc}") from None
    return gappy_pod.ObservationMask(tuple(idx), d)


def write_csv(path, header, rows, chash):
    with open(path, "w", newline="") as fh:
        fh.write(f"# config_hash = {chash}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_cell(v) for v in row])
    return path


def _cell(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return v


def _save_matrix(data, path, chash):
    datagen.save_matrix(data, path, comments=[f"config_hash = {chash}"])


# --------------------------------------------------------------------- commands


def cmd_generate(cfg):
    """Write a synthetic snapshot matrix and its parameter table."""
    out = _out_dir(cfg["out"])
    chash = config_hash(cfg)
    ext = {"csv": ".csv", "bin": ".bin"}.get(cfg["format"])
    if ext is None:
        raise InvalidArgument(f"format must be csv or bin, got {cfg['format']!r}")
    if cfg["dataset"] == "slow-manifold":
        X, P = datagen.generate_slow_manifold(cfg["eps"], cfg["n"], cfg["seed"],
                                              transient=cfg["transient"], return_params=True)
    elif cfg["dataset"] == "surrogate":
        P = datagen.cvd_parameter_grid(cfg["grid"])
        X = datagen.generate_surrogate_cvd(P, cfg["dim"], cfg["seed"])
    else:
        raise InvalidArgument(f"unknown dataset {cfg['dataset']!r}; use slow-manifold or surrogate")
    files = [out / f"snapshots{ext}", out / f"params{ext}"]
    _save_matrix(X, files[0], chash)
    _save_matrix(P, files[1], chash)
    write_resolved_config(out / "generate_config.txt", "generate", cfg)
    print(f"wrote {files[0]} ({X.shape[0]}x{X.shape[1]}) and {files[1]}")
    return 0


def _split(n, cfg):
    if cfg["holdout"] <= 0:
        return np.arange(n), np.arange(0)
    return workflows.holdout_split(n, cfg["holdout"], cfg["seed"])


def cmd_fit(cfg):
    """Fit a pipeline, diffusion map, harmonics or POD model and save it."""
    out = _out_file(cfg["out"])
    X = datagen.read_array(cfg["data"])
    train, test = _split(X.shape[0], cfg)
    kind = cfg["kind"]
    extra = dict(
        command="fit",
        settings={k: _fmt(v) for k, v in sorted(hashed_settings(cfg).items())},
        config_hash=config_hash(cfg),
        dataset_hash=dmaps.data_hash(X),
        train_index=train.tolist(),
        test_index=test.tolist(),
    )
    P = None
    if cfg["params"] is not None:
        P = datagen.read_array(cfg["params"])
        if P.shape[0] != X.shape[0]:
            raise InvalidArgument(f"{cfg['data']} has {X.shape[0]} rows but {cfg['params']} has {P.shape[0]}")
        extra["params_hash"] = dmaps.data_hash(P)
    elif kind in ("pipeline", "gh"):
        raise InvalidArgument(f"fitting a {kind} needs --params")

    report = None
    if kind == "pipeline":
        mask = read_mask_file(cfg["mask"], X.shape[1]) if cfg["mask"] else None
        model = workflows.fit_pipeline(
            X[train], P[train], bandwidth_multiplier=cfg["bandwidth_multiplier"], n_pairs=cfg["n_pairs"],
            k_max=cfg["k_max"], top_m=cfg["top_m"], threshold=cfg["threshold"], delta=cfg["delta"],
            gh_bandwidth_multiplier=cfg["gh_bandwidth_multiplier"], partial_mask=mask,
            partial_size=cfg["partial_size"],
        )
        report = model.residual_report
        summary = f"pipeline with {model.n_latent} latent coordinate(s) {list(model.dmap.selected)}"
    elif kind == "dmap":
        dm = dmaps.fit(X[train], KernelConfig(median_bandwidth(X[train], cfg["bandwidth_multiplier"])),
                       cfg["n_pairs"])
        report = parsimony.select_coordinates(parsimony.residuals(dm, cfg["k_max"]),
                                              top_m=cfg["top_m"], threshold=cfg["threshold"])
        model = dm.with_selection(report.selected)
        summary = f"diffusion map, selected coordinates {list(model.selected)}"
    elif kind == "gh":
        bw = median_bandwidth(X[train], cfg["gh_bandwidth_multiplier"])
        model = harmonics.gh_fit(X[train], P[train], bw, cfg["delta"])
        summary = f"geometric harmonics, {model.n_retained} of {model.n_candidates} modes retained"
    elif kind == "pod":
        if cfg["rank"] is None and cfg["energy"] is None:
            raise InvalidArgument("a POD fit needs --rank or --energy")
        model = gappy_pod.pod_fit(X[train], rank=cfg["rank"], energy_percent=cfg["energy"], center=cfg["center"])
        summary = f"POD rank {model.rank}, E = {model.energy_captured:.4f}%"
    else:
        raise InvalidArgument(f"unknown model kind {kind!r}")

    persist.save_model(model, out, extra)
    write_resolved_config(out.with_name(out.name + ".config.txt"), "fit", cfg)
    if report is not None and cfg["report_dir"]:
        rdir = _out_dir(cfg["report_dir"])
        rows = [(k, r, int(k in report.selected)) for k, r in zip(report.labels, report.r)]
        write_csv(rdir / "residuals.csv", ["k", "r_k", "selected"], rows, extra["config_hash"])
        plotting.residual_bars(report, rdir / "residuals.svg", note=f"config_hash = {extra['config_hash']}")
    print(f"wrote {out}: {summary}")
    return 0


def cmd_extend(cfg):
    """Extend a saved model to new points (Nystrom or harmonics)."""
    out = _out_file(cfg["out"])
    model = persist.load_model(cfg["model"])
    Y = datagen.read_array(cfg["data"])
    chash = config_hash(cfg)
    if isinstance(model, workflows.Pipeline):
        model = model.dmap
    if isinstance(model, dmaps.DMapModel):
        labels = model.selected or tuple(range(2, model.n_pairs + 1))
        values = dmaps.nystrom_extend(model, Y, labels)
        header = [f"phi_{k}" for k in labels]
    elif isinstance(model, harmonics.GHModel):
        values = harmonics.gh_extend(model, Y)
        header = [f"f_{j}" for j in range(values.shape[1])]
        dist = harmonics.support_distance(model, Y)
        values = np.column_stack([values, dist])
        header.append("support_distance")
    else:
        raise InvalidArgument("extend needs a pipeline, diffusion map or harmonics model")
    write_csv(out, ["row"] + header, ([i] + list(v) for i, v in enumerate(values)), chash)
    print(f"wrote {out} ({len(values)} rows)")
    return 0


def _load_pipeline(cfg, X):
    model, extra = persist.load_model(cfg["model"], with_extra=True)
    if not isinstance(model, workflows.Pipeline):
        raise InvalidArgument(f"{cfg['model']} does not hold a pipeline")
    expected, actual = extra.get("dataset_hash") or "none", dmaps.data_hash(X)
    if expected != actual:
        raise DataMismatch(
            f"{cfg['model']} was fitted on dataset {expected[:16]}..., but {cfg['data']} hashes to {actual[:16]}..."
        )
    return model, extra


def _rows_for(cfg, extra, n):
    if cfg["split"] == "test":
        idx = np.asarray(extra.get("test_index", []), dtype=int)
        if idx.size == 0:
            raise InvalidArgument("model has no held-out rows; use --split all")
        return idx
    if cfg["split"] == "all":
        return np.arange(n)
    raise InvalidArgument(f"split must be test or all, got {cfg['split']!r}")


def cmd_predict(cfg):
    """Run one prediction route on the held-out rows and write CSV reports."""
    out = _out_dir(cfg["out"])
    chash = config_hash(cfg)
    X = datagen.read_array(cfg["data"])
    pipe, extra = _load_pipeline(cfg, X)
    rows = _rows_for(cfg, extra, X.shape[0])
    route = cfg["route"]
    P = None
    if route != "roundtrip" and route != "partial-to-partial":
        if cfg["params"] is None:
            raise InvalidArgument(f"route {route} needs --params")
        P = datagen.read_array(cfg["params"])
        if extra.get("params_hash") != dmaps.data_hash(P):
            raise DataMismatch(f"{cfg['params']} differs from the parameter table the model was fitted on")

    if route.startswith("partial"):
        mask = read_mask_file(cfg["mask"], X.shape[1]) if cfg["mask"] else pipe.partial_mask
        if mask is None:
            raise InvalidArgument("the model has no partial-observation mask; pass --mask")
        if mask != pipe.partial_mask:
            pipe = workflows.with_partial_mask(pipe, mask)
        if len(mask) < workflows.whitney_min_observations(pipe.n_latent):
            warnings.warn(f"{len(mask)} observed entries is below 2n+1 = "
                          f"{workflows.whitney_min_observations(pipe.n_latent)} for n = {pipe.n_latent}")
        observed = X[rows][:, mask.index]

    if route == "params-to-obs":
        pred = workflows.predict_observation_from_params(pipe, P[rows])
        actual, label = X[rows], "observation"
    elif route == "obs-to-params":
        pred = workflows.predict_params_from_observation(pipe, X[rows])
        actual, label = P[rows], "parameter"
    elif route == "partial-to-params":
        pred = workflows.predict_params_from_partial(pipe, observed)
        actual, label = P[rows], "parameter"
    elif route == "partial-to-partial":
        target = read_mask_file(cfg["target_mask"], X.shape[1]) if cfg["target_mask"] else None
        pred = workflows.predict_partial_from_partial(pipe, observed, target)
        actual = X[rows] if target is None else X[rows][:, target.index]
        label = "observation"
    elif route == "roundtrip":
        pred = workflows.reconstruct_from_observation(pipe, X[rows])
        actual, label = X[rows], "observation"
    else:
        raise InvalidArgument(f"unknown route {route!r}")

    value = np.atleast_2d(pred.value)
    latent = np.atleast_2d(pred.latent)
    err = workflows.relative_error(value, actual)
    per_sample = np.nanmean(np.abs(err), axis=1)
    stem = route.replace("-", "_")
    header = ["sample", "mean_abs_rel_error_pct"] + [f"latent_{k}" for k in pipe.dmap.selected]
    write_csv(out / f"{stem}_samples.csv", header,
              ([int(i), e] + list(z) for i, e, z in zip(rows, per_sample, latent)), chash)
    pairs = ([int(rows[i]), j, value[i, j], actual[i, j], err[i, j]]
             for i in range(value.shape[0]) for j in range(value.shape[1]))
    write_csv(out / f"{stem}_pairs.csv", ["sample", "entry", "predicted", "actual", "rel_error_pct"], pairs, chash)
    per_entry = np.nanmean(np.abs(err), axis=0)
    write_csv(out / f"{stem}_summary.csv", ["entry", "mean_abs_rel_error_pct"],
              ([j, e] for j, e in enumerate(per_entry)), chash)
    if cfg["figures"]:
        plotting.predicted_vs_actual(value, actual, out / f"{stem}.svg", label, note=f"config_hash = {chash}")
    write_resolved_config(out / f"predict_{stem}_config.txt", "predict", cfg)
    print(f"{route}: {len(rows)} samples, mean |relative error| = {np.nanmean(per_sample):.4g}%")
    return 0


def cmd_compare(cfg):
    """Gappy POD against gappy diffusion maps over mask and rank sweeps."""
    out = _out_dir(cfg["out"])
    chash = config_hash(cfg)
    X = datagen.read_array(cfg["data"])
    pipe, extra = _load_pipeline(cfg, X)
    train = np.asarray(extra["train_index"], dtype=int)
    test = np.asarray(extra.get("test_index", []), dtype=int)
    if test.size == 0:
        raise InvalidArgument("model has no held-out rows to compare on")
    X_train, X_test = X[train], X[test]
    d = X.shape[1]
    if cfg["sweep"] not in ("mask", "rank", "both"):
        raise InvalidArgument(f"sweep must be mask, rank or both, got {cfg['sweep']!r}")

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", gappy_pod.IllConditionedWarning)
        if cfg["sweep"] in ("mask", "both"):
            rank = cfg["rank"] or pipe.n_latent
            basis = gappy_pod.pod_fit(X_train, rank=rank)
            rows = []
            for t in range(cfg["n_masks"]):
                mask = workflows.random_mask(d, cfg["mask_size"], seed=cfg["seed"] + t)
                rep = workflows.compare_gappy(pipe, basis, mask, X_test)
                rows.append([t, ";".join(map(str, mask.known_indices)), rank, rep.condition_number,
                             float(np.mean(rep.pod_residual_on_known)),
                             float(np.mean(rep.pod_error)), float(np.mean(rep.dmap_error))])
            write_csv(out / "mask_sweep.csv",
                      ["mask_id", "indices", "pod_rank", "cond_A", "pod_residual_on_known",
                       "gappy_pod_error_pct", "gappy_dmap_error_pct"], rows, chash)
            if cfg["figures"]:
                cols = np.array([[r[3], r[5], r[6]] for r in rows], dtype=float)
                plotting.cond_vs_error(cols[:, 0], cols[:, 1], cols[:, 2], out / "mask_sweep.svg",
                                         note=f"config_hash = {chash}")
            print(f"mask sweep: {len(rows)} masks of {cfg['mask_size']} entries at rank {rank}")

        if cfg["sweep"] in ("rank", "both"):
            if cfg["mask"]:
                mask = read_mask_file(cfg["mask"], d)
            else:
                mask = workflows.k_center_mask(X_train, workflows.whitney_min_observations(pipe.n_latent))
            full = gappy_pod.pod_fit(X_train, rank=1)
            rows = []
            for r in range(1, min(cfg["max_rank"], full.singular_values.size) + 1):
                basis = gappy_pod.pod_fit(X_train, rank=r)
                rep = workflows.compare_gappy(pipe, basis, mask, X_test)
                rows.append([r, gappy_pod.energy_fraction(full.singular_values, r), rep.condition_number,
                             float(np.mean(rep.pod_error)), float(np.mean(rep.dmap_error))])
            write_csv(out / "rank_sweep.csv",
                      ["pod_rank", "E_i_pct", "cond_A", "gappy_pod_error_pct", "gappy_dmap_error_pct"], rows, chash)
            if cfg["figures"]:
                plotting.energy_curve(full.singular_values, out / "energy.svg", note=f"config_hash = {chash}")
            print(f"rank sweep: ranks 1..{len(rows)} with mask {list(mask.known_indices)}")
    write_resolved_config(out / "compare_config.txt", "compare", cfg)
    return 0


COMMANDS = {"generate": cmd_generate, "fit": cmd_fit, "extend": cmd_extend,
            "predict": cmd_predict, "compare": cmd_compare}

# --------------------------------------------------------------------- entry point


def build_parser():
    parser = argparse.ArgumentParser(prog="gappydmap", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, opts in OPTIONS.items():
        p = sub.add_parser(name, help=COMMANDS[name].__doc__ or name)
        p.add_argument("--config", help="key = value settings file (flags take precedence)")
        for o in opts:
            if o.name == "dataset":
                p.add_argument("dataset", nargs="?", choices=["slow-manifold", "surrogate"], help=o.help)
                continue
            default = "none" if o.default is None else _fmt(o.default)
            p.add_argument("--" + o.name.replace("_", "-"), dest=o.name, type=o.type, default=None,
                           help=f"{o.help} (default: {default})")
    return parser


def _show_warning(message, category, filename, lineno, file=None, line=None):
    print(f"warning: {message}", file=sys.stderr)


def main(argv=None):
    args = build_parser().parse_args(argv)
    flags = {k: v for k, v in vars(args).items() if k not in ("command", "config")}
    try:
        cfg = resolve_config(args.command, flags, args.config)
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            warnings.showwarning = _show_warning
            return COMMANDS[args.command](cfg)
    except GappyDmapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
