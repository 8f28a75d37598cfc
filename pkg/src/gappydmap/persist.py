"""Single-file model container.

Layout::

    MSMODEL1 <manifest_bytes>\\n
    <manifest: compact JSON with sorted keys, exactly manifest_bytes bytes>\\n
    MSOBS1 <N> <d>\\n<N*d little-endian float64>      # one block per array
    ...

The manifest lists every array (name and original shape) in block order,
plus the model kind and scalar metadata. JSON floats are written with
``repr`` precision, and blocks hold the raw bytes, so a save/load round trip
is bit-exact and two saves of the same model are byte-identical.
"""

import json
from pathlib import Path

import numpy as np

from . import parsimony
from .datagen import BINARY_MAGIC, read_binary_block
from .dmaps import DMapModel
from .errors import FormatError, InvalidArgument
from .gappy_pod import ObservationMask, PODBasis
from .harmonics import GHModel
from .kernel import KernelConfig
from .workflows import Pipeline

MODEL_MAGIC = "MSMODEL1"


def write_container(path, kind, meta, arrays):
    names = list(arrays)
    manifest = {
        "kind": kind,
        "meta": meta,
        "arrays": [{"name": n, "shape": list(np.shape(arrays[n]))} for n in names],
    }
    text = json.dumps(manifest, sort_keys=True, separators=(",", ":"), allow_nan=False).encode("ascii")
    with open(path, "wb") as fh:
        fh.write(f"{MODEL_MAGIC} {len(text)}\n".encode("ascii"))
        fh.write(text + b"\n")
        for n in names:
            a = np.ascontiguousarray(arrays[n], dtype="<f8")
            a2 = a.reshape(a.shape[0] if a.ndim else 1, -1) if a.size else a.reshape(0, 0)
            fh.write(f"{BINARY_MAGIC} {a2.shape[0]} {a2.shape[1]}\n".encode("ascii"))
            fh.write(a2.tobytes())


def read_container(path):
    """Return ``(kind, meta, arrays)`` from a container file."""
    path = Path(path)
    with open(path, "rb") as fh:
        head = fh.readline().decode("ascii", errors="replace").split()
        if len(head) != 2 or head[0] != MODEL_MAGIC:
            raise FormatError(f"{path}: not a model container (header {' '.join(head)!r})")
        try:
            size = int(head[1])
        except ValueError:
            raise FormatError(f"{path}: bad manifest length {head[1]!r}") from None
        raw = fh.read(size)
        if len(raw) != size or fh.read(1) != b"\n":
            raise FormatError(f"{path}: truncated manifest")
        try:
            manifest = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise FormatError(f"{path}: manifest is not valid JSON ({exc})") from None
        if not isinstance(manifest, dict) or not {"kind", "meta", "arrays"} <= set(manifest):
            raise FormatError(f"{path}: manifest lacks kind, meta or arrays")
        arrays = {}
        for entry in manifest["arrays"]:
            block = read_binary_block(fh, f"{path}:{entry['name']}")
            arrays[entry["name"]] = block.reshape(entry["shape"])
    return manifest["kind"], manifest["meta"], arrays


# --------------------------------------------------------------------- per-model records


def _dmap_record(m, prefix=""):
    meta = {
        "epsilon": m.kernel_config.epsilon,
        "density_normalize": m.kernel_config.density_normalize,
        "selected": list(m.selected),
        "training_hash": m.training_hash,
    }
    arrays = {
        "eigenvalues": m.eigenvalues,
        "eigenvectors": m.eigenvectors,
        "training_data": m.training_data,
        "row_density": m.row_density,
        "row_sums_tilde": m.row_sums_tilde,
    }
    return meta, {prefix + k: v for k, v in arrays.items()}


def _dmap_from(meta, arrays, prefix=""):
    return DMapModel(
        eigenvalues=arrays[prefix + "eigenvalues"],
        eigenvectors=arrays[prefix + "eigenvectors"],
        training_data=arrays[prefix + "training_data"],
        kernel_config=KernelConfig(meta["epsilon"], meta["density_normalize"]),
        row_density=arrays[prefix + "row_density"],
        row_sums_tilde=arrays[prefix + "row_sums_tilde"],
        selected=tuple(meta["selected"]),
        training_hash=meta["training_hash"],
    )


def _gh_record(m, prefix=""):
    meta = {
        "bandwidth": m.bandwidth,
        "delta": m.delta,
        "input_space": m.input_space,
        "training_hash": m.training_hash,
        "underfit": m.underfit,
        "n_candidates": m.n_candidates,
        "retained": m.n_retained,
    }
    arrays = {"input_points": m.input_points, "sigma": m.sigma, "psi": m.psi, "coefficients": m.coefficients}
    return meta, {prefix + k: v for k, v in arrays.items()}


def _gh_from(meta, arrays, prefix=""):
    return GHModel(
        input_points=arrays[prefix + "input_points"],
        bandwidth=meta["bandwidth"],
        delta=meta["delta"],
        sigma=arrays[prefix + "sigma"],
        psi=arrays[prefix + "psi"],
        coefficients=arrays[prefix + "coefficients"],
        input_space=meta["input_space"],
        training_hash=meta["training_hash"],
        underfit=meta["underfit"],
        n_candidates=meta["n_candidates"],
    )


def _pod_record(b):
    meta = {
        "rank": b.rank,
        "energy_captured": b.energy_captured,
        "centered": b.centered,
        "squared_energy": b.squared_energy,
    }
    return meta, {"U": b.U, "singular_values": b.singular_values, "mean": b.mean, "scale": b.scale}


def _pod_from(meta, arrays):
    return PODBasis(
        U=arrays["U"],
        singular_values=arrays["singular_values"],
        rank=meta["rank"],
        energy_captured=meta["energy_captured"],
        centered=meta["centered"],
        mean=arrays["mean"],
        scale=arrays["scale"],
        squared_energy=meta["squared_energy"],
    )


def _pipeline_record(p):
    meta, arrays = {}, {}
    dm, da = _dmap_record(p.dmap, "dmap.")
    meta["dmap"] = dm
    arrays.update(da)
    for name in ("forward_gh", "inverse_gh", "params_gh", "partial_gh"):
        model = getattr(p, name)
        if model is None:
            continue
        gm, ga = _gh_record(model, name + ".")
        meta[name] = gm
        arrays.update(ga)
    arrays["param_mean"] = p.param_mean
    arrays["param_std"] = p.param_std
    if p.partial_mask is not None:
        meta["partial_mask"] = {"indices": list(p.partial_mask.known_indices), "d": p.partial_mask.d}
        arrays["partial_mean"] = p.partial_mean
        arrays["partial_std"] = p.partial_std
    if p.residual_report is not None:
        meta["residuals"] = {"labels": list(p.residual_report.labels),
                             "selected": list(p.residual_report.selected),
                             "threshold_used": p.residual_report.threshold_used}
        arrays["residuals.r"] = p.residual_report.r
    meta["settings"] = p.settings
    return meta, arrays


def _pipeline_from(meta, arrays):
    ghs = {name: _gh_from(meta[name], arrays, name + ".") if name in meta else None
           for name in ("forward_gh", "inverse_gh", "params_gh", "partial_gh")}
    mask = None
    if "partial_mask" in meta:
        mask = ObservationMask(tuple(meta["partial_mask"]["indices"]), meta["partial_mask"]["d"])
    report = None
    if "residuals" in meta:
        res = meta["residuals"]
        report = parsimony.ResidualReport(tuple(res["labels"]), arrays["residuals.r"],
                                          tuple(res["selected"]), res["threshold_used"])
    return Pipeline(
        dmap=_dmap_from(meta["dmap"], arrays, "dmap."),
        param_mean=arrays["param_mean"],
        param_std=arrays["param_std"],
        partial_mask=mask,
        partial_mean=arrays.get("partial_mean"),
        partial_std=arrays.get("partial_std"),
        residual_report=report,
        settings=meta["settings"],
        **ghs,
    )


_WRITERS = {DMapModel: ("dmap", _dmap_record), GHModel: ("gh", _gh_record),
            PODBasis: ("pod", _pod_record), Pipeline: ("pipeline", _pipeline_record)}
_READERS = {"dmap": _dmap_from, "gh": _gh_from, "pod": _pod_from, "pipeline": _pipeline_from}


def save_model(model, path, extra=None):
    """Persist a DMapModel, GHModel, PODBasis or Pipeline.

    ``extra`` is a JSON-serializable dict stored verbatim in the manifest
    (the CLI records config and dataset hashes there).
    """
    if type(model) not in _WRITERS:
        raise InvalidArgument(f"cannot save objects of type {type(model).__name__}")
    kind, record = _WRITERS[type(model)]
    meta, arrays = record(model)
    meta = dict(meta)
    if extra:
        meta["extra"] = extra
    write_container(path, kind, meta, arrays)


def load_model(path, with_extra=False):
    kind, meta, arrays = read_container(path)
    if kind not in _READERS:
        raise FormatError(f"{path}: unknown model kind {kind!r}")
    model = _READERS[kind](meta, arrays)
    return (model, meta.get("extra", {})) if with_extra else model
