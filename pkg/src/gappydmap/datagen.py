"""Synthetic snapshot datasets and the plain-text / binary matrix formats.

Two generators are provided:

* :func:`generate_slow_manifold` samples the attracting slow manifold of the
  singularly perturbed linear system ``x' = 2 - x - y``, ``y' = (x - y) / eps``.
* :func:`generate_surrogate_cvd` embeds a 3-parameter design (temperature,
  mass flow, pressure) smoothly into a high-dimensional state space, standing
  in for steady states of a reactor model.

Matrix files
------------
CSV: a header line ``# N=<int>,d=<int>`` followed by N comma-separated rows;
further lines starting with ``#`` are comments.
Binary: an ASCII line ``MSOBS1 <N> <d>\\n`` followed by N*d little-endian
float64 values in row-major order. The format is chosen from the file
extension (``.csv`` or anything else for binary).
"""

import math
import re
from dataclasses import dataclass, field
from itertools import product
from pathlib import Path

import numpy as np

from .errors import FormatError, InvalidArgument, InvalidData

CVD_RANGES = {
    "T": (487.0, 501.0),
    "M": (7.97e-6, 8.87e-6),
    "P": (1383.0, 1463.0),
}
CVD_GRID_SHAPE = (10, 9, 8)

# relative intrinsic length of each parameter direction in the surrogate
# embedding; distinct values keep the leading eigenfunctions non-degenerate
SURROGATE_AXIS_SCALES = (1.0, 0.8, 0.6)
SURROGATE_BASELINE = 5.0

BINARY_MAGIC = "MSOBS1"
_CSV_HEADER = re.compile(r"^#\s*N=(\d+),d=(\d+)\s*$")


@dataclass
class SnapshotMatrix:
    """N samples (rows) of a d-dimensional state.

    ``scaling`` holds per-feature ``(mean, std)`` arrays when ``data`` has been
    standardized; :meth:`unscaled` undoes it.
    """

    data: np.ndarray
    feature_names: list = None
    scaling: tuple = None

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=np.float64)
        if self.data.ndim != 2:
            raise InvalidData(f"snapshot matrix must be 2-D, got shape {self.data.shape}")
        N, d = self.data.shape
        if N < 2 or d < 1:
            raise InvalidData(f"need N >= 2 and d >= 1, got {N}x{d}")
        if not np.all(np.isfinite(self.data)):
            i, j = np.argwhere(~np.isfinite(self.data))[0]
            raise InvalidData(f"non-finite entry at row {i}, column {j}")
        if self.feature_names is not None and len(self.feature_names) != d:
            raise InvalidData(f"{len(self.feature_names)} feature names for {d} columns")

    @property
    def shape(self):
        return self.data.shape

    def standardized(self):
        mean = self.data.mean(axis=0)
        std = self.data.std(axis=0)
        std[std == 0] = 1.0
        return SnapshotMatrix((self.data - mean) / std, self.feature_names, (mean, std))

    def unscaled(self):
        if self.scaling is None:
            return self
        mean, std = self.scaling
        return SnapshotMatrix(self.data * std + mean, self.feature_names)


@dataclass
class ParameterTable:
    params: np.ndarray
    param_names: list = field(default_factory=list)

    def __post_init__(self):
        self.params = np.asarray(self.params, dtype=np.float64)
        if self.params.ndim == 1:
            self.params = self.params[:, None]
        if not np.all(np.isfinite(self.params)):
            raise InvalidData("parameter table has non-finite entries")
        if not self.param_names:
            self.param_names = [f"p{i}" for i in range(self.params.shape[1])]
        if len(self.param_names) != self.params.shape[1]:
            raise InvalidData("one name per parameter column is required")

    def __len__(self):
        return self.params.shape[0]


# --------------------------------------------------------------------- slow manifold


def slow_manifold_system(eps_singular):
    """Jacobian ``J`` and equilibrium of the linear fast/slow system."""
    J = np.array([[-1.0, -1.0], [1.0 / eps_singular, -1.0 / eps_singular]])
    return J, np.array([1.0, 1.0])


def slow_direction(eps_singular):
    """Unit eigenvector of the slow (least negative) eigenvalue, with positive x part."""
    J, _ = slow_manifold_system(eps_singular)
    vals, vecs = np.linalg.eig(J)
    v = np.real(vecs[:, np.argmax(np.real(vals))])
    return v / np.linalg.norm(v) * np.sign(v[0])


def _rk4(f, z, dt, n_steps):
    for _ in range(n_steps):
        k1 = f(z)
        k2 = f(z + 0.5 * dt * k1)
        k3 = f(z + 0.5 * dt * k2)
        k4 = f(z + dt * k3)
        z = z + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    return z


def generate_slow_manifold(eps_singular=0.01, n_samples=1000, seed=0, *, transient=10.0,
                           x_range=(-1.5, 0.6), return_params=False):
    """Points on the attracting slow manifold of ``x' = 2 - x - y, y' = (x - y)/eps``.

    Each sample starts from a random initial condition (``x0`` uniform in
    ``x_range``, ``y0 = x0 + U(-0.5, 0.5)``) and is integrated with fixed-step
    RK4 for ``transient`` fast time constants (physical time
    ``transient * eps``), long enough for the fast variable to collapse.

    With ``return_params=True`` a :class:`ParameterTable` holding the slow
    coordinate (signed distance from the equilibrium along the slow
    eigendirection) is returned as well; it parametrizes the manifold exactly.
    """
    if not (0.0 < eps_singular < 1.0):
        raise InvalidArgument(f"eps_singular must lie in (0, 1), got {eps_singular!r}")
    if int(n_samples) < 10:
        raise InvalidArgument(f"n_samples must be at least 10, got {n_samples!r}")
    n_samples = int(n_samples)

    rng = np.random.default_rng(seed)
    x0 = rng.uniform(x_range[0], x_range[1], n_samples)
    y0 = x0 + rng.uniform(-0.5, 0.5, n_samples)
    z = np.column_stack([x0, y0])

    def rhs(state):
        x, y = state[:, 0], state[:, 1]
        return np.column_stack([2.0 - x - y, (x - y) / eps_singular])

    # fast eigenvalue ~ -(1 + 1/eps); keep |lambda_fast| * dt <= 0.05
    dt = 0.05 * eps_singular / (1.0 + eps_singular)
    n_steps = int(math.ceil(transient * eps_singular / dt))
    dt = transient * eps_singular / n_steps
    z = _rk4(rhs, z, dt, n_steps)

    snap = SnapshotMatrix(z, ["x", "y"])
    if not return_params:
        return snap
    s = (z - 1.0) @ slow_direction(eps_singular)
    return snap, ParameterTable(s, ["slow_coordinate"])


# --------------------------------------------------------------------- CVD surrogate


def grid_shape_for(n):
    """Factor ``n`` into three near-equal factors ``a >= b >= c`` (720 -> 10, 9, 8)."""
    if n < 1:
        raise InvalidArgument("grid size must be positive")
    best = None
    for c in range(1, int(round(n ** (1 / 3))) + 2):
        if n % c:
            continue
        rest = n // c
        for b in range(c, int(math.isqrt(rest)) + 1):
            if rest % b:
                continue
            a = rest // b
            shape = (a, b, c)
            if best is None or max(shape) - min(shape) < max(best) - min(best):
                best = shape
    if best is None or min(best) < 2:
        raise InvalidArgument(f"{n} cannot be arranged as a 3-D grid with at least 2 levels per axis")
    return best


def cvd_parameter_grid(n=720, shape=None, ranges=None):
    """Regular (T, M, P) design grid over the reactor operating window."""
    ranges = ranges or CVD_RANGES
    shape = shape or (CVD_GRID_SHAPE if n == 720 else grid_shape_for(n))
    axes = [np.linspace(lo, hi, k) for (lo, hi), k in zip(ranges.values(), shape)]
    rows = np.array(list(product(*axes)))
    return ParameterTable(rows, list(ranges))


def scale_parameters(params, ranges=None):
    """Map each column of a (T, M, P) table to [0, 1] using the design ranges."""
    ranges = ranges or CVD_RANGES
    lo = np.array([r[0] for r in ranges.values()])
    hi = np.array([r[1] for r in ranges.values()])
    return (np.asarray(params, dtype=np.float64) - lo) / (hi - lo)


def _basis(s):
    # per-axis smooth features of a scaled parameter s in [0, 1]
    u = 2.0 * s - 1.0
    return np.stack([u, u**2, np.sin(1.5 * u), np.tanh(2.0 * u)], axis=-1)


def generate_surrogate_cvd(grid, ambient_dim=200, seed=1, *, coupling=0.15):
    """Smooth nonlinear embedding of a 3-parameter design into ``ambient_dim`` dimensions.

    Column ``c`` is ``baseline + z_c`` where ``z_c`` is a seeded Gaussian mixture
    of per-axis features ``{u, u^2, sin(1.5u), tanh(2u)}`` of the scaled
    parameters (``u`` in [-1, 1]), plus a weak pairwise product term controlled
    by ``coupling``; each column is rescaled to unit variance over the design
    grid. The map depends only on the parameter row, so the data lie exactly on
    a 3-dimensional manifold.
    """
    params = grid.params if isinstance(grid, ParameterTable) else np.asarray(grid, dtype=np.float64)
    if params.ndim != 2 or params.shape[1] != 3:
        raise InvalidArgument(f"surrogate needs exactly 3 parameters, got shape {np.shape(params)}")
    if ambient_dim < 7:
        raise InvalidArgument(f"ambient_dim must be at least 2*3+1 = 7, got {ambient_dim}")

    rng = np.random.default_rng(seed)
    feats = _basis(scale_parameters(params))                      # (N, 3, 4)
    weights = rng.standard_normal((3, 4, ambient_dim))
    weights *= np.asarray(SURROGATE_AXIS_SCALES)[:, None, None]
    cross = rng.standard_normal((3, ambient_dim)) * coupling
    Z = np.einsum("npf,pfc->nc", feats, weights)
    u = feats[:, :, 0]
    Z += (u[:, [0, 0, 1]] * u[:, [1, 2, 2]]) @ cross

    # unit variance per column, with the scale fixed by the generating weights
    # (not the sample) so that identical parameter rows give identical snapshots
    col_scale = _column_scale(weights, cross)
    X = SURROGATE_BASELINE + Z / col_scale
    return SnapshotMatrix(X, [f"s{c}" for c in range(ambient_dim)])


def _column_scale(weights, cross, n_ref=16):
    ref = cvd_parameter_grid(n_ref**3, shape=(n_ref, n_ref, n_ref))
    feats = _basis(scale_parameters(ref.params))
    Z = np.einsum("npf,pfc->nc", feats, weights)
    u = feats[:, :, 0]
    Z += (u[:, [0, 0, 1]] * u[:, [1, 2, 2]]) @ cross
    return Z.std(axis=0)


# --------------------------------------------------------------------- matrix I/O


def save_matrix(m, path, comments=()):
    """Write a matrix losslessly as CSV (``.csv``) or the binary container.

    ``comments`` are extra ``#`` lines placed after the CSV header (ignored
    for the binary format).
    """
    data = getattr(m, "data", getattr(m, "params", m))
    data = np.asarray(data, dtype=np.float64)
    if data.ndim == 1:
        data = data[:, None]
    if not np.all(np.isfinite(data)):
        raise InvalidData("refusing to save non-finite values")
    path = Path(path)
    N, d = data.shape
    if path.suffix.lower() == ".csv":
        lines = [f"# N={N},d={d}"] + [f"# {c}" for c in comments]
        lines += [",".join(repr(float(v)) for v in row) for row in data]
        path.write_text("\n".join(lines) + "\n")
    else:
        with open(path, "wb") as fh:
            fh.write(f"{BINARY_MAGIC} {N} {d}\n".encode("ascii"))
            fh.write(np.ascontiguousarray(data, dtype="<f8").tobytes())


def load_matrix(path):
    """Read a file written by :func:`save_matrix` into a :class:`SnapshotMatrix`."""
    return SnapshotMatrix(read_array(path))


def read_array(path):
    path = Path(path)
    if path.suffix.lower() == ".csv":
        return _read_csv(path)
    with open(path, "rb") as fh:
        return read_binary_block(fh, str(path))


def read_binary_block(fh, where="<stream>"):
    header = fh.readline().decode("ascii", errors="replace").split()
    if len(header) != 3 or header[0] != BINARY_MAGIC:
        raise FormatError(f"{where}: malformed header {' '.join(header)!r}")
    try:
        N, d = int(header[1]), int(header[2])
    except ValueError:
        raise FormatError(f"{where}: non-integer dimensions in header") from None
    raw = fh.read(8 * N * d)
    if len(raw) != 8 * N * d:
        raise FormatError(f"{where}: expected {N * d} values, found {len(raw) // 8}")
    data = np.frombuffer(raw, dtype="<f8").astype(np.float64).reshape(N, d)
    if not np.all(np.isfinite(data)):
        i, j = np.argwhere(~np.isfinite(data))[0]
        raise FormatError(f"{where}: non-finite value at row {i}, column {j}")
    return data


def _read_csv(path):
    lines = path.read_text().splitlines()
    if not lines:
        raise FormatError(f"{path}: empty file")
    match = _CSV_HEADER.match(lines[0].strip())
    if not match:
        raise FormatError(f"{path}: malformed header {lines[0]!r}, expected '# N=<int>,d=<int>'")
    N, d = int(match.group(1)), int(match.group(2))
    rows = [ln for ln in lines[1:] if ln.strip() and not ln.lstrip().startswith("#")]
    if len(rows) != N:
        raise FormatError(f"{path}: header says N={N} but file has {len(rows)} data rows")
    data = np.empty((N, d))
    for i, ln in enumerate(rows):
        fields = ln.split(",")
        if len(fields) != d:
            raise FormatError(f"{path}: row {i} has {len(fields)} values, expected {d}")
        for j, tok in enumerate(fields):
            try:
                v = float(tok)
            except ValueError:
                raise FormatError(f"{path}: row {i}, column {j}: cannot parse {tok.strip()!r}") from None
            if not math.isfinite(v):
                raise FormatError(f"{path}: row {i}, column {j}: non-finite value")
            data[i, j] = v
    return data
