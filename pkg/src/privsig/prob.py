"""Finite-alphabet probability primitives.

Dense pmf containers over small alphabets, plus the information measures the
game solvers need. Everything is computed with natural logarithms; use
``nats_to_bits`` when reporting in bits.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

#: Total-mass deviations up to this are accepted as-is.
SUM_TOL = 1e-12
#: Deviations up to this are renormalized with a warning; larger are rejected.
RENORM_TOL = 1e-9
#: Largest alphabet size a single axis may have.
MAX_AXIS = 64

LN2 = float(np.log(2.0))


def nats_to_bits(x: float) -> float:
    return x / LN2


@dataclass(frozen=True)
class FiniteSpace:
    """A finite alphabet: symbol count plus optional display labels."""

    size: int
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        if not isinstance(self.size, int) or self.size < 1:
            raise ValueError(f"space size must be a positive int, got {self.size!r}")
        if self.size > MAX_AXIS:
            raise ValueError(f"space size {self.size} exceeds the {MAX_AXIS}-symbol cap")
        if self.labels is not None:
            object.__setattr__(self, "labels", tuple(str(s) for s in self.labels))
            if len(self.labels) != self.size:
                raise ValueError("label count does not match space size")
            if len(set(self.labels)) != len(self.labels):
                raise ValueError("labels must be distinct")


def _freeze(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, dtype=float)
    out.setflags(write=False)
    return out


def _check_mass(arr: np.ndarray, what: str) -> np.ndarray:
    """Apply the accept / renormalize-with-warning / reject rule to a pmf."""
    total = float(arr.sum())
    dev = abs(total - 1.0)
    if dev <= SUM_TOL:
        return arr
    if dev <= RENORM_TOL:
        warnings.warn(f"{what}: total mass off by {dev:.3e}; renormalizing")
        return arr / total
    raise ValueError(f"{what}: normalization failed, total mass {total!r}")


def _check_entries(arr: np.ndarray, what: str) -> None:
    if np.any(arr < 0.0):
        raise ValueError(f"{what}: negative entry {float(arr.min())!r}")
    if np.any(arr > 1.0 + SUM_TOL):
        raise ValueError(f"{what}: entry out of range {float(arr.max())!r}")


def validate_joint(p, x_space=None, z_space=None, w_space=None) -> list[str]:
    """Report invariant violations of a joint state/measurement/secret pmf.

    Accepts either a ``JointPXZW`` (re-checks its tensor) or a raw array with
    the three spaces. Returns a list of human-readable violations; an empty
    list means the tensor is a valid joint.
    """
    if isinstance(p, JointPXZW):
        x_space, z_space, w_space = p.x_space, p.z_space, p.w_space
        arr = np.asarray(p.p, dtype=float)
    else:
        arr = np.asarray(p, dtype=float)
    out: list[str] = []
    if x_space is None or z_space is None or w_space is None:
        return ["spaces: missing alphabet definitions"]
    if z_space.size != x_space.size:
        out.append("spaces: measurement alphabet must match the state alphabet")
    shape = (x_space.size, z_space.size, w_space.size)
    if arr.ndim != 3 or arr.shape != shape:
        out.append(f"shape: expected {shape}, got {arr.shape}")
        return out
    if np.any(arr < 0.0):
        idx = tuple(int(i) for i in np.argwhere(arr < 0.0)[0])
        out.append(f"entry out of range: p{idx} = {float(arr[idx])!r}")
    elif np.any(arr > 1.0 + SUM_TOL):
        idx = tuple(int(i) for i in np.argwhere(arr > 1.0 + SUM_TOL)[0])
        out.append(f"entry out of range: p{idx} = {float(arr[idx])!r}")
    dev = abs(float(arr.sum()) - 1.0)
    if dev > SUM_TOL:
        out.append(f"normalization: total mass deviates from 1 by {dev:.3e}")
    return out


@dataclass(frozen=True)
class JointPXZW:
    """Joint pmf of (state X, measurement Z, secret W) as a dense rank-3 tensor.

    The measurement shares the state alphabet, so ``p`` has shape
    ``(|X|, |X|, |W|)`` with axis order (x, z, w).
    """

    x_space: FiniteSpace
    z_space: FiniteSpace
    w_space: FiniteSpace
    p: np.ndarray

    def __post_init__(self):
        if self.z_space.size != self.x_space.size:
            raise ValueError("measurement alphabet must match the state alphabet")
        arr = np.array(self.p, dtype=float)
        shape = (self.x_space.size, self.z_space.size, self.w_space.size)
        if arr.shape != shape:
            raise ValueError(f"joint shape {arr.shape} does not match spaces {shape}")
        _check_entries(arr, "joint")
        arr = _check_mass(arr, "joint")
        object.__setattr__(self, "p", _freeze(arr))

    @classmethod
    def from_tensor(cls, p) -> "JointPXZW":
        arr = np.asarray(p, dtype=float)
        if arr.ndim != 3:
            raise ValueError("joint tensor must have rank 3 (x, z, w)")
        m, mz, q = arr.shape
        if m != mz:
            raise ValueError("state and measurement axes must have equal size")
        return cls(FiniteSpace(m), FiniteSpace(m), FiniteSpace(q), arr)

    @classmethod
    def from_xw_matrix(cls, pxw) -> "JointPXZW":
        """Lift a state/secret matrix P{X, W} to the perfect-measurement joint Z = X."""
        m_xw = np.asarray(pxw, dtype=float)
        if m_xw.ndim != 2:
            raise ValueError("P{X,W} must be a matrix")
        m, q = m_xw.shape
        p = np.zeros((m, m, q))
        for x in range(m):
            p[x, x, :] = m_xw[x, :]
        return cls.from_tensor(p)

    @cached_property
    def px(self) -> np.ndarray:
        return _freeze(self.p.sum(axis=(1, 2)))

    @cached_property
    def pw(self) -> np.ndarray:
        return _freeze(self.p.sum(axis=(0, 1)))

    @cached_property
    def pzw(self) -> np.ndarray:
        return _freeze(self.p.sum(axis=0))


_AXES = {"x": 0, "z": 1, "w": 2}


def marginal(joint: JointPXZW, keep) -> np.ndarray:
    """Marginalize a joint onto the retained axes.

    ``keep`` is an iterable over axis names from {"x", "z", "w"}; the result
    keeps those axes in (x, z, w) order.
    """
    names = list(keep)
    if not names:
        raise ValueError("must retain at least one axis")
    bad = [n for n in names if n not in _AXES]
    if bad:
        raise ValueError(f"unknown axes {bad}; expected subset of ('x', 'z', 'w')")
    if len(set(names)) != len(names):
        raise ValueError("duplicate axis names")
    drop = tuple(i for n, i in _AXES.items() if n not in names)
    return joint.p.sum(axis=drop) if drop else np.array(joint.p)


@dataclass(frozen=True)
class Pmf2:
    """Joint pmf of two finite variables, rows indexing the first."""

    row_space: FiniteSpace
    col_space: FiniteSpace
    p: np.ndarray

    def __post_init__(self):
        arr = np.array(self.p, dtype=float)
        if arr.shape != (self.row_space.size, self.col_space.size):
            raise ValueError(f"matrix shape {arr.shape} does not match spaces")
        _check_entries(arr, "pmf")
        arr = _check_mass(arr, "pmf")
        object.__setattr__(self, "p", _freeze(arr))

    @classmethod
    def from_matrix(cls, p) -> "Pmf2":
        arr = np.asarray(p, dtype=float)
        if arr.ndim != 2:
            raise ValueError("expected a matrix")
        return cls(FiniteSpace(arr.shape[0]), FiniteSpace(arr.shape[1]), arr)


def _mutual_information(j: np.ndarray) -> float:
    """I between the two axes of a joint matrix, in nats. 0 log 0 terms drop."""
    row = j.sum(axis=1)
    col = j.sum(axis=0)
    mask = j > 0.0
    if np.any(mask & ((row[:, None] == 0.0) | (col[None, :] == 0.0))):
        raise ValueError("inconsistent joint: positive mass under a zero marginal")
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(mask, j * np.log(j / (row[:, None] * col[None, :])), 0.0)
    val = float(terms.sum())
    if -1e-12 <= val < 0.0:
        return 0.0
    return val


def mutual_information(joint: Pmf2) -> float:
    """Mutual information between the two coordinates of ``joint``, in nats."""
    return _mutual_information(joint.p)


def entropy(pmf: np.ndarray) -> float:
    """Shannon entropy of a 1-D pmf in nats, with 0 log 0 = 0."""
    arr = np.asarray(pmf, dtype=float)
    mask = arr > 0.0
    return float(-(arr[mask] * np.log(arr[mask])).sum())
