"""Truncated tensor-algebra signatures and the truncated signature kernel.

Level-m tensors are stored dense as flat arrays of d^m coefficients indexed
by words over {1..d} in lexicographic order (level 0 is the scalar 1).  The
practical bound d^level <= 10^7 is enforced; the intended scale is d <= 5,
level <= 10 with the occasional deeper run in low dimension.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import DomainError, ResourceLimitError
from .paths import IncrementSequence, Path, _clip_points, one_variation

MAX_TENSOR_ENTRIES = 10_000_000


def _check_storage(dim: int, level: int) -> None:
    if level < 0:
        raise DomainError("level must be nonnegative")
    if dim >= 2 and level * math.log(dim) > math.log(MAX_TENSOR_ENTRIES):
        raise ResourceLimitError(
            f"dense level-{level} tensor in dimension {dim} exceeds the "
            f"{MAX_TENSOR_ENTRIES} coefficient budget"
        )


@dataclass(frozen=True)
class TruncatedSignature:
    """Signature levels 0..L of a path in R^d.

    ``tensors[m]`` is the flat level-m array; ``tensors[0]`` is always the
    scalar 1.
    """

    dim: int
    level: int
    tensors: tuple[np.ndarray, ...]

    def __post_init__(self):
        if len(self.tensors) != self.level + 1:
            raise DomainError("need one tensor per level 0..L")
        if self.tensors[0].shape != (1,) or self.tensors[0][0] != 1.0:
            raise DomainError("level-0 coefficient must equal 1")
        for m, t in enumerate(self.tensors):
            if t.shape != (self.dim**m,):
                raise DomainError(f"level {m} tensor has wrong size")
        frozen = []
        for t in self.tensors:
            arr = np.asarray(t, dtype=np.float64)
            arr.setflags(write=False)
            frozen.append(arr)
        object.__setattr__(self, "tensors", tuple(frozen))


def _identity_levels(dim: int, level: int) -> list[np.ndarray]:
    return [np.ones(1)] + [np.zeros(dim**m) for m in range(1, level + 1)]


def _exp_levels(increment: np.ndarray, level: int) -> list[np.ndarray]:
    """Tensor exponential of a single increment: w^(x)m / m! for m <= L."""
    levels = [np.ones(1)]
    for m in range(1, level + 1):
        levels.append(np.kron(levels[-1], increment) / m)
    return levels


def _product_levels(a: list[np.ndarray], b: list[np.ndarray], dim: int, level: int) -> list[np.ndarray]:
    out = []
    for m in range(level + 1):
        acc = np.zeros(dim**m)
        for p in range(m + 1):
            acc += np.kron(a[p], b[m - p])
        out.append(acc)
    return out


def chen_product(a: TruncatedSignature, b: TruncatedSignature) -> TruncatedSignature:
    """Truncated tensor-algebra product of two signatures (Chen's identity)."""
    if a.dim != b.dim:
        raise DomainError("signatures must share dimension")
    level = min(a.level, b.level)
    levels = _product_levels(list(a.tensors), list(b.tensors), a.dim, level)
    return TruncatedSignature(a.dim, level, tuple(levels))


def truncated_signature(
    path: Path, interval: tuple[float, float] | None = None, level: int = 4
) -> TruncatedSignature:
    """Signature of the path over [s, t], truncated at the given level.

    Each linear segment contributes the tensor exponential of its increment;
    segments combine by the truncated tensor product.  Summation order is
    fixed (left to right along the path), so results do not depend on any
    scheduling.
    """
    _check_storage(path.dim, level)
    if interval is None:
        s, t = path.start_time, path.end_time
    else:
        s, t = float(interval[0]), float(interval[1])
    if s > t:
        raise DomainError("interval must satisfy s <= t")
    if s < path.start_time or t > path.end_time:
        raise DomainError("interval outside path span")
    levels = _identity_levels(path.dim, level)
    if s < t:
        pts = _clip_points(path, s, t)
        for k in range(len(pts) - 1):
            inc = pts[k + 1] - pts[k]
            if not np.any(inc):
                continue
            levels = _product_levels(levels, _exp_levels(inc, level), path.dim, level)
    return TruncatedSignature(path.dim, level, tuple(levels))


def iterated_sums_signature(incs: IncrementSequence, level: int) -> TruncatedSignature:
    """Discrete-time signature: level m sums the tensor products of every
    strictly increasing m-tuple of increments."""
    _check_storage(incs.dim, level)
    levels = _identity_levels(incs.dim, level)
    for k in range(len(incs)):
        delta = incs.deltas[k]
        for m in range(level, 0, -1):
            levels[m] = levels[m] + np.kron(levels[m - 1], delta)
    return TruncatedSignature(incs.dim, level, tuple(levels))


def _flat_index(word: Sequence[int], dim: int) -> int:
    idx = 0
    for letter in word:
        if not 1 <= letter <= dim:
            raise DomainError(f"letter {letter} outside alphabet 1..{dim}")
        idx = idx * dim + (letter - 1)
    return idx


def coordinate_coefficient(sig: TruncatedSignature, word: Sequence[int]) -> float:
    """Coefficient of one coordinate iterated integral; the empty word gives 1."""
    word = tuple(word)
    if len(word) > sig.level:
        raise DomainError(f"word of length {len(word)} exceeds level {sig.level}")
    return float(sig.tensors[len(word)][_flat_index(word, sig.dim)])


class SigKernelValue(NamedTuple):
    value: float
    remainder_bound: float
    level: int


def _kernel_tail(var_product: float, level: int) -> float:
    """sum_{m > L} v^m / (m!)^2 for v = |gamma|_1 |sigma|_1."""
    if var_product <= 0.0:
        return 0.0
    term = 1.0
    for m in range(1, level + 2):
        term *= var_product / (m * m)
    total = 0.0
    m = level + 1
    while term > 1e-300:
        total += term
        m += 1
        term *= var_product / (m * m)
        if m > level + 1000:
            break
    return total


def signature_kernel_truncated(
    gamma: Path,
    sigma: Path,
    s: float | None = None,
    t: float | None = None,
    level: int = 8,
) -> SigKernelValue:
    """Truncated signature kernel sum_{m<=L} <S^m(gamma), S^m(sigma)>_HS.

    The signatures run from each path's start time up to ``s`` and ``t``
    respectively (path end by default).  The reported remainder bound
    sum_{m>L} (|gamma|_1 |sigma|_1)^m / (m!)^2 certifies the discarded tail.
    """
    if gamma.dim != sigma.dim:
        raise DomainError("paths must share dimension")
    s = gamma.end_time if s is None else float(s)
    t = sigma.end_time if t is None else float(t)
    sig_a = truncated_signature(gamma, (gamma.start_time, s), level)
    sig_b = truncated_signature(sigma, (sigma.start_time, t), level)
    value = 0.0
    for m in range(level + 1):
        value += float(np.dot(sig_a.tensors[m], sig_b.tensors[m]))
    var_product = one_variation(gamma, (gamma.start_time, s)) * one_variation(
        sigma, (sigma.start_time, t)
    )
    return SigKernelValue(value, _kernel_tail(var_product, level), level)


def level_for_remainder(
    var_product: float, dim: int, tol: float, max_level: int = 24
) -> int:
    """Smallest truncation level whose kernel remainder bound is below tol."""
    if tol <= 0:
        raise DomainError("tol must be positive")
    best = math.inf
    for level in range(max_level + 1):
        try:
            _check_storage(dim, level)
        except ResourceLimitError:
            break
        best = _kernel_tail(var_product, level)
        if best < tol:
            return level
    raise ResourceLimitError(
        f"no feasible truncation level reaches tolerance {tol:g}; "
        f"best achievable bound is {best:.3e}"
    )
