"""Gram matrices and maximum mean discrepancy between sets of paths.

The default estimator is the V-statistic (same-index terms included): with
a positive semidefinite kernel it is nonnegative by construction, which
matches the identity between the path characteristic-function distance and
the MMD of its kernel.  The U-statistic is available behind a flag.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .paths import Path
from .sdkernel import k_sd
from .signature import signature_kernel_truncated

KERNELS = ("sd_explicit", "sd_implicit", "sd_series", "sig_truncated")


@dataclass(frozen=True)
class PathSample:
    """Nonempty list of equal-dimension paths carrying uniform weights."""

    paths: tuple[Path, ...]

    def __post_init__(self):
        paths = tuple(self.paths)
        if not paths:
            raise DomainError("a path sample must be nonempty")
        if len({p.dim for p in paths}) != 1:
            raise DomainError("all paths in a sample must share dimension")
        object.__setattr__(self, "paths", paths)

    def __len__(self) -> int:
        return len(self.paths)

    @property
    def dim(self) -> int:
        return self.paths[0].dim


@dataclass(frozen=True)
class KernelSpec:
    """Discretization knobs: target per-interval 1-variation for the grid
    schemes, series tolerance, truncation level for the signature kernel."""

    mesh: float = 0.05
    tol: float = 1e-6
    level: int = 8

    def tag(self, kernel: str) -> str:
        if kernel in ("sd_explicit", "sd_implicit"):
            return f"{kernel}(mesh={self.mesh:g})"
        if kernel == "sd_series":
            return f"{kernel}(tol={self.tol:g})"
        return f"{kernel}(level={self.level})"


@dataclass(frozen=True)
class GramMatrix:
    values: np.ndarray
    kernel_tag: str

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 2 or not np.all(np.isfinite(values)):
            raise DomainError("gram values must be a finite 2-d array")
        values = values.copy()
        values.setflags(write=False)
        object.__setattr__(self, "values", values)


def _evaluate(a: Path, b: Path, kernel: str, spec: KernelSpec) -> float:
    if kernel == "sd_series":
        return k_sd(a, b, "series", tol=spec.tol)
    if kernel == "sd_explicit":
        return k_sd(a, b, "explicit", mesh=spec.mesh)
    if kernel == "sd_implicit":
        return k_sd(a, b, "implicit", mesh=spec.mesh)
    if kernel == "sig_truncated":
        return signature_kernel_truncated(a, b, level=spec.level).value
    raise DomainError(f"unknown kernel {kernel!r}; choose from {KERNELS}")


def gram(
    sample_a: PathSample,
    sample_b: PathSample | None = None,
    kernel: str = "sd_series",
    spec: KernelSpec = KernelSpec(),
) -> GramMatrix:
    """Kernel matrix between two path samples.

    With a single sample (or ``sample_b is sample_a``) only the upper
    triangle is evaluated and mirrored.
    """
    symmetric = sample_b is None or sample_b is sample_a
    sample_b = sample_a if sample_b is None else sample_b
    if sample_a.dim != sample_b.dim:
        raise DomainError("samples must share path dimension")
    rows, cols = len(sample_a), len(sample_b)
    values = np.zeros((rows, cols))
    for i in range(rows):
        start = i if symmetric else 0
        for j in range(start, cols):
            values[i, j] = _evaluate(sample_a.paths[i], sample_b.paths[j], kernel, spec)
            if symmetric and j != i:
                values[j, i] = values[i, j]
    return GramMatrix(values, spec.tag(kernel))


def mmd2(
    sample_a: PathSample,
    sample_b: PathSample,
    kernel: str = "sd_series",
    spec: KernelSpec = KernelSpec(),
    *,
    unbiased: bool = False,
) -> float:
    """Squared MMD between the empirical measures of two samples.

    V-statistic by default; ``unbiased=True`` switches the within-sample
    terms to U-statistics (needs at least two paths per sample).
    """
    k_aa = gram(sample_a, None, kernel, spec).values
    k_bb = gram(sample_b, None, kernel, spec).values
    if sample_b is sample_a:
        k_ab = k_aa
    else:
        k_ab = gram(sample_a, sample_b, kernel, spec).values
    n, m = len(sample_a), len(sample_b)
    if unbiased:
        if n < 2 or m < 2:
            raise DomainError("the unbiased estimator needs two paths per sample")
        within_a = (k_aa.sum() - np.trace(k_aa)) / (n * (n - 1))
        within_b = (k_bb.sum() - np.trace(k_bb)) / (m * (m - 1))
    else:
        within_a = k_aa.sum() / (n * n)
        within_b = k_bb.sum() / (m * m)
    cross = k_ab.sum() / (n * m)
    return float(within_a + within_b - 2.0 * cross)
