"""Random matrix ensembles, path developments, Monte-Carlo estimators.

A path development integrates dZ = Z M(dg) through a matrix Lie group; on
a piecewise-constant control the solution is an ordered product of matrix
exponentials, one per jump.  Averaging normalised traces of unitary (GUE)
developments estimates the Schwinger-Dyson kernel; averaging Hilbert-
Schmidt pairings of general-linear (Ginibre) developments with shared
matrices estimates the signature kernel.

Sampling uses one counter-keyed stream per (seed, sample, matrix), so the
sample set is reproducible and independent of evaluation order.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
import scipy.linalg

from .errors import DomainError
from .paths import IncrementSequence, Partition, Path, piecewise_constant_increments
from .rng import TAG_GINIBRE, TAG_GUE, keyed_generator

GUE = "gue"
COMPLEX_GINIBRE = "complex_ginibre"
ENSEMBLES = (GUE, COMPLEX_GINIBRE)

# total complex entries N*N*d*M a configuration may demand
MEMORY_BUDGET_ENTRIES = 2**33

_HERMITIAN_TOL = 1e-9


@dataclass(frozen=True)
class EnsembleConfig:
    """Sampling plan: ensemble kind, matrix size N, sample count M, seed."""

    kind: str
    dim_n: int
    samples_m: int
    seed: int
    path_dim: int

    def __post_init__(self):
        if self.kind not in ENSEMBLES:
            raise DomainError(f"unknown ensemble {self.kind!r}; choose from {ENSEMBLES}")
        if self.dim_n < 1 or self.samples_m < 1 or self.path_dim < 1:
            raise DomainError("dim_n, samples_m and path_dim must be positive")
        demand = self.dim_n * self.dim_n * self.path_dim * self.samples_m
        if demand > MEMORY_BUDGET_ENTRIES:
            raise DomainError(
                f"N^2*d*M = {demand} exceeds the memory budget of "
                f"{MEMORY_BUDGET_ENTRIES} entries"
            )


def sample_matrices(cfg: EnsembleConfig, sample_index: int) -> list[np.ndarray]:
    """The d matrices of one Monte-Carlo sample, deterministic per
    (seed, sample_index, matrix index).

    GUE: Hermitian, real standard-normal diagonal, off-diagonal entries with
    independent real and imaginary parts of variance 1/2 (unit second
    absolute moment).  complex_ginibre: all entries independent complex with
    the same normalisation.
    """
    if not 0 <= sample_index < cfg.samples_m:
        raise DomainError("sample_index out of range")
    tag = TAG_GUE if cfg.kind == GUE else TAG_GINIBRE
    n = cfg.dim_n
    mats = []
    for i in range(cfg.path_dim):
        rng = keyed_generator(cfg.seed, tag, sample_index, i)
        raw = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        if cfg.kind == GUE:
            mats.append((raw + raw.conj().T) / 2.0)
        else:
            mats.append(raw / np.sqrt(2.0))
    return mats


def _combined_generator(
    incs: IncrementSequence, mats: Sequence[np.ndarray], n_dim: int, k: int
) -> np.ndarray:
    gen = np.zeros((n_dim, n_dim), dtype=np.complex128)
    for j in range(incs.dim):
        coeff = incs.deltas[k, j]
        if coeff != 0.0:
            gen = gen + mats[j] * coeff
    return gen / np.sqrt(n_dim)


def unitary_development(
    incs: IncrementSequence, mats: Sequence[np.ndarray], n_dim: int
) -> np.ndarray:
    """Ordered product over increments of exp(i/sqrt(N) sum_j A_j D_k^j).

    The A_j must be Hermitian; each factor is computed from the Hermitian
    eigendecomposition of the combined generator, so the result is unitary
    up to roundoff.
    """
    if len(mats) != incs.dim:
        raise DomainError("need one matrix per path dimension")
    for a in mats:
        if a.shape != (n_dim, n_dim):
            raise DomainError("matrix size does not match n_dim")
        scale = 1.0 + float(np.abs(a).max(initial=0.0))
        if float(np.abs(a - a.conj().T).max(initial=0.0)) > _HERMITIAN_TOL * scale:
            raise DomainError("unitary development requires Hermitian matrices")
    z = np.eye(n_dim, dtype=np.complex128)
    for k in range(len(incs)):
        if not np.any(incs.deltas[k]):
            continue
        herm = _combined_generator(incs, mats, n_dim, k)
        eigvals, eigvecs = np.linalg.eigh(herm)
        factor = (eigvecs * np.exp(1j * eigvals)) @ eigvecs.conj().T
        z = z @ factor
    return z


def gl_development(
    incs: IncrementSequence, mats: Sequence[np.ndarray], n_dim: int
) -> np.ndarray:
    """Ordered product over increments of exp(1/sqrt(N) sum_j A_j D_k^j),
    with general complex matrices (scaling-and-squaring exponentials)."""
    if len(mats) != incs.dim:
        raise DomainError("need one matrix per path dimension")
    z = np.eye(n_dim, dtype=np.complex128)
    for k in range(len(incs)):
        if not np.any(incs.deltas[k]):
            continue
        z = z @ scipy.linalg.expm(_combined_generator(incs, mats, n_dim, k))
    return z


class RkEstimate(NamedTuple):
    estimate: float
    stderr: float
    imag_diag: float


class SigKernelEstimate(NamedTuple):
    estimate: float
    stderr: float


def _mean_stderr(values: np.ndarray) -> tuple[float, float]:
    mean = float(np.mean(values))
    if len(values) < 2:
        return mean, 0.0
    return mean, float(np.std(values, ddof=1) / np.sqrt(len(values)))


def rk_montecarlo(
    path: Path, partition: Partition | None, cfg: EnsembleConfig
) -> RkEstimate:
    """Monte-Carlo estimate of the Schwinger-Dyson kernel of one path:
    mean over samples of (1/N) tr of the unitary development.

    Returns the real part, its sample standard error, and the largest
    absolute imaginary part seen (the limit is real; this is a diagnostic).
    Depends on the path only through its increments.
    """
    if cfg.kind != GUE:
        raise DomainError("rk_montecarlo requires the GUE ensemble")
    if cfg.path_dim != path.dim:
        raise DomainError("cfg.path_dim does not match the path")
    if partition is None:
        partition = Partition(path.times)
    incs = piecewise_constant_increments(path, partition)
    traces = np.empty(cfg.samples_m, dtype=np.complex128)
    for s in range(cfg.samples_m):
        mats = sample_matrices(cfg, s)
        z = unitary_development(incs, mats, cfg.dim_n)
        traces[s] = np.trace(z) / cfg.dim_n
    estimate, stderr = _mean_stderr(traces.real)
    return RkEstimate(estimate, stderr, float(np.abs(traces.imag).max(initial=0.0)))


def sigkernel_montecarlo(
    gamma: Path,
    sigma: Path,
    partition: Partition | None,
    cfg: EnsembleConfig,
) -> SigKernelEstimate:
    """Monte-Carlo estimate of the signature kernel of two paths:
    mean over samples of (1/N) tr(Z_gamma^* Z_sigma) for general-linear
    developments driven by the same Ginibre matrices.
    """
    if cfg.kind != COMPLEX_GINIBRE:
        raise DomainError("sigkernel_montecarlo requires the complex Ginibre ensemble")
    if gamma.dim != sigma.dim:
        raise DomainError("paths must share dimension")
    if cfg.path_dim != gamma.dim:
        raise DomainError("cfg.path_dim does not match the paths")
    if partition is not None:
        incs_a = piecewise_constant_increments(gamma, partition)
        incs_b = piecewise_constant_increments(sigma, partition)
    else:
        incs_a = piecewise_constant_increments(gamma, Partition(gamma.times))
        incs_b = piecewise_constant_increments(sigma, Partition(sigma.times))
    pairings = np.empty(cfg.samples_m, dtype=np.complex128)
    for s in range(cfg.samples_m):
        mats = sample_matrices(cfg, s)
        z_a = gl_development(incs_a, mats, cfg.dim_n)
        z_b = gl_development(incs_b, mats, cfg.dim_n)
        pairings[s] = np.trace(z_a.conj().T @ z_b) / cfg.dim_n
    estimate, stderr = _mean_stderr(pairings.real)
    return SigKernelEstimate(estimate, stderr)
