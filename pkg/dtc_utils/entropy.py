"""Spectral kernels: eigendecomposition, support, and entropies.

Relative entropy follows the support case split: S(τ‖σ) is finite only
if supp(τ) ⊆ supp(σ), and +inf otherwise. Numerically this needs two
thresholds. An eigenvector belongs to the support if its eigenvalue
exceeds Tolerances.support times the largest eigenvalue; supp(τ) is
contained in supp(σ) if the max-norm of (I - P_σ) P_τ is at most
Tolerances.containment.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt
import scipy.linalg
import scipy.special

from .config import Settings, resolve
from .exc import (
    DimensionMismatchError,
    EigenFailureError,
    InvalidPartySetError,
    NotHermitianError,
)
from .extended import INFINITY, ExtendedReal
from .state import MultipartiteState, basis_label, marginal
from .types import ComplexMatrix, Party, RealVector

logger = logging.getLogger(__name__)

# Relative entropies below this are reported as numerical noise.
_NEGATIVE_SLACK = 1e-8
# Share of the leaked weight a basis ket needs to be listed.
_LEAK_KET_SHARE = 0.1


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Eigenvalues in descending order and the matching eigenvectors."""

    eigenvalues: RealVector
    eigenvectors: ComplexMatrix

    def reconstruct(self) -> ComplexMatrix:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


@dataclass(frozen=True, eq=False)
class SupportProjector:
    projector: ComplexMatrix
    rank: int
    threshold_used: float
    basis: ComplexMatrix


@dataclass(frozen=True, eq=False)
class Divergence:
    """Relative entropy together with its support diagnostics.

    mismatch is the max-norm of (I - P_σ) P_τ. If the support condition
    fails, leak_direction is the unit vector in supp(τ) with the largest
    component outside supp(σ), and leak_kets lists the computational
    basis kets that carry most of that component.
    """

    value: ExtendedReal
    mismatch: float
    borderline: bool = False
    leak_direction: ComplexMatrix | None = None
    leak_kets: tuple[str, ...] = ()

    @property
    def support_violated(self) -> bool:
        return self.value.is_infinite


def spectrum(
    m: npt.ArrayLike, *, settings: Settings | None = None
) -> Spectrum:
    """Eigendecomposition of a Hermitian matrix.

    Eigenvalues in (-tol_psd, 0) are clamped to 0. Raise
    NotHermitianError or EigenFailureError.
    """
    tol = resolve(settings).tolerances
    m = np.asarray(m, dtype=np.complex128)
    scale = float(np.max(np.abs(m))) if m.size else 0.0
    if scale > 0:
        deviation = float(np.max(np.abs(m - m.conj().T))) / scale
        if deviation > tol.herm:
            raise NotHermitianError(deviation)
    try:
        w, v = scipy.linalg.eigh((m + m.conj().T) / 2)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise EigenFailureError(f"eigendecomposition failed: {exc}") from exc
    w, v = w[::-1], v[:, ::-1]
    clamp = (w < 0) & (w > -tol.psd)
    if clamp.any():
        logger.debug("clamping %d small negative eigenvalues", clamp.sum())
        w = np.where(clamp, 0.0, w)
    return Spectrum(np.ascontiguousarray(w), np.ascontiguousarray(v))


def entropy_of_eigenvalues(
    eigenvalues: RealVector, *, settings: Settings | None = None
) -> float:
    """-sum λ log λ with 0 log 0 = 0, clamped to be non-negative."""
    lam = np.clip(eigenvalues, 0.0, None)
    value = -float(np.sum(scipy.special.xlogy(lam, lam)))
    return max(value / resolve(settings).log_base, 0.0)


def von_neumann_entropy(
    s: MultipartiteState,
    base: float | None = None,
    *,
    settings: Settings | None = None,
) -> float:
    settings = _with_base(settings, base)
    return entropy_of_eigenvalues(
        spectrum(s.matrix, settings=settings).eigenvalues, settings=settings
    )


def support_projector(
    s: MultipartiteState,
    rel_threshold: float | None = None,
    *,
    settings: Settings | None = None,
) -> SupportProjector:
    """Projector onto eigenvectors with eigenvalue > rel_threshold · λ_max."""
    settings = resolve(settings)
    if rel_threshold is None:
        rel_threshold = settings.tolerances.support
    return _support(spectrum(s.matrix, settings=settings), rel_threshold)


def support_contained(
    tau: MultipartiteState,
    sigma: MultipartiteState,
    tol: float | None = None,
    *,
    settings: Settings | None = None,
) -> bool:
    """Whether supp(tau) ⊆ supp(sigma) up to tol."""
    settings = resolve(settings)
    if tol is None:
        tol = settings.tolerances.containment
    _check_same_dim(tau, sigma)
    p_tau = support_projector(tau, settings=settings)
    p_sigma = support_projector(sigma, settings=settings)
    return _mismatch(p_tau, p_sigma) <= tol


def divergence(
    tau: MultipartiteState,
    sigma: MultipartiteState,
    base: float | None = None,
    *,
    settings: Settings | None = None,
) -> Divergence:
    """Relative entropy S(tau‖sigma) with support diagnostics.

    If the support condition fails, the value is +inf. A failure within
    borderline_factor times the containment tolerance is still +inf, but
    flagged as borderline.
    """
    settings = _with_base(settings, base)
    tol = settings.tolerances
    _check_same_dim(tau, sigma)
    spec_tau = spectrum(tau.matrix, settings=settings)
    spec_sigma = spectrum(sigma.matrix, settings=settings)
    p_tau = _support(spec_tau, tol.support)
    p_sigma = _support(spec_sigma, tol.support)

    mismatch = _mismatch(p_tau, p_sigma)
    if mismatch > tol.containment:
        borderline = mismatch <= tol.borderline_factor * tol.containment
        if borderline:
            logger.info(
                "borderline support violation (mismatch %.3e)", mismatch
            )
        direction, kets = _leak(p_tau, p_sigma, tau.dims)
        return Divergence(INFINITY, mismatch, borderline, direction, kets)

    lam = np.where(
        spec_tau.eigenvalues > p_tau.threshold_used, spec_tau.eigenvalues, 0.0
    )
    tau_log_tau = float(np.sum(scipy.special.xlogy(lam, lam)))
    tau_log_sigma = _log_trace(tau.matrix, spec_sigma, p_sigma)
    value = (tau_log_tau - tau_log_sigma) / settings.log_base
    if value < -_NEGATIVE_SLACK:
        logger.warning("relative entropy %.3e clamped to 0", value)
    return Divergence(ExtendedReal.finite(max(value, 0.0)), mismatch)


def relative_entropy(
    tau: MultipartiteState,
    sigma: MultipartiteState,
    base: float | None = None,
    *,
    settings: Settings | None = None,
) -> ExtendedReal:
    """S(tau‖sigma) = tr τ log τ - tr τ log σ, or +inf on support violation.

    σ's logarithm is taken on its support only. The result is clamped to
    be non-negative.
    """
    return divergence(tau, sigma, base, settings=settings).value


def cross_log_trace(
    a: MultipartiteState,
    b: MultipartiteState,
    base: float | None = None,
    *,
    settings: Settings | None = None,
) -> ExtendedReal:
    """-tr(a log b), evaluated on b's support; +inf if supp(a) ⊄ supp(b)."""
    settings = _with_base(settings, base)
    tol = settings.tolerances
    _check_same_dim(a, b)
    p_a = support_projector(a, settings=settings)
    spec_b = spectrum(b.matrix, settings=settings)
    p_b = _support(spec_b, tol.support)
    if _mismatch(p_a, p_b) > tol.containment:
        return INFINITY
    value = -_log_trace(a.matrix, spec_b, p_b) / settings.log_base
    return ExtendedReal.finite(value)


def mutual_information(
    s: MultipartiteState,
    a: Sequence[Party],
    b: Sequence[Party],
    base: float | None = None,
    *,
    settings: Settings | None = None,
) -> float:
    """S(ρ_a) + S(ρ_b) - S(ρ_ab) for disjoint party lists a and b."""
    if set(a) & set(b):
        raise InvalidPartySetError(list(a) + list(b), s.n_parties)
    settings = _with_base(settings, base)
    s_a = von_neumann_entropy(marginal(s, a), settings=settings)
    s_b = von_neumann_entropy(marginal(s, b), settings=settings)
    s_ab = von_neumann_entropy(marginal(s, [*a, *b]), settings=settings)
    return max(s_a + s_b - s_ab, 0.0)


def _support(spec: Spectrum, rel_threshold: float) -> SupportProjector:
    lam_max = float(spec.eigenvalues[0]) if spec.eigenvalues.size else 0.0
    threshold = rel_threshold * max(lam_max, 0.0)
    basis = spec.eigenvectors[:, spec.eigenvalues > threshold]
    return SupportProjector(
        basis @ basis.conj().T, basis.shape[1], threshold, basis
    )


def _mismatch(p_tau: SupportProjector, p_sigma: SupportProjector) -> float:
    """Max-norm of (I - P_σ) P_τ."""
    outside = _outside(p_tau, p_sigma)
    return float(np.max(np.abs(outside @ p_tau.basis.conj().T)))


def _outside(
    p_tau: SupportProjector, p_sigma: SupportProjector
) -> ComplexMatrix:
    """(I - P_σ) applied to the support basis of τ."""
    return p_tau.basis - p_sigma.projector @ p_tau.basis


def _leak(
    p_tau: SupportProjector,
    p_sigma: SupportProjector,
    dims: Sequence[int],
) -> tuple[ComplexMatrix, tuple[str, ...]]:
    outside = _outside(p_tau, p_sigma)
    _, _, vh = scipy.linalg.svd(outside, full_matrices=False)
    coefficients = vh[0].conj()
    direction = p_tau.basis @ coefficients
    leaked = outside @ coefficients
    weights = np.abs(leaked) ** 2
    weights = weights / weights.sum()
    kets = tuple(
        basis_label(int(i), dims)
        for i in np.flatnonzero(weights >= _LEAK_KET_SHARE)
    )
    return direction, kets


def _log_trace(
    matrix: ComplexMatrix, spec: Spectrum, support: SupportProjector
) -> float:
    """tr(matrix log σ) with log σ restricted to supp(σ)."""
    mu = spec.eigenvalues[: support.rank]
    basis = support.basis
    weights = np.real(np.sum(basis.conj() * (matrix @ basis), axis=0))
    return float(np.sum(weights * np.log(mu)))


def _check_same_dim(a: MultipartiteState, b: MultipartiteState) -> None:
    if a.dim != b.dim:
        raise DimensionMismatchError(a.dim, b.dim)


def _with_base(settings: Settings | None, base: float | None) -> Settings:
    settings = resolve(settings)
    if base is None or base == settings.base:
        return settings
    if base <= 0 or base == 1 or math.isnan(base):
        raise ValueError(f"invalid logarithm base {base!r}")
    return settings.with_overrides(base=float(base))
