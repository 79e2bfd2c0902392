"""Dicke-basis distributions, spread metrics and the Husimi Q function."""

from dataclasses import dataclass

import numpy as np

from .spin import build_spin_operators, check_spin, dicke_dim, lowest_weight_state

__all__ = [
    "DickeDistribution",
    "QGrid",
    "dicke_distribution",
    "spread_metrics",
    "husimi_q",
    "default_sphere_grid",
]


@dataclass(frozen=True)
class DickeDistribution:
    """Probabilities |<j,m|psi>|^2 over m = -j..j."""

    j: float
    probabilities: np.ndarray

    @property
    def m(self):
        return np.arange(dicke_dim(self.j)) - self.j


@dataclass(frozen=True)
class QGrid:
    """Husimi Q samples on a (theta, phi) product grid.

    theta_weights are quadrature weights in cos(theta) (Gauss-Legendre for
    the default grid), so the sphere integral is
    sum_ik Q[i,k] * theta_weights[i] * dphi.  With the 1/pi normalization
    used here that integral equals 4/(2j+1).
    """

    thetas: np.ndarray
    phis: np.ndarray
    values: np.ndarray
    theta_weights: np.ndarray | None = None

    def sphere_integral(self):
        if self.theta_weights is not None:
            w = self.theta_weights
        else:
            # trapezoid in x = cos(theta); thetas need not be uniform
            x = np.cos(self.thetas)
            w = -np.gradient(x)  # descending x for ascending theta
        dphi = 2 * np.pi / len(self.phis)
        return float((self.values.sum(axis=1) * dphi) @ w)

    def max_value(self):
        return float(self.values.max())


def dicke_distribution(psi, j=None) -> DickeDistribution:
    """Entrywise |psi_m|^2 over the Dicke basis."""
    psi = np.asarray(psi)
    if j is None:
        j = (psi.shape[0] - 1) / 2
    j = check_spin(j)
    if dicke_dim(j) != psi.shape[0]:
        raise ValueError("state dimension does not match j")
    prob = np.abs(psi) ** 2
    total = prob.sum()
    if abs(total - 1.0) > 1e-8:
        raise ValueError(f"state is not normalized (sum p = {total})")
    return DickeDistribution(j=j, probabilities=prob / total)


def spread_metrics(dist: DickeDistribution):
    """(mean_m, std_m, participation_ratio) of the m-distribution."""
    p = dist.probabilities
    m = dist.m
    mean = float((p * m).sum())
    std = float(np.sqrt((p * (m - mean) ** 2).sum()))
    participation = float(1.0 / (p**2).sum())
    return mean, std, participation


def default_sphere_grid(n_theta=181, n_phi=181):
    """Gauss-Legendre nodes in cos(theta) plus a uniform periodic phi grid.

    Returns (thetas ascending in [0,pi], theta_weights, phis in [0,2pi)).
    Legendre quadrature makes the sphere-integral check exact (to roundoff)
    for any state with 2j < n_theta.
    """
    x, w = np.polynomial.legendre.leggauss(n_theta)
    order = np.argsort(np.arccos(x))
    thetas = np.arccos(x)[order]
    weights = w[order]
    phis = np.arange(n_phi) * (2 * np.pi / n_phi)
    return thetas, weights, phis


def _pure_state_of(rho_or_psi):
    arr = np.asarray(rho_or_psi, dtype=complex)
    if arr.ndim == 1:
        return arr, None
    if arr.ndim == 2 and arr.shape[0] == arr.shape[1]:
        if np.abs(arr - arr.conj().T).max() > 1e-10:
            raise ValueError("density matrix is not Hermitian")
        tr = float(np.real(np.trace(arr)))
        if abs(tr - 1.0) > 1e-8:
            raise ValueError(f"density matrix trace is {tr}, expected 1")
        return None, arr
    raise ValueError("expected a state vector or a square density matrix")


def husimi_q(rho_or_psi, thetas=None, phis=None, theta_weights=None) -> QGrid:
    """Husimi function Q(theta, phi) = <theta,phi| rho |theta,phi> / pi.

    The coherent state |theta,phi> factorizes as a diagonal phi-phase acting
    on a theta-only rotation of |j,-j>, so each theta row is evaluated once
    and swept over phi with a phase matrix.  Pure states are accepted
    directly; density matrices must be Hermitian with unit trace.
    """
    psi, rho = _pure_state_of(rho_or_psi)
    dim = (psi if psi is not None else rho).shape[0]
    j = (dim - 1) / 2
    if thetas is None or phis is None:
        thetas, theta_weights, phis = default_sphere_grid()
    thetas = np.asarray(thetas, dtype=float)
    phis = np.asarray(phis, dtype=float)
    if thetas.size == 0 or phis.size == 0:
        raise ValueError("grids must be nonempty")

    _, jy, _, _ = build_spin_operators(j)
    lam_y, v_y = np.linalg.eigh(jy)
    low = lowest_weight_state(j)
    coeff_low = v_y.conj().T @ low
    m = np.arange(dim) - j
    # |theta,phi> = exp(-i j phi) exp(-i phi Jz) w(theta); the global phase
    # drops out of Q, leaving <theta,phi|psi> = sum_m w_m e^{i m phi} psi_m.
    phase = np.exp(1j * np.outer(m, phis))

    values = np.empty((thetas.size, phis.size))
    for i, th in enumerate(thetas):
        w_theta = v_y @ (np.exp(-1j * lam_y * th) * coeff_low)
        if psi is not None:
            row = (w_theta.conj() * psi) @ phase
            values[i] = np.abs(row) ** 2 / np.pi
        else:
            u = w_theta.conj()[:, None] * phase  # columns: conj coherent states
            values[i] = np.real(np.einsum("mk,mn,nk->k", u.conj(), rho, u)) / np.pi
    values = np.clip(values, 0.0, None)
    return QGrid(
        thetas=thetas,
        phis=phis,
        values=values,
        theta_weights=None if theta_weights is None else np.asarray(theta_weights),
    )
