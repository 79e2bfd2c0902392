"""Hamiltonians for the spinning-resonator interferometer.

Three levels of description:

* the Sagnac frequency splitting of the counter-propagating resonator modes,
* the effective spin model f*Jz + d*Jx + e*Jz^2 on a fixed photon sector,
* the microscopic two-mode + two-level-atom Hamiltonian restricted to a
  conserved total-excitation sector.

Frequencies are angular (rad/s) and lengths are in meters throughout.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .spin import build_spin_operators, check_spin, dicke_dim

__all__ = [
    "SPEED_OF_LIGHT",
    "SagnacParams",
    "EffectiveModelParams",
    "MicroscopicParams",
    "sagnac_shift",
    "effective_coupling",
    "ground_manifold_coupling",
    "effective_hamiltonian",
    "microscopic_hamiltonian",
    "microscopic_basis",
    "excitation_number_operator",
    "two_mode_sector_hamiltonian",
    "schwinger_equivalence_check",
]

SPEED_OF_LIGHT = 299_792_458.0  # m/s


@dataclass(frozen=True)
class SagnacParams:
    """Resonator and probe parameters entering the rotation-induced splitting."""

    n0: float                 # refractive index
    radius: float             # resonator radius (m)
    omega_rot: float          # angular velocity of the spinning resonator (rad/s)
    omega_l: float            # optical resonance angular frequency (rad/s)
    wavelength: float         # probe wavelength (m)
    dn0_dlambda: float = 0.0  # dispersion dn0/dlambda (1/m)
    c: float = SPEED_OF_LIGHT

    def __post_init__(self):
        for name in ("n0", "radius", "omega_l", "wavelength", "c"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


@dataclass(frozen=True)
class EffectiveModelParams:
    """Parameters of the effective spin model f*Jz + d*Jx + e*Jz^2.

    f = 2*Delta (detuning coefficient), d = 2*g_eff (mode coupling),
    e = 2*U (Kerr nonlinearity), all angular frequencies; t is the
    evolution time and j the spin of the photon sector (n = 2j photons).
    """

    f: float
    d: float
    e: float
    t: float
    j: float

    def __post_init__(self):
        check_spin(self.j)
        if self.t < 0:
            raise ValueError("evolution time must be nonnegative")
        for name in ("f", "d", "e"):
            if not np.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")

    @property
    def r(self):
        return float(np.hypot(self.f, self.d))


@dataclass(frozen=True)
class MicroscopicParams:
    """Two counter-propagating modes coupled to a detuned two-level atom.

    Mode frequencies are omega_l +/- delta (cw/ccw); the atom sits at
    omega_a.  g_cw/g_ccw are real coupling strengths and n_total is the
    conserved excitation number of the sector of interest.
    """

    omega_l: float
    delta: float
    omega_a: float
    g_cw: float
    g_ccw: float
    n_total: int

    def __post_init__(self):
        if self.n_total < 1:
            raise ValueError("n_total must be >= 1")
        for gamma, det in (("cw", self.detuning_cw), ("ccw", self.detuning_ccw)):
            if det == 0:
                raise ValueError(f"zero atom detuning for {gamma} mode")
        # dispersive regime is advisory only: warn, never reject
        for gamma, g, det in (
            ("cw", self.g_cw, self.detuning_cw),
            ("ccw", self.g_ccw, self.detuning_ccw),
        ):
            if abs(g) * 10 > abs(det):
                warnings.warn(
                    f"coupling g_{gamma}={g} is not small against detuning "
                    f"{det}; dispersive approximation may fail",
                    stacklevel=2,
                )

    @property
    def omega_cw(self):
        return self.omega_l + self.delta

    @property
    def omega_ccw(self):
        return self.omega_l - self.delta

    @property
    def detuning_cw(self):
        return self.omega_a - self.omega_cw

    @property
    def detuning_ccw(self):
        return self.omega_a - self.omega_ccw


def sagnac_shift(p: SagnacParams) -> float:
    """Rotation-induced splitting Delta of the cw/ccw resonance frequencies.

    Delta = (n0 R Omega omega_l / c) (1 - 1/n0^2 - (lambda/n0) dn0/dlambda);
    linear in Omega, sign follows the rotation sense.
    """
    geom = 1.0 - 1.0 / p.n0**2 - (p.wavelength / p.n0) * p.dn0_dlambda
    return (p.n0 * p.radius * p.omega_rot * p.omega_l / p.c) * geom


def effective_coupling(g_cw, g_ccw, detuning_cw, detuning_ccw) -> float:
    """Atom-mediated coupling g_eff = (1/2)(1/D_cw + 1/D_ccw) g_cw g_ccw.

    The detunings D_gamma = omega_a - omega_gamma must be nonzero; the
    resonant regime is outside the validity of the dispersive elimination.
    """
    if detuning_cw == 0 or detuning_ccw == 0:
        raise ValueError("zero detuning: dispersive coupling formula invalid")
    return 0.5 * (1.0 / detuning_cw + 1.0 / detuning_ccw) * g_cw * g_ccw


def ground_manifold_coupling(g_cw, g_ccw, detuning_cw, detuning_ccw) -> float:
    """Signed second-order coupling acting on the atom-in-ground manifold.

    Second-order perturbation theory for an atom that stays in its ground
    state gives mode-exchange amplitude -(1/2)(1/D_cw + 1/D_ccw) g_cw g_ccw,
    i.e. minus `effective_coupling`.  The sign is irrelevant for any QFI
    (even in d) but matters for population dynamics.
    """
    return -effective_coupling(g_cw, g_ccw, detuning_cw, detuning_ccw)


def effective_hamiltonian(p: EffectiveModelParams) -> np.ndarray:
    """f*Jz + d*Jx + e*Jz^2 on the Dicke sector of spin j."""
    jx, _, jz, _ = build_spin_operators(p.j)
    return p.f * jz + p.d * jx + p.e * (jz @ jz)


def microscopic_basis(n_total):
    """Sector basis labels: (n_cw, n_ccw, excited) tuples.

    Ground-manifold states first with n_cw descending, then the excited
    manifold with n_cw descending; dimension 2*n_total + 1.
    """
    ground = [(n_total - i, i, 0) for i in range(n_total + 1)]
    excited = [(n_total - 1 - i, i, 1) for i in range(n_total)]
    return ground + excited


def microscopic_hamiltonian(p: MicroscopicParams) -> np.ndarray:
    """Exact Hamiltonian on the conserved-excitation sector of n_total quanta.

    Basis order follows `microscopic_basis`.  The atom-photon couplings carry
    the bosonic sqrt(n) ladder factors.
    """
    n_tot = p.n_total
    basis = microscopic_basis(n_tot)
    index = {lab: i for i, lab in enumerate(basis)}
    dim = len(basis)
    h = np.zeros((dim, dim), dtype=complex)
    for lab, i in index.items():
        n1, n2, exc = lab
        h[i, i] = p.omega_cw * n1 + p.omega_ccw * n2 + p.omega_a * exc
        if exc == 0:
            if n1 >= 1:
                k = index[(n1 - 1, n2, 1)]
                h[k, i] += p.g_cw * np.sqrt(n1)
                h[i, k] += p.g_cw * np.sqrt(n1)
            if n2 >= 1:
                k = index[(n1, n2 - 1, 1)]
                h[k, i] += p.g_ccw * np.sqrt(n2)
                h[i, k] += p.g_ccw * np.sqrt(n2)
    return h


def excitation_number_operator(n_total) -> np.ndarray:
    """Total excitation n_cw + n_ccw + excited on the sector basis."""
    basis = microscopic_basis(n_total)
    return np.diag([float(n1 + n2 + exc) for n1, n2, exc in basis]).astype(complex)


def two_mode_sector_hamiltonian(j, omega_l, delta, inter_u, g_eff) -> np.ndarray:
    """Two-mode Bose-Hubbard Hamiltonian on the n1+n2 = 2j Fock sector.

    Per-mode terms omega_gamma*n + U(n^2 - n) plus the exchange coupling
    g_eff (a_cw^dag a_ccw + h.c.).  Basis ordered by ascending m = (n1-n2)/2,
    i.e. n1 ascending, matching the Dicke ordering.
    """
    j = check_spin(j)
    n = round(2 * j)
    dim = n + 1
    h = np.zeros((dim, dim), dtype=complex)
    for i in range(dim):
        n1, n2 = i, n - i
        h[i, i] = (
            (omega_l + delta) * n1
            + (omega_l - delta) * n2
            + inter_u * (n1**2 - n1)
            + inter_u * (n2**2 - n2)
        )
        if i + 1 < dim:
            # <n1+1, n2-1| a_cw^dag a_ccw |n1, n2>
            amp = g_eff * np.sqrt((n1 + 1) * n2)
            h[i + 1, i] += amp
            h[i, i + 1] += amp
    return h


def schwinger_equivalence_check(omega_l, delta, inter_u, g_eff, j) -> float:
    """Max entrywise deviation between the two-mode sector Hamiltonian and
    its spin form 2*delta*Jz + 2*g_eff*Jx + 2*U*Jz^2 + const.

    On the fixed sector N = 2j the number terms reduce to the constant
    (omega_l - U)*2j + (U/2)*(2j)^2.  Contract: deviation < 1e-10.
    """
    j = check_spin(j)
    h_fock = two_mode_sector_hamiltonian(j, omega_l, delta, inter_u, g_eff)
    jx, _, jz, _ = build_spin_operators(j)
    n = 2 * j
    const = (omega_l - inter_u) * n + 0.5 * inter_u * n**2
    h_spin = (
        2 * delta * jz
        + 2 * g_eff * jx
        + 2 * inter_u * (jz @ jz)
        + const * np.eye(dicke_dim(j))
    )
    return float(np.abs(h_fock - h_spin).max())
