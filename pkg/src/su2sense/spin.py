"""Collective spin (Dicke basis) operators and states.

All operators are dense complex matrices over the basis |j,m>, m = -j..j
in ascending order, so index i corresponds to m = i - j.  States are plain
complex vectors over the same basis.
"""

import numpy as np

__all__ = [
    "dicke_dim",
    "check_spin",
    "build_spin_operators",
    "initial_probe_state",
    "coherent_spin_state",
    "lowest_weight_state",
    "m_values",
    "require_normalized",
    "require_hermitian",
]


def check_spin(j):
    """Validate that j is a non-negative half-integer and return it as float."""
    j = float(j)
    two_j = 2 * j
    if j < 0.5 or abs(two_j - round(two_j)) > 1e-12:
        raise ValueError(f"j must be a positive half-integer, got {j}")
    return j


def dicke_dim(j):
    """Dimension 2j+1 of the fixed-j sector."""
    j = check_spin(j)
    return round(2 * j) + 1


def m_values(j):
    """Magnetic quantum numbers m = -j..j, ascending."""
    j = check_spin(j)
    return np.arange(dicke_dim(j)) - j


def build_spin_operators(j):
    """Return (Jx, Jy, Jz, Jsq) as dense complex matrices on the j sector.

    Jz is diagonal with entries m = -j..j; the ladder elements carry the
    standard sqrt(j(j+1) - m(m+1)) factors, so [Jx, Jy] = i Jz holds as a
    matrix identity and Jsq = j(j+1) * identity.
    """
    j = check_spin(j)
    dim = dicke_dim(j)
    m = m_values(j)
    jz = np.diag(m).astype(complex)
    jplus = np.zeros((dim, dim), dtype=complex)
    jplus[np.arange(1, dim), np.arange(dim - 1)] = np.sqrt(
        j * (j + 1) - m[:-1] * (m[:-1] + 1)
    )
    jminus = jplus.conj().T
    jx = (jplus + jminus) / 2
    jy = (jplus - jminus) / 2j
    jsq = j * (j + 1) * np.eye(dim, dtype=complex)
    return jx, jy, jz, jsq


def lowest_weight_state(j):
    """|j,-j> as a basis vector."""
    psi = np.zeros(dicke_dim(j), dtype=complex)
    psi[0] = 1.0
    return psi


def initial_probe_state(j):
    """Entangled probe (|j,0> + |j,1>)/sqrt(2).

    Requires integer j >= 1 so that both the m=0 and m=1 components exist.
    """
    j = check_spin(j)
    if abs(j - round(j)) > 1e-12 or j < 1:
        raise ValueError(f"probe state needs integer j >= 1, got {j}")
    psi = np.zeros(dicke_dim(j), dtype=complex)
    i0 = round(j)  # index of m = 0
    psi[i0] = 1 / np.sqrt(2)
    psi[i0 + 1] = 1 / np.sqrt(2)
    return psi


def coherent_spin_state(j, theta0, phi0):
    """Spin coherent state exp{i theta0 [Jx sin(phi0) - Jy cos(phi0)]} |j,-j>.

    The exponential is evaluated through the Hermitian eigendecomposition of
    the exponent, so the result is unitary to machine precision.
    """
    jx, jy, _, _ = build_spin_operators(j)
    gen = theta0 * (np.sin(phi0) * jx - np.cos(phi0) * jy)
    lam, vec = np.linalg.eigh(gen)
    psi0 = lowest_weight_state(j)
    return vec @ (np.exp(1j * lam) * (vec.conj().T @ psi0))


def require_normalized(psi, tol=1e-10, what="state"):
    """Raise if psi is not unit norm; return psi unchanged."""
    nrm = np.linalg.norm(psi)
    if abs(nrm - 1.0) > tol:
        raise ValueError(f"{what} is not normalized: |psi| = {nrm}")
    return psi


def require_hermitian(mat, tol=1e-10, what="operator"):
    """Raise if mat is not Hermitian within tol; return mat unchanged."""
    dev = np.abs(mat - mat.conj().T).max()
    if dev > tol:
        raise ValueError(f"{what} is not Hermitian: max deviation {dev}")
    return mat
