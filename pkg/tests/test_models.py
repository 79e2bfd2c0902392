"""Sagnac shift, effective coupling, and the model Hamiltonians."""

import numpy as np
import pytest

from su2sense.models import (
    SPEED_OF_LIGHT,
    EffectiveModelParams,
    MicroscopicParams,
    SagnacParams,
    effective_coupling,
    effective_hamiltonian,
    excitation_number_operator,
    ground_manifold_coupling,
    microscopic_basis,
    microscopic_hamiltonian,
    sagnac_shift,
    schwinger_equivalence_check,
    two_mode_sector_hamiltonian,
)
from su2sense.spin import build_spin_operators, dicke_dim


def make_sagnac(**kw):
    base = dict(
        n0=1.4,
        radius=1.1e-3,
        omega_rot=7.292e-5,
        omega_l=1.2e15,
        wavelength=1.55e-6,
        dn0_dlambda=0.0,
    )
    base.update(kw)
    return SagnacParams(**base)


class TestSagnac:
    def test_zero_rotation(self):
        assert sagnac_shift(make_sagnac(omega_rot=0.0)) == 0.0

    def test_index_one_no_dispersion(self):
        assert sagnac_shift(make_sagnac(n0=1.0)) == pytest.approx(0.0, abs=1e-30)

    def test_formula_value(self):
        # independent scalar evaluation at n0=1.4, no dispersion
        p = make_sagnac()
        expected = (1.4 * 1.1e-3 * 7.292e-5 * 1.2e15 / SPEED_OF_LIGHT) * (1 - 1 / 1.96)
        assert sagnac_shift(p) == pytest.approx(expected, rel=1e-15)

    def test_linear_in_omega_and_radius(self):
        base = sagnac_shift(make_sagnac())
        assert sagnac_shift(make_sagnac(omega_rot=3 * 7.292e-5)) == pytest.approx(
            3 * base, rel=1e-12
        )
        assert sagnac_shift(make_sagnac(radius=2.2e-3)) == pytest.approx(
            2 * base, rel=1e-12
        )

    def test_dispersion_term(self):
        p = make_sagnac(dn0_dlambda=1e4)
        geom = 1 - 1 / 1.96 - (1.55e-6 / 1.4) * 1e4
        expected = (1.4 * 1.1e-3 * 7.292e-5 * 1.2e15 / SPEED_OF_LIGHT) * geom
        assert sagnac_shift(p) == pytest.approx(expected, rel=1e-12)

    def test_invalid_params(self):
        with pytest.raises(ValueError):
            make_sagnac(n0=-1.0)


class TestEffectiveCoupling:
    def test_symmetric_case(self):
        assert effective_coupling(0.3, 0.3, 2.0, 2.0) == pytest.approx(0.09 / 2.0)

    def test_split_detunings(self):
        # omega_l = 1600 g, omega_a = 2000 g, delta = g: detunings 399 and 401
        geff = effective_coupling(1.0, 1.0, 399.0, 401.0)
        assert geff == pytest.approx(0.5 * (1 / 399 + 1 / 401), rel=1e-15)
        assert geff == pytest.approx(1.0 / 400.0, rel=1e-5)

    def test_zero_coupling(self):
        assert effective_coupling(0.0, 0.5, 1.0, 1.0) == 0.0

    def test_zero_detuning_rejected(self):
        with pytest.raises(ValueError):
            effective_coupling(0.1, 0.1, 0.0, 1.0)

    def test_ground_manifold_sign(self):
        assert ground_manifold_coupling(1.0, 1.0, 399.0, 401.0) == pytest.approx(
            -effective_coupling(1.0, 1.0, 399.0, 401.0)
        )


class TestEffectiveHamiltonian:
    def test_pure_detuning_spin_half(self):
        h = effective_hamiltonian(EffectiveModelParams(f=1, d=0, e=0, t=0, j=0.5))
        assert np.allclose(h, np.diag([-0.5, 0.5]))

    def test_matches_constructor_contract(self):
        jx, _, jz, _ = build_spin_operators(2)
        h = effective_hamiltonian(EffectiveModelParams(f=0.7, d=1.3, e=0, t=1, j=2))
        assert np.abs(h - (0.7 * jz + 1.3 * jx)).max() < 1e-14

    def test_equal_coefficients_rotate_spectrum(self):
        # f = d tilts the quantization axis: eigenvalues sqrt(2) f m
        f = 0.9
        h = effective_hamiltonian(EffectiveModelParams(f=f, d=f, e=0, t=1, j=2))
        lam = np.linalg.eigvalsh(h)
        assert np.allclose(lam, np.sqrt(2) * f * np.arange(-2, 3), atol=1e-12)

    def test_hermitian_for_random_params(self):
        rng = np.random.default_rng(7)
        for _ in range(5):
            f, d, e = rng.standard_normal(3)
            h = effective_hamiltonian(
                EffectiveModelParams(f=f, d=d, e=e, t=0.5, j=3 / 2)
            )
            assert np.abs(h - h.conj().T).max() < 1e-14


class TestMicroscopic:
    def test_one_excitation_sector(self):
        p = MicroscopicParams(
            omega_l=10.0, delta=0.5, omega_a=100.0, g_cw=0.2, g_ccw=0.3, n_total=1
        )
        h = microscopic_hamiltonian(p)
        assert h.shape == (3, 3)
        assert microscopic_basis(1) == [(1, 0, 0), (0, 1, 0), (0, 0, 1)]
        assert np.allclose(np.diag(h).real, [10.5, 9.5, 100.0])
        assert h[2, 0] == pytest.approx(0.2)
        assert h[2, 1] == pytest.approx(0.3)

    def test_uncoupled_is_diagonal(self):
        p = MicroscopicParams(
            omega_l=10.0, delta=0.5, omega_a=100.0, g_cw=0.0, g_ccw=0.0, n_total=3
        )
        h = microscopic_hamiltonian(p)
        assert np.abs(h - np.diag(np.diag(h))).max() == 0.0

    def test_excitation_conserved(self):
        p = MicroscopicParams(
            omega_l=10.0, delta=0.7, omega_a=60.0, g_cw=0.4, g_ccw=0.9, n_total=4
        )
        h = microscopic_hamiltonian(p)
        nop = excitation_number_operator(4)
        assert np.abs(h @ nop - nop @ h).max() < 1e-10
        assert h.shape == (2 * 4 + 1,) * 2

    def test_dimension(self):
        p = MicroscopicParams(
            omega_l=1.0, delta=0.1, omega_a=5.0, g_cw=0.1, g_ccw=0.1, n_total=6
        )
        assert microscopic_hamiltonian(p).shape == (13, 13)

    def test_rejects_empty_sector(self):
        with pytest.raises(ValueError):
            MicroscopicParams(
                omega_l=1.0, delta=0.1, omega_a=5.0, g_cw=0.1, g_ccw=0.1, n_total=0
            )

    def test_dispersive_warning_is_advisory(self):
        with pytest.warns(UserWarning):
            MicroscopicParams(
                omega_l=1.0, delta=0.0, omega_a=1.5, g_cw=0.4, g_ccw=0.4, n_total=1
            )


class TestSchwingerEquivalence:
    def test_no_interaction_trivial(self):
        assert schwinger_equivalence_check(1.0, 0.3, 0.0, 0.2, 2) < 1e-12

    def test_reference_point(self):
        assert schwinger_equivalence_check(1.0, 0.7, 0.3, 0.2, 2) < 1e-10

    def test_random_draws(self):
        rng = np.random.default_rng(11)
        for _ in range(20):
            j = rng.integers(1, 11) / 2
            wl, dl, u, g = rng.standard_normal(4)
            assert schwinger_equivalence_check(wl, dl, u, g, j) < 1e-10

    def test_number_terms_constant_on_sector(self):
        # with the exchange coupling off, H - 2U Jz^2 - 2 delta Jz is a
        # multiple of the identity: (omega_l - U) 2j + (U/2) (2j)^2
        j, wl, dl, u = 3, 1.1, 0.4, 0.3
        h = two_mode_sector_hamiltonian(j, wl, dl, u, 0.0)
        _, _, jz, _ = build_spin_operators(j)
        resid = h - 2 * u * (jz @ jz) - 2 * dl * jz
        const = (wl - u) * 2 * j + 0.5 * u * (2 * j) ** 2
        assert np.abs(resid - const * np.eye(dicke_dim(j))).max() < 1e-12
