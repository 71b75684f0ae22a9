import math

import numpy as np
import pytest

from slspec import (
    BoundaryKind,
    CharParams,
    GridFunction,
    NumericalError,
    StructuralError,
    characteristic,
    direct_spectral_data,
    eigenvalues,
    norming_constants,
    shoot,
    validate_spectral_data,
)

from conftest import linear_sigma, nodes, step_sigma, zero_sigma

PI = math.pi
SQRT2 = math.sqrt(2.0)

DD = BoundaryKind.DD
NT = BoundaryKind.NT
ND = BoundaryKind.ND
DN = BoundaryKind.DN

# Spectral data of the doubled-resolution (M=512) run on the freshly sampled
# step sigma = 0.8*1_{x>1/2}, DD, count=16; frozen as the self-consistency
# reference for the M=256 run.
STEP16_LAM = [
    3.377419087724503, 6.2831916994915655, 9.508872545063504,
    12.566383397977376, 15.758715115178543, 18.849575094085942,
    22.02744995803829, 25.132766786720076, 28.302576558980412,
    31.4159584747826, 34.58062337116105, 37.69915015699344,
    40.860246379008004, 43.98234183243831, 47.14081636152309,
    50.265533499654225,
]
STEP16_ALPHA = [
    1.0683462008987767, 1.0007810069806442, 1.0080477613867727,
    1.0007808893978105, 1.002438096946761, 1.0007806934696428,
    1.000868028484723, 1.000780419236825, 1.000218954625621,
    1.0007800667642437, 0.9998899169274064, 1.0007796361394494,
    0.999700698475434, 1.0007791274624336, 0.9995821526480994,
    1.0007785408604746,
]


class TestShoot:
    def test_free_dirichlet(self):
        # sigma = 0, lambda = pi: u = sqrt2 sin(pi x)
        res = shoot(zero_sigma(), PI, DD)
        assert abs(res.u1) < 1e-12
        assert res.du1 == pytest.approx(-SQRT2 * PI, abs=1e-11)
        assert res.l2norm_sq == pytest.approx(1.0, abs=1e-12)

    def test_free_neumann_dirichlet(self):
        # u = sqrt2 cos(pi x / 2)
        res = shoot(zero_sigma(), PI / 2, ND)
        assert abs(res.u1) < 1e-12
        assert res.l2norm_sq == pytest.approx(1.0, abs=1e-12)

    def test_constant_potential(self):
        # sigma = 2x: u = sqrt2 lam sin(pi x)/pi at lam^2 = pi^2 + 2
        lam = math.sqrt(PI**2 + 2)
        res = shoot(linear_sigma(2.0), lam, DD)
        assert abs(res.u1) <= 1e-8
        assert res.l2norm_sq == pytest.approx((PI**2 + 2) / PI**2, abs=1e-10)

    def test_trajectory_on_sigma_grid(self):
        sig = linear_sigma(2.0, M=32)
        res = shoot(sig, 1.0, DD, with_trajectory=True)
        assert res.trajectory.shape == (33, 2)
        assert res.trajectory[0, 0] == 0.0
        assert res.trajectory[0, 1] == pytest.approx(SQRT2, abs=1e-15)
        assert res.trajectory[-1, 0] == pytest.approx(res.u1)
        assert res.trajectory[-1, 1] == pytest.approx(res.du1)

    def test_negative_lambda_rejected(self):
        with pytest.raises(StructuralError):
            shoot(zero_sigma(), -1.0, DD)


class TestCharacteristic:
    def test_free_dirichlet_values(self):
        sig = zero_sigma()
        p = CharParams(DD)
        assert characteristic(sig, PI, p) == pytest.approx(0.0, abs=1e-12)
        assert characteristic(sig, PI / 2, p) == pytest.approx(SQRT2, abs=1e-12)
        assert characteristic(sig, PI / 2, p) > 0

    def test_matches_sine_pointwise(self):
        # Wronskian-type identity: residual is exactly sqrt2 sin(lambda)
        from slspec.direct import _characteristic_batch

        lams = np.linspace(0.25, 40.0, 161)
        vals = _characteristic_batch(zero_sigma(), lams, CharParams(DD))
        assert np.max(np.abs(vals - SQRT2 * np.sin(lams))) <= 1e-10

    def test_free_neumann_zeros(self):
        sig = zero_sigma()
        p = CharParams(NT, h=0.0)
        # zeros at pi(k-1) for k >= 2; residual -sqrt2 lam sin(lam)
        assert characteristic(sig, PI, p) == pytest.approx(0.0, abs=1e-10)
        assert characteristic(sig, PI / 2, p) < 0
        assert characteristic(sig, 1.5 * PI, p) > 0

    def test_constant_potential_bracket(self):
        sig = linear_sigma(2.0)
        p = CharParams(DD)
        assert characteristic(sig, 3.4, p) * characteristic(sig, 3.5, p) < 0

    def test_third_type_uses_h(self):
        sig = zero_sigma()
        lam = 1.3
        u = SQRT2 * math.cos(lam)  # u(1) for the NT shot
        du = -SQRT2 * lam * math.sin(lam)
        got = characteristic(sig, lam, CharParams(NT, h=2.0))
        assert got == pytest.approx(du + 2.0 * u, abs=1e-12)


class TestEigenvalues:
    def test_free_dirichlet(self):
        lams = eigenvalues(zero_sigma(), 3, CharParams(DD))
        assert np.max(np.abs(lams - PI * np.arange(1, 4))) <= 1e-10

    def test_constant_potential(self):
        lams = eigenvalues(linear_sigma(2.0), 2, CharParams(DD))
        truth = np.sqrt(PI**2 * np.arange(1, 3) ** 2 + 2)
        assert np.max(np.abs(lams - truth)) <= 1e-8

    def test_free_dn(self):
        lams = eigenvalues(zero_sigma(), 3, CharParams(DN, h=0.0))
        assert np.allclose(lams, PI * (np.arange(1, 4) - 0.5), atol=1e-10)

    def test_step_self_consistency(self):
        # The solver is exact for its piecewise-linear input: refining the
        # grid of the same interpolant must not move the eigenvalues.
        lam_256 = eigenvalues(step_sigma(256), 8, CharParams(DD))
        lam_interp = eigenvalues(step_sigma(256).resampled(512), 8, CharParams(DD))
        assert np.max(np.abs(lam_256 - lam_interp)) <= 1e-6
        # Freshly sampling the underlying step at 2M changes the represented
        # sigma near the jump; the spectra stay close at the data level.
        lam_fresh = eigenvalues(step_sigma(512), 8, CharParams(DD))
        assert np.max(np.abs(lam_256 - lam_fresh)) <= 1e-3

    def test_bracket_mismatch_is_loud(self):
        # free NT operator has lambda = 0 in its spectrum: only count-1
        # positive zeros live in the scan window
        with pytest.raises(NumericalError) as exc:
            eigenvalues(zero_sigma(), 4, CharParams(NT, h=0.0))
        assert exc.value.stage == "bracket"
        assert "sign changes" in str(exc.value)

    def test_strictly_increasing(self):
        lams = eigenvalues(step_sigma(), 12, CharParams(DD))
        assert np.all(np.diff(lams) > 0)


class TestNormingConstants:
    def test_free_dirichlet(self):
        alphas = norming_constants(zero_sigma(), [PI, 2 * PI], DD)
        assert np.allclose(alphas, 1.0, atol=1e-12)

    def test_constant_potential(self):
        k = np.arange(1, 5)
        lams = np.sqrt(PI**2 * k**2 + 2)
        alphas = norming_constants(linear_sigma(2.0), lams, DD)
        assert np.max(np.abs(alphas - (1 + 2 / (PI**2 * k**2)))) <= 1e-10

    def test_neumann_constant_potential(self):
        # sigma = x (q = 1), NT with h = 1: u_k = sqrt2 cos(pi(k-1)x)
        k = np.arange(1, 5)
        lams = np.sqrt(PI**2 * (k - 1) ** 2 + 1.0)
        alphas = norming_constants(linear_sigma(1.0), lams, NT, h=1.0)
        assert alphas[0] == pytest.approx(2.0, abs=1e-9)
        assert np.allclose(alphas[1:], 1.0, atol=1e-9)

    def test_non_eigenvalue_rejected(self):
        with pytest.raises(NumericalError) as exc:
            norming_constants(zero_sigma(), [3.0], DD)
        assert "lambda[0]" in str(exc.value)


class TestDirectSpectralData:
    def test_free_dirichlet_base_data(self):
        data = direct_spectral_data(zero_sigma(), 4, CharParams(DD))
        assert np.max(np.abs(data.lam - PI * np.arange(1, 5))) <= 1e-10
        assert np.allclose(data.alpha, 1.0, atol=1e-11)
        assert data.h is None

    def test_constant_potential(self):
        data = direct_spectral_data(linear_sigma(2.0), 4, CharParams(DD))
        k = np.arange(1, 5)
        assert np.max(np.abs(data.lam - np.sqrt(PI**2 * k**2 + 2))) <= 1e-8
        assert np.max(np.abs(data.alpha - (1 + 2 / (PI**2 * k**2)))) <= 1e-8

    def test_step_sigma_golden(self):
        # Frozen doubled-resolution reference; the M=256 run must stay close
        # (the residual difference is the step's representation at 2M).
        data = direct_spectral_data(step_sigma(256), 16, CharParams(DD))
        report = validate_spectral_data(data)
        assert report.ok
        assert math.isfinite(report.ell2_mu)
        assert np.max(np.abs(data.lam - STEP16_LAM)) <= 5e-4
        assert np.max(np.abs(data.alpha - STEP16_ALPHA)) <= 2e-3

    def test_output_validates_for_all_acceptance_sigmas(self):
        for sig in (zero_sigma(), linear_sigma(2.0), step_sigma()):
            data = direct_spectral_data(sig, 8, CharParams(DD))
            assert validate_spectral_data(data).ok

    def test_nt_carries_h(self):
        data = direct_spectral_data(linear_sigma(1.0), 3, CharParams(NT, h=1.0))
        assert data.h == 1.0
        truth = np.sqrt(PI**2 * np.arange(0, 3) ** 2 + 1.0)
        assert np.max(np.abs(data.lam - truth)) <= 1e-9


class TestInvariants:
    @pytest.mark.parametrize("c", [1.0, 2.0])
    def test_shift_covariance(self, c):
        sig = step_sigma()
        p = CharParams(DD)
        lam0 = eigenvalues(sig, 8, p)
        shifted = GridFunction(sig.values + c * nodes())
        lam_c = eigenvalues(shifted, 8, p)
        assert np.max(np.abs(lam_c - np.sqrt(lam0**2 + c))) <= 1e-7
        al0 = norming_constants(sig, lam0, DD)
        al_c = norming_constants(shifted, lam_c, DD)
        assert np.max(np.abs(al_c - al0 * (lam0**2 + c) / lam0**2)) <= 1e-6

    def test_self_convergence_smooth(self):
        # sigma = 2x is exactly representable at every M, so doubling the grid
        # changes nothing beyond roundoff
        p = CharParams(DD)
        lam_256 = eigenvalues(linear_sigma(2.0, M=256), 8, p)
        lam_512 = eigenvalues(linear_sigma(2.0, M=512), 8, p)
        assert np.max(np.abs(lam_256 - lam_512)) <= 1e-7
        al_256 = norming_constants(linear_sigma(2.0, M=256), lam_256, DD)
        al_512 = norming_constants(linear_sigma(2.0, M=512), lam_512, DD)
        assert np.max(np.abs(al_256 - al_512)) <= 1e-6

    def test_remainder_norms_bounded_in_count(self):
        # partial l2 norms of the remainders settle as more modes are kept
        sig = linear_sigma(2.0)
        norms = {}
        for count in (16, 32, 64):
            data = direct_spectral_data(sig, count, CharParams(DD))
            report = validate_spectral_data(data)
            norms[count] = (report.ell2_mu, report.ell2_beta)
        assert norms[32][0] <= norms[64][0] <= 1.1 * norms[32][0]
        assert norms[32][1] <= norms[64][1] <= 1.1 * norms[32][1]

    def test_sign_change_count_matches(self):
        from slspec.direct import _characteristic_batch

        count = 8
        for sig in (zero_sigma(), linear_sigma(2.0), step_sigma()):
            grid = np.linspace(1e-4, PI * (count + 0.5), 4 * 16 * (count + 1))
            vals = _characteristic_batch(sig, grid, CharParams(DD))
            changes = int(np.sum(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0))
            assert changes == count
