import numpy as np

from slspec import BoundaryKind, GridFunction, SpectralData, synthesize_data

M_DEFAULT = 256


def nodes(M=M_DEFAULT):
    return np.arange(M + 1) / M


def zero_sigma(M=M_DEFAULT):
    return GridFunction(np.zeros(M + 1))


def linear_sigma(slope, M=M_DEFAULT):
    """sigma = slope * x, i.e. the constant potential q = slope."""
    return GridFunction(slope * nodes(M))


def step_sigma(M=M_DEFAULT, height=0.8):
    return GridFunction(np.where(nodes(M) > 0.5, height, 0.0))


def base_data(kind=BoundaryKind.DD, K=64):
    return synthesize_data(kind, np.zeros(K), np.zeros(K))


def const_potential_data(K, c=2.0):
    """Analytic DD data for sigma = c*x: lambda_k^2 = pi^2 k^2 + c."""
    k = np.arange(1, K + 1)
    lam = np.sqrt(np.pi**2 * k**2 + c)
    alpha = (np.pi**2 * k**2 + c) / (np.pi**2 * k**2)
    return SpectralData(BoundaryKind.DD, lam, alpha)


def nt_shifted_data(K):
    """Analytic NT data for sigma = x, h = 1: lambda_k^2 = pi^2(k-1)^2 + 1."""
    k = np.arange(1, K + 1)
    lam = np.sqrt(np.pi**2 * (k - 1) ** 2 + 1.0)
    alpha = np.ones(K)
    alpha[0] = 2.0
    return SpectralData(BoundaryKind.NT, lam, alpha, h=1.0)


def margin_crossing_data():
    """Admissible data whose discretization at M=16 loses positivity.

    At M=16 the base modes k=8 and k=24 alias to one grid direction; making
    both norming constants extreme removes the compensating data modes, so the
    discretized I + F acquires a genuinely negative eigenvalue (found by
    bisection on the extreme alpha: the crossing sits at alpha = 2).
    """
    K = 24
    k = np.arange(1, K + 1)
    lam = np.pi * k + 0.1 / k
    alpha = np.ones(K)
    alpha[7] = 10.0
    alpha[23] = 10.0
    return SpectralData(BoundaryKind.DD, lam, alpha)
