"""Independent reference implementations used only by the tests.

None of these share code paths with the package beyond the parameter
container; they trade speed for directness.
"""

import math

import numpy as np


def _charfn_std(t, alpha, beta):
    # standard S0 law (gamma=1, mu0=0), written out branch by branch
    t = np.asarray(t, dtype=float)
    a = np.abs(t)
    sgn = np.sign(t)
    if abs(alpha - 1.0) > 1e-12:
        zeta = beta * math.tan(math.pi * alpha / 2)
        aa = a**alpha
        psi = -aa - 1j * zeta * sgn * (a - aa)
    else:
        with np.errstate(divide="ignore", invalid="ignore"):
            loga = np.where(a > 0, np.log(np.where(a > 0, a, 1.0)), 0.0)
        psi = -a * (1 + 1j * beta * (2 / math.pi) * sgn * loga)
    return np.exp(psi)


def fft_density_grid(alpha, beta, n=2**20, dt=0.002):
    """Standard density on an FFT grid ``x_k = (k - n/2) * dx``."""
    assert n % 4 == 0
    idx = np.arange(n)
    t = (idx - n // 2) * dt
    sign = np.where(idx % 2 == 0, 1.0, -1.0)
    spec = np.fft.fft(sign * _charfn_std(t, alpha, beta))
    dens = (dt / (2 * math.pi)) * (sign * spec).real
    dx = 2 * math.pi / (n * dt)
    x = (idx - n // 2) * dx
    return x, dens


def fft_pdf(x, alpha, beta, gamma=1.0, mu0=0.0):
    xs, dens = fft_density_grid(alpha, beta)
    z = (np.asarray(x, dtype=float) - mu0) / gamma
    return np.interp(z, xs, dens) / gamma


def _left_tail(x, alpha, beta):
    # leading-order stable tail P(X < x) for x -> -inf
    c = math.gamma(alpha) * math.sin(math.pi * alpha / 2) / math.pi
    return c * (1 - beta) * abs(x) ** (-alpha)


def fft_cdf(x, alpha, beta, gamma=1.0, mu0=0.0):
    """Trapezoid integral of the FFT density plus an asymptotic left tail."""
    xs, dens = fft_density_grid(alpha, beta)
    cum = np.concatenate(([0.0], np.cumsum(0.5 * (dens[1:] + dens[:-1]) * np.diff(xs))))
    base = _left_tail(xs[0], alpha, beta) if alpha < 2 else 0.0
    z = (np.asarray(x, dtype=float) - mu0) / gamma
    return base + np.interp(z, xs, cum)


def brute_discrepancy(z, nu):
    """Every window sorted from scratch; returns ``(d, s, t)``."""
    z = np.clip(np.asarray(z, dtype=float), 1e-12, 1 - 1e-12)
    n = z.size
    best = (-1.0, 0, 0)
    for s in range(n):
        for t in range(s + nu - 1, n):
            w = np.sort(z[s : t + 1])
            m = w.size
            k = float(np.max(np.abs(np.arange(m) / (m - 1) - w)))
            val = math.sqrt(m) * k
            if val > best[0]:
                best = (val, s, t)
    return best


def hurst_sums(log_prices, omega):
    """Explicit discounted sums of squared one- and two-step increments."""
    x = [float(v) for v in log_prices]
    t = len(x)
    m1 = sum(omega ** (t - 1 - j) * (x[j] - x[j - 1]) ** 2 for j in range(1, t))
    m2 = sum(omega ** (t - 1 - j) * (x[j] - x[j - 2]) ** 2 for j in range(2, t))
    if m1 <= 0 or m2 <= 0:
        return m1, m2, math.nan
    h = 0.5 * math.log2((t - 1) * m2 / ((t - 2) * m1))
    return m1, m2, h


def ewq_recursion(values, omega, t0):
    """Per-observation weights: normalised on ``t0``, then decay and append.

    Returns ``(value, prob)`` pairs ordered by value, ties by time.
    """
    values = [float(v) for v in values]
    norm = (1 - omega) / (1 - omega**t0)
    probs = [norm * omega ** (t0 - i) for i in range(1, t0 + 1)]
    for _ in values[t0:]:
        probs = [p * omega for p in probs]
        probs.append(1 - omega)
    order = sorted(range(len(values)), key=lambda i: (values[i], i))
    return [(values[i], probs[i]) for i in order]
