"""Shared parameter points for the test suite."""
import numpy as np

from svmom.evaluate import SvjParams

# benchmark SVJ setting used for the moment and covariance reference values
BENCH = SvjParams(mu=0.125, k=0.1, theta=0.25, sigma_v=0.1, rho=-0.7, h=1.0,
                  lam=0.01, mu_j=0.0, sigma_j=0.05)


def random_params(rng: np.random.Generator) -> dict:
    """A random parameter point satisfying the Feller condition."""
    k = rng.uniform(0.5, 3.0)
    theta = rng.uniform(0.05, 0.5)
    sigma_v = rng.uniform(0.2, 0.95) * np.sqrt(2 * k * theta)
    return {
        "mu": rng.uniform(-0.1, 0.2),
        "k": k,
        "theta": theta,
        "sigma_v": sigma_v,
        "rho": rng.uniform(-0.9, 0.6),
        "h": rng.uniform(0.5, 2.0),
        "lambda": rng.uniform(0.05, 1.0),
        "mu_j": rng.uniform(-0.2, 0.2),
        "sigma_j": rng.uniform(0.01, 0.3),
    }


# reference cov(y_n^2, y_{n+1}) of the Heston model, eight-slot keys
COV21 = {
    (0, 0, 3, 0, 1, 2, 0, 2): (-1, 4), (0, 0, 3, 0, 1, 2, 2, 0): (-5, 4),
    (0, 0, 4, 0, 1, 3, 1, 0): (3, 4), (0, 0, 5, 0, 1, 4, 0, 0): (-1, 8),
    (0, 1, 2, 0, 2, 1, 1, 0): (1, 2), (0, 1, 2, 1, 1, 1, 1, 0): (-1, 1),
    (0, 1, 3, 0, 2, 2, 0, 0): (-1, 8), (0, 1, 3, 1, 1, 2, 0, 0): (1, 4),
    (1, 0, 3, 0, 1, 2, 0, 2): (1, 2), (1, 0, 3, 0, 1, 2, 2, 0): (5, 2),
    (1, 0, 4, 0, 1, 3, 1, 0): (-3, 2), (1, 0, 5, 0, 1, 4, 0, 0): (1, 4),
    (1, 1, 2, 0, 1, 2, 2, 0): (1, 1), (1, 1, 2, 0, 2, 1, 1, 0): (-1, 1),
    (1, 1, 2, 1, 1, 1, 1, 0): (2, 1), (1, 1, 3, 0, 1, 3, 1, 0): (-3, 4),
    (1, 1, 3, 0, 2, 2, 0, 0): (1, 4), (1, 1, 3, 1, 1, 2, 0, 0): (-1, 2),
    (1, 1, 4, 0, 1, 4, 0, 0): (1, 8), (2, 0, 3, 0, 1, 2, 0, 2): (-1, 4),
    (2, 0, 3, 0, 1, 2, 2, 0): (-5, 4), (2, 0, 4, 0, 1, 3, 1, 0): (3, 4),
    (2, 0, 5, 0, 1, 4, 0, 0): (-1, 8), (2, 1, 2, 0, 1, 2, 2, 0): (-1, 1),
    (2, 1, 2, 0, 2, 1, 1, 0): (1, 2), (2, 1, 2, 1, 1, 1, 1, 0): (-1, 1),
    (2, 1, 3, 0, 1, 3, 1, 0): (3, 4), (2, 1, 3, 0, 2, 2, 0, 0): (-1, 8),
    (2, 1, 3, 1, 1, 2, 0, 0): (1, 4), (2, 1, 4, 0, 1, 4, 0, 0): (-1, 8),
}

BENCH_MOMENTS = [0.0000, 0.2615, -0.0449, 0.2508, -0.1412]
BENCH_COVS = {
    (1, 1): 0.0108, (2, 1): -0.0069, (1, 2): -0.0228, (3, 1): 0.0112, (2, 2): 0.0150,
    (1, 3): 0.0140, (4, 1): -0.0155, (3, 2): -0.0243, (2, 3): -0.0108, (1, 4): -0.0456,
}


def heston_dict(p: dict) -> dict:
    return {n: p[n] for n in ("mu", "k", "theta", "sigma_v", "rho", "h")}


def mp_eval(p, params: dict, dps: int = 50):
    """Evaluate a final-signature polynomial in high precision (independent of eval_poly)."""
    import mpmath
    with mpmath.workdps(dps):
        v = {n: mpmath.mpf(x) for n, x in params.items()}
        base = {
            "e^{-kh}": lambda: mpmath.exp(-v["k"] * v["h"]),
            "k^{-}": lambda: 1 / v["k"],
            "k^{+}": lambda: v["k"],
            "sqrt(1-rho^2)": lambda: mpmath.sqrt(1 - v["rho"] ** 2),
        }
        factors = [base[n]() if n in base else v[n] for n in p.keyfor]
        total = mpmath.mpf(0)
        for key, c in p.terms.items():
            t = mpmath.mpf(c.numerator) / c.denominator
            for f, e in zip(factors, key):
                if e:
                    t *= f ** e
            total += t
        return total


def mp_central_difference(p, params: dict, name: str, step=1e-20, dps: int = 60):
    """(f(x + s) - f(x - s)) / 2s evaluated at ``dps`` digits."""
    import mpmath
    with mpmath.workdps(dps):
        s = mpmath.mpf(step) * max(1, abs(params[name]))
        up = dict(params, **{name: mpmath.mpf(params[name]) + s})
        dn = dict(params, **{name: mpmath.mpf(params[name]) - s})
        return (mp_eval(p, up, dps) - mp_eval(p, dn, dps)) / (2 * s)
