"""Euler simulation of Heston and SVJ returns.

Variance positivity uses full truncation: ``v+ = max(v, 0)`` is used in both
drift and diffusion.  Each path starts at ``v = theta`` and discards
``burn_in`` observations.

Reproducibility contract
------------------------
The sample is split into fixed-size chunks, each an independent path.
Chunk ``c`` draws its diffusion noise from
``Generator(Philox(SeedSequence(seed, spawn_key=(c, 0))))`` and its jump
noise from ``spawn_key=(c, 1)``.  Output therefore depends only on
``(params, cfg)``, never on how many workers generated the chunks.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numba
import numpy as np

from .evaluate import HestonParams, SvjParams

__all__ = ["SimConfig", "InvalidParams", "simulate_heston", "simulate_svj", "simulate_chunks",
           "chunk_rng"]

SCHEMES = ("full_truncation",)


class InvalidParams(ValueError):
    pass


@dataclass(frozen=True)
class SimConfig:
    n_obs: int = 4_000_000
    n_substeps: int = 10
    seed: int = 0
    burn_in: int = 1000
    chunk_size: int = 100_000
    scheme: str = "full_truncation"

    def __post_init__(self):
        if self.n_obs < 1 or self.n_substeps < 1 or self.chunk_size < 1 or self.burn_in < 0:
            raise ValueError("n_obs, n_substeps, chunk_size must be >= 1 and burn_in >= 0")
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}; available: {SCHEMES}")

    def chunks(self) -> list[int]:
        full, rest = divmod(self.n_obs, self.chunk_size)
        return [self.chunk_size] * full + ([rest] if rest else [])

    def with_(self, **kw) -> "SimConfig":
        return replace(self, **kw)


def chunk_rng(seed: int, chunk: int, stream: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(chunk, stream))))


@numba.njit(cache=True, nogil=True)
def _euler_kernel(z, mu, k, theta, sigma_v, rho, h, burn_in):
    n_total, m = z.shape[0], z.shape[1]
    dt = h / m
    rho_bar = math.sqrt(1.0 - rho * rho)
    out = np.empty(n_total - burn_in)
    v = theta
    for n in range(n_total):
        y = 0.0
        for s in range(m):
            vp = v if v > 0.0 else 0.0
            sd = math.sqrt(vp * dt)
            z1 = z[n, s, 0]
            z2 = z[n, s, 1]
            y += (mu - 0.5 * vp) * dt + sd * (rho * z1 + rho_bar * z2)
            v += k * (theta - vp) * dt + sigma_v * sd * z1
        if n >= burn_in:
            out[n - burn_in] = y
    return out


def _check(params: HestonParams):
    try:
        params.validate()
    except ValueError as exc:
        raise InvalidParams(str(exc)) from exc


def _chunk(params: SvjParams, cfg: SimConfig, index: int, size: int, jumps: bool) -> np.ndarray:
    n_total = size + cfg.burn_in
    z = chunk_rng(cfg.seed, index, 0).standard_normal((n_total, cfg.n_substeps, 2))
    y = _euler_kernel(z, params.mu, params.k, params.theta, params.sigma_v, params.rho,
                      params.h, cfg.burn_in)
    if jumps:
        rng = chunk_rng(cfg.seed, index, 1)
        counts = rng.poisson(params.lam * params.h, n_total)[cfg.burn_in:]
        noise = rng.standard_normal(n_total)[cfg.burn_in:]
        # sum of `count` i.i.d. N(mu_j, sigma_j^2) draws
        y = y + (counts * params.mu_j + np.sqrt(counts) * params.sigma_j * noise)
    return y


def simulate_chunks(params: HestonParams, cfg: SimConfig, workers: int = 1) -> list[np.ndarray]:
    """Simulate the returns chunk by chunk; chunk order is fixed by ``cfg``."""
    _check(params)
    jumps = isinstance(params, SvjParams)
    if not jumps:
        params = SvjParams(**params.as_dict())
    sizes = cfg.chunks()
    tasks = [(params, cfg, i, n, jumps) for i, n in enumerate(sizes)]
    if workers <= 1:
        return [_chunk(*t) for t in tasks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda t: _chunk(*t), tasks))


def simulate_heston(params: HestonParams, cfg: SimConfig, workers: int = 1) -> np.ndarray:
    """Returns ``y_1..y_N`` of the Heston model (jumps ignored if present)."""
    if isinstance(params, SvjParams):
        params = params.heston()
    return np.concatenate(simulate_chunks(params, cfg, workers))


def simulate_svj(params: SvjParams, cfg: SimConfig, workers: int = 1) -> np.ndarray:
    """Returns of the SVJ model: Heston returns plus compound Poisson jumps."""
    if not isinstance(params, SvjParams):
        raise InvalidParams("simulate_svj requires SvjParams")
    return np.concatenate(simulate_chunks(params, cfg, workers))
