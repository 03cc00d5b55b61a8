"""Two-layer nested frame codes.

A frame of n coded packets carries k1 base-layer and k2 = n - k1
enhancement-layer raw packets.  The stacked generator is block
triangular:

    G1 = [A | B]      A: k1 x k1, invertible
    G2 = [0 | C]      C: k2 x k2, invertible

so the base layer decodes from the k1 head packets alone, while the full
frame is needed for the enhancement layer.  Frame geometry adapts to the
tracked erasure rate: the head shrinks as the channel degrades.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .gf256 import gf_mat_inv, gf_matmul, gf_rank


def round_half_up(x: float) -> int:
    return math.floor(x + 0.5)


@dataclass(frozen=True)
class FramePlan:
    frame_id: int
    n: int
    k1: int
    k2: int
    eps_max: float
    sigma: float
    gen_seed: int = 0

    @property
    def base_index(self) -> int:
        """Stream index of this frame's first coded packet (and first raw)."""
        return self.frame_id * self.n


def erasure_spread(eps_mean: float, n: int, sigma: float) -> float:
    """Pessimistic erasure estimate: mean plus sigma sample deviations."""
    v = n * (1.0 - eps_mean) * eps_mean
    return eps_mean + sigma * math.sqrt(v) / n


def plan_frame(
    rtt: int,
    n_f: float,
    eps_mean: float,
    sigma: float,
    frame_id: int = 0,
    gen_seed: int = 0,
) -> FramePlan:
    if rtt < 2:
        raise ValueError(f"rtt must be >= 2, got {rtt}")
    if n_f < 1:
        raise ValueError(f"frame size factor must be >= 1, got {n_f}")
    if not 0.0 <= eps_mean < 1.0:
        raise ValueError(f"erasure probability must be in [0, 1), got {eps_mean}")
    n = round_half_up(rtt / n_f)
    if n < 2:
        raise ValueError(f"rtt/n_f rounds to {n}; frames need at least 2 packets")
    # cap keeps at least one head packet even under an extreme sigma
    eps_max = min(erasure_spread(eps_mean, n, sigma), 1.0 - 1.0 / n)
    k1 = max(1, math.floor(n * (1.0 - eps_max)))
    return FramePlan(
        frame_id=frame_id,
        n=n,
        k1=k1,
        k2=n - k1,
        eps_max=eps_max,
        sigma=sigma,
        gen_seed=gen_seed,
    )


@dataclass(frozen=True)
class LayeredGenerator:
    A: np.ndarray  # k1 x k1
    B: np.ndarray  # k1 x k2
    C: np.ndarray  # k2 x k2

    @property
    def k1(self) -> int:
        return self.A.shape[0]

    @property
    def k2(self) -> int:
        return self.C.shape[0]

    @property
    def n(self) -> int:
        return self.k1 + self.k2

    def stacked(self) -> np.ndarray:
        """Full n x n generator [[A, B], [0, C]]; rows index raw packets."""
        n, k1, k2 = self.n, self.k1, self.k2
        G = np.zeros((n, n), dtype=np.uint8)
        G[:k1, :k1] = self.A
        G[:k1, k1:] = self.B
        G[k1:, k1:] = self.C
        return G


def _random_invertible(rng: np.random.Generator, k: int) -> np.ndarray:
    if k == 0:
        return np.zeros((0, 0), dtype=np.uint8)
    while True:
        M = rng.integers(0, 256, size=(k, k), dtype=np.int64).astype(np.uint8)
        if gf_rank(M) == k:
            return M


def build_generator(plan: FramePlan, seed=None) -> LayeredGenerator:
    rng = np.random.Generator(np.random.PCG64(plan.gen_seed if seed is None else seed))
    A = _random_invertible(rng, plan.k1)
    B = rng.integers(0, 256, size=(plan.k1, plan.k2), dtype=np.int64).astype(np.uint8)
    C = _random_invertible(rng, plan.k2)
    return LayeredGenerator(A=A, B=B, C=C)


def encode_frame(l1: np.ndarray, l2: np.ndarray, gen: LayeredGenerator) -> np.ndarray:
    """Encode raw layers (k_i x width arrays, one raw packet per row)
    into n coded packets (one per row)."""
    l1 = np.asarray(l1, dtype=np.uint8)
    l2 = np.asarray(l2, dtype=np.uint8)
    if l1.ndim != 2 or l1.shape[0] != gen.k1:
        raise ValueError(f"layer 1 must be {gen.k1} rows, got shape {l1.shape}")
    if gen.k2 == 0:
        l2 = np.zeros((0, l1.shape[1]), dtype=np.uint8)
    if l2.ndim != 2 or l2.shape[0] != gen.k2 or l1.shape[1] != l2.shape[1]:
        raise ValueError(f"layer 2 must be {gen.k2} x {l1.shape[1]}, got shape {l2.shape}")
    msg = np.concatenate([l1, l2], axis=0)
    return gf_matmul(gen.stacked().T, msg)


def decode_layers(recovered, gen: LayeredGenerator, plan: FramePlan):
    """Decode what the recovered coded packets allow.

    recovered maps frame-local position (0-based) to the packet payload
    vector.  Returns (l1 | None, l2 | None); the enhancement layer only
    ever decodes alongside the base layer.
    """
    for pos in recovered:
        if not 0 <= pos < plan.n:
            raise ValueError(f"position {pos} outside frame of {plan.n}")
    k1, k2 = plan.k1, plan.k2
    if any(pos not in recovered for pos in range(k1)):
        return None, None
    head = np.stack([np.asarray(recovered[pos], dtype=np.uint8) for pos in range(k1)])
    l1 = gf_matmul(gf_mat_inv(gen.A).T, head)
    if k2 == 0:
        return l1, np.zeros((0, head.shape[1]), dtype=np.uint8)
    if any(pos not in recovered for pos in range(k1, plan.n)):
        return l1, None
    tail = np.stack(
        [np.asarray(recovered[pos], dtype=np.uint8) for pos in range(k1, plan.n)]
    )
    tail ^= gf_matmul(gen.B.T, l1)
    l2 = gf_matmul(gf_mat_inv(gen.C).T, tail)
    return l1, l2
