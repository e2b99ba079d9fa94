"""Pilot design: sampled subcarriers/antennas and phase-ramped UE signatures.

A design fixes the OFDM size N, array size M, delay-tap count D, group size
U, the pilot subcarrier set (Np of N), the observed antenna set (Mp of M),
and a unit-modulus base sequence c of length N. UE u transmits the base
sequence with the per-subcarrier phase ramp exp(-j*2*pi*u*D*n/N), which
makes the stacked delay-domain factor a row-sampled partial Fourier matrix.
"""

from __future__ import annotations

from dataclasses import dataclass
import json

import numpy as np

UNIT_MODULUS_TOL = 1e-12


@dataclass(frozen=True)
class PilotDesign:
    N: int
    M: int
    D: int
    U: int
    Np: int
    Mp: int
    subcarriers: np.ndarray
    antennas: np.ndarray
    base_sequence: np.ndarray
    seed: int

    def __post_init__(self):
        if self.U * self.D > self.N:
            raise ValueError(f"U={self.U} exceeds N/D={self.N}/{self.D}")
        if not (1 <= self.Np <= self.N and 1 <= self.Mp <= self.M):
            raise ValueError("pilot/antenna counts out of range")
        sub = np.asarray(self.subcarriers, dtype=np.int64)
        ant = np.asarray(self.antennas, dtype=np.int64)
        for name, arr, count, limit in (
            ("subcarriers", sub, self.Np, self.N),
            ("antennas", ant, self.Mp, self.M),
        ):
            if arr.size != count or np.unique(arr).size != count:
                raise ValueError(f"{name} must be {count} distinct indices")
            if arr.size and (arr.min() < 0 or arr.max() >= limit):
                raise ValueError(f"{name} out of range [0, {limit})")
        c = np.asarray(self.base_sequence, dtype=np.complex128)
        if c.shape != (self.N,):
            raise ValueError(f"base sequence must have length N={self.N}")
        if np.max(np.abs(np.abs(c) - 1.0)) > UNIT_MODULUS_TOL:
            raise ValueError("base sequence entries must have unit modulus")
        object.__setattr__(self, "subcarriers", np.sort(sub))
        object.__setattr__(self, "antennas", np.sort(ant))
        object.__setattr__(self, "base_sequence", c)

    def to_json(self) -> str:
        """Byte-stable JSON document (base sequence as interleaved re/im)."""
        c = np.empty(2 * self.N)
        c[0::2] = self.base_sequence.real
        c[1::2] = self.base_sequence.imag
        doc = {
            "N": self.N,
            "M": self.M,
            "D": self.D,
            "U": self.U,
            "Np": self.Np,
            "Mp": self.Mp,
            "subcarriers": [int(i) for i in self.subcarriers],
            "antennas": [int(i) for i in self.antennas],
            "base_sequence": [float(v) for v in c],
            "seed": int(self.seed),
        }
        return json.dumps(doc, sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str) -> "PilotDesign":
        doc = json.loads(text)
        c = np.asarray(doc["base_sequence"], dtype=np.float64)
        base = c[0::2] + 1j * c[1::2]
        return cls(
            N=int(doc["N"]),
            M=int(doc["M"]),
            D=int(doc["D"]),
            U=int(doc["U"]),
            Np=int(doc["Np"]),
            Mp=int(doc["Mp"]),
            subcarriers=np.asarray(doc["subcarriers"], dtype=np.int64),
            antennas=np.asarray(doc["antennas"], dtype=np.int64),
            base_sequence=base,
            seed=int(doc["seed"]),
        )


def _sample_sorted(n: int, k: int, rng: np.random.Generator) -> np.ndarray:
    """k distinct indices from [n] via a partial Fisher-Yates shuffle, sorted."""
    idx = np.arange(n, dtype=np.int64)
    for i in range(k):
        j = int(rng.integers(i, n))
        idx[i], idx[j] = idx[j], idx[i]
    return np.sort(idx[:k])


def make_design(N, M, D, U, Np, Mp, base_sequence=None, seed=0) -> PilotDesign:
    """Draw subcarrier and antenna sets uniformly without replacement.

    Deterministic given the seed. The default base sequence is all-ones; any
    user-supplied sequence must be length N with unit-modulus entries.
    """
    if base_sequence is None:
        base_sequence = np.ones(N, dtype=np.complex128)
    rng = np.random.default_rng(seed)
    subcarriers = _sample_sorted(N, Np, rng)
    antennas = _sample_sorted(M, Mp, rng)
    return PilotDesign(
        N=N, M=M, D=D, U=U, Np=Np, Mp=Mp,
        subcarriers=subcarriers, antennas=antennas,
        base_sequence=np.asarray(base_sequence, dtype=np.complex128), seed=seed,
    )


def full_signature(design: PilotDesign, u: int) -> np.ndarray:
    """Length-N signature of UE u before subcarrier sampling."""
    if not 0 <= u < design.U:
        raise ValueError(f"UE index {u} out of range [0, {design.U})")
    n = np.arange(design.N)
    ramp = np.exp(-2j * np.pi * u * design.D * n / design.N)
    return design.base_sequence * ramp


def signature(design: PilotDesign, u: int) -> np.ndarray:
    """Length-Np signature of UE u on the pilot subcarriers."""
    return full_signature(design, u)[design.subcarriers]
