"""Binary itineraries of the orbit that leaves the saddle-focus.

A sequence starts with the departure branch (1 for 0 -> mu) and continues
with one symbol per iterate x_k: 1 if x_k has the sign of mu, 0 otherwise.
Symbol k+1 is therefore the direction of the excursion that begins at x_k,
so a secondary homoclinic orbit 0 -> mu -> 0 is coded [1, 1] and the field
x_2 = f(mu) decides the third symbol.  Reaching |x| < zero_eps ends the
sequence (the orbit has returned to the saddle-focus).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .errors import DegenerateParameterError, DomainError, EmptySequenceError
from .mapcore import ZERO_EPS, Branch, MapParams, Status


@dataclass(frozen=True)
class SymbolSequence:
    bits: tuple[int, ...]
    terminated: bool = False
    source_status: Status = Status.MAX_ITERATIONS

    @classmethod
    def from_bits(cls, bits, terminated: bool = False) -> "SymbolSequence":
        bits = tuple(int(b) for b in bits)
        if any(b not in (0, 1) for b in bits):
            raise ValueError("symbols must be 0 or 1")
        status = Status.REACHED_ZERO if terminated else Status.MAX_ITERATIONS
        return cls(bits, terminated, status)

    def __len__(self) -> int:
        return len(self.bits)

    def __str__(self) -> str:
        return "".join(map(str, self.bits))

    def as_array(self) -> np.ndarray:
        return np.asarray(self.bits, dtype=np.int8)


def encode(params: MapParams, branch: Branch = Branch.POSITIVE, max_len: int = 64,
           zero_eps: float = ZERO_EPS) -> SymbolSequence:
    """Itinerary of the orbit 0 -> x_1 = +/-mu -> x_2 -> ... with at most max_len symbols."""
    if params.mu == 0.0:
        raise DegenerateParameterError("mu = 0 is the primary homoclinic; the itinerary is undefined")
    if max_len < 1:
        raise ValueError("max_len must be >= 1")
    branch = Branch(branch)
    if not params.symmetric and (branch is Branch.NEGATIVE or params.mu < 0.0):
        raise DomainError("the one-sided map needs the positive branch and mu > 0")
    buf = np.empty(max_len, dtype=np.int8)
    n, status = K.encode_into(params.rho, params.mu, params.omega, params.phi, params.symmetric,
                              branch is Branch.NEGATIVE, zero_eps, buf)
    status = Status(status)
    return SymbolSequence(tuple(int(b) for b in buf[:n]), status is Status.REACHED_ZERO, status)


def truncate_one_sided(seq: SymbolSequence) -> SymbolSequence:
    """Keep the all-ones prefix; termination survives only if nothing was cut."""
    try:
        cut = seq.bits.index(0)
    except ValueError:
        return seq
    # a 0 symbol means the orbit crossed to x < 0, outside the one-sided map
    return SymbolSequence(seq.bits[:cut], False, Status.LEFT_DOMAIN)


def embed(seq: SymbolSequence) -> float:
    """sum_i S_i / 2**i, rounded toward zero so the result stays in [0, 1).

    Sequences longer than 53 significant symbols cannot be represented
    exactly; truncation keeps the map monotone and keeps 1 out of range.
    """
    bits = seq.as_array()
    return K.embed_truncated(bits, len(bits))


def lempel_ziv(seq: SymbolSequence) -> int:
    """Number of phrases in the left-to-right partition into shortest new blocks.

    A block is new if it is not one of the phrases already produced; a
    final incomplete block that repeats an earlier phrase is not counted.
    ``010110010111`` parses as 0|1|01|10|010|11|1 and scores 6.
    """
    if len(seq) == 0:
        raise EmptySequenceError("Lempel-Ziv complexity of an empty sequence")
    bits = seq.as_array()
    return int(K.lz_phrase_count(bits, len(bits)))


def normalized_lz(seq: SymbolSequence) -> float:
    """ln(N)/N times the phrase count, for sequences of length N >= 2."""
    n = len(seq)
    if n < 2:
        raise EmptySequenceError(f"normalization needs at least 2 symbols, got {n}")
    return math.log(n) / n * lempel_ziv(seq)
