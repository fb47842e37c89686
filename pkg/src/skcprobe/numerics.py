"""Complex dense linear algebra and reproducible random streams.

Every log-determinant here is base 2, so all capacities and entropies built
on top of this module come out in bits.  All functions are pure; arrays are
never mutated in place.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NotHermitian, NotPositiveDefinite

HERMITIAN_ATOL = 1e-10

_LN2 = float(np.log(2.0))
_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class RngStream:
    """Counter-based random stream keyed by (master_seed, stream_id).

    Identical keys reproduce identical sequences bit for bit; distinct
    stream ids are independent by construction (Philox keyed generator).
    Monte Carlo trial i always uses stream_id=i, which is what makes serial
    and parallel runs draw the same numbers.
    """

    master_seed: int
    stream_id: int = 0

    def generator(self) -> np.random.Generator:
        key = np.array(
            [self.master_seed & _MASK64, self.stream_id & _MASK64],
            dtype=np.uint64,
        )
        return np.random.Generator(np.random.Philox(key=key))


def as_generator(stream: "RngStream | np.random.Generator") -> np.random.Generator:
    """Accept either an RngStream or an already-built numpy Generator."""
    if isinstance(stream, RngStream):
        return stream.generator()
    if isinstance(stream, np.random.Generator):
        return stream
    raise TypeError(f"expected RngStream or numpy Generator, got {type(stream)!r}")


def sample_cgaussian(rows: int, cols: int, stream) -> np.ndarray:
    """Draw a rows x cols matrix of iid CN(0, 1) entries.

    Real and imaginary parts are independent N(0, 1/2), so each complex
    entry has unit variance.
    """
    if rows < 1 or cols < 1:
        raise DimensionMismatch(f"matrix shape must be >= 1x1, got {rows}x{cols}")
    rng = as_generator(stream)
    re = rng.standard_normal((rows, cols))
    im = rng.standard_normal((rows, cols))
    return (re + 1j * im) / np.sqrt(2.0)


def hermitize(m: np.ndarray) -> np.ndarray:
    """Hermitian part (m + m^H)/2.

    Gram and outer products from BLAS are Hermitian only to round-off at
    the matrix scale, which can exceed HERMITIAN_ATOL at high SNR; callers
    building covariance-like matrices pass them through here so the
    Hermitian check stays a genuine contract on the inputs.
    """
    m = np.asarray(m, dtype=complex)
    return (m + m.conj().T) / 2.0


def logdet_hermitian_pd(m: np.ndarray) -> float:
    """log2 det of a Hermitian positive-definite matrix via Cholesky.

    The input is checked against HERMITIAN_ATOL and symmetrized before
    factorization.  If the factorization fails, one retry is made with a
    tiny trace-scaled diagonal jitter; a second failure raises
    NotPositiveDefinite (these matrices are PD by construction, so failure
    indicates a caller bug rather than bad data).
    """
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {m.shape}")
    asym = float(np.max(np.abs(m - m.conj().T)))
    if asym > HERMITIAN_ATOL:
        raise NotHermitian(f"max asymmetry {asym:.3e} exceeds {HERMITIAN_ATOL:.0e}")
    m = (m + m.conj().T) / 2.0
    try:
        chol = np.linalg.cholesky(m)
    except np.linalg.LinAlgError:
        n = m.shape[0]
        jitter = 1e-12 * float(np.real(np.trace(m))) / n
        try:
            chol = np.linalg.cholesky(m + jitter * np.eye(n))
        except np.linalg.LinAlgError as exc:
            raise NotPositiveDefinite(
                f"Cholesky failed even with jitter {jitter:.3e}"
            ) from exc
    return float(2.0 * np.sum(np.log2(np.real(np.diag(chol)))))


def logdet_lu(m: np.ndarray) -> float:
    """log2 |det m| via LU factorization.

    Deliberately a different arithmetic path from logdet_hermitian_pd; the
    resolvent-form identity checks rely on the two paths being independent.
    """
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {m.shape}")
    _, logabs = np.linalg.slogdet(m)
    return float(logabs / _LN2)


def capacity_logdet(h: np.ndarray, gamma: float) -> float:
    """log2 det(gamma h h^H + I) for a channel matrix h and SNR gamma >= 0.

    Equals the Gram-side evaluation log2 det(gamma h^H h + I) by the
    determinant push-through identity (tested, not assumed).
    """
    if gamma < 0:
        raise ValueError(f"gamma must be nonnegative, got {gamma}")
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2:
        raise DimensionMismatch(f"expected a matrix, got ndim {h.ndim}")
    n = h.shape[0]
    return logdet_hermitian_pd(gamma * hermitize(h @ h.conj().T) + np.eye(n))


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product, shape (ra*rb) x (ca*cb)."""
    return np.kron(np.asarray(a), np.asarray(b))


def block2x2(a, c, ch, b) -> np.ndarray:
    """Assemble the 2x2 block matrix [[a, c], [ch, b]].

    The caller passes the lower-left block explicitly (usually c^H) so the
    assembly itself stays a pure layout operation.
    """
    a, c, ch, b = (np.asarray(x) for x in (a, c, ch, b))
    if a.shape[0] != c.shape[0] or ch.shape[0] != b.shape[0]:
        raise DimensionMismatch("row counts of [a|c] and [ch|b] must match")
    if a.shape[1] != ch.shape[1] or c.shape[1] != b.shape[1]:
        raise DimensionMismatch("column counts of [a/ch] and [c/b] must match")
    return np.block([[a, c], [ch, b]])
