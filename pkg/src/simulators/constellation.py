# src/simulators/constellation.py
"""
PSK constellations mapped into coherent-state phase space, quadrature noise,
minimum-distance detection and symbol-error-rate estimation.

Quadrature convention: <x> + j<p> = alpha, with per-quadrature standard
deviation 1/2 for every coherent state, so |alpha|^2 is the mean photon number.
"""
import logging
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from typing import List, Sequence, Tuple

import numpy as np
from scipy.special import erfc

from ..core.exceptions import DegenerateEncodingWarning, ValidationError
from ..models.entities import (
    Constellation,
    ConverterDesign,
    EncodedSymbol,
    SerEstimate,
    SymbolCloud,
)
from ..utils.sampling import box_muller, substream
from .qstate import encode_coherent_symbol

logger = logging.getLogger(__name__)

COHERENT_SIGMA = 0.5
BLOCK_SIZE = 1 << 16
MIN_TRIALS = 1000
DEGENERACY_LIMIT = 1e-12


def encode_constellation(constellation: Constellation, alpha: complex, design: ConverterDesign) -> List[EncodedSymbol]:
    symbols = [encode_coherent_symbol(alpha, design, b) for b in constellation.phases]
    for i in range(len(symbols)):
        for j in range(i + 1, len(symbols)):
            if abs(symbols[i].theta - symbols[j].theta) < DEGENERACY_LIMIT:
                logger.warning("symbols %d and %d encode to the same phase %.6g", i, j, symbols[i].theta)
                warnings.warn(
                    f"symbols {i} and {j} are indistinguishable after encoding",
                    DegenerateEncodingWarning,
                    stacklevel=2,
                )
    return symbols


def _symbol_means(symbols: Sequence[EncodedSymbol]) -> np.ndarray:
    return np.array([symbol.mean for symbol in symbols], dtype=float).reshape(-1, 2)


def sample_cloud(symbol: EncodedSymbol, n_samples: int, seed: int, sigma: float = COHERENT_SIGMA,
                 stream: int = 0) -> SymbolCloud:
    """i.i.d. circular Gaussian samples around the symbol mean, drawn from substream ``stream``."""
    if n_samples < 1:
        raise ValidationError("n_samples", "must be >= 1")
    z0, z1 = box_muller(substream(seed, stream), n_samples)
    samples = np.column_stack([symbol.mean_x + sigma * z0, symbol.mean_p + sigma * z1])
    return SymbolCloud(symbol=symbol, sigma=sigma, samples=samples, seed=seed)


def _nearest(points: np.ndarray, means: np.ndarray) -> np.ndarray:
    distances = np.sum((points[:, None, :] - means[None, :, :]) ** 2, axis=2)
    # argmin returns the first minimum, which is the lowest-index tie rule
    return np.argmin(distances, axis=1)


def classify(point: Tuple[float, float], symbols: Sequence[EncodedSymbol]) -> int:
    """Index of the nearest symbol mean (Euclidean, ties to the lowest index)."""
    return int(classify_points(np.asarray(point, dtype=float).reshape(1, 2), symbols)[0])


def classify_points(points: np.ndarray, symbols: Sequence[EncodedSymbol]) -> np.ndarray:
    if not symbols:
        raise ValidationError("symbols", "need at least one symbol")
    return _nearest(np.asarray(points, dtype=float).reshape(-1, 2), _symbol_means(symbols))


def _run_block(means: np.ndarray, seed: int, block: int, size: int, sigma: float) -> Tuple[np.ndarray, np.ndarray]:
    rng = substream(seed, block)
    M = means.shape[0]
    sent = rng.integers(0, M, size=size)
    z0, z1 = box_muller(rng, size)
    received = means[sent] + sigma * np.column_stack([z0, z1])
    wrong = _nearest(received, means) != sent
    errors = np.bincount(sent[wrong], minlength=M)
    trials = np.bincount(sent, minlength=M)
    return errors, trials


def estimate_ser(constellation: Constellation, alpha: complex, design: ConverterDesign,
                 n_trials: int, seed: int, workers: int = 1) -> SerEstimate:
    """Monte Carlo SER with uniformly drawn symbols and minimum-distance detection."""
    symbols = encode_constellation(constellation, alpha, design)
    return estimate_ser_for_symbols(symbols, n_trials, seed, workers=workers)


def estimate_ser_for_symbols(symbols: Sequence[EncodedSymbol], n_trials: int, seed: int,
                             workers: int = 1, sigma: float = COHERENT_SIGMA) -> SerEstimate:
    if n_trials < MIN_TRIALS:
        raise ValidationError("n_trials", f"must be >= {MIN_TRIALS}")
    if workers < 1:
        raise ValidationError("workers", "must be >= 1")
    means = _symbol_means(symbols)
    M = means.shape[0]
    blocks = [(i, min(BLOCK_SIZE, n_trials - i * BLOCK_SIZE)) for i in range(math.ceil(n_trials / BLOCK_SIZE))]
    errors = np.zeros(M, dtype=np.int64)
    trials = np.zeros(M, dtype=np.int64)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        for block_errors, block_trials in pool.map(lambda blk: _run_block(means, seed, blk[0], blk[1], sigma), blocks):
            errors += block_errors
            trials += block_trials
    ser = float(errors.sum()) / n_trials
    ci95 = 1.96 * math.sqrt(ser * (1.0 - ser) / n_trials)
    logger.info("SER %.6g +/- %.2g over %d trials (%d blocks)", ser, ci95, n_trials, len(blocks))
    return SerEstimate(
        ser=ser,
        ci95=ci95,
        n_trials=n_trials,
        per_symbol_errors=[int(e) for e in errors],
        per_symbol_trials=[int(t) for t in trials],
    )


def pairwise_error(d: float, sigma: float = COHERENT_SIGMA) -> float:
    """Q(d / (2 sigma)): probability that noise crosses the bisector between two means d apart."""
    if not d >= 0.0:
        raise ValidationError("d", "must be >= 0")
    if not sigma > 0.0:
        raise ValidationError("sigma", "must be > 0")
    if math.isinf(d):
        return 0.0
    return float(0.5 * erfc(d / (2.0 * sigma * math.sqrt(2.0))))


def min_distance(symbols: Sequence[EncodedSymbol]) -> Tuple[float, Tuple[int, int]]:
    if len(symbols) < 2:
        raise ValidationError("symbols", "need at least two symbols")
    means = _symbol_means(symbols)
    best = (math.inf, (0, 1))
    for i in range(len(means)):
        for j in range(i + 1, len(means)):
            d = float(np.hypot(*(means[i] - means[j])))
            if d < best[0]:
                best = (d, (i, j))
    return best


def union_bound(symbols: Sequence[EncodedSymbol], sigma: float = COHERENT_SIGMA) -> float:
    """Average over symbols of sum_{j != i} Q(d_ij / 2 sigma)."""
    means = _symbol_means(symbols)
    M = len(means)
    if M < 2:
        return 0.0
    total = 0.0
    for i in range(M):
        for j in range(M):
            if i != j:
                total += pairwise_error(float(np.hypot(*(means[i] - means[j]))), sigma)
    return total / M
