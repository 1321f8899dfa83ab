# src/simulators/sideband.py
"""
Truncated sideband network model of the modulator.

Sideband order s is the amplitude evolving at omega_op + s*omega_w. A modulating
element maps input order p to output order s with

    T_sp = exp(-j k_op W) * J_{s-p}(delta_theta) * exp(-j (s-p) (omega_w t + phi_n + b))

which is the expansion of the scalar factor exp(-j (k_op W + delta_theta sin(omega_w t + phi_n + b))).
The same entry can be written i^m J_m exp(-j m (u + pi/2)), i.e. the i^m form
belongs to a cosine-referenced phase. Matrices are evaluated at a reference
time t, so the omega_w t carrier of every sideband is already inside the entries.
"""
import logging
import math
from typing import Dict, Iterable, List, Optional, Sequence

import networkx as nx
import numpy as np

from ..core.exceptions import DimensionMismatchError, TruncationError, ValidationError
from ..models.entities import (
    ConverterDesign,
    SidebandMatrix,
    SidebandProbabilities,
    SidebandVector,
    SweepRow,
)
from ..utils.bessel import bessel_jn_symmetric
from . import physics

logger = logging.getLogger(__name__)

TRUNCATION_MARGIN = 15
# |delta_theta| must stay this far below S
MIN_HEADROOM = 5


def truncation_size(delta_theta_total: float) -> int:
    """S = ceil(|delta_theta_total|) + 15."""
    return int(math.ceil(abs(delta_theta_total))) + TRUNCATION_MARGIN


def design_truncation(design: ConverterDesign) -> int:
    depth = physics.modulation_depth(design.material, design.carriers, design.geometry, design.drive)
    return truncation_size(abs(depth) * design.geometry.N)


def bessel_tail(S: int, z: float) -> float:
    """1 - sum_{|s|<=S} J_s(z)^2, from the orders just outside the window."""
    outside = bessel_jn_symmetric(S + 40, z)
    inside_count = 2 * S + 1
    start = 40
    weight = np.sum(outside ** 2) - np.sum(outside[start:start + inside_count] ** 2)
    return float(max(weight, 0.0))


def _check_truncation(S: int, delta_theta: float):
    if S < 1:
        raise ValidationError("S", "must be >= 1")
    if abs(delta_theta) > S - MIN_HEADROOM:
        raise TruncationError(
            f"truncation S={S} too small for |delta_theta|={abs(delta_theta):.4g}; "
            f"need S >= {math.ceil(abs(delta_theta)) + MIN_HEADROOM}"
        )


def _toeplitz_element(S: int, delta_theta: float, carrier_phase: float, propagation: float) -> np.ndarray:
    orders = np.arange(-S, S + 1)
    m = np.subtract.outer(orders, orders)
    bessel = bessel_jn_symmetric(2 * S, delta_theta)
    return np.exp(-1j * propagation) * bessel[m + 2 * S] * np.exp(-1j * m * carrier_phase)


def element_matrix(design: ConverterDesign, n: int, t: float, b: float, S: int) -> SidebandMatrix:
    """Transmission matrix of the n-th modulating element (1-based)."""
    mat, car, geo = design.material, design.carriers, design.geometry
    delta_theta = physics.modulation_depth(mat, car, geo, design.drive)
    _check_truncation(S, delta_theta)
    phi_n = physics.element_offset_phase(car, mat, geo, n)
    entries = _toeplitz_element(S, delta_theta, car.omega_w * t + phi_n + b, design.k_op * geo.W)
    return SidebandMatrix(S=S, entries=entries, t=t, b=b, label=f"element:{n}")


def gap_matrix(design: ConverterDesign, G: float, S: int) -> SidebandMatrix:
    """exp(-j k_op G) * I for an unmodulated waveguide segment of length G."""
    if not math.isfinite(G) or G < 0.0:
        raise ValidationError("G", "must be a finite length >= 0")
    return SidebandMatrix.identity(S, phase=design.k_op * G, label="gap")


def cascade(matrices: Sequence[SidebandMatrix], S: Optional[int] = None) -> SidebandMatrix:
    """Overall matrix for elements traversed first-to-last: T = M_last ... M_2 M_1."""
    if not matrices:
        if S is None:
            raise ValidationError("S", "required to cascade an empty list")
        return SidebandMatrix.identity(S)
    size = matrices[0].S
    if S is not None and S != size:
        raise DimensionMismatchError(f"requested S={S} but matrices have S={size}")
    total = np.eye(2 * size + 1, dtype=complex)
    for matrix in matrices:
        if matrix.S != size:
            raise DimensionMismatchError(f"cannot cascade S={matrix.S} after S={size}")
        total = matrix.entries @ total
    first = matrices[0]
    return SidebandMatrix(S=size, entries=total, t=first.t, b=first.b, label=f"cascade({len(matrices)})")


def array_network(design: ConverterDesign) -> nx.DiGraph:
    """Chain of element and gap nodes in propagation order."""
    mat, car, geo = design.material, design.carriers, design.geometry
    graph = nx.DiGraph(name="modulator-array")
    previous = None
    for n in range(1, geo.N + 1):
        node = f"element:{n}"
        graph.add_node(
            node,
            kind="element",
            index=n,
            length=geo.W,
            offset_phase=physics.element_offset_phase(car, mat, geo, n),
        )
        if previous is not None:
            graph.add_edge(previous, node)
        previous = node
        if n < geo.N:
            gap = f"gap:{n}"
            graph.add_node(gap, kind="gap", index=n, length=geo.G, offset_phase=None)
            graph.add_edge(previous, gap)
            previous = gap
    return graph


def array_cascade(design: ConverterDesign, t: float = 0.0, b: Optional[float] = None,
                  S: Optional[int] = None) -> SidebandMatrix:
    """[T] = [T^N] [I^{N-1}] [T^{N-1}] ... [I^1] [T^1] built by walking array_network."""
    b = design.drive.b if b is None else b
    S = design_truncation(design) if S is None else S
    graph = array_network(design)
    matrices: List[SidebandMatrix] = []
    for node in nx.topological_sort(graph):
        attrs = graph.nodes[node]
        if attrs["kind"] == "element":
            matrices.append(element_matrix(design, attrs["index"], t, b, S))
        else:
            matrices.append(gap_matrix(design, attrs["length"], S))
    logger.debug("cascading %d network stages at S=%d", len(matrices), S)
    return cascade(matrices, S=S)


def composition_bound(delta_theta: float) -> int:
    """Largest per-element order |x_n| kept in the composition sum."""
    return int(math.ceil(abs(delta_theta))) + TRUNCATION_MARGIN


def array_matrix_element(design: ConverterDesign, s: int, p: int, t: float, b: float) -> complex:
    """T_sp as the sum over compositions x_1 + ... + x_N = s - p of
    prod_n J_{x_n}(delta_theta) exp(-j x_n (omega_w t + phi_n + b)), times exp(-j chi).

    The composition sum is accumulated as a running convolution over elements.
    """
    mat, car, geo = design.material, design.carriers, design.geometry
    delta_theta = physics.modulation_depth(mat, car, geo, design.drive)
    x_max = composition_bound(delta_theta)
    orders = np.arange(-x_max, x_max + 1)
    bessel = bessel_jn_symmetric(x_max, delta_theta)
    partial = np.ones(1, dtype=complex)
    for n in range(1, geo.N + 1):
        u_n = car.omega_w * t + physics.element_offset_phase(car, mat, geo, n) + b
        partial = np.convolve(partial, bessel * np.exp(-1j * orders * u_n))
    # partial[i] holds the composition total i - N * x_max
    target = (s - p) + geo.N * x_max
    chi = physics.propagation_phase(car, geo, mat)
    if not 0 <= target < partial.size:
        return 0j
    return complex(np.exp(-1j * chi) * partial[target])


def apply(matrix: SidebandMatrix, vector: SidebandVector) -> SidebandVector:
    if matrix.S != vector.S:
        raise DimensionMismatchError(f"matrix S={matrix.S} does not match vector S={vector.S}")
    return SidebandVector(S=vector.S, amps=matrix.entries @ vector.amps)


def sideband_probabilities(vector: SidebandVector) -> SidebandProbabilities:
    probabilities = np.abs(vector.amps) ** 2
    total = float(np.sum(probabilities))
    return SidebandProbabilities(
        orders=vector.orders,
        probabilities=probabilities,
        total=total,
        tail=1.0 - total,
    )


def _sweep_design(design: ConverterDesign, w: float):
    """Single element of width w, or two cascaded w/2 sections once w exceeds W_o."""
    w_o = physics.optimum_element_width(design.material, design.carriers)
    if w > w_o:
        half = 0.5 * w
        return design.with_geometry(W=half, D=half, N=2)
    return design.with_geometry(W=w, D=w, N=1)


def width_sweep(design: ConverterDesign, w_grid: Iterable[float], S: Optional[int] = None,
                s_max: int = 2) -> List[SweepRow]:
    """Sideband probabilities of a unit order-0 input versus element width."""
    rows = []
    b = design.drive.b
    for w in w_grid:
        if not math.isfinite(w) or w < 0.0:
            raise ValidationError("w_grid", f"widths must be finite and >= 0, got {w!r}")
        if w == 0.0:
            rows.append(SweepRow(w=0.0, P0=1.0, P1=0.0, P2=0.0, tail=0.0, truncation_tail=0.0))
            continue
        swept = _sweep_design(design, w)
        size = design_truncation(swept) if S is None else S
        out = apply(array_cascade(swept, t=0.0, b=b, S=size), SidebandVector.unit(size))
        probs = sideband_probabilities(out)
        low = [probs.probability(k) for k in range(0, s_max + 1)]
        kept = low[0] + 2.0 * sum(low[1:])
        rows.append(SweepRow(
            w=float(w),
            P0=low[0],
            P1=probs.probability(1),
            P2=probs.probability(2),
            tail=max(probs.total - kept, 0.0),
            truncation_tail=probs.tail,
        ))
        logger.debug("width %.4e m: P0=%.6f truncation tail=%.2e", w, low[0], probs.tail)
    return rows


def reconstruct_phase(vector: SidebandVector) -> complex:
    """Recombine the sidebands of a cascade output into the scalar amplitude.

    The time t and symbol phase b are not parameters: they were fixed when the
    cascade matrix was built (see array_cascade), and each entry already carries
    its exp(-j s omega_w t) carrier. The sum therefore equals
    exp(-j (chi + theta_i(t))) at that same t and b for a unit order-0 input.
    """
    return complex(np.sum(vector.amps))


def closed_form_amplitude(design: ConverterDesign, t: float, b: Optional[float] = None) -> complex:
    """exp(-j (chi + theta_i(t))) from the scalar closed form."""
    b = design.drive.b if b is None else b
    depth = physics.design_depth(design)
    theta = physics.modulated_phase(depth, t, b)
    return complex(np.exp(-1j * (depth.chi + theta)))


def inner_block(matrix: SidebandMatrix, margin: int = TRUNCATION_MARGIN) -> np.ndarray:
    """Entries with |s|, |p| <= S - margin (at least the order-0 entry)."""
    half = max(matrix.S - margin, 0)
    lo, hi = matrix.S - half, matrix.S + half + 1
    return matrix.entries[lo:hi, lo:hi]


def unitarity_defect(matrix: SidebandMatrix, margin: int = TRUNCATION_MARGIN) -> float:
    """max |T^dagger T - I| over the padded inner block."""
    product = SidebandMatrix(S=matrix.S, entries=matrix.entries.conj().T @ matrix.entries)
    block = inner_block(product, margin)
    return float(np.max(np.abs(block - np.eye(block.shape[0]))))


def identity_defect(matrix: SidebandMatrix, phase: float, margin: int = TRUNCATION_MARGIN) -> float:
    """max |T - exp(-j phase) I| over the padded inner block."""
    block = inner_block(matrix, margin)
    return float(np.max(np.abs(block - np.exp(-1j * phase) * np.eye(block.shape[0]))))


def split_section_relations(design: ConverterDesign, t: float, S: int,
                            margin: int = TRUNCATION_MARGIN) -> Dict[str, float]:
    """Checks for an element of width 2*W_o split into two W_o sections.

    Returns max deviations of: T2 T1 = exp(-j 2 k_op W_o) I, T1 = exp(-j 2 k_op W_o) T2^dagger,
    T1 = exp(-j 2 k_op W_o) T2^{-1}.
    """
    w_o = physics.optimum_element_width(design.material, design.carriers)
    sections = design.with_geometry(W=w_o, D=w_o, N=2)
    b = design.drive.b
    first = element_matrix(sections, 1, t, b, S)
    second = element_matrix(sections, 2, t, b, S)
    phase = 2.0 * sections.k_op * w_o
    rotation = np.exp(-1j * phase)
    combined = cascade([first, second])
    adjoint = rotation * second.entries.conj().T
    inverse = rotation * np.linalg.inv(second.entries)
    first_block = inner_block(first, margin)
    return {
        "cascade_identity": identity_defect(combined, phase, margin),
        "adjoint_relation": float(np.max(np.abs(first.entries - adjoint))),
        "inverse_relation": float(np.max(np.abs(
            first_block - inner_block(SidebandMatrix(S=S, entries=inverse), margin)))),
    }
