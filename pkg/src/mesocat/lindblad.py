"""Closed-form zero-temperature master-equation evolution of coherent superpositions.

Under d rho/dt = gamma (a rho a^dag - {a^dag a, rho}/2) a coherent amplitude
damps as alpha(t) = alpha(0) exp(-gamma t / 2), and a coherent dyad
|a><b| keeps its form while its coefficient picks up

    exp[(conj(b) a - (|a|^2 + |b|^2)/2) (1 - e^{-gamma t})],

the unique trace-preserving factor compatible with the damping of the
amplitudes (it is the ratio <b|a> / <b_t|a_t>).  For opposite amplitudes
(a, b) = (alpha, -alpha) it reduces to exp(-2 |alpha|^2 (1 - e^{-gamma t})),
the damping factor of the even/odd superpositions; for general pairs --
needed by the case-B protocol -- it is validated against a brute-force
Fock-space integration in the test suite rather than assumed.

No bath modes appear here: gamma = 1/t_c is the only dissipation parameter.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .coherent import (
    FieldBathSuperposition,
    ReducedDensity,
    _cluster_labels,
    _restore_unit_trace,
)
from .errors import InvalidArgumentError


@dataclass(frozen=True)
class MasterParams:
    """Field-energy decay rate gamma = 1/t_c (inverse intensity damping time)."""

    gamma: float

    def __post_init__(self):
        if not (self.gamma > 0.0 and math.isfinite(self.gamma)):
            raise InvalidArgumentError("gamma must be positive and finite")


def me_amplitude(alpha0: complex, params: MasterParams, t: float) -> complex:
    """alpha(t) = alpha(0) exp(-gamma t / 2); the intensity decays as e^{-gamma t}."""
    if t < 0.0 or not math.isfinite(t):
        raise InvalidArgumentError("t must be nonnegative and finite")
    return alpha0 * math.exp(-0.5 * params.gamma * t)


def me_dyad_factor(a: complex, b: complex, params: MasterParams, t: float) -> complex:
    """Damping factor of the coherent dyad |a><b| after time t.

    Equals 1 for a == b (diagonal dyads keep their trace) and never
    exceeds 1 in magnitude.
    """
    if t < 0.0 or not math.isfinite(t):
        raise InvalidArgumentError("t must be nonnegative and finite")
    depletion = -math.expm1(-params.gamma * t)  # 1 - e^{-gamma t}, accurate for small t
    expo = (b.conjugate() * a - 0.5 * (abs(a) ** 2 + abs(b) ** 2)) * depletion
    return cmath.exp(expo)


def me_reduce(
    initial: FieldBathSuperposition, params: MasterParams, t: float
) -> ReducedDensity:
    """Field density at time t for a bath-free initial superposition.

    Labels damp via :func:`me_amplitude` and each coefficient picks up
    :func:`me_dyad_factor` of the initial label pair; the trace stays 1 by
    construction.
    """
    if not initial.normalized:
        raise InvalidArgumentError("me_reduce() needs a normalized state")
    if initial.n_bath_modes != 0:
        raise InvalidArgumentError("the master-equation route is bath-free")
    reps, assign = _cluster_labels([br.field for br in initial.branches])
    n = len(reps)
    coeff0 = np.zeros((n, n), dtype=complex)
    for p, bp in enumerate(initial.branches):
        for q, bq in enumerate(initial.branches):
            coeff0[assign[p], assign[q]] += bp.weight * bq.weight.conjugate()
    coeff0 = _restore_unit_trace(reps, coeff0)
    factors = np.array(
        [[me_dyad_factor(reps[i], reps[j], params, t) for j in range(n)] for i in range(n)]
    )
    labels_t = tuple(me_amplitude(l, params, t) for l in reps)
    return ReducedDensity(labels_t, coeff0 * factors)
