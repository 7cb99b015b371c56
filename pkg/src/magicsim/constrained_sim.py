"""Constant-cost interval estimator built on a feasible robustness pair.

The target state is replaced by the stabilizer side sigma of an operator
inequality rho <= lam * sigma.  The dyadic simulator runs on sigma alone,
whose unit l1 weight makes the sample count independent of lam, and the
unknown subtracted remainder is absorbed into a deterministic penalty of
lam - 1 per side.  The resulting interval is clamped to the a-priori range
of the observable, and the report labels which regime the run landed in:
both sides clamped (no information), neither (additive error lam(1+c) - 1),
or exactly one (error shrinking with the magnitude of the estimate).
"""

from __future__ import annotations

import dataclasses
import math

import numpy as np

from . import channels as ch
from . import dyadic_sim as ds
from . import monotones
from . import stab_core as sc

_ATOL = 1e-8

DENSE_PAIR_CHECK_MAX = 4

CASES = ("failure", "constant_error", "shrunk_error")


class ConstrainedSimError(ValueError):
    pass


_VERTEX_GATES = {
    (0, 0, 1): (),
    (0, 0, -1): (("X", 0),),
    (1, 0, 0): (("H", 0),),
    (-1, 0, 0): (("H", 0), ("Z", 0)),
    (0, 1, 0): (("H", 0), ("S", 0)),
    (0, -1, 0): (("H", 0), ("SDG", 0)),
}


def _vertex_state(axis: tuple[int, int, int]) -> sc.StabState:
    return sc.apply_circuit(sc.zero_state(1), _VERTEX_GATES[axis])


class RobustnessPair:
    """Scale lam >= 1 together with a stabilizer mixture dominating rho.

    sigma is a dyadic expansion with real nonnegative weights summing to
    one, so the dyadic simulator sees unit l1 weight regardless of lam.
    """

    __slots__ = ("lam", "sigma")

    def __init__(self, lam: float, sigma: ch.DyadicDecomposition):
        lam = float(lam)
        if not lam >= 1.0 - 1e-12:
            raise ConstrainedSimError("lam must be at least 1")
        for a, _ in sigma.terms:
            if abs(a.imag) > _ATOL or a.real < -_ATOL:
                raise ConstrainedSimError("sigma weights must be real and nonnegative")
        if abs(sigma.l1 - 1.0) > 1e-6:
            raise ConstrainedSimError("sigma weights must sum to 1")
        self.lam = max(1.0, lam)
        self.sigma = sigma

    @property
    def n(self) -> int:
        return self.sigma.n

    def dominates(self, rho: np.ndarray, tol: float = _ATOL) -> bool:
        """Dense check of the operator inequality rho <= lam * sigma."""
        gap = self.lam * self.sigma.dense() - np.asarray(rho, dtype=complex)
        return float(np.linalg.eigvalsh(gap)[0]) >= -tol


def _l1_ball_projection(v: np.ndarray) -> np.ndarray:
    """Euclidean projection onto the unit l1 ball by soft thresholding."""
    a = np.abs(v)
    if a.sum() <= 1.0:
        return v.copy()
    u = np.sort(a)[::-1]
    cum = np.cumsum(u)
    ranks = np.arange(1, u.size + 1)
    k = ranks[u * ranks > cum - 1.0][-1]
    shift = (cum[k - 1] - 1.0) / k
    return np.sign(v) * np.maximum(a - shift, 0.0)


def _octahedron_mixture(b: np.ndarray) -> dict[tuple[int, int, int], float]:
    """Vertex weights realizing an octahedron point; the slack fills in I/2."""
    weights: dict[tuple[int, int, int], float] = {}
    for i in range(3):
        w = abs(float(b[i]))
        if w <= 1e-14:
            continue
        vertex = tuple((1 if b[i] > 0 else -1) if j == i else 0 for j in range(3))
        weights[vertex] = weights.get(vertex, 0.0) + w
    rest = 1.0 - sum(weights.values())
    if rest > 1e-14:
        for vertex in ((0, 0, 1), (0, 0, -1)):
            weights[vertex] = weights.get(vertex, 0.0) + rest / 2.0
    return weights


def optimal_pair(states, validate: bool = True) -> RobustnessPair:
    """Feasible pair for a product of single-qubit states.

    lam multiplies the per-factor generalized robustness values; each
    factor's stabilizer side is the closest octahedron point to b / lam_j,
    which the one-qubit primal optimum guarantees to be feasible.
    """
    blochs = [
        s if isinstance(s, monotones.BlochState) else monotones.BlochState(*s)
        for s in states
    ]
    if not blochs:
        raise ConstrainedSimError("need at least one qubit factor")
    lam = 1.0
    parts: list[tuple[float, sc.StabState | None]] = [(1.0, None)]
    for rho in blochs:
        lam_j = max(1.0, monotones.lambda_plus_1q(rho)[0])
        b = np.array(rho.as_tuple(), dtype=float)
        b_sig = _l1_ball_projection(b / lam_j)
        if np.linalg.norm(lam_j * b_sig - b) > lam_j - 1.0 + 1e-9:
            raise ConstrainedSimError("factor admits no stabilizer side at its lam")
        lam *= lam_j
        grown = []
        for w1, s1 in parts:
            for vertex, w2 in _octahedron_mixture(b_sig).items():
                w = w1 * w2
                if w <= 1e-14:
                    continue
                v = _vertex_state(vertex)
                grown.append((w, v if s1 is None else sc.tensor(s1, v)))
        parts = grown
    total = sum(w for w, _ in parts)
    sigma = ch.DyadicDecomposition([(w / total, ch.Dyad(s, s)) for w, s in parts])
    pair = RobustnessPair(lam, sigma)
    if validate and len(blochs) <= DENSE_PAIR_CHECK_MAX:
        rho_dense = blochs[0].density()
        for factor in blochs[1:]:
            rho_dense = np.kron(rho_dense, factor.density())
        if not pair.dominates(rho_dense):
            raise ConstrainedSimError("constructed pair fails the operator inequality")
    return pair


@dataclasses.dataclass(frozen=True)
class ConstrainedReport:
    E_hat: float
    Delta: float
    case: str
    E_sigma: float
    E_max: float
    E_min: float
    lam: float
    epsilon: float
    samples: int = 0
    seed: int | None = None

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


def interval_from_estimate(
    lam: float, mu: float, c: float, projector: bool = False
) -> ConstrainedReport:
    """Deterministic interval arithmetic on a sigma-side estimate mu.

    mu approximates the sigma expectation within c; the interval pays
    c * lam for the scaled statistical error and lam - 1 for the unknown
    remainder, one-sidedly when the observable is a projector.
    """
    lam = float(lam)
    if not lam >= 1.0 - 1e-12:
        raise ConstrainedSimError("lam must be at least 1")
    if not 0.0 < c < 1.0:
        raise ConstrainedSimError("c must lie in (0, 1)")
    lam = max(1.0, lam)
    eps = c * lam
    E_sigma = lam * float(mu)
    if projector:
        prior_lo, prior_hi = 0.0, 1.0
        upper = E_sigma + eps
    else:
        prior_lo, prior_hi = -1.0, 1.0
        upper = E_sigma + eps + (lam - 1.0)
    lower = E_sigma - eps - (lam - 1.0)
    clamp_hi = upper >= prior_hi
    clamp_lo = lower <= prior_lo
    if clamp_hi and clamp_lo:
        case = "failure"
    elif clamp_hi or clamp_lo:
        case = "shrunk_error"
    else:
        case = "constant_error"
    E_max = min(prior_hi, upper)
    E_min = max(prior_lo, lower)
    if E_max < E_min:
        # empty intersection with the prior range: the estimate contradicts
        # the model, so only the trivial bounds survive
        E_max, E_min, case = prior_hi, prior_lo, "failure"
    return ConstrainedReport(
        E_hat=0.5 * (E_max + E_min),
        Delta=0.5 * (E_max - E_min),
        case=case,
        E_sigma=E_sigma,
        E_max=E_max,
        E_min=E_min,
        lam=lam,
        epsilon=eps,
    )


def constrained_estimate(
    pair: RobustnessPair,
    circuit,
    E,
    c: float = 0.05,
    p_fail: float = 0.05,
    seed: int = 0,
    workers: int | None = None,
) -> ConstrainedReport:
    """Interval for the target expectation from a run on the stabilizer side.

    The sigma expectation is estimated to tolerance c at confidence
    1 - p_fail, taking exactly ceil(2 c^-2 ln(2/p_fail)) samples whatever
    lam is, and the interval inflates it by eps = c lam plus the lam - 1
    remainder penalty before clamping to the observable's range.
    """
    if not 0.0 < c < 1.0:
        raise ConstrainedSimError("c must lie in (0, 1)")
    if not 0.0 < p_fail < 1.0:
        raise ConstrainedSimError("p_fail must lie in (0, 1)")
    base = ds.estimate_born(
        pair.sigma, circuit, E, epsilon=c, p_fail=p_fail, seed=seed, workers=workers
    )
    projector = isinstance(E, sc.StabProjector)
    report = interval_from_estimate(pair.lam, base.mu_hat, c, projector=projector)
    return dataclasses.replace(report, samples=base.M, seed=seed)
