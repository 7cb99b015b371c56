"""Dyadic frame quasiprobability simulator.

A Born probability Tr[Pi E(rho)] is estimated by Monte Carlo over dyads: an
initial dyad is drawn from the quasiprobability weights, then propagated
through each channel by sampling one unitary or Kraus branch.  Kraus branches
are chosen with trace-norm probabilities, which keeps every propagated dyad at
unit amplitude and caps each sample at the decomposition's l1 weight exactly;
the shortfall of the branch probabilities is an abort that contributes zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import stab_core as sc
from ._util import kahan_sum, run_chunked, sample_rng
from .channels import ChannelError, Dyad, DyadicDecomposition, SimulableChannel, StabKraus

ABORT = 0
_P0_TOL = 1e-12


@dataclass
class Trajectory:
    """One sampled path: initial dyad index, branch choice per step (0 = abort),
    accumulated unit phase, and the current dyad (None once aborted)."""

    r0: int
    r_t: list
    phase: complex
    current: Dyad | None

    @property
    def aborted(self) -> bool:
        return self.current is None


@dataclass(frozen=True)
class EstimateReport:
    mu_hat: float
    epsilon: float
    p_fail: float
    M: int
    seed: int
    per_sample_bound: float
    aborted: int = 0

    def to_dict(self) -> dict:
        return {
            "mu_hat": self.mu_hat,
            "epsilon": self.epsilon,
            "p_fail": self.p_fail,
            "M": self.M,
            "seed": self.seed,
            "per_sample_bound": self.per_sample_bound,
            "aborted": self.aborted,
        }


def required_samples(l1: float, epsilon: float, p_fail: float) -> int:
    """Hoeffding count for samples bounded by the l1 weight."""
    if epsilon <= 0 or not 0 < p_fail < 1:
        raise ValueError("need epsilon > 0 and p_fail in (0, 1)")
    return int(math.ceil(2.0 * l1 * l1 * epsilon**-2 * math.log(2.0 / p_fail)))


def _unit(state: sc.StabState) -> sc.StabState:
    out, _ = sc.with_unit_amplitude(state)
    return out


def stabilizer_update(d: Dyad, part, P_X: float, rng) -> tuple[Dyad | None, int]:
    """Sample one branch of a channel part and advance the dyad.

    Unitary parts never abort: a circuit is drawn with probability p_r/P_X
    and applied to both sides.  Kraus parts are drawn with the trace-norm
    probabilities q_r/P_X * 2^h * |Pi|L>| * |Pi|R>|; the remainder aborts.
    Returns (dyad or None, 1-based branch index with 0 meaning abort).
    """
    if not part:
        raise ValueError("empty channel part")
    if not 0.0 < P_X <= 1.0 + _P0_TOL:
        raise ValueError("branch weight must lie in (0, 1]")
    if isinstance(part[0][1], StabKraus):
        projected = []
        probs = []
        for q, k in part:
            Lp, nl = sc.project_stab(d.L, k.proj)
            Rp, nr = sc.project_stab(d.R, k.proj)
            projected.append((Lp, Rp, k))
            probs.append((q / P_X) * (2.0**k.h) * nl * nr)
        total = sum(probs)
        if total > 1.0 + 1e-9:
            raise ChannelError(f"Kraus transition probabilities sum to {total}")
        u = rng.random()
        acc = 0.0
        for idx, (p, (Lp, Rp, k)) in enumerate(zip(probs, projected)):
            acc += p
            if u < acc:
                Lp = _unit(sc.apply_circuit(Lp, k.circuit))
                Rp = _unit(sc.apply_circuit(Rp, k.circuit))
                return Dyad(Lp, Rp), idx + 1
        return None, ABORT
    u = rng.random() * P_X
    acc = 0.0
    idx = len(part) - 1
    for j, (p, _) in enumerate(part):
        acc += p
        if u < acc:
            idx = j
            break
    gates = part[idx][1]
    return Dyad(sc.apply_circuit(d.L, gates), sc.apply_circuit(d.R, gates)), idx + 1


def _pick_branch(chan: SimulableChannel, rng):
    if chan.unitary_part and chan.kraus_part:
        if rng.random() < chan.P_U:
            return chan.unitary_part, chan.P_U
        return chan.kraus_part, chan.P_K
    if chan.unitary_part:
        return chan.unitary_part, max(chan.P_U, _P0_TOL)
    return chan.kraus_part, max(chan.P_K, _P0_TOL)


def run_trajectory(decomp: DyadicDecomposition, chans, rng) -> Trajectory:
    """Draw an initial dyad and push it through every channel."""
    cum, phases = decomp.sampling_arrays()
    r0 = int(np.searchsorted(cum, rng.random(), side="right"))
    r0 = min(r0, len(decomp.terms) - 1)
    dyad = decomp.terms[r0][1]
    phase = complex(phases[r0])
    steps = []
    for chan in chans:
        part, P_X = _pick_branch(chan, rng)
        dyad, idx = stabilizer_update(dyad, part, P_X, rng)
        steps.append(idx)
        if dyad is None:
            return Trajectory(r0, steps, phase, None)
    return Trajectory(r0, steps, phase, dyad)


def _measure_value(dyad: Dyad, measurement) -> complex:
    if isinstance(measurement, sc.PauliOp):
        Lm = sc.apply_pauli(dyad.L, measurement)
    else:
        Lm, _ = sc.project_stab(dyad.L, measurement)
    return sc.inner_product(dyad.R, Lm)


def _sample_value(decomp, chans, measurement, rng) -> tuple[float, bool]:
    traj = run_trajectory(decomp, chans, rng)
    if traj.aborted:
        return 0.0, True
    val = _measure_value(traj.current, measurement)
    return decomp.l1 * float(np.real(traj.phase * val)), False


class _Node:
    """Trajectory-tree node: a dyad plus its branch distribution per channel.

    The branch path fully determines the dyad, so transition probabilities
    and leaf inner products are computed once and shared by every sample
    that walks the same path.  Unitary and Kraus branches share one joint
    distribution; the tail mass is the abort.
    """

    __slots__ = ("dyad", "cum", "children", "value")

    def __init__(self, dyad: Dyad | None):
        self.dyad = dyad
        self.cum = None
        self.children = None
        self.value = None

    def expand(self, chan: SimulableChannel) -> None:
        probs = []
        kids = []
        L, R = self.dyad.L, self.dyad.R
        for p, gates in chan.unitary_part:
            kids.append(_Node(Dyad(sc.apply_circuit(L, gates), sc.apply_circuit(R, gates))))
            probs.append(p)
        for q, k in chan.kraus_part:
            Lp, nl = sc.project_stab(L, k.proj)
            Rp, nr = sc.project_stab(R, k.proj)
            pr = q * (2.0**k.h) * nl * nr
            if pr > 0.0:
                Lp = _unit(sc.apply_circuit(Lp, k.circuit))
                Rp = _unit(sc.apply_circuit(Rp, k.circuit))
                kids.append(_Node(Dyad(Lp, Rp)))
            else:
                kids.append(None)
            probs.append(pr)
        total = sum(probs)
        if total > 1.0 + _P0_TOL * max(1, len(probs)):
            raise ChannelError(f"branch probabilities sum to {total}")
        self.cum = np.cumsum(probs)
        self.children = kids


def _walk_value(roots, cum0, phases, chans, measurement, l1, rng) -> tuple[float, bool]:
    u = rng.random()
    r0 = int(np.searchsorted(cum0, u, side="right"))
    if r0 >= len(roots):
        r0 = len(roots) - 1
    node = roots[r0]
    for chan in chans:
        if node.children is None:
            node.expand(chan)
        j = int(np.searchsorted(node.cum, rng.random(), side="right"))
        if j >= len(node.children):
            return 0.0, True
        node = node.children[j]
    if node.value is None:
        node.value = _measure_value(node.dyad, measurement)
    return l1 * float(np.real(phases[r0] * node.value)), False


def _chunk_worker(payload, lo: int, hi: int):
    decomp, chans, measurement, seed, bound, roots = payload
    cum0, phases = decomp.sampling_arrays()
    total = 0.0
    comp = 0.0
    aborted = 0
    for index in range(lo, hi):
        rng = sample_rng(seed, index)
        mu, did_abort = _walk_value(roots, cum0, phases, chans, measurement, bound, rng)
        if did_abort:
            aborted += 1
        if abs(mu) > bound + 1e-9:
            raise RuntimeError(f"sample {index} exceeded the l1 bound: {mu}")
        y = mu - comp
        t = total + y
        comp = (t - total) - y
        total = t
    return total, aborted


def estimate_born(
    decomp: DyadicDecomposition,
    circuit,
    measurement,
    epsilon: float,
    p_fail: float,
    seed: int,
    workers: int | None = None,
) -> EstimateReport:
    """Estimate Tr[Pi E(rho)] (or a Pauli expectation) to epsilon, p_fail.

    measurement is a StabProjector or a Hermitian PauliOp; the Pauli case
    evaluates both halves of E = Pi+ - Pi- in a single inner product.  The
    sampling loop is chunked so results are reproducible for a fixed seed at
    any worker count.
    """
    chans = list(circuit)
    for chan in chans:
        if chan.n != decomp.n:
            raise ValueError("channel width differs from the state width")
    if isinstance(measurement, sc.PauliOp):
        if measurement.n != decomp.n:
            raise ValueError("measurement width differs from the state width")
        if not measurement.is_hermitian():
            raise ValueError("Pauli observable must be Hermitian")
    elif measurement.n != decomp.n:
        raise ValueError("measurement width differs from the state width")
    M = required_samples(decomp.l1, epsilon, p_fail)
    roots = [_Node(d) for _, d in decomp.terms]
    payload = (decomp, chans, measurement, seed, decomp.l1, roots)
    results = run_chunked(_chunk_worker, payload, M, workers)
    mu_hat = kahan_sum([r[0] for r in results]) / M
    aborted = sum(r[1] for r in results)
    return EstimateReport(
        mu_hat=float(mu_hat),
        epsilon=float(epsilon),
        p_fail=float(p_fail),
        M=M,
        seed=int(seed),
        per_sample_bound=decomp.l1,
        aborted=aborted,
    )
