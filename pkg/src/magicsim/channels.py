"""Dyads, dyadic decompositions, stabilizer Kraus operators and channels.

A channel is decomposed into a probabilistic mixture of Clifford circuits
plus weighted Kraus operators of the fixed form 2^{h/2} U Pi with U Clifford
and Pi a stabilizer projector of h generators.  That shape keeps trace-norm
transition probabilities exactly computable during sampling.  All types are
immutable after construction and validated densely at small width.
"""

from __future__ import annotations

import numpy as np

from . import dense_oracle as do
from . import monotones
from . import stab_core as sc

DENSE_CHECK_MAX = 6
DEFAULT_MAX_TERMS = 64

_ATOL = 1e-8


class ChannelError(ValueError):
    pass


class Dyad:
    """Outer product |L><R| of two stabilizer states (weight lives outside)."""

    __slots__ = ("L", "R")

    def __init__(self, L: sc.StabState, R: sc.StabState):
        if L.n != R.n:
            raise ChannelError("dyad sides have different widths")
        if L.null or R.null:
            raise ChannelError("dyad sides must be non-null")
        self.L = L
        self.R = R

    @property
    def n(self) -> int:
        return self.L.n

    def dense(self) -> np.ndarray:
        return np.outer(do.expand(self.L), np.conj(do.expand(self.R)))


class DyadicDecomposition:
    """Weighted dyad expansion rho = sum_j alpha_j |L_j><R_j|."""

    __slots__ = ("terms", "n", "l1", "_sampling")

    def __init__(self, terms, validate: bool = True):
        terms = tuple((complex(a), d) for a, d in terms)
        if not terms:
            raise ChannelError("decomposition needs at least one term")
        n = terms[0][1].n
        if any(d.n != n for _, d in terms):
            raise ChannelError("mixed widths in decomposition")
        self.terms = terms
        self.n = n
        self._sampling = None
        self.l1 = float(sum(abs(a) for a, _ in terms))
        if self.l1 < 1.0 - 1e-9:
            raise ChannelError("dyadic l1 weight below 1")
        if validate and n <= DENSE_CHECK_MAX:
            mat = self.dense()
            if np.abs(mat - mat.conj().T).max() > _ATOL:
                raise ChannelError("decomposition is not Hermitian")
            if abs(np.trace(mat) - 1.0) > _ATOL:
                raise ChannelError("decomposition trace differs from 1")

    def dense(self) -> np.ndarray:
        if self.n > DENSE_CHECK_MAX:
            raise ChannelError("dense expansion capped")
        out = np.zeros((2**self.n, 2**self.n), dtype=complex)
        for a, d in self.terms:
            out += a * d.dense()
        return out

    def sampling_arrays(self):
        """Cached (cumulative |alpha| distribution, unit phases) for sampling."""
        if self._sampling is None:
            absa = np.array([abs(a) for a, _ in self.terms])
            cum = np.cumsum(absa)
            cum /= cum[-1]
            phases = np.array([a / abs(a) for a, _ in self.terms])
            self._sampling = (cum, phases)
        return self._sampling


class StabKraus:
    """Kraus operator 2^{h/2} U Pi with Clifford U and h-generator Pi."""

    __slots__ = ("h", "proj", "circuit")

    def __init__(self, h: int, proj: sc.StabProjector, circuit):
        if h != len(proj.generators):
            raise ChannelError("h must match the generator count")
        circuit = tuple(tuple(g) for g in circuit)
        for g in circuit:
            if g[0] not in sc.GATE_NAMES:
                raise ChannelError(f"unknown gate {g[0]!r}")
        self.h = int(h)
        self.proj = proj
        self.circuit = circuit

    @property
    def n(self) -> int:
        return self.proj.n

    @property
    def scale(self) -> float:
        return float(2.0 ** (0.5 * self.h))

    def dense(self) -> np.ndarray:
        return do.kraus_matrix(self)


class SimulableChannel:
    """Mixture of Clifford unitaries plus stabilizer Kraus operators.

    unitary_part holds (p_r, circuit) with p_r >= 0, kraus_part holds
    (q_s, StabKraus); completeness sum p_r I + sum q_s K_s^dag K_s = I is
    verified densely up to six qubits.
    """

    __slots__ = ("n", "unitary_part", "kraus_part", "P_U", "P_K")

    def __init__(self, n: int, unitary_part, kraus_part, max_terms: int = DEFAULT_MAX_TERMS):
        unitary_part = tuple((float(p), tuple(tuple(g) for g in gates)) for p, gates in unitary_part)
        kraus_part = tuple((float(q), k) for q, k in kraus_part)
        if len(unitary_part) + len(kraus_part) > max_terms:
            raise ChannelError("channel decomposition exceeds the term budget")
        if any(p < 0 for p, _ in unitary_part) or any(q < 0 for q, _ in kraus_part):
            raise ChannelError("negative channel weights")
        for _, gates in unitary_part:
            for g in gates:
                if g[0] not in sc.GATE_NAMES:
                    raise ChannelError(f"unknown gate {g[0]!r}")
                if any(not (0 <= int(q) < n) for q in g[1:]):
                    raise ChannelError("gate target out of range")
        for _, k in kraus_part:
            if k.n != n:
                raise ChannelError("Kraus width differs from channel width")
        self.n = int(n)
        self.unitary_part = unitary_part
        self.kraus_part = kraus_part
        self.P_U = float(sum(p for p, _ in unitary_part))
        self.P_K = 1.0 - self.P_U
        if not -1e-12 <= self.P_U <= 1.0 + 1e-12:
            raise ChannelError("unitary weight outside [0, 1]")
        if n <= DENSE_CHECK_MAX:
            defect = do.channel_completeness_defect(self, n)
            if defect > _ATOL:
                raise ChannelError(f"Kraus completeness violated by {defect:.3g}")


def _letters_at(n: int, positions: dict[int, str]) -> sc.PauliOp:
    word = "".join(positions.get(q, "I") for q in range(n))
    return sc.PauliOp.from_letters(word)


def _check_targets(qubits, n: int, expect: int | None = None) -> list[int]:
    qs = [int(q) for q in qubits]
    if expect is not None and len(qs) != expect:
        raise ChannelError(f"channel needs exactly {expect} target qubit(s)")
    if len(set(qs)) != len(qs):
        raise ChannelError("duplicate target qubits")
    if any(not (0 <= q < n) for q in qs):
        raise ChannelError("target qubit out of range")
    return qs


def builtin_channel(name: str, qubits, n: int, params: dict | None = None,
                    max_terms: int = DEFAULT_MAX_TERMS) -> SimulableChannel:
    """Built-in channel library, embedded at global width n.

    clifford_mix: params {"terms": [[p, gates], ...]} with local qubit
    indices into `qubits`.  depolarizing: params {"lambda": l} on one qubit.
    t_gadget: qubits = [data, ancilla].  pauli_measure_and_forward: params
    {"pauli": letters} over `qubits`.
    """
    params = dict(params or {})
    if name == "depolarizing":
        (q,) = _check_targets(qubits, n, expect=1)
        lam = float(params.get("lambda", params.get("p", 0.0)))
        if not 0.0 <= lam <= 1.0:
            raise ChannelError("depolarizing strength must lie in [0, 1]")
        raw = [
            (1.0 - 0.75 * lam, ()),
            (0.25 * lam, (("X", q),)),
            (0.25 * lam, (("Y", q),)),
            (0.25 * lam, (("Z", q),)),
        ]
        unitary = [(p, gates) for p, gates in raw if p > 0.0]
        return SimulableChannel(n, unitary, [], max_terms)
    if name == "clifford_mix":
        qs = _check_targets(qubits, n)
        terms = params.get("terms")
        if not terms:
            raise ChannelError("clifford_mix needs a nonempty terms list")
        unitary = []
        for p, gates in terms:
            mapped = tuple((g[0], *(qs[int(t)] for t in g[1:])) for g in gates)
            unitary.append((float(p), mapped))
        return SimulableChannel(n, unitary, [], max_terms)
    if name == "t_gadget":
        d, a = _check_targets(qubits, n, expect=2)
        zz = _letters_at(n, {d: "Z", a: "Z"})
        kraus = []
        for sign, circuit in ((+1, (("CX", d, a),)), (-1, (("CX", d, a), ("S", d)))):
            proj = sc.StabProjector(n, [(zz, sign)])
            kraus.append((0.5, StabKraus(1, proj, circuit)))
        return SimulableChannel(n, [], kraus, max_terms)
    if name == "pauli_measure_and_forward":
        qs = _check_targets(qubits, n)
        letters = str(params.get("pauli", "Z" * len(qs)))
        if len(letters) != len(qs) or any(c not in "XYZ" for c in letters):
            raise ChannelError("pauli string must give X, Y or Z per target")
        op = _letters_at(n, dict(zip(qs, letters)))
        kraus = [
            (0.5, StabKraus(1, sc.StabProjector(n, [(op, +1)]), ())),
            (0.5, StabKraus(1, sc.StabProjector(n, [(op, -1)]), ())),
        ]
        return SimulableChannel(n, [], kraus, max_terms)
    raise ChannelError(f"unknown channel {name!r}")


def _gate_from_json(g) -> tuple:
    return (str(g[0]).upper(), *(int(t) for t in g[1:]))


def channel_from_json(obj: dict, n: int, max_terms: int = DEFAULT_MAX_TERMS) -> SimulableChannel:
    """Channel spec: {"type", "qubits", "params"} or explicit unitary/kraus."""
    if "type" in obj:
        return builtin_channel(obj["type"], obj.get("qubits", []), n, obj.get("params"), max_terms)
    unitary = [
        (float(p), tuple(_gate_from_json(g) for g in gates))
        for p, gates in obj.get("unitary", [])
    ]
    kraus = []
    for q, h, generators, gates in obj.get("kraus", []):
        ops = [(sc.PauliOp.from_letters(word), int(sign)) for word, sign in generators]
        proj = sc.StabProjector(n, ops)
        kraus.append((float(q), StabKraus(int(h), proj, tuple(_gate_from_json(g) for g in gates))))
    if not unitary and not kraus:
        raise ChannelError("channel spec has neither unitary nor kraus part")
    return SimulableChannel(n, unitary, kraus, max_terms)


def dyadic_decompose_product(states) -> DyadicDecomposition:
    """Optimal dyadic decomposition of a product of single-qubit states.

    Each factor is expanded through its equimagical decomposition and the
    extent-optimal stabilizer expansions of the pure parts, so the total
    l1 weight is the product of the single-qubit monotone values.
    """
    states = list(states)
    if not states:
        raise ChannelError("need at least one qubit")
    per_qubit = []
    for rho in states:
        if not isinstance(rho, monotones.BlochState):
            rho = monotones.BlochState(*rho)
        _, parts = monotones.decompose_1q_state(rho)
        dyads = []
        for weight, _, terms in parts:
            for cl, stl in terms:
                for cr, str_ in terms:
                    dyads.append((weight * cl * np.conj(cr), stl, str_))
        per_qubit.append(dyads)
    acc = [(a, L, R) for a, L, R in per_qubit[0]]
    for dyads in per_qubit[1:]:
        acc = [
            (a1 * a2, sc.tensor(L1, L2), sc.tensor(R1, R2))
            for a1, L1, R1 in acc
            for a2, L2, R2 in dyads
        ]
    terms = [(a, Dyad(L, R)) for a, L, R in acc]
    return DyadicDecomposition(terms, validate=len(states) <= DENSE_CHECK_MAX)
