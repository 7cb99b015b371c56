"""Mixed-state stabilizer-rank simulator: sparsification and bit sampling.

A pure state with a known stabilizer expansion is approximated by a random
k-term vector whose terms are drawn from the expansion's l1 distribution.
Bit strings are then sampled through a chain of conditional probabilities,
each estimated either by a randomized norm sketch over equatorial stabilizer
states or, behind a test hook, by exact Gram-matrix norms.  Mixed inputs are
handled as ensembles of pure decompositions sampled per string.
"""

from __future__ import annotations

import functools
import math
import time

import numpy as np

from . import dense_oracle as do
from . import monotones
from . import stab_core as sc
from ._util import sample_rng

_ATOL = 1e-8

NORM_BACKENDS = ("fastnorm", "exact")


class RankSimError(ValueError):
    pass


def _as_generator(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return sample_rng(int(seed), 0)


class _TermSet:
    """Fixed tuple of stabilizer terms with cached Gram data and projections.

    Entries may be None after a projection annihilates a term; their Gram
    rows and columns are zero.  Sharing one _TermSet across every
    sparsification of the same decomposition lets all norm computations for
    a given measurement prefix reuse one Gram matrix.
    """

    __slots__ = ("terms", "n", "_gram", "_children", "_dense", "_zeroing")

    def __init__(self, terms, n: int | None = None):
        self.terms = tuple(terms)
        if n is None:
            n = next(t.n for t in self.terms if t is not None)
        self.n = n
        self._gram = None
        self._children = {}
        self._dense = None
        self._zeroing = None

    def gram(self) -> np.ndarray:
        if self._gram is None:
            kk = len(self.terms)
            g = np.zeros((kk, kk), dtype=complex)
            for j, tj in enumerate(self.terms):
                if tj is None:
                    continue
                g[j, j] = abs(tj.scalar()) ** 2
                for l in range(j + 1, kk):
                    tl = self.terms[l]
                    if tl is None:
                        continue
                    g[j, l] = sc.inner_product(tj, tl)
                    g[l, j] = np.conj(g[j, l])
            self._gram = g
        return self._gram

    def child(self, qubit: int, bit: int) -> "_TermSet":
        key = (qubit, bit)
        out = self._children.get(key)
        if out is None:
            pauli = sc.PauliOp.single(self.n, qubit, "Z")
            sign = 1 if bit == 0 else -1
            projected = []
            for t in self.terms:
                if t is None:
                    projected.append(None)
                    continue
                pt, rel = sc.project_pauli(t, pauli, sign)
                projected.append(None if rel == 0.0 else pt)
            out = _TermSet(projected, self.n)
            self._children[key] = out
        return out

    def dense_matrix(self) -> np.ndarray:
        if self._dense is None:
            if self.n > do.MAX_DENSE_QUBITS:
                raise RankSimError("too wide for dense expansion")
            rows = np.zeros((len(self.terms), 2**self.n), dtype=complex)
            for j, t in enumerate(self.terms):
                if t is not None:
                    rows[j] = do.expand(t)
            self._dense = rows
        return self._dense

    def zeroing(self):
        # per-term reduction data for repeated equatorial overlaps
        if self._zeroing is None:
            data = []
            for t in self.terms:
                if t is None:
                    data.append(None)
                else:
                    ops, w = sc.zeroing_ops(t)
                    data.append((ops, np.conj(w)))
            self._zeroing = data
        return self._zeroing


class SparseDecomposition:
    """Stabilizer expansion psi = sum_j c_j |phi_j> of a normalized state."""

    __slots__ = ("coeffs", "terms", "n", "l1", "_termset", "_absorbed", "_probs", "_C")

    def __init__(self, coeffs, terms, validate: bool = True):
        coeffs = np.asarray([complex(c) for c in coeffs], dtype=complex)
        terms = tuple(terms)
        if coeffs.shape[0] != len(terms):
            raise RankSimError("coefficient and term counts differ")
        keep = np.abs(coeffs) > 1e-14
        coeffs = coeffs[keep]
        terms = tuple(t for t, kept in zip(terms, keep) if kept)
        if len(terms) == 0:
            raise RankSimError("decomposition needs a nonzero term")
        n = terms[0].n
        if any(t.n != n or t.null for t in terms):
            raise RankSimError("terms must be non-null states of equal width")
        self.coeffs = coeffs
        self.terms = terms
        self.n = n
        self.l1 = float(np.sum(np.abs(coeffs)))
        self._termset = None
        self._absorbed = None
        self._probs = None
        self._C = None
        if validate:
            nrm = self.norm_sq()
            if abs(nrm - 1.0) > _ATOL:
                raise RankSimError(f"decomposition norm^2 is {nrm}, expected 1")

    def termset(self) -> _TermSet:
        if self._termset is None:
            self._termset = _TermSet(self.terms)
        return self._termset

    def absorbed_termset(self) -> _TermSet:
        # terms with the unit coefficient phases folded into their scalars
        if self._absorbed is None:
            mags = np.abs(self.coeffs)
            self._absorbed = _TermSet(
                sc.multiply_phase(t, c / m)
                for c, m, t in zip(self.coeffs, mags, self.terms)
            )
        return self._absorbed

    def sampling_probs(self) -> np.ndarray:
        if self._probs is None:
            mags = np.abs(self.coeffs)
            self._probs = mags / np.sum(mags)
        return self._probs

    def norm_sq(self) -> float:
        g = self.termset().gram()
        return float(np.real(np.conj(self.coeffs) @ g @ self.coeffs))

    def dense(self) -> np.ndarray:
        return self.coeffs @ self.termset().dense_matrix()

    @property
    def C(self) -> float:
        # C = ||c||_1 sum_j |c_j| |<psi|phi_j>|^2, via the Gram matrix
        if self._C is None:
            g = self.termset().gram()
            overlaps = np.conj(self.coeffs) @ g
            self._C = float(self.l1 * np.sum(np.abs(self.coeffs) * np.abs(overlaps) ** 2))
        return self._C

    @property
    def delta_c(self) -> float:
        return 8.0 * (self.C - 1.0) / self.l1**2


def compute_C(d: SparseDecomposition) -> tuple[float, float]:
    """Concentration constant of a decomposition and its critical precision."""
    return d.C, d.delta_c


class SparseVector:
    """Random k-term approximation Omega = (||c||_1/k) sum_a |omega_a>.

    Internally the k draws are collapsed to multiplicity counts over the
    decomposition's term set (coefficient phases absorbed), so norms reduce
    to a quadratic form in the shared Gram matrix.
    """

    __slots__ = ("k", "prefactor", "counts", "_termset")

    def __init__(self, termset: _TermSet, counts, k: int, prefactor: float):
        self._termset = termset
        self.counts = np.asarray(counts, dtype=float)
        if self.counts.shape[0] != len(termset.terms):
            raise RankSimError("count vector does not match term set")
        self.k = int(k)
        self.prefactor = float(prefactor)

    @property
    def n(self) -> int:
        return self._termset.n

    @property
    def terms(self) -> tuple:
        out = []
        for t, m in zip(self._termset.terms, self.counts):
            if t is not None:
                out.extend([t] * int(round(m)))
        return tuple(out)

    def norm_sq(self) -> float:
        g = self._termset.gram()
        return self.prefactor**2 * float(np.real(self.counts @ g @ self.counts))

    def dense(self) -> np.ndarray:
        return self.prefactor * (self.counts @ self._termset.dense_matrix())

    def project_basis_bit(self, qubit: int, bit: int) -> "SparseVector":
        return SparseVector(self._termset.child(qubit, bit), self.counts, self.k, self.prefactor)

    def equatorial_overlap(self, A: np.ndarray) -> complex:
        """<phi_A|Omega> for the equatorial state indexed by A."""
        phi = sc.equatorial_state(A)
        zeros = np.zeros(self.n, dtype=bool)
        total = 0j
        for data, m in zip(self._termset.zeroing(), self.counts):
            if data is None or m == 0.0:
                continue
            ops, wbar = data
            amp = sc.replay_ops(phi, ops).amplitude_of(zeros)
            total += m * np.conj(wbar * amp)
        return self.prefactor * total


def sparsify(d: SparseDecomposition, k: int, seed) -> SparseVector:
    """Draw k i.i.d. terms (c_j/|c_j|)|phi_j> with probability |c_j|/||c||_1."""
    if k < 1:
        raise RankSimError("k must be at least 1")
    rng = _as_generator(seed)
    counts = rng.multinomial(k, d.sampling_probs())
    return SparseVector(d.absorbed_termset(), counts, k, d.l1 / k)


_NEG_I_POW = np.array([1.0, -1.0j, -1.0, 1.0j])


@functools.lru_cache(maxsize=None)
def _equatorial_grid(n: int):
    """Bit grid and pairwise-product grid over basis labels, qubit 0 first."""
    dim = 2**n
    bits = np.array(
        [[(x >> (n - 1 - q)) & 1 for q in range(n)] for x in range(dim)],
        dtype=np.int64,
    )
    pairs = [(j, l) for j in range(n) for l in range(j + 1, n)]
    if pairs:
        pair_bits = np.stack([bits[:, j] * bits[:, l] for j, l in pairs], axis=1)
    else:
        pair_bits = np.zeros((dim, 0), dtype=np.int64)
    return bits, pair_bits


def fast_norm(v: SparseVector, eps_fn: float, p_fn: float, seed) -> float:
    """Multiplicative norm-squared sketch over random equatorial states.

    Returns eta with (1-eps_fn)||v||^2 <= eta <= (1+eps_fn)||v||^2 with
    probability at least 1-p_fn: the median of ceil(8 ln(2/p_fn)) batch
    means, each batch averaging ceil(4/eps_fn^2) draws of the unbiased
    single-state estimate eta_A = 2^n |<phi_A|v>|^2.
    """
    if not 0.0 < eps_fn <= 0.2:
        raise RankSimError("eps_fn must lie in (0, 1/5]")
    if not 0.0 < p_fn < 1.0:
        raise RankSimError("p_fn must lie in (0, 1)")
    rng = _as_generator(seed)
    n = v.n
    batch = math.ceil(4.0 / eps_fn**2)
    nbatches = math.ceil(8.0 * math.log(2.0 / p_fn))
    total = batch * nbatches
    pairs = [(j, l) for j in range(n) for l in range(j + 1, n)]
    narrow = n <= do.MAX_DENSE_QUBITS
    if narrow:
        bits, pair_bits = _equatorial_grid(n)
        vdense = v.dense()
    etas = np.empty(total)
    done = 0
    while done < total:
        m = min(32768, total - done)
        diags = rng.integers(0, 4, size=(m, n))
        offs = rng.integers(0, 2, size=(m, len(pairs)))
        if narrow:
            # eta_A = |sum_x (-i)^{x^T A x} v(x)|^2; the 2^n prefactor
            # cancels against the equatorial amplitude normalization.
            expo = (diags @ bits.T + 2 * (offs @ pair_bits.T)) & 3
            amps = _NEG_I_POW[expo] @ vdense
            etas[done : done + m] = np.abs(amps) ** 2
        else:
            scale = float(2**n)
            for r in range(m):
                A = np.diag(diags[r])
                for idx, (j, l) in enumerate(pairs):
                    A[j, l] = A[l, j] = offs[r, idx]
                etas[done + r] = scale * abs(v.equatorial_overlap(A)) ** 2
        done += m
    means = etas.reshape(nbatches, batch).mean(axis=1)
    return float(np.median(means))


class MixedInput:
    """Ensemble rho = sum_j p_j |psi_j><psi_j| of decomposed pure states."""

    __slots__ = ("ensemble", "n", "Xi_tilde", "equimagical")

    def __init__(self, ensemble, equimagical: bool | None = None):
        ensemble = tuple((float(p), d) for p, d in ensemble)
        if not ensemble:
            raise RankSimError("ensemble needs at least one part")
        if any(p < -1e-12 for p, _ in ensemble):
            raise RankSimError("ensemble weights must be nonnegative")
        total = sum(p for p, _ in ensemble)
        if abs(total - 1.0) > _ATOL:
            raise RankSimError(f"ensemble weights sum to {total}, expected 1")
        n = ensemble[0][1].n
        if any(d.n != n for _, d in ensemble):
            raise RankSimError("mixed widths in ensemble")
        self.ensemble = ensemble
        self.n = n
        self.Xi_tilde = float(sum(p * d.l1**2 for p, d in ensemble))
        l1sq = [d.l1**2 for _, d in ensemble]
        uniform = max(l1sq) - min(l1sq) <= _ATOL
        if equimagical is None:
            equimagical = uniform
        elif equimagical and not uniform:
            raise RankSimError("ensemble parts have unequal extent")
        self.equimagical = bool(equimagical)

    def dense(self) -> np.ndarray:
        rho = np.zeros((2**self.n, 2**self.n), dtype=complex)
        for p, d in self.ensemble:
            vec = d.dense()
            rho += p * np.outer(vec, np.conj(vec))
        return rho


def pure_decomposition_1q(state: monotones.BlochState) -> SparseDecomposition:
    """Extent-optimal stabilizer expansion of a pure single-qubit state."""
    _, parts = monotones.decompose_1q_state(state)
    if len(parts) != 1 or abs(parts[0][0] - 1.0) > 1e-9:
        raise RankSimError("state is not pure")
    _, _, terms = parts[0]
    return SparseDecomposition([c for c, _ in terms], [t for _, t in terms])


def mixed_input_product(states) -> MixedInput:
    """Equimagical product input from single-qubit Bloch factors.

    Each factor decomposes into pure parts of equal extent whose optimal
    stabilizer expansions are tensored across the qubits, so every ensemble
    member shares the same l1 weight and the sampler's per-string term count
    is deterministic.
    """
    states = list(states)
    if not states:
        raise RankSimError("need at least one qubit")
    acc = [(1.0, [(1.0 + 0j, None)])]
    for rho in states:
        if not isinstance(rho, monotones.BlochState):
            rho = monotones.BlochState(*rho)
        _, parts = monotones.decompose_1q_state(rho)
        grown = []
        for weight, expansion in acc:
            for w2, _, terms in parts:
                joined = [
                    (c1 * c2, t2 if t1 is None else sc.tensor(t1, t2))
                    for c1, t1 in expansion
                    for c2, t2 in terms
                ]
                grown.append((weight * w2, joined))
        acc = grown
    ensemble = []
    for weight, expansion in acc:
        if weight <= 1e-14:
            continue
        d = SparseDecomposition([c for c, _ in expansion], [t for _, t in expansion])
        ensemble.append((weight, d))
    total = sum(p for p, _ in ensemble)
    ensemble = [(p / total, d) for p, d in ensemble]
    return MixedInput(ensemble)


class RuntimeReport:
    """Per-run cost accounting for the bit-string sampler."""

    __slots__ = (
        "count",
        "w",
        "delta",
        "p_fail",
        "seed",
        "norm_backend",
        "regime",
        "ks",
        "fastnorm_calls",
        "wall_time_s",
    )

    def __init__(self, count, w, delta, p_fail, seed, norm_backend, regime, ks, fastnorm_calls, wall_time_s):
        self.count = count
        self.w = w
        self.delta = delta
        self.p_fail = p_fail
        self.seed = seed
        self.norm_backend = norm_backend
        self.regime = regime
        self.ks = np.asarray(ks, dtype=np.int64)
        self.fastnorm_calls = int(fastnorm_calls)
        self.wall_time_s = float(wall_time_s)

    def to_dict(self) -> dict:
        return {
            "count": self.count,
            "w": self.w,
            "delta": self.delta,
            "p_fail": self.p_fail,
            "seed": self.seed,
            "norm_backend": self.norm_backend,
            "regime": self.regime,
            "k_min": int(self.ks.min()),
            "k_max": int(self.ks.max()),
            "k_mean": float(self.ks.mean()),
            "fastnorm_calls": self.fastnorm_calls,
            "wall_time_s": self.wall_time_s,
        }


class _Part:
    __slots__ = ("termset", "probs", "l1")

    def __init__(self, termset: _TermSet, probs: np.ndarray, l1: float):
        self.termset = termset
        self.probs = probs
        self.l1 = l1


def _load_parts(inp: MixedInput, prefix) -> list[_Part]:
    prefix = tuple(tuple(g) for g in prefix)
    parts = []
    for _, d in inp.ensemble:
        ts = d.absorbed_termset()
        if prefix:
            ts = _TermSet((sc.apply_circuit(t, prefix) for t in ts.terms), ts.n)
        parts.append(_Part(ts, d.sampling_probs(), d.l1))
    return parts


def sample_bitstrings(
    inp: MixedInput,
    w: int,
    delta: float,
    p_fail: float,
    count: int,
    seed: int,
    norm_backend: str = "fastnorm",
    prefix=(),
) -> tuple[list[str], RuntimeReport]:
    """Sample w-bit measurement strings from qubits 0..w-1 of the input.

    Per string: an ensemble part is drawn, sparsified to k terms, and the
    bits are sampled through a chain of conditional probabilities using at
    most 2w+1 norm estimates; whichever branch's direct estimate would fall
    below 1/2 is obtained by complementation instead of a second estimate.
    The term count follows the standard rule k = ceil(12 l1^2 / delta)
    unless delta < 24 max_j (C_j - 1)/l1_j^2, where the sharpened rule
    k = ceil(4 l1^2 (D/delta_S^2 + 1/delta_S)) with delta_S = delta/3 takes
    over.  The error budget splits as delta_S = delta/3, eps = 2 delta/3,
    eps_fn = eps/(3w), p_fn = p_fail/(2w).  An optional Clifford prefix is
    applied to the state before measurement.
    """
    w = int(w)
    if w < 1 or w > inp.n:
        raise RankSimError("w must lie in 1..n")
    if not 0.0 < delta < 1.0:
        raise RankSimError("delta must lie in (0, 1)")
    if not 0.0 < p_fail < 1.0:
        raise RankSimError("p_fail must lie in (0, 1)")
    if count < 1:
        raise RankSimError("count must be at least 1")
    if norm_backend not in NORM_BACKENDS:
        raise RankSimError(f"unknown norm backend {norm_backend!r}")

    start = time.perf_counter()
    parts = _load_parts(inp, prefix)
    cumw = np.cumsum([p for p, _ in inp.ensemble])
    cumw[-1] = 1.0

    l1sq = np.array([d.l1**2 for _, d in inp.ensemble])
    D = max(max((d.C - 1.0) / d.l1**2 for _, d in inp.ensemble), 0.0)
    delta_s = delta / 3.0
    if delta < 24.0 * D:
        regime = "sharpened"
        ks_by_part = np.ceil(4.0 * l1sq * (D / delta_s**2 + 1.0 / delta_s)).astype(np.int64)
    else:
        regime = "standard"
        ks_by_part = np.ceil(12.0 * l1sq / delta).astype(np.int64)
    eps_fn = min(2.0 * delta / (9.0 * w), 0.2)
    p_fn = p_fail / (2.0 * w)
    exact = norm_backend == "exact"

    strings = []
    ks = np.empty(count, dtype=np.int64)
    calls = 0
    for i in range(count):
        rng = sample_rng(seed, i)
        j = int(np.searchsorted(cumw, rng.random(), side="right"))
        part = parts[j]
        k = int(ks_by_part[j])
        ks[i] = k
        counts = rng.multinomial(k, part.probs)
        vec = SparseVector(part.termset, counts, k, part.l1 / k)

        if exact:
            level = vec.norm_sq()
        else:
            level = fast_norm(vec, eps_fn, p_fn, rng)
            calls += 1
        bits = []
        for b in range(w):
            v0 = vec.project_basis_bit(b, 0)
            if level <= 0.0:
                p0 = 0.5
            else:
                if exact:
                    eta0 = v0.norm_sq()
                else:
                    eta0 = fast_norm(v0, eps_fn, p_fn, rng)
                    calls += 1
                p0 = eta0 / level
                if p0 >= 0.5:
                    v1 = vec.project_basis_bit(b, 1)
                    if exact:
                        eta1 = v1.norm_sq()
                    else:
                        eta1 = fast_norm(v1, eps_fn, p_fn, rng)
                        calls += 1
                    p0 = 1.0 - eta1 / level
            p0 = min(max(p0, 0.0), 1.0)
            bit = 0 if rng.random() < p0 else 1
            bits.append(bit)
            vec = v0 if bit == 0 else vec.project_basis_bit(b, 1)
            level *= p0 if bit == 0 else 1.0 - p0
        strings.append("".join(map(str, bits)))

    report = RuntimeReport(
        count,
        w,
        delta,
        p_fail,
        seed,
        norm_backend,
        regime,
        ks,
        calls,
        time.perf_counter() - start,
    )
    return strings, report
