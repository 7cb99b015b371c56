"""Magic monotones.

Single-qubit states get exact analytic treatment: canonicalization into the
P_Y region, the one-parameter witness family certifying the common value of
dyadic negativity, generalized robustness and extent, equimagical
decompositions, and optimal stabilizer expansions of pure states.  Products
multiply.  The robustness of magic is computed as an l1-minimizing linear
program over enumerated stabilizer states for up to three qubits.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import _simplex
from . import stab_core as sc

SQRT2 = float(np.sqrt(2.0))
SQRT3 = float(np.sqrt(3.0))
SQRT6 = float(np.sqrt(6.0))
Q_MIN = float(np.sqrt(2.0 / 3.0))

_NORM_TOL = 1e-12
_PURE_TOL = 1e-9

_NAMED_BLOCH = {
    "0": (0.0, 0.0, 1.0),
    "1": (0.0, 0.0, -1.0),
    "+": (1.0, 0.0, 0.0),
    "-": (-1.0, 0.0, 0.0),
    "+i": (0.0, 1.0, 0.0),
    "-i": (0.0, -1.0, 0.0),
    "H": (1.0 / SQRT2, 0.0, 1.0 / SQRT2),
    "T": (1.0 / SQRT2, 1.0 / SQRT2, 0.0),
    "F": (1.0 / SQRT3, 1.0 / SQRT3, 1.0 / SQRT3),
}

# rotation of the Bloch vector when the gate is applied to the state
_BLOCH_ROT = {
    "H": lambda x, y, z: (z, -y, x),
    "S": lambda x, y, z: (-y, x, z),
    "SDG": lambda x, y, z: (y, -x, z),
    "X": lambda x, y, z: (x, -y, -z),
    "Y": lambda x, y, z: (-x, y, -z),
    "Z": lambda x, y, z: (-x, -y, z),
}

_GATE_INVERSE = {"H": "H", "S": "SDG", "SDG": "S", "X": "X", "Y": "Y", "Z": "Z"}


class BlochState:
    """Single-qubit state as a Bloch vector (bx, by, bz)."""

    __slots__ = ("bx", "by", "bz")

    def __init__(self, bx: float, by: float, bz: float):
        self.bx = float(bx)
        self.by = float(by)
        self.bz = float(bz)
        if self.norm_sq() > 1.0 + _NORM_TOL:
            raise ValueError("Bloch vector lies outside the unit ball")

    @classmethod
    def named(cls, name: str) -> "BlochState":
        try:
            return cls(*_NAMED_BLOCH[name])
        except KeyError:
            raise ValueError(f"unknown state name {name!r}") from None

    def norm_sq(self) -> float:
        return self.bx**2 + self.by**2 + self.bz**2

    @property
    def l1(self) -> float:
        return abs(self.bx) + abs(self.by) + abs(self.bz)

    @property
    def f(self) -> float:
        return (self.bx + self.by + self.bz) / SQRT3

    @property
    def r_A(self) -> float:
        return (self.bx + self.bz - 2.0 * self.by) / SQRT6

    @property
    def r_B(self) -> float:
        return (self.bx - self.bz) / SQRT2

    @property
    def r_F(self) -> float:
        return self.f

    def is_pure(self, tol: float = _PURE_TOL) -> bool:
        return abs(self.norm_sq() - 1.0) <= 2.0 * tol

    def in_octahedron(self, tol: float = _NORM_TOL) -> bool:
        return self.l1 <= 1.0 + tol

    def in_PY(self, tol: float = 1e-12) -> bool:
        return (
            self.bx >= -tol
            and self.by >= -tol
            and self.bz >= -tol
            and self.by <= self.bx + tol
            and self.by <= self.bz + tol
        )

    def scaled(self, alpha: float) -> "BlochState":
        """Mixture alpha*rho + (1-alpha)*I/2."""
        return BlochState(alpha * self.bx, alpha * self.by, alpha * self.bz)

    def rotated(self, gates) -> "BlochState":
        x, y, z = self.bx, self.by, self.bz
        for gate in gates:
            x, y, z = _BLOCH_ROT[gate[0] if isinstance(gate, tuple) else gate](x, y, z)
        return BlochState(x + 0.0, y + 0.0, z + 0.0)

    def density(self) -> np.ndarray:
        return density_matrix(self)

    def pure_vector(self) -> np.ndarray:
        if not self.is_pure():
            raise ValueError("state is not pure")
        theta = np.arccos(np.clip(self.bz, -1.0, 1.0))
        phi = np.arctan2(self.by, self.bx)
        return np.array([np.cos(theta / 2.0), np.exp(1j * phi) * np.sin(theta / 2.0)])

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.bx, self.by, self.bz)

    def __repr__(self) -> str:
        return f"BlochState({self.bx:.6g}, {self.by:.6g}, {self.bz:.6g})"


def density_matrix(rho: BlochState) -> np.ndarray:
    x, y, z = rho.bx, rho.by, rho.bz
    return 0.5 * np.array([[1.0 + z, x - 1j * y], [x + 1j * y, 1.0 - z]])


def canonicalize_PY(rho: BlochState) -> tuple[list[tuple], BlochState]:
    """Find single-qubit Clifford gates mapping rho into the P_Y region.

    Breadth-first over signed-permutation rotations; all arithmetic is exact
    (negation and coordinate swap), so the canonical vector carries the same
    floats as the input up to reordering and sign.
    """
    start = (rho.bx + 0.0, rho.by + 0.0, rho.bz + 0.0)
    frontier = [((), start)]
    seen = {start}
    for _ in range(8):
        for word, vec in frontier:
            cand = BlochState(*vec)
            if cand.in_PY():
                return [(g, 0) for g in word], cand
        nxt = []
        for word, vec in frontier:
            for gname in ("H", "S", "SDG", "X", "Y", "Z"):
                x, y, z = _BLOCH_ROT[gname](*vec)
                key = (x + 0.0, y + 0.0, z + 0.0)
                if key not in seen:
                    seen.add(key)
                    nxt.append((word + (gname,), key))
        frontier = nxt
    raise RuntimeError("canonicalization search failed")  # unreachable: orbit covers P_Y


def invert_word(gates: list[tuple]) -> list[tuple]:
    return [(_GATE_INVERSE[g[0]], g[1]) for g in reversed(gates)]


# -- witness family -----------------------------------------------------------


@dataclass(frozen=True)
class Witness1Q:
    """Dual witness for the single-qubit monotones.

    The witness operator is (1 + q*Ht + sqrt(1-q^2)*Y) / (1 + q/sqrt(2)) with
    Ht = (X+Z)/sqrt(2), evaluated against the canonicalized state; clifford
    is the gate word taking the input state into P_Y.
    """

    q: float
    value: float
    clifford: tuple

    def bloch_direction(self) -> tuple[float, float, float]:
        return (self.q / SQRT2, float(np.sqrt(max(0.0, 1.0 - self.q**2))), self.q / SQRT2)

    def overlap_sq(self, phi: BlochState) -> float:
        """|<omega|phi>|^2 for pure phi given in the canonical frame."""
        nx, ny, nz = self.bloch_direction()
        dot = nx * phi.bx + ny * phi.by + nz * phi.bz
        return (1.0 + dot) / (1.0 + self.q / SQRT2)


def _witness_eval(q: float, rho: BlochState) -> float:
    root = float(np.sqrt(max(0.0, 1.0 - q * q)))
    return (1.0 + q * (rho.bx + rho.bz) / SQRT2 + root * rho.by) / (1.0 + q / SQRT2)


def _maximize_witness(rho: BlochState) -> tuple[float, float]:
    """Maximize the witness value over q in [sqrt(2/3), 1].

    Grid pre-scan plus golden-section refinement; endpoints are evaluated
    exactly so that endpoint maxima carry no search error.
    """
    qs = np.linspace(Q_MIN, 1.0, 1000)
    vals = np.array([_witness_eval(q, rho) for q in qs])
    best = int(np.argmax(vals))
    if best == 0:
        lo, hi = qs[0], qs[1]
    elif best == len(qs) - 1:
        lo, hi = qs[-2], qs[-1]
    else:
        lo, hi = qs[best - 1], qs[best + 1]
    phi = (np.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - phi * (b - a)
    d = a + phi * (b - a)
    fc, fd = _witness_eval(c, rho), _witness_eval(d, rho)
    while b - a > 1e-12:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - phi * (b - a)
            fc = _witness_eval(c, rho)
        else:
            a, c, fc = c, d, fd
            d = a + phi * (b - a)
            fd = _witness_eval(d, rho)
    q_in = 0.5 * (a + b)
    candidates = [(Q_MIN, _witness_eval(Q_MIN, rho)), (1.0, _witness_eval(1.0, rho)), (q_in, _witness_eval(q_in, rho))]
    q_star, val = max(candidates, key=lambda t: t[1])
    return float(q_star), float(val)


def lambda_plus_1q(rho: BlochState) -> tuple[float, Witness1Q]:
    """Common value of dyadic negativity, generalized robustness and extent.

    Returns exactly 1 for stabilizer-polytope members; the witness certifies
    the value for everything else.
    """
    word, canon = canonicalize_PY(rho)
    q_star, val = _maximize_witness(canon)
    witness = Witness1Q(q=q_star, value=val, clifford=tuple(word))
    if rho.in_octahedron():
        return 1.0, witness
    return max(1.0, val), witness


def product_monotone(states: list[BlochState]) -> float:
    out = 1.0
    for s in states:
        out *= lambda_plus_1q(s)[0]
    return out


def stab_norm_1q(rho: BlochState) -> float:
    return 0.5 * (1.0 + rho.l1)


def robustness_1q(rho: BlochState) -> float:
    return rho.l1 if rho.l1 > 1.0 else 1.0


# -- pure-state extent --------------------------------------------------------

_CANON_TERM_GATES = {
    "zero": (),
    "plus": (("H", 0),),
    "plus_i": (("H", 0), ("S", 0)),
}


def _canonical_term_state(kind: str) -> sc.StabState:
    return sc.apply_circuit(sc.zero_state(1), _CANON_TERM_GATES[kind])


def _axis_state(bloch: BlochState) -> sc.StabState:
    """StabState for a Bloch vector sitting exactly on a coordinate axis."""
    key = tuple(int(round(c)) for c in bloch.as_tuple())
    gates = {
        (0, 0, 1): (),
        (0, 0, -1): (("X", 0),),
        (1, 0, 0): (("H", 0),),
        (-1, 0, 0): (("H", 0), ("Z", 0)),
        (0, 1, 0): (("H", 0), ("S", 0)),
        (0, -1, 0): (("H", 0), ("SDG", 0)),
    }[key]
    return sc.apply_circuit(sc.zero_state(1), gates)


def _weiszfeld_l1(particular: np.ndarray, null_dir: np.ndarray) -> np.ndarray:
    """Minimize sum_j |particular_j + t*null_dir_j| over complex t.

    IRLS on the smoothed objective sum_j sqrt(|.|^2 + mu^2) with mu driven
    to zero; plain Weiszfeld stalls when an iterate lands on a point where a
    coordinate vanishes.  The kink points themselves are also evaluated, so
    an optimum with a zero coefficient is recovered exactly.
    """

    def value(t: complex) -> float:
        return float(np.sum(np.abs(particular + t * null_dir)))

    anchors = [
        -p / d for p, d in zip(particular, null_dir) if abs(d) > 1e-15
    ]
    t = complex(np.mean(anchors)) if anchors else 0.0 + 0.0j
    mu = 1e-2
    while mu > 1e-13:
        for _ in range(300):
            r = np.sqrt(np.abs(particular + t * null_dir) ** 2 + mu * mu)
            w = 1.0 / r
            denom = float(np.sum(w * np.abs(null_dir) ** 2))
            if denom == 0.0:
                break
            t_new = -np.sum(w * np.conj(null_dir) * particular) / denom
            step = abs(t_new - t)
            t = t_new
            if step < mu * 1e-8:
                break
        mu *= 0.1
    best_t = min(anchors + [t], key=value)
    return particular + best_t * null_dir


def extent_pure_1q(psi: BlochState) -> tuple[float, list[tuple[complex, sc.StabState]]]:
    """Optimal stabilizer expansion of a pure single-qubit state.

    Generic states decompose over the two nearest stabilizer states; states
    whose optimal witness parameter is pinned at sqrt(2/3) (the boundary
    faces of P_Y) need a third term.  The returned l1 weight squared is
    certified against the witness value to 1e-8.
    """
    if not psi.is_pure():
        raise ValueError("extent_pure_1q needs a pure state")
    xi, witness = lambda_plus_1q(psi)
    word = list(witness.clifford)
    inverse = invert_word(word)
    if psi.in_octahedron(1e-9):
        canon = psi.rotated(word)
        term = sc.apply_circuit(_axis_state(canon), inverse)
        return 1.0, [(1.0 + 0j, term)]
    canon = psi.rotated(word)
    vec = canon.pure_vector()
    a = vec[0] - vec[1]
    b = SQRT2 * vec[1]
    if witness.q > Q_MIN + 1e-9:
        coeffs = np.array([a, b])
        kinds = ("zero", "plus")
    else:
        particular = np.array([a, b, 0.0 + 0j])
        null_dir = np.array([-(1.0 - 1j) / SQRT2, -1j, 1.0 + 0j])
        coeffs = _weiszfeld_l1(particular, null_dir)
        kinds = ("zero", "plus", "plus_i")
    l1 = float(np.sum(np.abs(coeffs)))
    if abs(l1 * l1 - xi) > 1e-8:
        raise RuntimeError(f"extent certificate failed: primal {l1 * l1}, dual {xi}")
    terms = []
    for c, kind in zip(coeffs, kinds):
        if abs(c) < 1e-12:
            continue
        terms.append((complex(c), sc.apply_circuit(_canonical_term_state(kind), inverse)))
    return xi, terms


# -- equimagical decompositions ----------------------------------------------


@dataclass(frozen=True)
class EquimagicalDecomp:
    """Convex decomposition into pure parts of equal extent."""

    parts: tuple  # of (weight, BlochState)
    common_extent: float


def _special_a(f: float) -> float:
    """Distance parameter of the three special states at magic level f."""
    a = (2.0 * SQRT3 * f - SQRT6 * float(np.sqrt(max(0.0, 1.0 - f * f)))) / 6.0
    return min(max(a, 0.0), 1.0 / SQRT3)


def special_states(f: float) -> tuple[BlochState, BlochState, BlochState]:
    """The X, Y, Z special states of magic level f (all extent-equal)."""
    a = _special_a(f)
    big = float(np.sqrt(max(0.0, 1.0 - 2.0 * a * a)))
    return (
        BlochState(big, a, a),
        BlochState(a, big, a),
        BlochState(a, a, big),
    )


def equimagical_decompose(rho: BlochState) -> EquimagicalDecomp:
    """Decompose a P_Y state into pure parts sharing one extent.

    Inside the special-state triangle the parts are the three special states;
    outside, the two pure states obtained by pushing the residual onto the
    sigma_B axis.  Stabilizer inputs are rejected; canonicalize first.
    """
    if not rho.in_PY(1e-9):
        raise ValueError("state must be canonicalized into P_Y first")
    if rho.in_octahedron():
        raise ValueError("stabilizer-polytope state has no magic to decompose")
    if rho.is_pure():
        ext, _ = lambda_plus_1q(rho)
        return EquimagicalDecomp(parts=((1.0, rho),), common_extent=ext)
    f = rho.f
    r_A = rho.r_A
    r_B = rho.r_B
    psi_x, psi_y, psi_z = special_states(f)
    R = psi_x.r_A
    S = psi_x.r_B
    tol = 1e-9
    if R > tol:
        w_y = (1.0 - r_A / R) / 3.0
        diff = r_B / S
        w_x = (1.0 - w_y + diff) / 2.0
        w_z = (1.0 - w_y - diff) / 2.0
        if w_x >= -tol and w_y >= -tol and w_z >= -tol:
            raw = ((w_x, psi_x), (w_y, psi_y), (w_z, psi_z))
            parts = tuple((max(w, 0.0), st) for w, st in raw if w > tol)
            ext, _ = lambda_plus_1q(parts[0][1])
            return EquimagicalDecomp(parts=parts, common_extent=ext)
    s_sq = 1.0 - r_A * r_A - f * f
    if s_sq < r_B * r_B - 1e-12:
        raise RuntimeError("state outside the unit ball in rotated coordinates")
    s = float(np.sqrt(max(s_sq, 0.0)))
    phis = []
    for sgn in (+1.0, -1.0):
        rb = sgn * s
        x = r_A / SQRT6 + rb / SQRT2 + f / SQRT3
        y = -2.0 * r_A / SQRT6 + f / SQRT3
        z = r_A / SQRT6 - rb / SQRT2 + f / SQRT3
        phis.append(BlochState(min(x, 1.0), y, max(z, -1.0)))
    p_plus = 0.5 * (1.0 + (r_B / s if s > 0 else 0.0))
    p_minus = 1.0 - p_plus
    for phi in phis:
        if not phi.in_PY(1e-7):
            raise RuntimeError("equimagical parts left the canonical region")
    parts = tuple((p, phi) for p, phi in zip((p_plus, p_minus), phis) if p > 1e-12)
    ext, _ = lambda_plus_1q(parts[0][1])
    return EquimagicalDecomp(parts=parts, common_extent=ext)


def decompose_1q_state(rho: BlochState) -> tuple[float, list[tuple[float, float, list[tuple[complex, sc.StabState]]]]]:
    """Full single-qubit preparation pipeline, in the original frame.

    Returns (Lambda_plus, parts) with parts = [(weight, extent, terms)], the
    terms being an optimal stabilizer expansion of each pure part.  Polytope
    members decompose over octahedron vertices with Lambda_plus = 1.
    """
    if rho.in_octahedron():
        parts = []
        rem = 1.0 - rho.l1
        for val, axis in (
            (rho.bx, (1.0, 0.0, 0.0)),
            (rho.by, (0.0, 1.0, 0.0)),
            (rho.bz, (0.0, 0.0, 1.0)),
        ):
            if abs(val) > 1e-14:
                vertex = BlochState(*(np.sign(val) * np.array(axis)))
                parts.append((abs(val), 1.0, [(1.0 + 0j, _axis_state(vertex))]))
        if rem > 1e-14 or not parts:
            for sgn in (1.0, -1.0):
                vertex = BlochState(0.0, 0.0, sgn)
                parts.append((max(rem, 0.0) / 2.0, 1.0, [(1.0 + 0j, _axis_state(vertex))]))
        return 1.0, parts
    if rho.is_pure():
        xi, terms = extent_pure_1q(rho)
        return xi, [(1.0, xi, terms)]
    word, canon = canonicalize_PY(rho)
    inverse = invert_word(word)
    eq = equimagical_decompose(canon)
    parts = []
    for weight, part_canon in eq.parts:
        xi, terms_canon = extent_pure_1q(part_canon)
        terms = [(c, sc.apply_circuit(t, inverse)) for c, t in terms_canon]
        parts.append((float(weight), float(xi), terms))
    return eq.common_extent, parts


# -- inequality ladder --------------------------------------------------------


def monotone_ladder_check(rho: BlochState) -> dict:
    """Slack report for the single-qubit monotone inequalities."""
    lam, _ = lambda_plus_1q(rho)
    R = robustness_1q(rho)
    D = stab_norm_1q(rho)
    return {
        "lambda_plus": lam,
        "robustness": R,
        "stab_norm": D,
        "slack_general": R - (2.0 * lam - 1.0),
        "slack_1q": R - ((1.0 + SQRT2) * lam - SQRT2),
        "slack_2d": R - (2.0 * D - 1.0),
    }


# -- robustness LP ------------------------------------------------------------


@lru_cache(maxsize=None)
def _pauli_strings(n: int) -> list[str]:
    if n == 1:
        return ["I", "X", "Y", "Z"]
    return [a + b for a in _pauli_strings(1) for b in _pauli_strings(n - 1)]


@lru_cache(maxsize=None)
def _pauli_stack(n: int) -> np.ndarray:
    from .dense_oracle import pauli_matrix

    mats = [pauli_matrix(sc.PauliOp.from_letters(s)) for s in _pauli_strings(n)]
    return np.array([m.T.reshape(-1) for m in mats])


def pauli_coords(op: np.ndarray) -> np.ndarray:
    """Real coordinates Tr[P_a · op] over all Pauli strings."""
    n = int(np.log2(op.shape[0]))
    return np.real(_pauli_stack(n) @ op.reshape(-1))


@lru_cache(maxsize=None)
def enumerate_stabilizer_states(n: int) -> tuple[np.ndarray, ...]:
    """All pure n-qubit stabilizer states as dense vectors, n <= 3.

    Breadth-first closure of |0..0> under H, S and CX, deduplicated by the
    projector; the counts 6 / 60 / 1080 are asserted.
    """
    if n > 3:
        raise ValueError("enumeration capped at n=3")
    from .dense_oracle import apply_gate_dense

    start = np.zeros(2**n, dtype=complex)
    start[0] = 1.0
    gates = [("H", q) for q in range(n)] + [("S", q) for q in range(n)]
    gates += [("CX", a, b) for a in range(n) for b in range(n) if a != b]

    def keyof(vec: np.ndarray) -> bytes:
        proj = np.outer(vec, vec.conj())
        return (np.round(proj, 9) + 0.0).tobytes()

    def canonical(vec: np.ndarray) -> np.ndarray:
        j = int(np.flatnonzero(np.abs(vec) > 1e-9)[0])
        return vec * (np.conj(vec[j]) / abs(vec[j]))

    seen = {keyof(start): canonical(start)}
    frontier = [start]
    while frontier:
        nxt = []
        for vec in frontier:
            for gate in gates:
                new = apply_gate_dense(vec, n, gate)
                key = keyof(new)
                if key not in seen:
                    seen[key] = canonical(new)
                    nxt.append(new)
        frontier = nxt
    count = len(seen)
    expected = 2**n
    for k in range(1, n + 1):
        expected *= 2**k + 1
    if count != expected:
        raise RuntimeError(f"stabilizer enumeration found {count}, expected {expected}")
    return tuple(seen.values())


def robustness_lp(rho: np.ndarray) -> tuple[float, np.ndarray, dict]:
    """Robustness of magic by l1-minimizing LP over stabilizer projectors.

    Returns (R, signed weights, certificate) where the certificate carries
    the dual witness, its feasibility defect and the duality gap.
    """
    dim = rho.shape[0]
    n = int(np.log2(dim))
    if 2**n != dim or n > 3:
        raise ValueError("robustness LP supports 1 to 3 qubits")
    if np.abs(rho - rho.conj().T).max() > 1e-9:
        raise ValueError("input must be Hermitian")
    states = enumerate_stabilizer_states(n)
    cols = np.stack([pauli_coords(np.outer(v, v.conj())) for v in states], axis=1)
    b = pauli_coords(rho)
    m, N = cols.shape
    A = np.hstack([cols, -cols])
    c = np.ones(2 * N)
    x, y, obj = _simplex.solve_lp(A, b, c)
    q = x[:N] - x[N:]
    # dual feasibility: |<W, P_j>| <= 1 for the R-witness W = sum y_a sigma_a
    witness_vals = cols.T @ y
    defect = float(max(0.0, np.abs(witness_vals).max() - 1.0))
    gap = float(obj - b @ y)
    cert = {"witness_coords": y, "feasibility_defect": defect, "duality_gap": gap}
    return float(obj), q, cert
