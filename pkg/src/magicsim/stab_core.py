"""Phase-sensitive stabilizer engine.

States are kept in the CH-style canonical form

    |psi> = scalar * U_C * U_H * |s>

where U_C is a control-type Clifford (product of CX, CZ, S and phases) fixing
|0..0>, U_H = H^v is a layer of Hadamards, and |s> is a basis state.  U_C is
tracked through three n x n binary matrices G, F, M and a mod-4 vector g:

    U_C^dag Z_p U_C = Z^{G[p,:]}
    U_C^dag X_p U_C = i^{g[p]} X^{F[p,:]} Z^{M[p,:]}

The scalar is exact for every Clifford operation and Pauli projection: it is
stored as an integer power of sqrt(2), an eighth root of unity, and a residual
complex factor that only changes when a caller explicitly multiplies a phase
in.  This is what makes amplitudes and inner products trustworthy at 1e-10
against a dense reference instead of drifting over long circuits.
"""

from __future__ import annotations

import numpy as np

# exp(i*pi/4*k) for k = 0..7; even entries are exact in floating point
_W8 = np.array([np.exp(1j * np.pi / 4 * k) for k in range(8)])
_I_POW = np.array([1.0 + 0j, 1j, -1.0 + 0j, -1j])

GATE_NAMES = ("S", "SDG", "H", "X", "Y", "Z", "CX", "CZ", "SWAP")

_LETTER_TO_XZ = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}
_XZ_TO_LETTER = {(0, 0): "I", (1, 0): "X", (1, 1): "Y", (0, 1): "Z"}


def _parity(bits: np.ndarray) -> int:
    return int(np.count_nonzero(bits)) & 1


class PauliOp:
    """n-qubit Pauli operator with explicit phase.

    The operator equals phase * (tensor product of letters), with letter Y
    understood as the usual Hermitian Y.  Internally the operator is held as
    i^k X^x Z^z, which composes with a plain symplectic phase rule.
    """

    __slots__ = ("x", "z", "k")

    def __init__(self, x: np.ndarray, z: np.ndarray, k: int = 0):
        self.x = np.asarray(x, dtype=bool)
        self.z = np.asarray(z, dtype=bool)
        if self.x.shape != self.z.shape or self.x.ndim != 1:
            raise ValueError("x and z must be equal-length 1-d bit arrays")
        self.k = k % 4

    @property
    def n(self) -> int:
        return self.x.size

    @classmethod
    def identity(cls, n: int) -> "PauliOp":
        return cls(np.zeros(n, bool), np.zeros(n, bool), 0)

    @classmethod
    def from_letters(cls, letters: str, phase: complex = 1) -> "PauliOp":
        x = np.zeros(len(letters), bool)
        z = np.zeros(len(letters), bool)
        for j, ch in enumerate(letters.upper()):
            try:
                x[j], z[j] = _LETTER_TO_XZ[ch]
            except KeyError:
                raise ValueError(f"unknown Pauli letter {ch!r}") from None
        kp = _phase_to_pow(phase)
        # letters convention: Y = i X Z, so each Y contributes one factor of i
        y_count = int(np.count_nonzero(x & z))
        return cls(x, z, kp + y_count)

    @classmethod
    def single(cls, n: int, qubit: int, letter: str, phase: complex = 1) -> "PauliOp":
        word = ["I"] * n
        word[qubit] = letter
        return cls.from_letters("".join(word), phase)

    @property
    def phase(self) -> complex:
        y_count = int(np.count_nonzero(self.x & self.z))
        return complex(_I_POW[(self.k - y_count) % 4])

    def is_hermitian(self) -> bool:
        y_count = int(np.count_nonzero(self.x & self.z))
        return (self.k - y_count) % 2 == 0

    def mul(self, other: "PauliOp") -> "PauliOp":
        if self.n != other.n:
            raise ValueError("dimension mismatch")
        # Z^z1 X^x2 = (-1)^{z1.x2} X^x2 Z^z1
        k = self.k + other.k + 2 * _parity(self.z & other.x)
        return PauliOp(self.x ^ other.x, self.z ^ other.z, k)

    def commutes(self, other: "PauliOp") -> bool:
        return (_parity(self.x & other.z) + _parity(self.z & other.x)) % 2 == 0

    def letters(self) -> str:
        return "".join(_XZ_TO_LETTER[(int(a), int(b))] for a, b in zip(self.x, self.z))

    def embed(self, n: int, targets: tuple[int, ...] | list[int]) -> "PauliOp":
        """Place this operator on the given qubits of an n-qubit register."""
        if len(targets) != self.n:
            raise ValueError("target count must match operator width")
        x = np.zeros(n, bool)
        z = np.zeros(n, bool)
        x[list(targets)] = self.x
        z[list(targets)] = self.z
        return PauliOp(x, z, self.k)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, PauliOp)
            and self.k == other.k
            and bool(np.array_equal(self.x, other.x))
            and bool(np.array_equal(self.z, other.z))
        )

    def __repr__(self) -> str:
        ph = {1: "+", -1: "-", 1j: "+i", -1j: "-i"}[complex(self.phase)]
        return f"{ph}{self.letters()}"


def _phase_to_pow(phase: complex) -> int:
    for p, val in enumerate([1, 1j, -1, -1j]):
        if abs(complex(phase) - val) < 1e-12:
            return p
    raise ValueError("phase must be one of +1, -1, +i, -i")


def _gf2_rank(rows: np.ndarray) -> int:
    m = rows.astype(np.uint8).copy()
    rank = 0
    ncols = m.shape[1] if m.size else 0
    for col in range(ncols):
        pivot = None
        for r in range(rank, m.shape[0]):
            if m[r, col]:
                pivot = r
                break
        if pivot is None:
            continue
        m[[rank, pivot]] = m[[pivot, rank]]
        for r in range(m.shape[0]):
            if r != rank and m[r, col]:
                m[r] ^= m[rank]
        rank += 1
    return rank


class StabProjector:
    """Product of commuting Pauli projectors (1 + sign*P)/2.

    Projects onto a 2^{n-h} dimensional stabilizer subspace, h being the
    number of generators.  Generators must be Hermitian, mutually commuting
    and independent.
    """

    __slots__ = ("n", "generators")

    def __init__(self, n: int, generators: list[tuple[PauliOp, int]]):
        self.n = n
        gens: list[tuple[PauliOp, int]] = []
        for op, sign in generators:
            if op.n != n:
                raise ValueError("generator width mismatch")
            if not op.is_hermitian():
                raise ValueError("projector generators must have phase +1 or -1")
            if sign not in (1, -1):
                raise ValueError("sign must be +1 or -1")
            gens.append((op, sign))
        for i in range(len(gens)):
            for j in range(i + 1, len(gens)):
                if not gens[i][0].commutes(gens[j][0]):
                    raise ValueError("projector generators must commute")
        if gens:
            rows = np.array([np.concatenate([op.x, op.z]) for op, _ in gens])
            if _gf2_rank(rows) != len(gens):
                raise ValueError("projector generators must be independent")
        self.generators = tuple(gens)

    @property
    def h(self) -> int:
        return len(self.generators)

    @classmethod
    def from_strings(cls, pairs: list[tuple[str, int]]) -> "StabProjector":
        if not pairs:
            raise ValueError("need at least one generator")
        n = len(pairs[0][0])
        return cls(n, [(PauliOp.from_letters(s), sign) for s, sign in pairs])

    def __repr__(self) -> str:
        body = ", ".join(f"{'+' if s > 0 else '-'}{op.letters()}" for op, s in self.generators)
        return f"StabProjector[{body}]"


class StabState:
    """CH-form stabilizer state with exact scalar.

    The scalar is 2^{p2/2} * w8-th eighth root * unit, or zero when null is
    set.  Mutating methods are private; the public module functions copy
    first, so states behave as values.
    """

    __slots__ = ("n", "G", "F", "M", "g", "v", "s", "p2", "w8", "unit", "null")

    def __init__(self, n: int):
        if n < 1:
            raise ValueError("need at least one qubit")
        self.n = n
        self.G = np.eye(n, dtype=bool)
        self.F = np.eye(n, dtype=bool)
        self.M = np.zeros((n, n), dtype=bool)
        self.g = np.zeros(n, dtype=np.int64)
        self.v = np.zeros(n, dtype=bool)
        self.s = np.zeros(n, dtype=bool)
        self.p2 = 0
        self.w8 = 0
        self.unit = 1.0 + 0j
        self.null = False

    # -- scalar bookkeeping -------------------------------------------------

    def _mul_w8(self, k: int) -> None:
        self.w8 = (self.w8 + k) & 7

    def _mul_i_pow(self, k: int) -> None:
        self.w8 = (self.w8 + 2 * k) & 7

    def _mul_m1_pow(self, k: int) -> None:
        if k & 1:
            self.w8 = (self.w8 + 4) & 7

    def scalar(self) -> complex:
        if self.null:
            return 0j
        return (2.0 ** (0.5 * self.p2)) * complex(_W8[self.w8]) * self.unit

    def amplitude(self) -> float:
        if self.null:
            return 0.0
        return (2.0 ** (0.5 * self.p2)) * abs(self.unit)

    def phase(self) -> complex:
        if self.null:
            return 1.0 + 0j
        u = complex(_W8[self.w8]) * self.unit
        a = abs(u)
        return u / a if a > 0 else 1.0 + 0j

    def copy(self) -> "StabState":
        out = StabState.__new__(StabState)
        out.n = self.n
        out.G = self.G.copy()
        out.F = self.F.copy()
        out.M = self.M.copy()
        out.g = self.g.copy()
        out.v = self.v.copy()
        out.s = self.s.copy()
        out.p2 = self.p2
        out.w8 = self.w8
        out.unit = self.unit
        out.null = self.null
        return out

    # -- left multiplications (gates) ---------------------------------------

    def _s_gate(self, a: int) -> None:
        self.M[a] ^= self.G[a]
        self.g[a] = (self.g[a] - 1) % 4

    def _sdg_gate(self, a: int) -> None:
        self.M[a] ^= self.G[a]
        self.g[a] = (self.g[a] + 1) % 4

    def _z_gate(self, a: int) -> None:
        self.g[a] = (self.g[a] + 2) % 4

    def _x_gate(self, a: int) -> None:
        u = self.s ^ (self.F[a] & ~self.v) ^ (self.M[a] & self.v)
        beta = (
            _parity(self.M[a] & ~self.v & self.s)
            + _parity(self.F[a] & self.v & self.M[a])
            + _parity(self.F[a] & self.v & self.s)
        )
        self._mul_i_pow(int(self.g[a]))
        self._mul_m1_pow(beta)
        self.s = u

    def _y_gate(self, a: int) -> None:
        # Y = i X Z
        self._z_gate(a)
        self._x_gate(a)
        self._mul_i_pow(1)

    def _cz_gate(self, a: int, b: int) -> None:
        self.M[a] ^= self.G[b]
        self.M[b] ^= self.G[a]

    def _cx_gate(self, c: int, t: int) -> None:
        self.g[c] = (self.g[c] + self.g[t] + 2 * _parity(self.M[c] & self.F[t])) % 4
        self.G[t] ^= self.G[c]
        self.F[c] ^= self.F[t]
        self.M[c] ^= self.M[t]

    def _h_gate(self, a: int) -> None:
        t = self.s ^ (self.G[a] & self.v)
        u = self.s ^ (self.F[a] & ~self.v) ^ (self.M[a] & self.v)
        alpha = _parity(self.G[a] & ~self.v & self.s)
        beta = (
            _parity(self.M[a] & ~self.v & self.s)
            + _parity(self.F[a] & self.v & self.M[a])
            + _parity(self.F[a] & self.v & self.s)
        )
        delta = int(self.g[a] + 2 * (alpha + beta)) % 4
        self._update_sum(t, u, delta, alpha)

    # -- right multiplications (tableau-only, no state change) ---------------

    def _s_right(self, q: int) -> None:
        self.g = (self.g - self.F[:, q].astype(np.int64)) % 4
        self.M[:, q] ^= self.F[:, q]

    def _cz_right(self, q: int, r: int) -> None:
        self.g = (self.g + 2 * (self.F[:, q] & self.F[:, r]).astype(np.int64)) % 4
        self.M[:, q] ^= self.F[:, r]
        self.M[:, r] ^= self.F[:, q]

    def _cx_right(self, q: int, r: int) -> None:
        self.G[:, q] ^= self.G[:, r]
        self.F[:, r] ^= self.F[:, q]
        self.M[:, q] ^= self.M[:, r]

    # -- superposition closure ----------------------------------------------

    @staticmethod
    def _h_decompose(v: bool, y: bool, z: bool, delta: int) -> tuple[int, int, bool, bool, bool]:
        """Rewrite H^v (|y> + i^delta |z>)/sqrt(2) as w8 * 2^{p2/2} S^a H^b |c>.

        Single-qubit identity used by _update_sum; y != z required.  Returns
        (w8, p2, a, b, c).  p2 is nonzero only in the non-normalized branches
        that arise from projections, never from gates.
        """
        if y == z:
            raise ValueError("superposed kets must differ")
        if not v:
            w8 = (2 * delta * int(y)) % 8
            d2 = (delta * (-1 if y else 1)) % 4
            return w8, 0, bool(d2 & 1), True, bool(d2 >> 1)
        if delta % 2 == 0:
            c = bool(delta >> 1)
            w8 = 4 if (c and y) else 0
            return w8, 0, False, False, c
        w8 = 1 if delta % 4 == 1 else 7
        c = not ((delta >> 1) ^ int(y))
        return w8, 0, True, True, c

    def _update_sum(self, t: np.ndarray, u: np.ndarray, delta: int, alpha: int = 0) -> None:
        """Fold (|t> + i^delta |u>)/sqrt(2), expressed in the U_C U_H frame,
        back into canonical form, times (-1)^alpha."""
        self._mul_m1_pow(alpha)
        if np.array_equal(t, u):
            # single ket: scalar picks up (1 + i^delta)/sqrt(2)
            self.s = t.copy()
            if delta % 2 == 1:
                self._mul_w8(1 if delta == 1 else 7)
            elif delta == 0:
                self.p2 += 1
            else:
                self.null = True
            return
        diff = t ^ u
        set0 = np.flatnonzero(~self.v & diff)
        set1 = np.flatnonzero(self.v & diff)
        if set0.size:
            q = int(set0[0])
            for i in set0[1:]:
                self._cx_right(q, int(i))
            for i in set1:
                self._cz_right(q, int(i))
        else:
            q = int(set1[0])
            for i in set1[1:]:
                self._cx_right(int(i), q)
        if t[q]:
            y = u.copy()
            y[q] = not y[q]
            z = u
        else:
            y = t
            z = t.copy()
            z[q] = not z[q]
        w8, p2, a, b, c = self._h_decompose(bool(self.v[q]), bool(y[q]), bool(z[q]), delta)
        self.s = y.copy()
        self.s[q] = c
        self._mul_w8(w8)
        self.p2 += p2
        if a:
            self._s_right(q)
        self.v[q] = b

    # -- amplitudes ----------------------------------------------------------

    def amplitude_of(self, bits: np.ndarray) -> complex:
        """Exact <bits|psi> including the global scalar."""
        if self.null:
            return 0j
        y = np.asarray(bits, dtype=bool)
        if y.size != self.n:
            raise ValueError("bit-string length mismatch")
        mu = int(self.g[y].sum())
        u = np.zeros(self.n, dtype=bool)
        for p in np.flatnonzero(y):
            u ^= self.F[p]
            mu += 2 * _parity(self.M[p] & u)
        if np.any(~self.v & (u ^ self.s)):
            return 0j
        sign = _parity(self.v & u & self.s)
        val = self.scalar() * (2.0 ** (-0.5 * int(np.count_nonzero(self.v))))
        val *= complex(_I_POW[mu % 4])
        return -val if sign else val

    # -- reduction to |0..0> --------------------------------------------------

    def _zeroing_ops(self) -> tuple[list[tuple], "StabState"]:
        """Gate list V with V|psi> = scalar' |0..0>, plus the reduced state.

        Used by inner products and overlap caching: <psi| = conj(scalar') <0|V.
        """
        st = self.copy()
        ops: list[tuple] = []

        def cx(c: int, t: int) -> None:
            ops.append(("CX", c, t))
            st._cx_gate(c, t)

        # row-reduce G to the identity with CX row operations; F follows along
        # because G F^T = I is preserved by every gate
        n = st.n
        for j in range(n):
            if not st.G[j, j]:
                k = next(i for i in range(j + 1, n) if st.G[i, j])
                cx(j, k)
                cx(k, j)
                cx(j, k)
            for i in range(n):
                if i != j and st.G[i, j]:
                    cx(j, i)
        # U_C is now diagonal, so left and right CZ/S coincide and M can be
        # cleared pairwise then on the diagonal
        for r in range(n):
            for c in range(r + 1, n):
                if st.M[r, c]:
                    ops.append(("CZ", r, c))
                    st._cz_gate(r, c)
        for q in range(n):
            if st.M[q, q]:
                ops.append(("SDG", q))
                st._sdg_gate(q)
        for q in range(n):
            if st.v[q]:
                ops.append(("H", q))
                st._h_gate(q)
        for q in range(n):
            if st.s[q]:
                ops.append(("X", q))
                st._x_gate(q)
        return ops, st

    def _apply_named(self, gate: tuple) -> None:
        name = gate[0]
        if name == "H":
            self._h_gate(gate[1])
        elif name == "S":
            self._s_gate(gate[1])
        elif name == "SDG":
            self._sdg_gate(gate[1])
        elif name == "X":
            self._x_gate(gate[1])
        elif name == "Y":
            self._y_gate(gate[1])
        elif name == "Z":
            self._z_gate(gate[1])
        elif name == "CX":
            self._cx_gate(gate[1], gate[2])
        elif name == "CZ":
            self._cz_gate(gate[1], gate[2])
        elif name == "SWAP":
            a, b = gate[1], gate[2]
            self._cx_gate(a, b)
            self._cx_gate(b, a)
            self._cx_gate(a, b)
        else:
            raise ValueError(f"unknown gate {name!r}")

    def __repr__(self) -> str:
        if self.null:
            return f"StabState(n={self.n}, null)"
        return f"StabState(n={self.n}, amp={self.amplitude():.6g})"


# -- constructors ------------------------------------------------------------


def zero_state(n: int) -> StabState:
    return StabState(n)


def basis_state(bits) -> StabState:
    arr = np.asarray(bits, dtype=bool)
    st = StabState(arr.size)
    st.s = arr.copy()
    return st


def plus_state(n: int) -> StabState:
    st = StabState(n)
    st.v[:] = True
    return st


# -- public operations -------------------------------------------------------


def _check_qubits(state: StabState, qubits: tuple[int, ...]) -> None:
    for q in qubits:
        if not 0 <= q < state.n:
            raise IndexError(f"qubit {q} out of range for n={state.n}")
    if len(set(qubits)) != len(qubits):
        raise IndexError("repeated qubit index")


def apply_gate(state: StabState, gate: tuple) -> StabState:
    """Apply one named gate; gate = (name, qubit) or (name, control, target)."""
    name = gate[0]
    if name not in GATE_NAMES:
        raise ValueError(f"unknown gate {name!r}")
    _check_qubits(state, tuple(gate[1:]))
    out = state.copy()
    out._apply_named(gate)
    return out


def apply_circuit(state: StabState, gates) -> StabState:
    out = state.copy()
    for gate in gates:
        if gate[0] not in GATE_NAMES:
            raise ValueError(f"unknown gate {gate[0]!r}")
        _check_qubits(out, tuple(gate[1:]))
        out._apply_named(gate)
    return out


def apply_pauli(state: StabState, p: PauliOp) -> StabState:
    """Apply i^k X^x Z^z as a unitary (any phase allowed)."""
    if p.n != state.n:
        raise ValueError("dimension mismatch")
    out = state.copy()
    for q in np.flatnonzero(p.z):
        out._z_gate(int(q))
    for q in np.flatnonzero(p.x):
        out._x_gate(int(q))
    out._mul_i_pow(p.k)
    return out


def multiply_phase(state: StabState, factor: complex) -> StabState:
    """Multiply the scalar by an arbitrary complex factor (absorbed exactly
    into the residual, so later Clifford arithmetic stays exact)."""
    out = state.copy()
    out.unit *= complex(factor)
    if out.unit == 0:
        out.null = True
    return out


def with_unit_amplitude(state: StabState) -> tuple[StabState, float]:
    """Rescale amplitude to 1 keeping the phase; returns (state, old amplitude)."""
    amp = state.amplitude()
    out = state.copy()
    if out.null or amp == 0.0:
        out.null = True
        return out, 0.0
    out.p2 = 0
    out.unit = out.unit / abs(out.unit)
    return out, amp


def project_pauli(state: StabState, p: PauliOp, sign: int) -> tuple[StabState, float]:
    """Apply (1 + sign*p)/2; returns the projected state and its norm
    relative to the input amplitude (one of 0, 1/sqrt(2), 1)."""
    if p.n != state.n:
        raise ValueError("dimension mismatch")
    if not p.is_hermitian():
        raise ValueError("projector Pauli must have phase +1 or -1")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    out = state.copy()
    if out.null:
        return out, 0.0
    # P' = U_C^dag P U_C, composed from the tracked generator images
    rx = np.zeros(out.n, dtype=bool)
    rz = np.zeros(out.n, dtype=bool)
    rk = p.k
    for q in np.flatnonzero(p.x):
        rk = (rk + 2 * _parity(rz & out.F[q]) + int(out.g[q])) % 4
        rx ^= out.F[q]
        rz ^= out.M[q]
    for q in np.flatnonzero(p.z):
        rz ^= out.G[q]
    # commute through the Hadamard layer: swap x/z on v qubits
    rk = (rk + 2 * _parity(rx & rz & out.v)) % 4
    swap = out.v
    rx, rz = (rx & ~swap) | (rz & swap), (rz & ~swap) | (rx & swap)
    # act on |s>: i^rk X^rx Z^rz |s> = i^rk (-1)^{rz.s} |s + rx>
    dk = (rk + 2 * _parity(rz & out.s) + (0 if sign > 0 else 2)) % 4
    if not rx.any():
        # outcome deterministic: factor (1 + i^dk)/2 with dk even
        if dk % 2 != 0:
            raise ValueError("inconsistent projector (non-Hermitian image)")
        if dk == 0:
            return out, 1.0
        out.null = True
        return out, 0.0
    t = out.s.copy()
    u = out.s ^ rx
    out._update_sum(t, u, dk)
    out.p2 -= 1
    if out.null:
        return out, 0.0
    return out, 2.0 ** -0.5


def project_stab(state: StabState, proj: StabProjector) -> tuple[StabState, float]:
    """Apply a multi-generator stabilizer projector; norm is relative."""
    if proj.n != state.n:
        raise ValueError("dimension mismatch")
    out = state
    norm = 1.0
    for op, sign in proj.generators:
        out, f = project_pauli(out, op, sign)
        norm *= f
        if out.null:
            return out, 0.0
    return out, norm


def inner_product(left: StabState, right: StabState) -> complex:
    """Exact <left|right> with both scalars included."""
    if left.n != right.n:
        raise ValueError("dimension mismatch")
    if left.null or right.null:
        return 0j
    ops, reduced = left._zeroing_ops()
    rb = right.copy()
    for gate in ops:
        rb._apply_named(gate)
    return np.conj(reduced.scalar()) * rb.amplitude_of(np.zeros(left.n, dtype=bool))


def zeroing_ops(state: StabState) -> tuple[list[tuple], complex]:
    """Reduction data for repeated inner products against one fixed bra.

    Returns (gates V, scalar w) with V|state> = w |0..0>; then for any |r>,
    <state|r> = conj(w) * amplitude_of_zero(V|r>).
    """
    ops, reduced = state._zeroing_ops()
    return ops, reduced.scalar()


def replay_ops(state: StabState, ops: list[tuple]) -> StabState:
    out = state.copy()
    for gate in ops:
        out._apply_named(gate)
    return out


def tensor(a: StabState, b: StabState) -> StabState:
    """Tensor product; qubits of a come first."""
    n = a.n + b.n
    out = StabState.__new__(StabState)
    out.n = n
    out.G = np.zeros((n, n), dtype=bool)
    out.F = np.zeros((n, n), dtype=bool)
    out.M = np.zeros((n, n), dtype=bool)
    out.G[: a.n, : a.n] = a.G
    out.G[a.n :, a.n :] = b.G
    out.F[: a.n, : a.n] = a.F
    out.F[a.n :, a.n :] = b.F
    out.M[: a.n, : a.n] = a.M
    out.M[a.n :, a.n :] = b.M
    out.g = np.concatenate([a.g, b.g])
    out.v = np.concatenate([a.v, b.v])
    out.s = np.concatenate([a.s, b.s])
    out.p2 = a.p2 + b.p2
    out.w8 = (a.w8 + b.w8) & 7
    out.unit = a.unit * b.unit
    out.null = a.null or b.null
    return out


def permute(state: StabState, perm) -> StabState:
    """Relabel qubits: new qubit i is old qubit perm[i]."""
    axes = list(perm)
    if sorted(axes) != list(range(state.n)):
        raise ValueError("perm must be a permutation of range(n)")
    out = state.copy()
    ix = np.ix_(axes, axes)
    out.G = state.G[ix].copy()
    out.F = state.F[ix].copy()
    out.M = state.M[ix].copy()
    out.g = state.g[axes].copy()
    out.v = state.v[axes].copy()
    out.s = state.s[axes].copy()
    return out


def equatorial_state(A: np.ndarray) -> StabState:
    """Equatorial stabilizer state |phi_A> for symmetric integer A.

    Diagonal entries act mod 4 through S powers, off-diagonal entries mod 2
    through CZ, all on |+..+>.
    """
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("A must be square")
    if not np.array_equal(A, A.T):
        raise ValueError("A must be symmetric")
    n = A.shape[0]
    st = plus_state(n)
    for a in range(n):
        for b in range(a + 1, n):
            if A[a, b] % 2:
                st._cz_gate(a, b)
    for j in range(n):
        for _ in range(int(A[j, j]) % 4):
            st._s_gate(j)
    return st


def equatorial_overlap(state: StabState, A: np.ndarray) -> complex:
    """<phi_A|state> for the equatorial state indexed by A."""
    return inner_product(equatorial_state(A), state)
