"""Qubit-scale observer records: premeasurement, decoherence, branching, entropy.

The measurement model is bit-by-bit: a two-level system is premeasured by a
c-not onto a blank memory cell, the memory cell decoheres instantaneously in
its pointer basis, and the branch either collapses by Born sampling or is
expanded in full.  Records are classical symbol sequences; their algorithmic
information is upper-bounded by pluggable compressors and combined with the
conditional von Neumann entropy into the physical entropy Z.

Qubit 0 is the leftmost (most significant) factor, so kron(system, memory)
indexes the joint space as 2*s + m for one qubit each.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np

from .compressors import Compressor, default_compressor
from .errors import (
    ConfigError,
    DepthCapExceeded,
    NonPositiveSpectrum,
    NotNormalizable,
    NumericalAbort,
    ZeroProbabilityBranch,
)

MAX_PURE_QUBITS = 20
MAX_MIXED_QUBITS = 10
ZERO_BRANCH_TOL = 1e-12
_PRUNE_TOL = 1e-15

PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
PAULI_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def _n_qubits(dim: int, what: str) -> int:
    k = dim.bit_length() - 1
    if dim < 2 or dim != 1 << k:
        raise ConfigError(f"{what} dimension must be a power of two >= 2")
    return k


@dataclass(frozen=True)
class QubitState:
    """Pure amplitudes over k <= 20 qubits, or a density operator for k <= 10.

    Exactly one of `amplitudes` and `rho` is set.  Construction validates
    normalization (1e-12), Hermiticity and spectrum (1e-10) where relevant.
    """

    amplitudes: Optional[np.ndarray] = None
    rho: Optional[np.ndarray] = None

    def __post_init__(self):
        if (self.amplitudes is None) == (self.rho is None):
            raise ConfigError("exactly one of amplitudes and rho must be given")
        if self.amplitudes is not None:
            amps = np.asarray(self.amplitudes, dtype=complex)
            if amps.ndim != 1:
                raise ConfigError("amplitudes must be 1-D")
            k = _n_qubits(amps.size, "state")
            if k > MAX_PURE_QUBITS:
                raise ConfigError(f"pure states support at most {MAX_PURE_QUBITS} qubits")
            norm = float(np.linalg.norm(amps))
            if abs(norm - 1.0) > 1e-12:
                raise NotNormalizable(f"state norm {norm!r} is not 1")
            object.__setattr__(self, "amplitudes", _frozen(amps))
        else:
            rho = np.asarray(self.rho, dtype=complex)
            if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
                raise ConfigError("rho must be square")
            k = _n_qubits(rho.shape[0], "operator")
            if k > MAX_MIXED_QUBITS:
                raise ConfigError(f"density operators support at most {MAX_MIXED_QUBITS} qubits")
            tr = float(np.real(np.trace(rho)))
            if abs(tr - 1.0) > 1e-12:
                raise NotNormalizable(f"trace {tr!r} is not 1")
            if float(np.max(np.abs(rho - rho.conj().T))) > 1e-10:
                raise ConfigError("rho is not Hermitian")
            low = float(np.min(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))))
            if low < -1e-10:
                raise NonPositiveSpectrum(f"eigenvalue {low!r} below -1e-10")
            object.__setattr__(self, "rho", _frozen(rho))

    @property
    def is_pure(self) -> bool:
        return self.amplitudes is not None

    @property
    def dim(self) -> int:
        return self.amplitudes.size if self.is_pure else self.rho.shape[0]

    @property
    def n_qubits(self) -> int:
        return self.dim.bit_length() - 1

    def density(self) -> np.ndarray:
        if self.is_pure:
            return np.outer(self.amplitudes, self.amplitudes.conj())
        return np.array(self.rho)

    def von_neumann_bits(self) -> float:
        """Entropy -sum lam lg lam in bits; exactly 0 for pure states."""
        if self.is_pure:
            return 0.0
        lam = np.linalg.eigvalsh(self.rho)
        lam = np.clip(np.real(lam), 0.0, 1.0)
        lam = lam[lam > 0.0]
        return float(-np.sum(lam * np.log2(lam)))


def pure_state(amplitudes) -> QubitState:
    return QubitState(amplitudes=np.asarray(amplitudes, dtype=complex))


def mixed_state(rho) -> QubitState:
    return QubitState(rho=np.asarray(rho, dtype=complex))


def basis_state(n_qubits: int, index: int) -> QubitState:
    if not 0 <= index < (1 << n_qubits):
        raise ConfigError("basis index out of range", field="index")
    amps = np.zeros(1 << n_qubits, dtype=complex)
    amps[index] = 1.0
    return QubitState(amplitudes=amps)


def _axis_matrix(axis: np.ndarray) -> np.ndarray:
    """Columns are the +/- eigenstates of axis . sigma."""
    nx, ny, nz = (float(v) for v in axis)
    theta = math.acos(max(-1.0, min(1.0, nz)))
    phi = math.atan2(ny, nx)
    c, s = math.cos(0.5 * theta), math.sin(0.5 * theta)
    e = complex(math.cos(phi), math.sin(phi))
    return np.array([[c, -s * e.conjugate()], [s * e, c]], dtype=complex)


def axis_of(state2) -> np.ndarray:
    """Bloch vector of a single-qubit pure state."""
    a, b = (complex(v) for v in np.asarray(state2, dtype=complex))
    return np.array(
        [2.0 * (a.conjugate() * b).real, 2.0 * (a.conjugate() * b).imag, abs(a) ** 2 - abs(b) ** 2]
    )


@dataclass(frozen=True)
class PointerBasis:
    """One unit Bloch vector per qubit; the pointer pair is its +/- eigenbasis."""

    axes: np.ndarray

    def __post_init__(self):
        axes = np.atleast_2d(np.asarray(self.axes, dtype=float))
        if axes.ndim != 2 or axes.shape[1] != 3 or axes.shape[0] < 1:
            raise ConfigError("axes must be (n_qubits, 3)")
        norms = np.linalg.norm(axes, axis=1)
        if np.any(np.abs(norms - 1.0) > 1e-12):
            raise ConfigError("pointer axes must be unit vectors")
        object.__setattr__(self, "axes", _frozen(axes))

    @classmethod
    def computational(cls, n_qubits: int) -> "PointerBasis":
        return cls(axes=np.tile([0.0, 0.0, 1.0], (n_qubits, 1)))

    @property
    def n_qubits(self) -> int:
        return self.axes.shape[0]

    def basis_matrix(self, qubit: int) -> np.ndarray:
        return _axis_matrix(self.axes[qubit])

    def product_matrix(self) -> np.ndarray:
        u = np.eye(1, dtype=complex)
        for j in range(self.n_qubits):
            u = np.kron(u, self.basis_matrix(j))
        return u


def cnot(joint: QubitState, control: int, target: int) -> QubitState:
    """Copy the control bit into the target in the computational basis."""
    k = joint.n_qubits
    if not (0 <= control < k and 0 <= target < k) or control == target:
        raise IndexError(f"invalid control/target pair ({control}, {target}) for {k} qubits")
    idx = np.arange(1 << k)
    cshift = k - 1 - control
    tbit = 1 << (k - 1 - target)
    perm = idx ^ (((idx >> cshift) & 1) * tbit)
    if joint.is_pure:
        return QubitState(amplitudes=joint.amplitudes[perm])
    return QubitState(rho=joint.rho[np.ix_(perm, perm)])


def pointer_probabilities(joint: QubitState, bases: PointerBasis) -> np.ndarray:
    """Diagonal of the state in the product pointer basis (index: qubit 0 is MSB)."""
    if bases.n_qubits != joint.n_qubits:
        raise ConfigError("basis qubit count differs from state")
    u = bases.product_matrix()
    if joint.is_pure:
        return np.abs(u.conj().T @ joint.amplitudes) ** 2
    return np.real(np.diag(u.conj().T @ joint.rho @ u)).copy()


def decohere_pointer(joint: QubitState, bases: PointerBasis) -> QubitState:
    """Zero every off-diagonal element in the product pointer basis.

    Idempotent and trace-preserving; never decreases von Neumann entropy.
    With exactly aligned bases the error probabilities vanish identically.
    """
    if bases.n_qubits != joint.n_qubits:
        raise ConfigError("basis qubit count differs from state")
    u = bases.product_matrix()
    probs = pointer_probabilities(joint, bases)
    out = (u * probs[np.newaxis, :]) @ u.conj().T
    return QubitState(rho=0.5 * (out + out.conj().T))


def conditional_state(
    rho_sm: QubitState,
    record: int,
    n_system: int = 1,
    memory_basis: Optional[PointerBasis] = None,
) -> QubitState:
    """<r| rho_SM |r> normalized by its trace; the state the record implies.

    The memory is the trailing n - n_system qubits; `record` indexes its
    pointer product basis.  Branches with probability at or below 1e-12
    raise ZeroProbabilityBranch.
    """
    k = rho_sm.n_qubits
    n_memory = k - n_system
    if n_system < 1 or n_memory < 1:
        raise ConfigError("need at least one system and one memory qubit")
    if not 0 <= record < (1 << n_memory):
        raise ConfigError("record index out of range", field="record")
    if memory_basis is None:
        memory_basis = PointerBasis.computational(n_memory)
    if memory_basis.n_qubits != n_memory:
        raise ConfigError("memory basis qubit count differs from memory size")
    r = memory_basis.product_matrix()[:, record]
    ds, dm = 1 << n_system, 1 << n_memory
    rho = rho_sm.density().reshape(ds, dm, ds, dm)
    sub = np.einsum("imjn,m,n->ij", rho, r.conj(), r)
    tr = float(np.real(np.trace(sub)))
    if tr <= ZERO_BRANCH_TOL:
        raise ZeroProbabilityBranch(f"record {record} has probability {tr!r}")
    sub = 0.5 * (sub + sub.conj().T) / tr
    return QubitState(rho=sub)


# ------------------------------------------------------------------ chains


@dataclass(frozen=True)
class RecordSequence:
    """One classical record branch: symbols, its Born weight, and times."""

    symbols: tuple
    branch_probability: float
    timestamps: tuple

    def __post_init__(self):
        object.__setattr__(self, "symbols", tuple(int(s) for s in self.symbols))
        object.__setattr__(self, "timestamps", tuple(float(t) for t in self.timestamps))
        if len(self.timestamps) != len(self.symbols):
            raise ConfigError("one timestamp per symbol required")
        if not 0.0 < self.branch_probability <= 1.0 + 1e-12:
            raise ConfigError("branch_probability must be in (0, 1]")
        if any(s < 0 for s in self.symbols):
            raise ConfigError("symbols must be non-negative")

    def __len__(self) -> int:
        return len(self.symbols)


@dataclass(frozen=True)
class BranchNode:
    prefix: tuple
    probability: float
    state: QubitState
    children: tuple = field(default=(), repr=False)


@dataclass(frozen=True)
class BranchTree:
    """Fully expanded branching records to a fixed depth.

    Children probabilities of every internal node sum to the node's own
    probability within 1e-10 (pruning drops only branches below 1e-15).
    """

    root: BranchNode
    depth: int
    dt: float = 1.0

    def __post_init__(self):
        stack = [(self.root, 0)]
        while stack:
            node, d = stack.pop()
            if node.children:
                total = sum(c.probability for c in node.children)
                if abs(total - node.probability) > 1e-10:
                    raise ConfigError(
                        f"children sum {total!r} != parent {node.probability!r} at depth {d}"
                    )
                stack.extend((c, d + 1) for c in node.children)
            elif d != self.depth:
                raise ConfigError(f"leaf at depth {d}, expected {self.depth}")

    def level(self, depth: int) -> list:
        if not 0 <= depth <= self.depth:
            raise ConfigError(f"depth {depth} outside [0, {self.depth}]")
        nodes = [self.root]
        for _ in range(depth):
            nodes = [c for n in nodes for c in n.children]
        return nodes


def basis_z() -> np.ndarray:
    return np.eye(2, dtype=complex)


def basis_x() -> np.ndarray:
    return np.array([[1.0, 1.0], [1.0, -1.0]], dtype=complex) / math.sqrt(2.0)


def rotation_y(angle: float) -> np.ndarray:
    c, s = math.cos(0.5 * angle), math.sin(0.5 * angle)
    return np.array([[c, -s], [s, c]], dtype=complex)


StepMatrix = Union[None, np.ndarray, Callable[[int], np.ndarray]]


def _resolve(spec: StepMatrix, step: int, what: str) -> Optional[np.ndarray]:
    mat = spec(step) if callable(spec) else spec
    if mat is None:
        return None
    mat = np.asarray(mat, dtype=complex)
    if mat.shape != (2, 2):
        raise ConfigError(f"{what} must be 2x2")
    if float(np.max(np.abs(mat.conj().T @ mat - np.eye(2)))) > 1e-10:
        raise ConfigError(f"{what} must be unitary")
    return mat


def _step_outcomes(psi: np.ndarray, basis: np.ndarray):
    """Premeasure psi through a c-not in `basis` and dephase the memory cell.

    Returns the two record probabilities and the post-measurement system
    states (the columns of `basis`).  The premeasured joint state is already
    diagonal in the product pointer basis built from the measurement axis,
    so dephasing fixes the record without disturbing either branch.
    """
    blank = np.array([1.0, 0.0], dtype=complex)
    joint = np.kron(basis.conj().T @ psi, blank)
    copied = cnot(pure_state(joint), control=0, target=1)
    amps = (basis @ copied.amplitudes.reshape(2, 2)).reshape(-1)
    axes = np.array([axis_of(basis[:, 0]), [0.0, 0.0, 1.0]])
    dephased = decohere_pointer(pure_state(amps), PointerBasis(axes=axes))
    diag = np.real(np.diag(dephased.rho))
    probs = np.array([diag[0] + diag[2], diag[1] + diag[3]])
    return probs, [basis[:, 0].copy(), basis[:, 1].copy()]


def measurement_chain(
    dynamics: StepMatrix,
    policy: StepMatrix,
    n_steps: int,
    mode: str = "sample",
    *,
    initial: Optional[QubitState] = None,
    seed: int = 0,
    depth_cap: int = 12,
    dt: float = 1.0,
):
    """Alternate unitary evolution, c-not premeasurement, memory-pointer
    decoherence, and branch selection for a single-qubit system.

    mode "sample" follows one branch with Born-rule noise derived from
    (seed, branch path) and returns a RecordSequence; "full_tree" expands
    every branch above probability 1e-15 and returns a BranchTree.
    """
    if n_steps < 1:
        raise ConfigError("n_steps must be >= 1", field="n_steps")
    if initial is None:
        initial = basis_state(1, 0)
    if not initial.is_pure or initial.n_qubits != 1:
        raise ConfigError("chain needs a pure single-qubit initial state")
    if mode not in ("sample", "full_tree"):
        raise ConfigError(f"unknown mode {mode!r}", field="mode")

    def evolved(psi, step):
        u = _resolve(dynamics, step, "dynamics")
        return psi if u is None else u @ psi

    def step_basis(step):
        basis = _resolve(policy, step, "policy")
        if basis is None:
            raise ConfigError("policy must provide a basis each step", field="policy")
        return basis

    if mode == "sample":
        psi = np.array(initial.amplitudes)
        symbols: list = []
        prob = 1.0
        times = []
        for step in range(n_steps):
            psi = evolved(psi, step)
            probs, posts = _step_outcomes(psi, step_basis(step))
            rng = np.random.default_rng((seed, *symbols))
            outcome = 0 if rng.random() < probs[0] else 1
            if probs[outcome] <= _PRUNE_TOL:
                outcome = 1 - outcome
            symbols.append(outcome)
            prob *= float(probs[outcome])
            times.append(dt * (step + 1))
            psi = posts[outcome]
        return RecordSequence(tuple(symbols), min(prob, 1.0), tuple(times))

    if n_steps > depth_cap:
        raise DepthCapExceeded(f"full tree of depth {n_steps} exceeds cap {depth_cap}")

    def expand(psi, prefix, probability, step):
        state = pure_state(psi)
        if step == n_steps:
            return BranchNode(prefix, probability, state, ())
        probs, posts = _step_outcomes(evolved(psi, step), step_basis(step))
        children = tuple(
            expand(posts[j], prefix + (j,), probability * float(probs[j]), step + 1)
            for j in (0, 1)
            if probs[j] > _PRUNE_TOL
        )
        return BranchNode(prefix, probability, state, children)

    root = expand(np.array(initial.amplitudes), (), 1.0, 0)
    return BranchTree(root=root, depth=n_steps, dt=dt)


def record_entropy(tree: BranchTree, depth: int) -> float:
    """-sum p lg p over the depth-level records, in bits."""
    nodes = tree.level(depth)
    h = 0.0
    for node in nodes:
        p = node.probability
        if p > 0.0:
            h -= p * math.log2(p)
    return h


# ------------------------------------------------------------------ entropy


def algorithmic_info_estimate(
    record: RecordSequence, compressor: Optional[Compressor] = None
) -> float:
    """Compressed size K-hat in bits: an upper bound on K, never K itself."""
    if len(record) == 0:
        raise ConfigError("record must be non-empty")
    if compressor is None:
        compressor = default_compressor()
    alphabet = max(2, max(record.symbols) + 1)
    return float(compressor.compressed_bits(list(record.symbols), alphabet))


@dataclass(frozen=True)
class PhysicalEntropy:
    """Z = K-hat(record) + H(rho | record), all in bits."""

    k_hat_bits: float
    statistical_bits: float

    @property
    def z_bits(self) -> float:
        return self.k_hat_bits + self.statistical_bits


def physical_entropy(
    record: RecordSequence,
    rho_cond: QubitState,
    compressor: Optional[Compressor] = None,
) -> PhysicalEntropy:
    return PhysicalEntropy(
        k_hat_bits=algorithmic_info_estimate(record, compressor),
        statistical_bits=rho_cond.von_neumann_bits(),
    )


def _leaf_record(node: BranchNode, dt: float) -> RecordSequence:
    times = tuple(dt * (k + 1) for k in range(len(node.prefix)))
    return RecordSequence(node.prefix, min(node.probability, 1.0), times)


def avg_physical_entropy(
    tree: BranchTree, compressor: Optional[Compressor] = None, depth: Optional[int] = None
) -> float:
    """sum_R p(R) (K-hat(R) + H(rho|R)) over branches at `depth`.

    Sanity-checked against the unconditioned mixture: the average may not
    fall more than one bit below its von Neumann entropy.
    """
    if depth is None:
        depth = tree.depth
    if depth < 1:
        raise ConfigError("depth must be >= 1", field="depth")
    nodes = tree.level(depth)
    total = 0.0
    weight = 0.0
    mix = np.zeros((nodes[0].state.dim, nodes[0].state.dim), dtype=complex)
    for node in nodes:
        pe = physical_entropy(_leaf_record(node, tree.dt), node.state, compressor)
        total += node.probability * pe.z_bits
        weight += node.probability
        mix = mix + node.probability * node.state.density()
    avg = total / weight
    h_mix = mixed_state(mix / np.real(np.trace(mix))).von_neumann_bits()
    if avg < h_mix - 1.0:
        raise NumericalAbort(f"<Z> = {avg!r} fell below H_S - 1 = {h_mix - 1.0!r}")
    return avg


def compression_gap(
    tree: BranchTree, compressor: Optional[Compressor] = None, depth: Optional[int] = None
) -> float:
    """<K-hat> - record entropy at `depth`: the empirical distance from the
    ideal K(R) ~ -lg p(R); reported, never asserted."""
    if depth is None:
        depth = tree.depth
    nodes = tree.level(depth)
    avg_k = sum(
        n.probability * algorithmic_info_estimate(_leaf_record(n, tree.dt), compressor)
        for n in nodes
    ) / sum(n.probability for n in nodes)
    return avg_k - record_entropy(tree, depth)


def tree_summary(tree: BranchTree, compressor: Optional[Compressor] = None) -> dict:
    """Per-depth series: record entropy, <K-hat>, <Z>, and the compression gap."""
    depths = list(range(1, tree.depth + 1))
    rec = [record_entropy(tree, d) for d in depths]
    avg_z = [avg_physical_entropy(tree, compressor, d) for d in depths]
    gaps = [compression_gap(tree, compressor, d) for d in depths]
    avg_k = [g + r for g, r in zip(gaps, rec)]
    return {
        "depth": depths,
        "record_entropy_bits": rec,
        "avg_k_hat_bits": avg_k,
        "avg_z_bits": avg_z,
        "compression_gap_bits": gaps,
    }
