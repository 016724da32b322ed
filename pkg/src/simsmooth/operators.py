"""Dense multipartite operator algebra.

States live on a product space A_1 ... A_m with local dimensions ``dims``.
Matrices use the mixed-radix row-major layout with party 0 most
significant, i.e. the layout produced by ``np.kron(a_0, a_1, ...)``.
Party sets are tuples of 0-based party indices, sorted and duplicate-free.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

HERMITIAN_TOL = 1e-10
NEGATIVE_TOL = 1e-10
TRACE_TOL = 1e-10
CLASSICAL_MASS_TOL = 1e-12
_DEGENERACY_TOL = 1e-12
DEFECT_SNAP = 1e-13

PartySet = tuple[int, ...]


class StateError(ValueError):
    """Raised when an operator violates a state invariant."""


def check_dims(dims: Iterable[int]) -> tuple[int, ...]:
    dims = tuple(int(d) for d in dims)
    if not dims:
        raise StateError("a dimension profile needs at least one party")
    if any(d < 1 for d in dims):
        raise StateError(f"party dimensions must be positive, got {dims}")
    return dims


def party_set(members: Iterable[int], num_parties: int | None = None) -> PartySet:
    """Canonical (sorted, duplicate-free) party set, validated against ``num_parties``."""
    out = tuple(sorted({int(i) for i in members}))
    if num_parties is not None and any(i < 0 or i >= num_parties for i in out):
        raise StateError(f"party set {out} not contained in 0..{num_parties - 1}")
    return out


def complement(members: PartySet, num_parties: int) -> PartySet:
    return tuple(i for i in range(num_parties) if i not in members)


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """A subnormalized positive operator with a per-party dimension profile.

    Construction validates Hermiticity, positivity and trace. Pass
    ``check=False`` for operators that are known-good or that are not meant to
    be states (Kraus operators, spectral functions of states).
    """

    dims: tuple[int, ...]
    matrix: np.ndarray = field(repr=False)
    check: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        dims = check_dims(self.dims)
        matrix = np.asarray(self.matrix, dtype=complex)
        total = math.prod(dims)
        if matrix.shape != (total, total):
            raise StateError(f"matrix shape {matrix.shape} does not match dims {dims}")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "matrix", matrix)
        if self.check:
            _validate_state(matrix)

    @property
    def num_parties(self) -> int:
        return len(self.dims)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def trace(self) -> float:
        return float(np.real(np.trace(self.matrix)))

    def is_diagonal(self, tol: float = 0.0) -> bool:
        off = self.matrix - np.diag(np.diag(self.matrix))
        return bool(np.max(np.abs(off), initial=0.0) <= tol)

    def rank(self, tol: float = 1e-9) -> int:
        return int(np.sum(eigen_decompose(self).values > tol))

    def __repr__(self) -> str:
        return f"DensityOperator(dims={self.dims}, trace={self.trace():.6g})"


def _validate_state(matrix: np.ndarray) -> None:
    herm_dev = np.max(np.abs(matrix - matrix.conj().T), initial=0.0)
    if herm_dev > HERMITIAN_TOL:
        raise StateError(f"operator is not Hermitian (deviation {herm_dev:.3g})")
    evals = np.linalg.eigvalsh((matrix + matrix.conj().T) / 2)
    if evals.size and evals[0] < -NEGATIVE_TOL:
        raise StateError(f"operator is not positive (min eigenvalue {evals[0]:.3g})")
    tr = float(np.real(np.trace(matrix)))
    if tr > 1 + TRACE_TOL:
        raise StateError(f"trace {tr:.12g} exceeds 1")


@dataclass(frozen=True, eq=False)
class ClassicalState:
    """A nonnegative probability tensor over a product alphabet."""

    dims: tuple[int, ...]
    probs: np.ndarray = field(repr=False)

    def __post_init__(self):
        dims = check_dims(self.dims)
        probs = np.asarray(self.probs, dtype=float)
        if probs.size != math.prod(dims):
            raise StateError(f"{probs.size} probabilities do not match dims {dims}")
        probs = probs.reshape(dims)
        if np.any(probs < 0):
            raise StateError("probabilities must be nonnegative")
        if probs.sum() > 1 + CLASSICAL_MASS_TOL:
            raise StateError(f"total mass {probs.sum():.15g} exceeds 1")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "probs", probs)

    @property
    def num_parties(self) -> int:
        return len(self.dims)

    def trace(self) -> float:
        return float(self.probs.sum())

    def marginal(self, keep: Iterable[int]) -> np.ndarray:
        """Marginal distribution on ``keep`` as a tensor over the kept parties."""
        keep = party_set(keep, self.num_parties)
        drop = complement(keep, self.num_parties)
        return self.probs.sum(axis=drop) if drop else self.probs.copy()

    def to_operator(self) -> DensityOperator:
        return DensityOperator(self.dims, np.diag(self.probs.ravel()).astype(complex), check=False)

    @classmethod
    def from_operator(cls, t: DensityOperator, tol: float = 1e-12) -> ClassicalState:
        if not t.is_diagonal(tol):
            raise StateError("operator is not diagonal in the product basis")
        diag = np.real(np.diag(t.matrix)).copy()
        diag[(diag < 0) & (diag >= -NEGATIVE_TOL)] = 0.0
        return cls(t.dims, diag)

    def __repr__(self) -> str:
        return f"ClassicalState(dims={self.dims}, mass={self.trace():.6g})"


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues in descending order with the matching eigenvector columns."""

    values: np.ndarray
    basis: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return (self.basis * self.values) @ self.basis.conj().T

    @property
    def max(self) -> float:
        return float(self.values[0]) if self.values.size else 0.0


def as_operator(state: DensityOperator | ClassicalState) -> DensityOperator:
    return state.to_operator() if isinstance(state, ClassicalState) else state


def tensor_product(a: DensityOperator, b: DensityOperator) -> DensityOperator:
    return DensityOperator(a.dims + b.dims, np.kron(a.matrix, b.matrix), check=False)


def _as_tensor(matrix: np.ndarray, dims: Sequence[int]) -> np.ndarray:
    return matrix.reshape(tuple(dims) * 2)


def partial_trace(t: DensityOperator, keep: Iterable[int]) -> DensityOperator:
    """Reduced operator on the parties in ``keep``.

    An empty ``keep`` is the degenerate case: the full trace comes back as a
    1x1 operator on a single trivial party.
    """
    keep = party_set(keep, t.num_parties)
    m = t.num_parties
    if not keep:
        return DensityOperator((1,), np.array([[np.trace(t.matrix)]]), check=False)
    if keep == tuple(range(m)):
        return t
    tens = _as_tensor(t.matrix, t.dims)
    row = list(range(m))
    col = [m + i for i in range(m)]
    for i in complement(keep, m):
        col[i] = row[i]
    out_idx = [row[i] for i in keep] + [col[i] for i in keep]
    reduced = np.einsum(tens, row + col, out_idx)
    kd = tuple(t.dims[i] for i in keep)
    side = math.prod(kd)
    return DensityOperator(kd, reduced.reshape(side, side), check=False)


def embed_local(op: np.ndarray, subsystem: Iterable[int], dims: Sequence[int]) -> np.ndarray:
    """Return ``op`` acting on ``subsystem`` tensored with the identity elsewhere."""
    dims = check_dims(dims)
    subsystem = party_set(subsystem, len(dims))
    op = np.asarray(op)
    sdims = tuple(dims[i] for i in subsystem)
    side = math.prod(sdims)
    if op.shape != (side, side):
        raise StateError(f"operator shape {op.shape} does not match subsystem dims {sdims}")
    m = len(dims)
    if subsystem == tuple(range(m)):
        return op
    rest = complement(subsystem, m)
    rest_side = math.prod(dims[i] for i in rest)
    full = np.kron(op, np.eye(rest_side))
    order = list(subsystem) + list(rest)
    local_dims = [dims[i] for i in order]
    tens = full.reshape(local_dims * 2)
    # axis k of the tensor currently holds party order[k]
    inv = np.argsort(order)
    perm = list(inv) + [m + i for i in inv]
    total = math.prod(dims)
    return tens.transpose(perm).reshape(total, total)


def _canonical_phase(vec: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    nz = np.flatnonzero(np.abs(vec) > tol)
    if nz.size == 0:
        return vec
    lead = vec[nz[0]]
    return vec * (abs(lead) / lead)


def eigen_decompose(t: DensityOperator | np.ndarray) -> Spectrum:
    """Descending spectrum of a Hermitian operator.

    Eigenvectors are phase-fixed so their first nonzero entry is real and
    positive; inside degenerate clusters they are sorted lexicographically.
    Negative eigenvalues within round-off are clamped to zero.
    """
    matrix = t.matrix if isinstance(t, DensityOperator) else np.asarray(t, dtype=complex)
    herm_dev = np.max(np.abs(matrix - matrix.conj().T), initial=0.0)
    if herm_dev > HERMITIAN_TOL * max(1.0, np.max(np.abs(matrix), initial=0.0)):
        raise StateError(f"operator is not Hermitian (deviation {herm_dev:.3g})")
    values, vecs = np.linalg.eigh((matrix + matrix.conj().T) / 2)
    values = values[::-1].copy()
    vecs = vecs[:, ::-1].copy()
    if values.size and values[-1] < -NEGATIVE_TOL:
        raise StateError(f"negative eigenvalue {values[-1]:.3g} beyond round-off")
    values[values < 0] = 0.0
    for k in range(vecs.shape[1]):
        vecs[:, k] = _canonical_phase(vecs[:, k])
    start = 0
    scale = max(1.0, float(values[0])) if values.size else 1.0
    while start < values.size:
        stop = start + 1
        while stop < values.size and values[start] - values[stop] <= _DEGENERACY_TOL * scale:
            stop += 1
        if stop - start > 1:
            block = vecs[:, start:stop]
            keys = [tuple(np.round(np.concatenate([col.real, col.imag]), 10)) for col in block.T]
            order = sorted(range(stop - start), key=lambda j: keys[j], reverse=True)
            vecs[:, start:stop] = block[:, order]
        start = stop
    return Spectrum(values, vecs)


def spectral_matrix(spec: Spectrum, f: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    mapped = np.asarray(f(spec.values), dtype=float)
    return (spec.basis * mapped) @ spec.basis.conj().T


def apply_spectral_function(
    t: DensityOperator, f: Callable[[np.ndarray], np.ndarray]
) -> DensityOperator:
    """f(t) on the eigenbasis of t; ``f`` acts elementwise on an eigenvalue array.

    The result is not checked as a state: f(t) may have trace above one.
    """
    return DensityOperator(t.dims, spectral_matrix(eigen_decompose(t), f), check=False)


def _same_profile(a, b) -> None:
    if a.dims != b.dims:
        raise StateError(f"profile mismatch: {a.dims} vs {b.dims}")


def trace_norm(matrix: np.ndarray) -> float:
    return float(np.sum(np.linalg.svd(matrix, compute_uv=False)))


def trace_distance(a, b) -> float:
    """D(a, b) = ||a - b||_1 / 2 + |tr(a - b)| / 2 for subnormalized states."""
    _same_profile(a, b)
    if isinstance(a, ClassicalState) and isinstance(b, ClassicalState):
        diff = a.probs - b.probs
        return 0.5 * float(np.abs(diff).sum()) + 0.5 * abs(float(diff.sum()))
    a, b = as_operator(a), as_operator(b)
    diff = a.matrix - b.matrix
    diff = (diff + diff.conj().T) / 2
    norm1 = float(np.sum(np.abs(np.linalg.eigvalsh(diff))))
    return 0.5 * norm1 + 0.5 * abs(float(np.real(np.trace(diff))))


def _payload(state) -> np.ndarray:
    return state.probs if isinstance(state, ClassicalState) else state.matrix


def _sqrt_psd(matrix: np.ndarray) -> np.ndarray:
    return spectral_matrix(eigen_decompose(matrix), np.sqrt)


def generalized_fidelity(a, b) -> float:
    """||sqrt(a) sqrt(b)||_1 + sqrt((1 - tr a)(1 - tr b)), clipped to [0, 1]."""
    _same_profile(a, b)
    if type(a) is type(b) and np.array_equal(_payload(a), _payload(b)):
        return 1.0
    if isinstance(a, ClassicalState) and isinstance(b, ClassicalState):
        overlap = float(np.sum(np.sqrt(a.probs * b.probs)))
    else:
        a, b = as_operator(a), as_operator(b)
        overlap = trace_norm(_sqrt_psd(a.matrix) @ _sqrt_psd(b.matrix))
    defect = _trace_defect(a) * _trace_defect(b)
    return min(1.0, max(0.0, overlap + math.sqrt(defect)))


def _trace_defect(state) -> float:
    # the square root in the fidelity would blow trace round-off up to ~1e-8
    gap = 1 - state.trace()
    return 0.0 if gap <= DEFECT_SNAP else gap


def purified_distance(a, b) -> float:
    return math.sqrt(max(0.0, 1 - generalized_fidelity(a, b) ** 2))


STATE_KINDS = ("pure", "mixed", "classical", "classical-sparse", "product")


def _rng(seed) -> np.random.Generator:
    return np.random.default_rng(seed)


def _ginibre(rng: np.random.Generator, n: int) -> np.ndarray:
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_state(dims: Sequence[int], kind: str = "mixed", seed=None) -> DensityOperator:
    """Seeded random state.

    ``mixed`` draws G G^dag / tr from a complex Ginibre matrix, ``pure`` a
    normalized complex Gaussian vector, ``classical`` a normalized uniform
    tensor (``classical-sparse`` zeroes about half its entries) and
    ``product`` a tensor product of independent mixed states.
    """
    dims = check_dims(dims)
    n = math.prod(dims)
    rng = _rng(seed)
    if kind == "mixed":
        matrix = _ginibre(rng, n)
    elif kind == "pure":
        v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        v /= np.linalg.norm(v)
        matrix = np.outer(v, v.conj())
    elif kind in ("classical", "classical-sparse"):
        return random_classical(dims, sparse=kind == "classical-sparse", seed=rng).to_operator()
    elif kind == "product":
        matrix = np.ones((1, 1), dtype=complex)
        for d in dims:
            matrix = np.kron(matrix, _ginibre(rng, d))
    else:
        raise ValueError(f"unknown state kind {kind!r}; expected one of {STATE_KINDS}")
    matrix = (matrix + matrix.conj().T) / 2
    return DensityOperator(dims, matrix)


def random_classical(dims: Sequence[int], sparse: bool = False, seed=None) -> ClassicalState:
    dims = check_dims(dims)
    rng = _rng(seed)
    p = rng.uniform(size=dims)
    if sparse:
        mask = rng.uniform(size=dims) < 0.5
        if mask.all():
            mask.flat[rng.integers(p.size)] = False
        p[mask] = 0.0
    return ClassicalState(dims, p / p.sum())


def maximally_entangled(d: int) -> DensityOperator:
    """|psi> = sum_j d^{-1/2} |j>|j> as a two-party projector."""
    v = np.zeros(d * d, dtype=complex)
    v[[j * d + j for j in range(d)]] = 1 / math.sqrt(d)
    return DensityOperator((d, d), np.outer(v, v.conj()))
