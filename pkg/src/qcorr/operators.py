"""Operator algebra on truncated multimode Fock spaces.

Operators keep a CSR matrix internally (multimode Hamiltonians are very sparse
once three modes are truncated at a dozen levels each); ``Operator.matrix``
always hands back a dense copy. Density matrices are dense.

Quadrature convention used throughout the package::

    X = (a + a^dag) / sqrt(2),   Y = (a - a^dag) / (j sqrt(2)),   Var_vac = 1/2
"""

from __future__ import annotations

import math
import string
from dataclasses import dataclass
from functools import reduce
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from .errors import DomainError, InvalidStateError, ShapeError, TruncationError

TRACE_TOL = 1e-9
HERMITIAN_TOL = 1e-9
POSITIVITY_TOL = -1e-8


@dataclass(frozen=True)
class ModeSpace:
    """Tensor product of truncated modes, listed in mode order."""

    dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in np.atleast_1d(self.dims))
        if len(dims) < 1:
            raise ShapeError("a mode space needs at least one mode")
        if any(d < 2 for d in dims):
            raise ShapeError(f"every mode dimension must be >= 2, got {dims}")
        object.__setattr__(self, "dims", dims)

    @property
    def total_dim(self) -> int:
        return math.prod(self.dims)

    @property
    def n_modes(self) -> int:
        return len(self.dims)

    def __len__(self):
        return len(self.dims)


def _as_space(space) -> ModeSpace:
    if isinstance(space, ModeSpace):
        return space
    return ModeSpace(tuple(np.atleast_1d(space)))


class Operator:
    """Linear operator on a :class:`ModeSpace`.

    Supports ``+``, ``-``, scalar ``*``, ``@`` and ``.dag()``; all of them
    return new operators, nothing mutates in place.
    """

    __slots__ = ("space", "data", "label")

    def __init__(self, space, matrix, label: str = ""):
        space = _as_space(space)
        data = sp.csr_array(matrix, dtype=complex)
        n = space.total_dim
        if data.shape != (n, n):
            raise ShapeError(f"matrix shape {data.shape} does not match total_dim {n}")
        data.sum_duplicates()
        data.eliminate_zeros()
        self.space = space
        self.data = data
        self.label = label

    @property
    def matrix(self) -> np.ndarray:
        return self.data.toarray()

    @property
    def shape(self):
        return self.data.shape

    def dag(self) -> Operator:
        return Operator(self.space, self.data.conj().T.tocsr(), f"{self.label}^dag" if self.label else "")

    def _check(self, other: Operator):
        if not isinstance(other, Operator):
            return NotImplemented
        if other.space != self.space:
            raise ShapeError(f"space mismatch: {self.space.dims} vs {other.space.dims}")
        return None

    def __add__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return Operator(self.space, self.data + other.data)

    def __sub__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return Operator(self.space, self.data - other.data)

    def __neg__(self):
        return Operator(self.space, -self.data)

    def __mul__(self, scalar):
        if isinstance(scalar, Operator):
            raise TypeError("use @ for operator products")
        return Operator(self.space, self.data * complex(scalar))

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return Operator(self.space, self.data / complex(scalar))

    def __matmul__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return Operator(self.space, self.data @ other.data)

    def __pow__(self, n: int):
        if n < 0:
            raise DomainError("negative operator powers are not supported")
        return reduce(lambda x, y: x @ y, [self] * n, identity(self.space))

    def is_hermitian(self, tol: float = 1e-10) -> bool:
        diff = self.data - self.data.conj().T
        return diff.nnz == 0 or float(np.max(np.abs(diff.data))) < tol

    def __repr__(self):
        return f"Operator(dims={self.space.dims}, nnz={self.data.nnz}, label={self.label!r})"


class QuantumState:
    """Density matrix with validated trace, Hermiticity and positivity."""

    __slots__ = ("space", "matrix")

    def __init__(self, space, matrix, validate: bool = True):
        space = _as_space(space)
        matrix = np.array(matrix, dtype=complex)
        n = space.total_dim
        if matrix.shape != (n, n):
            raise ShapeError(f"density matrix shape {matrix.shape} does not match total_dim {n}")
        matrix.setflags(write=False)
        self.space = space
        self.matrix = matrix
        if validate:
            check_density_matrix(matrix)

    @classmethod
    def from_ket(cls, space, ket) -> QuantumState:
        ket = np.asarray(ket, dtype=complex)
        return cls(space, np.outer(ket, ket.conj()))

    def __repr__(self):
        return f"QuantumState(dims={self.space.dims})"


def density_violations(matrix: np.ndarray) -> tuple[float, float, float]:
    """Return (|tr - 1|, max |rho - rho^dag|, min eigenvalue)."""
    trace_err = abs(np.trace(matrix) - 1.0)
    herm_err = float(np.max(np.abs(matrix - matrix.conj().T)))
    herm = 0.5 * (matrix + matrix.conj().T)
    min_eig = float(np.linalg.eigvalsh(herm)[0])
    return trace_err, herm_err, min_eig


def check_density_matrix(matrix: np.ndarray) -> tuple[float, float, float]:
    """Raise InvalidStateError on any violation; return the violations otherwise."""
    trace_err, herm_err, min_eig = density_violations(matrix)
    if trace_err >= TRACE_TOL:
        raise InvalidStateError(f"trace deviates from 1 by {trace_err:.3e}")
    if herm_err >= HERMITIAN_TOL:
        raise InvalidStateError(f"density matrix not Hermitian (max deviation {herm_err:.3e})")
    if min_eig <= POSITIVITY_TOL:
        raise InvalidStateError(f"density matrix not positive (min eigenvalue {min_eig:.3e})")
    return trace_err, herm_err, min_eig


# --------------------------------------------------------------------------
# construction


def annihilation(dim: int) -> Operator:
    """Truncated bosonic lowering operator with M[n-1, n] = sqrt(n)."""
    if int(dim) != dim or dim < 2:
        raise ShapeError(f"mode dimension must be an integer >= 2, got {dim}")
    dim = int(dim)
    n = np.arange(1, dim)
    mat = sp.csr_array((np.sqrt(n).astype(complex), (n - 1, n)), shape=(dim, dim))
    return Operator(ModeSpace((dim,)), mat, "a")


def identity(space) -> Operator:
    space = _as_space(space)
    return Operator(space, sp.identity(space.total_dim, dtype=complex, format="csr"), "I")


def zero(space) -> Operator:
    space = _as_space(space)
    return Operator(space, sp.csr_array((space.total_dim, space.total_dim), dtype=complex))


def embed(op, mode_index: int, space) -> Operator:
    """Place a single-mode operator at ``mode_index``: I x ... x op x ... x I."""
    space = _as_space(space)
    if not 0 <= mode_index < space.n_modes:
        raise ShapeError(f"mode index {mode_index} out of range for {space.n_modes} modes")
    mat = op.data if isinstance(op, Operator) else sp.csr_array(np.asarray(op, dtype=complex))
    d = space.dims[mode_index]
    if mat.shape != (d, d):
        raise ShapeError(f"operator of shape {mat.shape} cannot act on mode {mode_index} of dim {d}")
    left = math.prod(space.dims[:mode_index])
    right = math.prod(space.dims[mode_index + 1:])
    full = sp.kron(sp.kron(sp.identity(left, dtype=complex), mat), sp.identity(right, dtype=complex))
    label = op.label if isinstance(op, Operator) else ""
    return Operator(space, full.tocsr(), f"{label}_{mode_index}" if label else "")


def destroy(space, mode_index: int) -> Operator:
    """Annihilation operator of one mode, embedded in ``space``."""
    space = _as_space(space)
    return embed(annihilation(space.dims[mode_index]), mode_index, space)


def number(space, mode_index: int) -> Operator:
    a = destroy(space, mode_index)
    return a.dag() @ a


def quadratures(space, mode_index: int) -> tuple[Operator, Operator]:
    a = destroy(space, mode_index)
    ad = a.dag()
    x = (a + ad) / math.sqrt(2)
    y = (a - ad) / (1j * math.sqrt(2))
    return x, y


def commutator(A: Operator, B: Operator) -> Operator:
    return A @ B - B @ A


# --------------------------------------------------------------------------
# expectations and reductions


def expectation(state: QuantumState, op: Operator) -> complex:
    """Tr(rho O), computed from the sparse pattern of O."""
    if state.space != op.space:
        raise ShapeError(f"space mismatch: {state.space.dims} vs {op.space.dims}")
    return expect_matrix(state.matrix, op)


def expect_matrix(rho: np.ndarray, op: Operator) -> complex:
    coo = op.data.tocoo()
    # Tr(rho O) = sum_ij rho_ji O_ij
    return complex(np.sum(coo.data * rho[coo.col, coo.row]))


def partial_trace(state: QuantumState, keep: Sequence[int]) -> QuantumState:
    """Reduced state on the modes in ``keep`` (in the order given)."""
    keep = [int(k) for k in np.atleast_1d(keep)]
    n = state.space.n_modes
    if not keep:
        raise IndexError("keep must name at least one mode")
    if len(set(keep)) != len(keep) or any(k < 0 or k >= n for k in keep):
        raise IndexError(f"invalid mode indices {keep} for {n} modes")
    dims = state.space.dims
    letters = string.ascii_letters
    if 2 * n > len(letters):
        raise ShapeError("too many modes for partial_trace")
    row = list(letters[:n])
    col = list(letters[n:2 * n])
    for i in range(n):
        if i not in keep:
            col[i] = row[i]
    out = "".join(row[k] for k in keep) + "".join(col[k] for k in keep)
    tensor = state.matrix.reshape(dims + dims)
    reduced = np.einsum("".join(row) + "".join(col) + "->" + out, tensor)
    kdims = tuple(dims[k] for k in keep)
    m = math.prod(kdims)
    return QuantumState(ModeSpace(kdims), reduced.reshape(m, m))


def tensor_states(*states: QuantumState) -> QuantumState:
    dims = sum((s.space.dims for s in states), ())
    mat = reduce(np.kron, [s.matrix for s in states])
    return QuantumState(ModeSpace(dims), mat)


# --------------------------------------------------------------------------
# canonical states


def fock_state(n: int, dim: int) -> QuantumState:
    if dim < 2:
        raise ShapeError(f"mode dimension must be >= 2, got {dim}")
    if not 0 <= n < dim:
        raise DomainError(f"Fock index {n} outside truncation 0..{dim - 1}")
    ket = np.zeros(dim, dtype=complex)
    ket[n] = 1.0
    return QuantumState.from_ket(ModeSpace((dim,)), ket)


def vacuum_state(space) -> QuantumState:
    space = _as_space(space)
    mat = np.zeros((space.total_dim, space.total_dim), dtype=complex)
    mat[0, 0] = 1.0
    return QuantumState(space, mat)


def coherent_ket(alpha: complex, dim: int) -> np.ndarray:
    """Truncated coherent amplitudes, renormalized; enforces |alpha|^2 <= dim/4."""
    if dim < 2:
        raise ShapeError(f"mode dimension must be >= 2, got {dim}")
    alpha = complex(alpha)
    if abs(alpha) ** 2 > dim / 4:
        raise TruncationError(f"|alpha|^2 = {abs(alpha) ** 2:.4g} exceeds dim/4 = {dim / 4:.4g}")
    n = np.arange(dim)
    log_fact = np.array([math.lgamma(k + 1) for k in n])
    if alpha == 0:
        ket = np.zeros(dim, dtype=complex)
        ket[0] = 1.0
        return ket
    ket = np.exp(-abs(alpha) ** 2 / 2 + n * np.log(abs(alpha)) - 0.5 * log_fact) * np.exp(1j * n * np.angle(alpha))
    return ket / np.linalg.norm(ket)


def coherent_state(alpha: complex, dim: int) -> QuantumState:
    return QuantumState.from_ket(ModeSpace((dim,)), coherent_ket(alpha, dim))


def thermal_state(nbar: float, dim: int) -> QuantumState:
    if dim < 2:
        raise ShapeError(f"mode dimension must be >= 2, got {dim}")
    if nbar < 0:
        raise DomainError(f"mean occupation must be >= 0, got {nbar}")
    if nbar == 0:
        return fock_state(0, dim)
    p = (nbar / (nbar + 1.0)) ** np.arange(dim)
    return QuantumState(ModeSpace((dim,)), np.diag(p / p.sum()).astype(complex))


def trace_distance(rho: QuantumState | np.ndarray, sigma: QuantumState | np.ndarray) -> float:
    a = rho.matrix if isinstance(rho, QuantumState) else rho
    b = sigma.matrix if isinstance(sigma, QuantumState) else sigma
    diff = a - b
    diff = 0.5 * (diff + diff.conj().T)
    return 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(diff))))
