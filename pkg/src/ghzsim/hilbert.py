"""Tensor-product Hilbert spaces, sparse operators, and states.

This module provides the composite space of N multilevel atoms coupled to
a single truncated cavity mode, together with the sparse operator algebra
every other module builds on.  The basis ordering is fixed: atom 1 varies
slowest, then atom 2, ..., then the cavity Fock index varies fastest, with
atom levels enumerated in their declared order and Fock states ascending.
For three atoms with local levels (l1, l2, l3) and photon number n the
flat basis index is

    ((i1 * L + i2) * L + i3) * (n_max + 1) + n

where L is the number of levels per atom and i_k the level indices.

All numerics are complex double precision.  Operators are constructed in
coordinate (COO) form and stored compressed-row (CSR) for products.
Spaces, operators, and states are immutable after construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np
import scipy.sparse as sp

__all__ = [
    "SpaceSpec",
    "SparseOperator",
    "StateVector",
    "DensityMatrix",
    "build_space",
    "embed_site_operator",
    "site_dyad",
    "cavity_annihilation",
    "commutator",
    "ket_from_labels",
    "ket_bra",
    "projector",
    "expectation",
    "trace_out_cavity",
]

#: Tolerance for state-vector normalization checks.
NORM_TOL = 1e-10
#: Tolerance for density-matrix trace checks.
TRACE_TOL = 1e-10
#: Entrywise tolerance for Hermiticity checks.
HERM_TOL = 1e-12


@dataclass(frozen=True)
class SpaceSpec:
    """Specification of a composite atoms-plus-cavity Hilbert space.

    Parameters
    ----------
    n_atoms : int
        Number of atoms (3 for the target scheme; parameterized for tests).
    atom_levels : tuple of str
        Ordered level labels per atom, a subset of ("0", "1", "e", "r").
    cavity_cutoff : int or None
        Maximum photon number n_max (Fock states 0..n_max), or None for a
        space without a cavity factor.
    """

    n_atoms: int
    atom_levels: tuple
    cavity_cutoff: Optional[int] = None

    def __post_init__(self):
        if self.n_atoms < 1:
            raise ValueError(f"need at least one atom, got {self.n_atoms}")
        if len(self.atom_levels) == 0:
            raise ValueError("atom_levels must be nonempty")
        if len(set(self.atom_levels)) != len(self.atom_levels):
            raise ValueError(f"duplicate level labels in {self.atom_levels}")
        if self.cavity_cutoff is not None and self.cavity_cutoff < 0:
            raise ValueError(f"cavity_cutoff must be >= 0, got {self.cavity_cutoff}")
        # normalize to tuple so instances hash and compare by value
        object.__setattr__(self, "atom_levels", tuple(self.atom_levels))

    @property
    def local_dim(self) -> int:
        """Number of levels per atom."""
        return len(self.atom_levels)

    @property
    def has_cavity(self) -> bool:
        return self.cavity_cutoff is not None

    @property
    def cavity_dim(self) -> int:
        """Dimension of the cavity factor (1 when there is no cavity)."""
        return self.cavity_cutoff + 1 if self.has_cavity else 1

    @property
    def dim(self) -> int:
        """Total composite dimension, local_dim^n_atoms * cavity_dim."""
        return self.local_dim ** self.n_atoms * self.cavity_dim

    def level_index(self, label: str) -> int:
        """Index of a level label in the declared ordering."""
        try:
            return self.atom_levels.index(label)
        except ValueError:
            raise ValueError(
                f"level {label!r} not in space levels {self.atom_levels}"
            ) from None

    def basis_index(self, atom_labels: Sequence[str], photon: int = 0) -> int:
        """Flat basis index of a product state |l1 l2 ... lN>|n>.

        Parameters
        ----------
        atom_labels : sequence of str
            One level label per atom, e.g. ("0", "e", "0").
        photon : int
            Cavity Fock index; must be 0 for a no-cavity space.

        Returns
        -------
        int
        """
        if len(atom_labels) != self.n_atoms:
            raise ValueError(
                f"expected {self.n_atoms} atom labels, got {len(atom_labels)}"
            )
        if not self.has_cavity and photon != 0:
            raise ValueError("photon index given for a space without a cavity")
        if photon < 0 or photon >= self.cavity_dim:
            raise ValueError(f"photon index {photon} outside 0..{self.cavity_dim - 1}")
        idx = 0
        for lab in atom_labels:
            idx = idx * self.local_dim + self.level_index(lab)
        return idx * self.cavity_dim + photon

    def without_cavity(self) -> "SpaceSpec":
        """The purely atomic space with the same atoms and levels."""
        return SpaceSpec(self.n_atoms, self.atom_levels, None)


def build_space(n_atoms: int, levels: Sequence[str], cutoff: Optional[int] = None) -> SpaceSpec:
    """Construct a SpaceSpec.

    Parameters
    ----------
    n_atoms : int
        Number of atoms, >= 1.
    levels : sequence of str
        Ordered atomic level labels.
    cutoff : int or None
        Cavity photon-number cutoff n_max, or None for no cavity.

    Returns
    -------
    SpaceSpec
    """
    return SpaceSpec(n_atoms, tuple(levels), cutoff)


def _check_same_space(a: "SparseOperator", b: "SparseOperator") -> None:
    if a.space != b.space:
        raise ValueError(f"space mismatch: {a.space} vs {b.space}")


@dataclass(frozen=True)
class SparseOperator:
    """A sparse complex operator attached to a SpaceSpec.

    Parameters
    ----------
    space : SpaceSpec
        The space the operator acts on.
    matrix : scipy.sparse.csr_matrix
        Square CSR matrix of dimension space.dim.
    hermitian_hint : bool
        When set, construction verifies max|A - A^dag| <= 1e-12 entrywise.
    """

    space: SpaceSpec
    matrix: sp.csr_matrix = field(compare=False)
    hermitian_hint: bool = False

    def __post_init__(self):
        m = sp.csr_matrix(self.matrix, dtype=complex)
        m.sum_duplicates()
        if m.shape != (self.space.dim, self.space.dim):
            raise ValueError(
                f"matrix shape {m.shape} does not match space dimension {self.space.dim}"
            )
        object.__setattr__(self, "matrix", m)
        if self.hermitian_hint:
            dev = self.matrix - self.matrix.getH()
            err = np.max(np.abs(dev.data)) if dev.nnz else 0.0
            if err > HERM_TOL:
                raise ValueError(
                    f"hermitian_hint set but max|A - A^dag| = {err:.3e} > {HERM_TOL}"
                )

    @classmethod
    def from_entries(
        cls,
        space: SpaceSpec,
        rows: Sequence[int],
        cols: Sequence[int],
        values: Sequence[complex],
        hermitian_hint: bool = False,
    ) -> "SparseOperator":
        """Build from (row, col, value) triplets; duplicates are summed.

        Raises
        ------
        ValueError
            If any index is outside the space dimension.
        """
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        if rows.size and (rows.min() < 0 or rows.max() >= space.dim):
            raise ValueError("row index outside space dimension")
        if cols.size and (cols.min() < 0 or cols.max() >= space.dim):
            raise ValueError("col index outside space dimension")
        m = sp.coo_matrix(
            (np.asarray(values, dtype=complex), (rows, cols)),
            shape=(space.dim, space.dim),
        ).tocsr()
        return cls(space, m, hermitian_hint)

    @classmethod
    def zero(cls, space: SpaceSpec) -> "SparseOperator":
        return cls(space, sp.csr_matrix((space.dim, space.dim), dtype=complex))

    @classmethod
    def identity(cls, space: SpaceSpec) -> "SparseOperator":
        return cls(space, sp.identity(space.dim, dtype=complex, format="csr"), True)

    @property
    def nnz(self) -> int:
        return self.matrix.nnz

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray()

    def dagger(self) -> "SparseOperator":
        """Hermitian adjoint A^dag."""
        return SparseOperator(self.space, self.matrix.getH().tocsr(), self.hermitian_hint)

    def is_hermitian(self, tol: float = HERM_TOL) -> bool:
        dev = self.matrix - self.matrix.getH()
        return (np.max(np.abs(dev.data)) if dev.nnz else 0.0) <= tol

    def __add__(self, other: "SparseOperator") -> "SparseOperator":
        _check_same_space(self, other)
        return SparseOperator(self.space, (self.matrix + other.matrix).tocsr())

    def __sub__(self, other: "SparseOperator") -> "SparseOperator":
        _check_same_space(self, other)
        return SparseOperator(self.space, (self.matrix - other.matrix).tocsr())

    def __mul__(self, scalar: complex) -> "SparseOperator":
        return SparseOperator(self.space, (self.matrix * scalar).tocsr())

    __rmul__ = __mul__

    def __neg__(self) -> "SparseOperator":
        return self * (-1.0)

    def __matmul__(self, other: "SparseOperator") -> "SparseOperator":
        _check_same_space(self, other)
        return SparseOperator(self.space, (self.matrix @ other.matrix).tocsr())


def commutator(a: SparseOperator, b: SparseOperator) -> SparseOperator:
    """Commutator [A, B] = AB - BA."""
    _check_same_space(a, b)
    return SparseOperator(a.space, (a.matrix @ b.matrix - b.matrix @ a.matrix).tocsr())


@dataclass(frozen=True)
class StateVector:
    """A pure state as a dense complex vector on a SpaceSpec.

    When constructed with normalized=True (the default) the 2-norm must be
    within 1e-10 of 1.
    """

    space: SpaceSpec
    data: np.ndarray = field(compare=False)
    normalized: bool = True

    def __post_init__(self):
        v = np.asarray(self.data, dtype=complex).reshape(-1)
        if v.shape != (self.space.dim,):
            raise ValueError(
                f"vector length {v.shape[0]} does not match space dimension {self.space.dim}"
            )
        object.__setattr__(self, "data", v)
        if self.normalized:
            nrm = np.linalg.norm(v)
            if abs(nrm - 1.0) > NORM_TOL:
                raise ValueError(f"state norm {nrm!r} deviates from 1 by more than {NORM_TOL}")

    def to_density_matrix(self) -> "DensityMatrix":
        return DensityMatrix(self.space, np.outer(self.data, self.data.conj()))


@dataclass(frozen=True)
class DensityMatrix:
    """A mixed state as a dense complex matrix on a SpaceSpec.

    Trace must be within 1e-10 of 1 and the matrix Hermitian to 1e-12
    entrywise.
    """

    space: SpaceSpec
    data: np.ndarray = field(compare=False)

    def __post_init__(self):
        m = np.asarray(self.data, dtype=complex)
        if m.shape != (self.space.dim, self.space.dim):
            raise ValueError(
                f"matrix shape {m.shape} does not match space dimension {self.space.dim}"
            )
        object.__setattr__(self, "data", m)
        tr = np.trace(m)
        if abs(tr - 1.0) > TRACE_TOL:
            raise ValueError(f"trace {tr!r} deviates from 1 by more than {TRACE_TOL}")
        herm_err = np.max(np.abs(m - m.conj().T))
        if herm_err > HERM_TOL:
            raise ValueError(f"Hermiticity deviation {herm_err:.3e} exceeds {HERM_TOL}")


def embed_site_operator(
    space: SpaceSpec,
    site_index: int,
    local_op: Union[np.ndarray, sp.spmatrix],
) -> SparseOperator:
    """Embed a single-atom operator into the composite space.

    Acts as the identity on every other atom and on the cavity.

    Parameters
    ----------
    space : SpaceSpec
    site_index : int
        Atom index, 0 .. n_atoms-1.
    local_op : array or sparse matrix
        Square operator of dimension space.local_dim.

    Returns
    -------
    SparseOperator

    Raises
    ------
    ValueError
        On a site index out of range or a local dimension mismatch.
    """
    if site_index < 0 or site_index >= space.n_atoms:
        raise ValueError(f"site index {site_index} outside 0..{space.n_atoms - 1}")
    loc = sp.csr_matrix(local_op, dtype=complex)
    if loc.shape != (space.local_dim, space.local_dim):
        raise ValueError(
            f"local operator shape {loc.shape} does not match local dimension {space.local_dim}"
        )
    out = None
    for k in range(space.n_atoms):
        fac = loc if k == site_index else sp.identity(space.local_dim, dtype=complex, format="csr")
        out = fac if out is None else sp.kron(out, fac, format="csr")
    if space.has_cavity:
        out = sp.kron(out, sp.identity(space.cavity_dim, dtype=complex, format="csr"), format="csr")
    return SparseOperator(space, out)


def site_dyad(space: SpaceSpec, site_index: int, bra_level: str, ket_level: str) -> SparseOperator:
    """The embedded dyad |bra_level><ket_level| on one atom.

    Convenience built on embed_site_operator; the returned operator sends
    the atom's |ket_level> to |bra_level>.
    """
    loc = np.zeros((space.local_dim, space.local_dim), dtype=complex)
    loc[space.level_index(bra_level), space.level_index(ket_level)] = 1.0
    return embed_site_operator(space, site_index, loc)


def cavity_annihilation(space: SpaceSpec) -> SparseOperator:
    """The cavity annihilation operator a, identity on the atoms.

    a|n> = sqrt(n)|n-1>; truncation at n_max only removes the harmless
    top row of a^dag.

    Raises
    ------
    ValueError
        If the space has no cavity factor.
    """
    if not space.has_cavity:
        raise ValueError("space has no cavity factor")
    diag = np.sqrt(np.arange(1, space.cavity_dim, dtype=float))
    a_loc = sp.diags(diag.astype(complex), offsets=1, format="csr")
    atoms_eye = sp.identity(space.local_dim ** space.n_atoms, dtype=complex, format="csr")
    return SparseOperator(space, sp.kron(atoms_eye, a_loc, format="csr"))


def ket_from_labels(space: SpaceSpec, atom_labels: Sequence[str], photon: int = 0) -> StateVector:
    """Unit basis vector |l1 l2 ... lN>|photon>."""
    v = np.zeros(space.dim, dtype=complex)
    v[space.basis_index(atom_labels, photon)] = 1.0
    return StateVector(space, v)


def ket_bra(ket: StateVector, bra: StateVector) -> SparseOperator:
    """Rank-1 operator |ket><bra| built from the two vectors' supports."""
    if ket.space != bra.space:
        raise ValueError("ket and bra live on different spaces")
    knz = np.nonzero(ket.data)[0]
    bnz = np.nonzero(bra.data)[0]
    outer = np.outer(ket.data[knz], bra.data[bnz].conj())
    rows = np.repeat(knz, bnz.size)
    cols = np.tile(bnz, knz.size)
    return SparseOperator.from_entries(ket.space, rows, cols, outer.reshape(-1))


def projector(ket: StateVector) -> SparseOperator:
    """Rank-1 projector |psi><psi| for a (normalized) state vector."""
    v = ket.data
    nz = np.nonzero(v)[0]
    outer = np.outer(v[nz], v[nz].conj())
    rows = np.repeat(nz, nz.size)
    cols = np.tile(nz, nz.size)
    return SparseOperator.from_entries(
        ket.space, rows, cols, outer.reshape(-1), hermitian_hint=True
    )


def expectation(op: SparseOperator, state: Union[StateVector, DensityMatrix]) -> complex:
    """<psi|A|psi> for a StateVector, Tr(A rho) for a DensityMatrix."""
    if op.space != state.space:
        raise ValueError("operator and state live on different spaces")
    if isinstance(state, StateVector):
        return complex(np.vdot(state.data, op.matrix @ state.data))
    # Tr(A rho) = sum_ij A_ij rho_ji, computed without densifying A
    m = op.matrix.tocoo()
    return complex(np.sum(m.data * state.data[m.col, m.row]))


def trace_out_cavity(rho: DensityMatrix) -> DensityMatrix:
    """Partial trace over the cavity factor, returning the atomic state."""
    space = rho.space
    if not space.has_cavity:
        return rho
    d_at = space.local_dim ** space.n_atoms
    nc = space.cavity_dim
    reduced = rho.data.reshape(d_at, nc, d_at, nc).trace(axis1=1, axis2=3)
    return DensityMatrix(space.without_cavity(), reduced)
