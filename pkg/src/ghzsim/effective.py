"""Reduced models: Zeno-projected Z pumping and Rydberg adiabatic elimination.

Two reductions are implemented.  The quantum-Zeno reduction confines the
cavity-laser block to the photon-vacuum Zeno subspace, leaving a weak
Hamiltonian that couples the six one- and two-excitation qubit states to the
five dark states D1..D5 plus sixteen collapse channels that drain the dark
states back into the qubit sector (the Z pumping).  The adiabatic
elimination reduces the symmetric Rydberg block, at the pair-shift resonance
U = Delta, to a single resonant coupling of strength

    Omega_eff = 12*sqrt(2)*Omega_r^3 / Delta^2

between |+++> and |rrr>.  Combining the two gives the reduced model of the
whole scheme on the 64-dimensional atomic space {|0>,|1>,|e>,|r>}^3 with no
cavity factor: 16 Z-pump channels plus 6 single-atom Rydberg decay channels.

Frames.  The Z-pump Hamiltonian is conventionally written in the interaction
picture of the light-shift diagonal sum_i delta_i |1>_ii<1|: each coupling
|q><D_k| then rotates at the difference of the light-shift energies of |q>
and |D_k| (frequencies -delta and +2*delta under the delta convention).  A
unitarily equivalent static form keeps the diagonal explicit and the
couplings phase-free; populations of light-shift eigenstates, the GHZ
populations among them, are identical in the two frames.  The combined
reduced model defaults to the static frame, where the Rydberg coupling is
time-independent and steady states are well defined.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp

from .hilbert import (
    SparseOperator,
    SpaceSpec,
    StateVector,
    build_space,
    ket_bra,
    ket_from_labels,
    site_dyad,
)
from .model import CollapseChannel, ModelParams, named_states

__all__ = [
    "RotatingTerm",
    "TimeDependentHamiltonian",
    "ZenoDecomposition",
    "SymmetricAmplitudes",
    "AdiabaticElimination",
    "zeno_decompose",
    "build_effective_zpump",
    "light_shift_diagonal",
    "symmetric_hr_4x4",
    "amplitude_rhs",
    "adiabatic_eliminate",
    "build_effective_full_model",
]

#: Relative tolerance for grouping near-degenerate Zeno eigenvalues.
DEGENERACY_RTOL = 1e-9
#: Closure tolerance: how far a claimed invariant subspace may leak.
CLOSURE_TOL = 1e-10


@dataclass(frozen=True)
class RotatingTerm:
    """One rotating coupling: amplitude * exp(i*frequency*t) * op, plus H.c."""

    op: SparseOperator
    amplitude: complex
    frequency: float


@dataclass(frozen=True)
class TimeDependentHamiltonian:
    """Finite sum of rotating couplings, H(t) = sum_k amp_k e^{i w_k t} op_k + H.c.

    The Hermitian conjugate of every term is implied, so evaluate() is
    Hermitian at every t by construction.  A purely static Hamiltonian is
    the special case where every frequency is zero.
    """

    space: SpaceSpec
    terms: Tuple[RotatingTerm, ...]

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        for term in self.terms:
            if term.op.space != self.space:
                raise ValueError("all rotating terms must share the declared space")

    @property
    def is_static(self) -> bool:
        return all(term.frequency == 0 for term in self.terms)

    def frequencies(self) -> Tuple[float, ...]:
        """Distinct rotation frequencies, sorted."""
        return tuple(sorted({term.frequency for term in self.terms}))

    def evaluate(self, t: float) -> SparseOperator:
        """H(t) as a Hermitian SparseOperator."""
        m = sp.csr_matrix((self.space.dim, self.space.dim), dtype=complex)
        for term in self.terms:
            m = m + (term.amplitude * np.exp(1j * term.frequency * t)) * term.op.matrix
        m = m + m.getH()
        return SparseOperator(self.space, m, hermitian_hint=True)

    def to_static(self, frame_diagonal: SparseOperator) -> SparseOperator:
        """Undo the interaction picture generated by `frame_diagonal`.

        Returns the static Hamiltonian D + sum_k (amp_k op_k + H.c.), valid
        when every term's rotation frequency equals the difference of the
        diagonal's energies across that term's matrix elements, i.e. when
        the declared phases are exactly the ones conjugation by
        exp(-i D t) produces.  Raises ValueError otherwise, so a frame
        change can never silently alter the physics.
        """
        if frame_diagonal.space != self.space:
            raise ValueError("frame diagonal lives on a different space")
        dm = frame_diagonal.matrix
        if (dm - sp.diags(dm.diagonal())).nnz != 0:
            raise ValueError("frame generator must be diagonal in the product basis")
        energies = dm.diagonal().real
        scale = max(1.0, float(np.max(np.abs(energies)))) if energies.size else 1.0
        m = sp.csr_matrix((self.space.dim, self.space.dim), dtype=complex)
        for term in self.terms:
            coo = term.op.matrix.tocoo()
            gaps = energies[coo.row] - energies[coo.col]
            if np.any(np.abs(gaps - term.frequency) > 1e-9 * scale):
                raise ValueError(
                    "declared rotation frequency "
                    f"{term.frequency} does not match the frame diagonal"
                )
            m = m + term.amplitude * term.op.matrix
        m = m + m.getH() + frame_diagonal.matrix
        return SparseOperator(self.space, m, hermitian_hint=True)


@dataclass(frozen=True)
class ZenoDecomposition:
    """Eigenprojections of a strong coupling and the projected weak terms.

    eigenvalues[n] is the (degeneracy-grouped) eigenvalue eta_n of the
    strong operator H_m, projectors[n] the orthogonal projector P_n onto
    its eigenspace, and effective_terms[n] = P_n H0 P_n when a weak
    Hamiltonian H0 was supplied to zeno_decompose.  The projected dynamics
    is sum_n (P_n H0 P_n + g*eta_n*P_n).
    """

    space: SpaceSpec
    eigenvalues: Tuple[float, ...]
    projectors: Tuple[SparseOperator, ...]
    effective_terms: Tuple[SparseOperator, ...]

    @property
    def dims(self) -> Tuple[int, ...]:
        """Rank of each Zeno subspace."""
        return tuple(int(round(np.trace(p.toarray()).real)) for p in self.projectors)

    def zeno_hamiltonian(self, g: float = 1.0) -> SparseOperator:
        """sum_n (P_n H0 P_n + g*eta_n*P_n); needs effective terms."""
        if not self.effective_terms:
            raise ValueError("decomposition was built without a weak Hamiltonian H0")
        h = SparseOperator.zero(self.space)
        for eta, proj, term in zip(self.eigenvalues, self.projectors, self.effective_terms):
            h = h + term + (g * eta) * proj
        return SparseOperator(self.space, h.matrix, hermitian_hint=True)


def zeno_decompose(
    hm: SparseOperator,
    subspace: Optional[Sequence[StateVector]] = None,
    h0: Optional[SparseOperator] = None,
    degeneracy_tol: Optional[float] = None,
) -> ZenoDecomposition:
    """Eigenprojections of the strong coupling hm, optionally restricted.

    Parameters
    ----------
    hm : SparseOperator
        The strong (Hermitian) coupling whose eigenspaces define the Zeno
        subspaces.
    subspace : sequence of StateVector, optional
        Orthonormal basis of a closed invariant subspace to analyze; the
        whole space when omitted.  Raises if hm leaks out of the span.
    h0 : SparseOperator, optional
        Weak Hamiltonian to project; fills effective_terms.
    degeneracy_tol : float, optional
        Eigenvalues closer than this are grouped into one Zeno subspace.
        Defaults to 1e-9 times the spectral scale of hm.
    """
    if not hm.is_hermitian():
        raise ValueError("Zeno decomposition requires a Hermitian coupling")
    if h0 is not None and h0.space != hm.space:
        raise ValueError("h0 lives on a different space")
    space = hm.space
    if subspace is None:
        basis = np.eye(space.dim, dtype=complex)
    else:
        basis = np.column_stack([vec.data for vec in subspace])
        gram = basis.conj().T @ basis
        if not np.allclose(gram, np.eye(basis.shape[1]), atol=1e-10):
            raise ValueError("subspace basis is not orthonormal")
    hb = hm.matrix @ basis
    block = basis.conj().T @ hb
    scale = max(1.0, float(np.linalg.norm(block, ord=2))) if block.size else 1.0
    leak = hb - basis @ block
    if np.linalg.norm(leak) > CLOSURE_TOL * scale * np.sqrt(basis.shape[1]):
        raise ValueError("subspace is not closed under the strong coupling")
    evals, evecs = np.linalg.eigh(block)
    tol = degeneracy_tol if degeneracy_tol is not None else DEGENERACY_RTOL * scale
    groups: List[List[int]] = [[0]] if evals.size else []
    for k in range(1, evals.size):
        if evals[k] - evals[k - 1] <= tol:
            groups[-1].append(k)
        else:
            groups.append([k])
    eigenvalues, projectors, terms = [], [], []
    for idx in groups:
        eigenvalues.append(float(np.mean(evals[idx])))
        v = basis @ evecs[:, idx]
        p = v @ v.conj().T
        proj = SparseOperator(space, sp.csr_matrix(p), hermitian_hint=True)
        projectors.append(proj)
        if h0 is not None:
            term = p @ (h0.matrix @ p)
            terms.append(SparseOperator(space, sp.csr_matrix(term), hermitian_hint=True))
    return ZenoDecomposition(
        space=space,
        eigenvalues=tuple(eigenvalues),
        projectors=tuple(projectors),
        effective_terms=tuple(terms),
    )


def _zpump_delta(params: ModelParams) -> float:
    """Extract delta from the convention delta_1 = delta_3 = -delta, delta_2 = 2*delta."""
    d1, d2, d3 = params.delta
    scale = max(1.0, abs(d1), abs(d2), abs(d3))
    if abs(d1 - d3) > 1e-12 * scale or abs(d2 + 2.0 * d1) > 1e-12 * scale:
        raise ValueError(
            "Z-pump reduction requires delta_1 = delta_3 = -delta_2/2, got "
            f"{params.delta}"
        )
    return -d1


def light_shift_diagonal(params: ModelParams, space: SpaceSpec) -> SparseOperator:
    """The light-shift diagonal sum_i delta_i |1>_ii<1| on the given space."""
    params.require_g_units()
    h = SparseOperator.zero(space)
    for i in range(space.n_atoms):
        h = h + params.delta[i % 3] * site_dyad(space, i, "1", "1")
    return SparseOperator(space, h.matrix, hermitian_hint=True)


def build_effective_zpump(
    params: ModelParams, space: Optional[SpaceSpec] = None
) -> Tuple[TimeDependentHamiltonian, List[CollapseChannel]]:
    """The Zeno-projected Z-pumping model: rotating couplings and 16 channels.

    The Hamiltonian couples the one- and two-excitation qubit states to the
    dark states D1..D5 at strengths read off the vacuum-subspace projection
    of the cavity-laser block, each rotating at the light-shift energy gap
    (e^{-i delta t} or e^{+2i delta t}); the channels drain each dark state
    back into the qubit sector at total rate gamma_e.  Rejects parameter
    sets violating the delta convention delta_1 = delta_3 = -delta_2/2
    rather than silently generalizing.

    The default space is the cavity-free {|0>,|1>,|e>}^3 product; any
    three-atom space containing those levels (no cavity factor) works, which
    is how the combined reduced model embeds these terms alongside |r>.
    """
    params.require_g_units()
    delta = _zpump_delta(params)
    if space is None:
        space = build_space(3, ("0", "1", "e"))
    if space.n_atoms != 3 or not {"0", "1", "e"} <= set(space.atom_levels):
        raise ValueError("Z-pump reduction needs three atoms with levels {0, 1, e}")
    if space.has_cavity:
        raise ValueError("the reduced model carries no cavity factor")

    states = named_states(space)
    om = params.omega
    s2, s6 = 1.0 / np.sqrt(2.0), 1.0 / np.sqrt(6.0)

    def q(labels: str) -> StateVector:
        return ket_from_labels(space, labels)

    couplings = [
        ("001", "D1", om * s6, -delta),
        ("001", "D2", -om * s2, -delta),
        ("100", "D1", om * s6, -delta),
        ("100", "D2", om * s2, -delta),
        ("010", "D1", -2.0 * om * s6, 2.0 * delta),
        ("011", "D4", -om * s2, -delta),
        ("011", "D5", -om * s2, 2.0 * delta),
        ("101", "D3", -om * s2, -delta),
        ("101", "D5", om * s2, -delta),
        ("110", "D3", om * s2, 2.0 * delta),
        ("110", "D4", om * s2, -delta),
    ]
    terms = tuple(
        RotatingTerm(op=ket_bra(q(labels), states[dark]), amplitude=amp, frequency=freq)
        for labels, dark, amp, freq in couplings
    )
    hamiltonian = TimeDependentHamiltonian(space=space, terms=terms)

    ge = params.gamma_e
    decay_table = [
        ("D1", (("001", ge / 12), ("100", ge / 12), ("010", ge / 3), ("000", ge / 2))),
        ("D2", (("001", ge / 4), ("100", ge / 4), ("000", ge / 2))),
        ("D3", (("110", ge / 4), ("101", ge / 4), ("100", ge / 2))),
        ("D4", (("110", ge / 4), ("011", ge / 4), ("010", ge / 2))),
        ("D5", (("101", ge / 4), ("011", ge / 4), ("001", ge / 2))),
    ]
    channels = [
        CollapseChannel(rate, ket_bra(q(labels), states[dark]))
        for dark, targets in decay_table
        for labels, rate in targets
        if rate > 0
    ]
    return hamiltonian, channels


def symmetric_hr_4x4(omega_r: float, delta_cap: float, u: float) -> np.ndarray:
    """The Rydberg block in the symmetric collective basis.

    Basis: {|+++>, |r x1>, |r x2>, |rrr>}, where |r x m> is the normalized
    symmetric state with m atoms in |r> and the rest in |+>.  Valid for
    uniform pair shifts U.
    """
    s6 = np.sqrt(6.0) * omega_r
    s8 = 2.0 * np.sqrt(2.0) * omega_r
    return np.array(
        [
            [0.0, s6, 0.0, 0.0],
            [s6, -delta_cap, s8, 0.0],
            [0.0, s8, u - 2.0 * delta_cap, s6],
            [0.0, 0.0, s6, 3.0 * u - 3.0 * delta_cap],
        ]
    )


@dataclass(frozen=True)
class SymmetricAmplitudes:
    """Amplitudes c0..c3 on the symmetric states with 0..3 atoms in |r>."""

    c0: complex
    c1: complex
    c2: complex
    c3: complex

    @classmethod
    def from_array(cls, arr: Sequence[complex]) -> "SymmetricAmplitudes":
        if len(arr) != 4:
            raise ValueError("need exactly four amplitudes")
        return cls(*(complex(x) for x in arr))

    def as_array(self) -> np.ndarray:
        return np.array([self.c0, self.c1, self.c2, self.c3], dtype=complex)

    def norm_sq(self) -> float:
        return float(np.sum(np.abs(self.as_array()) ** 2))


def amplitude_rhs(state: SymmetricAmplitudes, params: ModelParams) -> SymmetricAmplitudes:
    """d/dt of the symmetric amplitudes, i*dc = H(4x4)c, at the U = Delta point.

    The returned object holds the derivatives (not amplitudes); its norm is
    not 1.  Requires uniform u equal to delta_cap, the regime in which the
    reduced equations hold.
    """
    params.require_g_units()
    scale = max(1.0, abs(params.delta_cap))
    if any(abs(u - params.delta_cap) > 1e-12 * scale for u in params.u):
        raise ValueError("reduced amplitude equations hold at uniform U = Delta")
    h = symmetric_hr_4x4(params.omega_r, params.delta_cap, params.delta_cap)
    dc = -1j * (h @ state.as_array())
    return SymmetricAmplitudes.from_array(dc)


@dataclass(frozen=True)
class AdiabaticElimination:
    """Result of eliminating the singly/doubly excited collective states."""

    omega_eff: float
    hamiltonian: np.ndarray  # 2x2, basis {|+++>, |rrr>}


def adiabatic_eliminate(omega_r: float, delta_cap: float) -> AdiabaticElimination:
    """Effective |+++> <-> |rrr> coupling for Delta >> Omega_r at U = Delta.

    Omega_eff = 12*sqrt(2)*Omega_r^3/Delta^2.  Stark shifts of order
    Omega_r^2/Delta are dropped, matching the convention that they are
    canceled externally (see model.build_stark_compensation for the full
    model's cancellation term).  Warns when Omega_r/Delta > 0.1, where the
    third-order result degrades.
    """
    if delta_cap == 0:
        raise ValueError("adiabatic elimination requires a nonzero detuning")
    ratio = abs(omega_r / delta_cap)
    if ratio > 0.1:
        warnings.warn(
            f"Omega_r/Delta = {ratio:.3g} is outside the adiabatic regime; "
            "the effective coupling is unreliable",
            stacklevel=2,
        )
    omega_eff = 12.0 * np.sqrt(2.0) * omega_r**3 / delta_cap**2
    h2 = np.array([[0.0, omega_eff], [omega_eff, 0.0]])
    return AdiabaticElimination(omega_eff=float(omega_eff), hamiltonian=h2)


def build_effective_full_model(params: ModelParams, frame: str = "static"):
    """The combined reduced model of the whole scheme (returns a LindbladModel).

    Space: {|0>,|1>,|e>,|r>}^3, 64 dimensions, no cavity.  Hamiltonian:
    the Z-pump couplings plus Omega_eff(|+++><rrr| + H.c.).  Channels: the
    16 Z-pump operators plus per-atom |0><r| and |1><r| at gamma_r/2
    (22 channels at positive rates).

    frame="static" (default) keeps the light-shift diagonal explicit and
    all couplings phase-free: a time-independent generator whose steady
    state is well defined.  frame="rotating" moves to the interaction
    picture of that diagonal: the Z-pump couplings carry their conventional
    e^{-i delta t} / e^{+2i delta t} phases and the Rydberg coupling
    splinters into eight components |q><rrr| rotating at the light-shift
    energy of |q>.  The two frames are unitarily equivalent and produce
    identical populations of light-shift eigenstates (GHZ populations
    included); composing phase-carrying Z-pump terms with a phase-free
    Rydberg term would mix frames and is deliberately not expressible.
    """
    from . import dynamics  # runtime import: dynamics depends on this module's types

    if frame not in ("static", "rotating"):
        raise ValueError(f"unknown frame {frame!r}")
    params.require_g_units()
    scale = max(1.0, abs(params.delta_cap))
    if any(abs(u - params.delta_cap) > 1e-12 * scale for u in params.u):
        raise ValueError("the reduced model is derived at uniform U = Delta")

    space = build_space(3, ("0", "1", "e", "r"))
    zpump_h, channels = build_effective_zpump(params, space)
    elim = adiabatic_eliminate(params.omega_r, params.delta_cap)

    states = named_states(space)
    rrr = ket_from_labels(space, "rrr")
    pump_op = ket_bra(states["+++"], rrr)

    if params.gamma_r > 0:
        for i in range(space.n_atoms):
            for lo in ("0", "1"):
                channels.append(
                    CollapseChannel(params.gamma_r / 2, site_dyad(space, i, lo, "r"))
                )

    diagonal = light_shift_diagonal(params, space)
    if frame == "static":
        hamiltonian = SparseOperator(
            space,
            zpump_h.to_static(diagonal).matrix + elim.omega_eff * (
                pump_op.matrix + pump_op.matrix.getH()
            ),
            hermitian_hint=True,
        )
    else:
        energies = diagonal.matrix.diagonal().real
        ryd_terms = []
        for labels in ("000", "001", "010", "011", "100", "101", "110", "111"):
            ket = ket_from_labels(space, labels)
            weight = complex(np.vdot(ket.data, states["+++"].data))
            idx = int(np.nonzero(ket.data)[0][0])
            ryd_terms.append(
                RotatingTerm(
                    op=ket_bra(ket, rrr),
                    amplitude=elim.omega_eff * weight,
                    frequency=float(energies[idx]),
                )
            )
        hamiltonian = TimeDependentHamiltonian(
            space=space, terms=zpump_h.terms + tuple(ryd_terms)
        )
    return dynamics.LindbladModel(
        space=space, hamiltonian=hamiltonian, channels=tuple(channels)
    )
