"""Hamiltonians, collapse channels, and named states of the preparation scheme.

Builds the two Hamiltonian blocks acting on three four-level atoms
{|0>, |1>, |e>, |r>} coupled to one cavity mode,

    H_k = sum_i [ Omega |e>_ii<1| + g_i |e>_ii<0| a + H.c. + delta_i |1>_ii<1| ]
    H_r = sum_i [ Omega_r |r>_ii<0| + Omega_r |r>_ii<1| + H.c. - Delta |r>_ii<r| ]
          + sum_{i<j} U_ij |rr>_ij<rr|

together with the Lindblad collapse channels: atomic emission out of |e>
(rate gamma_e/2 into each of |0>, |1>), out of |r> (gamma_r/2 each), and
cavity leakage a at kappa.  Internal computation is always in g-units
(reference coupling g = 1); parameter sets quoted in 2*pi*MHz are converted
once at the configuration layer.

H_r as written carries an uncanceled second-order light shift
2*Omega_r^2/Delta on each atom's |+> state; the scheme assumes that shift
is compensated (in the lab, via ancillary levels).  build_stark_compensation
returns the cancellation term, and the scenario layer adds it to the full
model by default.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, replace
from typing import Dict, List, Sequence, Tuple

import numpy as np

from .hilbert import (
    DensityMatrix,
    SparseOperator,
    SpaceSpec,
    StateVector,
    cavity_annihilation,
    ket_from_labels,
    site_dyad,
)

__all__ = [
    "G_UNITS",
    "MHZ_2PI",
    "ModelParams",
    "CollapseChannel",
    "build_hk",
    "build_hr",
    "build_stark_compensation",
    "build_collapse_channels",
    "rydberg_u_from_geometry",
    "named_states",
]

#: Units tag: frequencies and rates in units of the reference coupling g.
G_UNITS = "g-units"
#: Units tag: frequencies and rates in 2*pi*MHz (lab units).
MHZ_2PI = "MHz×2π"

_PAIRS = ((0, 1), (0, 2), (1, 2))


@dataclass(frozen=True)
class ModelParams:
    """Physical parameters of the full model.

    Parameters
    ----------
    g : tuple of 3 floats
        Per-atom cavity couplings g_1, g_2, g_3.
    omega : float
        Classical Rabi frequency Omega driving |1> <-> |e>.
    delta : tuple of 3 floats
        Light shifts delta_1, delta_2, delta_3 on |1> (signs allowed).
    omega_r : float
        Rydberg Rabi frequency Omega_r driving |0>,|1> <-> |r>.
    delta_cap : float
        Rydberg detuning Delta.
    u : tuple of 3 floats
        Pairwise Rydberg interaction shifts U_12, U_13, U_23.
    gamma_e, gamma_r : float
        Total spontaneous emission rates of |e> and |r> (branching 50/50).
    kappa : float
        Cavity decay rate.
    units : str
        Either "g-units" or "MHz×2π"; instances with different tags must
        never be mixed.
    """

    g: Tuple[float, float, float] = (1.0, 1.0, 1.0)
    omega: float = 0.0
    delta: Tuple[float, float, float] = (0.0, 0.0, 0.0)
    omega_r: float = 0.0
    delta_cap: float = 0.0
    u: Tuple[float, float, float] = (0.0, 0.0, 0.0)
    gamma_e: float = 0.0
    gamma_r: float = 0.0
    kappa: float = 0.0
    units: str = G_UNITS

    def __post_init__(self):
        object.__setattr__(self, "g", tuple(float(x) for x in self.g))
        object.__setattr__(self, "delta", tuple(float(x) for x in self.delta))
        object.__setattr__(self, "u", tuple(float(x) for x in self.u))
        if len(self.g) != 3 or len(self.delta) != 3 or len(self.u) != 3:
            raise ValueError("g, delta, and u must each have three entries")
        for name in ("gamma_e", "gamma_r", "kappa"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")
        if self.units not in (G_UNITS, MHZ_2PI):
            raise ValueError(f"unknown units tag {self.units!r}")

    def require_g_units(self) -> None:
        """Raise unless the instance is tagged g-units (mixing guard)."""
        if self.units != G_UNITS:
            raise ValueError(
                f"parameters tagged {self.units!r} passed where {G_UNITS!r} required; "
                "convert with to_g_units first"
            )

    def to_g_units(self, g_ref: float = None) -> "ModelParams":
        """Convert a lab-units instance to g-units.

        Parameters
        ----------
        g_ref : float, optional
            Reference coupling in 2*pi*MHz.  Defaults to g_1.

        Returns
        -------
        ModelParams
            All frequencies and rates divided by g_ref, tagged g-units.
        """
        if self.units == G_UNITS:
            return self
        ref = float(g_ref) if g_ref is not None else self.g[0]
        if ref <= 0:
            raise ValueError("reference coupling must be positive")
        s = 1.0 / ref
        return ModelParams(
            g=tuple(x * s for x in self.g),
            omega=self.omega * s,
            delta=tuple(x * s for x in self.delta),
            omega_r=self.omega_r * s,
            delta_cap=self.delta_cap * s,
            u=tuple(x * s for x in self.u),
            gamma_e=self.gamma_e * s,
            gamma_r=self.gamma_r * s,
            kappa=self.kappa * s,
            units=G_UNITS,
        )

    def with_updates(self, **kwargs) -> "ModelParams":
        return replace(self, **kwargs)


@dataclass(frozen=True)
class CollapseChannel:
    """One Lindblad channel: jump operator `op` applied at rate `rate`.

    The rate is factored out, so the dissipator contribution is
    rate * (c rho c^dag - {c^dag c, rho}/2) with c = op.
    """

    rate: float
    op: SparseOperator

    def __post_init__(self):
        if self.rate < 0:
            raise ValueError(f"channel rate must be nonnegative, got {self.rate}")
        if self.op.nnz == 0:
            raise ValueError("channel jump operator is identically zero")


def _require_levels(space: SpaceSpec, labels: Sequence[str], who: str) -> None:
    missing = [lab for lab in labels if lab not in space.atom_levels]
    if missing:
        raise ValueError(f"{who} needs atomic level(s) {missing}, space has {space.atom_levels}")


def build_hk(params: ModelParams, space: SpaceSpec) -> SparseOperator:
    """The cavity-laser block H_k (Hermitian).

    Requires levels {0, 1, e} and a cavity factor.  Per-atom couplings g_i
    support the unequal-coupling robustness scenarios.
    """
    params.require_g_units()
    _require_levels(space, ("0", "1", "e"), "H_k")
    if not space.has_cavity:
        raise ValueError("H_k needs a cavity factor")
    a = cavity_annihilation(space)
    h = SparseOperator.zero(space)
    for i in range(space.n_atoms):
        drive = params.omega * site_dyad(space, i, "e", "1")
        jc = params.g[i] * (site_dyad(space, i, "e", "0") @ a)
        h = h + drive + drive.dagger() + jc + jc.dagger()
        h = h + params.delta[i % 3] * site_dyad(space, i, "1", "1")
    return SparseOperator(space, h.matrix, hermitian_hint=True)


def build_hr(params: ModelParams, space: SpaceSpec) -> SparseOperator:
    """The Rydberg-laser block H_r (Hermitian).

    Requires level r.  Pairwise shifts U_ij act on every pair with both
    atoms in |r>.
    """
    params.require_g_units()
    _require_levels(space, ("0", "1", "r"), "H_r")
    h = SparseOperator.zero(space)
    for i in range(space.n_atoms):
        drive = params.omega_r * (site_dyad(space, i, "r", "0") + site_dyad(space, i, "r", "1"))
        h = h + drive + drive.dagger()
        h = h - params.delta_cap * site_dyad(space, i, "r", "r")
    for k, (i, j) in enumerate(itertools.combinations(range(space.n_atoms), 2)):
        u = params.u[k % 3]
        h = h + u * (site_dyad(space, i, "r", "r") @ site_dyad(space, j, "r", "r"))
    return SparseOperator(space, h.matrix, hermitian_hint=True)


def build_stark_compensation(params: ModelParams, space: SpaceSpec) -> SparseOperator:
    """Cancellation of the Rydberg drive's second-order light shifts (Hermitian).

    The drive Omega_r (|r><0| + |r><1|) couples only |+> = (|0> + |1>)/sqrt(2)
    to |r>, so at second order in Omega_r/Delta it shifts each atom's |+> up
    and |r> down by s = 2*Omega_r^2/Delta.  Uncompensated, the qubit-sector
    part acts as a transverse field of strength s/2 per atom, which at the
    working parameters is an order of magnitude stronger than the light
    shifts delta_i and destroys the target state.  The scheme assumes the
    shift is canceled (realizable with ancillary dressing levels); this
    builds the cancellation term

        -s * sum_i ( |+>_ii<+| + |r>_ii<r| ).

    Lowering |r> along with |+> keeps the three-atom resonance condition at
    U = Delta exactly: the collective |+++> <-> |rrr> transition retains its
    second-order dressing balance, which compensating |+> alone would break.

    Returns the zero operator when omega_r == 0.
    """
    params.require_g_units()
    if params.omega_r == 0:
        return SparseOperator.zero(space)
    _require_levels(space, ("0", "1", "r"), "the Stark compensation")
    if params.delta_cap == 0:
        raise ValueError("Stark compensation undefined at delta_cap == 0")
    s = 2.0 * params.omega_r ** 2 / params.delta_cap
    h = SparseOperator.zero(space)
    for i in range(space.n_atoms):
        plus = 0.5 * (
            site_dyad(space, i, "0", "0")
            + site_dyad(space, i, "0", "1")
            + site_dyad(space, i, "1", "0")
            + site_dyad(space, i, "1", "1")
        )
        h = h - s * (plus + site_dyad(space, i, "r", "r"))
    return SparseOperator(space, h.matrix, hermitian_hint=True)


def build_collapse_channels(params: ModelParams, space: SpaceSpec) -> List[CollapseChannel]:
    """All collapse channels the space supports; zero-rate channels omitted.

    On the full four-level space with a cavity and all rates positive this
    is exactly 13 channels: per atom |0><e| and |1><e| at gamma_e/2,
    |0><r| and |1><r| at gamma_r/2, plus the cavity mode a at kappa.

    Raises
    ------
    ValueError
        If a positive rate refers to a level or cavity the space lacks
        (silently dropping physics is never correct).
    """
    params.require_g_units()
    chans: List[CollapseChannel] = []
    for decay_from, rate in (("e", params.gamma_e), ("r", params.gamma_r)):
        if rate == 0:
            continue
        if decay_from not in space.atom_levels:
            raise ValueError(
                f"gamma_{decay_from} > 0 but the space has no |{decay_from}> level"
            )
        for i in range(space.n_atoms):
            for lo in ("0", "1"):
                chans.append(CollapseChannel(rate / 2, site_dyad(space, i, lo, decay_from)))
    if params.kappa > 0:
        if not space.has_cavity:
            raise ValueError("kappa > 0 but the space has no cavity factor")
        chans.append(CollapseChannel(params.kappa, cavity_annihilation(space)))
    return chans


def rydberg_u_from_geometry(
    d_coeff: float,
    positions: Sequence[Sequence[float]],
    dipole_axis: Sequence[float],
) -> Dict[Tuple[int, int], float]:
    """Pairwise dipole-dipole shifts U_ij = D (1 - 3 cos^2 theta_ij) / |R_i - R_j|^3.

    Parameters
    ----------
    d_coeff : float
        The dipolar coefficient D with physical constants folded in.
    positions : (n, 3) array-like
        Atom positions; must be pairwise distinct.
    dipole_axis : length-3 array-like
        Quantization axis against which theta_ij is measured.

    Returns
    -------
    dict
        {(i, j): U_ij} for every pair i < j.
    """
    pos = np.asarray(positions, dtype=float)
    axis = np.asarray(dipole_axis, dtype=float)
    nrm = np.linalg.norm(axis)
    if nrm == 0:
        raise ValueError("dipole axis must be nonzero")
    axis = axis / nrm
    out: Dict[Tuple[int, int], float] = {}
    for i, j in itertools.combinations(range(len(pos)), 2):
        r = pos[j] - pos[i]
        dist = np.linalg.norm(r)
        if dist == 0:
            raise ValueError(f"atoms {i} and {j} are coincident")
        cos_t = float(r @ axis) / dist
        out[(i, j)] = d_coeff * (1.0 - 3.0 * cos_t ** 2) / dist ** 3
    return out


def _superpose(space: SpaceSpec, terms: Sequence[Tuple[complex, Sequence[str]]],
               photon: int = 0) -> StateVector:
    v = np.zeros(space.dim, dtype=complex)
    for amp, labels in terms:
        v[space.basis_index(labels, photon)] += amp
    return StateVector(space, v / np.linalg.norm(v))


def named_states(space: SpaceSpec) -> Dict[str, object]:
    """The special states the space can express, keyed by conventional name.

    Keys (availability depends on the space's levels):

    - "GHZ+", "GHZ-": (|000> +/- |111>)/sqrt(2)
    - "+++", "++-", ..., "---": products of |+/-> = (|0> +/- |1>)/sqrt(2)
    - "D1".."D5": the five dark states of the atom-cavity block
    - "E1".."E4": one-excitation eigenstates (needs a cavity with n_max >= 1)
    - "mixed": the fully mixed qubit-sector density matrix, sum |ijk><ijk|/8

    All kets carry photon number 0 except the |000>|1_c> component of E3/E4.
    """
    if space.n_atoms != 3:
        raise ValueError("named states are defined for three atoms")
    states: Dict[str, object] = {}
    have = set(space.atom_levels)

    if {"0", "1"} <= have:
        s2 = 1 / np.sqrt(2)
        states["GHZ+"] = _superpose(space, [(s2, "000"), (s2, "111")])
        states["GHZ-"] = _superpose(space, [(s2, "000"), (-s2, "111")])
        for signs in itertools.product((1, -1), repeat=3):
            terms = []
            for bits in itertools.product("01", repeat=3):
                amp = 1.0
                for s, b in zip(signs, bits):
                    amp *= (s if b == "1" else 1) / np.sqrt(2)
                terms.append((amp, bits))
            key = "".join("+" if s == 1 else "-" for s in signs)
            states[key] = _superpose(space, terms)
        dim_q = space.dim
        rho = np.zeros((dim_q, dim_q), dtype=complex)
        for bits in itertools.product("01", repeat=3):
            k = space.basis_index(bits, 0)
            rho[k, k] = 1 / 8
        states["mixed"] = DensityMatrix(space, rho)

    if {"0", "1", "e"} <= have:
        s2, s6 = 1 / np.sqrt(2), 1 / np.sqrt(6)
        states["D1"] = _superpose(space, [(s6, "e00"), (s6, "00e"), (-2 * s6, "0e0")])
        states["D2"] = _superpose(space, [(s2, "e00"), (-s2, "00e")])
        states["D3"] = _superpose(space, [(s2, "1e0"), (-s2, "10e")])
        states["D4"] = _superpose(space, [(s2, "e10"), (-s2, "01e")])
        states["D5"] = _superpose(space, [(s2, "e01"), (-s2, "0e1")])

    if {"0", "e"} <= have and space.has_cavity and space.cavity_cutoff >= 1:
        s2, s6 = 1 / np.sqrt(2), 1 / np.sqrt(6)
        d = space.dim
        for name, sign in (("E3", 1.0), ("E4", -1.0)):
            v = np.zeros(d, dtype=complex)
            for labels in ("e00", "0e0", "00e"):
                v[space.basis_index(labels, 0)] = s6
            v[space.basis_index("000", 1)] = sign * s2
            states[name] = StateVector(space, v)
        if "D1" in states:
            states["E1"] = states["D1"]
            states["E2"] = states["D2"]
    return states
