"""Sparse second-quantized photonic states with coherent-probe phase tags.

A :class:`PhotonicState` is a superposition of occupation configurations.
Each configuration stores one photon count per declared optical mode and one
integer phase index ``k`` per declared coherent probe, standing for the probe
state ``|alpha * exp(i k theta)>``. Probe phases are therefore tracked
symbolically; the simulation is exact for any ``alpha`` and ``theta``.

States are immutable. Every operation returns a new state.
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Iterable, Iterator, Mapping, Sequence
from dataclasses import dataclass
from types import MappingProxyType

import numpy as np

from .errors import NonUnitaryError, RegistryError, ZeroNormError

POLARIZATIONS = ("H", "V")
PRUNE_THRESHOLD = 1e-14
UNITARY_TOL = 1e-12


@dataclass(frozen=True, order=True)
class ModeId:
    """One bosonic mode: a spatial path carrying one polarization."""

    path: str
    pol: str

    def __post_init__(self):
        if self.pol not in POLARIZATIONS:
            raise ValueError(f"polarization must be 'H' or 'V', got {self.pol!r}")

    def __str__(self):
        return f"{self.pol}_{self.path}"


@dataclass(frozen=True)
class ProbeSpec:
    """A coherent probe bus ``|alpha>`` picking up multiples of ``theta``.

    ``alpha * theta`` is only a feasibility diagnostic; nothing in the
    simulation depends on it.
    """

    name: str
    alpha: float = 200.0
    theta: float = 0.01

    def __post_init__(self):
        if self.alpha <= 0 or self.theta <= 0:
            raise ValueError("probe alpha and theta must be positive")

    @property
    def alpha_theta(self) -> float:
        return self.alpha * self.theta


@dataclass(frozen=True, order=True)
class OccupationConfig:
    """Photon counts aligned with the registry modes, probe indices aligned with the probes."""

    occupations: tuple[int, ...]
    probe_phases: tuple[int, ...] = ()

    @property
    def n_photons(self) -> int:
        return sum(self.occupations)


def _modes_for_paths(paths: Iterable[str]) -> tuple[ModeId, ...]:
    return tuple(ModeId(p, pol) for p in paths for pol in POLARIZATIONS)


class PhotonicState:
    """Immutable sparse superposition over :class:`OccupationConfig`.

    Args:
        modes: ordered mode registry; each path must contribute both polarizations.
        probes: ordered probe registry.
        terms: mapping from configuration to complex amplitude.
        prune: amplitudes with magnitude below this are dropped.
    """

    __slots__ = ("_modes", "_probes", "_terms", "_mode_index", "_probe_index")

    def __init__(
        self,
        modes: Sequence[ModeId],
        probes: Sequence[ProbeSpec],
        terms: Mapping[OccupationConfig, complex],
        prune: float = PRUNE_THRESHOLD,
    ):
        self._modes = tuple(modes)
        self._probes = tuple(probes)
        self._mode_index = {m: i for i, m in enumerate(self._modes)}
        self._probe_index = {p.name: i for i, p in enumerate(self._probes)}
        if len(self._mode_index) != len(self._modes):
            raise RegistryError("duplicate mode in registry")
        if len(self._probe_index) != len(self._probes):
            raise RegistryError("duplicate probe in registry")
        kept = {}
        for cfg, amp in terms.items():
            if abs(amp) < prune:
                continue
            if len(cfg.occupations) != len(self._modes) or len(cfg.probe_phases) != len(
                self._probes
            ):
                raise RegistryError("configuration does not match the registry")
            if any(n < 0 for n in cfg.occupations):
                raise ValueError("photon counts must be non-negative")
            kept[cfg] = complex(amp)
        self._terms = MappingProxyType(kept)

    # ------------------------------------------------------------------ access
    @property
    def modes(self) -> tuple[ModeId, ...]:
        return self._modes

    @property
    def probes(self) -> tuple[ProbeSpec, ...]:
        return self._probes

    @property
    def terms(self) -> Mapping[OccupationConfig, complex]:
        return self._terms

    @property
    def paths(self) -> tuple[str, ...]:
        return tuple(dict.fromkeys(m.path for m in self._modes))

    def __len__(self):
        return len(self._terms)

    def __iter__(self) -> Iterator[tuple[OccupationConfig, complex]]:
        return iter(self._terms.items())

    def __repr__(self):
        parts = [f"({amp:.4g}){self.label(cfg)}" for cfg, amp in sorted(self._terms.items())]
        return "PhotonicState(" + " + ".join(parts) + ")"

    def label(self, cfg: OccupationConfig) -> str:
        occ = [
            f"{m}" if n == 1 else f"{m}^{n}"
            for m, n in zip(self._modes, cfg.occupations)
            if n
        ]
        ket = "|" + ",".join(occ) + ">"
        for p, k in zip(self._probes, cfg.probe_phases):
            ket += f"|{p.name}:{k:+d}>"
        return ket

    def mode_index(self, mode: ModeId) -> int:
        try:
            return self._mode_index[mode]
        except KeyError:
            raise RegistryError(f"mode {mode} not declared") from None

    def probe_index(self, name: str) -> int:
        try:
            return self._probe_index[name]
        except KeyError:
            raise RegistryError(f"probe {name!r} not declared") from None

    def probe(self, name: str) -> ProbeSpec:
        return self._probes[self.probe_index(name)]

    def has_path(self, path: str) -> bool:
        return ModeId(path, "H") in self._mode_index

    def require_paths(self, *paths: str) -> None:
        for p in paths:
            if not self.has_path(p):
                raise RegistryError(f"path {p!r} not declared")

    def path_count(self, cfg: OccupationConfig, path: str) -> int:
        return (
            cfg.occupations[self.mode_index(ModeId(path, "H"))]
            + cfg.occupations[self.mode_index(ModeId(path, "V"))]
        )

    def norm(self) -> float:
        return math.sqrt(sum(abs(a) ** 2 for a in self._terms.values()))

    def photon_numbers(self) -> set[int]:
        return {cfg.n_photons for cfg in self._terms}

    def same_registry(self, other: PhotonicState) -> bool:
        return self._modes == other._modes and self._probes == other._probes

    def replace_terms(self, terms: Mapping[OccupationConfig, complex]) -> PhotonicState:
        return PhotonicState(self._modes, self._probes, terms)

    def canonical(self) -> dict[tuple, complex]:
        """Registry-independent view: ``{(mode/count pairs, probe/index pairs): amp}``.

        Zero counts are dropped so two states over different registries can be
        compared term by term.
        """
        out = {}
        for cfg, amp in self._terms.items():
            occ = tuple(
                sorted((m, n) for m, n in zip(self._modes, cfg.occupations) if n)
            )
            ph = tuple(sorted((p.name, k) for p, k in zip(self._probes, cfg.probe_phases)))
            out[(occ, ph)] = out.get((occ, ph), 0) + amp
        return out

    # -------------------------------------------------------- registry changes
    def with_paths(self, paths: Iterable[str]) -> PhotonicState:
        """Declare extra (empty) paths; already-declared paths are ignored."""
        new = [p for p in dict.fromkeys(paths) if not self.has_path(p)]
        if not new:
            return self
        extra = len(new) * 2
        terms = {
            OccupationConfig(cfg.occupations + (0,) * extra, cfg.probe_phases): a
            for cfg, a in self._terms.items()
        }
        return PhotonicState(self._modes + _modes_for_paths(new), self._probes, terms)

    def with_probes(self, probes: Iterable[ProbeSpec]) -> PhotonicState:
        new = [p for p in probes if p.name not in self._probe_index]
        if not new:
            return self
        terms = {
            OccupationConfig(cfg.occupations, cfg.probe_phases + (0,) * len(new)): a
            for cfg, a in self._terms.items()
        }
        return PhotonicState(self._modes, self._probes + tuple(new), terms)


# ---------------------------------------------------------------- construction
def declare_state(
    qubit_assignments: Sequence[tuple[str, Sequence[complex]]],
    probes: Sequence[ProbeSpec] = (),
    tol: float = 1e-9,
) -> PhotonicState:
    """Product state with one photon per path.

    Each assignment is ``(path, (amp_H, amp_V))``. Probe indices start at 0.

    >>> s = declare_state([("a", (0.6, 0.8j))])
    >>> sorted(abs(a) for _, a in s)
    [0.6, 0.8]
    """
    paths = [p for p, _ in qubit_assignments]
    if len(set(paths)) != len(paths):
        raise RegistryError(f"duplicate path in {paths}")
    for path, amps in qubit_assignments:
        if len(amps) != 2:
            raise ValueError(f"path {path!r}: need two polarization amplitudes")
        if abs(sum(abs(a) ** 2 for a in amps) - 1) > tol:
            raise ValueError(f"path {path!r}: amplitudes {amps} are not normalized")
    vec = np.array([1.0 + 0j])
    for _, amps in qubit_assignments:
        vec = np.kron(vec, np.asarray(amps, dtype=complex))
    return logical_state(paths, vec, probes, tol=tol)


def logical_state(
    paths: Sequence[str],
    amplitudes: Sequence[complex],
    probes: Sequence[ProbeSpec] = (),
    tol: float = 1e-9,
) -> PhotonicState:
    """One photon per path with an arbitrary (possibly entangled) polarization state.

    ``amplitudes`` is indexed by the bitstring of polarizations, first path
    most significant, with H = 0 and V = 1.
    """
    amplitudes = np.asarray(amplitudes, dtype=complex)
    n = len(paths)
    if len(set(paths)) != n:
        raise RegistryError(f"duplicate path in {list(paths)}")
    if amplitudes.shape != (2**n,):
        raise ValueError(f"expected {2**n} amplitudes for {n} paths")
    if abs(np.vdot(amplitudes, amplitudes).real - 1) > tol:
        raise ValueError("logical amplitudes are not normalized")
    modes = _modes_for_paths(paths)
    zeros = (0,) * len(probes)
    terms = {}
    for idx, bits in enumerate(itertools.product((0, 1), repeat=n)):
        occ = [0] * (2 * n)
        for j, b in enumerate(bits):
            occ[2 * j + b] = 1
        terms[OccupationConfig(tuple(occ), zeros)] = amplitudes[idx]
    return PhotonicState(modes, probes, terms)


# ------------------------------------------------------------------ operations
def normalize(state: PhotonicState) -> PhotonicState:
    nrm = state.norm()
    if nrm == 0.0 or nrm < PRUNE_THRESHOLD:
        raise ZeroNormError("state has zero norm (impossible post-selection branch)")
    return state.replace_terms({c: a / nrm for c, a in state.terms.items()})


def inner_product(a: PhotonicState, b: PhotonicState) -> complex:
    """``<a|b>``, conjugate-linear in ``a``."""
    if not a.same_registry(b):
        raise RegistryError("inner product of states over different registries")
    total = 0j
    b_terms = b.terms
    for cfg, amp in a.terms.items():
        other = b_terms.get(cfg)
        if other is not None:
            total += amp.conjugate() * other
    return total


def check_unitary(u: np.ndarray, tol: float = UNITARY_TOL) -> np.ndarray:
    u = np.asarray(u, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise NonUnitaryError(f"expected a square matrix, got shape {u.shape}")
    if not np.allclose(u.conj().T @ u, np.eye(u.shape[0]), atol=tol, rtol=0):
        raise NonUnitaryError("matrix is not unitary")
    return u


def apply_mode_unitary(
    state: PhotonicState, modes: Sequence[ModeId], u: np.ndarray
) -> PhotonicState:
    """Linear-optical evolution ``a_i^dag -> sum_j u[j, i] a_j^dag`` on ``modes``.

    Creation operators of every photon in the affected modes are expanded
    explicitly, so multiply-occupied modes get the right ``sqrt(n!)`` factors.
    """
    u = check_unitary(u)
    if len(modes) != u.shape[0]:
        raise ValueError("matrix size does not match the number of modes")
    idx = [state.mode_index(m) for m in modes]
    if len(set(idx)) != len(idx):
        raise ValueError("repeated mode in apply_mode_unitary")

    out: dict[OccupationConfig, complex] = {}
    for cfg, amp in state.terms.items():
        occ = list(cfg.occupations)
        local = [occ[i] for i in idx]
        if not any(local):
            out[cfg] = out.get(cfg, 0) + amp
            continue
        # one entry per photon: the local mode it currently occupies
        photons = [j for j, n in enumerate(local) for _ in range(n)]
        in_norm = math.prod(math.factorial(n) for n in local)
        for i in idx:
            occ[i] = 0
        acc: dict[tuple[int, ...], complex] = {}
        for targets in itertools.product(range(len(idx)), repeat=len(photons)):
            coef = 1 + 0j
            for src, dst in zip(photons, targets):
                coef *= u[dst, src]
                if coef == 0:
                    break
            if coef == 0:
                continue
            key = tuple(sorted(targets))
            acc[key] = acc.get(key, 0) + coef
        for key, coef in acc.items():
            counts = [0] * len(idx)
            for t in key:
                counts[t] += 1
            new = list(occ)
            for i, n in zip(idx, counts):
                new[i] = n
            out_norm = math.prod(math.factorial(n) for n in counts)
            new_cfg = OccupationConfig(tuple(new), cfg.probe_phases)
            out[new_cfg] = out.get(new_cfg, 0) + amp * coef * math.sqrt(out_norm / in_norm)
    return state.replace_terms(out)
