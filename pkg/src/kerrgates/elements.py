"""Optical elements acting on :class:`~kerrgates.state.PhotonicState`.

Phase convention for every beam splitter (including the reflection of a PBS):
transmission amplitude ``sqrt(T)``, reflection amplitude ``i sqrt(R)``.
Paths are always addressed by name; an element on a path acts on both of its
polarization modes unless stated otherwise.
"""

from __future__ import annotations

import math
from collections.abc import Sequence

import numpy as np

from .errors import OccupationError
from .state import ModeId, OccupationConfig, PhotonicState, apply_mode_unitary, check_unitary

HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SWAP_MZ_ARM_PHASE = -math.pi / 2


def mixer(T: float) -> np.ndarray:
    """2x2 beam-splitter matrix with transmissivity ``T``."""
    if not 0.0 <= T <= 1.0:
        raise ValueError(f"transmissivity must lie in [0, 1], got {T}")
    t, r = math.sqrt(T), 1j * math.sqrt(1.0 - T)
    return np.array([[t, r], [r, t]], dtype=complex)


def beam_splitter(state: PhotonicState, path_a: str, path_b: str, T: float) -> PhotonicState:
    """Polarization-independent beam splitter between two paths."""
    state.require_paths(path_a, path_b)
    m = mixer(T)
    for pol in ("H", "V"):
        state = apply_mode_unitary(state, [ModeId(path_a, pol), ModeId(path_b, pol)], m)
    return state


def pbs(state: PhotonicState, path_a: str, path_b: str) -> PhotonicState:
    """Polarizing beam splitter: H is transmitted, V is reflected into the other path."""
    state.require_paths(path_a, path_b)
    return apply_mode_unitary(state, [ModeId(path_a, "V"), ModeId(path_b, "V")], mixer(0.0))


def polarization_unitary(state: PhotonicState, path: str, u: np.ndarray) -> PhotonicState:
    """Wave-plate action ``u`` on the (H, V) modes of one path."""
    state.require_paths(path)
    return apply_mode_unitary(state, [ModeId(path, "H"), ModeId(path, "V")], u)


def hwp_hadamard(state: PhotonicState, path: str) -> PhotonicState:
    """Half-wave plate at 22.5 degrees."""
    return polarization_unitary(state, path, HADAMARD)


def sigma_x(state: PhotonicState, path: str) -> PhotonicState:
    return polarization_unitary(state, path, SIGMA_X)


def phase_shift(state: PhotonicState, path: str, phi: float) -> PhotonicState:
    """Every photon on ``path`` picks up ``exp(i phi)``."""
    state.require_paths(path)
    if phi == 0:
        return state
    out = {}
    for cfg, amp in state.terms.items():
        n = state.path_count(cfg, path)
        out[cfg] = amp * np.exp(1j * n * phi) if n else amp
    return state.replace_terms(out)


def cross_kerr(state: PhotonicState, path: str, probe: str, multiplier: int) -> PhotonicState:
    """Probe phase index grows by ``multiplier`` per photon on ``path``."""
    state.require_paths(path)
    if int(multiplier) != multiplier:
        raise ValueError("cross-Kerr multiplier must be an integer")
    p = state.probe_index(probe)
    out = {}
    for cfg, amp in state.terms.items():
        n = state.path_count(cfg, path)
        if n:
            ph = list(cfg.probe_phases)
            ph[p] += int(multiplier) * n
            cfg = OccupationConfig(cfg.occupations, tuple(ph))
        out[cfg] = out.get(cfg, 0) + amp
    return state.replace_terms(out)


def swap_mz_primitives(path_a: str, path_b: str) -> list[tuple[str, tuple[str, ...], dict]]:
    """The swap interferometer as primitive (kind, paths, params) steps.

    Under the symmetric beam-splitter convention a balanced Mach-Zehnder with
    equal arms already exchanges its ports up to a factor ``i`` per photon;
    a ``-pi/2`` delay on both arms removes that factor, so the composite is the
    bare path exchange.
    """
    return [
        ("bs", (path_a, path_b), {"T": 0.5}),
        ("phase", (path_a,), {"phi": SWAP_MZ_ARM_PHASE}),
        ("phase", (path_b,), {"phi": SWAP_MZ_ARM_PHASE}),
        ("bs", (path_a, path_b), {"T": 0.5}),
    ]


def swap_mz(state: PhotonicState, path_a: str, path_b: str) -> PhotonicState:
    """Hong-Ou-Mandel swap interferometer between two paths."""
    state.require_paths(path_a, path_b)
    for kind, paths, params in swap_mz_primitives(path_a, path_b):
        state = apply_element(state, kind, paths, params)
    return state


def path_switch(state: PhotonicState, path_a: str, path_b: str) -> PhotonicState:
    """Relabel path ``a`` as ``b`` and vice versa, no phase."""
    state.require_paths(path_a, path_b)
    ia = [state.mode_index(ModeId(path_a, pol)) for pol in ("H", "V")]
    ib = [state.mode_index(ModeId(path_b, pol)) for pol in ("H", "V")]
    out = {}
    for cfg, amp in state.terms.items():
        occ = list(cfg.occupations)
        for i, j in zip(ia, ib):
            occ[i], occ[j] = occ[j], occ[i]
        out[OccupationConfig(tuple(occ), cfg.probe_phases)] = amp
    return state.replace_terms(out)


def dump_path(path: str) -> str:
    return f"{path}.dump"


def logical_gate(
    state: PhotonicState, paths: Sequence[str], u: np.ndarray, success: float = 1.0
) -> PhotonicState:
    """Black-box gate on the polarization qubits carried by ``paths``.

    Acts only on terms where each of ``paths`` holds exactly one photon: the
    logical unitary ``u`` is applied with amplitude ``sqrt(success)`` and the
    remaining amplitude sends the photons, unchanged, into the ``.dump``
    companion paths. Terms with any other occupation pass untouched, so the
    map is an isometry and the failure is only visible as missing photons.
    """
    paths = list(paths)
    n = len(paths)
    u = check_unitary(u)
    if u.shape != (2**n, 2**n):
        raise ValueError(f"logical gate on {n} paths needs a {2**n}x{2**n} matrix")
    if not 0.0 < success <= 1.0:
        raise ValueError("logical gate success probability must lie in (0, 1]")
    state.require_paths(*paths)
    if success < 1.0:
        state.require_paths(*(dump_path(p) for p in paths))
    h_idx = [state.mode_index(ModeId(p, "H")) for p in paths]
    v_idx = [state.mode_index(ModeId(p, "V")) for p in paths]
    keep = math.sqrt(success)
    lose = math.sqrt(1.0 - success)
    out: dict[OccupationConfig, complex] = {}

    def add(cfg, amp):
        out[cfg] = out.get(cfg, 0) + amp

    for cfg, amp in state.terms.items():
        occ = cfg.occupations
        if any(occ[h] + occ[v] != 1 for h, v in zip(h_idx, v_idx)):
            add(cfg, amp)
            continue
        bits = [occ[v] for v in v_idx]
        col = int("".join(map(str, bits)), 2) if n else 0
        base = list(occ)
        for h, v in zip(h_idx, v_idx):
            base[h] = base[v] = 0
        for row in np.flatnonzero(u[:, col]):
            new = list(base)
            for j, b in enumerate(format(row, f"0{n}b")):
                new[v_idx[j] if b == "1" else h_idx[j]] = 1
            add(OccupationConfig(tuple(new), cfg.probe_phases), amp * keep * u[row, col])
        if lose:
            new = list(base)
            for p, b in zip(paths, bits):
                new[state.mode_index(ModeId(dump_path(p), "V" if b else "H"))] += 1
            add(OccupationConfig(tuple(new), cfg.probe_phases), amp * lose)
    return state.replace_terms(out)


def _as_matrix(u) -> np.ndarray:
    if isinstance(u, np.ndarray):
        return u.astype(complex)
    return np.array([[complex(*x) if isinstance(x, (list, tuple)) else x for x in row] for row in u])


def apply_element(state: PhotonicState, kind: str, paths: Sequence[str], params) -> PhotonicState:
    """Dispatch on an element kind name, as stored in a circuit."""
    params = params or {}
    if kind == "bs":
        return beam_splitter(state, paths[0], paths[1], params["T"])
    if kind == "pbs":
        return pbs(state, paths[0], paths[1])
    if kind == "hwp":
        return hwp_hadamard(state, paths[0])
    if kind == "sigma_x":
        return sigma_x(state, paths[0])
    if kind == "waveplate":
        return polarization_unitary(state, paths[0], _as_matrix(params["u"]))
    if kind == "phase":
        return phase_shift(state, paths[0], params["phi"])
    if kind == "kerr":
        return cross_kerr(state, paths[0], params["probe"], params["multiplier"])
    if kind == "swap_mz":
        return swap_mz(state, paths[0], paths[1])
    if kind == "switch":
        return path_switch(state, paths[0], paths[1])
    if kind == "logical":
        return logical_gate(state, paths, _as_matrix(params["u"]), params.get("success", 1.0))
    raise ValueError(f"unknown element kind {kind!r}")


ELEMENT_KINDS = (
    "bs",
    "pbs",
    "hwp",
    "sigma_x",
    "waveplate",
    "phase",
    "kerr",
    "swap_mz",
    "switch",
    "logical",
)


def require_single_photon(state: PhotonicState, path: str) -> None:
    for cfg in state.terms:
        if state.path_count(cfg, path) != 1:
            raise OccupationError(f"path {path!r} does not hold exactly one photon in every term")
