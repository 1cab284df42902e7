"""Independent ground truth for the gate builders.

* textbook gate matrices in the ``H = 0, V = 1`` ordering,
* fidelity of a heralded branch against an ideal output,
* truth tables over computational-basis (and Bell) inputs,
* :func:`enumerate_oracle`, a second simulator sharing no code with the
  sparse engine: it enumerates the full Fock basis up front, stores dense
  amplitude vectors, and evaluates linear optics through matrix permanents.
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Any

import numpy as np

from .errors import NonUnitaryError, OracleLimitError

MAX_CONFIGS = 10**6


# --------------------------------------------------------------- ideal gates
def _is_unitary(u: np.ndarray) -> bool:
    return u.ndim == 2 and u.shape[0] == u.shape[1] and np.allclose(
        u.conj().T @ u, np.eye(u.shape[0]), atol=1e-12
    )


def controlled(u: np.ndarray, n_controls: int = 1) -> np.ndarray:
    """Apply ``u`` to the trailing qubits iff every leading control is 1."""
    d = u.shape[0]
    size = d * 2**n_controls
    out = np.eye(size, dtype=complex)
    out[size - d :, size - d :] = u
    return out


def ideal_gate_matrix(kind: str, inner_unitary=None, n_controls: int = 2) -> np.ndarray:
    """Unitary of the logical gate ``kind`` (first qubit most significant)."""
    x = np.array([[0, 1], [1, 0]], dtype=complex)
    swap = np.eye(4, dtype=complex)[[0, 2, 1, 3]]
    if inner_unitary is not None:
        inner_unitary = np.asarray(inner_unitary, dtype=complex)
        if not _is_unitary(inner_unitary):
            raise NonUnitaryError("inner gate is not unitary")
    if kind == "cnot":
        return controlled(x)
    if kind == "fredkin":
        return controlled(swap)
    if kind == "toffoli":
        return controlled(x, 2)
    if kind == "cu":
        if inner_unitary is None:
            raise ValueError("controlled-U needs an inner unitary")
        return controlled(inner_unitary)
    if kind == "mcu":
        return controlled(x if inner_unitary is None else inner_unitary, n_controls)
    raise ValueError(f"no ideal matrix for {kind!r}")


BELL = {
    "phi-plus": np.array([1, 0, 0, 1]) / math.sqrt(2),
    "phi-minus": np.array([1, 0, 0, -1]) / math.sqrt(2),
    "psi-plus": np.array([0, 1, 1, 0]) / math.sqrt(2),
    "psi-minus": np.array([0, 1, -1, 0]) / math.sqrt(2),
}


def logical_amplitudes(state, basis: Sequence[tuple]) -> np.ndarray:
    """Amplitudes of ``state`` on each configuration of ``basis``.

    ``state`` must have no unmeasured probes left.
    """
    canon = state.canonical()
    out = np.zeros(len(basis), dtype=complex)
    for i, occ in enumerate(basis):
        out[i] = canon.get((occ, ()), 0)
    return out


def logical_fidelity(state, ideal_output, basis: Sequence[tuple]) -> tuple[float, float]:
    """``(|<ideal|simulated>|**2, leakage)`` for a normalized branch state.

    Leakage is the weight outside ``basis``; it counts as infidelity but is
    returned separately so a routing bug is not mistaken for a condition
    violation.
    """
    ideal = np.asarray(ideal_output, dtype=complex)
    ideal = ideal / np.linalg.norm(ideal)
    amps = logical_amplitudes(state, basis)
    inside = float(np.vdot(amps, amps).real)
    total = state.norm() ** 2
    fid = abs(np.vdot(ideal, amps)) ** 2 / total
    return float(min(max(fid, 0.0), 1.0)), float(max(total - inside, 0.0) / total)


@dataclass(frozen=True)
class TruthRow:
    label: str
    probability: float
    fidelity: float
    output: str


def basis_label(index: int, n: int) -> str:
    return format(index, f"0{n}b").replace("0", "H").replace("1", "V")


def truth_table(gate, bell: bool | None = None) -> list[TruthRow]:
    """Run every computational-basis input (and, for Fredkin, control x Bell inputs).

    ``output`` names the most likely accepted logical output.
    """
    n = gate.n_qubits
    inputs: list[tuple[str, np.ndarray]] = []
    for i in range(2**n):
        v = np.zeros(2**n, dtype=complex)
        v[i] = 1
        inputs.append((basis_label(i, n), v))
    if bell is None:
        bell = gate.name == "fredkin"
    if bell and n == 3:
        for c in "HV":
            cv = np.array([1, 0] if c == "H" else [0, 1], dtype=complex)
            for name, b in BELL.items():
                inputs.append((f"{c}*bell:{name}", np.kron(cv, b)))
    rows = []
    for label, vec in inputs:
        report = gate.evaluate(vec)
        acc = report.accepted
        prob = sum(b.probability for b in acc)
        fid = min((b.fidelity for b in acc), default=float("nan"))
        out = "-"
        if acc:
            amps = sum(b.probability * np.abs(logical_amplitudes(b.state, gate.output_basis)) ** 2 for b in acc)
            if gate.output_basis and len(gate.output_basis) == 2**n and np.any(amps):
                out = basis_label(int(np.argmax(amps)), n)
        rows.append(TruthRow(label, prob, fid, out))
    return rows


# ---------------------------------------------------------- dense re-simulation
def permanent(m: np.ndarray) -> complex:
    n = m.shape[0]
    if n == 0:
        return 1.0 + 0j
    total = 0j
    for perm in itertools.permutations(range(n)):
        prod = 1 + 0j
        for i, j in enumerate(perm):
            prod *= m[i, j]
        total += prod
    return total


class _DenseSpace:
    """All occupation tuples with at most ``n_max`` photons, times probe indices."""

    def __init__(self, modes: list[tuple[str, str]], probes: list[str], n_max: int, k_max: list[int]):
        self.modes = modes
        self.probes = probes
        self.k_max = k_max
        occs = []
        for n in range(n_max + 1):
            for combo in itertools.combinations_with_replacement(range(len(modes)), n):
                occ = [0] * len(modes)
                for m in combo:
                    occ[m] += 1
                occs.append(tuple(occ))
        ks = list(itertools.product(*(range(-k, k + 1) for k in k_max)))
        size = len(occs) * len(ks)
        if size > MAX_CONFIGS:
            raise OracleLimitError(f"dense space of {size} configurations exceeds {MAX_CONFIGS}")
        self.basis = [(o, k) for o in occs for k in ks]
        self.index = {b: i for i, b in enumerate(self.basis)}
        self.mode_pos = {m: i for i, m in enumerate(modes)}
        self.probe_pos = {p: i for i, p in enumerate(probes)}

    def __len__(self):
        return len(self.basis)


def _bs(T):
    t, r = math.sqrt(T), 1j * math.sqrt(1 - T)
    return np.array([[t, r], [r, t]])


def _linear(space: _DenseSpace, vec: np.ndarray, modes: list[int], u: np.ndarray) -> np.ndarray:
    """Fock-space action via ``<m|U|n> = perm(U[m, n]) / sqrt(prod n! prod m!)``."""
    out = np.zeros_like(vec)
    for idx in np.flatnonzero(vec):
        occ, ks = space.basis[idx]
        local = [occ[m] for m in modes]
        n_loc = sum(local)
        cols = [j for j, c in enumerate(local) for _ in range(c)]
        for combo in itertools.combinations_with_replacement(range(len(modes)), n_loc):
            rows = list(combo)
            sub = u[np.ix_(rows, cols)] if n_loc else np.zeros((0, 0))
            amp = permanent(sub)
            if amp == 0:
                continue
            counts = [rows.count(j) for j in range(len(modes))]
            norm = math.sqrt(
                math.prod(math.factorial(c) for c in counts) * math.prod(math.factorial(c) for c in local)
            )
            new = list(occ)
            for m, c in zip(modes, counts):
                new[m] = c
            out[space.index[(tuple(new), ks)]] += vec[idx] * amp / norm
    return out


def _path_modes(space, path):
    return [space.mode_pos[(path, "H")], space.mode_pos[(path, "V")]]


def _element(space: _DenseSpace, vec: np.ndarray, kind: str, paths, params) -> np.ndarray:
    params = params or {}
    if kind == "bs":
        u = _bs(params["T"])
        for pol in "HV":
            vec = _linear(space, vec, [space.mode_pos[(paths[0], pol)], space.mode_pos[(paths[1], pol)]], u)
        return vec
    if kind == "pbs":
        return _linear(
            space, vec, [space.mode_pos[(paths[0], "V")], space.mode_pos[(paths[1], "V")]], _bs(0.0)
        )
    if kind in ("hwp", "sigma_x", "waveplate"):
        u = {
            "hwp": np.array([[1, 1], [1, -1]]) / math.sqrt(2),
            "sigma_x": np.array([[0, 1], [1, 0]]),
        }.get(kind)
        if u is None:
            u = np.asarray(params["u"], dtype=complex)
        return _linear(space, vec, _path_modes(space, paths[0]), u)
    if kind == "phase":
        mh, mv = _path_modes(space, paths[0])
        out = vec.copy()
        for idx in np.flatnonzero(vec):
            occ, _ = space.basis[idx]
            out[idx] *= np.exp(1j * params["phi"] * (occ[mh] + occ[mv]))
        return out
    if kind == "kerr":
        mh, mv = _path_modes(space, paths[0])
        p = space.probe_pos[params["probe"]]
        out = np.zeros_like(vec)
        for idx in np.flatnonzero(vec):
            occ, ks = space.basis[idx]
            ks = list(ks)
            ks[p] += params["multiplier"] * (occ[mh] + occ[mv])
            if abs(ks[p]) > space.k_max[p]:
                raise OracleLimitError("probe index outside the enumerated range")
            out[space.index[(occ, tuple(ks))]] += vec[idx]
        return out
    if kind == "switch":
        u = np.array([[0, 1], [1, 0]])
        for pol in "HV":
            vec = _linear(space, vec, [space.mode_pos[(paths[0], pol)], space.mode_pos[(paths[1], pol)]], u)
        return vec
    if kind == "swap_mz":
        for k, prm in (("bs", {"T": 0.5}), ("phase0", None), ("phase1", None), ("bs", {"T": 0.5})):
            if k == "bs":
                vec = _element(space, vec, "bs", paths, prm)
            else:
                vec = _element(space, vec, "phase", [paths[int(k[-1])]], {"phi": -math.pi / 2})
        return vec
    if kind == "logical":
        return _logical(space, vec, paths, np.asarray(params["u"], dtype=complex), params.get("success", 1.0))
    raise ValueError(f"oracle does not know element {kind!r}")


def _logical(space, vec, paths, u, success):
    n = len(paths)
    out = np.zeros_like(vec)
    for idx in np.flatnonzero(vec):
        occ, ks = space.basis[idx]
        pm = [_path_modes(space, p) for p in paths]
        if any(occ[h] + occ[v] != 1 for h, v in pm):
            out[idx] += vec[idx]
            continue
        col = sum(occ[v] << (n - 1 - j) for j, (h, v) in enumerate(pm))
        cleared = list(occ)
        for h, v in pm:
            cleared[h] = cleared[v] = 0
        for row in range(2**n):
            if u[row, col] == 0:
                continue
            new = list(cleared)
            for j, (h, v) in enumerate(pm):
                new[v if (row >> (n - 1 - j)) & 1 else h] = 1
            out[space.index[(tuple(new), ks)]] += vec[idx] * math.sqrt(success) * u[row, col]
        if success < 1:
            new = list(cleared)
            for j, p in enumerate(paths):
                bit = occ[pm[j][1]]
                new[space.mode_pos[(f"{p}.dump", "V" if bit else "H")]] += 1
            out[space.index[(tuple(new), ks)]] += vec[idx] * math.sqrt(1 - success)
    return out


@dataclass
class OracleLeaf:
    record: tuple[tuple[str, Any], ...]
    probability: float
    amplitudes: dict


def _canonical(space, vec, removed_modes, removed_probes):
    out = {}
    for idx in np.flatnonzero(vec):
        occ, ks = space.basis[idx]
        key_occ = tuple(
            sorted(
                ((path, pol), c)
                for (path, pol), c in zip(space.modes, occ)
                if c and (path, pol) not in removed_modes
            )
        )
        key_ph = tuple(sorted((p, k) for p, k in zip(space.probes, ks) if p not in removed_probes))
        out[(key_occ, key_ph)] = out.get((key_occ, key_ph), 0) + vec[idx]
    return out


def enumerate_oracle(circuit, input_state) -> list[OracleLeaf]:
    """Re-simulate ``circuit`` on ``input_state`` densely, without pruning.

    Returns leaves keyed like :func:`kerrgates.circuit.run_circuit` with the
    amplitudes of each normalized branch in a registry-free form
    ``{(((path, pol), count), ...), ((probe, k), ...)): amp}``.
    """
    from .circuit import DetectPolarization, Element, Feedforward, Homodyne, Postselect

    paths = list(dict.fromkeys(list(input_state.paths) + list(circuit.paths())))
    modes = [(p, pol) for p in paths for pol in "HV"]
    probes = list(dict.fromkeys([p.name for p in input_state.probes] + list(circuit.probes)))
    n_max = max(input_state.photon_numbers())

    def kerr_budget(nodes, probe):
        total = 0
        for nd in nodes:
            if isinstance(nd, Element) and nd.kind == "kerr" and nd.params["probe"] == probe:
                total += abs(nd.params["multiplier"])
            elif isinstance(nd, Feedforward):
                total += kerr_budget(nd.apply, probe)
        return total

    k_max = [max(1, kerr_budget(circuit.nodes, p) * n_max) for p in probes]
    space = _DenseSpace(modes, probes, n_max, k_max)

    vec = np.zeros(len(space), dtype=complex)
    for (occ, ph), amp in input_state.canonical().items():
        full = [0] * len(modes)
        for mode, c in occ:
            full[space.mode_pos[(mode.path, mode.pol)]] = c
        ks = [0] * len(probes)
        for name, k in ph:
            ks[space.probe_pos[name]] = k
        vec[space.index[(tuple(full), tuple(ks))]] = amp
    vec = vec / np.linalg.norm(vec)

    # branch = (record, probability, vec, removed modes, removed probes)
    def run(nodes, branches):
        for nd in nodes:
            nxt = []
            for rec, prob, v, rm_modes, rm_probes in branches:
                if isinstance(nd, Element):
                    nxt.append((rec, prob, _element(space, v, nd.kind, nd.paths, nd.params), rm_modes, rm_probes))
                elif isinstance(nd, Homodyne):
                    p = space.probe_pos[nd.probe]
                    classes: dict[int, np.ndarray] = {}
                    for idx in np.flatnonzero(v):
                        occ, ks = space.basis[idx]
                        k = ks[p]
                        ks0 = list(ks)
                        ks0[p] = 0
                        w = classes.setdefault(abs(k), np.zeros_like(v))
                        w[space.index[(occ, tuple(ks0))]] += v[idx]
                    for k in sorted(classes):
                        w = classes[k]
                        pk = float(np.vdot(w, w).real)
                        if pk < 1e-28:
                            continue
                        nxt.append((rec + ((nd.record, k),), prob * pk, w / math.sqrt(pk), rm_modes, rm_probes | {nd.probe}))
                elif isinstance(nd, DetectPolarization):
                    mh, mv = _path_modes(space, nd.path)
                    if nd.basis == "DA":
                        v = _linear(space, v, [mh, mv], np.array([[1, 1], [1, -1]]) / math.sqrt(2))
                        labels = ("D", "A")
                    else:
                        labels = ("H", "V")
                    for label, m in zip(labels, (mh, mv)):
                        w = np.zeros_like(v)
                        for idx in np.flatnonzero(v):
                            occ, ks = space.basis[idx]
                            if occ[m] == 1 and occ[mh] + occ[mv] == 1:
                                new = list(occ)
                                new[m] = 0
                                w[space.index[(tuple(new), ks)]] += v[idx]
                        pk = float(np.vdot(w, w).real)
                        if pk < 1e-28:
                            continue
                        nxt.append((rec + ((nd.record, label),), prob * pk, w / math.sqrt(pk),
                                    rm_modes | {(nd.path, "H"), (nd.path, "V")}, rm_probes))
                elif isinstance(nd, Postselect):
                    groups: dict[tuple, np.ndarray] = {}
                    for idx in np.flatnonzero(v):
                        occ, _ = space.basis[idx]
                        key = tuple(sum(occ[m] for m in _path_modes(space, path)) for path in nd.paths)
                        w = groups.setdefault(key, np.zeros_like(v))
                        w[idx] = v[idx]
                    for key in sorted(groups):
                        w = groups[key]
                        pk = float(np.vdot(w, w).real)
                        if pk < 1e-28:
                            continue
                        nxt.append((rec + ((nd.record, key),), prob * pk, w / math.sqrt(pk), rm_modes, rm_probes))
                elif isinstance(nd, Feedforward):
                    value = dict(rec)[nd.on]
                    hit = value in nd.on_class if isinstance(nd.on_class, frozenset) else value == nd.on_class
                    if hit:
                        nxt.extend(run(nd.apply, [(rec, prob, v, rm_modes, rm_probes)]))
                    else:
                        nxt.append((rec, prob, v, rm_modes, rm_probes))
            branches = nxt
        return branches

    leaves = run(circuit.nodes, [((), 1.0, vec, frozenset(), frozenset())])
    out = [OracleLeaf(rec, prob, _canonical(space, v, rm, rp)) for rec, prob, v, rm, rp in leaves]
    return sorted(out, key=lambda l: tuple((a, repr(b)) for a, b in l.record))


def _engine_canonical(state) -> dict:
    out = {}
    for (occ, ph), amp in state.canonical().items():
        out[(tuple(sorted(((m.path, m.pol), c) for m, c in occ)), ph)] = amp
    return out


def compare_with_engine(engine_leaves, oracle_leaves, tol: float = 1e-12) -> list[str]:
    """Differences between a ``run_circuit`` tree and an oracle tree (empty = agree).

    Branch states are compared up to one global phase per branch.
    """
    problems = []
    eng = {l.record: l for l in engine_leaves}
    orc = {l.record: l for l in oracle_leaves}
    if set(eng) != set(orc):
        missing = set(eng) ^ set(orc)
        for rec in missing:
            p = eng[rec].probability if rec in eng else orc[rec].probability
            if p > tol:
                problems.append(f"branch {rec} present in only one tree (p={p:.3g})")
    for rec in set(eng) & set(orc):
        e, o = eng[rec], orc[rec]
        if abs(e.probability - o.probability) > tol:
            problems.append(f"branch {rec}: probability {e.probability!r} vs {o.probability!r}")
        ea = _engine_canonical(e.state)
        oa = {k: v for k, v in o.amplitudes.items() if abs(v) > tol}
        keys = set(ea) | set(oa)
        overlap = sum(np.conj(ea.get(k, 0)) * oa.get(k, 0) for k in keys)
        phase = overlap / abs(overlap) if abs(overlap) > 0 else 1.0
        worst = max((abs(ea.get(k, 0) * phase - oa.get(k, 0)) for k in keys), default=0.0)
        if worst > tol:
            problems.append(f"branch {rec}: amplitudes differ by {worst:.3g}")
    return problems
