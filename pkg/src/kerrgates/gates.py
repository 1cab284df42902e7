"""Builders for the cross-Kerr control gates, plus their closed-form conditions.

Every builder returns a :class:`Gate`: the circuit, how logical qubits map to
input paths and to output configurations, which measurement records count as
success, and the ideal logical map the accepted branches should realize.

Common wiring:

* A control photon on path ``c`` runs through a PBS Mach-Zehnder (H stays on
  ``c``, V detours through ``c.v``). A ``pi`` plate on ``c.v`` cancels the two
  reflection phases so the control qubit itself is untouched.
* A target photon on path ``x`` runs through a BS Mach-Zehnder with arms
  ``x`` (transmitted) and ``x.r`` (reflected); its output port is ``x.r``.
* Cross-Kerr taps on interferometer arms write which-arm information onto a
  probe; X homodyne then heralds the branches where that information is
  erased.
"""

from __future__ import annotations

import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field

import numpy as np

from .circuit import Circuit, DetectPolarization, Element, Feedforward, Homodyne, Leaf, Postselect, run_circuit
from .elements import SIGMA_X, check_unitary
from .oracle import ideal_gate_matrix, logical_fidelity
from .state import ModeId, PhotonicState, ProbeSpec, logical_state

CNOT = ideal_gate_matrix("cnot")
SWAP = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)


# ----------------------------------------------------------------- data types
@dataclass(frozen=True)
class Inner:
    """The operation placed in the U-arms of a controlled gate.

    ``success`` is ``1/p``: the probability the inner device works. A
    ``physical`` inner is the swap interferometer; anything else is inserted as
    a black-box logical gate whose failures leave the logical ports empty.
    """

    name: str
    unitary: np.ndarray
    success: float = 1.0
    physical: str | None = None

    @property
    def p(self) -> float:
        return 1.0 / self.success

    @property
    def n_qubits(self) -> int:
        return int(round(math.log2(self.unitary.shape[0])))

    def nodes(self, paths: Sequence[str], success: float | None = None) -> list:
        if self.physical == "swap_mz":
            return [Element("swap_mz", tuple(paths))]
        s = self.success if success is None else success
        return [Element("logical", tuple(paths), {"u": self.unitary, "success": s})]

    def is_involution(self) -> bool:
        return np.allclose(self.unitary @ self.unitary, np.eye(self.unitary.shape[0]), atol=1e-12)


SWAP_INNER = Inner("swap", SWAP, 1.0, physical="swap_mz")
CNOT_INNER = Inner("cnot", CNOT, 0.5)


def synthetic_inner(unitary, p: float, name: str = "u") -> Inner:
    """Black-box inner gate with success probability ``1/p``."""
    if p < 1:
        raise ValueError("inner success denominator p must be >= 1")
    return Inner(name, check_unitary(unitary), 1.0 / p)


@dataclass(frozen=True)
class Gate:
    name: str
    circuit: Circuit
    input_paths: tuple[str, ...]
    output_basis: tuple[tuple, ...]
    ideal: np.ndarray
    accept: Mapping[str, frozenset]
    transmissivities: tuple[float, ...] = ()
    condition_residual: float = 0.0
    predicted_success: float | None = None

    @property
    def n_qubits(self) -> int:
        return len(self.input_paths)

    def input_state(self, amplitudes, probe: ProbeSpec | None = None) -> PhotonicState:
        return logical_state(self.input_paths, amplitudes)

    def accepts(self, leaf: Leaf) -> bool:
        rec = leaf.outcomes
        return all(rec.get(label) in allowed for label, allowed in self.accept.items())

    def run(self, amplitudes, probe: ProbeSpec | None = None) -> list[Leaf]:
        return run_circuit(self.circuit, self.input_state(amplitudes), probe)

    def evaluate(self, amplitudes, probe: ProbeSpec | None = None) -> GateReport:
        amplitudes = np.asarray(amplitudes, dtype=complex)
        expected = self.ideal @ amplitudes
        branches = []
        for leaf in self.run(amplitudes, probe):
            accepted = self.accepts(leaf)
            fid = leak = None
            if accepted:
                fid, leak = logical_fidelity(leaf.state, expected, self.output_basis)
            branches.append(BranchReport(leaf.record, leaf.probability, accepted, fid, leak, leaf.state))
        return GateReport(self.name, branches, self.condition_residual, self.predicted_success)


@dataclass(frozen=True)
class BranchReport:
    record: tuple
    probability: float
    accepted: bool
    fidelity: float | None
    leakage: float | None
    state: PhotonicState = field(repr=False)


@dataclass(frozen=True)
class GateReport:
    gate: str
    branches: list[BranchReport]
    condition_residual: float
    predicted_success: float | None = None

    @property
    def accepted(self) -> list[BranchReport]:
        return [b for b in self.branches if b.accepted]

    @property
    def success_probability(self) -> float:
        return sum(b.probability for b in self.accepted)

    @property
    def min_fidelity(self) -> float:
        fids = [b.fidelity for b in self.accepted]
        return min(fids) if fids else float("nan")

    def class_probabilities(self, label: str) -> dict:
        out: dict = {}
        for b in self.branches:
            key = dict(b.record).get(label)
            out[key] = out.get(key, 0.0) + b.probability
        return out


# -------------------------------------------------------------------- helpers
def qubit_basis(paths: Sequence[str]) -> tuple[tuple, ...]:
    """Output configurations for one polarization qubit per path, H = 0."""
    basis = []
    for idx in range(2 ** len(paths)):
        bits = format(idx, f"0{len(paths)}b")
        basis.append(
            tuple(sorted((ModeId(p, "V" if b == "1" else "H"), 1) for p, b in zip(paths, bits)))
        )
    return tuple(basis)


def _check_T(*ts: float) -> None:
    for t in ts:
        if not 0.0 <= t <= 1.0:
            raise ValueError(f"transmissivity must lie in [0, 1], got {t}")


def control_mz(c: str, probe: str, h_mult: int = 0, v_mult: int = 0) -> tuple[list, list]:
    """Opening and closing halves of a control photon's PBS Mach-Zehnder."""
    v = f"{c}.v"
    opening = [Element("pbs", (c, v)), Element("phase", (v,), {"phi": math.pi})]
    if h_mult:
        opening.append(Element("kerr", (c,), {"probe": probe, "multiplier": h_mult}))
    if v_mult:
        opening.append(Element("kerr", (v,), {"probe": probe, "multiplier": v_mult}))
    return opening, [Element("pbs", (c, v))]


def _accept(probe_classes: Mapping[str, Sequence], ports: int | None = None, **extra) -> dict:
    out = {label: frozenset(v) for label, v in probe_classes.items()}
    if ports is not None:
        out["ports"] = frozenset({(1,) * ports})
    out.update({k: frozenset(v) for k, v in extra.items()})
    return out


# ------------------------------------------------------------------- C-path
def cpath_nodes(target: str, control: str, s2: str, probe: str, feedforward: bool) -> list:
    """Route the target photon to ``target`` (control H) or ``s2`` (control V)."""
    open_c, close_c = control_mz(control, probe, h_mult=-1)
    nodes = open_c + [
        Element("bs", (target, s2), {"T": 0.5}),
        Element("phase", (s2,), {"phi": -math.pi / 2}),
        Element("kerr", (target,), {"probe": probe, "multiplier": 1}),
        *close_c,
        Homodyne(probe),
    ]
    if feedforward:
        nodes.append(Feedforward(probe, 1, (Element("switch", (target, s2)),)))
    return nodes


def _routed_basis(target: str, s2: str, control: str | None) -> tuple[tuple, ...]:
    basis = []
    for a in "HV":
        for b in "HV":
            path = target if b == "H" else s2
            occ = [(ModeId(path, a), 1)]
            if control is not None:
                occ.append((ModeId(control, b), 1))
            basis.append(tuple(sorted(occ)))
    return tuple(basis)


def cpath_gate(
    feedforward: bool = True, target: str = "S1", control: str = "c", s2: str = "S2", probe: str = "p1"
) -> Gate:
    """Controlled-path gate on ``(target, control)``.

    The target (first qubit) enters on ``target``, which doubles as path S1.
    Output basis index ``ab`` is target polarization ``a`` on S1 if the
    control ``b`` is H, on S2 if V, with the control unchanged; the ideal map
    in that basis is the identity.
    """
    nodes = cpath_nodes(target, control, s2, probe, feedforward)
    return Gate(
        "cpath",
        Circuit(nodes, (probe,)),
        (target, control),
        _routed_basis(target, s2, control),
        np.eye(4, dtype=complex),
        _accept({probe: (0, 1) if feedforward else (0,)}),
        predicted_success=1.0 if feedforward else 0.5,
    )


def povm_transfer(
    feedforward: bool = True,
    cpath_feedforward: bool = True,
    target: str = "S1",
    control: str = "c",
    s2: str = "S2",
    probe: str = "p1",
) -> Gate:
    """Move a two-photon polarization state onto one photon's polarization and path.

    ``feedforward`` controls the ``pi`` correction on S2 after a V detection;
    without it only the H outcome is accepted.
    """
    nodes = cpath_nodes(target, control, s2, probe, cpath_feedforward)
    nodes += [Element("hwp", (control,)), DetectPolarization(control)]
    if feedforward:
        nodes.append(Feedforward(control, "V", (Element("phase", (s2,), {"phi": math.pi}),)))
    success = (1.0 if cpath_feedforward else 0.5) * (1.0 if feedforward else 0.5)
    return Gate(
        "povm",
        Circuit(nodes, (probe,)),
        (target, control),
        _routed_basis(target, s2, None),
        np.eye(4, dtype=complex),
        _accept(
            {probe: (0, 1) if cpath_feedforward else (0,)},
            **{control: ("H", "V") if feedforward else ("H",)},
        ),
        predicted_success=success,
    )


# --------------------------------------------------------------------- CNOT
def cnot_nodes(
    control: str,
    target: str,
    T1: float,
    T2: float,
    probe: str,
    feedforward: bool,
    arm: str | None = None,
) -> tuple[list, str]:
    """CNOT interferometer nodes; returns ``(nodes, target output path)``."""
    _check_T(T1, T2)
    arm = arm or f"{target}.r"
    open_c, close_c = control_mz(control, probe, h_mult=-1)
    nodes = open_c + [
        Element("bs", (target, arm), {"T": T1}),
        Element("sigma_x", (arm,)),
        Element("kerr", (target,), {"probe": probe, "multiplier": 1}),
        Element("bs", (target, arm), {"T": T2}),
        *close_c,
        Homodyne(probe),
    ]
    if feedforward:
        nodes.append(Feedforward(probe, 1, (Element("sigma_x", (arm,)),)))
    return nodes, arm


def cnot_condition_residual(T1: float, T2: float) -> float:
    return abs(math.sqrt(T1 * (1 - T2)) - math.sqrt((1 - T1) * T2))


def cnot_gate(
    T1: float = 0.5,
    T2: float = 0.5,
    feedforward: bool = True,
    control: str = "c",
    target: str = "t",
    probe: str = "p1",
) -> Gate:
    """CNOT; unit fidelity needs ``T1 R2 = R1 T2``, success is then ``2 T1 R2``."""
    nodes, out = cnot_nodes(control, target, T1, T2, probe, feedforward)
    nodes.append(Postselect((control, out)))
    residual = cnot_condition_residual(T1, T2)
    single = T1 * (1 - T2)
    return Gate(
        "cnot",
        Circuit(nodes, (probe,)),
        (control, target),
        qubit_basis((control, out)),
        CNOT,
        _accept({probe: (0, 1) if feedforward else (0,)}, ports=2),
        (T1, T2),
        residual,
        (2 * single if feedforward else single) if residual < 1e-12 else None,
    )


# ------------------------------------------------------ controlled-U family
def _u_arm(target: str, j: int) -> str:
    return f"{target}.r" if j % 2 == 0 else target


def branch_weights(T: Sequence[float]) -> tuple[float, float]:
    """Probabilities of the all-non-U and all-U arm combinations at the output ports."""
    h = v = 1.0
    for j in range(len(T) // 2):
        t_in, t_out = T[2 * j], T[2 * j + 1]
        if j % 2 == 0:
            h *= t_in * (1 - t_out)
            v *= (1 - t_in) * t_out
        else:
            h *= (1 - t_in) * t_out
            v *= t_in * (1 - t_out)
    return h, v


def cu_condition_residual(T: Sequence[float], p: float = 1.0) -> float:
    h, v = branch_weights(T)
    return abs(math.sqrt(h) - math.sqrt(v / p))


def cu_condition(p: float, feedforward: bool = False) -> tuple[float, float]:
    """Balanced transmissivity ``1/(p**0.25 + 1)`` and the success it predicts."""
    if p < 1:
        raise ValueError("p must be >= 1")
    T = 1.0 / (p**0.25 + 1.0)
    success = T**4
    return T, 2 * success if feedforward else success


def balanced_T(p: float) -> tuple[float, float, float, float]:
    """``T1 = R2 = R3 = T4`` at the balance point for inner success ``1/p``."""
    T, _ = cu_condition(p)
    return (T, 1 - T, 1 - T, T)


def controlled_gate(
    inner: Inner,
    T: Sequence[float],
    feedforward: bool = False,
    control: str = "c",
    targets: Sequence[str] = ("a", "b"),
    probe: str = "p1",
    correction: str = "ideal",
    name: str = "cu",
    inner_nodes=None,
) -> Gate:
    """Single-control, shared-probe controlled gate (the Fredkin topology).

    Target ``j`` enters a BS Mach-Zehnder with transmissivities ``T[2j]``,
    ``T[2j+1]``; its U-arm is the reflected arm for even ``j`` and the
    transmitted arm for odd ``j``. Every U-arm carries a ``+1`` Kerr tap and
    the control's V arm carries ``-n``, so the zero class holds (control H, no
    U-arms) and (control V, all U-arms). With feedforward the ``+-n`` class is
    also kept and ``inner`` is applied again on the output ports; that is only
    exact for involutions. ``correction="ideal"`` makes that second copy
    deterministic, ``"heralded"`` gives it the inner success probability.
    """
    n = len(targets)
    if len(T) != 2 * n:
        raise ValueError(f"{name}: need {2 * n} transmissivities, got {len(T)}")
    _check_T(*T)
    if inner.n_qubits != n:
        raise ValueError(f"{name}: inner acts on {inner.n_qubits} qubits, have {n} targets")
    if correction not in ("ideal", "heralded"):
        raise ValueError("correction must be 'ideal' or 'heralded'")
    if feedforward and not inner.is_involution():
        raise ValueError("feedforward correction needs an inner unitary with U @ U = I")

    open_c, close_c = control_mz(control, probe, v_mult=-n)
    nodes = list(open_c)
    for j, t in enumerate(targets):
        nodes.append(Element("bs", (t, f"{t}.r"), {"T": T[2 * j]}))
    u_arms = [_u_arm(t, j) for j, t in enumerate(targets)]
    for arm in u_arms:
        nodes.append(Element("kerr", (arm,), {"probe": probe, "multiplier": 1}))
    nodes.extend(inner_nodes if inner_nodes is not None else inner.nodes(u_arms))
    for j, t in enumerate(targets):
        nodes.append(Element("bs", (t, f"{t}.r"), {"T": T[2 * j + 1]}))
    nodes.extend(close_c)
    nodes.append(Homodyne(probe))
    outputs = [f"{t}.r" for t in targets]
    if feedforward:
        fix_success = 1.0 if correction == "ideal" else inner.success
        nodes.append(Feedforward(probe, n, tuple(inner.nodes(outputs, fix_success))))
    nodes.append(Postselect((control, *outputs)))

    probes = tuple(dict.fromkeys([probe] + [
        nd.params["probe"] for nd in nodes if isinstance(nd, Element) and nd.kind == "kerr"
    ] + [nd.probe for nd in nodes if isinstance(nd, Homodyne)]))
    residual = cu_condition_residual(T, inner.p)
    h, _ = branch_weights(T)
    predicted = None
    if residual < 1e-12:
        predicted = 2 * h if feedforward and correction == "ideal" else h
        if feedforward and correction == "heralded":
            predicted = h * (1 + inner.success)
    return Gate(
        name,
        Circuit(nodes, probes),
        (control, *targets),
        qubit_basis((control, *outputs)),
        ideal_gate_matrix("cu", inner.unitary),
        _accept({probe: (0, n) if feedforward else (0,)}, ports=1 + n),
        tuple(T),
        residual,
        predicted,
    )


def fredkin_gate(
    T1: float = 0.5,
    T2: float = 0.5,
    T3: float = 0.5,
    T4: float = 0.5,
    feedforward: bool = False,
    control: str = "c",
    targets: Sequence[str] = ("a", "b"),
    probe: str = "p1",
) -> Gate:
    """Controlled swap with the Hong-Ou-Mandel swap interferometer as inner element."""
    return controlled_gate(
        SWAP_INNER, (T1, T2, T3, T4), feedforward, control, targets, probe, name="fredkin"
    )


def toffoli_gate(
    T1: float | None = None,
    T2: float | None = None,
    T3: float | None = None,
    T4: float | None = None,
    feedforward: bool = False,
    control: str = "c",
    targets: Sequence[str] = ("a", "b"),
    probe: str = "p1",
    inner: str = "abstract",
    correction: str = "ideal",
) -> Gate:
    """Toffoli: the Fredkin topology with a CNOT between the two U-arms.

    ``inner="abstract"`` uses a CNOT that succeeds with probability 1/2 and
    otherwise loses its photons; transmissivities default to the balance point
    for that. ``inner="kerr"`` embeds the cross-Kerr CNOT with its own probe
    ``p2``. Its ``+-1`` herald only occurs on the control-V branch, so only
    the ``p2 = 0`` outcome is accepted, which makes the inner success 1/4.
    """
    if inner not in ("abstract", "kerr"):
        raise ValueError("inner must be 'abstract' or 'kerr'")
    if inner == "abstract":
        T = balanced_T(2.0) if T1 is None else (T1, T2, T3, T4)
        return controlled_gate(
            CNOT_INNER, T, feedforward, control, targets, probe, correction, name="toffoli"
        )
    if feedforward:
        raise ValueError("the Kerr-CNOT Toffoli variant has no feedforward correction")
    # only the zero class of the inner probe keeps both control branches, and
    # the CNOT lands there with probability 1/4, so the balance point is p = 4
    T = balanced_T(4.0) if T1 is None else (T1, T2, T3, T4)
    a_arm, b_arm = _u_arm(targets[0], 0), _u_arm(targets[1], 1)
    probe2 = "p2" if probe != "p2" else "p3"
    sub, out = cnot_nodes(a_arm, b_arm, 0.5, 0.5, probe2, False, arm=f"{b_arm}.x")
    # the CNOT output port carries a factor i that the control-H branch never sees
    sub += [Element("phase", (out,), {"phi": -math.pi / 2}), Element("switch", (b_arm, out))]
    gate = controlled_gate(
        Inner("kerr-cnot", CNOT, 0.25), T, False, control, targets, probe,
        name="toffoli-kerr", inner_nodes=sub,
    )
    accept = dict(gate.accept)
    accept[probe2] = frozenset({0})
    return Gate(
        gate.name,
        gate.circuit,
        gate.input_paths,
        gate.output_basis,
        gate.ideal,
        accept,
        gate.transmissivities,
        gate.condition_residual,
        gate.predicted_success,
    )


def cu_gate(
    inner: Inner,
    T: Sequence[float] | None = None,
    feedforward: bool = False,
    control: str = "c",
    targets: Sequence[str] | None = None,
    probe: str = "p1",
    correction: str = "ideal",
) -> Gate:
    """Controlled-U for an inner gate of success ``1/p``; balanced by default."""
    n = inner.n_qubits
    if targets is None:
        targets = ("a", "b", "d", "e")[:n]
    if T is None:
        if n != 2:
            raise ValueError("default transmissivities are only defined for two targets")
        T = balanced_T(inner.p)
    return controlled_gate(inner, T, feedforward, control, targets, probe, correction, name="cu")


# ---------------------------------------------------------------------- MCU
def _level_path(target: str, bits: str) -> str:
    stripped = bits.rstrip("0")
    return f"{target}.{stripped}" if stripped else target


def mcu_gate(
    n_controls: int = 2,
    inner: np.ndarray | None = None,
    feedforward: bool = True,
    controls: Sequence[str] | None = None,
    target: str = "t",
    probe_prefix: str = "p",
) -> Gate:
    """Multi-controlled single-qubit U from chained controlled-path stages.

    Stage ``j`` splits every path the target may occupy and routes it by the
    polarization of control ``j`` (one probe per stage, same wiring as the
    controlled-path gate), so after ``n`` stages the target sits in one of
    ``2**n`` paths labelled by the control bits. ``inner`` acts as a wave plate
    on the all-V path and a tree of balanced beam splitters merges the paths
    back into ``target``; each merge keeps one port, so the success is
    ``2**-n`` with feedforward and ``4**-n`` without.
    """
    if n_controls < 1:
        raise ValueError("n_controls must be >= 1")
    u = SIGMA_X if inner is None else check_unitary(inner)
    if u.shape != (2, 2):
        raise ValueError("mcu inner must be a single-qubit unitary")
    controls = tuple(controls or [f"c{j + 1}" for j in range(n_controls)])
    if len(controls) != n_controls:
        raise ValueError("one path name per control is required")
    probes = tuple(f"{probe_prefix}{j + 1}" for j in range(n_controls))

    nodes: list = []
    levels = [""]
    for j, (c, probe) in enumerate(zip(controls, probes)):
        open_c, close_c = control_mz(c, probe, h_mult=-1)
        nodes.extend(open_c)
        for b in levels:
            keep, other = _level_path(target, b + "0"), _level_path(target, b + "1")
            nodes += [
                Element("bs", (keep, other), {"T": 0.5}),
                Element("phase", (other,), {"phi": -math.pi / 2}),
                Element("kerr", (keep,), {"probe": probe, "multiplier": 1}),
            ]
        nodes.extend(close_c)
        nodes.append(Homodyne(probe))
        if feedforward:
            swaps = tuple(
                Element("switch", (_level_path(target, b + "0"), _level_path(target, b + "1")))
                for b in levels
            )
            nodes.append(Feedforward(probe, 1, swaps))
        levels = [b + x for b in levels for x in "01"]

    nodes.append(Element("waveplate", (_level_path(target, "1" * n_controls),), {"u": u}))

    while levels != [""]:
        parents = list(dict.fromkeys(b[:-1] for b in levels))
        for b in parents:
            keep, other = _level_path(target, b + "0"), _level_path(target, b + "1")
            nodes += [
                Element("phase", (other,), {"phi": -math.pi / 2}),
                Element("bs", (keep, other), {"T": 0.5}),
            ]
        levels = parents
    nodes.append(Postselect((*controls, target)))

    per_stage = 0.5 if feedforward else 0.25
    return Gate(
        "mcu",
        Circuit(nodes, probes),
        (*controls, target),
        qubit_basis((*controls, target)),
        ideal_gate_matrix("mcu", u, n_controls=n_controls),
        _accept({p: (0, 1) if feedforward else (0,) for p in probes}, ports=n_controls + 1),
        predicted_success=per_stage**n_controls,
    )


# ------------------------------------------------------------------ GateSpec
GATE_KINDS = ("cpath", "povm", "cnot", "fredkin", "toffoli", "cu", "mcu")
# CNOT's quoted success 2*T1*R2 already counts the corrected +-1 class.
DEFAULT_FEEDFORWARD = {"cnot": True, "mcu": True}


@dataclass(frozen=True)
class GateSpec:
    """Declarative description of a gate, as used by the CLI and JSON loader."""

    kind: str
    transmissivities: tuple[float, ...] = ()
    feedforward: bool | None = None
    inner_success: float = 1.0
    n_controls: int = 2
    probe: str = "p1"

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}; expected one of {GATE_KINDS}")
        expected = {"cnot": 2, "fredkin": 4, "toffoli": 4, "cu": 4}.get(self.kind)
        if self.transmissivities and expected and len(self.transmissivities) != expected:
            raise ValueError(f"{self.kind} takes {expected} transmissivities")
        if self.kind == "cu" and self.inner_success <= 0:
            raise ValueError("inner success must be positive")
        if self.kind == "cu" and 1.0 / self.inner_success < 1:
            raise ValueError("inner success denominator p must be >= 1")

    @property
    def resolved_feedforward(self) -> bool:
        if self.feedforward is None:
            return DEFAULT_FEEDFORWARD.get(self.kind, False)
        return self.feedforward


def build_gate(spec: GateSpec, paths: Sequence[str] | None = None) -> Gate:
    T = tuple(spec.transmissivities)
    ff = spec.resolved_feedforward
    kw = {}
    if spec.kind == "cpath":
        if paths:
            kw = {"target": paths[0], "control": paths[1]}
        return cpath_gate(ff, probe=spec.probe, **kw)
    if spec.kind == "povm":
        if paths:
            kw = {"target": paths[0], "control": paths[1]}
        return povm_transfer(ff, probe=spec.probe, **kw)
    if spec.kind == "cnot":
        if paths:
            kw = {"control": paths[0], "target": paths[1]}
        return cnot_gate(*(T or (0.5, 0.5)), feedforward=ff, probe=spec.probe, **kw)
    if paths:
        kw = {"control": paths[0], "targets": tuple(paths[1:])}
    if spec.kind == "fredkin":
        return fredkin_gate(*(T or (0.5,) * 4), feedforward=ff, probe=spec.probe, **kw)
    if spec.kind == "toffoli":
        return toffoli_gate(*(T or balanced_T(2.0)), feedforward=ff, probe=spec.probe, **kw)
    if spec.kind == "cu":
        p = 1.0 / spec.inner_success
        inner = synthetic_inner(SWAP, p, name=f"swap/p={p:g}")
        return cu_gate(inner, T or None, ff, probe=spec.probe, **kw)
    if paths:
        kw = {"controls": tuple(paths[:-1]), "target": paths[-1]}
    return mcu_gate(spec.n_controls if not paths else len(paths) - 1, feedforward=ff, **kw)


def gate_from_params(paths: Sequence[str], params: Mapping) -> Gate:
    """Expand the JSON ``gate`` shorthand node."""
    spec = GateSpec(
        kind=params["gate"],
        transmissivities=tuple(params.get("T", ())),
        feedforward=params.get("feedforward"),
        inner_success=float(params.get("inner_success", 1.0)),
        n_controls=int(params.get("n_controls", 2)),
        probe=params.get("probe", "p1"),
    )
    return build_gate(spec, paths or None)
