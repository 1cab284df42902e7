"""Circuits as data, exhaustive branch evaluation, and the JSON circuit format.

A circuit is an ordered tuple of nodes:

* :class:`Element` - a physical element (see :func:`kerrgates.elements.apply_element`)
* :class:`Homodyne` - X-homodyne of a probe; records ``|k|`` of the phase class
* :class:`DetectPolarization` - destructive polarization measurement of a path
* :class:`Postselect` - records the photon numbers found in a set of paths
* :class:`Feedforward` - sub-circuit applied only when an earlier record matches

Running a circuit never samples: every measurement outcome becomes its own
leaf, weighted by its exact probability.
"""

from __future__ import annotations

import json
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from typing import Any, Union

import numpy as np

from .elements import ELEMENT_KINDS, apply_element, dump_path, swap_mz_primitives
from .errors import CircuitError
from .measurement import detect_polarization, homodyne_x, postselect_paths
from .state import PhotonicState, ProbeSpec, normalize


@dataclass(frozen=True)
class Element:
    kind: str
    paths: tuple[str, ...]
    params: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in ELEMENT_KINDS:
            raise CircuitError(f"unknown element kind {self.kind!r}")
        object.__setattr__(self, "paths", tuple(self.paths))


@dataclass(frozen=True)
class Homodyne:
    probe: str
    label: str | None = None

    @property
    def record(self) -> str:
        return self.label or self.probe


@dataclass(frozen=True)
class DetectPolarization:
    path: str
    basis: str = "HV"
    label: str | None = None

    @property
    def record(self) -> str:
        return self.label or self.path


@dataclass(frozen=True)
class Postselect:
    paths: tuple[str, ...]
    label: str = "ports"

    def __post_init__(self):
        object.__setattr__(self, "paths", tuple(self.paths))

    @property
    def record(self) -> str:
        return self.label


@dataclass(frozen=True)
class Feedforward:
    on: str
    on_class: Any
    apply: tuple["Node", ...]

    def __post_init__(self):
        object.__setattr__(self, "apply", tuple(self.apply))


Node = Union[Element, Homodyne, DetectPolarization, Postselect, Feedforward]
Measurement = (Homodyne, DetectPolarization, Postselect)


@dataclass(frozen=True)
class Circuit:
    nodes: tuple[Node, ...]
    probes: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "probes", tuple(self.probes))
        self.validate()

    def __add__(self, other: Circuit) -> Circuit:
        probes = tuple(dict.fromkeys(self.probes + other.probes))
        return Circuit(self.nodes + other.nodes, probes)

    def validate(self) -> None:
        seen: set[str] = set()

        def walk(nodes):
            for node in nodes:
                if isinstance(node, Feedforward):
                    if node.on not in seen:
                        raise CircuitError(f"feedforward on unknown outcome {node.on!r}")
                    walk(node.apply)
                elif isinstance(node, Measurement):
                    seen.add(node.record)
                elif isinstance(node, Element) and node.kind == "kerr":
                    if node.params["probe"] not in self.probes:
                        raise CircuitError(f"probe {node.params['probe']!r} not declared")

        walk(self.nodes)

    def paths(self) -> tuple[str, ...]:
        """Every path the circuit touches, including logical-gate dump paths."""
        out: dict[str, None] = {}

        def walk(nodes):
            for node in nodes:
                if isinstance(node, Element):
                    out.update(dict.fromkeys(node.paths))
                    if node.kind == "logical" and node.params.get("success", 1.0) < 1.0:
                        out.update(dict.fromkeys(dump_path(p) for p in node.paths))
                elif isinstance(node, DetectPolarization):
                    out[node.path] = None
                elif isinstance(node, Postselect):
                    out.update(dict.fromkeys(node.paths))
                elif isinstance(node, Feedforward):
                    walk(node.apply)

        walk(self.nodes)
        return tuple(out)

    def expanded(self) -> Circuit:
        """Copy with every ``swap_mz`` replaced by its primitive elements."""

        def walk(nodes):
            out = []
            for node in nodes:
                if isinstance(node, Element) and node.kind == "swap_mz":
                    out.extend(Element(k, p, prm) for k, p, prm in swap_mz_primitives(*node.paths))
                elif isinstance(node, Feedforward):
                    out.append(Feedforward(node.on, node.on_class, walk(node.apply)))
                else:
                    out.append(node)
            return tuple(out)

        return Circuit(walk(self.nodes), self.probes)


@dataclass(frozen=True)
class Leaf:
    """One exhaustive outcome branch of a circuit run."""

    record: tuple[tuple[str, Any], ...]
    probability: float
    state: PhotonicState

    @property
    def outcomes(self) -> dict[str, Any]:
        return dict(self.record)


def prepare(circuit: Circuit, state: PhotonicState, probe_defaults: ProbeSpec | None = None):
    """Declare every path and probe the circuit needs on ``state``."""
    state = state.with_paths(circuit.paths())
    base = probe_defaults or ProbeSpec("_")
    missing = [
        ProbeSpec(name, base.alpha, base.theta)
        for name in circuit.probes
        if name not in {p.name for p in state.probes}
    ]
    return state.with_probes(missing)


def _run_nodes(nodes, branches):
    for node in nodes:
        nxt = []
        for record, prob, st in branches:
            if isinstance(node, Element):
                nxt.append((record, prob, apply_element(st, node.kind, node.paths, node.params)))
            elif isinstance(node, Homodyne):
                for out in homodyne_x(st, node.probe):
                    nxt.append((record + ((node.record, out.k),), prob * out.probability, out.post_state))
            elif isinstance(node, DetectPolarization):
                for label, p, post in detect_polarization(st, node.path, node.basis):
                    nxt.append((record + ((node.record, label),), prob * p, post))
            elif isinstance(node, Postselect):
                for key, p, post in postselect_paths(st, node.paths):
                    nxt.append((record + ((node.record, key),), prob * p, post))
            elif isinstance(node, Feedforward):
                outcomes = dict(record)
                if node.on not in outcomes:
                    raise CircuitError(f"feedforward on unknown outcome {node.on!r}")
                if _matches(outcomes[node.on], node.on_class):
                    nxt.extend(_run_nodes(node.apply, [(record, prob, st)]))
                else:
                    nxt.append((record, prob, st))
            else:
                raise CircuitError(f"unknown node {node!r}")
        branches = nxt
    return branches


def _matches(value, wanted) -> bool:
    if isinstance(wanted, frozenset):
        return value in wanted
    return value == wanted


def run_circuit(
    circuit: Circuit, input_state: PhotonicState, probe_defaults: ProbeSpec | None = None
) -> list[Leaf]:
    """Evaluate every outcome branch of ``circuit``; leaves are sorted by record."""
    state = normalize(prepare(circuit, input_state, probe_defaults))
    leaves = _run_nodes(circuit.nodes, [((), 1.0, state)])
    out = [Leaf(rec, p, st) for rec, p, st in leaves]
    return sorted(out, key=lambda leaf: _record_key(leaf.record))


def _record_key(record):
    return tuple((label, repr(value)) for label, value in record)


# ------------------------------------------------------------------------ JSON
def _encode_param(value):
    if isinstance(value, np.ndarray) or (
        isinstance(value, (list, tuple)) and value and isinstance(value[0], (list, tuple, np.ndarray))
    ):
        return [[[complex(x).real, complex(x).imag] for x in row] for row in value]
    if isinstance(value, complex):
        return [value.real, value.imag]
    if isinstance(value, np.generic):
        return value.item()
    return value


def node_to_dict(node: Node) -> dict:
    if isinstance(node, Element):
        return {
            "kind": node.kind,
            "paths": list(node.paths),
            "params": {k: _encode_param(v) for k, v in node.params.items()},
        }
    if isinstance(node, Homodyne):
        d = {"kind": "homodyne", "paths": [], "params": {"probe": node.probe}}
        if node.label:
            d["params"]["label"] = node.label
        return d
    if isinstance(node, DetectPolarization):
        d = {"kind": "detect", "paths": [node.path], "params": {"basis": node.basis}}
        if node.label:
            d["params"]["label"] = node.label
        return d
    if isinstance(node, Postselect):
        return {"kind": "postselect", "paths": list(node.paths), "params": {"label": node.label}}
    if isinstance(node, Feedforward):
        on_class = list(node.on_class) if isinstance(node.on_class, tuple) else node.on_class
        return {
            "kind": "feedforward",
            "on": node.on,
            "on_class": on_class,
            "apply": [node_to_dict(n) for n in node.apply],
        }
    raise CircuitError(f"cannot serialize {node!r}")


def _decode_params(kind: str, params: dict) -> dict:
    params = dict(params)
    if kind in ("waveplate", "logical") and "u" in params:
        params["u"] = np.array([[complex(*x) for x in row] for row in params["u"]])
    return params


def node_from_dict(d: Mapping, where: str = "nodes") -> list[Node]:
    """Decode one JSON node; ``gate`` shorthand expands to several nodes."""
    try:
        kind = d["kind"]
    except (KeyError, TypeError):
        raise CircuitError(f"{where}: node needs a 'kind' field") from None
    paths = tuple(d.get("paths", ()))
    params = d.get("params", {}) or {}
    try:
        if kind == "homodyne":
            return [Homodyne(params["probe"], params.get("label"))]
        if kind == "detect":
            return [DetectPolarization(paths[0], params.get("basis", "HV"), params.get("label"))]
        if kind == "postselect":
            return [Postselect(paths, params.get("label", "ports"))]
        if kind == "feedforward":
            on_class = d["on_class"]
            if isinstance(on_class, list):
                on_class = tuple(on_class)
            apply = []
            for i, sub in enumerate(d.get("apply", [])):
                apply.extend(node_from_dict(sub, f"{where}.apply[{i}]"))
            return [Feedforward(d["on"], on_class, tuple(apply))]
        if kind == "gate":
            from .gates import gate_from_params

            return list(gate_from_params(paths, params).circuit.nodes)
        return [Element(kind, paths, _decode_params(kind, params))]
    except KeyError as exc:
        raise CircuitError(f"{where}: missing field {exc}") from None


def _collect_probes(nodes: Iterable[Node]) -> list[str]:
    out: dict[str, None] = {}
    for node in nodes:
        if isinstance(node, Element) and node.kind == "kerr":
            out[node.params["probe"]] = None
        elif isinstance(node, Homodyne):
            out[node.probe] = None
        elif isinstance(node, Feedforward):
            out.update(dict.fromkeys(_collect_probes(node.apply)))
    return list(out)


def circuit_to_dict(circuit: Circuit) -> dict:
    return {"probes": list(circuit.probes), "nodes": [node_to_dict(n) for n in circuit.nodes]}


def circuit_from_dict(data: Mapping) -> Circuit:
    if not isinstance(data, Mapping) or "nodes" not in data:
        raise CircuitError("circuit document needs a 'nodes' list")
    nodes: list[Node] = []
    for i, d in enumerate(data["nodes"]):
        nodes.extend(node_from_dict(d, f"nodes[{i}]"))
    probes = list(data.get("probes", []))
    for p in _collect_probes(nodes):
        if p not in probes:
            probes.append(p)
    return Circuit(tuple(nodes), tuple(probes))


def dumps(circuit: Circuit, **kwargs) -> str:
    return json.dumps(circuit_to_dict(circuit), **kwargs)


def loads(text: str) -> Circuit:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CircuitError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return circuit_from_dict(data)


def circuits_equal(a: Circuit, b: Circuit) -> bool:
    """Structural equality that tolerates numpy matrices inside params."""
    return circuit_to_dict(a) == circuit_to_dict(b)


def nodes(*items: Node | Sequence[Node]) -> tuple[Node, ...]:
    out: list[Node] = []
    for it in items:
        if isinstance(it, (list, tuple)):
            out.extend(it)
        else:
            out.append(it)
    return tuple(out)
