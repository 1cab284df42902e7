"""Report generation behind the command line: run, sweep, truth table, verify."""

from __future__ import annotations

import csv
import io
import json
import math
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction

import numpy as np

from .circuit import Circuit, circuit_from_dict, run_circuit
from .gates import GateSpec, build_gate, cu_condition, synthetic_inner, SWAP, cu_gate
from .measurement import discrimination_error
from .oracle import BELL, basis_label, compare_with_engine, enumerate_oracle, logical_amplitudes, truth_table
from .state import ProbeSpec, logical_state

DEFAULT_ALPHA = 200.0
DEFAULT_THETA = 0.01


class InputError(ValueError):
    """An input specifier or config value could not be parsed."""


@dataclass(frozen=True)
class RunConfig:
    gate: str | None = None
    circuit: dict | None = None
    transmissivities: tuple[float, ...] = ()
    theta: float = DEFAULT_THETA
    alpha: float = DEFAULT_ALPHA
    feedforward: bool | None = None
    input: str = "random:0"
    format: str = "json"
    seed: int = 0
    inner_success: float = 1.0
    n_controls: int = 2

    def __post_init__(self):
        if (self.gate is None) == (self.circuit is None):
            raise InputError("exactly one of a gate kind or a circuit is required")
        if self.format not in ("json", "csv", "text"):
            raise InputError(f"unknown output format {self.format!r}")

    def gate_spec(self) -> GateSpec:
        try:
            return GateSpec(
                self.gate,
                tuple(self.transmissivities),
                self.feedforward,
                self.inner_success,
                self.n_controls,
            )
        except ValueError as exc:
            raise InputError(str(exc)) from None

    def probe(self) -> ProbeSpec:
        return ProbeSpec("_", self.alpha, self.theta)


# ---------------------------------------------------------------- inputs
_SINGLE = {
    "H": np.array([1, 0]),
    "V": np.array([0, 1]),
    "D": np.array([1, 1]) / math.sqrt(2),
    "A": np.array([1, -1]) / math.sqrt(2),
}


def random_state(n_qubits: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    v = rng.normal(size=2**n_qubits) + 1j * rng.normal(size=2**n_qubits)
    return v / np.linalg.norm(v)


def parse_input(spec: str, n_qubits: int) -> np.ndarray:
    """Logical amplitudes for an input specifier.

    Forms: ``"VH"`` (one letter per qubit from H, V, D, A), ``"bell:psi-minus"``,
    ``"random:<seed>"``, ``"amp:a,b,..."`` (Python complex literals, first
    qubit most significant), ``"bell-control-superposition"``; pieces may be
    joined with ``*`` as a tensor product, e.g. ``"V*bell:psi-minus"``.
    """
    spec = spec.strip()
    if spec == "bell-control-superposition":
        spec = "D*bell:uniform"
    if spec.startswith("random"):
        _, _, seed = spec.partition(":")
        try:
            return random_state(n_qubits, int(seed or 0))
        except ValueError:
            raise InputError(f"input {spec!r}: seed must be an integer") from None
    if spec.startswith("amp:"):
        try:
            vec = np.array([complex(x.replace(" ", "")) for x in spec[4:].split(",")])
        except ValueError as exc:
            raise InputError(f"input {spec!r}: {exc}") from None
        if vec.shape != (2**n_qubits,):
            raise InputError(f"input {spec!r}: need {2**n_qubits} amplitudes for {n_qubits} qubits")
        nrm = np.linalg.norm(vec)
        if nrm == 0:
            raise InputError(f"input {spec!r}: all amplitudes are zero")
        return vec / nrm
    vec = np.array([1.0 + 0j])
    used = 0
    for token in spec.split("*"):
        token = token.strip()
        if token.startswith("bell:"):
            name = token[5:]
            if name == "uniform":
                piece = sum(BELL.values()) / 2
            elif name in BELL:
                piece = BELL[name]
            else:
                raise InputError(f"input {spec!r}: unknown Bell state {name!r}; use {sorted(BELL)}")
            used += 2
        elif token and all(ch in _SINGLE for ch in token):
            piece = np.array([1.0])
            for ch in token:
                piece = np.kron(piece, _SINGLE[ch])
            used += len(token)
        else:
            raise InputError(f"input {spec!r}: cannot parse token {token!r}")
        vec = np.kron(vec, piece)
    if used != n_qubits:
        raise InputError(f"input {spec!r} describes {used} qubits, the gate has {n_qubits}")
    return vec.astype(complex)


# ---------------------------------------------------------------- reports
def as_rational(x: float, tol: float = 1e-12, max_den: int = 4096) -> str | None:
    frac = Fraction(x).limit_denominator(max_den)
    if abs(float(frac) - x) < tol:
        return f"{frac.numerator}/{frac.denominator}" if frac.denominator != 1 else str(frac.numerator)
    return None


def _jsonable(value):
    if isinstance(value, tuple):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.generic):
        return value.item()
    return value


def _probe_diagnostics(records: Sequence[dict], probes: Sequence[str], alpha: float, theta: float) -> dict:
    out = {"alpha": alpha, "theta": theta, "alpha_theta": alpha * theta, "probes": {}}
    for probe in probes:
        classes = sorted({r[probe] for r in records if probe in r})
        errs = {}
        for k in classes:
            if k != 0:
                errs[f"0-{k}"] = discrimination_error(alpha, theta, 0, k)
        out["probes"][probe] = errs
    return out


def run(config: RunConfig) -> dict:
    """Execute one gate (or circuit) on one input and build the report document."""
    if config.circuit is not None:
        return _run_circuit_doc(config)
    gate = build_gate(config.gate_spec())
    amps = parse_input(config.input, gate.n_qubits)
    report = gate.evaluate(amps, config.probe())
    branches = []
    for b in report.branches:
        branches.append(
            {
                "record": {k: _jsonable(v) for k, v in b.record},
                "probability": b.probability,
                "rational": as_rational(b.probability),
                "accepted": b.accepted,
                "fidelity": b.fidelity,
                "leakage": b.leakage,
            }
        )
    output = None
    accepted = report.accepted
    if accepted:
        best = max(accepted, key=lambda b: b.probability)
        vec = logical_amplitudes(best.state, gate.output_basis)
        output = {
            basis_label(i, int(math.log2(len(vec)))): [v.real, v.imag]
            for i, v in enumerate(vec)
            if abs(v) > 1e-12
        }
    success = report.success_probability
    doc = {
        "gate": gate.name,
        "input": config.input,
        "transmissivities": list(gate.transmissivities),
        "feedforward": config.gate_spec().resolved_feedforward,
        "success_probability": success,
        "success_rational": as_rational(success),
        "predicted_success": gate.predicted_success,
        "condition_residual": gate.condition_residual,
        "min_fidelity": None if not accepted else report.min_fidelity,
        "output": output,
        "output_label": _dominant_label(output),
        "branches": branches,
        "diagnostics": _probe_diagnostics(
            [b["record"] for b in branches], gate.circuit.probes, config.alpha, config.theta
        ),
    }
    return doc


def _dominant_label(output: dict | None) -> str | None:
    if not output:
        return None
    label, amp = max(output.items(), key=lambda kv: kv[1][0] ** 2 + kv[1][1] ** 2)
    return label if amp[0] ** 2 + amp[1] ** 2 > 1 - 1e-9 else None


def _run_circuit_doc(config: RunConfig) -> dict:
    circuit = circuit_from_dict(config.circuit)
    inputs = config.circuit.get("inputs")
    if not inputs:
        raise InputError("circuit document needs an 'inputs' list of logical paths")
    amps = parse_input(config.input, len(inputs))
    leaves = run_circuit(circuit, logical_state(inputs, amps), config.probe())
    branches = [
        {
            "record": {k: _jsonable(v) for k, v in leaf.record},
            "probability": leaf.probability,
            "rational": as_rational(leaf.probability),
            "accepted": True,
            "fidelity": None,
            "leakage": None,
        }
        for leaf in leaves
    ]
    return {
        "gate": "circuit",
        "input": config.input,
        "transmissivities": [],
        "feedforward": bool(config.feedforward),
        "success_probability": sum(b["probability"] for b in branches),
        "success_rational": as_rational(sum(b["probability"] for b in branches)),
        "predicted_success": None,
        "condition_residual": 0.0,
        "min_fidelity": None,
        "output": None,
        "output_label": None,
        "branches": branches,
        "diagnostics": _probe_diagnostics(
            [b["record"] for b in branches], circuit.probes, config.alpha, config.theta
        ),
    }


REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": [
        "gate", "input", "transmissivities", "feedforward", "success_probability",
        "success_rational", "predicted_success", "condition_residual", "min_fidelity",
        "output", "output_label", "branches", "diagnostics",
    ],
    "additionalProperties": False,
    "properties": {
        "gate": {"type": "string"},
        "input": {"type": "string"},
        "transmissivities": {"type": "array", "items": {"type": "number", "minimum": 0, "maximum": 1}},
        "feedforward": {"type": "boolean"},
        "success_probability": {"type": "number", "minimum": 0, "maximum": 1.000000001},
        "success_rational": {"type": ["string", "null"]},
        "predicted_success": {"type": ["number", "null"]},
        "condition_residual": {"type": "number", "minimum": 0},
        "min_fidelity": {"type": ["number", "null"]},
        "output": {
            "type": ["object", "null"],
            "additionalProperties": {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
        },
        "output_label": {"type": ["string", "null"]},
        "branches": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["record", "probability", "rational", "accepted", "fidelity", "leakage"],
                "additionalProperties": False,
                "properties": {
                    "record": {"type": "object"},
                    "probability": {"type": "number", "minimum": 0},
                    "rational": {"type": ["string", "null"]},
                    "accepted": {"type": "boolean"},
                    "fidelity": {"type": ["number", "null"]},
                    "leakage": {"type": ["number", "null"]},
                },
            },
        },
        "diagnostics": {
            "type": "object",
            "required": ["alpha", "theta", "alpha_theta", "probes"],
            "properties": {
                "alpha": {"type": "number"},
                "theta": {"type": "number"},
                "alpha_theta": {"type": "number"},
                "probes": {"type": "object", "additionalProperties": {"type": "object"}},
            },
        },
    },
}


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return format(v, ".12g")
    return str(v)


def format_report(doc: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(doc, indent=2)
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["record", "probability", "rational", "accepted", "fidelity", "leakage"])
        for b in doc["branches"]:
            rec = ";".join(f"{k}={v}" for k, v in b["record"].items())
            w.writerow([rec, _fmt(b["probability"]), b["rational"] or "", b["accepted"], _fmt(b["fidelity"]), _fmt(b["leakage"])])
        return buf.getvalue()
    lines = [
        f"gate: {doc['gate']}   input: {doc['input']}   feedforward: {doc['feedforward']}",
        f"success probability: {_fmt(doc['success_probability'])}"
        + (f" ({doc['success_rational']})" if doc["success_rational"] else ""),
        f"condition residual: {_fmt(doc['condition_residual'])}",
        f"min fidelity: {_fmt(doc['min_fidelity'])}",
    ]
    if doc["output_label"]:
        lines.append(f"output: {doc['output_label']}")
    for b in doc["branches"]:
        mark = "*" if b["accepted"] else " "
        rec = " ".join(f"{k}={v}" for k, v in b["record"].items())
        lines.append(f" {mark} {rec:40s} p={_fmt(b['probability'])}")
    diag = doc["diagnostics"]
    lines.append(f"alpha*theta = {_fmt(diag['alpha_theta'])}")
    for probe, errs in diag["probes"].items():
        for pair, e in errs.items():
            lines.append(f"  {probe} classes {pair}: discrimination error {_fmt(e)}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- sweeps
SWEEP_PARAMETERS = ("T", "T1", "T2", "T3", "T4", "p", "alpha", "theta")


def _basis_stats(gate) -> tuple[float, float]:
    succ, fids = [], []
    n = gate.n_qubits
    for i in range(2**n):
        v = np.zeros(2**n, dtype=complex)
        v[i] = 1
        r = gate.evaluate(v)
        succ.append(r.success_probability)
        fids.extend(b.fidelity for b in r.accepted)
    return float(np.mean(succ)), float(min(fids)) if fids else float("nan")


def _sweep_row(config: RunConfig, parameter: str, value: float) -> dict:
    if parameter in ("alpha", "theta"):
        alpha = value if parameter == "alpha" else config.alpha
        theta = value if parameter == "theta" else config.theta
        return {parameter: value, "discrimination_error": discrimination_error(alpha, theta, 0, 1)}
    if parameter == "p":
        ff = bool(config.feedforward)
        T, predicted = cu_condition(value, ff)
        gate = cu_gate(synthetic_inner(SWAP, value), feedforward=ff)
        success, fid = _basis_stats(gate)
        return {
            "p": value,
            "T": T,
            "predicted_success": predicted,
            "success_probability": success,
            "min_fidelity": fid,
            "condition_residual": gate.condition_residual,
        }
    spec = config.gate_spec()
    n_T = {"cnot": 2, "fredkin": 4, "toffoli": 4, "cu": 4}.get(spec.kind)
    if not n_T:
        raise InputError(f"gate {spec.kind!r} has no transmissivities to sweep")
    if parameter == "T":
        T = (value,) * n_T
    else:
        j = int(parameter[1:]) - 1
        if j >= n_T:
            raise InputError(f"{spec.kind} has no {parameter}")
        base = list(spec.transmissivities or build_gate(spec).transmissivities)
        base[j] = value
        T = tuple(base)
    gate = build_gate(replace(spec, transmissivities=T))
    success, fid = _basis_stats(gate)
    return {
        parameter: value,
        "success_probability": success,
        "min_fidelity": fid,
        "condition_residual": gate.condition_residual,
    }


def sweep(config: RunConfig, parameter: str, grid: Sequence[float], workers: int = 4) -> list[dict]:
    """One row per grid point, in grid order."""
    if parameter not in SWEEP_PARAMETERS:
        raise InputError(f"cannot sweep {parameter!r}; choose from {SWEEP_PARAMETERS}")
    grid = list(grid)
    if not grid:
        raise InputError("sweep grid is empty")
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda v: _sweep_row(config, parameter, v), grid))


def format_table(rows: list[dict], fmt: str) -> str:
    if fmt == "json":
        return json.dumps(rows, indent=2)
    cols = list(rows[0])
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        for r in rows:
            w.writerow([_fmt(r[c]) for c in cols])
        return buf.getvalue()
    widths = [max(len(c), 14) for c in cols]
    out = ["  ".join(c.ljust(w) for c, w in zip(cols, widths))]
    for r in rows:
        out.append("  ".join(_fmt(r[c]).ljust(w) for c, w in zip(cols, widths)))
    return "\n".join(out) + "\n"


def truth_table_rows(config: RunConfig) -> list[dict]:
    gate = build_gate(config.gate_spec())
    return [
        {
            "input": row.label,
            "output": row.output,
            "probability": row.probability,
            "rational": as_rational(row.probability) or "",
            "fidelity": row.fidelity,
        }
        for row in truth_table(gate)
    ]


# ---------------------------------------------------------------- verify
VERIFY_SPECS = (
    GateSpec("cpath", feedforward=False),
    GateSpec("cpath", feedforward=True),
    GateSpec("povm", feedforward=True),
    GateSpec("cnot", feedforward=True),
    GateSpec("cnot", (0.3, 0.3), feedforward=True),
    GateSpec("fredkin", feedforward=False),
    GateSpec("fredkin", feedforward=True),
    GateSpec("toffoli", feedforward=True),
    GateSpec("cu", inner_success=0.25),
    GateSpec("mcu", feedforward=True, n_controls=2),
)


@dataclass
class VerifyResult:
    gate: str
    inputs: int
    problems: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.problems


def verify(n_inputs: int = 10, seed: int = 0, specs: Sequence[GateSpec] = VERIFY_SPECS) -> list[VerifyResult]:
    """Oracle equivalence plus unit fidelity for every gate on random inputs."""
    results = []
    for k, spec in enumerate(specs):
        gate = build_gate(spec)
        res = VerifyResult(_verify_name(spec), n_inputs)
        expanded = gate.circuit.expanded()
        for i in range(n_inputs):
            amps = random_state(gate.n_qubits, seed + 1000 * k + i)
            state = gate.input_state(amps)
            leaves = run_circuit(gate.circuit, state)
            res.problems += compare_with_engine(leaves, enumerate_oracle(expanded, state))
            report = gate.evaluate(amps)
            if gate.condition_residual < 1e-12 and report.min_fidelity < 1 - 1e-10:
                res.problems.append(f"input {i}: fidelity {report.min_fidelity}")
        results.append(res)
    return results


def _verify_name(spec: GateSpec) -> str:
    name = spec.kind
    if spec.transmissivities:
        name += "(" + ",".join(f"{t:g}" for t in spec.transmissivities) + ")"
    if spec.kind == "cu":
        name += f"/p={1 / spec.inner_success:g}"
    return name + (" +ff" if spec.resolved_feedforward else "")
