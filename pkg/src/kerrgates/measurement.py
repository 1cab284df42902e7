"""Measurements: X-homodyne on probes, polarization detection, port post-selection."""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
from scipy.special import erfc

from .elements import HADAMARD, require_single_photon
from .errors import ZeroNormError
from .state import ModeId, OccupationConfig, PhotonicState, apply_mode_unitary, normalize


@dataclass(frozen=True)
class HomodyneOutcome:
    """One X-homodyne phase class ``{+k, -k}`` of a probe."""

    probe: str
    k: int
    probability: float
    post_state: PhotonicState

    @property
    def indices(self) -> frozenset[int]:
        return frozenset({self.k, -self.k})

    def class_value(self, theta: float) -> float:
        """The shared ``cos(k theta)`` of the class members."""
        return math.cos(self.k * theta)


def homodyne_x(
    state: PhotonicState, probe: str, rng: np.random.Generator | None = None
) -> list[HomodyneOutcome]:
    """Project a probe onto its X-homodyne phase classes and erase it.

    X quadrature cannot tell ``+k`` from ``-k``, so terms with probe index
    ``k`` and ``-k`` fall in one class. Within a class the two signs are
    merged coherently with no relative phase, which is the ideal
    measurement-conditioned phase correction. Passing ``rng`` instead gives
    the ``-k`` half of each class a uniformly random relative phase.

    Outcomes are sorted by ``k`` (0, 1, 2, ...).
    """
    p = state.probe_index(probe)
    probes = state.probes[:p] + state.probes[p + 1 :]
    buckets: dict[int, dict[OccupationConfig, complex]] = {}
    signs = {}
    if rng is not None:
        for cfg in state.terms:
            k = abs(cfg.probe_phases[p])
            signs.setdefault(k, np.exp(1j * rng.uniform(0, 2 * math.pi)))
    for cfg, amp in state.terms.items():
        k = cfg.probe_phases[p]
        if rng is not None and k < 0:
            amp = amp * signs[-k]
        erased = OccupationConfig(cfg.occupations, cfg.probe_phases[:p] + cfg.probe_phases[p + 1 :])
        bucket = buckets.setdefault(abs(k), {})
        bucket[erased] = bucket.get(erased, 0) + amp
    outcomes = []
    total = state.norm() ** 2
    for k in sorted(buckets):
        branch = PhotonicState(state.modes, probes, buckets[k])
        prob = branch.norm() ** 2 / total
        try:
            post = normalize(branch)
        except ZeroNormError:
            continue
        outcomes.append(HomodyneOutcome(probe, k, prob, post))
    return outcomes


def _drop_path(state: PhotonicState, path: str, terms) -> PhotonicState:
    keep = [i for i, m in enumerate(state.modes) if m.path != path]
    modes = [state.modes[i] for i in keep]
    out = {}
    for cfg, amp in terms.items():
        c = OccupationConfig(tuple(cfg.occupations[i] for i in keep), cfg.probe_phases)
        out[c] = out.get(c, 0) + amp
    return PhotonicState(modes, state.probes, out)


def detect_polarization(
    state: PhotonicState, path: str, basis: str = "HV"
) -> list[tuple[str, float, PhotonicState]]:
    """Destructively measure the polarization of the single photon on ``path``.

    ``basis`` is ``"HV"`` (outcomes ``"H"``, ``"V"``) or ``"DA"`` (diagonal,
    outcomes ``"D"``, ``"A"``). The path is removed from the registry.
    """
    require_single_photon(state, path)
    if basis == "DA":
        state = apply_mode_unitary(state, [ModeId(path, "H"), ModeId(path, "V")], HADAMARD)
        labels = ("D", "A")
    elif basis == "HV":
        labels = ("H", "V")
    else:
        raise ValueError(f"unknown polarization basis {basis!r}")
    total = state.norm() ** 2
    results = []
    for label, pol in zip(labels, ("H", "V")):
        i = state.mode_index(ModeId(path, pol))
        branch = {c: a for c, a in state.terms.items() if c.occupations[i] == 1}
        if not branch:
            continue
        post = _drop_path(state, path, branch)
        prob = post.norm() ** 2 / total
        results.append((label, prob, normalize(post)))
    return results


def postselect_paths(
    state: PhotonicState, paths: Sequence[str]
) -> list[tuple[tuple[int, ...], float, PhotonicState]]:
    """Split by the photon number found in each of ``paths`` (non-destructive).

    This is how a gate's output-port acceptance is modelled: the photons stay
    where they are, the branch just gets a classical label.
    """
    state.require_paths(*paths)
    total = state.norm() ** 2
    groups: dict[tuple[int, ...], dict] = {}
    for cfg, amp in state.terms.items():
        key = tuple(state.path_count(cfg, p) for p in paths)
        groups.setdefault(key, {})[cfg] = amp
    out = []
    for key in sorted(groups):
        branch = state.replace_terms(groups[key])
        out.append((key, branch.norm() ** 2 / total, normalize(branch)))
    return out


def discrimination_error(alpha: float, theta: float, k1: int, k2: int) -> float:
    """Minimum error of telling two probe phase classes apart by X homodyne.

    The X quadrature of ``|alpha exp(i k theta)>`` is Gaussian, centred at
    ``2 alpha cos(k theta)`` with unit variance; for two equiprobable
    Gaussians the error is ``erfc(|delta| / (2 sqrt 2)) / 2``.
    """
    if alpha <= 0 or theta <= 0:
        raise ValueError("alpha and theta must be positive")
    delta = 2 * alpha * (math.cos(k1 * theta) - math.cos(k2 * theta))
    return float(0.5 * erfc(abs(delta) / (2 * math.sqrt(2))))
