"""Scenario files: named Hamiltonians, regions, and end-to-end verification.

A scenario file is JSON describing either a chord verification (compute a
separation, evaluate a bound recipe, search for a chord, compare) or a
conformal-factor tracking run. Potentials and contact functions are
referenced by registry name with parameters, so files stay declarative and
runs stay reproducible.

Exact rationals (bound inputs) are written as strings like "3/2"; purely
numerical knobs (steps, tolerances) are plain JSON numbers. Measured
floating quantities are converted to exact rationals before entering the
bounds module, rounding one ulp upward where conservatism matters.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable

import numpy as np

from . import bounds as bnd
from . import dynamics as dyn
from .rationals import parse_rational

__all__ = [
    "Scenario",
    "ScenarioError",
    "ScenarioReport",
    "bundled_scenario_path",
    "bundled_scenario_names",
    "load_scenario",
    "parse_scenario",
    "run_scenario",
]

_SCENARIO_DIR = Path(__file__).parent / "scenarios"


class ScenarioError(ValueError):
    """Malformed scenario file."""


def rational_upper(x: float) -> Fraction:
    """Exact rational at or just above x (one ulp up); for measured sups."""
    return Fraction(math.nextafter(x, math.inf))


def rational_lower(x: float) -> Fraction:
    """Exact rational at or just below x (one ulp down); for measured infs."""
    return Fraction(math.nextafter(x, -math.inf))


# ----------------------------------------------------------------------
# smooth bump and the potential / contact-function registries


def bump_profile(r: np.ndarray) -> np.ndarray:
    """Smooth compactly supported profile: exp(1 - 1/(1-r^2)) for |r| < 1."""
    r = np.asarray(r, dtype=float)
    out = np.zeros(r.shape)
    inside = np.abs(r) < 1.0
    ri = r[inside]
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - ri * ri))
    return out


def bump_profile_deriv(r: np.ndarray) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    out = np.zeros(r.shape)
    inside = np.abs(r) < 1.0
    ri = r[inside]
    denom = (1.0 - ri * ri) ** 2
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - ri * ri)) * (-2.0 * ri / denom)
    return out


def _radial_bump(center, radius: float, amplitude: float):
    """amplitude * profile(|q - center| / radius) and its gradient in q."""
    c = np.asarray(center, dtype=float)

    def value(q: np.ndarray) -> np.ndarray:
        r = np.linalg.norm(np.asarray(q) - c, axis=-1) / radius
        return amplitude * bump_profile(r)

    def grad(q: np.ndarray) -> np.ndarray:
        q = np.asarray(q, dtype=float)
        offset = q - c
        dist = np.linalg.norm(offset, axis=-1)
        r = dist / radius
        scale = amplitude * bump_profile_deriv(r) / radius
        safe = np.where(dist > 0, dist, 1.0)
        return scale[..., None] * offset / safe[..., None]

    return value, grad


def _sum_of_bumps(bumps: list[dict]):
    parts = [
        _radial_bump(b["center"], float(b["radius"]), float(b["amplitude"]))
        for b in bumps
    ]

    def value(q):
        total = parts[0][0](q)
        for v, _ in parts[1:]:
            total = total + v(q)
        return total

    def grad(q):
        total = parts[0][1](q)
        for _, g in parts[1:]:
            total = total + g(q)
        return total

    return value, grad


def _build_potential(config: dict):
    """Return (U, grad_U) callables for a named potential config."""
    name = config.get("name")
    if name == "zero":
        return (
            lambda q: np.zeros(np.asarray(q).shape[:-1]),
            lambda q: np.zeros_like(np.asarray(q, dtype=float)),
        )
    if name == "cosine2d":
        amp = float(config.get("amplitude", 0.3))

        def value(q):
            q = np.asarray(q, dtype=float)
            return amp * np.cos(q[..., 0]) * np.cos(q[..., 1])

        def grad(q):
            q = np.asarray(q, dtype=float)
            out = np.empty_like(q)
            out[..., 0] = -amp * np.sin(q[..., 0]) * np.cos(q[..., 1])
            out[..., 1] = -amp * np.cos(q[..., 0]) * np.sin(q[..., 1])
            return out

        return value, grad
    if name == "bumps":
        return _sum_of_bumps(config["list"])
    raise ScenarioError(f"unknown potential {name!r}")


class PositionContact(dyn.HomogeneousContact):
    """Direction-independent contact function: H(P, q) = |P| * u(q).

    Gradients are analytic: dH/dP = u(q) P/|P| and dH/dq = |P| grad u.
    """

    def __init__(
        self,
        u: Callable[[np.ndarray], np.ndarray],
        grad_u: Callable[[np.ndarray], np.ndarray],
    ):
        object.__setattr__(self, "h", lambda theta, q: u(q))
        object.__setattr__(self, "fd_step", 1e-6)
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "grad_u", grad_u)

    def grads(self, t, p, q):
        p = np.asarray(p, dtype=float)
        q = np.asarray(q, dtype=float)
        norms = np.linalg.norm(p, axis=-1)
        safe = np.where(norms > 0, norms, 1.0)
        dp = self.u(q)[..., None] * p / safe[..., None]
        dq = norms[..., None] * self.grad_u(q)
        return dp, dq


def _build_contact(config: dict) -> dyn.HomogeneousContact:
    name = config.get("name")
    if name == "one":
        return PositionContact(
            u=lambda q: np.ones(np.asarray(q).shape[:-1]),
            grad_u=lambda q: np.zeros_like(np.asarray(q, dtype=float)),
        )
    if name == "bumps":
        value, grad = _sum_of_bumps(config["list"])
        return PositionContact(u=value, grad_u=grad)
    raise ScenarioError(f"unknown contact function {name!r}")


def _build_hamiltonian(config: dict):
    """Build a HamiltonianDef; returns (H, sup_dHdt or None)."""
    family = config.get("family")
    if family == "free":
        return dyn.Free(n=int(config.get("n", 2))), Fraction(0)
    if family == "mechanical":
        value, grad = _build_potential(config["potential"])
        return dyn.Mechanical(potential=value, grad_potential=grad), Fraction(0)
    if family == "homogeneous_contact":
        return _build_contact(config["h"]), None
    if family == "time_periodic":
        base, _ = _build_hamiltonian(config["base"])
        pert = config["perturbation"]
        if pert.get("name") != "sin_bump":
            raise ScenarioError(f"unknown perturbation {pert.get('name')!r}")
        eps = float(parse_rational(pert["epsilon"]))
        gvalue, ggrad = _radial_bump(
            pert["center"], float(pert["radius"]), 1.0
        )
        H = dyn.TimePeriodic(
            base=base,
            perturbation=lambda t, q: eps * math.sin(2 * math.pi * t) * gvalue(q),
            grad_perturbation=lambda t, q: eps * math.sin(2 * math.pi * t) * ggrad(q),
            dpert_dt=lambda t, q: (
                eps * 2 * math.pi * math.cos(2 * math.pi * t) * gvalue(q)
            ),
        )
        # sup over t, q of |dH/dt| = 2 pi eps * sup(bump) = 2 pi eps,
        # rounded up to stay a valid upper bound after float conversion.
        return H, rational_upper(2 * math.pi * eps)
    raise ScenarioError(f"unknown Hamiltonian family {family!r}")


def _build_region(config: dict) -> dyn.RegionDef:
    kind = config.get("kind")
    if kind == "fiber":
        return dyn.FiberSegment(
            x=tuple(float(v) for v in config["x"]),
            s_lo=float(config["s_lo"]),
            s_hi=float(config["s_hi"]),
        )
    if kind == "shell":
        return dyn.MomentumShell(s=float(config["s"]))
    raise ScenarioError(f"unknown region kind {kind!r}")


# ----------------------------------------------------------------------
# scenario objects


@dataclass(frozen=True)
class Scenario:
    name: str
    kind: str  # "chord" or "conformal"
    raw: dict


@dataclass
class ScenarioReport:
    name: str
    kind: str
    passed: bool
    lines: list[str] = field(default_factory=list)
    delta: float | None = None
    bound: bnd.BoundReport | None = None
    chord: dyn.ChordResult | None = None
    maupertuis: dyn.ChordResult | None = None
    check: dyn.BoundCheck | None = None
    ratio: float | None = None

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return "\n".join([f"scenario {self.name}: {status}", *self.lines])


def parse_scenario(text: str) -> Scenario:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}")
    if not isinstance(doc, dict):
        raise ScenarioError("top level must be an object")
    kind = doc.get("kind")
    if kind not in ("chord", "conformal"):
        raise ScenarioError(f"scenario kind must be 'chord' or 'conformal', got {kind!r}")
    name = doc.get("name", "unnamed")
    return Scenario(name=name, kind=kind, raw=doc)


def load_scenario(path: str | Path) -> Scenario:
    return parse_scenario(Path(path).read_text())


def bundled_scenario_names() -> list[str]:
    return sorted(p.stem for p in _SCENARIO_DIR.glob("*.json"))


def bundled_scenario_path(name: str) -> Path:
    path = _SCENARIO_DIR / f"{name}.json"
    if not path.exists():
        known = ", ".join(bundled_scenario_names())
        raise ScenarioError(f"no bundled scenario {name!r}; bundled: {known}")
    return path


# ----------------------------------------------------------------------
# runner


def _eval_bound(recipe: dict, delta_fr: Fraction | None, sup_dHdt: Fraction | None):
    kind = recipe.get("kind")
    if kind in ("autonomous", "timedep") and delta_fr is None:
        raise ScenarioError(f"recipe {kind!r} needs a separation block")
    if kind == "autonomous":
        return bnd.chord_bound_autonomous(
            parse_rational(recipe["l_min"]),
            parse_rational(recipe["s_minus"]),
            parse_rational(recipe["s_plus"]),
            delta_fr,
        )
    if kind == "timedep":
        supval = recipe.get("sup_dHdt")
        sup_fr = parse_rational(supval) if supval is not None else sup_dHdt
        if sup_fr is None:
            raise ScenarioError("time-dependent recipe needs sup_dHdt")
        return bnd.chord_bound_timedep(
            parse_rational(recipe["l_hat"]),
            parse_rational(recipe["s_minus"]),
            parse_rational(recipe["s_plus"]),
            delta_fr,
            parse_rational(recipe["e"]),
            sup_fr,
            parse_rational(recipe["c_min"]),
            parse_rational(recipe["c_max"]),
        )
    if kind == "two_chords":
        return bnd.two_chords_bound(
            parse_rational(recipe["a_len"]),
            parse_rational(recipe["A_len"]),
            parse_rational(recipe["c"]),
            parse_rational(recipe["C"]),
        )
    raise ScenarioError(f"unknown bound recipe {kind!r}")


def _run_chord(sc: Scenario) -> ScenarioReport:
    doc = sc.raw
    report = ScenarioReport(name=sc.name, kind="chord", passed=False)
    H, auto_sup = _build_hamiltonian(doc["hamiltonian"])

    delta_fr: Fraction | None = None
    if "separation" in doc:
        sep = doc["separation"]
        sampling = dyn.SeparationSampling(
            q_center=tuple(float(v) for v in sep["sampling"]["q_center"]),
            q_halfwidth=tuple(float(v) for v in sep["sampling"]["q_halfwidth"]),
            q_per_axis=int(sep["sampling"].get("q_per_axis", 41)),
            directions=int(sep["sampling"].get("directions", 64)),
            radii=int(sep["sampling"].get("radii", 9)),
            t_samples=int(sep["sampling"].get("t_samples", 1)),
        )
        delta = dyn.delta_separation(
            H, _build_region(sep["Y0"]), _build_region(sep["Y1"]), sampling
        )
        report.delta = delta
        report.lines.append(f"measured separation: {delta:.9g}")
        if delta <= 0:
            raise bnd.NotSeparating(
                f"measured separation {delta:.6g} is not positive; search not run"
            )
        # Sampling extrema lie inside the true range, so the measured value
        # can only overestimate the true separation; the resulting bound is
        # then at most the theorem's, keeping the verification strict.
        delta_fr = Fraction(delta)

    bound = _eval_bound(doc["bound"], delta_fr, auto_sup)
    report.bound = bound
    report.lines.append(
        f"bound [{bound.formula_id}]: value="
        + (f"{float(bound.value):.9g}" if bound.value is not None else "n/a")
        + f" applicable={bound.applicable}"
        + (
            f" violated={list(bound.violated_conditions)}"
            if bound.violated_conditions
            else ""
        )
    )
    if not bound.applicable:
        report.passed = True  # the gate verdict itself is the scenario outcome
        report.lines.append("bound not applicable; no chord search attempted")
        return report

    search = doc["search"]
    grid = dyn.ShootingGrid(
        radii=int(search.get("radii", 9)),
        angles=int(search.get("angles", 181)),
        t0_samples=int(search.get("t0_samples", 1)),
        seed=int(search.get("seed", 0)),
    )
    chord = dyn.find_chord(
        H,
        _build_region(doc["source"]),
        _build_region(doc["target"]),
        horizon=float(search["horizon"]),
        grid=grid,
        tol=float(search["tol"]),
        step=float(search.get("step", 1e-3)),
    )
    report.chord = chord
    if not chord.found:
        report.lines.append(chord.message)
        return report
    report.lines.append(
        f"chord found: T={chord.T:.9g} t0={chord.t0:.4g} "
        f"residual={chord.end_residual:.3e}"
    )
    slack = float(doc.get("slack", 0.0))
    check = dyn.verify_bound(chord, bound.value, slack)
    report.check = check
    report.lines.append(
        f"verify: T={check.T:.9g} <= bound {check.bound:.9g}"
        f" * (1 + {check.slack:g}): {'pass' if check.passed else 'fail'}"
    )
    passed = check.passed

    if "maupertuis" in doc:
        mp = doc["maupertuis"]
        value, _ = _build_potential(doc["hamiltonian"]["potential"])
        mp_chord = dyn.maupertuis_chord(
            value,
            float(parse_rational(mp["C"])),
            [float(v) for v in doc["source"]["x"]],
            [float(v) for v in doc["target"]["x"]],
            nodes=int(mp.get("nodes", 33)),
        )
        report.maupertuis = mp_chord
        mp_check = dyn.verify_bound(mp_chord, bound.value, slack)
        agree_tol = float(mp.get("agree_tol", 0.05))
        agreement = abs(mp_chord.T - chord.T) / max(mp_chord.T, chord.T)
        report.lines.append(
            f"fixed-energy chord: T={mp_chord.T:.9g} "
            f"(bound {'pass' if mp_check.passed else 'fail'}; "
            f"disagreement {agreement:.3%})"
        )
        passed = passed and mp_check.passed and agreement <= agree_tol

    report.passed = passed
    return report


def _run_conformal(sc: Scenario) -> ScenarioReport:
    doc = sc.raw
    report = ScenarioReport(name=sc.name, kind="conformal", passed=False)
    H, _ = _build_hamiltonian(doc["hamiltonian"])
    if not isinstance(H, dyn.HomogeneousContact):
        raise ScenarioError("conformal scenarios need a homogeneous_contact family")
    starts = [
        dyn.PhasePoint(np.asarray(s["p"], dtype=float), np.asarray(s["q"], dtype=float))
        for s in doc["starts"]
    ]
    track = doc["track"]
    ratio = dyn.conformal_factor_track(
        H,
        starts,
        horizon=float(track["horizon"]),
        step=float(track["step"]),
        floor=float(track.get("floor", 1e-9)),
    )
    report.ratio = ratio
    report.lines.append(f"max conformal ratio: {ratio:.9g}")
    expect = doc["expect"]
    if expect["kind"] == "exceeds":
        threshold = float(expect["threshold"])
        report.passed = ratio > threshold
        report.lines.append(
            f"threshold {threshold:g}: {'exceeded' if report.passed else 'NOT exceeded'}"
        )
    elif expect["kind"] == "unit":
        tol = float(expect.get("tol", 1e-8))
        report.passed = abs(ratio - 1.0) <= tol
        report.lines.append(
            f"unit ratio within {tol:g}: {'yes' if report.passed else 'no'}"
        )
    else:
        raise ScenarioError(f"unknown expectation {expect['kind']!r}")
    return report


def run_scenario(sc: Scenario) -> ScenarioReport:
    """Execute a parsed scenario and return its report."""
    try:
        if sc.kind == "chord":
            return _run_chord(sc)
        return _run_conformal(sc)
    except KeyError as exc:
        raise ScenarioError(
            f"scenario {sc.name!r} is missing required field {exc.args[0]!r}"
        ) from None
