"""Command-line surface.

Every artifact-producing command embeds a run manifest (command, input
digests, parameters, tool version) in its output as comment text, so
identical manifests give byte-identical files. Wall time is measured but
reported on stderr only; embedding it would break that determinism.

Exit codes: 0 success, 2 validation failure, 3 budget or limit, 4 parse
error.
"""

from __future__ import annotations

import functools
import hashlib
import sys
import time
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import click

from . import bounds as bnd
from . import dga, dynamics, lch, models, persistence, scenario, specfile
from .rationals import format_extended, parse_extended, parse_rational
from .render import svg_barcode

try:
    from importlib.metadata import version as _dist_version

    VERSION = _dist_version("artifact")
except Exception:  # not installed; running from a checkout
    VERSION = "0.0.0+local"

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_BUDGET = 3
EXIT_PARSE = 4


@dataclass(frozen=True)
class RunManifest:
    """Deterministic provenance of one command invocation.

    wall_time is filled after the run and is deliberately excluded from
    embed(): two runs with the same manifest must produce identical bytes.
    """

    command: str
    digests: tuple[tuple[str, str], ...]
    parameters: tuple[tuple[str, str], ...]
    version: str
    wall_time: float | None = None

    def embed(self) -> str:
        inputs = ",".join(f"{name}:{digest}" for name, digest in self.digests)
        params = ",".join(f"{k}={v}" for k, v in self.parameters)
        return (
            f"manifest command={self.command} inputs=[{inputs}] "
            f"params=[{params}] version={self.version}"
        )


def _digest(path: str | Path) -> tuple[str, str]:
    data = Path(path).read_bytes()
    return (Path(path).name, hashlib.sha256(data).hexdigest()[:12])


def _manifest(command: str, inputs: list[str | Path], params: dict) -> RunManifest:
    return RunManifest(
        command=command,
        digests=tuple(_digest(p) for p in inputs),
        parameters=tuple(sorted((k, str(v)) for k, v in params.items())),
        version=VERSION,
    )


class _Exit(Exception):
    def __init__(self, code: int, message: str):
        self.code = code
        self.message = message


def _rat(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except ValueError as exc:
        raise _Exit(EXIT_PARSE, f"bad rational {text!r}: {exc}")


def _rat_or_inf(text: str) -> Fraction | None:
    try:
        return parse_extended(text)
    except ValueError as exc:
        raise _Exit(EXIT_PARSE, f"bad value {text!r}: {exc}")


def _command(fn):
    """Map library exceptions to the documented exit codes, time the run."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        t_start = time.perf_counter()
        code = EXIT_OK
        try:
            fn(*args, **kwargs)
        except _Exit as exc:
            click.echo(exc.message, err=True)
            code = exc.code
        except specfile.ParseError as exc:
            click.echo(f"parse error: {exc}", err=True)
            code = EXIT_PARSE
        except scenario.ScenarioError as exc:
            click.echo(f"scenario error: {exc}", err=True)
            code = EXIT_PARSE
        except dga.BudgetExceeded as exc:
            click.echo(f"budget exceeded: {exc}", err=True)
            code = EXIT_BUDGET
        except lch.ValidationFailed as exc:
            click.echo("validation failed:", err=True)
            for line in exc.report.lines():
                click.echo(f"  {line}", err=True)
            code = EXIT_VALIDATION
        except (ValueError, RuntimeError) as exc:
            click.echo(f"{type(exc).__name__}: {exc}", err=True)
            code = EXIT_VALIDATION
        finally:
            elapsed = time.perf_counter() - t_start
            click.echo(f"wall time: {elapsed:.3f}s", err=True)
        sys.exit(code)

    return wrapper


def _emit(text: str, out: str | None) -> None:
    if out is None:
        click.echo(text, nl=False)
    else:
        Path(out).write_text(text)


@click.group()
@click.option("--seed", type=int, default=0, show_default=True,
              help="Seed for randomized drivers (high-dimension shooting directions).")
@click.option("--threads", type=int, default=1, show_default=True,
              help="Accepted for scripting compatibility; kernels are single-process.")
@click.option("--budget", type=int, default=None,
              help="Word-basis size cap (default 100000).")
@click.pass_context
def main(ctx, seed, threads, budget):
    """Persistence barcodes of filtered chord algebras, chord-length bounds,
    and Hamiltonian chord searches."""
    ctx.obj = {
        "seed": seed,
        "threads": threads,
        "budget": budget if budget is not None else lch.DEFAULT_BASIS_CAP,
    }


@main.command()
@click.argument("spec_file", type=click.Path(exists=True, dir_okay=False))
@_command
def validate(spec_file):
    """Check a spec file: schema, composability, action lowering, d squared."""
    spec = specfile.load_spec(spec_file)
    report = dga.validate(spec)
    if report.ok:
        click.echo(f"{spec.name}: valid ({len(spec.chords)} chords)")
        return
    click.echo(f"{spec.name}: INVALID")
    for line in report.lines():
        click.echo(f"  {line}")
    raise _Exit(EXIT_VALIDATION, f"{len(report.violations)} violation(s)")


@main.command()
@click.argument("spec_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--rmax", required=True, help="Action truncation (rational).")
@click.option("--format", "fmt", type=click.Choice(["text", "svg"]), default="text",
              show_default=True)
@click.option("-o", "--output", type=click.Path(dir_okay=False), default=None,
              help="Write to a file instead of stdout.")
@click.pass_obj
@_command
def barcode(obj, spec_file, rmax, fmt, output):
    """Barcode of the filtered 01-subspace up to --rmax."""
    r_max = _rat(rmax)
    spec = specfile.load_spec(spec_file)
    result = lch.lch_barcode(spec, r_max, max_basis=obj["budget"])
    manifest = _manifest(
        "barcode", [spec_file], {"rmax": rmax, "format": fmt}
    )
    if fmt == "text":
        body = f"# {manifest.embed()}\n" + persistence.serialize_barcode(result.barcode)
    else:
        body = svg_barcode(result.barcode, title=spec.name, comment=manifest.embed())
    _emit(body, output)
    click.echo(
        f"basis size {result.basis_size}, certified infinite: "
        f"{'yes' if result.certified_infinite else 'no'}",
        err=True,
    )


@main.command()
@click.argument("spec_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--rmax", required=True, help="Action truncation (rational).")
@click.option("--s", "s_value", required=True,
              help="Length ratio threshold (rational > 1, or 'inf').")
@click.pass_obj
@_command
def lmin(obj, spec_file, rmax, s_value):
    """Smallest left endpoint among bars longer than ratio --s."""
    r_max = _rat(rmax)
    s = _rat_or_inf(s_value)
    spec = specfile.load_spec(spec_file)
    result = lch.lch_barcode(spec, r_max, max_basis=obj["budget"])
    value = result.barcode.l_min_s(s)
    line = format_extended(value.value)
    if value.uncertain:
        line += " uncertain"
    click.echo(line)


@main.command()
@click.argument("spec_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--rmax", required=True, help="Action truncation (rational).")
@click.pass_obj
@_command
def bonded(obj, spec_file, rmax):
    """Whether an infinite bar exists: yes, no, or unknown under censoring."""
    r_max = _rat(rmax)
    spec = specfile.load_spec(spec_file)
    result = lch.lch_barcode(spec, r_max, max_basis=obj["budget"])
    click.echo(result.barcode.bondedness().value)


# ----------------------------------------------------------------------
# bound formulas


def _print_report(report: bnd.BoundReport) -> None:
    click.echo(f"formula: {report.formula_id}")
    if report.value is None:
        click.echo("value: n/a")
    else:
        click.echo(f"value: {report.value} ({float(report.value):.9g})")
    click.echo(f"applicable: {'yes' if report.applicable else 'no'}")
    if report.violated_conditions:
        click.echo("violated: " + ", ".join(report.violated_conditions))
    for key in sorted(report.details):
        val = report.details[key]
        shown = str(val) if not isinstance(val, float) else f"{val:.9g}"
        click.echo(f"  {key}: {shown}")


@main.group()
def bounds():
    """Evaluate chord-length bound formulas on exact rational inputs."""


@bounds.command("pb-plus")
@click.option("--l-min", "l_min", required=True, help="l_min value (rational or 'inf').")
@click.option("--s-minus", required=True)
@click.option("--s-plus", required=True)
@_command
def bounds_pb_plus(l_min, s_minus, s_plus):
    """Lower bound for the stretching invariant from l_min."""
    _print_report(
        bnd.pb_plus_lower_bound(_rat_or_inf(l_min), _rat(s_minus), _rat(s_plus))
    )


@bounds.command("autonomous")
@click.option("--l-min", "l_min", required=True, help="l_min value (rational or 'inf').")
@click.option("--s-minus", required=True)
@click.option("--s-plus", required=True)
@click.option("--delta", required=True, help="Level separation (rational).")
@_command
def bounds_autonomous(l_min, s_minus, s_plus, delta):
    """Chord time-length bound for autonomous Hamiltonians."""
    _print_report(
        bnd.chord_bound_autonomous(
            _rat_or_inf(l_min), _rat(s_minus), _rat(s_plus), _rat(delta)
        )
    )


@bounds.command("timedep")
@click.option("--l-hat", "l_hat", required=True, help="Stabilized l_min (rational or 'inf').")
@click.option("--s-minus", required=True)
@click.option("--s-plus", required=True)
@click.option("--delta", required=True)
@click.option("--e", "e_value", required=True, help="Splitting parameter in (0, 1/2).")
@click.option("--sup-dhdt", required=True, help="Sup of |dH/dt| on the window.")
@click.option("--c-min", required=True)
@click.option("--c-max", required=True)
@_command
def bounds_timedep(l_hat, s_minus, s_plus, delta, e_value, sup_dhdt, c_min, c_max):
    """Chord time-length bound for time-dependent Hamiltonians."""
    _print_report(
        bnd.chord_bound_timedep(
            _rat_or_inf(l_hat),
            _rat(s_minus),
            _rat(s_plus),
            _rat(delta),
            _rat(e_value),
            _rat(sup_dhdt),
            _rat(c_min),
            _rat(c_max),
        )
    )


@bounds.command("cooperative")
@click.option("--inf-h", required=True, help="Infimum of the Hamiltonian on the body.")
@click.option("--c-val", required=True, help="The level constant C.")
@click.option("--l-min-inf", required=True, help="l_min at ratio infinity (rational or 'inf').")
@click.option("--l-at", "l_at", multiple=True,
              help="Grid entry s=value, repeatable (e.g. --l-at 3/2=2).")
@_command
def bounds_cooperative(inf_h, c_val, l_min_inf, l_at):
    """Cooperative-Hamiltonian chord bound, minimized over a grid of ratios."""
    table: dict[Fraction, Fraction | None] = {}
    for entry in l_at:
        if "=" not in entry:
            raise _Exit(EXIT_PARSE, f"--l-at needs s=value, got {entry!r}")
        s_text, value_text = entry.split("=", 1)
        table[_rat(s_text)] = _rat_or_inf(value_text)
    _print_report(
        bnd.cooperative_bound(
            lambda s: table[s],
            _rat(inf_h),
            _rat(c_val),
            _rat_or_inf(l_min_inf),
            sorted(table),
        )
    )


@bounds.command("two-chords")
@click.option("--a-len", required=True, help="Action of the short chord a.")
@click.option("--big-a-len", "--A-len", "A_len", required=True,
              help="Action of the long chord A.")
@click.option("--c-low", required=True, help="Contact-form ratio infimum c.")
@click.option("--c-high", required=True, help="Contact-form ratio supremum C.")
@_command
def bounds_two_chords(a_len, A_len, c_low, c_high):
    """Two-chord chord bound under the slope gate C/c < A/a."""
    _print_report(
        bnd.two_chords_bound(_rat(a_len), _rat(A_len), _rat(c_low), _rat(c_high))
    )


@bounds.command("vs-pb")
@click.option("--p", "p_value", required=True, help="Stretching lower bound p.")
@click.option("--delta", required=True)
@_command
def bounds_vs_pb(p_value, delta):
    """Chord time-length 1/(p * delta) from a stretching lower bound."""
    value = bnd.chord_time_vs_pb(_rat(p_value), _rat(delta))
    click.echo(f"value: {value} ({float(value):.9g})")


# ----------------------------------------------------------------------
# generators


@main.command()
@click.argument(
    "name",
    type=click.Choice(
        ["two_fiber", "stabilized_two_fiber", "two_chord", "morse_circle", "stabilized"]
    ),
)
@click.option("--length", "-L", "length", default=None, help="Chord action for the fiber pairs.")
@click.option("--a-len", default=None, help="two_chord: action of a.")
@click.option("--big-a-len", "--A-len", "A_len", default=None, help="two_chord: action of A.")
@click.option("--case", type=click.Choice(["dA_zero", "dA_equals_a"]), default="dA_zero",
              show_default=True, help="two_chord: differential case.")
@click.option("--points", default=None,
              help="morse_circle: cyclic critical list 'min:1,max:5,min:2,max:7'.")
@click.option("--shift", default="0", show_default=True, help="morse_circle: action shift.")
@click.option("--spec", "base_spec", type=click.Path(exists=True, dir_okay=False),
              default=None, help="stabilized: spec file to double.")
@click.option("--delta", default="0", show_default=True, help="stabilized: action offset.")
@click.option("-o", "--output", type=click.Path(dir_okay=False), default=None)
@_command
def generate(name, length, a_len, A_len, case, points, shift, base_spec, delta, output):
    """Write a bundled family's spec file."""
    params: dict[str, str] = {}
    inputs: list[str] = []
    if name in ("two_fiber", "stabilized_two_fiber"):
        if length is None:
            raise _Exit(EXIT_PARSE, f"{name} needs --length")
        params["length"] = length
        maker = (
            models.two_fiber_spec if name == "two_fiber"
            else models.stabilized_two_fiber_spec
        )
        spec = maker(_rat(length))
    elif name == "two_chord":
        if a_len is None or A_len is None:
            raise _Exit(EXIT_PARSE, "two_chord needs --a-len and --big-a-len")
        params.update({"a_len": a_len, "A_len": A_len, "case": case})
        spec = models.two_chord_spec(_rat(a_len), _rat(A_len), case)
    elif name == "morse_circle":
        if points is None:
            raise _Exit(EXIT_PARSE, "morse_circle needs --points")
        params.update({"points": points, "shift": shift})
        parsed = []
        for item in points.split(","):
            kind, _, value = item.partition(":")
            if kind not in ("min", "max") or not value:
                raise _Exit(EXIT_PARSE, f"bad critical point {item!r}")
            parsed.append((kind, _rat(value)))
        data = models.CircleMorseData(tuple(parsed))
        spec = models.morse_circle_spec(data, _rat(shift))
    else:  # stabilized
        if base_spec is None:
            raise _Exit(EXIT_PARSE, "stabilized needs --spec")
        params["delta"] = delta
        inputs.append(base_spec)
        spec = models.stabilize_zero_diff(specfile.load_spec(base_spec), _rat(delta))
    manifest = _manifest(f"generate {name}", inputs, params)
    note = (spec.note + "; " if spec.note else "") + manifest.embed()
    stamped = dga.DGASpec(
        name=spec.name,
        chords=spec.chords.values(),
        differential={k: v for k, v in spec.differential.items()},
        note=note,
    )
    _emit(specfile.dump_spec(stamped), output)


# ----------------------------------------------------------------------
# dynamics


@main.command("chord-search")
@click.argument("scenario_file", type=click.Path(exists=True, dir_okay=False))
@click.pass_obj
@_command
def chord_search(obj, scenario_file):
    """Run only the shooting search of a chord scenario."""
    sc = scenario.load_scenario(scenario_file)
    if sc.kind != "chord":
        raise _Exit(EXIT_VALIDATION, "chord-search needs a chord scenario")
    doc = sc.raw
    H, _ = scenario._build_hamiltonian(doc["hamiltonian"])
    search = doc["search"]
    grid = dynamics.ShootingGrid(
        radii=int(search.get("radii", 9)),
        angles=int(search.get("angles", 181)),
        t0_samples=int(search.get("t0_samples", 1)),
        seed=int(search.get("seed", obj["seed"])),
    )
    result = dynamics.find_chord(
        H,
        scenario._build_region(doc["source"]),
        scenario._build_region(doc["target"]),
        horizon=float(search["horizon"]),
        grid=grid,
        tol=float(search["tol"]),
        step=float(search.get("step", 1e-3)),
    )
    if result.found:
        click.echo(
            f"found: T={result.T:.9g} t0={result.t0:.4g} "
            f"residual={result.end_residual:.3e}"
        )
        p = ", ".join(f"{v:.9g}" for v in result.start.p)
        q = ", ".join(f"{v:.9g}" for v in result.start.q)
        click.echo(f"start: p=({p}) q=({q})")
    else:
        click.echo(f"not found: {result.message}")


@main.command()
@click.argument("scenario_file", type=click.Path(exists=False, dir_okay=False))
@_command
def verify(scenario_file):
    """Run a scenario end to end: separation, bound, search, comparison.

    SCENARIO_FILE is a path, or the name of a bundled scenario.
    """
    path = Path(scenario_file)
    if not path.exists():
        path = scenario.bundled_scenario_path(scenario_file)
    sc = scenario.load_scenario(path)
    report = scenario.run_scenario(sc)
    click.echo(report.summary())
    if not report.passed:
        raise _Exit(EXIT_VALIDATION, "scenario checks failed")


@main.command()
@click.argument("barcode_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--title", default="", help="Title text drawn above the diagram.")
@click.option("-o", "--output", type=click.Path(dir_okay=False), default=None)
@_command
def render(barcode_file, title, output):
    """Render a serialized barcode file to SVG."""
    try:
        bc = persistence.parse_barcode(Path(barcode_file).read_text())
    except ValueError as exc:
        raise _Exit(EXIT_PARSE, f"parse error: {exc}")
    manifest = _manifest("render", [barcode_file], {"title": title})
    _emit(svg_barcode(bc, title=title, comment=manifest.embed()), output)


if __name__ == "__main__":
    main()
