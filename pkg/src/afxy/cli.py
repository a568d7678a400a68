"""Command line interface of afxy.

Exit codes: 0 on success, 1 when a checked invariant fails, 2 on bad input.
Errors are reported on stderr as {"error": <class>, "message": <text>}.
"""

import argparse
import json
import logging
from pathlib import Path
import sys
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from afxy.config import Config, load_config
from afxy.data import AtomicMeasure, Region, SpinField
from afxy.energy import as_triangles, chirality_values, energy_afxy, energy_xy, to_auxiliary
from afxy.exceptions import AfxyError, InvariantViolationError
from afxy.experiment import BulkScaling, VortexScaling, eps_range, run_selftest, write_table
from afxy.interpolation import covered_triangles
from afxy.strategy import BallConstruction, DipoleAnnihilation, verify_properties
from afxy.utils import SQRT3
from afxy.vorticity import vorticity_measure
from afxy.wrapper import parse_phase, parse_region

logger = logging.getLogger("afxy.cli")

EPILOG = """
Examples:
  afxy energy --field ground.json --region '{"kind": "rectangle", "lo": [0, 0], "hi": [1, 1]}'
  afxy vortex-scaling --measure '[{"x": 0.5, "y": 0.5, "charge": 1}]' \\
      --domain square.json --eps '2^-5..2^-9' --out vortex.csv
  afxy bulk-scaling --phase linear --domain square.json --eps '2^-4..2^-8' --out bulk.csv
  afxy ball-trace --field field.json --sigma 0.1 --times 0,1,4 --out trace.json
  afxy annihilate --field field.json --out clean.json
  afxy selftest
"""


def load_json(text: str) -> Any:
    """Parse an inline JSON document, or read it from the file it names."""
    stripped = text.lstrip()
    if stripped.startswith(("{", "[")):
        return json.loads(text)
    return json.loads(Path(text).read_text(encoding="utf-8"))


def parse_times(text: str) -> List[float]:
    try:
        times = [float(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise ValueError(f"Cannot parse times {text!r}") from exc
    if not times:
        raise ValueError("At least one query time is required")
    return times


def _vortices(field: SpinField, region: Optional[Region]):
    """Vorticity measure of the auxiliary field on a region or on every covered triangle."""
    where = covered_triangles(field) if region is None else region
    return vorticity_measure(to_auxiliary(field), where)


def _print(data: Dict):
    print(json.dumps(data, indent=2))


# subcommands

def cmd_energy(args, config: Config) -> int:
    u = SpinField.from_json(args.field)
    region = parse_region(load_json(args.region))
    triangles = as_triangles(region, u.eps)
    chi = chirality_values(u, triangles)
    v = to_auxiliary(u)
    mu = vorticity_measure(v, triangles)
    _print({
        "eps": u.eps,
        "triangles": len(triangles),
        "energy_afxy": energy_afxy(u, triangles),
        "energy_xy_auxiliary": energy_xy(v, triangles),
        "chirality": {
            "mean": float(np.mean(chi)) if len(chi) else None,
            "min": float(np.min(chi)) if len(chi) else None,
            "max": float(np.max(chi)) if len(chi) else None,
        },
        "vorticity_mass": mu.mass(),
        "vorticity_total": mu.total(),
    })
    return 0


def _finish_experiment(experiment, table, args) -> int:
    if args.out:
        write_table(table, args.out)
    ok = bool(experiment.check(table)) if len(table) >= 3 else None
    summary = dict(experiment.summary, check=ok)
    if not args.out:
        summary["rows"] = table.to_dict(orient="records")
    _print(summary)
    if args.strict and ok is False:
        raise InvariantViolationError(f"{experiment.__class__.__name__} check failed")
    return 0


def cmd_vortex_scaling(args, config: Config) -> int:
    mu = AtomicMeasure.from_list(load_json(args.measure))
    domain = parse_region(load_json(args.domain))
    experiment = VortexScaling(mu, domain, eps_range(args.eps), args.split, config)
    return _finish_experiment(experiment, experiment.run(), args)


def cmd_bulk_scaling(args, config: Config) -> int:
    phase = args.phase if Path(args.phase).suffix != ".json" else load_json(args.phase)
    domain = parse_region(load_json(args.domain))
    experiment = BulkScaling(parse_phase(phase), domain, eps_range(args.eps), config)
    return _finish_experiment(experiment, experiment.run(), args)


def cmd_ball_trace(args, config: Config) -> int:
    field = SpinField.from_json(args.field)
    region = parse_region(load_json(args.region)) if args.region else None
    mu = _vortices(field, region)
    seeds = [(position, field.eps / (2.0 * SQRT3)) for position, _ in mu]
    if not seeds:
        raise AfxyError("The field has no vortices to start the ball construction from")
    trace = BallConstruction(seeds, mu, args.sigma, parse_times(args.times), config).run()
    report = verify_properties(trace, mu, args.sigma)
    document = {
        "eps": field.eps,
        "sigma": args.sigma,
        "measure": mu.to_list(),
        "trace": [family.to_dict() for family in trace],
        "report": {
            "ok": report.ok,
            "violations": report.violations,
            "ledger": [{"t1": e.t1, "t2": e.t2, "value": e.value} for e in report.ledger],
            "ledger_additive": report.ledger_additive,
        },
    }
    Path(args.out).write_text(json.dumps(document, indent=2), encoding="utf-8")
    logger.info("Wrote ball trace with %d families to %s", len(trace), args.out)
    if not report.ok:
        raise InvariantViolationError(f"Ball construction properties fail: {report.violations[:3]}")
    return 0


def cmd_annihilate(args, config: Config) -> int:
    u = SpinField.from_json(args.field)
    region = parse_region(load_json(args.region)) if args.region else covered_triangles(u)
    before = vorticity_measure(to_auxiliary(u), region)
    strategy = DipoleAnnihilation(u, region, args.sigma, config)
    cleaned = strategy.run()
    after = vorticity_measure(to_auxiliary(cleaned), region)
    cleaned.to_json(args.out)
    _print({
        "vortices_before": before.mass(),
        "vortices_after": after.mass(),
        "balls": len(strategy.balls),
        "extended": len(strategy.extended),
        "failures": [{"ball": ball.to_dict(), "reason": reason} for ball, reason in strategy.failures],
    })
    return 0


def cmd_selftest(args, config: Config) -> int:
    results = run_selftest(config, args.seed)
    _print({"ok": True, "checks": [r.to_dict() for r in results]})
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="afxy",
        description="Vortex and bulk energy experiments for the antiferromagnetic XY model on the triangular lattice",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=EPILOG,
    )
    parser.add_argument("--verbose", "-v", action="store_true", help="Log debug messages to stderr")
    parser.add_argument("--config", type=str, default=None, help="JSON file overriding the packaged defaults")
    parser.add_argument("--workers", type=int, default=None, help="Worker threads for experiments")
    sub = parser.add_subparsers(dest="command", required=True)

    energy = sub.add_parser("energy", help="Energies, chirality and vorticity of a field")
    energy.add_argument("--field", required=True, help="SpinField JSON file")
    energy.add_argument("--region", required=True, help="Region JSON document or file")
    energy.set_defaults(handler=cmd_energy)

    for name, handler, help_text in (
        ("vortex-scaling", cmd_vortex_scaling, "Recovery-field energies of an atomic measure"),
        ("bulk-scaling", cmd_bulk_scaling, "Energies of sampled smooth fields against the Dirichlet limit"),
    ):
        cmd = sub.add_parser(name, help=help_text)
        if name == "vortex-scaling":
            cmd.add_argument("--measure", required=True, help="AtomicMeasure JSON document or file")
            cmd.add_argument("--split", type=int, default=None,
                             help="Fixed n for splitting atoms of multiplicity above one")
        else:
            cmd.add_argument("--phase", required=True,
                             help="Builtin phase (linear, sine, constant) or a JSON file describing one")
        cmd.add_argument("--domain", required=True, help="Region JSON document or file")
        cmd.add_argument("--eps", required=True, help="Spacings as 2^-a..2^-b or a comma separated list")
        cmd.add_argument("--out", default=None, help="CSV output; rows are printed when omitted")
        cmd.add_argument("--strict", action="store_true", help="Exit with 1 when the table fails its check")
        cmd.set_defaults(handler=handler)

    trace = sub.add_parser("ball-trace", help="Ball construction from the vortices of a field")
    trace.add_argument("--field", required=True, help="SpinField JSON file")
    trace.add_argument("--region", default=None, help="Region whose vortices seed the construction")
    trace.add_argument("--sigma", type=float, required=True, help="Inflation of the initial balls")
    trace.add_argument("--times", required=True, help="Comma separated query times")
    trace.add_argument("--out", required=True, help="JSON output")
    trace.set_defaults(handler=cmd_ball_trace)

    annihilate = sub.add_parser("annihilate", help="Remove neutral vortex clusters from a field")
    annihilate.add_argument("--field", required=True, help="SpinField JSON file")
    annihilate.add_argument("--region", default=None, help="Region JSON document or file")
    annihilate.add_argument("--sigma", type=float, default=None, help="Inflation, annihilation_sigma eps by default")
    annihilate.add_argument("--out", required=True, help="SpinField JSON output")
    annihilate.set_defaults(handler=cmd_annihilate)

    selftest = sub.add_parser("selftest", help="Run the invariant suite at small scale")
    selftest.add_argument("--seed", type=int, default=0)
    selftest.set_defaults(handler=cmd_selftest)
    return parser


def _fail(exc: Exception, code: int) -> int:
    print(json.dumps({"error": exc.__class__.__name__, "message": str(exc)}), file=sys.stderr)
    return code


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        overrides = {} if args.workers is None else {"workers": args.workers}
        config = load_config(args.config, **overrides)
        return args.handler(args, config)
    except InvariantViolationError as exc:
        return _fail(exc, 1)
    except (AfxyError, ValueError, TypeError, OSError) as exc:
        return _fail(exc, 2)


if __name__ == "__main__":
    sys.exit(main())
