"""
Command-line front end.

    barrierlab transmission  --potential P (--energy E | --e-min A --e-max B --points N)
    barrierlab wavefunction  --potential P --energy E --x-min A --x-max B --points N
    barrierlab dwell         --potential P --energy E --interval X1:X2|turning:I:J
    barrierlab resonance     --potential P --e-min A --e-max B [--points N]
    barrierlab oracle-check  (--potential P | --sampled CSV) (--energy E | --e-min ... )
    barrierlab units         [--quantity Q --from S --to T VALUE ...]

Energies and lengths on the command line, and all outputs, are in the unit
system given by ``--units`` (default: the potential file's own). Exit status
is 0 on success, 2 for invalid input and 3 for numerical failure; errors are
reported on stderr as one JSON object.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys
from pathlib import Path

from . import __version__
from .analysis import TRIVIALLY_TRANSPARENT, dwell_time, find_resonances, refine_peaks
from .errors import BarrierLabError, InvalidComposite, InvalidParameter, SingularSystem
from .multibarrier import solve, transmission_sweep
from .oracle import IntegratorConfig, integrate_scattering, load_sampled_csv
from .potentials import CompositePotential, load_potential, turning_points
from .units import (
    CONSTANTS,
    QUANTITY_DIMENSIONS,
    UNIT_SYSTEM_NAMES,
    UnitSystem,
    convert,
    unit_system,
)

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NUMERICAL = 3


def fmt(v: float) -> str:
    """12 significant digits; scientific below 1e-3 or from 1e6 up."""
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    a = abs(v)
    if a != 0.0 and (a < 1e-3 or a >= 1e6):
        return f"{v:.11e}"
    return f"{v:.12g}"


def _csv(header: list[str], rows) -> str:
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(fmt(v) for v in row) + "\n")
    return buf.getvalue()


def _json(doc: dict) -> str:
    return json.dumps(doc, indent=2, allow_nan=True) + "\n"


def _emit(args, text: str) -> None:
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _units(args, default: UnitSystem) -> UnitSystem:
    if args.units is None:
        if args.constants and args.constants != default.constants:
            return unit_system(default.name, args.constants)
        return default
    return unit_system(args.units, args.constants or default.constants)


def _potential(args) -> tuple[CompositePotential, UnitSystem]:
    p = load_potential(args.potential)
    u = _units(args, p.units)
    if u != p.units:
        p = p.converted(u)
    return p, u


def _energies(args) -> list[float]:
    if args.energy is not None:
        if args.e_min is not None or args.e_max is not None:
            raise InvalidParameter("give either --energy or --e-min/--e-max, not both")
        return _positive([args.energy])
    if args.e_min is None or args.e_max is None:
        raise InvalidParameter("need --energy or both --e-min and --e-max")
    if not args.e_min < args.e_max:
        raise InvalidParameter("--e-min must be below --e-max")
    n = args.points
    if n < 2:
        raise InvalidParameter("--points must be at least 2 for a range")
    step = (args.e_max - args.e_min) / (n - 1)
    energies = [args.e_min + i * step for i in range(n - 1)] + [args.e_max]
    return _positive(energies)


def _positive(energies: list[float]) -> list[float]:
    bad = [e for e in energies if not e > 0]
    if bad:
        raise InvalidParameter(f"energies must be positive, got {bad[0]!r}")
    return energies


def _header_doc(u: UnitSystem, verb: str) -> dict:
    return {"command": verb, "unit_system": u.to_dict()}


def cmd_transmission(args) -> int:
    p, u = _potential(args)
    energies = _energies(args)
    points = transmission_sweep(p, energies)
    if args.refine and len(points) > 2:
        # a resonance narrower than the grid spacing would otherwise be invisible
        seen = set(energies)
        ok = [pt for pt in points if pt.ok]
        for peak in refine_peaks(p, [pt.energy for pt in ok], [pt.big_t for pt in ok]):
            if peak.energy not in seen:
                seen.add(peak.energy)
                points.extend(transmission_sweep(p, [peak.energy], workers=1))
        points.sort(key=lambda pt: pt.energy)
    for pt in points:
        if not pt.ok:
            _diag({"warning": "point failed", "energy": pt.energy, "message": pt.error})
    if args.format == "json":
        doc = _header_doc(u, "transmission")
        doc["points"] = [
            {"energy": pt.energy, "transmission": pt.big_t, "reflection": pt.big_r, **({"error": pt.error} if pt.error else {})}
            for pt in points
        ]
        _emit(args, _json(doc))
    else:
        _emit(args, _csv(["energy", "transmission", "reflection"], ((pt.energy, pt.big_t, pt.big_r) for pt in points)))
    return EXIT_OK


def cmd_wavefunction(args) -> int:
    p, u = _potential(args)
    if args.energy is None:
        raise InvalidParameter("wavefunction needs --energy")
    if args.x_min is None or args.x_max is None or not args.x_min < args.x_max:
        raise InvalidParameter("wavefunction needs --x-min < --x-max")
    if args.points < 2:
        raise InvalidParameter("--points must be at least 2")
    sol = solve(p, args.energy)
    n = args.points
    dx = (args.x_max - args.x_min) / (n - 1)
    xs = [args.x_min + i * dx for i in range(n - 1)] + [args.x_max]
    rows = []
    for x in xs:
        v = sol.value(x)
        rows.append((x, abs(v) ** 2, v.real, v.imag))
    if args.format == "json":
        doc = _header_doc(u, "wavefunction")
        doc.update(energy=args.energy, transmission=sol.big_t, reflection=sol.big_r)
        doc["samples"] = [dict(zip(("x", "density", "psi_re", "psi_im"), r)) for r in rows]
        _emit(args, _json(doc))
    else:
        _emit(args, _csv(["x", "density", "psi_re", "psi_im"], rows))
    return EXIT_OK


def parse_interval(text: str, p: CompositePotential, energy: float) -> tuple[float, float]:
    """``X1:X2`` or ``turning:I:J`` (1-based turning-point indices, left to right)."""
    parts = text.split(":")
    if parts[0] == "turning":
        if len(parts) != 3:
            raise InvalidParameter("turning intervals are written turning:I:J")
        try:
            i, j = int(parts[1]), int(parts[2])
        except ValueError:
            raise InvalidParameter(f"bad turning-point indices in {text!r}") from None
        tps = turning_points(p, energy)
        if not (1 <= i <= len(tps) and 1 <= j <= len(tps)):
            raise InvalidParameter(f"turning-point index out of range: {len(tps)} turning points at E={energy}")
        return tps[i - 1], tps[j - 1]
    if len(parts) != 2:
        raise InvalidParameter(f"interval must be X1:X2 or turning:I:J, got {text!r}")
    try:
        return float(parts[0]), float(parts[1])
    except ValueError:
        raise InvalidParameter(f"bad interval bounds in {text!r}") from None


def cmd_dwell(args) -> int:
    p, u = _potential(args)
    if args.energy is None or args.interval is None:
        raise InvalidParameter("dwell needs --energy and --interval")
    x1, x2 = parse_interval(args.interval, p, args.energy)
    report = dwell_time(solve(p, args.energy), x1, x2)
    if args.format == "csv":
        _emit(args, _csv(["x1", "x2", "j_in", "integral", "tau"], [(x1, x2, report.j_in, report.integral, report.tau)]))
    else:
        doc = _header_doc(u, "dwell")
        doc.update(energy=args.energy, **report.to_dict())
        _emit(args, _json(doc))
    return EXIT_OK


def cmd_resonance(args) -> int:
    p, u = _potential(args)
    if args.e_min is None or args.e_max is None:
        raise InvalidParameter("resonance needs --e-min and --e-max")
    found = find_resonances(p, args.e_min, args.e_max, grid_n=args.points, detailed=True)
    if found is TRIVIALLY_TRANSPARENT:
        _diag({"status": "trivially transparent", "message": "potential is free; T = 1 at every energy"})
        rows = []
    else:
        rows = [(r.energy, r.big_t) for r in found]
    if args.format == "json":
        doc = _header_doc(u, "resonance")
        if found is TRIVIALLY_TRANSPARENT:
            doc["status"] = "trivially transparent"
            doc["resonances"] = []
        else:
            doc["status"] = "ok"
            doc["resonances"] = [{"energy": e, "transmission": t} for e, t in rows]
        _emit(args, _json(doc))
    else:
        _emit(args, _csv(["energy", "transmission"], rows))
    return EXIT_OK


def cmd_oracle_check(args) -> int:
    cfg = IntegratorConfig(rel_tol=args.rel_tol, landau_radius=args.landau_radius)
    energies = _energies(args)
    if args.sampled:
        if args.potential:
            raise InvalidParameter("give either --potential or --sampled, not both")
        u = _units(args, unit_system("atomic"))
        pot = load_sampled_csv(args.sampled, u)
        rows = []
        for e in energies:
            o = integrate_scattering(pot, e, cfg=cfg)
            rows.append((e, o.big_t, o.big_r))
        header = ["energy", "transmission", "reflection"]
    else:
        if not args.potential:
            raise InvalidParameter("oracle-check needs --potential or --sampled")
        pot, u = _potential(args)
        rows = []
        for e in energies:
            exact = solve(pot, e).big_t
            o = integrate_scattering(pot, e, cfg=cfg)
            rows.append((e, exact, o.big_t, abs(exact - o.big_t)))
        header = ["energy", "exact_transmission", "oracle_transmission", "abs_difference"]
    if args.format == "json":
        doc = _header_doc(u, "oracle-check")
        doc["rows"] = [dict(zip(header, r)) for r in rows]
        _emit(args, _json(doc))
    else:
        _emit(args, _csv(header, rows))
    return EXIT_OK


def cmd_units(args) -> int:
    constants = args.constants or "rounded"
    if not args.values:
        systems = {name: unit_system(name, constants) for name in UNIT_SYSTEM_NAMES}
        doc = {
            "command": "units",
            "constants": constants,
            "systems": {
                name: {**u.to_dict(), "si_scales": {q: u.si_scale(q) for q in ("energy", "length", "time")}}
                for name, u in systems.items()
            },
        }
        _emit(args, _json(doc))
        return EXIT_OK
    if not (args.quantity and args.source and args.target):
        raise InvalidParameter("conversions need --quantity, --from and --to")
    src, dst = unit_system(args.source, constants), unit_system(args.target, constants)
    out = [(v, convert(v, args.quantity, src, dst)) for v in args.values]
    if args.format == "json":
        doc = {
            "command": "units",
            "quantity": args.quantity,
            "from": src.to_dict(),
            "to": dst.to_dict(),
            "unit_system": dst.to_dict(),
            "values": [{"input": a, "output": b} for a, b in out],
        }
        _emit(args, _json(doc))
    else:
        _emit(args, _csv(["input", "output"], out))
    return EXIT_OK


def _diag(doc: dict) -> None:
    sys.stderr.write(json.dumps(doc, sort_keys=True) + "\n")


def _error_doc(exc: BaseException, code: int) -> dict:
    doc = {"error": type(exc).__name__, "message": str(exc), "exit_code": code}
    if isinstance(exc, InvalidComposite):
        doc["violations"] = [v.to_dict() for v in exc.violations]
    if isinstance(exc, SingularSystem):
        doc["condition"] = exc.condition
        doc["diagnostics"] = exc.diagnostics
    return doc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="barrierlab", description="Tunnelling through parabolic and sech-squared barriers.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="verb", required=True)

    def common(sp, fmt_default="csv"):
        sp.add_argument("--units", choices=UNIT_SYSTEM_NAMES, help="unit system for inputs and outputs")
        sp.add_argument("--constants", choices=sorted(CONSTANTS), help="physical-constant set")
        sp.add_argument("--output", "-o", help="write here instead of stdout")
        sp.add_argument("--format", choices=("csv", "json"), default=fmt_default)

    def energy_range(sp, points_default):
        sp.add_argument("--energy", type=float)
        sp.add_argument("--e-min", type=float)
        sp.add_argument("--e-max", type=float)
        sp.add_argument("--points", type=int, default=points_default)

    sp = sub.add_parser("transmission", help="T(E) and R(E) on an energy grid")
    sp.add_argument("--potential", required=True)
    energy_range(sp, 200)
    sp.add_argument(
        "--no-refine", dest="refine", action="store_false",
        help="grid points only; by default refined local maxima of T are added as extra rows",
    )
    common(sp)
    sp.set_defaults(func=cmd_transmission)

    sp = sub.add_parser("wavefunction", help="|psi|^2 profile at one energy")
    sp.add_argument("--potential", required=True)
    sp.add_argument("--energy", type=float, required=True)
    sp.add_argument("--x-min", type=float, required=True)
    sp.add_argument("--x-max", type=float, required=True)
    sp.add_argument("--points", type=int, default=1000)
    common(sp)
    sp.set_defaults(func=cmd_wavefunction)

    sp = sub.add_parser("dwell", help="dwell time in an interval")
    sp.add_argument("--potential", required=True)
    sp.add_argument("--energy", type=float, required=True)
    sp.add_argument("--interval", required=True, help="X1:X2 or turning:I:J (1-based)")
    common(sp, "json")
    sp.set_defaults(func=cmd_dwell)

    sp = sub.add_parser("resonance", help="energies with T = 1")
    sp.add_argument("--potential", required=True)
    sp.add_argument("--e-min", type=float, required=True)
    sp.add_argument("--e-max", type=float, required=True)
    sp.add_argument("--points", type=int, default=200, help="scan grid size")
    common(sp)
    sp.set_defaults(func=cmd_resonance)

    sp = sub.add_parser("oracle-check", help="exact solver against direct integration")
    sp.add_argument("--potential")
    sp.add_argument("--sampled", help="x,U samples (CSV) to integrate instead of a potential file")
    energy_range(sp, 5)
    sp.add_argument("--rel-tol", type=float, default=1e-9)
    sp.add_argument("--landau-radius", type=float, default=20.0, help="truncation radius in units of 1/alpha_inv")
    common(sp)
    sp.set_defaults(func=cmd_oracle_check)

    sp = sub.add_parser("units", help="list unit systems or convert values")
    sp.add_argument("--quantity", choices=sorted(QUANTITY_DIMENSIONS))
    sp.add_argument("--from", dest="source", choices=UNIT_SYSTEM_NAMES)
    sp.add_argument("--to", dest="target", choices=UNIT_SYSTEM_NAMES)
    sp.add_argument("values", nargs="*", type=float)
    sp.add_argument("--constants", choices=sorted(CONSTANTS))
    sp.add_argument("--output", "-o")
    sp.add_argument("--format", choices=("csv", "json"), default="json")
    sp.set_defaults(func=cmd_units)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InvalidParameter, OSError, json.JSONDecodeError) as exc:
        code, err = EXIT_INVALID, exc
    except (BarrierLabError, ArithmeticError) as exc:
        code, err = EXIT_NUMERICAL, exc
    _diag(_error_doc(err, code))
    return code


if __name__ == "__main__":
    sys.exit(main())
