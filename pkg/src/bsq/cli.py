"""Command line front end: ``bsq <command> --in FILE [options]``.

Exit codes: 0 success, 2 parse error, 3 internal consistency failure,
4 domain error, 5 invariant violation in the input.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass

from .errors import BSQError, DomainError, InconsistencyError, ParseError
from .exact import to_fraction

MAX_TOLERANCE = 1e-4


@dataclass(frozen=True)
class RunConfig:
    command: str
    source: str
    format: str = "json"
    tolerance: float = 1e-10
    samples: int = 5
    jobs: int = 1
    out: str | None = None
    decompose: bool = False
    verify: bool = False
    points: bool = False

    def __post_init__(self):
        if self.format not in ("json", "table"):
            raise ParseError(f"unknown format {self.format!r}")
        if not 0 < self.tolerance <= MAX_TOLERANCE:
            raise ParseError(f"tolerance must lie in (0, {MAX_TOLERANCE}]")
        if self.samples < 1:
            raise ParseError("samples must be at least 1")
        if self.jobs < 0:
            raise ParseError("jobs must be nonnegative")


def _load(source: str):
    if source == "-":
        text = sys.stdin.read()
    elif source.lstrip().startswith(("{", "[")):
        text = source
    else:
        try:
            with open(source, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ParseError(f"cannot read {source}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc


def dumps(obj) -> str:
    """Canonical JSON: sorted keys, no floats for rationals."""
    return json.dumps(obj, sort_keys=True, separators=(",", ": "), indent=1)


# --------------------------------------------------------------------------
# input shapes

def _band(obj):
    from .geometry import Band

    return Band.from_json(obj)


def _rational_pair(raw, what: str):
    try:
        a, b = raw
        return to_fraction(a), to_fraction(b)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{what} must be a pair of rationals") from exc


def _layer_spec(raw):
    out = []
    try:
        for layer in raw:
            iv = _rational_pair(layer["interval"], "layer interval")
            arcs = layer["arcs"]
            if not isinstance(arcs, int) or isinstance(arcs, bool):
                raise ParseError("arcs must be an integer")
            off = layer.get("offset")
            out.append((iv, arcs, None if off is None else to_fraction(off)))
    except (KeyError, TypeError, AttributeError) as exc:
        raise ParseError(f"malformed layer list: {exc}") from exc
    return out


def _cylinder_cover(spec, band):
    from .cech import build_brick_wall, build_ek_cover

    if spec is None:
        return build_brick_wall(band)
    if not isinstance(spec, dict):
        raise ParseError("cover must be an object")
    if "k" in spec:
        if not isinstance(spec["k"], int) or isinstance(spec["k"], bool):
            raise ParseError("k must be an integer")
        return build_ek_cover(spec["k"], band)
    if "layers" in spec:
        return build_brick_wall(band, _layer_spec(spec["layers"]))
    raise ParseError("cover needs 'k' or 'layers'")


def _plane_cover(spec):
    from .cech import build_plane_cover

    if spec is None:
        return None
    if not isinstance(spec, dict) or "disc_radius" not in spec:
        raise ParseError("plane cover needs 'disc_radius'")
    try:
        radius = to_fraction(spec["disc_radius"])
    except (TypeError, ValueError) as exc:
        raise ParseError(str(exc)) from exc
    arcs = spec.get("arcs", 3)
    if not isinstance(arcs, int) or isinstance(arcs, bool):
        raise ParseError("arcs must be an integer")
    ring = _rational_pair(spec["ring"], "ring") if "ring" in spec else None
    layers = _layer_spec(spec["ring_layers"]) if "ring_layers" in spec else None
    return build_plane_cover(radius, arcs, ring=ring, ring_layers=layers)


# --------------------------------------------------------------------------
# commands

def cmd_bs_set(cfg: RunConfig, data):
    from .geometry import bs_set_in_band

    band = _band(data)
    leaves = bs_set_in_band(band)
    return {"band": band.to_json(), "count": len(leaves), "leaves": [l.to_json() for l in leaves]}


def cmd_cech_band(cfg: RunConfig, data):
    from .cech import Annulus, band_cohomology, plane_cohomology

    if not isinstance(data, dict):
        raise ParseError("input must be an object")
    if "annulus" in data:
        lo, hi = _rational_pair(data["annulus"], "annulus")
        report = plane_cohomology(Annulus(lo, hi), None, cfg.samples, cfg.tolerance)
        return {"report": report.to_json()}
    band_obj = data.get("band", data if "m" in data else None)
    if band_obj is None:
        raise ParseError("input needs a band (or an annulus)")
    band = _band(band_obj)
    out = {}
    if band.m == 1 and band.k == 0:
        cover = _cylinder_cover(data.get("cover"), band)
        report = band_cohomology(band, cover, cfg.samples, cfg.tolerance)
        if cfg.decompose:
            from .assembly import decompose_and_assemble

            dec, glued = decompose_and_assemble(band)
            if glued.H != report.H:
                raise InconsistencyError(f"assembled {list(glued.H)} differs from {list(report.H)}")
            out["decomposition"] = dec.to_json()
            out["assembled"] = glued.to_json()
    elif band.m == 0 and band.k == 1:
        if cfg.decompose:
            raise DomainError("--decompose applies to cylinder bands")
        report = plane_cohomology(band, _plane_cover(data.get("cover")), cfg.samples, cfg.tolerance)
    else:
        raise DomainError("cech-band handles cylinder bands (m=1, k=0) and plane discs (m=0, k=1)")
    out["report"] = report.to_json()
    return out


def cmd_leray_band(cfg: RunConfig, data):
    from .spectral import band_cohomology_leray

    band = _band(data.get("band", data) if isinstance(data, dict) else data)
    report = band_cohomology_leray(band)
    out = {"report": report.to_json()}
    if cfg.verify:
        if band.m == 1 and band.k == 0:
            from .cech import band_cohomology

            other = band_cohomology(band, None, cfg.samples, cfg.tolerance)
            out["verified_by"] = "cech"
        else:
            from .assembly import decompose_and_assemble

            other = decompose_and_assemble(band)[1]
            out["verified_by"] = "assembly"
        if other != report:
            raise InconsistencyError("Leray and Čech routes disagree")
        out["verified"] = True
    return out


def cmd_quantize_toric(cfg: RunConfig, data):
    from .toric import DelzantPolytope, delzant_validate, enumerate_lattice_points

    poly = DelzantPolytope.from_json(data)
    jobs = cfg.jobs or None
    rep = enumerate_lattice_points(poly, jobs)
    out = rep.to_json(points=cfg.points)
    diags = delzant_validate(poly)
    if diags:
        out["diagnostics"] = diags
    return out


def cmd_spectral(cfg: RunConfig, data, action: str):
    from .spectral import BigradedPage, is_stable, total_degree_dims, turn_page

    page = BigradedPage.from_json(data)
    page.check()
    if action == "stable":
        out = {"stable": is_stable(page)}
        if out["stable"]:
            out["total"] = {str(k): v for k, v in total_degree_dims(page).items()}
        return out
    nxt = turn_page(page)
    return {"stable": is_stable(page), "next": nxt.to_json()}


# --------------------------------------------------------------------------
# table output

def _table(command: str, result) -> str:
    lines = []
    if command == "bs-set":
        lines.append(f"{'t':>16} {'s':>16} singular")
        for leaf in result["leaves"]:
            t = ",".join(leaf["t"]) or "-"
            s = ",".join(leaf["s"]) or "-"
            lines.append(f"{t:>16} {s:>16} {'yes' if leaf['singular'] else 'no'}")
        lines.append(f"{result['count']} leaves")
        return "\n".join(lines)
    if "report" in result:
        rep = result["report"]
        lines.append("degree  dim")
        for q, d in sorted(rep["H"].items(), key=lambda kv: int(kv[0])):
            lines.append(f"{q:>6}  {d}")
        for p in rep["support"]:
            coord = next(k for k in p if k not in ("degree", "dim"))
            val = p[coord] if isinstance(p[coord], str) else "(" + ", ".join(p[coord]) + ")"
            lines.append(f"support {coord}={val} degree {p['degree']} dim {p['dim']}")
        for w in rep.get("warnings", []):
            lines.append(f"note: {w}")
        if "assembled" in result:
            lines.append("assembled: " + " ".join(f"H{q}={d}" for q, d in sorted(result["assembled"]["H"].items())))
        if result.get("verified"):
            route = "the Čech route" if result.get("verified_by") == "cech" else "the piecewise assembly"
            lines.append(f"verified against {route}")
        return "\n".join(lines)
    if "real_dim" in result:
        lines += [f"real_dim    {result['real_dim']}", f"kahler_dim  {result['kahler_dim']}", f"boundary    {result['boundary']}"]
        for key in ("interior_points", "boundary_points"):
            if key in result:
                lines.append(f"{key}: " + " ".join("(" + ",".join(map(str, p)) + ")" for p in result[key]))
        for d in result.get("diagnostics", []):
            lines.append(f"note: {d}")
        return "\n".join(lines)
    if "stable" in result:
        lines.append(f"stable: {'yes' if result['stable'] else 'no'}")
        if "next" in result:
            lines.append(f"page r={result['next']['r']}")
            for e in result["next"]["entries"]:
                lines.append(f"  E({e['p']},{e['q']}) = {e['dim']}")
        for k, v in sorted(result.get("total", {}).items()):
            lines.append(f"  total degree {k}: {v}")
        return "\n".join(lines)
    return dumps(result)


# --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--in", dest="source", required=True, help="input file, inline JSON, or - for stdin")
    common.add_argument("--out", help="write output here instead of stdout")
    common.add_argument("--format", choices=["json", "table"], default="json")
    common.add_argument("--tolerance", type=float, default=1e-10)
    common.add_argument("--samples", type=int, default=5, help="generic samples per unit interval")
    common.add_argument("--jobs", type=int, default=None, help="parallelism hint (default: $BSQ_JOBS or 1)")

    parser = argparse.ArgumentParser(prog="bsq", description="Bohr-Sommerfeld quantization toolkit")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("bs-set", parents=[common], help="list Bohr-Sommerfeld leaves in a band")
    p = sub.add_parser("cech-band", parents=[common], help="Čech cohomology of a cylinder band or plane region")
    p.add_argument("--decompose", action="store_true", help="also show the Mayer-Vietoris decomposition")
    p = sub.add_parser("leray-band", parents=[common], help="band cohomology via the Leray tables")
    p.add_argument("--verify", action="store_true",
                   help="cross-check against the Čech route (m=1) or the piecewise assembly (m>=2)")
    p = sub.add_parser("quantize-toric", parents=[common], help="real vs Kähler dimension of a Delzant polytope")
    p.add_argument("--points", action="store_true", help="list the lattice points")
    p = sub.add_parser("spectral", parents=[common], help="turn a page or test stability")
    p.add_argument("action", choices=["turn", "stable"])
    return parser


def _jobs(value):
    if value is not None:
        return value
    raw = os.environ.get("BSQ_JOBS", "1")
    try:
        return int(raw)
    except ValueError as exc:
        raise ParseError(f"BSQ_JOBS must be an integer, got {raw!r}") from exc


def run(argv) -> tuple:
    """Run one command; returns ``(exit_code, stdout_text)``."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return (0 if exc.code == 0 else 2), ""
    try:
        cfg = RunConfig(
            command=args.command,
            source=args.source,
            format=args.format,
            tolerance=args.tolerance,
            samples=args.samples,
            jobs=_jobs(args.jobs),
            out=args.out,
            decompose=getattr(args, "decompose", False),
            verify=getattr(args, "verify", False),
            points=getattr(args, "points", False),
        )
        data = _load(cfg.source)
        if cfg.command == "bs-set":
            result = cmd_bs_set(cfg, data)
        elif cfg.command == "cech-band":
            result = cmd_cech_band(cfg, data)
        elif cfg.command == "leray-band":
            result = cmd_leray_band(cfg, data)
        elif cfg.command == "quantize-toric":
            result = cmd_quantize_toric(cfg, data)
        else:
            result = cmd_spectral(cfg, data, args.action)
    except BSQError as exc:
        print(f"bsq: {exc}", file=sys.stderr)
        return exc.exit_code, ""
    text = _table(cfg.command, result) if cfg.format == "table" else dumps(result)
    text += "\n"
    if cfg.out:
        try:
            with open(cfg.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"bsq: cannot write {cfg.out}: {exc}", file=sys.stderr)
            return 2, ""
        return 0, ""
    return 0, text


def main(argv=None) -> int:
    code, text = run(sys.argv[1:] if argv is None else argv)
    if text:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
