"""Command-line interface.

Exit codes: 0 success, 2 invalid input, 3 indeterminate genus verdict,
4 internal verification failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import List, Optional

from .core import load_polynomial, normalize
from .errors import AmoebaError, InvalidInput, VerificationFailed

EXIT_OK, EXIT_INVALID, EXIT_INDETERMINATE, EXIT_VERIFICATION = 0, 2, 3, 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InvalidInput(f"usage: {message}")


def _parser() -> argparse.ArgumentParser:
    p = _Parser(prog="circuit-amoeba", description="Genus, bounds and pictures for circuit amoebas.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    a = sub.add_parser("analyze", help="full report")
    a.add_argument("poly")
    a.add_argument("--json", action="store_true", help="emit the JSON report")

    g = sub.add_parser("genus", help="genus verdict with method")
    g.add_argument("poly")

    m = sub.add_parser("member", help="amoeba membership of a log-space point")
    m.add_argument("poly")
    m.add_argument("--point", nargs="+", type=float, required=True)

    lo = sub.add_parser("lopsided", help="lopsidedness certificate at a point")
    lo.add_argument("poly")
    lo.add_argument("--point", nargs="+", type=float, required=True)
    lo.add_argument("--r", type=int, default=1)

    r = sub.add_parser("raster", help="rasterize the amoeba to PGM or SVG")
    r.add_argument("poly")
    r.add_argument("--window", nargs=4, type=float, metavar=("XMIN", "XMAX", "YMIN", "YMAX"))
    r.add_argument("--res", type=int, default=256)
    r.add_argument("--out", required=True)
    r.add_argument("--overlay", default="", help="comma list of spine,tropC,eq,eqset")
    r.add_argument("--threads", type=int, default=1)

    rg = sub.add_parser("region", help="SVG of the solid region in the c-plane")
    rg.add_argument("poly")
    rg.add_argument("--samples", type=int, default=720)
    rg.add_argument("--out", required=True)

    pa = sub.add_parser("path", help="genus-1 path between two instances")
    pa.add_argument("a")
    pa.add_argument("b")
    pa.add_argument("--steps", type=int, default=100)
    pa.add_argument("--out", required=True)

    d = sub.add_parser("discriminant", help="discriminant binomial and membership")
    d.add_argument("poly")
    return p


def _err(kind: str, message: str) -> None:
    sys.stderr.write(json.dumps({"error": kind, "message": message}) + "\n")


def _write(path: str, data) -> None:
    mode = "wb" if isinstance(data, bytes) else "w"
    with open(path, mode) as fh:
        fh.write(data)


def _overlays(f, window, res, names: List[str]):
    from .equilibrium import equilibrium_points
    from .tropical import complement_induced_curve, equilibrium_set_raster, spine
    from .classify import classify_genus
    out = {}
    report = classify_genus(f) if {"spine", "tropC"} & set(names) else None
    if "spine" in names:
        out["spine"] = spine(f, report)
    if "tropC" in names:
        out["tropC"] = complement_induced_curve(f, report)
    if "eq" in names:
        out["eq_points"] = equilibrium_points(f) if f.c != 0 else []
    if "eqset" in names:
        out["equilibrium_set"] = equilibrium_set_raster(f, window, res)
    unknown = set(names) - {"spine", "tropC", "eq", "eqset"}
    if unknown:
        raise InvalidInput(f"--overlay: unknown layer(s) {sorted(unknown)}")
    return out


def _run(args) -> int:
    cmd = args.command
    if cmd == "path":
        from .barycentric import path_connect
        p = path_connect(load_polynomial(args.a), load_polynomial(args.b), steps=args.steps)
        _write(args.out, json.dumps(p.to_json(), indent=1, sort_keys=True))
        print(f"path samples={p.sample_count()} kappa={p.kappa:.6g} out={args.out}")
        return EXIT_OK

    f = load_polynomial(args.poly)
    if cmd == "analyze":
        from .report import analysis_report, dumps_report, format_report
        rep = analysis_report(f)
        print(dumps_report(rep) if args.json else format_report(rep))
        return EXIT_OK
    if cmd == "genus":
        from .classify import classify_genus
        rep = classify_genus(f)
        print(rep.summary())
        return EXIT_INDETERMINATE if rep.verdict == "Indeterminate" else EXIT_OK
    if cmd in ("member", "lopsided"):
        if len(args.point) != f.n:
            raise InvalidInput(f"--point: expected {f.n} coordinates, got {len(args.point)}")
    if cmd == "member":
        from .fiber import membership
        v = membership(normalize(f), args.point)
        order = "" if v.order is None else " order=(" + ",".join(map(str, v.order)) + ")"
        print(f"status={v.status} method={v.method} residual={v.min_residual:.3g}{order}")
        return EXIT_OK
    if cmd == "lopsided":
        from .lopsided import lopsided_outside_certificate, refined_membership
        if args.r < 1:
            raise InvalidInput("--r must be a positive integer")
        if args.r == 1:
            o = lopsided_outside_certificate(normalize(f), args.point)
        else:
            cert = refined_membership(normalize(f), args.point, args.r)
            o = None if cert is None else cert.order
        if o is None:
            print(f"lopsided=false r={args.r}")
        else:
            print(f"lopsided=true r={args.r} order=(" + ",".join(map(str, o)) + ")")
        return EXIT_OK
    if cmd == "raster":
        from .render import default_window, raster_amoeba, render_svg, to_pgm
        window = tuple(args.window) if args.window else default_window(f)
        grid = raster_amoeba(f, window, args.res, threads=args.threads)
        names = [s for s in args.overlay.split(",") if s]
        if args.out.endswith(".pgm"):
            if names:
                raise InvalidInput("--overlay needs SVG output")
            _write(args.out, to_pgm(grid))
        else:
            _write(args.out, render_svg(grid, _overlays(normalize(f), window, args.res, names)))
        bounded = len(grid.bounded_components())
        print(f"raster res={args.res} bounded_components={bounded} out={args.out}")
        return EXIT_OK
    if cmd == "region":
        from .barycentric import region_geometry
        from .render import render_region_svg
        if args.samples < 8:
            raise InvalidInput("--samples must be at least 8")
        g = region_geometry(normalize(f))
        _write(args.out, render_region_svg(g, args.samples, c=normalize(f).c))
        print(f"region cusps={len(g.cusp_args)} out={args.out}")
        return EXIT_OK
    if cmd == "discriminant":
        from .discriminant import discriminant_binomial, discriminant_relative_residual
        from .report import jsonable
        out = discriminant_binomial(f.support).to_json()
        nf = normalize(f)
        if nf.c != 0:
            res = discriminant_relative_residual(nf)
            out.update(relative_residual=res, on_discriminant=res < 1e-9)
        else:
            out.update(relative_residual=None, on_discriminant=False)
        print(json.dumps(jsonable(out), sort_keys=True))
        return EXIT_OK
    raise InvalidInput(f"unknown command {cmd}")


def main(argv: Optional[List[str]] = None) -> int:
    try:
        args = _parser().parse_args(argv)
        return _run(args)
    except VerificationFailed as exc:
        _err("VerificationFailed", str(exc))
        return EXIT_VERIFICATION
    except (InvalidInput, ValueError) as exc:
        _err(type(exc).__name__, str(exc))
        return EXIT_INVALID
    except OSError as exc:
        _err("IoError", str(exc))
        return EXIT_INVALID
    except AmoebaError as exc:
        _err(type(exc).__name__, str(exc))
        return EXIT_INVALID


cli = main


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
