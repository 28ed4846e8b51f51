"""Command-line entry point (``ununfold``).

Exit codes: 0 success (for ``verify-hat``: no single-piece unfolding), 2 a
single-piece unfolding was found, 1 any other error, 64 bad usage.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import constructions as C
from .errors import UnunfoldError
from .io import dumps_report, export_mesh, export_svg, import_mesh, read_cuts, write_cuts
from .mesh import curvature_report
from .predicates import Contact, piece_contacts
from .unfold import develop, path_edges
from .verify import (
    audit_cut_set,
    enumerate_lemma3_paths,
    search_unfolding,
    theorem_lower_bound,
    verify_hat_no_single_piece,
)

EXIT_OK, EXIT_ERROR, EXIT_FOUND, EXIT_USAGE = 0, 1, 2, 64
MODES = ("float", "interval", "mp")


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _default_mode() -> str:
    mode = os.environ.get("UNUNFOLD_PRECISION", "interval")
    if mode not in MODES:
        raise _UsageError(f"UNUNFOLD_PRECISION must be one of {', '.join(MODES)}, got {mode!r}")
    return mode


def _cmd_generate(args):
    kind = args.kind
    if kind in ("subdivided", "stacked") and args.k is None:
        raise _UsageError(f"generate {kind} requires --k")
    if kind == "acute-hat":
        mesh, _ = C.acute_hat()
    elif kind == "stacked-hat":
        mesh, _ = C.stacked_hat()
    elif kind == "flat-hat":
        mesh = C.flat_hat()
    elif kind == "caltrop":
        mesh = C.caltrop()
    elif kind == "subdivided":
        mesh = C.subdivided_caltrop(args.k)
    else:
        mesh, _ = C.stacked_family(args.k)
    export_mesh(mesh, args.out)
    print(f"{mesh.name}: {mesh.n_vertices} vertices, {mesh.n_faces} faces -> {args.out}")
    return EXIT_OK


def _cmd_curvature(args):
    mesh = import_mesh(args.mesh)
    rep = curvature_report(mesh)
    print("vertex  angle_sum      deficit        boundary")
    for v, (s, d, b) in enumerate(zip(rep.angle_sum, rep.deficit, rep.boundary)):
        print(f"{v + 1:>6}  {s:<13.9f}  {d:<13.9f}  {'yes' if b else 'no'}")
    print(f"negative: {len(rep.negative())}  positive: {len(rep.positive())}  "
          f"total deficit: {rep.total_deficit:.9f}")
    return EXIT_OK


def _cmd_unfold(args):
    mesh = import_mesh(args.mesh)
    cuts = read_cuts(args.cuts, mesh)
    unf = develop(mesh, cuts, args.mode or _default_mode())
    overlaps = set()
    for piece in unf.pieces:
        overlaps |= {p for p, c in piece_contacts(piece, strict=False).items() if c is Contact.OVERLAP}
    print(f"pieces: {len(unf.pieces)}")
    print(f"overlapping face pairs: {len(overlaps)}")
    for f, g in sorted(overlaps):
        print(f"  {f} {g}")
    if args.svg:
        export_svg(unf, args.svg, overlaps=overlaps, gap=args.gap)
    return EXIT_OK


def _cmd_verify_hat(args):
    hat = import_mesh(args.mesh)
    rep = verify_hat_no_single_piece(hat, mode=args.mode or _default_mode(), jobs=args.jobs, mesh_id=hat.name)
    text = dumps_report(rep.to_dict(include_timing=args.timing))
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    n_ok = sum(1 for o in rep.outcomes if o.certified_overlaps > 0)
    print(f"{rep.mesh_id}: {n_ok}/{rep.enumeration_size} spanning trees overlap "
          f"(matrix-tree count {rep.matrix_tree_count}, mode {rep.mode}); "
          f"no single-piece unfolding: {str(rep.conclusion).lower()}", file=sys.stderr)
    return EXIT_OK if rep.conclusion else EXIT_FOUND


def _cmd_enumerate_paths(args):
    hat = import_mesh(args.mesh)
    census = enumerate_lemma3_paths(hat)
    for c, members in enumerate(census.classes):
        for i in members:
            print(f"class {c}: " + " ".join(str(v + 1) for v in census.paths[i]))
    print(f"paths: {len(census.paths)}  classes: {census.n_classes}  symmetries: {census.group_order}")
    return EXIT_OK


def _cmd_lower_bound(args):
    print(theorem_lower_bound(args.variant, args.k))
    return EXIT_OK


def _cmd_audit(args):
    mesh = import_mesh(args.mesh)
    if args.cuts:
        cuts = read_cuts(args.cuts, mesh)
    else:
        found = search_unfolding(mesh, seed=args.seed)
        cuts = found.cuts
        print(f"search: {found.n_pieces} pieces after {found.trials} trials "
              f"(runs: {' '.join(map(str, found.history))})", file=sys.stderr)
        if args.save_cuts:
            write_cuts(args.save_cuts, mesh, cuts)
    doc = audit_cut_set(mesh, cuts, mode=args.mode or "float")
    sys.stdout.write(dumps_report(doc))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ununfold", description="Hat constructions and unfolding certificates.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("generate", help="write a hat or polyhedron as OBJ")
    g.add_argument("kind", choices=["acute-hat", "stacked-hat", "flat-hat", "caltrop", "subdivided", "stacked"])
    g.add_argument("--k", type=int)
    g.add_argument("--out", required=True)
    g.set_defaults(func=_cmd_generate)

    c = sub.add_parser("curvature", help="angle sums and deficits per vertex")
    c.add_argument("mesh")
    c.set_defaults(func=_cmd_curvature)

    u = sub.add_parser("unfold", help="develop a cut surface, optionally to SVG")
    u.add_argument("mesh")
    u.add_argument("--cuts", required=True)
    u.add_argument("--svg")
    u.add_argument("--gap", type=float, default=0.25)
    u.add_argument("--mode", choices=MODES)
    u.set_defaults(func=_cmd_unfold)

    v = sub.add_parser("verify-hat", help="check every single-piece unfolding of a hat")
    v.add_argument("mesh")
    v.add_argument("--mode", choices=MODES)
    v.add_argument("--report")
    v.add_argument("--jobs", type=int, default=1)
    v.add_argument("--timing", action="store_true", help="include wall time (breaks byte-identical output)")
    v.set_defaults(func=_cmd_verify_hat)

    e = sub.add_parser("enumerate-paths", help="boundary-to-center cut paths of a hat")
    e.add_argument("mesh")
    e.set_defaults(func=_cmd_enumerate_paths)

    lb = sub.add_parser("lower-bound", help="minimum piece count of a family member")
    lb.add_argument("variant", choices=["subdivided", "stacked"])
    lb.add_argument("--k", type=int, required=True)
    lb.set_defaults(func=_cmd_lower_bound)

    a = sub.add_parser("audit", help="audit a cut set (or search for one)")
    a.add_argument("mesh")
    a.add_argument("--cuts")
    a.add_argument("--seed", type=int, default=0)
    a.add_argument("--save-cuts")
    a.add_argument("--mode", choices=MODES)
    a.set_defaults(func=_cmd_audit)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    except _UsageError as exc:
        print(f"ununfold: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (UnunfoldError, ValueError) as exc:
        print(f"ununfold: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
