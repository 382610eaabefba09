"""Command-line interface.

Subcommands: ``stratum``, ``quadric``, ``transversals``, ``perturb``,
``export``, ``skew``.  Global flags: ``--tol`` (scales the relative
rank threshold), ``--seed`` (64-bit; defaults to 0x5EED, overridable by
the GENPOS_SEED environment variable), ``--out``.

Exit codes: 0 success, 1 verification disagreement, 2 precondition or
parse failure, 3 geometric degeneracy, 4 retry exhaustion.  Every
invocation is deterministic given its arguments and seed; sweeps derive
per-trial seeds as seed XOR trial index and report in trial order.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import documents as docs
from .errors import (DegeneracyError, GenposError, PreconditionError,
                     RetryBudgetError)
from .export import write_polylines, write_quadric_mesh
from .grassmann import (affine_single_flag_bound, feasible_single,
                        single_flag_dim, single_flag_dim_geq, stratum_dim_oracle,
                        stratum_witness)
from .plmap import perturb_pl_map, recompute_bound
from .quadric import (classify_quadric, quadric_residuals,
                      quadric_through_three_skew_lines,
                      transversals_to_four_segments)
from .subspace import affine_hull, bridge_flat, jointly_skew, pairwise_skew
from .tolerance import DEFAULT_TOLERANCE

DEFAULT_SEED = 0x5EED
SEED_ENV_VAR = "GENPOS_SEED"

EXIT_OK = 0
EXIT_DISAGREEMENT = 1
EXIT_PRECONDITION = 2
EXIT_DEGENERACY = 3
EXIT_RETRY = 4


def _resolve_seed(args) -> int:
    if args.seed is not None:
        return args.seed & 0xFFFFFFFFFFFFFFFF
    env = os.environ.get(SEED_ENV_VAR)
    if env is not None:
        try:
            return int(env, 0) & 0xFFFFFFFFFFFFFFFF
        except ValueError as exc:
            raise PreconditionError(f"invalid {SEED_ENV_VAR}: {env!r}") from exc
    return DEFAULT_SEED


def _resolve_tol(args):
    return DEFAULT_TOLERANCE.scaled(args.tol) if args.tol != 1.0 else DEFAULT_TOLERANCE


def _emit(doc: dict, out_path: str | None):
    if out_path:
        docs.write_document(out_path, doc)
    else:
        sys.stdout.write(docs.document_text(doc))


def _trial_seed(seed: int, index: int) -> int:
    return (seed ^ index) & 0xFFFFFFFFFFFFFFFF


# ---------------------------------------------------------------------------


def _cmd_stratum(args) -> int:
    tol = _resolve_tol(args)
    m, d, n, r = args.m, args.d, args.n, args.r
    doc: dict = {"kind": "stratum_report", "version": docs.VERSION,
                 "space": "affine" if args.affine else "linear",
                 "m": m, "d": d, "n": n, "r": r}
    if args.affine:
        if not (-1 <= r <= d <= n + d - r <= m):
            print(f"infeasible: need -1 <= r <= d <= n+d-r <= m", file=sys.stderr)
            return EXIT_PRECONDITION
        doc["feasible"] = True
        doc["bound"] = affine_single_flag_bound(m, d, n, r)
        _emit(doc, args.out)
        return EXIT_OK
    feasible = feasible_single(m, d, n, r)
    doc["feasible"] = feasible
    if not feasible:
        print("infeasible: need 0 <= r <= d <= n+d-r <= m", file=sys.stderr)
        return EXIT_PRECONDITION
    value = single_flag_dim(m, d, n, r)
    doc["dimension"] = value
    doc["dimension_at_least_r"] = single_flag_dim_geq(m, d, n, r)
    if args.verify:
        seed = _resolve_seed(args)
        oracle_dims = []
        for i in range(args.witnesses):
            witness = stratum_witness(m, d, n, r, _trial_seed(seed, i))
            oracle_dims.append(stratum_dim_oracle(m, d, n, r, witness, tol))
        agree = all(o == value for o in oracle_dims)
        doc["verify"] = {"witnesses": args.witnesses, "seed": seed,
                         "oracle_dimensions": oracle_dims, "agree": agree}
        _emit(doc, args.out)
        if not agree:
            print(f"DISAGREE: formula {value}, oracle {oracle_dims}", file=sys.stderr)
            return EXIT_DISAGREEMENT
        return EXIT_OK
    _emit(doc, args.out)
    return EXIT_OK


def _cmd_quadric(args) -> int:
    tol = _resolve_tol(args)
    if args.random:
        seed = _resolve_seed(args)
        worst = 0.0
        classes: dict[str, int] = {}
        for i in range(args.random):
            rng = np.random.default_rng(_trial_seed(seed, i))
            pts = rng.uniform(-1.0, 1.0, size=(6, 3))
            q = quadric_through_three_skew_lines(pts, tol)
            resid = quadric_residuals(q, pts, pts[1::2] - pts[0::2])
            worst = max(worst, resid)
            kind = classify_quadric(q, tol)
            classes[kind] = classes.get(kind, 0) + 1
        doc = {"kind": "quadric_sweep", "version": docs.VERSION,
               "trials": args.random, "seed": seed,
               "max_residual": worst,
               "classification_counts": dict(sorted(classes.items()))}
        _emit(doc, args.out)
        return EXIT_OK
    if not args.input:
        print("quadric: provide --in POINTS_DOC or --random N", file=sys.stderr)
        return EXIT_PRECONDITION
    pts = docs.parse_points(docs.read_document(args.input, "points"))
    if pts.shape != (6, 3):
        print("quadric: exactly six 3-points are required", file=sys.stderr)
        return EXIT_PRECONDITION
    q = quadric_through_three_skew_lines(pts, tol)
    resid = quadric_residuals(q, pts, pts[1::2] - pts[0::2])
    doc = docs.quadric_doc(q, classification=classify_quadric(q, tol), residual=resid)
    _emit(doc, args.out)
    return EXIT_OK


def _cmd_transversals(args) -> int:
    tol = _resolve_tol(args)
    if args.sweep:
        seed = _resolve_seed(args)
        histogram: dict[str, int] = {}
        degenerate = 0
        for i in range(args.sweep):
            rng = np.random.default_rng(_trial_seed(seed, i))
            pts = rng.uniform(-1.0, 1.0, size=(8, 3))
            segments = [(pts[2 * k], pts[2 * k + 1]) for k in range(4)]
            try:
                result = transversals_to_four_segments(segments, tol)
            except DegeneracyError:
                degenerate += 1
                continue
            key = str(result.count)
            histogram[key] = histogram.get(key, 0) + 1
        doc = {"kind": "transversal_sweep", "version": docs.VERSION,
               "trials": args.sweep, "seed": seed,
               "histogram": dict(sorted(histogram.items())),
               "degenerate_trials": degenerate}
        _emit(doc, args.out)
        if any(int(k) > 2 for k in histogram):
            print("DISAGREE: some trial produced more than two transversals",
                  file=sys.stderr)
            return EXIT_DISAGREEMENT
        return EXIT_OK
    if not args.input:
        print("transversals: provide --in SEGMENTS_DOC or --sweep N", file=sys.stderr)
        return EXIT_PRECONDITION
    segments = docs.parse_segments(docs.read_document(args.input, "segments"))
    if len(segments) != 4:
        print("transversals: exactly four segments are required", file=sys.stderr)
        return EXIT_PRECONDITION
    result = transversals_to_four_segments(segments, tol)
    extras = [{"segment_parameters": list(map(float, t.segment_parameters))}
              for t in result.transversals]
    doc = docs.lines_doc([t.line for t in result.transversals], extras)
    doc["count"] = result.count
    doc["discriminant"] = float(result.discriminant)
    doc["candidate_points"] = [list(map(float, p)) for p in result.candidate_points]
    _emit(doc, args.out)
    return EXIT_OK


def _cmd_perturb(args) -> int:
    tol = _resolve_tol(args)
    seed = _resolve_seed(args)
    spec = docs.parse_pl_map(docs.read_document(args.input, "pl_map"))
    perturbed, cert = perturb_pl_map(spec, args.case, args.delta, seed,
                                     n=args.n, d=args.d, tol=tol)
    sound = True
    try:
        recomputed = recompute_bound(cert)
    except PreconditionError as exc:
        print(f"certificate unsound: {exc}", file=sys.stderr)
        recomputed = -1
        sound = False
    if not cert.max_perturbation < args.delta / 2.0:
        print("certificate unsound: perturbation exceeds delta/2", file=sys.stderr)
        sound = False
    if any(count > 2 for _, count in cert.transversal_counts):
        print("certificate unsound: transversal count above two", file=sys.stderr)
        sound = False
    spec_doc = docs.pl_map_doc(perturbed)
    cert_doc = docs.certificate_doc(cert, recomputed)
    if args.out:
        docs.write_document(args.out, spec_doc)
        cert_path = args.cert or args.out + ".cert.json"
        docs.write_document(cert_path, cert_doc)
    else:
        sys.stdout.write(docs.document_text(spec_doc))
        if args.cert:
            docs.write_document(args.cert, cert_doc)
        else:
            sys.stdout.write(docs.document_text(cert_doc))
    return EXIT_OK if sound else EXIT_DISAGREEMENT


def _parse_box(text: str):
    parts = [float(p) for p in text.split(",")]
    if len(parts) == 1:
        r = abs(parts[0])
        return np.array([-r, -r, -r]), np.array([r, r, r])
    if len(parts) == 6:
        return np.array(parts[:3]), np.array(parts[3:])
    raise PreconditionError("--box needs R or XMIN,YMIN,ZMIN,XMAX,YMAX,ZMAX")


def _cmd_export(args) -> int:
    box_min, box_max = _parse_box(args.box)
    wrote_any = False
    if args.quadric:
        q = docs.parse_quadric(docs.read_document(args.quadric, "quadric"))
        if not args.mesh_out:
            print("export: --mesh-out is required with --quadric", file=sys.stderr)
            return EXIT_PRECONDITION
        count = write_quadric_mesh(args.mesh_out, q, box_min, box_max,
                                   args.resolution)
        print(f"wrote {count} mesh vertices to {args.mesh_out}", file=sys.stderr)
        wrote_any = True
    lines = []
    segments = []
    if args.lines:
        lines = docs.parse_lines(docs.read_document(args.lines, "lines"))
    if args.segments:
        segments = docs.parse_segments(docs.read_document(args.segments, "segments"))
    if args.lines or args.segments:
        if not args.lines_out:
            print("export: --lines-out is required with --lines/--segments",
                  file=sys.stderr)
            return EXIT_PRECONDITION
        count = write_polylines(args.lines_out, lines, segments, box_min, box_max)
        print(f"wrote {count} polylines to {args.lines_out}", file=sys.stderr)
        wrote_any = True
    if not wrote_any:
        print("export: nothing to export; pass --quadric/--lines/--segments",
              file=sys.stderr)
        return EXIT_PRECONDITION
    return EXIT_OK


def _cmd_skew(args) -> int:
    tol = _resolve_tol(args)
    point_lists = docs.parse_flats(docs.read_document(args.input, "flats"))
    flats = [affine_hull(pts, tol) for pts in point_lists]
    if args.bridge:
        if len(flats) != 3:
            print("skew --bridge: exactly three flats are required", file=sys.stderr)
            return EXIT_PRECONDITION
        flat = bridge_flat(flats[0], flats[1], flats[2], tol)
        doc = {"kind": "flat_report", "version": docs.VERSION,
               "found": flat is not None}
        if flat is not None:
            doc["dim"] = flat.dim
            doc["point"] = list(map(float, flat.base))
            doc["direction_basis"] = [list(map(float, flat.direction.basis[:, j]))
                                      for j in range(flat.direction.dim)]
        _emit(doc, args.out)
        return EXIT_OK
    if len(flats) < 2:
        print("skew: at least two flats are required", file=sys.stderr)
        return EXIT_PRECONDITION
    pair_report = []
    for i in range(len(flats)):
        for j in range(i + 1, len(flats)):
            pair_report.append({"pair": [i, j],
                                "skew": pairwise_skew(flats[i], flats[j], tol)})
    doc = {"kind": "skew_report", "version": docs.VERSION,
           "flat_dims": [f.dim for f in flats],
           "pairwise": pair_report,
           "jointly_skew": jointly_skew(flats, tol)}
    _emit(doc, args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="genpos",
        description="Subspace arithmetic, Grassmann incidence strata, ruled "
                    "quadrics, segment transversals, and general-position "
                    "perturbation of piecewise-linear maps.")
    parser.add_argument("--tol", type=float, default=1.0,
                        help="factor scaling the relative rank threshold")
    parser.add_argument("--seed", type=int, default=None,
                        help=f"64-bit seed (default 0x5EED, or ${SEED_ENV_VAR})")
    parser.add_argument("--out", type=str, default=None,
                        help="write the report document to this path")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("stratum", help="incidence stratum dimensions and bounds")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--affine", action="store_true",
                   help="report the affine-plane upper bound instead")
    p.add_argument("--verify", action="store_true",
                   help="cross-check against the local-dimension oracle")
    p.add_argument("--witnesses", type=int, default=5)
    p.set_defaults(func=_cmd_stratum)

    p = sub.add_parser("quadric", help="quadric through three skew lines")
    p.add_argument("--in", dest="input", type=str, default=None,
                   help="points document with six 3-points")
    p.add_argument("--random", type=int, default=0,
                   help="run N random 6-point trials instead")
    p.set_defaults(func=_cmd_quadric)

    p = sub.add_parser("transversals", help="common transversals to four segments")
    p.add_argument("--in", dest="input", type=str, default=None,
                   help="segments document with four segments")
    p.add_argument("--sweep", type=int, default=0,
                   help="run N random 8-point trials instead")
    p.set_defaults(func=_cmd_transversals)

    p = sub.add_parser("perturb", help="general-position perturbation of a PL map")
    p.add_argument("--in", dest="input", type=str, required=True,
                   help="pl_map document")
    p.add_argument("--case", choices=("a", "b", "c", "d"), required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--n", type=int, default=None,
                   help="dimension budget for marked subcomplexes")
    p.add_argument("--d", type=int, default=1, help="plane dimension for case c")
    p.add_argument("--cert", type=str, default=None,
                   help="write the certificate document to this path")
    p.set_defaults(func=_cmd_perturb)

    p = sub.add_parser("export", help="export meshes and polylines as OBJ")
    p.add_argument("--quadric", type=str, default=None, help="quadric document")
    p.add_argument("--lines", type=str, default=None, help="lines document")
    p.add_argument("--segments", type=str, default=None, help="segments document")
    p.add_argument("--box", type=str, default="2",
                   help="R or XMIN,YMIN,ZMIN,XMAX,YMAX,ZMAX (default [-2,2]^3)")
    p.add_argument("--resolution", type=int, default=48)
    p.add_argument("--mesh-out", type=str, default=None)
    p.add_argument("--lines-out", type=str, default=None)
    p.set_defaults(func=_cmd_export)

    p = sub.add_parser("skew", help="joint/pairwise skewness and bridge flats")
    p.add_argument("--in", dest="input", type=str, required=True,
                   help="flats document (each flat spanned by its points)")
    p.add_argument("--bridge", action="store_true",
                   help="compute the bridge flat through the first flat")
    p.set_defaults(func=_cmd_skew)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except RetryBudgetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RETRY
    except DegeneracyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DEGENERACY
    except (docs.DocumentError, PreconditionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except GenposError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION


if __name__ == "__main__":
    sys.exit(main())
