"""Command line driver: ``rankcodes <command> --field p^a:n:s ...``.

Exit codes: 0 pass, 1 property violation, 2 invalid input or guard exceeded,
3 inconclusive comparison.
"""

from __future__ import annotations

import argparse
import io
import json
import re
import sys

import numpy as np

from .analysis import (
    MatrixCode,
    code_report,
    distance_witness,
    inequivalence_report,
    left_idealiser,
    puncture_code,
    right_idealiser,
)
from .codes import DEFAULT_GUARD, parse_code_spec, read_codewords, write_codewords
from .errors import GuardError, RankCodesError
from .field import parse_field_spec
from .geometry import verify_construction

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_INCONCLUSIVE = 0, 1, 2, 3
GEOMETRY_GUARD = 10**8


def _common(p):
    p.add_argument("--field", required=True, help="field spec p^a:n:s, e.g. 3^1:3:1")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="output path (default stdout)")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--guard", type=int, default=DEFAULT_GUARD, help="enumeration guard (codewords)")
    p.add_argument("--workers", type=int, default=None, help="worker processes (default $RMF_THREADS or 1)")
    p.add_argument("--timing", action="store_true", help="record wall-clock runtime in reports")


def _code_args(p, many=False):
    p.add_argument("--code", action="append", default=[], help="code spec, e.g. cst:k=2,T=1")
    p.add_argument("--code-file", action="append", default=[], help="file of coefficient tuples")
    p.add_argument("--claimed", type=int, default=None, help="claimed distance for --code-file codes")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="rankcodes", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("construct", help="enumerate a code")
    _common(p)
    _code_args(p)
    p.add_argument("--header", action="store_true", help="write a '#' header line with the claim")

    p = sub.add_parser("verify", help="certify the MRD property")
    _common(p)
    _code_args(p)
    p.add_argument("--mode", choices=["exhaustive", "quotient", "sampled"], default="exhaustive")
    p.add_argument("--no-flags", action="store_true", help="skip closure flags")

    p = sub.add_parser("geometry", help="check the cone construction")
    _common(p)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--T", default="1", help="comma separated subfield labels")

    p = sub.add_parser("compare", help="invariant-based inequivalence report")
    _common(p)
    _code_args(p)

    p = sub.add_parser("puncture", help="report on the punctured code")
    _common(p)
    _code_args(p)
    p.add_argument("--u", type=int, required=True)
    p.add_argument("--model", choices=["subgeometry", "matrix_rows"], default="subgeometry")
    p.add_argument("--mode", choices=["exhaustive", "sampled"], default="exhaustive")

    p = sub.add_parser("idealiser", help="left and right idealisers by brute force")
    _common(p)
    _code_args(p)
    p.add_argument("--matrix-file", help="matrices over F_q, one per line, rows split by ';'")
    p.add_argument("--side", choices=["left", "right", "both"], default="both")
    return ap


# -- helpers ------------------------------------------------------------------------


def _claim_from_header(path):
    with open(path) as fh:
        for line in fh:
            if line.startswith("#"):
                m = re.search(r"claimed_distance=(\d+)", line)
                if m:
                    return int(m.group(1))
    return None


def _load_codes(F, args):
    codes = []
    for spec in args.code:
        codes.append(parse_code_spec(F, spec))
    for path in args.code_file:
        claimed = args.claimed if args.claimed is not None else _claim_from_header(path)
        with open(path) as fh:
            codes.append(read_codewords(F, fh, claimed, path))
    for c in codes:
        c.enumerate(guard=args.guard)
    return codes


def _one_code(F, args):
    codes = _load_codes(F, args)
    if len(codes) != 1:
        raise RankCodesError("exactly one of --code / --code-file is required")
    return codes[0]


def _emit(args, payload):
    if args.format == "csv":
        buf = io.StringIO()
        dist = payload.get("distance_distribution")
        if dist is None:
            raise RankCodesError("csv output is only available for distance distributions")
        buf.write("rank,count\n")
        for r, c in dist.items():
            buf.write(f"{r},{c}\n")
        text = buf.getvalue()
    else:
        text = json.dumps(payload, indent=2) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _labels(F, text):
    vals = [t for t in text.split(",") if t.strip()]
    if not vals:
        raise RankCodesError("--T needs at least one label")
    return [F.from_label(int(v)) for v in vals]


# -- commands -----------------------------------------------------------------------


def cmd_construct(args) -> int:
    F = parse_field_spec(args.field)
    code = _one_code(F, args)
    words = code.enumerate(guard=args.guard)
    fh = open(args.out, "w") if args.out else sys.stdout
    try:
        if args.header:
            fh.write(f"# field={F.spec} code={code.describe()} size={len(words)} "
                     f"claimed_distance={code.claimed_distance}\n")
        write_codewords(words, fh)
    finally:
        if args.out:
            fh.close()
    summary = f"size={len(words)} claimed_distance={code.claimed_distance}"
    print(summary, file=sys.stdout if args.out else sys.stderr)
    return EXIT_OK


def _failure_witness(code, report):
    d, claimed = report["min_distance"], report["claimed_distance"]
    if claimed is not None and d < claimed:
        return distance_witness(code, claimed)
    bound = report["singleton_bound"]
    if bound is not None and report["size"] != bound:
        return {"size": report["size"], "singleton_bound": bound}
    return distance_witness(code, d + 1)


def cmd_verify(args) -> int:
    F = parse_field_spec(args.field)
    if args.mode == "sampled":
        raise RankCodesError("verify certifies; sampled mode is refused")
    code = _one_code(F, args)
    report = code_report(code, mode=args.mode, seed=args.seed, timing=args.timing,
                         workers=args.workers, flags=not args.no_flags)
    ok = report["is_mrd"] and (report["claimed_distance"] is None
                               or report["min_distance"] == report["claimed_distance"])
    if not ok:
        report["witness"] = _failure_witness(code, report)
    _emit(args, report)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_geometry(args) -> int:
    F = parse_field_spec(args.field)
    T = _labels(F, args.T)
    Q = F.order
    n_k = (Q**args.k - 1) // (Q - 1) if 2 <= args.k <= F.n - 1 else 0
    if n_k * n_k * Q // 2 > GEOMETRY_GUARD:
        raise GuardError(f"cone line scan over {n_k} points exceeds the geometry guard")
    report = verify_construction(F, args.k, T)
    report["T_labels"] = [int(t) for t in args.T.split(",") if t.strip()]
    _emit(args, report)
    return EXIT_OK if report["ok"] else EXIT_FAIL


def cmd_compare(args) -> int:
    F = parse_field_spec(args.field)
    codes = _load_codes(F, args)
    if len(codes) != 2:
        raise RankCodesError("compare needs exactly two codes")
    report = inequivalence_report(codes[0], codes[1])
    _emit(args, report)
    return EXIT_OK if report["verdict"] == "DISTINGUISHED" else EXIT_INCONCLUSIVE


def cmd_puncture(args) -> int:
    F = parse_field_spec(args.field)
    code = _one_code(F, args)
    pc = puncture_code(code, args.u, args.model)
    report = code_report(pc, mode=args.mode, seed=args.seed, timing=args.timing, workers=args.workers)
    report["shape"] = list(pc.shape)
    report["model"] = args.model
    ok = report["is_mrd"]
    if not ok:
        report["witness"] = _failure_witness(pc, report)
    _emit(args, report)
    return EXIT_OK if ok else EXIT_FAIL


def _read_matrices(F, path):
    mats = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            mats.append([[int(v) for v in row.split(",")] for row in line.split(";")])
    if not mats:
        raise RankCodesError("matrix file is empty")
    arr = np.array(mats, dtype=np.int64)
    if not np.isin(arr, F.subfield_elements()).all():
        raise RankCodesError("matrix entries must lie in F_q")
    return MatrixCode(F, arr, None, path)


def _ideal_json(I):
    out = {"size": I.size, "invertible": I.invertible, "is_field": I.is_field}
    if I.size <= 64:
        out["matrices"] = [";".join(",".join(str(int(v)) for v in row) for row in M.entries)
                           for M in I.matrices]
    return out


def cmd_idealiser(args) -> int:
    F = parse_field_spec(args.field)
    code = _read_matrices(F, args.matrix_file) if args.matrix_file else _one_code(F, args)
    report = {"field": F.spec, "code": code.describe()}
    if args.side in ("left", "both"):
        report["left"] = _ideal_json(left_idealiser(code))
    if args.side in ("right", "both"):
        report["right"] = _ideal_json(right_idealiser(code))
    _emit(args, report)
    return EXIT_OK


COMMANDS = {
    "construct": cmd_construct,
    "verify": cmd_verify,
    "geometry": cmd_geometry,
    "compare": cmd_compare,
    "puncture": cmd_puncture,
    "idealiser": cmd_idealiser,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return COMMANDS[args.command](args)
    except (RankCodesError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
