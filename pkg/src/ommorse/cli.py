"""Command line pipeline: load, validate, order, shell, match, verify, report.

Exit codes: 0 success, 1 input or validation problem, 2 a theorem-backed
runtime assertion failed, 3 a size limit would be exceeded.  Identical
inputs produce byte-identical JSON output.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from dataclasses import dataclass
from pathlib import Path

from .arrangement import Arrangement, count_topes_sweep, parse_arrangement
from .errors import InputError, LimitError, OmmorseError, TheoremViolationError
from .nbc import (circuits, critical_cells_via_nbc, eta, nbc_complex,
                  verify_corresp, verify_restriction_lemma)
from .posets import is_cw_poset
from .salvetti import (FlatPoset, build_salvetti, cell_dimension,
                       critical_euler_characteristic, euler_characteristic,
                       patchwork_matching, tec_lm_flat, compute_XC)
from .shelling import matching_from_ordering
from .signs import SignVector, parse_covector_file
from .topeposet import (TopePoset, cut_property_check, generate_cut_ordering,
                        lex_extension, shelling_of_face_poset)

DEFAULT_MAX_N = 12
DEFAULT_MAX_D = 6


@dataclass
class RunConfig:
    arrangement: Arrangement | None
    matroid: object
    base: SignVector
    order: tuple
    extension: tuple
    fmt: str


def _emit(payload, fmt, text_renderer):
    if fmt == "json":
        sys.stdout.write(json.dumps(payload, sort_keys=True,
                                    separators=(",", ":")) + "\n")
    else:
        sys.stdout.write(text_renderer(payload))


def _load(args):
    if bool(args.arrangement) == bool(args.covectors):
        raise InputError("exactly one of --arrangement/--covectors is required")
    arr = None
    if args.arrangement:
        arr = parse_arrangement(Path(args.arrangement).read_text())
        if not args.unsafe_limits and (arr.n > args.max_n or arr.d > args.max_d):
            raise LimitError(
                f"n={arr.n}, d={arr.d} exceed limits {args.max_n}/{args.max_d}")
        matroid = arr.matroid()
    else:
        matroid = parse_covector_file(Path(args.covectors).read_text())
        if not args.unsafe_limits and matroid.n > args.max_n:
            raise LimitError(f"n={matroid.n} exceeds limit {args.max_n}")
    return arr, matroid


def _resolve_base(args, matroid) -> SignVector:
    if not args.base:
        raise InputError("--base is required for this command")
    base = SignVector.from_string(args.base)
    if base.n != matroid.n or not matroid.is_tope(base):
        raise InputError(f"{args.base} is not a tope of the input")
    return base


def _resolve_order(args, arr, matroid, base):
    if args.order == "cut-auto":
        if arr is None:
            # purely combinatorial gallery; cut property is not certified
            from .topeposet import gallery_from_base
            return gallery_from_base(matroid, base)
        return generate_cut_ordering(arr, base)
    order = tuple(int(x) for x in args.order.split(","))
    if sorted(order) != list(range(matroid.n)):
        raise InputError(f"--order must be a permutation of 0..{matroid.n - 1}")
    return order


def _resolve_extension(args, matroid, base, order):
    if args.extension == "lex":
        return lex_extension(matroid, base, hyperplane_order=order)
    if args.extension.startswith("file:"):
        path = Path(args.extension[5:])
        topes = [SignVector.from_string(line)
                 for line in path.read_text().splitlines()
                 if line.strip() and not line.startswith("#")]
        tp = TopePoset(matroid, base)
        if not tp.is_linear_extension(topes):
            raise InputError("extension file is not a linear extension")
        return tuple(topes)
    raise InputError("--extension must be 'lex' or 'file:<path>'")


def _config(args, need_base=True) -> RunConfig:
    arr, matroid = _load(args)
    base = _resolve_base(args, matroid) if need_base else None
    order = _resolve_order(args, arr, matroid, base) if need_base else tuple(range(matroid.n))
    ext = _resolve_extension(args, matroid, base, order) if need_base else ()
    return RunConfig(arr, matroid, base, order, ext, args.format)


# ------------------------------------------------------------------ commands

def cmd_build(args):
    arr, matroid = _load(args)
    payload = {
        "ground_size": matroid.n,
        "covectors": [str(v) for v in matroid.covectors],
        "topes": [str(t) for t in matroid.topes],
    }
    if arr is not None:
        lattice = arr.lattice()
        payload["dim"] = arr.d
        payload["flats"] = [sorted(f.support) for f in lattice]
        payload["codims"] = [f.codim for f in lattice]
        payload["tope_count_sweep"] = count_topes_sweep(arr)
        if payload["tope_count_sweep"] != len(matroid.topes):
            raise TheoremViolationError("tope counts disagree between methods")

    def text(p):
        lines = [f"ground size: {p['ground_size']}",
                 f"covectors ({len(p['covectors'])}): {' '.join(p['covectors'])}",
                 f"topes ({len(p['topes'])}): {' '.join(p['topes'])}"]
        if "flats" in p:
            lines.append("flats: " + "; ".join(str(f) for f in p["flats"]))
        return "\n".join(lines) + "\n"

    _emit(payload, args.format, text)
    return 0


def cmd_shell(args):
    cfg = _config(args)
    sto = shelling_of_face_poset(cfg.matroid, cfg.base, cfg.extension)
    payload = {
        "order": [str(x) for x in sto.order],
        "levels": [[str(x) for x in level] for level in sto.level_orders],
    }

    def text(p):
        lines = ["shelling-type order: " + " ".join(p["order"])]
        for i, level in enumerate(p["levels"]):
            lines.append(f"level {i}: " + " ".join(level))
        return "\n".join(lines) + "\n"

    _emit(payload, args.format, text)
    return 0


def cmd_match(args):
    cfg = _config(args)
    sto = shelling_of_face_poset(cfg.matroid, cfg.base, cfg.extension)
    matching = matching_from_ordering(sto)
    critical = matching.critical(sto.poset)
    payload = {
        "pairs": sorted([str(p), str(q)] for p, q in matching.pairs),
        "critical": sorted(str(c) for c in critical),
    }

    def text(p):
        return ("pairs: " + "; ".join(f"({a},{b})" for a, b in p["pairs"]) +
                "\ncritical: " + " ".join(p["critical"]) + "\n")

    _emit(payload, args.format, text)
    return 0


def cmd_salvetti(args):
    cfg = _config(args)
    poset = build_salvetti(cfg.matroid)
    flats = FlatPoset(cfg.matroid)
    pm = patchwork_matching(cfg.matroid, cfg.base, cfg.extension,
                            poset=poset, flats=flats)
    cells_by_dim = {}
    for cell in poset.elements:
        cells_by_dim.setdefault(cell_dimension(flats, cell), 0)
        cells_by_dim[cell_dimension(flats, cell)] += 1
    payload = {
        "cells": [c.label() for c in poset.elements],
        "covers": sorted([a.label(), b.label()] for a, b in poset.covers),
        "strata": [{"tope": str(s.tope), "flat": sorted(s.x_support),
                    "cells": [c.label() for c in s.cells]}
                   for s in pm.stratification.strata],
        "matching": sorted([a.label(), b.label()] for a, b in pm.matching.pairs),
        "critical": [{"cell": c.label(), "dim": d} for c, d in pm.critical],
        "cells_per_dim": {str(k): v for k, v in sorted(cells_by_dim.items())},
    }

    def text(p):
        lines = [f"cells: {len(p['cells'])}",
                 "cells per dim: " + ", ".join(f"{k}: {v}" for k, v in p["cells_per_dim"].items()),
                 "critical cells:"]
        for c in p["critical"]:
            lines.append(f"  {c['cell']}  dim {c['dim']}")
        return "\n".join(lines) + "\n"

    _emit(payload, args.format, text)
    return 0


def cmd_nbc(args):
    cfg = _config(args)
    if cfg.arrangement is None:
        raise InputError("nbc needs an arrangement input")
    ok, j = cut_property_check(cfg.arrangement, cfg.base, cfg.order)
    if not ok:
        raise InputError(f"ordering fails the cut property at position {j}")
    table = eta(cfg.arrangement, cfg.base, cfg.order)
    payload = {
        "circuits": [sorted(c) for c in circuits(cfg.arrangement)],
        "nbc": [sorted(s) for s in nbc_complex(cfg.arrangement, cfg.order)],
        "eta": {str(c): sorted(table[c]) for c in table},
    }

    def text(p):
        lines = ["circuits: " + "; ".join(map(str, p["circuits"])),
                 "nbc sets: " + "; ".join(map(str, p["nbc"])),
                 "eta:"]
        for c in sorted(p["eta"]):
            lines.append(f"  {c} -> {p['eta'][c]}")
        return "\n".join(lines) + "\n"

    _emit(payload, args.format, text)
    return 0


def cmd_verify_all(args):
    cfg = _config(args)
    matroid = cfg.matroid
    checks = {}
    witness = None
    try:
        flats = FlatPoset(matroid)
        # propJc, ciliegina, contr, grezzo: asserted inside the pipeline
        pm = patchwork_matching(matroid, cfg.base, cfg.extension, flats=flats)
        checks["propJc_ciliegina_contr_maxmat"] = True
        # tec_lm agreement
        for c in cfg.extension:
            if compute_XC(matroid, flats, cfg.extension, c) != \
                    tec_lm_flat(matroid, flats, cfg.extension, c):
                raise TheoremViolationError(f"tec_lm flat differs at {c}")
        checks["tec_lm"] = True
        # linext_acmatch on the face poset
        sto = shelling_of_face_poset(matroid, cfg.base, cfg.extension)
        matching = matching_from_ordering(sto)
        crit = matching.critical(sto.poset)
        if list(crit) != [-cfg.base]:
            raise TheoremViolationError(
                f"face-poset criticals {[str(c) for c in crit]}")
        checks["linext_acmatch"] = True
        checks["cw_poset"] = is_cw_poset(pm.poset)
        if not checks["cw_poset"]:
            raise TheoremViolationError("cell poset fails the diamond condition")
        euler_cells = euler_characteristic(flats, pm.poset)
        euler_crit = critical_euler_characteristic(pm.critical)
        if euler_cells != euler_crit:
            raise TheoremViolationError("Euler characteristics disagree")
        checks["euler"] = True
        if cfg.arrangement is not None:
            arr = cfg.arrangement
            if count_topes_sweep(arr) != len(matroid.topes):
                raise TheoremViolationError("tope counts disagree")
            checks["tope_count"] = True
            ok, wit = verify_restriction_lemma(arr, cfg.base, cfg.order)
            if not ok:
                raise TheoremViolationError(f"restriction lemma fails: {wit}")
            checks["inters_nbc"] = True
            eta(arr, cfg.base, cfg.order)
            checks["jobij"] = True
            if tuple(cfg.extension) == lex_extension(matroid, cfg.base,
                                                     hyperplane_order=cfg.order):
                verify_corresp(arr, cfg.base, cfg.order)
                checks["corresp"] = True
                cells = critical_cells_via_nbc(arr, cfg.base, cfg.order)
                sizes = sorted(d for _, d in cells)
                nbc_sizes = sorted(len(s) for s in nbc_complex(arr, cfg.order))
                if sizes != nbc_sizes:
                    raise TheoremViolationError("critical dims differ from nbc sizes")
                checks["result"] = True
    except TheoremViolationError as exc:
        witness = str(exc)

    payload = {"checks": checks, "ok": witness is None, "witness": witness}

    def text(p):
        lines = [f"{name}: {'ok' if val else 'FAIL'}"
                 for name, val in p["checks"].items()]
        lines.append("all ok" if p["ok"] else f"VIOLATION: {p['witness']}")
        return "\n".join(lines) + "\n"

    _emit(payload, args.format, text)
    return 0 if witness is None else 2


def cmd_report(args):
    cfg = _config(args)
    if cfg.arrangement is None:
        raise InputError("report needs an arrangement input")
    arr = cfg.arrangement
    matroid = cfg.matroid
    flats = FlatPoset(matroid)
    table = eta(arr, cfg.base, cfg.order)
    ext = lex_extension(matroid, cfg.base, hyperplane_order=cfg.order)
    pm = patchwork_matching(matroid, cfg.base, ext, flats=flats)
    crit_of = {c.tope: (c, d) for c, d in pm.critical}
    rows = []
    for c in ext:
        sigma = "".join("0" if c.sign(e) == cfg.base.sign(e) else "1"
                        for e in cfg.order)
        x = compute_XC(matroid, flats, ext, c)
        cell, dim = crit_of[c]
        rows.append({"chamber": str(c), "sigma": sigma,
                     "eta": sorted(table[c]), "flat": sorted(x),
                     "critical": cell.label(), "dim": dim})
    cells_per_dim = {}
    for cell in pm.poset.elements:
        d = cell_dimension(flats, cell)
        cells_per_dim[d] = cells_per_dim.get(d, 0) + 1
    crit_per_dim = {}
    for _, d in pm.critical:
        crit_per_dim[d] = crit_per_dim.get(d, 0) + 1
    payload = {
        "rows": rows,
        "cells_per_dim": {str(k): v for k, v in sorted(cells_per_dim.items())},
        "critical_per_dim": {str(k): v for k, v in sorted(crit_per_dim.items())},
        "euler": euler_characteristic(flats, pm.poset),
    }

    def text(p):
        header = f"{'chamber':<10}{'sigma':<8}{'eta':<14}{'flat':<14}{'critical':<22}dim"
        lines = [header, "-" * len(header)]
        for r in p["rows"]:
            lines.append(f"{r['chamber']:<10}{r['sigma']:<8}"
                         f"{str(r['eta']):<14}{str(r['flat']):<14}"
                         f"{r['critical']:<22}{r['dim']}")
        lines.append("cells per dim:    " +
                     ", ".join(f"{k}: {v}" for k, v in p["cells_per_dim"].items()))
        lines.append("critical per dim: " +
                     ", ".join(f"{k}: {v}" for k, v in p["critical_per_dim"].items()))
        lines.append(f"euler characteristic: {p['euler']}")
        return "\n".join(lines) + "\n"

    _emit(payload, args.format, text)
    return 0


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ommorse",
        description="Discrete Morse data for complexified linear arrangements.",
        epilog="Arrangement files: first data line 'n d', then n rows of d "
               "rationals (p/q or integers); '#' comments. Covector files: "
               "one sign vector per line over +-0. Extension files: one tope "
               "sign string per line, listing every tope.")
    parser.add_argument("--seed", type=int, default=0,
                        help="seed for any randomized sampling")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in [("build", cmd_build), ("shell", cmd_shell),
                     ("match", cmd_match), ("salvetti", cmd_salvetti),
                     ("nbc", cmd_nbc), ("verify-all", cmd_verify_all),
                     ("report", cmd_report)]:
        p = sub.add_parser(name)
        p.add_argument("--arrangement", help="arrangement file")
        p.add_argument("--covectors", help="abstract covector file")
        p.add_argument("--base", help="base chamber sign string, e.g. +++")
        p.add_argument("--order", default="cut-auto",
                       help="hyperplane order: comma list like 1,2,0 or cut-auto")
        p.add_argument("--extension", default="lex",
                       help="linear extension: lex or file:<path>")
        p.add_argument("--format", choices=["text", "json"], default="text")
        p.add_argument("--max-n", type=int, default=DEFAULT_MAX_N)
        p.add_argument("--max-d", type=int, default=DEFAULT_MAX_D)
        p.add_argument("--unsafe-limits", action="store_true",
                       help="acknowledge and lift the size limits")
        p.set_defaults(fn=fn, need_base=name != "build")
    return parser


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    random.seed(args.seed)
    try:
        return args.fn(args)
    except LimitError as exc:
        print(f"limit exceeded: {exc}", file=sys.stderr)
        return 3
    except TheoremViolationError as exc:
        print(f"theorem violation: {exc}", file=sys.stderr)
        return 2
    except (OmmorseError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
