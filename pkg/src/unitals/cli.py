"""Command-line front end: ``unitals <command> [options]``.

Exit status: 0 pass, 1 failure or invalid input, 2 search capped before
completion.  Every file written is LF-terminated UTF-8 and depends only on
the arguments (including ``--seed``), never on timing or worker count.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass

from . import gf
from .acceptance import ALL_IDS, DEFAULT_SEED, run_suite, summary_bytes
from .embed import (EmbeddingWitness, SubunitalCertificate, CertificateError, check_standard,
                    disjointness_check, enumerate_ext_embeddings, search_subunitals,
                    small_extension, standard_subunital)
from .export import export, header
from .parallel import default_workers
from .props import (check_all_property, check_baer, check_design, check_form, check_lines,
                    check_onan, check_tan, check_tra, check_translation_groups, passed,
                    translations_at, wilbrink_report)
from .unital import ConstructionError, build_unital, make_quad_ext

PROPS = ["design", "lines", "form", "baer", "onan", "translations", "allprop", "tra", "tan",
         "wilbrink"]


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    p: int
    n: int
    modulus: tuple | None = None
    mode: str | None = None
    count: int | None = None
    seed: int | None = None
    out: str | None = None
    format: str = "text"
    workers: int = 1

    @property
    def q(self) -> int:
        return self.p ** self.n

    def ext(self):
        return make_quad_ext(self.p, self.n, self.modulus)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _field_args(sp):
    sp.add_argument("--q", type=int, help="order q of the unital (a prime power)")
    sp.add_argument("--p", type=int, help="characteristic, with --n")
    sp.add_argument("--n", type=int, help="q = p^n, with --p")
    sp.add_argument("--modulus", help="coefficients c0,...,c2n of the modulus of F_{q^2}")


def _common(sp, sampling=False):
    sp.add_argument("--out", help="output file (default: standard output)")
    sp.add_argument("--workers", type=int, default=None,
                    help="worker processes (default: all CPUs)")
    if sampling:
        sp.add_argument("--mode", default="exhaustive")
        sp.add_argument("--count", type=int, default=None)
        sp.add_argument("--seed", type=int, default=None)


def make_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="unitals", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sp = sub.add_parser("build", help="construct H(F_{q^2}|F_q), verify it and export it")
    _field_args(sp)
    _common(sp)
    sp.add_argument("--format", choices=["text", "json"], default="text")

    sp = sub.add_parser("export", help="export without the verification pass")
    _field_args(sp)
    _common(sp)
    sp.add_argument("--format", choices=["text", "json"], default="text")

    sp = sub.add_parser("check", help="verify structural properties")
    _field_args(sp)
    _common(sp, sampling=True)
    sp.add_argument("--props", default="all",
                    help=f"comma list from {','.join(PROPS)}, or 'all'")

    sp = sub.add_parser("search", help="search for subunitals of order --sub")
    _field_args(sp)
    _common(sp, sampling=True)
    sp.add_argument("--sub", type=int, required=True)

    sp = sub.add_parser("standardness",
                        help="certify the standard subunitals or a given point set")
    _field_args(sp)
    _common(sp)
    sp.add_argument("--sub", type=int, required=True)
    sp.add_argument("--points", help="comma list of ambient point indices to test instead")

    sp = sub.add_parser("translations", help="list the translation group at each centre")
    _field_args(sp)
    _common(sp)
    sp.add_argument("--center", type=int, default=None)

    sp = sub.add_parser("verify-paper", help="run the reproduction criteria A1-A12")
    _common(sp)
    sp.add_argument("--only", action="append", default=None,
                    help="criterion id (repeatable, or a comma list)")
    sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sp.add_argument("--format", choices=["text", "json"], default="text",
                    help="stdout format when --out is not given")
    return ap


def config_from_args(args) -> RunConfig:
    if args.q is not None:
        if args.p is not None or args.n is not None:
            raise UsageError("give either --q or --p/--n, not both")
        pk = gf.prime_power(args.q)
        if pk is None:
            raise UsageError(f"{args.q} is not a prime power")
        p, n = pk
    elif args.p is not None and args.n is not None:
        if not gf.is_prime(args.p) or args.n < 1:
            raise UsageError(f"invalid field parameters p={args.p} n={args.n}")
        p, n = args.p, args.n
    else:
        raise UsageError("missing --q (or --p and --n)")
    if (p ** n) ** 2 > gf.MAX_ORDER:
        raise UsageError(f"q^2 = {(p ** n) ** 2} exceeds {gf.MAX_ORDER}")
    modulus = None
    if args.modulus:
        try:
            modulus = tuple(int(c) for c in args.modulus.split(","))
        except ValueError:
            raise UsageError(f"bad modulus {args.modulus!r}") from None
    mode = getattr(args, "mode", None)
    seed = getattr(args, "seed", None)
    if mode in ("sample", "reduced") and seed is None and args.command == "check":
        raise UsageError("sampling needs --seed")
    workers = args.workers if args.workers is not None else default_workers()
    return RunConfig(args.command, p, n, modulus, mode, getattr(args, "count", None), seed,
                     args.out, getattr(args, "format", "text") or "text", max(1, workers))


def _emit(data: bytes, out: str | None):
    if out:
        with open(out, "wb") as fh:
            fh.write(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()


def _json_bytes(obj) -> bytes:
    return (json.dumps(obj, sort_keys=True, indent=1) + "\n").encode("utf-8")


def cmd_build(cfg: RunConfig, verify=True) -> int:
    u = build_unital(cfg.ext(), check=verify)
    if verify and not passed(check_design(u, cfg.q)):
        print(f"unital of order {cfg.q} failed the design check", file=sys.stderr)
        return 1
    _emit(export(u, cfg.format), cfg.out)
    summary = f"v={u.v} b={u.b}"
    print(summary, file=sys.stdout if cfg.out else sys.stderr)
    return 0


def _run_prop(name, u, cfg):
    mode = cfg.mode or "exhaustive"
    if mode not in ("exhaustive", "sample"):
        raise UsageError(f"check mode must be exhaustive or sample, not {mode!r}")
    count = cfg.count
    if name == "design":
        return check_design(u, cfg.q)
    if name == "lines":
        return check_lines(u)
    if name == "form":
        return check_form(u)
    if name == "baer":
        return check_baer(u)
    if name == "translations":
        return check_translation_groups(u)
    if name == "allprop":
        return check_all_property(u)
    if name == "onan":
        return check_onan(u, mode, count or 100000, cfg.seed, cfg.workers)
    if name == "tra":
        return check_tra(u, mode, count or 1000, cfg.seed)
    if name == "tan":
        return check_tan(u, mode, count or 1000, cfg.seed)
    if name == "wilbrink":
        w = wilbrink_report(u, mode, count or 100000, cfg.seed)
        ok = w["condition_I"] and w["condition_II"]
        return {"property": "wilbrink", "mode": mode, "seed": cfg.seed,
                "I": w["condition_I"], "II": w["condition_II"],
                "failures": [] if ok else ["condition failed"]}
    raise UsageError(f"unknown property {name!r}")


def cmd_check(cfg: RunConfig, props: str) -> int:
    names = PROPS if props == "all" else [x.strip() for x in props.split(",") if x.strip()]
    unknown = [x for x in names if x not in PROPS]
    if unknown:
        raise UsageError(f"unknown properties: {', '.join(unknown)}")
    u = build_unital(cfg.ext())
    reports = {name: _run_prop(name, u, cfg) for name in names}
    ok = all(not r["failures"] for r in reports.values())
    doc = {"unital": header(u), "passed": ok, "reports": reports}
    _emit(_json_bytes(doc), cfg.out)
    for name, r in reports.items():
        print(f"{name}: {'pass' if not r['failures'] else 'FAIL'}", file=sys.stderr)
    return 0 if ok else 1


def _verdict(big, cert):
    w = check_standard(big, cert)
    d = disjointness_check(big, cert)
    entry = cert.to_json()
    entry.pop("ambient_params")
    entry["standard"] = isinstance(w, EmbeddingWitness)
    entry["witness"] = w.to_json()
    entry["disjointness_failures"] = d["failures"]
    return entry


def cmd_search(cfg: RunConfig, q_sub: int) -> int:
    mode = cfg.mode or "exhaustive"
    if mode not in ("exhaustive", "reduced", "capped"):
        raise UsageError(f"search mode must be exhaustive, reduced or capped, not {mode!r}")
    if mode == "capped" and not cfg.count:
        raise UsageError("capped search needs --count")
    if q_sub < 2:
        raise UsageError("--sub must be at least 2")
    big = build_unital(cfg.ext())
    seed = cfg.seed if cfg.seed is not None else 0
    res = search_subunitals(big, q_sub, mode, cfg.count, seed, cfg.workers)
    doc = {
        "unital": header(big),
        "sub": q_sub,
        "mode": mode,
        "seed": seed,
        "complete": res.complete,
        "fallback": res.fallback,
        "reduction": res.reduction,
        "nodes": res.nodes,
        "count": len(res.certificates),
        "certificates": [_verdict(big, c) for c in res.certificates],
    }
    _emit(_json_bytes(doc), cfg.out)
    std = sum(c["standard"] for c in doc["certificates"])
    print(f"certificates={len(res.certificates)} standard={std} complete={res.complete}",
          file=sys.stderr)
    return 0 if res.complete else 2


def cmd_standardness(cfg: RunConfig, q_sub: int, points: str | None) -> int:
    big = build_unital(cfg.ext())
    entries = []
    if points:
        try:
            pts = [int(x) for x in points.split(",")]
        except ValueError:
            raise UsageError(f"bad point list {points!r}") from None
        if any(not 0 <= x < big.v for x in pts):
            raise UsageError("point index out of range")
        try:
            cert = SubunitalCertificate.build(big, pts, q_sub)
        except CertificateError as exc:
            print(f"not a subunital: {exc}", file=sys.stderr)
            return 1
        entries.append(_verdict(big, cert))
    else:
        small = small_extension(q_sub, big.ext.p)
        embs = enumerate_ext_embeddings(small, big.ext) if small else []
        for emb in embs:
            e = _verdict(big, standard_subunital(big, emb))
            e["eta"] = emb.image_of_generator
            entries.append(e)
    doc = {"unital": header(big), "sub": q_sub, "subunitals": entries}
    _emit(_json_bytes(doc), cfg.out)
    ok = bool(entries) and all(e["standard"] and not e["disjointness_failures"] for e in entries)
    return 0 if ok else 1


def cmd_translations(cfg: RunConfig, center: int | None) -> int:
    u = build_unital(cfg.ext())
    if center is not None and not 0 <= center < u.v:
        raise UsageError("centre out of range")
    centers = [center] if center is not None else range(u.v)
    groups = []
    ok = True
    for c in centers:
        G = translations_at(u, c)
        good = G.order == u.q and G.is_group()
        ok &= good
        groups.append({"center": c, "order": G.order, "group": good,
                       "elements": [{"lambda": t.lam, "matrix": [list(r) for r in t.matrix.matrix]}
                                    for t in G.elements]})
    _emit(_json_bytes({"unital": header(u), "translations": groups}), cfg.out)
    return 0 if ok else 1


def cmd_verify_paper(args) -> int:
    only = None
    if args.only:
        only = [x.strip().upper() for item in args.only for x in item.split(",") if x.strip()]
        unknown = [x for x in only if x not in ALL_IDS]
        if unknown:
            raise UsageError(f"unknown criteria: {', '.join(unknown)}")
    workers = args.workers if args.workers is not None else default_workers()
    to_stdout = args.out is None and args.format == "json"
    log = sys.stderr if to_stdout else sys.stdout

    def echo(cid, ok, seconds):
        print(f"{cid:<4} {'PASS' if ok else 'FAIL'}  ({seconds:.1f}s)", file=log, flush=True)

    summary = run_suite(only, args.seed, workers, echo)
    data = summary_bytes(summary)
    if args.out or to_stdout:
        _emit(data, args.out)
    if summary["failed"]:
        print(f"failed: {' '.join(summary['failed'])}", file=log)
        return 1
    print("all criteria passed", file=log)
    return 0


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        if args.command == "verify-paper":
            return cmd_verify_paper(args)
        cfg = config_from_args(args)
        if args.command == "build":
            return cmd_build(cfg)
        if args.command == "export":
            return cmd_build(cfg, verify=False)
        if args.command == "check":
            return cmd_check(cfg, args.props)
        if args.command == "search":
            return cmd_search(cfg, args.sub)
        if args.command == "standardness":
            return cmd_standardness(cfg, args.sub, args.points)
        if args.command == "translations":
            return cmd_translations(cfg, args.center)
    except (UsageError, gf.FieldError, ConstructionError, ValueError) as exc:
        print(f"unitals: error: {exc}", file=sys.stderr)
        return 1
    return 1


if __name__ == "__main__":
    sys.exit(main())
