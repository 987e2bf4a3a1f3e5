"""Command-line front end: ``semple code|classes|equiv|orbits|verify``."""

from __future__ import annotations

import argparse
import datetime
import json
import sys
import time

from . import __version__, catalog
from .critical import DEFAULT_GERM_ORDER, arrangements_along, enumerate_classes, rvt_code
from .curves import format_curve, parse_curve
from .errors import (ConstantCurve, LevelMismatch, OrderOverflow, ParseError, SempleError,
                     TruncationExhausted, UnrealizableClass)
from .prolong import prolong_diffeo
from .symmetry import equivalent, jet_to_json, orbit_count
from .tower import DEFAULT_CURVE_ORDER, prolong_curve

SCHEMA = "semple.report/1"

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_INPUT = 2
EXIT_TRUNCATION = 3
EXIT_UNKNOWN = 4

VERDICT_EXIT = {"Equivalent": 0, "Distinguished": 1, "Unknown": EXIT_UNKNOWN}


class _Clock:
    def __init__(self, enabled: bool):
        self.enabled = enabled
        self.marks = {}
        self._t0 = time.perf_counter()

    def mark(self, name: str):
        if self.enabled:
            self.marks[name] = round(time.perf_counter() - self._t0, 3)

    def to_json(self) -> dict:
        return dict(self.marks)


def _orders(args, **extra) -> dict:
    out = {"curve": args.order, "germ": DEFAULT_GERM_ORDER,
           "jet_degree": args.degree if args.degree else "level+1"}
    out.update(extra)
    return out


def _report(args, command, inputs, result, certificates, clock) -> dict:
    return {"schema": SCHEMA, "version": __version__, "command": command, "inputs": inputs,
            "seed": args.seed, "orders": _orders(args), "result": result,
            "certificates": certificates, "timings": clock.to_json()}


def _emit(args, report: dict, human: list):
    if args.json:
        sys.stdout.write(json.dumps(report, sort_keys=True, indent=2) + "\n")
    else:
        for line in human:
            print(line)


def _log_path(args):
    return args.log or catalog.default_log_path()


def _log(args, record: dict):
    path = _log_path(args)
    if not path:
        return
    record = dict(record, version=__version__,
                  timestamp=datetime.datetime.now(datetime.timezone.utc).isoformat())
    catalog.append_record(path, record)


# --- code -------------------------------------------------------------------

def _code_result(text: str, level: int, order: int) -> dict:
    curve = parse_curve(text, order)
    pr = prolong_curve(curve, level)
    word = rvt_code(curve, level)
    arrs = arrangements_along(pr.point)
    per_level = []
    for j in range(1, level + 1):
        arr = arrs[j - 1]
        d = pr.point.direction(j)
        per_level.append({"level": j, "letter": str(arr.letter(d)),
                          "direction": [str(x) for x in d],
                          "critical_planes": arr.to_json()["planes"],
                          "coincident": arr.to_json()["coincident"]})
    return {"curve": format_curve(curve), "word": str(word), "point": str(pr.point),
            "chart": pr.point.to_json(), "levels": per_level}


def cmd_code(args) -> int:
    clock = _Clock(args.timings)
    res = _code_result(args.curve[0], args.level, args.order)
    clock.mark("total")
    human = ["%s" % res["word"], "point %s" % res["point"]]
    for row in res["levels"]:
        planes = ", ".join("%s%s(%s)" % (pl["kind"][0].upper(), pl["born_at_level"],
                                         ",".join(pl["normal"])) for pl in row["critical_planes"])
        human.append("  level %d  %s  direction (%s)  critical: %s"
                     % (row["level"], row["letter"], ",".join(row["direction"]), planes or "none"))
    _emit(args, _report(args, "code", {"curve": args.curve[0], "level": args.level}, res, {}, clock),
          human)
    return EXIT_OK


# --- classes ----------------------------------------------------------------

def cmd_classes(args) -> int:
    clock = _Clock(args.timings)
    words = [str(w) for w in enumerate_classes(args.level)]
    clock.mark("total")
    res = {"level": args.level, "count": len(words), "classes": words}
    human = words + ["%d classes" % len(words)]
    _emit(args, _report(args, "classes", {"level": args.level}, res, {}, clock), human)
    return EXIT_OK


# --- equiv ------------------------------------------------------------------

def _equiv_result(a: str, b: str, level: int, order: int, budget: int, seed: int,
                  degree: int | None):
    pa = prolong_curve(parse_curve(a, order), level).point
    pb = prolong_curve(parse_curve(b, order), level).point
    v = equivalent(pa, pb, budget=budget, seed=seed, degree=degree)
    certs = {}
    if v.witness is not None:
        from .prolong import canonical_chart
        certs["witness"] = jet_to_json(v.witness)
        certs["reverified"] = prolong_diffeo(v.witness, canonical_chart(pa)) == canonical_chart(pb)
    if v.invariant is not None:
        certs["invariant"] = v.invariant
    res = {"points": [str(pa), str(pb)], "verdict": v.to_json()}
    return v, res, certs


def cmd_equiv(args) -> int:
    if len(args.curve) != 2:
        print("equiv needs exactly two --curve arguments", file=sys.stderr)
        return EXIT_INPUT
    clock = _Clock(args.timings)
    v, res, certs = _equiv_result(args.curve[0], args.curve[1], args.level, args.order,
                                  args.budget, args.seed, args.degree)
    clock.mark("total")
    human = [v.verdict]
    if v.invariant:
        human.append("  invariant %s: %s" % (v.invariant, json.dumps(res["verdict"]["values"])))
    if v.witness is not None:
        human.append("  witness jet of degree %d, re-verified: %s" % (v.witness.degree, certs["reverified"]))
    inputs = {"curves": args.curve, "level": args.level, "budget": args.budget}
    _emit(args, _report(args, "equiv", inputs, res, certs, clock), human)
    return VERDICT_EXIT[v.verdict]


# --- orbits -----------------------------------------------------------------

def _orbit_entry(word: str, budget: int, seed: int) -> dict:
    oc = orbit_count(word, budget=budget, seed=seed)
    data = oc.to_json()
    return {"class": word, "lower": oc.lower, "upper": oc.upper, "exact": oc.exact,
            "moduli_suspected": oc.moduli_suspected, "orbits": data["orbits"]}


def _checkpointed_orbits(args, word: str) -> dict:
    """Orbit count for ``word``, reused from the log when an identical run is recorded."""
    key = {"kind": "orbit_count", "class": word, "seed": args.seed, "budget": args.budget,
           "version": __version__}
    hit = catalog.find_checkpoint(_log_path(args), **key)
    if hit is not None:
        return hit["result"]
    entry = _orbit_entry(word, args.budget, args.seed)
    _log(args, {"kind": "orbit_count", "class": word, "level": len(word), "seed": args.seed,
                "budget": args.budget, "result": entry})
    return entry


def cmd_orbits(args) -> int:
    clock = _Clock(args.timings)
    word = args.class_word
    entry = _checkpointed_orbits(args, word)
    clock.mark("total")
    res = {k: entry[k] for k in ("class", "lower", "upper", "exact", "moduli_suspected")}
    certs = {"orbits": entry["orbits"]}
    if entry["exact"] is not None:
        human = ["%s: %d orbit%s" % (word, entry["exact"], "" if entry["exact"] == 1 else "s")]
    else:
        human = ["%s: between %s and %s orbits" % (word, entry["lower"], entry["upper"])]
    for i, orb in enumerate(entry["orbits"], start=1):
        kinds = " ".join("%s:%s" % (l["letter"], l["piece"]["kind"]) for l in orb["chain"])
        human.append("  %d. %s  [%s]" % (i, orb["representative"], kinds))
    _emit(args, _report(args, "orbits", {"class": word, "budget": args.budget}, res, certs, clock),
          human)
    return EXIT_OK if entry["exact"] is not None else EXIT_UNKNOWN


# --- verify -----------------------------------------------------------------

def _parse_levels(text: str) -> list:
    try:
        if ".." in text:
            a, b = text.split("..", 1)
            levels = list(range(int(a), int(b) + 1))
        else:
            levels = [int(x) for x in text.split(",")]
    except ValueError:
        raise ParseError("bad level range %r" % text, 0)
    if not levels or min(levels) < 1 or max(levels) > 4:
        raise ParseError("levels must lie in 1..4", 0)
    return levels


def _check(rows: list, name: str, expected, observed, detail=None, ok=None):
    row = {"check": name, "expected": expected, "observed": observed,
           "pass": expected == observed if ok is None else ok}
    if detail is not None:
        row["detail"] = detail
    rows.append(row)


def _bracketed(entry: dict, expected: int) -> bool:
    if entry["exact"] is not None:
        return entry["exact"] == expected
    upper = entry["upper"]
    return entry["lower"] <= expected and (upper is None or expected <= upper)


def _verify_orbits(args, rows, level: int, words: list):
    if level < 4:
        todo = words
    elif args.stretch:
        todo = words
    else:
        todo = list(catalog.LEVEL4_SPOT)
    total_lower, total_upper = 0, 0
    for w in todo:
        entry = _checkpointed_orbits(args, w)
        expected = catalog.expected_count(w)
        observed = entry["exact"] if entry["exact"] is not None else [entry["lower"], entry["upper"]]
        _check(rows, "orbits %s" % w, expected, observed,
               {"lower": entry["lower"], "upper": entry["upper"]}, ok=_bracketed(entry, expected))
        total_lower += entry["lower"]
        total_upper = None if total_upper is None or entry["upper"] is None else total_upper + entry["upper"]
    if level < 4 or args.stretch:
        observed = total_lower if total_upper == total_lower else [total_lower, total_upper]
        _check(rows, "orbit total level %d" % level, catalog.LEVEL_TOTALS[level], observed)


def _verify_r_prefix(args, rows, pairs: list):
    for a, b in pairs:
        ea, eb = _checkpointed_orbits(args, a), _checkpointed_orbits(args, b)
        counts = [ea["exact"], eb["exact"]]
        _check(rows, "r-prefix %s:%s" % (a, b), "equal", counts,
               ok=counts[0] is not None and counts[0] == counts[1])


def cmd_verify(args) -> int:
    clock = _Clock(args.timings)
    rows = []
    levels = _parse_levels(args.levels)
    pairs = [tuple(p.split(":", 1)) for p in (args.pairs or "RVT:RRVT").split(",")]
    if args.theorem == "r-prefix":
        _verify_r_prefix(args, rows, pairs)
    else:
        for level in levels:
            if not args.census_only:
                for lv, word, _, curves in catalog.NORMAL_FORMS:
                    if lv != level:
                        continue
                    for text in curves:
                        got = str(rvt_code(parse_curve(text, args.order), lv))
                        _check(rows, "code %s (%s)" % (word, text), word, got)
            words = [str(w) for w in enumerate_classes(level)]
            _check(rows, "census level %d" % level, catalog.CENSUS[level], len(words))
            if level == 4:
                missing = sorted(set(catalog.LEVEL4_MULTI) - set(words))
                _check(rows, "level 4 named classes present", [], missing)
            clock.mark("census level %d" % level)
            if args.census_only:
                continue
            _verify_orbits(args, rows, level, words)
            clock.mark("orbits level %d" % level)
            if level == 3:
                for a, b, lv, expected in catalog.EQUIVALENCE_PAIRS:
                    v, _, certs = _equiv_result(a, b, lv, args.order, args.budget, args.seed,
                                                args.degree)
                    ok = v.verdict if v.witness is None or certs.get("reverified") else "unverified"
                    _check(rows, "equiv (%s) ~ (%s)" % (a, b), expected, ok)
                clock.mark("equivalence")
            if level == 4:
                _verify_r_prefix(args, rows, [("RVT", "RRVT")])
    clock.mark("total")
    failed = [r for r in rows if not r["pass"]]
    res = {"levels": levels, "checks": rows, "passed": len(rows) - len(failed), "failed": len(failed)}
    human = ["%s  %s  expected %s  observed %s" % ("PASS" if r["pass"] else "FAIL", r["check"],
                                                   json.dumps(r["expected"]), json.dumps(r["observed"]))
             for r in rows]
    human.append("%d passed, %d failed" % (res["passed"], res["failed"]))
    inputs = {"levels": args.levels, "census_only": args.census_only, "stretch": args.stretch,
              "theorem": args.theorem, "pairs": args.pairs, "budget": args.budget}
    _emit(args, _report(args, "verify", inputs, res, {}, clock), human)
    return EXIT_MISMATCH if failed else EXIT_OK


# --- entry point ------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--budget", type=int, default=20, help="randomized solver attempts")
    common.add_argument("--json", action="store_true", help="print the JSON report")
    common.add_argument("--order", type=int, default=DEFAULT_CURVE_ORDER, help="curve working order")
    common.add_argument("--degree", type=int, default=None, help="jet degree for witness search")
    common.add_argument("--log", default=None, help="append-only JSONL log (default $SEMPLE_LOG)")
    common.add_argument("--timings", action="store_true", help="include wall-clock timings")

    ap = argparse.ArgumentParser(prog="semple", description=__doc__)
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("code", parents=[common], help="RVT code of a curve")
    p.add_argument("--curve", action="append", required=True)
    p.add_argument("--level", type=int, required=True)
    p.set_defaults(func=cmd_code)

    p = sub.add_parser("classes", parents=[common], help="realizable RVT classes at a level")
    p.add_argument("--level", type=int, required=True)
    p.set_defaults(func=cmd_classes)

    p = sub.add_parser("equiv", parents=[common], help="decide equivalence of two curve points")
    p.add_argument("--curve", action="append", required=True)
    p.add_argument("--level", type=int, required=True)
    p.set_defaults(func=cmd_equiv)

    p = sub.add_parser("orbits", parents=[common], help="count orbits in an RVT class")
    p.add_argument("--class", dest="class_word", required=True)
    p.set_defaults(func=cmd_orbits)

    p = sub.add_parser("verify", parents=[common], help="reproduction suite")
    p.add_argument("--levels", default="1..3")
    p.add_argument("--census-only", action="store_true")
    p.add_argument("--stretch", action="store_true", help="full level-4 orbit census")
    p.add_argument("--theorem", choices=["r-prefix"], default=None)
    p.add_argument("--pairs", default=None, help="comma-separated A:B class pairs")
    p.set_defaults(func=cmd_verify)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, OrderOverflow) as exc:
        print("parse error: %s" % exc, file=sys.stderr)
        return EXIT_INPUT
    except TruncationExhausted as exc:
        print("truncation exhausted: %s" % exc, file=sys.stderr)
        return EXIT_TRUNCATION
    except (ConstantCurve, UnrealizableClass, LevelMismatch) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_INPUT
    except SempleError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_MISMATCH


if __name__ == "__main__":
    sys.exit(main())
