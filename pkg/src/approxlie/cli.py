"""Batch command-line interface.

Subcommands::

    approxlie verify-symmetries  --deck deck.toml [--out PATH] [--format F]
    approxlie verify-solutions   ...
    approxlie determining --generator NAME ...
    approxlie sweep [--strict-band LO,HI] ...

Configuration comes from a strict TOML deck (unknown keys are rejected);
all values have defaults, so every command also runs deckless.  Exit
codes: 0 success, 1 verification failure, 2 usage or configuration error.
Identical deck and seed produce byte-identical reports.  The environment
variable ``APPROXLIE_THREADS`` caps worker threads for per-generator and
per-family parallelism (default 1; output order is deterministic either
way).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, Optional, Tuple

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import expr as ex
from .creeping import (ansatz_case, constraint_expr, creeping_system,
                       paper_generators)
from .invariance import (determining_equations, invariance_residual,
                         onshell_rules, verify_generator)
from .lie import Generator
from .numeric import SamplePlan, eps_sweep
from .parser import parse
from .report import VerificationReport, reports_to_json, reports_to_text
from .solutions import (DEFAULT_REGION, FAMILY_IDS, catalog_family,
                        check_bvp, check_reduced_system,
                        check_surface_conditions, matching_generator,
                        solution_family, xi_A, xi_B)

GENERATOR_NAMES = tuple(f"xi{i}" for i in range(1, 10)) + ("xiA", "xiB")


class ConfigError(ValueError):
    pass


DECK_SCHEMA: Dict[str, set] = {
    "model": {"Re"},
    "case": {"id", "a", "b", "H"},
    "generators": {"names", "inline"},
    "families": {"names", "params", "region"},
    "sweep": {"eps", "points", "seed", "band", "control_band", "precision"},
    "output": {"format", "path"},
}

DEFAULT_DECK = {
    "model": {"Re": 1.0},
    "case": {"id": "i"},
    "generators": {"names": list(GENERATOR_NAMES[:9])},
    "families": {"names": list(FAMILY_IDS)},
    "sweep": {"eps": [0.1, 0.01, 0.001, 0.0001], "points": 64, "seed": 42,
              "band": [1.95, 2.05], "control_band": [0.95, 1.05],
              "precision": "double"},
    "output": {"format": "text", "path": ""},
}


def load_deck(path: Optional[str]) -> dict:
    deck = json.loads(json.dumps(DEFAULT_DECK))  # deep copy
    if path is None:
        return deck
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"deck file not found: {path}")
    except tomllib.TOMLDecodeError as e:
        raise ConfigError(f"malformed deck {path}: {e}")
    for section, values in data.items():
        allowed = DECK_SCHEMA.get(section)
        if allowed is None:
            raise ConfigError(f"unknown deck section [{section}]")
        if not isinstance(values, dict):
            raise ConfigError(f"deck section [{section}] must be a table")
        for key in values:
            if key not in allowed:
                raise ConfigError(f"unknown key {key!r} in section [{section}]")
        deck[section].update(values)
    return deck


def _threads() -> int:
    raw = os.environ.get("APPROXLIE_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"APPROXLIE_THREADS must be an integer, got {raw!r}")
    return max(1, n)


def _pmap(fn, items):
    n = _threads()
    if n == 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


def _deck_case(deck: dict):
    cid = deck["case"].get("id", "i")
    if cid == "symbolic":
        return None
    a = deck["case"].get("a")
    if a is not None:
        if len(a) != 7:
            raise ConfigError("case.a must list seven coefficients")
        a = [_number_expr(v) for v in a]
    b = deck["case"].get("b")
    H = deck["case"].get("H")
    try:
        return ansatz_case(cid, a=a, b=_number_expr(b) if b is not None else None,
                           H=parse(H) if H else None)
    except ValueError as e:
        raise ConfigError(str(e))


def _number_expr(v):
    if isinstance(v, int):
        return ex.rat(v)
    if isinstance(v, float):
        if v != int(v):
            raise ConfigError(
                f"exact rational required in symbolic slots, got {v}")
        return ex.rat(int(v))
    if isinstance(v, str):
        return parse(v)
    raise ConfigError(f"cannot interpret {v!r} as an exact value")


def build_generator(name: str, deck: dict) -> Tuple[Generator, list]:
    """Named catalog generator (or inline literal) plus its side conditions."""
    case = _deck_case(deck)
    f1 = case.f1 if case else None
    f2 = case.f2 if case else None
    for block in deck["generators"].get("inline", ()):
        if block.get("name") == name:
            return _inline_generator(block), []
    if name in ("xiA", "xiB"):
        g = xi_A(f1=f1, f2=f2) if name == "xiA" else xi_B(f1=f1, f2=f2)
        modulo = [] if case else [constraint_expr()]
        return g, modulo
    if name not in GENERATOR_NAMES:
        raise ConfigError(f"unknown generator {name!r}")
    gens = paper_generators(f1, f2)
    modulo = [constraint_expr()] if (name == "xi9" and case is None) else []
    return gens[name], modulo


def _inline_generator(block: dict) -> Generator:
    allowed = {"name", "xi_x", "xi_y", "eta_u", "eta_v", "eta_p"}
    for key in block:
        if key not in allowed:
            raise ConfigError(f"unknown inline-generator key {key!r}")
    system = creeping_system()
    scheme = system.scheme(1)

    def slots(key):
        vals = block.get(key, [])
        if isinstance(vals, str):
            vals = [vals]
        return tuple(parse(v) for v in vals)

    deps = {d.name: d for d in system.dependents}
    return Generator.build(
        scheme, system.independents, 1,
        xi={system.independents[0]: slots("xi_x"),
            system.independents[1]: slots("xi_y")},
        eta={deps["u"]: slots("eta_u"), deps["v"]: slots("eta_v"),
             deps["p"]: slots("eta_p")},
        name=block.get("name", "inline"))


# ---------------------------------------------------------------------------
# output plumbing


def _emit(text: str, out: Optional[str]):
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _reports_csv(reports: List[VerificationReport]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["subject", "status", "numeric_max", "details"])
    for r in reports:
        w.writerow([r.subject, r.status,
                    "" if r.numeric_max is None else f"{r.numeric_max:.3e}",
                    r.details])
    return buf.getvalue()


def _emit_reports(reports: List[VerificationReport], fmt: str,
                  out: Optional[str]):
    if fmt == "json":
        _emit(reports_to_json(reports) + "\n", out)
    elif fmt == "csv":
        _emit(_reports_csv(reports), out)
    else:
        _emit(reports_to_text(reports), out)


# ---------------------------------------------------------------------------
# commands


def cmd_verify_symmetries(deck: dict, fmt: str, out: Optional[str]) -> int:
    system = creeping_system()
    names = deck["generators"].get("names", [])
    jobs = [build_generator(n, deck) for n in names]
    rules_plain = onshell_rules(system, 1)
    rules_cache = {(): rules_plain}

    def run(job):
        g, modulo = job
        if modulo:
            key = tuple(m.key for m in modulo)
            if key not in rules_cache:
                rules_cache[key] = onshell_rules(system, 1, modulo=modulo)
            rules = rules_cache[key]
        else:
            rules = rules_plain
        return verify_generator(system, g, rules=rules)

    reports = _pmap(run, jobs)
    _emit_reports(reports, fmt, out)
    return 0 if all(r.passed for r in reports) else 1


def cmd_verify_solutions(deck: dict, fmt: str, out: Optional[str]) -> int:
    system = creeping_system()
    names = deck["families"].get("names", [])
    for n in names:
        if n not in FAMILY_IDS:
            raise ConfigError(f"unknown solution family {n!r}")
    params = deck["families"].get("params", {})
    _validate_regions(deck, names)

    def run(name):
        fam, residual_rep = catalog_family(name, params=params.get(name),
                                           system=system)
        out_reports = [residual_rep]
        g = matching_generator(fam)
        out_reports.append(check_surface_conditions(fam, g, system))
        if name == "bvp_mud":
            out_reports.append(check_bvp(fam))
        else:
            out_reports.append(check_reduced_system(fam))
        return out_reports

    reports = [r for group in _pmap(run, names) for r in group]
    _emit_reports(reports, fmt, out)
    return 0 if all(r.passed for r in reports) else 1


def _validate_regions(deck: dict, names):
    regions = deck["families"].get("region", {})
    for name, box in regions.items():
        if name not in FAMILY_IDS:
            raise ConfigError(f"region given for unknown family {name!r}")
        (x0, x1), (y0, y1) = box
        fam = solution_family(name)
        corners = [(x0, y0), (x0, y1), (x1, y0), (x1, y1)]
        if any(not fam.locus_ok(cx, cy) for cx, cy in corners):
            raise ConfigError(
                f"sample region {box} for {name} touches its singular locus "
                f"({fam.singular_locus})")


def _deck_region(deck: dict, name: str):
    box = deck["families"].get("region", {}).get(name)
    if box is None:
        return DEFAULT_REGION[name]
    return tuple((float(box[0][0]), float(box[0][1]))), \
        tuple((float(box[1][0]), float(box[1][1])))


def cmd_determining(deck: dict, fmt: str, out: Optional[str],
                    generator: Optional[str]) -> int:
    system = creeping_system()
    name = generator
    if name is None:
        names = deck["generators"].get("names", [])
        if len(names) != 1:
            raise ConfigError(
                "determining needs --generator NAME (or a single-name deck)")
        name = names[0]
    g, modulo = build_generator(name, deck)
    rules = onshell_rules(system, 1, modulo=modulo)
    res = invariance_residual(system, g, 1, rules=rules)
    det = determining_equations(res, system)
    if fmt == "json":
        _emit(json.dumps({"generator": name, "empty": det.empty,
                          "entries": det.to_dict()},
                         sort_keys=True, indent=2) + "\n", out)
    else:
        _emit(f"generator {name}\n" + det.to_text(), out)
    return 0


def cmd_sweep(deck: dict, fmt: str, out: Optional[str],
              band: Optional[Tuple[float, float]], seed: Optional[int]) -> int:
    system = creeping_system()
    sweep = deck["sweep"]
    eps_list = [float(e) for e in sweep["eps"]]
    if not eps_list:
        raise ConfigError("sweep.eps must not be empty")
    lo, hi = band if band else tuple(sweep["band"])
    clo, chi = tuple(sweep["control_band"])
    names = deck["families"].get("names", [])
    for n in names:
        if n not in FAMILY_IDS:
            raise ConfigError(f"unknown solution family {n!r}")
    params = deck["families"].get("params", {})
    _validate_regions(deck, names)
    mode = sweep.get("precision", "double")
    reynolds = float(deck["model"].get("Re", 1.0))
    if not reynolds > 0:
        raise ConfigError("model.Re must be positive")

    def run(name):
        fam, _ = catalog_family(name, params=params.get(name), system=system)
        plan = SamplePlan(region=_deck_region(deck, name),
                          count=int(sweep["points"]),
                          seed=int(seed if seed is not None else sweep["seed"]))
        extra = {"Re": reynolds}
        res = eps_sweep(fam, system, eps_list, plan, mode=mode,
                        extra_bindings=extra)
        ctl = eps_sweep(fam, system, eps_list, plan, control=True, mode=mode,
                        extra_bindings=extra)
        return name, res, ctl

    results = _pmap(run, names)
    ok = True
    summary = []
    for name, res, ctl in results:
        in_band = res.status == "EXACT" or (
            res.slope is not None and lo <= res.slope <= hi)
        ctl_ok = ctl.status == "EXACT" or (
            ctl.slope is not None and clo <= ctl.slope <= chi)
        ok = ok and in_band and ctl_ok
        summary.append({
            "family": name,
            "slope": res.slope, "status": res.status,
            "control_slope": ctl.slope, "control_status": ctl.status,
            "slope_in_band": in_band, "control_in_band": ctl_ok,
            "max_norms": res.max_norms,
            # the model regime eps << 1/Re is the user's judgment call;
            # both values are recorded here
            "Re": reynolds, "eps": list(eps_list),
        })
    if out:
        os.makedirs(out, exist_ok=True)
        for name, res, ctl in results:
            for tag, r in (("", res), ("_control", ctl)):
                path = os.path.join(out, f"sweep_{name}{tag}.csv")
                with open(path, "w", encoding="utf-8", newline="") as fh:
                    csv.writer(fh, lineterminator="\n").writerows(r.csv_rows())
        spath = os.path.join(out, "summary.json" if fmt == "json"
                             else "summary.txt")
        with open(spath, "w", encoding="utf-8") as fh:
            fh.write(_sweep_summary(summary, fmt))
    else:
        sys.stdout.write(_sweep_summary(summary, fmt))
    return 0 if ok else 1


def _sweep_summary(summary: List[dict], fmt: str) -> str:
    if fmt == "json":
        return json.dumps(summary, sort_keys=True, indent=2) + "\n"
    lines = []
    for s in summary:
        slope = "EXACT" if s["status"] == "EXACT" else f"{s['slope']:.4f}"
        cslope = "EXACT" if s["control_status"] == "EXACT" \
            else f"{s['control_slope']:.4f}"
        verdict = "ok" if s["slope_in_band"] and s["control_in_band"] \
            else "OUT OF BAND"
        lines.append(f"{s['family']}: slope {slope}, control {cslope} "
                     f"[{verdict}]")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# entry point


def main(argv: Optional[List[str]] = None) -> int:
    ap = argparse.ArgumentParser(
        prog="approxlie",
        description="first-order approximate symmetry verification for "
                    "second-grade creeping flow")
    ap.add_argument("command",
                    choices=["verify-symmetries", "verify-solutions",
                             "determining", "sweep"])
    ap.add_argument("--deck", help="TOML configuration deck")
    ap.add_argument("--out", help="output file (sweep: output directory)")
    ap.add_argument("--format", dest="fmt",
                    choices=["json", "csv", "text"], default=None)
    ap.add_argument("--seed", type=int, default=None)
    ap.add_argument("--strict-band",
                    help="LO,HI acceptance band for sweep slopes")
    ap.add_argument("--generator", help="generator name for `determining`")
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code not in (0, None) else 0
    try:
        deck = load_deck(args.deck)
        fmt = args.fmt or deck["output"].get("format", "text")
        out = args.out or (deck["output"].get("path") or None)
        band = None
        if args.strict_band:
            try:
                lo, hi = (float(v) for v in args.strict_band.split(","))
            except ValueError:
                raise ConfigError("--strict-band expects LO,HI")
            band = (lo, hi)
        if args.command == "verify-symmetries":
            return cmd_verify_symmetries(deck, fmt, out)
        if args.command == "verify-solutions":
            return cmd_verify_solutions(deck, fmt, out)
        if args.command == "determining":
            return cmd_determining(deck, fmt, out, args.generator)
        return cmd_sweep(deck, fmt, out, band, args.seed)
    except ConfigError as e:
        print(f"configuration error: {e}", file=sys.stderr)
        return 2
    except Exception as e:  # verification machinery errors are config-grade
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
