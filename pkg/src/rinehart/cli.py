"""Command-line front door.

Spec files are TOML (or strict JSON via --spec-json) describing a
polynomial ring, an optional divisor, optional Lie-Rinehart data, and
optional coefficient-module data, plus numeric options.  Every
polynomial is a string in the parser grammar of the ring; bracket
entries are sparse, keyed "i,j" with 1-based i < j.

Reports are deterministic: identical inputs give byte-identical JSON
except for the timing field.  Wedge symbols print as a true wedge in
human mode and as "^" in JSON.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass
from typing import Optional, Sequence

try:
    import tomllib
except ModuleNotFoundError:  # pragma: no cover - 3.10 fallback
    import tomli as tomllib

from .cohomology import ComplexError
from .derham import de_rham_cohomology
from .envelope import FiniteCoalgebra, OrderOverflowError, TensorElement, \
    TruncatedEnveloping, alt_map, cobar_truncated_cohomology, \
    exponents_up_to, koszul_checks, pbw_symmetrize, proj_map, \
    reduced_koszul_differential, tensor_pair
from .lierinehart import LRModule, LieRinehartAlgebra, LieRinehartError, \
    NotCertifiedFreeError, ce_cohomology, connection_flatness, \
    derivation_text, log_derivations, lr_check_axioms
from .modules import vec_str
from .polyring import GroebnerBasis, PolyParseError, PolyRing, QuotientRing

SCHEMA_VERSION = "1"

DEFAULT_OPTIONS = {
    "d_max": 10,
    "window": 3,
    "order": 3,
    "tensor_degree_max": 3,
}

COMMANDS = ("gb", "derham", "logder", "lr-cohomology", "check", "koszul",
            "hkr", "dual-hkr")


class SpecError(ValueError):
    """The spec file is malformed or inconsistent."""


@dataclass(frozen=True)
class SpecFile:
    ring_vars: tuple
    ring_ideal: tuple
    divisor: Optional[str]
    lie_rinehart: Optional[dict]
    coefficients: Optional[dict]
    options: dict

    def echo(self) -> dict:
        """Canonical form; parsing it back yields an equal SpecFile."""
        out = {"ring": {"vars": list(self.ring_vars),
                        "ideal": list(self.ring_ideal)},
               "options": dict(self.options)}
        if self.divisor is not None:
            out["divisor"] = self.divisor
        if self.lie_rinehart is not None:
            lr = self.lie_rinehart
            out["lie_rinehart"] = {
                "rank": lr["rank"],
                "anchor": [list(row) for row in lr["anchor"]],
                "bracket": {f"{i + 1},{j + 1}": list(v)
                            for (i, j), v in sorted(lr["bracket"].items())},
            }
        if self.coefficients is not None:
            co = self.coefficients
            entry = {"ideal": list(co["ideal"]), "rank": co["rank"]}
            if co["connections"] is not None:
                entry["connections"] = [
                    [list(row) for row in mat] for mat in co["connections"]]
            out["coefficients"] = entry
        return out


def _expect(cond: bool, message: str) -> None:
    if not cond:
        raise SpecError(message)


def _string_list(value, where: str) -> tuple:
    _expect(isinstance(value, list)
            and all(isinstance(s, str) for s in value),
            f"{where} must be a list of strings")
    return tuple(value)


def parse_spec(data: dict) -> SpecFile:
    _expect(isinstance(data, dict), "spec must be a table")
    unknown = set(data) - {"ring", "divisor", "lie_rinehart",
                           "coefficients", "options"}
    _expect(not unknown, f"unknown spec sections: {sorted(unknown)}")
    _expect("ring" in data, "spec needs a [ring] section")
    ring_sec = data["ring"]
    _expect(isinstance(ring_sec, dict), "[ring] must be a table")
    vars_ = _string_list(ring_sec.get("vars", []), "ring.vars")
    ideal = _string_list(ring_sec.get("ideal", []), "ring.ideal")

    try:
        ring = PolyRing(list(vars_)) if vars_ else PolyRing([])
    except ValueError as exc:
        raise SpecError(f"bad ring: {exc}") from None

    def poly(text: str, where: str):
        _expect(isinstance(text, str), f"{where} must be a string")
        try:
            return ring.parse(text)
        except PolyParseError as exc:
            raise SpecError(f"{where}: {exc}") from None

    for k, g in enumerate(ideal):
        poly(g, f"ring.ideal[{k}]")

    divisor = data.get("divisor")
    if divisor is not None:
        poly(divisor, "divisor")

    lie = None
    if "lie_rinehart" in data:
        sec = data["lie_rinehart"]
        _expect(isinstance(sec, dict), "[lie_rinehart] must be a table")
        rank = sec.get("rank")
        _expect(isinstance(rank, int) and rank >= 1,
                "lie_rinehart.rank must be a positive integer")
        anchor = sec.get("anchor")
        _expect(isinstance(anchor, list) and len(anchor) == rank,
                "lie_rinehart.anchor needs one row per generator")
        rows = []
        for i, row in enumerate(anchor):
            entries = _string_list(row, f"anchor[{i}]")
            _expect(len(entries) == len(vars_),
                    f"anchor[{i}] needs one entry per variable")
            for j, s in enumerate(entries):
                poly(s, f"anchor[{i}][{j}]")
            rows.append(entries)
        bracket = {}
        for key, val in sec.get("bracket", {}).items():
            try:
                i_txt, j_txt = key.split(",")
                i, j = int(i_txt) - 1, int(j_txt) - 1
            except ValueError:
                raise SpecError(f"bracket key {key!r} is not 'i,j'") from None
            _expect(0 <= i < j < rank,
                    f"bracket key {key!r} needs 1 <= i < j <= rank")
            entries = _string_list(val, f"bracket[{key}]")
            _expect(len(entries) == rank,
                    f"bracket[{key}] needs one coefficient per generator")
            for s in entries:
                poly(s, f"bracket[{key}]")
            bracket[(i, j)] = entries
        lie = {"rank": rank, "anchor": tuple(rows), "bracket": bracket}

    coeff = None
    if "coefficients" in data:
        _expect(lie is not None,
                "[coefficients] needs a [lie_rinehart] section")
        sec = data["coefficients"]
        _expect(isinstance(sec, dict), "[coefficients] must be a table")
        cideal = _string_list(sec.get("ideal", []), "coefficients.ideal")
        for k, g in enumerate(cideal):
            poly(g, f"coefficients.ideal[{k}]")
        crank = sec.get("rank", 1)
        _expect(isinstance(crank, int) and crank >= 1,
                "coefficients.rank must be a positive integer")
        conns = sec.get("connections")
        if conns is not None:
            _expect(isinstance(conns, list) and len(conns) == lie["rank"],
                    "coefficients.connections needs one matrix per generator")
            mats = []
            for i, mat in enumerate(conns):
                _expect(isinstance(mat, list) and len(mat) == crank,
                        f"connections[{i}] must be {crank}x{crank}")
                m = []
                for row in mat:
                    entries = _string_list(row, f"connections[{i}]")
                    _expect(len(entries) == crank,
                            f"connections[{i}] must be {crank}x{crank}")
                    for s in entries:
                        poly(s, f"connections[{i}]")
                    m.append(entries)
                mats.append(tuple(m))
            conns = tuple(mats)
        coeff = {"ideal": cideal, "rank": crank, "connections": conns}

    options = dict(DEFAULT_OPTIONS)
    for key, val in data.get("options", {}).items():
        _expect(key in DEFAULT_OPTIONS, f"unknown option {key!r}")
        _expect(isinstance(val, int) and val >= 0,
                f"option {key!r} must be a nonnegative integer")
        options[key] = val

    return SpecFile(vars_, ideal, divisor, lie, coeff, options)


def load_spec(path: str, as_json: bool) -> SpecFile:
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise SpecError(f"cannot read {path}: {exc}") from None
    if as_json:
        try:
            data = json.loads(raw.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise SpecError(f"bad JSON in {path}: {exc}") from None
    else:
        try:
            data = tomllib.loads(raw.decode("utf-8"))
        except (UnicodeDecodeError, tomllib.TOMLDecodeError) as exc:
            raise SpecError(f"bad TOML in {path}: {exc}") from None
    return parse_spec(data)


# -- builders -----------------------------------------------------------------


def build_base(spec: SpecFile) -> QuotientRing:
    return QuotientRing(list(spec.ring_vars), list(spec.ring_ideal))


def build_algebra(spec: SpecFile) -> LieRinehartAlgebra:
    if spec.lie_rinehart is None:
        raise SpecError("this command needs a [lie_rinehart] section")
    lr = spec.lie_rinehart
    return LieRinehartAlgebra(build_base(spec), lr["rank"],
                              [list(r) for r in lr["anchor"]],
                              dict(lr["bracket"]) or None)


def build_module(spec: SpecFile, L: LieRinehartAlgebra) -> LRModule:
    if spec.coefficients is None:
        return LRModule.trivial(L)
    co = spec.coefficients
    ring = QuotientRing(list(spec.ring_vars), list(co["ideal"]))
    conns = co["connections"]
    if conns is not None:
        conns = [[list(row) for row in mat] for mat in conns]
    return LRModule(L, ring, co["rank"], conns)


# -- rendering ----------------------------------------------------------------


def _json_safe(value):
    if isinstance(value, str):
        return value.replace("∧", "^")
    if isinstance(value, dict):
        return {_json_safe(k): _json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(v) for v in value]
    return value


def _table(rows: Sequence[Sequence[str]]) -> str:
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    return "\n".join(
        "  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip()
        for row in rows)


def _print_cohomology(title: str, rep: dict, out) -> None:
    print(title, file=out)
    rows = [["degree", "dim", "stabilized", "representatives"]]
    for d in rep["degrees"]:
        rows.append([str(d["degree"]), str(d["dim"]),
                     "yes" if d["stabilized"] else "no",
                     ", ".join(d["representatives"]) or "-"])
    print(_table(rows), file=out)


# -- command implementations --------------------------------------------------


def _cmd_gb(spec: SpecFile, args) -> tuple:
    ring = PolyRing(list(spec.ring_vars))
    gens = [ring.parse(s) for s in spec.ring_ideal]
    if not gens:
        return 0, {"order": "grevlex", "basis": []}, []
    gb = GroebnerBasis.of(gens, ring)
    return 0, {"order": "grevlex",
               "basis": [str(g) for g in gb.gens]}, []


def _cmd_derham(spec: SpecFile, args) -> tuple:
    R = build_base(spec)
    rep = de_rham_cohomology(R, d_max=spec.options["d_max"],
                             window=spec.options["window"])
    code = 0
    if args.require_stable and not rep.all_stabilized():
        code = 3
    return code, rep.as_dict(), []


def _cmd_logder(spec: Optional[SpecFile], args) -> tuple:
    if args.f is not None:
        text = args.f
        if spec is not None:
            ring = PolyRing(list(spec.ring_vars))
        else:
            names = sorted(set(_identifiers(text)))
            if not names:
                raise SpecError("the divisor has no variables")
            ring = PolyRing(names)
    elif spec is not None and spec.divisor is not None:
        text = spec.divisor
        ring = PolyRing(list(spec.ring_vars))
    else:
        raise SpecError("logder needs --f or a divisor in the spec file")
    try:
        f = ring.parse(text)
    except PolyParseError as exc:
        raise SpecError(f"divisor: {exc}") from None
    try:
        L = log_derivations(f)
    except NotCertifiedFreeError as exc:
        witness = {"reason": str(exc),
                   "generators": [vec_str(g) for g in exc.generators]}
        return 2, {"divisor": str(f), "free": False,
                   "witness": witness}, []
    det = L.saito_determinant
    return 0, {
        "divisor": str(L.divisor),
        "free": True,
        "rank": L.rank,
        "certificate": L.certificate,
        "saito": L.certificate == "saito",
        "saito_determinant": None if det is None else str(det),
        "basis": [derivation_text(v, ring) for v in L.derivation_basis],
    }, []


def _identifiers(text: str):
    name = ""
    for ch in text + " ":
        if ch.isalpha() or ch == "_" or (name and ch.isdigit()):
            name += ch
        else:
            if name:
                yield name
            name = ""


def _cmd_lr_cohomology(spec: SpecFile, args) -> tuple:
    L = build_algebra(spec)
    E = build_module(spec, L)
    try:
        rep = ce_cohomology(L, E, d_max=spec.options["d_max"],
                            window=spec.options["window"])
    except LieRinehartError as exc:
        return 2, {"falsified": str(exc)}, []
    code = 0
    if args.require_stable and not rep.all_stabilized():
        code = 3
    return code, rep.as_dict(), []


def _cmd_check(spec: SpecFile, args) -> tuple:
    L = build_algebra(spec)
    axioms = lr_check_axioms(L)
    result = {"axioms": axioms.as_dict(), "flatness": None}
    ok = axioms.ok
    if spec.coefficients is not None:
        E = build_module(spec, L)
        flat = connection_flatness(L, E)
        result["flatness"] = flat.as_dict()
        ok = ok and flat.flat
    return (0 if ok else 2), result, []


def _cmd_koszul(spec: SpecFile, args) -> tuple:
    L = build_algebra(spec)
    rep = koszul_checks(L, spec.options["order"])
    return (0 if rep.ok else 2), rep.as_dict(), []


def _theta_coalgebra_holds(env: TruncatedEnveloping, bound: int):
    """Delta(theta(s)) = (theta x theta)(Delta_S(s)) on monomials up to
    the bound; Delta_S has binomial coefficients."""
    from math import comb
    for alpha in exponents_up_to(env.rank, bound):
        lhs = env.coproduct(pbw_symmetrize(env, {alpha: 1}))
        rhs = TensorElement(env, 2, {})
        for beta in exponents_up_to(env.rank, sum(alpha)):
            if any(b > a for a, b in zip(alpha, beta)):
                continue
            gamma = tuple(a - b for a, b in zip(alpha, beta))
            coeff = 1
            for a, b in zip(alpha, beta):
                coeff *= comb(a, b)
            piece = tensor_pair(pbw_symmetrize(env, {beta: 1}),
                                pbw_symmetrize(env, {gamma: 1}))
            rhs = rhs.add(piece.scale(coeff))
        if lhs != rhs:
            return False, alpha
    return True, None


def _cmd_hkr(spec: SpecFile, args) -> tuple:
    import itertools
    L = build_algebra(spec)
    N = spec.options["order"]
    env = TruncatedEnveloping(L, N)
    witnesses = []

    proj_alt = True
    for p in range(1, min(L.rank, 3, N) + 1):
        for subset in itertools.combinations(range(L.rank), p):
            back = proj_map(alt_map(env, subset))
            if set(back) != {subset} or not (
                    back[subset] == L.base.one()):
                proj_alt = False
                witnesses.append(f"P(Alt(e{subset})) != e{subset}")

    theta_ok, bad = _theta_coalgebra_holds(env, min(N, 3))
    if not theta_ok:
        witnesses.append(f"theta is not a coalgebra morphism at {bad}")

    reduced_zero = True
    for p in range(1, L.rank + 1):
        m = reduced_koszul_differential(L, p)
        if any(not e.is_zero() for row in m for e in row):
            reduced_zero = False
            witnesses.append({
                "reduced_koszul_degree": p,
                "matrix": [[str(e) for e in row] for row in m]})

    structural = koszul_checks(L, N, degrees=[])
    if not structural.d_squared_zero:
        witnesses.extend(structural.witnesses)

    ok = proj_alt and theta_ok and reduced_zero and structural.d_squared_zero
    return (0 if ok else 2), {
        "order": N,
        "proj_alt_identity": proj_alt,
        "theta_coalgebra_morphism": theta_ok,
        "reduced_koszul_zero": reduced_zero,
        "d_squared_zero": structural.d_squared_zero,
        "witnesses": witnesses,
    }, []


def _cmd_dual_hkr(spec: SpecFile, args) -> tuple:
    L = build_algebra(spec)
    N = spec.options["order"]
    tdm = spec.options["tensor_degree_max"]
    try:
        A = FiniteCoalgebra.of_jets(TruncatedEnveloping(L, N))
    except ValueError as exc:
        raise SpecError(f"dual-hkr precondition: {exc}") from None
    cobar = cobar_truncated_cohomology(A, tdm)
    try:
        ce = ce_cohomology(L, LRModule.trivial(L),
                           d_max=spec.options["d_max"],
                           window=spec.options["window"])
    except LieRinehartError as exc:
        return 2, {"falsified": str(exc)}, []
    ce_dims = ce.dims()
    compared = []
    match = True
    for n in range(min(tdm, L.rank + 1)):
        faithful = n <= N
        same = cobar.dims[n] == ce_dims[n]
        compared.append({"degree": n, "cobar": cobar.dims[n],
                         "ce": ce_dims[n], "faithful": faithful,
                         "match": same})
        if faithful and not same:
            match = False
    code = 0 if match else 2
    if args.require_stable and not ce.all_stabilized():
        code = 3
    return code, {
        "order": N,
        "tensor_degree_max": tdm,
        "cobar_dims": list(cobar.dims),
        "ce_dims": list(ce_dims),
        "comparison": compared,
        "match": match,
    }, []


_HANDLERS = {
    "gb": _cmd_gb,
    "derham": _cmd_derham,
    "logder": _cmd_logder,
    "lr-cohomology": _cmd_lr_cohomology,
    "check": _cmd_check,
    "koszul": _cmd_koszul,
    "hkr": _cmd_hkr,
    "dual-hkr": _cmd_dual_hkr,
}


# -- human rendering per command ----------------------------------------------


def _print_human(command: str, result: dict, out) -> None:
    if command in ("derham", "lr-cohomology") and "dims" in result:
        _print_cohomology(f"{result['name']}: dims {result['dims']}",
                          result, out)
        return
    if command == "logder":
        if not result["free"]:
            print("not certified free", file=out)
            for g in result["witness"]["generators"]:
                print(f"  {g}", file=out)
            return
        print(f"T(-log {result['divisor']}): free of rank {result['rank']} "
              f"({result['certificate']})", file=out)
        for b in result["basis"]:
            print(f"  {b}", file=out)
        if result["saito_determinant"] is not None:
            print(f"det = {result['saito_determinant']}", file=out)
        return
    if command == "gb":
        if result["basis"]:
            for g in result["basis"]:
                print(g, file=out)
        else:
            print("(zero ideal)", file=out)
        return
    # check / koszul / hkr / dual-hkr read fine as key: value lines
    for key, val in result.items():
        print(f"{key}: {val}", file=out)


# -- entry point ---------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse default exits with code 2
        raise SpecError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="rinehart", description=__doc__.splitlines()[0])
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("specfile", nargs="?",
                        help="TOML spec file (JSON with --spec-json)")
    parser.add_argument("--json", action="store_true",
                        help="emit the JSON report on stdout")
    parser.add_argument("--spec-json", metavar="PATH",
                        help="read the spec as strict JSON from PATH")
    parser.add_argument("--d-max", type=int, dest="d_max")
    parser.add_argument("--window", type=int)
    parser.add_argument("--order", type=int)
    parser.add_argument("--require-stable", action="store_true")
    parser.add_argument("--f", metavar="POLY",
                        help="divisor polynomial (logder)")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    out = sys.stdout
    started = time.monotonic()
    try:
        args = _build_parser().parse_args(argv)
        spec = None
        if args.spec_json is not None:
            spec = load_spec(args.spec_json, as_json=True)
        elif args.specfile is not None:
            spec = load_spec(args.specfile, as_json=False)
        if spec is None and args.command != "logder":
            raise SpecError(f"{args.command} needs a spec file")
        if spec is not None:
            options = dict(spec.options)
            for key in ("d_max", "window", "order"):
                val = getattr(args, key)
                if val is not None:
                    options[key] = val
            spec = SpecFile(spec.ring_vars, spec.ring_ideal, spec.divisor,
                            spec.lie_rinehart, spec.coefficients, options)
        code, result, warnings = _HANDLERS[args.command](spec, args)
    except (SpecError, PolyParseError, LieRinehartError, ComplexError,
            OrderOverflowError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    report = {
        "schema_version": SCHEMA_VERSION,
        "command": args.command,
        "input": spec.echo() if spec is not None else {"f": args.f},
        "result": _json_safe(result),
        "warnings": list(warnings),
        "exit_code": code,
        "timing_ms": round((time.monotonic() - started) * 1000, 3),
    }
    if args.json:
        print(json.dumps(report, sort_keys=True, indent=2,
                         ensure_ascii=False), file=out)
    else:
        _print_human(args.command, result, out)
        if code == 3:
            print("warning: not stabilized within the window",
                  file=sys.stderr)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
