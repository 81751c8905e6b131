"""Command line driver and the canonical text format for elements.

Text format, one term per summand joined by `` + ``::

    1                 the unit
    dlog(X1)          dlog of the first log variable
    dlog(C2)          dlog of the second phantom generator
    eps{xi=V^1(1); k=[1/p^1]; P=(-inf:[]; I1=[1]); J=[]}

``xi`` is written ``V^u(eta)`` when xi = p^u eta with u = u(k) > 0.  Empty
I_0 blocks are omitted from ``P``.

Reports are JSON objects ``{schema, config, checks, tables, timing_ms}``.
Timing is left at 0 unless ``--timing`` is given so that reports for a fixed
seed and configuration are byte-identical.
"""

from __future__ import annotations

import argparse
import json
import random
import re
import sys
import time
from dataclasses import asdict, dataclass, fields
from fractions import Fraction
from typing import Dict, List, Optional, Sequence

from .drw import DrwElement, key_sort
from .weights import POLE, LocalModel, ModelError, Partition, format_entry, parse_entry, u_of, validate_partition

SCHEMA = "logdrw-report/1"
COMMANDS = ("verify", "cohomology", "compare-lift", "e1", "gauss", "mv", "steenbrink")
SUITES = ("identities", "words", "ghost", "roundtrip", "witt", "theta")


class ParseError(ValueError):
    pass


# --- text format --------------------------------------------------------------------------------


def _list(xs) -> str:
    return "[" + ", ".join(str(x) for x in xs) + "]"


def serialize_term(model: LocalModel, key, xi: int) -> str:
    k, part, J = key
    p = model.p
    trivial_blocks = part.blocks == ((),)
    if trivial_blocks and not part.poles and not J and all(x == 0 for x in k):
        return str(xi)
    if xi == 1 and trivial_blocks:
        if not J and len(part.poles) == 1:
            (i,) = part.poles
            if all((x is POLE) == (t == i) and (x is POLE or x == 0) for t, x in enumerate(k, start=1)):
                return f"dlog(X{i})"
        if not part.poles and len(J) == 1 and all(x == 0 for x in k):
            return f"dlog(C{J[0]})"
    u = u_of(k, p)
    xi_text = f"V^{u}({xi // p**u})" if u and xi % p**u == 0 else str(xi)
    blocks = [f"I{j}={_list(b)}" for j, b in enumerate(part.blocks) if b or j > 0]
    ptext = "; ".join([f"-inf:{_list(part.poles)}"] + blocks)
    ktext = _list(format_entry(x, p) for x in k)
    return f"eps{{xi={xi_text}; k={ktext}; P=({ptext}); J={_list(J)}}}"


def serialize(obj) -> str:
    """Canonical text for elements, homology reports and E_1 pages."""
    from .filtration_ss import E1Page
    from .homology import HomologyReport

    if isinstance(obj, DrwElement):
        if not obj.terms:
            return "0"
        return " + ".join(serialize_term(obj.model, key, xi) for key, xi in obj.sorted_terms())
    if isinstance(obj, (HomologyReport, E1Page)):
        return json.dumps(obj.table(), sort_keys=True, separators=(",", ":"))
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _split_terms(text: str) -> List[str]:
    out, depth, cur = [], 0, []
    for ch in text:
        if ch in "{([":
            depth += 1
        elif ch in "})]":
            depth -= 1
        if ch == "+" and depth == 0:
            out.append("".join(cur).strip())
            cur = []
        else:
            cur.append(ch)
    out.append("".join(cur).strip())
    if any(not t for t in out):
        raise ParseError(f"empty summand in {text!r}")
    return out


def _int_list(text: str) -> tuple:
    text = text.strip()
    if not (text.startswith("[") and text.endswith("]")):
        raise ParseError(f"expected a list, got {text!r}")
    inner = text[1:-1].strip()
    return tuple(int(x) for x in inner.split(",")) if inner else ()


_EPS = re.compile(r"eps\{xi=(?P<xi>[^;]+);\s*k=\[(?P<k>[^\]]*)\];\s*P=\((?P<P>.*)\);\s*J=(?P<J>\[[^\]]*\])\}")


def parse_term(text: str, model: LocalModel, m: int):
    p, n = model.p, model.n
    zero = tuple(Fraction(0) for _ in range(n))
    if re.fullmatch(r"\d+", text):
        return (zero, Partition((), ((),)), ()), int(text)
    mt = re.fullmatch(r"dlog\(X(\d+)\)", text)
    if mt:
        i = int(mt.group(1))
        if not 1 <= i <= model.e:
            raise ParseError(f"no log variable X{i}")
        k = tuple(POLE if t == i else Fraction(0) for t in range(1, n + 1))
        return (k, Partition((i,), ((),)), ()), 1
    mt = re.fullmatch(r"dlog\(C(\d+)\)", text)
    if mt:
        j = int(mt.group(1))
        if not 1 <= j <= model.f:
            raise ParseError(f"no phantom generator C{j}")
        return (zero, Partition((), ((),)), (j,)), 1
    mt = _EPS.fullmatch(text)
    if not mt:
        raise ParseError(f"cannot parse term {text!r}")
    try:
        k = tuple(parse_entry(x, p) for x in mt.group("k").split(","))
    except ValueError as exc:
        raise ParseError(str(exc)) from exc
    if len(k) != n:
        raise ParseError(f"weight {mt.group('k')!r} has the wrong length")
    xi_text = mt.group("xi").strip()
    mv = re.fullmatch(r"V\^(\d+)\((\d+)\)", xi_text)
    if mv:
        xi = p ** int(mv.group(1)) * int(mv.group(2))
    elif re.fullmatch(r"\d+", xi_text):
        xi = int(xi_text)
    else:
        raise ParseError(f"bad coefficient {xi_text!r}")
    pieces = [s.strip() for s in mt.group("P").split(";")]
    if not pieces[0].startswith("-inf:"):
        raise ParseError("partition must start with the pole block")
    poles = _int_list(pieces[0][5:])
    blocks: Dict[int, tuple] = {}
    for piece in pieces[1:]:
        mb = re.fullmatch(r"I(\d+)=(\[.*\])", piece)
        if not mb:
            raise ParseError(f"bad block {piece!r}")
        blocks[int(mb.group(1))] = _int_list(mb.group(2))
    top = max(blocks, default=0)
    part = Partition(poles, tuple(blocks.get(j, ()) for j in range(top + 1)))
    if not validate_partition(k, part, p):
        raise ParseError(f"partition {part} does not fit weight {k}")
    J = _int_list(mt.group("J"))
    if any(not 1 <= j <= model.f for j in J) or list(J) != sorted(set(J)):
        raise ParseError(f"bad phantom index list {J}")
    return (k, part, J), xi


def parse_element(text: str, model: LocalModel, m: int) -> DrwElement:
    text = text.strip()
    if text == "0":
        return DrwElement(model, m)
    terms: Dict[tuple, int] = {}
    for piece in _split_terms(text):
        key, xi = parse_term(piece, model, m)
        terms[key] = terms.get(key, 0) + xi
    return DrwElement(model, m, terms)


# --- configuration -----------------------------------------------------------------------------


@dataclass
class SuiteConfig:
    command: str = "verify"
    suite: str = "identities"
    model: str = "poly:p=2,n=1,e=1,f=0"
    m: int = 2
    max_num: int = 4
    max_den: int = 1
    trials: int = 100
    seed: int = 0
    N: int = 3
    eps: str = "1/2"
    method: str = "local"
    variant: str = "absolute"
    output: Optional[str] = None
    timing: bool = False

    def validate(self) -> LocalModel:
        if self.m < 1 or self.N < 1 or self.trials < 0 or self.max_num < 0 or self.max_den < 0:
            raise ParseError("levels, bounds and trial counts must be positive")
        if self.method not in ("local", "integer"):
            raise ParseError(f"unknown method {self.method!r}")
        try:
            model = LocalModel.parse(self.model)
        except ModelError as exc:
            raise ParseError(str(exc)) from exc
        for e in self.eps_values():
            if e <= 0:
                raise ParseError("eps must be positive")
        return model

    def eps_values(self) -> List[Fraction]:
        try:
            return [Fraction(x.strip()) for x in str(self.eps).split(",") if x.strip()]
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"bad eps {self.eps!r}") from exc


_INT_FIELDS = {"m", "max_num", "max_den", "trials", "seed", "N"}


def read_config(path: str) -> Dict[str, object]:
    """key=value lines; ``#`` starts a comment; keys use the flag names."""
    out: Dict[str, object] = {}
    known = {f.name for f in fields(SuiteConfig)}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ParseError(f"{path}:{lineno}: expected key=value")
            key, value = (s.strip() for s in line.split("=", 1))
            key = key.replace("-", "_")
            if key not in known or key == "command":
                raise ParseError(f"{path}:{lineno}: unknown key {key!r}")
            if key in _INT_FIELDS:
                try:
                    out[key] = int(value)
                except ValueError as exc:
                    raise ParseError(f"{path}:{lineno}: {key} must be an integer") from exc
            elif key == "timing":
                out[key] = value.lower() in ("1", "true", "yes")
            else:
                out[key] = value
    return out


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ParseError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="logdrw", description="Per-weight checks of log de Rham-Witt complexes.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config")
        sp.add_argument("--model")
        sp.add_argument("--m", type=int)
        sp.add_argument("--max-num", dest="max_num", type=int)
        sp.add_argument("--max-den", dest="max_den", type=int)
        sp.add_argument("--trials", type=int)
        sp.add_argument("--seed", type=int)
        sp.add_argument("--N", type=int)
        sp.add_argument("--eps")
        sp.add_argument("--method", choices=("local", "integer"))
        sp.add_argument("--output")
        sp.add_argument("--timing", action="store_true", default=None)
        if name == "verify":
            sp.add_argument("--suite", choices=SUITES)
        if name == "cohomology":
            sp.add_argument("--variant", choices=("absolute", "relative", "lift", "steenbrink-row"))
    return parser


def make_config(argv: Sequence[str]) -> SuiteConfig:
    args = vars(build_parser().parse_args(list(argv)))
    values: Dict[str, object] = {}
    if args.get("config"):
        try:
            values.update(read_config(args["config"]))
        except OSError as exc:
            raise ParseError(f"cannot read config: {exc}") from exc
    for key, value in args.items():
        if key != "config" and value is not None:
            values[key] = value
    return SuiteConfig(**values)


# --- running -----------------------------------------------------------------------------------


def execute(cfg: SuiteConfig) -> dict:
    from . import suites

    model = cfg.validate()
    rng = random.Random(cfg.seed)
    tables: Dict[str, object] = {}
    checks: list = []
    cmd = cfg.command
    if cmd == "verify":
        fn = {
            "identities": lambda: suites.identities(model, cfg.m, cfg.trials, rng),
            "words": lambda: suites.words(model, cfg.m, cfg.trials, rng),
            "ghost": lambda: [suites.ghost_grid(model, cfg.m, cfg.max_num, cfg.max_den)]
            + suites.ghost_laws(model, cfg.m, cfg.trials, rng),
            "roundtrip": lambda: suites.roundtrip(model, cfg.m, cfg.trials, rng),
            "witt": lambda: suites.witt_oracle(model, cfg.m, cfg.trials, rng),
            "theta": lambda: suites.theta_checks(model, cfg.m, cfg.trials, rng, cfg.max_num, cfg.max_den),
        }[cfg.suite]
        checks = fn()
    elif cmd == "cohomology":
        tables["weights"] = suites.cohomology_tables(model, cfg.m, cfg.max_num, cfg.max_den,
                                                     cfg.variant, cfg.method)
    elif cmd == "compare-lift":
        checks, tables["weights"] = suites.compare_lift(model, cfg.m, cfg.max_num, cfg.max_den, cfg.method)
    elif cmd == "e1":
        checks, page = suites.e1_checks(model, cfg.m, cfg.max_num, cfg.max_den, cfg.method)
        tables["e1"] = page.table()
        tables["twists"] = {f"{a},{b}": [list(t) for t in v] for (a, b), v in sorted(page.twists.items())}
        tables["weights"] = [suites._kappa_label(k, model.p) for k in page.weights]
    elif cmd == "gauss":
        checks = suites.gauss(model, cfg.N, cfg.trials, rng, cfg.eps_values())
    elif cmd == "mv":
        checks = suites.mv_checks(model, cfg.m, cfg.max_num, cfg.max_den)
    elif cmd == "steenbrink":
        checks = suites.steenbrink_checks(model, cfg.m, cfg.max_num, cfg.max_den, cfg.method)
    config = asdict(cfg)
    config.pop("output")
    config.pop("timing")
    return {"schema": SCHEMA, "config": config, "checks": [c.as_dict() for c in checks],
            "tables": tables, "timing_ms": 0}


def render(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Entry point; returns 0 if every check passed, 1 on a failure, 2 on bad input."""
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = make_config(argv)
        start = time.perf_counter()
        report = execute(cfg)
    except ParseError as exc:
        print(f"logdrw: error: {exc}", file=sys.stderr)
        return 2
    if cfg.timing:
        report["timing_ms"] = round((time.perf_counter() - start) * 1000)
    text = render(report)
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if all(c["status"] == "pass" for c in report["checks"]) else 1


def main() -> None:
    sys.exit(run())
