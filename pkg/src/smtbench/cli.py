"""Command-line driver: enumerations and verifications with JSON reports.

Exit codes: 0 when every check passes, 2 when a check fails (a finding, not a
crash), 1 for usage or configuration errors.
"""

from __future__ import annotations

import argparse
import json
import platform
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, Callable, Sequence

from . import __version__
from .degeneration import sagbi_degree_check, straight_lms
from .errors import EmptyFiber, InvalidParameter, TheoremViolation, UnstableSample
from .fiberprod import coproduct_piece
from .sections import (
    RULES,
    SamplePlan,
    dim_sections,
    restriction_kernel_dim,
    richardson_dim_oracle,
    richardson_monomials,
    schubert_dim_oracle,
    schubert_monomials,
)
from .tableaux import (
    Shape,
    column_sets,
    enumerate_straight,
    enumerate_tableaux,
    render,
    straight_arrangements,
)
from .weyl import Permutation, Word, all_permutations, bruhat_leq, longest_word

SCHEMA = "smtbench.report/1"
EXIT_PASS, EXIT_USAGE, EXIT_FINDING = 0, 1, 2

CONFIG_KEYS = {
    "n", "word", "j", "k", "mult", "w", "v", "powers", "seeds", "samples", "bound",
    "reading", "rule", "opposite", "output", "golden", "dump_tableaux", "jobs",
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# ---------------------------------------------------------------------------
# config handling


def read_config(path: str) -> dict[str, str]:
    """Parse ``key = value`` lines; '#' starts a comment."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        sep = "=" if "=" in line else ":" if ":" in line else None
        if sep is None:
            raise UsageError(f"{path}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (x.strip() for x in line.split(sep, 1))
        key = key.replace("-", "_")
        if key not in CONFIG_KEYS:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}; allowed: {', '.join(sorted(CONFIG_KEYS))}")
        out[key] = value
    return out


def _ints(text: str, field: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.replace(" ", "").split(",") if x != "")
    except ValueError as exc:
        raise UsageError(f"field {field}: expected comma-separated integers, got {text!r}") from exc


class Settings:
    """Merged flags and config values with validation."""

    def __init__(self, args: argparse.Namespace):
        self.args = args
        self.cfg = read_config(args.config) if getattr(args, "config", None) else {}

    def raw(self, key: str):
        v = getattr(self.args, key, None)
        if v is None or v is False:
            v = self.cfg.get(key, v)
        return v

    @property
    def n(self) -> int:
        v = self.raw("n")
        if v is None:
            raise UsageError("field n: required (use --n or 'n = ...' in the config)")
        try:
            n = int(v)
        except ValueError as exc:
            raise UsageError(f"field n: expected an integer, got {v!r}") from exc
        if n < 2:
            raise UsageError(f"field n: must be >= 2, got {n}")
        return n

    def word(self, key: str = "word") -> Word:
        v = self.raw(key)
        if v is None:
            return longest_word(self.n)
        try:
            return Word.parse(str(v), self.n)
        except InvalidParameter as exc:
            raise UsageError(f"field {key}: {exc}") from exc

    def mult(self, length: int, default: int = 1) -> tuple[int, ...]:
        v = self.raw("mult")
        if v is None:
            return (default,) * length
        m = _ints(str(v), "mult")
        if len(m) != length:
            raise UsageError(f"field mult: expected {length} entries, got {len(m)}")
        if any(x < 0 for x in m):
            raise UsageError("field mult: entries must be nonnegative")
        return m

    def perm(self, key: str) -> Permutation | None:
        v = self.raw(key)
        if v is None:
            return None
        try:
            p = Permutation.parse(str(v))
        except InvalidParameter as exc:
            raise UsageError(f"field {key}: {exc}") from exc
        if p.n != self.n:
            raise UsageError(f"field {key}: permutation of {p.n} letters but n = {self.n}")
        return p

    def int_list(self, key: str, default: tuple[int, ...]) -> tuple[int, ...]:
        v = self.raw(key)
        return default if v is None else _ints(str(v), key)

    def int_value(self, key: str, default: int | None) -> int | None:
        v = self.raw(key)
        if v is None:
            return default
        try:
            return int(v)
        except ValueError as exc:
            raise UsageError(f"field {key}: expected an integer, got {v!r}") from exc

    @property
    def reading(self) -> str:
        r = self.raw("reading") or "top"
        if r not in ("top", "bottom"):
            raise UsageError(f"field reading: expected 'top' or 'bottom', got {r!r}")
        return r

    @property
    def rule(self) -> str:
        r = self.raw("rule") or "row"
        if r not in RULES:
            raise UsageError(f"field rule: expected one of {', '.join(RULES)}, got {r!r}")
        return r

    @property
    def opposite(self) -> bool:
        v = self.raw("opposite")
        return v is True or str(v).lower() in ("1", "true", "yes")

    def shape(self) -> Shape:
        word = self.word()
        try:
            shape = Shape(word, self.mult(len(word)))
        except InvalidParameter as exc:
            raise UsageError(f"field mult/word: {exc}") from exc
        return shape.flipped() if self.opposite else shape


# ---------------------------------------------------------------------------
# checks


Check = tuple[str, Callable[[], dict]]


def _run_checks(checks: list[Check], jobs: int) -> list[dict]:
    def run(item: Check) -> dict:
        cid, fn = item
        try:
            rec = fn()
        except TheoremViolation as exc:
            rec = {"pass": False, "violation": str(exc), "details": exc.details}
        rec["id"] = cid
        return rec

    if jobs > 1 and len(checks) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(run, checks))
    else:
        results = [run(c) for c in checks]
    return sorted(results, key=lambda r: r["id"])


def _sets(ks) -> list[list[int]]:
    return [list(K) for K in ks]


def cmd_columns(st: Settings) -> list[Check]:
    word = st.word()

    def go():
        return {"word": str(word), "column_sets": _sets(column_sets(word)), "pass": True}

    return [("columns", go)]


def _uniqueness(shape: Shape, reading: str) -> int:
    arrs = straight_arrangements(shape, reading)
    return max((len(x) for x in arrs.values()), default=0)


def cmd_enumerate(st: Settings) -> list[Check]:
    shape, reading = st.shape(), st.reading

    def go():
        straight = enumerate_straight(shape, reading)
        dump = st.raw("dump_tableaux")
        if dump:
            Path(dump).write_text("\n\n".join(render(t) for t in straight) + "\n")
        most = _uniqueness(shape, reading)
        return {
            "shape": str(shape),
            "generator_count": shape.ordered_count(),
            "straight_count": len(straight),
            "max_straight_orderings_per_class": most,
            "pass": most <= 1,
        }

    return [("enumerate", go)]


def cmd_dim(st: Settings) -> list[Check]:
    shape, reading = st.shape(), st.reading
    def go():
        cert = dim_sections(shape, reading)
        return {**cert.to_dict(), "dim": cert.rank}

    return [("dim", go)]


def cmd_verify_bs(st: Settings) -> list[Check]:
    shape, reading = st.shape(), st.reading

    def go():
        rec = dim_sections(shape, reading).to_dict()
        most = _uniqueness(shape, reading)
        rec["max_straight_orderings_per_class"] = most
        rec["distinct_leading_monomials"] = len(straight_lms(shape, reading))
        rec["pass"] = rec["pass"] and most <= 1
        dump = st.raw("dump_tableaux")
        if dump:
            Path(dump).write_text("\n\n".join(render(t) for t in enumerate_straight(shape, reading)) + "\n")
        return rec

    return [("bs", go)]


def cmd_verify_restriction(st: Settings) -> list[Check]:
    j = st.word("j") if st.raw("j") is not None else st.word()
    mult = st.mult(len(j))
    reading = st.reading
    memo: dict[str, Any] = {}

    def report():
        if "r" not in memo:
            try:
                memo["r"] = restriction_kernel_dim(mult, j, reading)
            except InvalidParameter as exc:
                raise UsageError(f"field j: {exc}") from exc
        return memo["r"]

    def summary():
        return report().to_dict() | {"pass": True}

    def flag(name: str, ok: Callable[[Any], bool]):
        def go():
            r = report()
            return {"value": ok(r), "pass": bool(ok(r))}

        return (f"restriction.{name}", go)

    return [
        ("restriction.summary", summary),
        flag("rank_nullity", lambda r: r.rank_nullity),
        flag("well_defined", lambda r: r.well_defined),
        flag("kernel_spanned_by_flagged", lambda r: r.kernel_spanned_by_flagged),
        flag("straight_j_grid_eq_dim", lambda r: r.straight_j_grid == r.dim_j),
        flag("straight_i_dominated_eq_dim", lambda r: r.straight_i_dominated == r.dim_j),
    ]


def _plans(st: Settings) -> list[SamplePlan]:
    seeds = st.int_list("seeds", (1, 2, 3))
    count = st.int_value("samples", None)
    bound = st.int_value("bound", 50)
    return [SamplePlan(s, count, bound) for s in seeds]


def cmd_verify_schubert(st: Settings) -> list[Check]:
    n = st.n
    w0 = st.perm("w")
    perms = [w0] if w0 else all_permutations(n)
    m = st.mult(n - 1)
    rule = st.rule
    checks = []
    for w in perms:
        for plan in _plans(st):
            def go(w=w, plan=plan):
                count = len(schubert_monomials(w, m, rule))
                oracle = schubert_dim_oracle(w, m, plan)
                return {
                    "w": str(w), "m": list(m), "rule": rule,
                    "count": count, "oracle": oracle.to_dict(), "pass": count == oracle.value,
                }

            checks.append((f"schubert.{w}.m{','.join(map(str, m))}.seed{plan.seed}", go))
    return checks


def cmd_verify_richardson(st: Settings) -> list[Check]:
    n = st.n
    w0, v0 = st.perm("w"), st.perm("v")
    perms = all_permutations(n)
    pairs = [(w, v) for w in ([w0] if w0 else perms) for v in ([v0] if v0 else perms)]
    m = st.mult(n - 1)
    rule = st.rule
    checks = []
    for w, v in pairs:
        for plan in _plans(st):
            def go(w=w, v=v, plan=plan):
                count = len(richardson_monomials(w, v, m, rule))
                oracle = richardson_dim_oracle(w, v, m, plan)
                return {
                    "w": str(w), "v": str(v), "m": list(m), "rule": rule, "comparable": bruhat_leq(v, w),
                    "count": count, "oracle": oracle.to_dict(), "pass": count == oracle.value,
                }

            checks.append((f"richardson.{w}.{v}.m{','.join(map(str, m))}.seed{plan.seed}", go))
    return checks


def cmd_verify_sagbi(st: Settings) -> list[Check]:
    shape = st.shape()
    powers = st.int_list("powers", (2,))
    if any(p < 2 for p in powers):
        raise UsageError("field powers: sagbi checks need p >= 2")
    return [(f"sagbi.p{p}", lambda p=p: sagbi_degree_check(shape, p).to_dict()) for p in powers]


def cmd_fiber_dim(st: Settings) -> list[Check]:
    n = st.n
    j = st.word("j")
    k = st.word("k")
    m = st.mult(len(j))
    powers = st.int_list("powers", (0, 1, 2))

    def piece(p: int):
        def go():
            try:
                c = coproduct_piece(j, k, m, p)
            except EmptyFiber as exc:
                raise UsageError(str(exc)) from exc
            rec = c.to_dict()
            ok = c.injective and c.stability_pass is not False
            if p == 1:
                rec["degree1_formula"] = c.dim == c.dims_r[1] + c.dims_s[1] - c.a1_dim
                ok = ok and rec["degree1_formula"]
            rec["pass"] = ok
            return rec

        return go

    return [(f"fiber.p{p}", piece(p)) for p in powers]


# ---------------------------------------------------------------------------
# reports and goldens


def compare_golden(report: dict, golden_path: str) -> list[str]:
    """Field-level differences between a report and a golden file.

    Timing and the interpreter version are not compared.
    """
    path = Path(golden_path)
    if not path.exists():
        raise UsageError(f"golden file {golden_path} does not exist; record one by rerunning with --record-golden")
    golden = json.loads(path.read_text())
    diffs: list[str] = []

    def walk(a, b, where: str):
        if isinstance(a, dict) and isinstance(b, dict):
            for key in sorted(set(a) | set(b)):
                if key == "timing" or (where == "$.versions" and key == "python"):
                    continue
                if key not in a:
                    diffs.append(f"{where}.{key}: missing in report")
                elif key not in b:
                    diffs.append(f"{where}.{key}: missing in golden")
                else:
                    walk(a[key], b[key], f"{where}.{key}")
        elif isinstance(a, list) and isinstance(b, list) and len(a) == len(b):
            for idx, (x, y) in enumerate(zip(a, b)):
                label = x.get("id", idx) if isinstance(x, dict) else idx
                walk(x, y, f"{where}[{label}]")
        elif a != b:
            diffs.append(f"{where}: report {json.dumps(a)} != golden {json.dumps(b)}")

    walk(report, golden, "$")
    return diffs


def dumps(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


COMMANDS: dict[str, Callable[[Settings], list[Check]]] = {
    "columns": cmd_columns,
    "enumerate": cmd_enumerate,
    "dim": cmd_dim,
    "verify bs": cmd_verify_bs,
    "verify restriction": cmd_verify_restriction,
    "verify schubert": cmd_verify_schubert,
    "verify richardson": cmd_verify_richardson,
    "verify sagbi": cmd_verify_sagbi,
    "fiber dim": cmd_fiber_dim,
}


def run(command: str, st: Settings, timing: bool = True) -> dict:
    jobs = st.int_value("jobs", 1) or 1
    start = time.perf_counter()
    checks = COMMANDS[command](st)
    results = _run_checks(checks, jobs)
    config = {
        key: str(st.raw(key))
        for key in sorted(CONFIG_KEYS - {"output", "golden", "dump_tableaux", "jobs"})
        if st.raw(key) not in (None, False)
    }
    report = {
        "schema": SCHEMA,
        "command": command,
        "config": config,
        "checks": results,
        "pass": all(r.get("pass", False) for r in results),
        "versions": {"smtbench": __version__, "python": platform.python_version()},
    }
    if timing:
        report["timing"] = {"seconds": round(time.perf_counter() - start, 3)}
    return report


def _common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="key = value file mirroring the flags")
    p.add_argument("--n", help="board size")
    p.add_argument("--output", help="write the JSON report here instead of stdout")
    p.add_argument("--golden", help="compare the report against this golden file")
    p.add_argument("--record-golden", action="store_true", help="write the report to --golden")
    p.add_argument("--jobs", help="worker threads for independent checks")
    p.add_argument("--no-timing", action="store_true", help="omit the timing block")
    p.add_argument("--reading", help="straightness reading: top (default) or bottom")


def _shape_flags(p: argparse.ArgumentParser):
    p.add_argument("--word", help="subword of the longest word, comma separated, 0 for omitted letters")
    p.add_argument("--mult", help="multiplicities, comma separated")
    p.add_argument("--opposite", action="store_true", help="use the opposite (involuted) side")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="smtbench", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("columns", help="column sets of a word")
    _common(p)
    p.add_argument("--word")

    for name in ("enumerate", "dim"):
        p = sub.add_parser(name, help=f"{name} tableaux of a shape")
        _common(p)
        _shape_flags(p)
        if name == "enumerate":
            p.add_argument("--dump-tableaux", help="write straight tableaux as grid text to this path")

    ver = sub.add_parser("verify", help="verification suites")
    vsub = ver.add_subparsers(dest="suite", required=True)
    p = vsub.add_parser("bs", help="straight tableaux vs rank")
    _common(p)
    _shape_flags(p)
    p.add_argument("--dump-tableaux")
    p = vsub.add_parser("restriction", help="restriction to a subword")
    _common(p)
    p.add_argument("--j", "--word", dest="j", help="the subword j")
    p.add_argument("--mult")
    for suite in ("schubert", "richardson"):
        p = vsub.add_parser(suite, help=f"{suite} standard monomials vs sampling oracle")
        _common(p)
        p.add_argument("--w")
        if suite == "richardson":
            p.add_argument("--v")
        p.add_argument("--mult", help="flag multiplicities m_1..m_{n-1}")
        p.add_argument("--seeds")
        p.add_argument("--samples")
        p.add_argument("--bound")
        p.add_argument("--rule", help="monomial filter: row (per-row bound, default) or chain (Bruhat chain of lifts)")
    p = vsub.add_parser("sagbi", help="degree-wise initial algebra checks")
    _common(p)
    _shape_flags(p)
    p.add_argument("--powers")

    fib = sub.add_parser("fiber", help="fiber product pieces")
    fsub = fib.add_subparsers(dest="suite", required=True)
    p = fsub.add_parser("dim", help="dimensions of graded pieces")
    _common(p)
    p.add_argument("--j")
    p.add_argument("--k")
    p.add_argument("--mult")
    p.add_argument("--powers")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        command = args.command if args.command in ("columns", "enumerate", "dim") else f"{args.command} {args.suite}"
        st = Settings(args)
        report = run(command, st, timing=not args.no_timing)
        text = dumps(report)
        out = st.raw("output")
        golden = st.raw("golden")
        if args.record_golden:
            if not golden:
                raise UsageError("--record-golden needs --golden PATH")
            Path(golden).write_text(dumps({k: v for k, v in report.items() if k != "timing"}))
        if out:
            Path(out).write_text(text)
        else:
            sys.stdout.write(text)
        if golden and not args.record_golden:
            diffs = compare_golden(report, golden)
            for d in diffs:
                print(f"golden mismatch: {d}", file=sys.stderr)
            if diffs:
                return EXIT_FINDING
        return EXIT_PASS if report["pass"] else EXIT_FINDING
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except UnstableSample as exc:
        print(f"error: unstable sample rank: {exc}; rerun with other seeds", file=sys.stderr)
        return EXIT_USAGE
    except InvalidParameter as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
