"""Command-line front end.

Subcommands: ``value`` computes or bounds a synchronous value, ``product``
writes the conjunctive product of two game files, ``verify`` runs the bundled
verification suite, ``check-realization`` measures a realization against a
game.  Output is line-oriented ``key = value`` text; exit codes are 0 for
success, 1 for a failed check, 2 for parse or usage errors, and 3 when a
numerical method does not converge.

Game files are line-oriented UTF-8 with ``#`` comments: ``game <name>``,
``inputs <n>``, ``outputs <k>``, zero or more ``allow <x> <y> <a> <b>``
(all indices 1-based), then ``density uniform`` or lines
``density <x> <y> <p/q>``.  Realization files: ``blocks <m>``, then per block
``weight <w>``, ``dim <d>``, and for each question/answer a line
``P <x> <a>`` followed by d rows of d entries ``re+imi``.
"""

from __future__ import annotations

import argparse
import sys
import time
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Optional

import numpy as np

from .correlations import expected_value, is_perfect
from .errors import (
    DensityNotNormalized,
    NotConverged,
    ParseError,
    SyncGamesError,
)
from .exact import local_synchronous_value, ns_synchronous_value
from .games import Density, Game, new_game, product, product_density, uniform_density
from .quantum import Block, Realization, correlation_of, seesaw_lower_bound, verify_realization
from .sdp import qc_upper_bound
from .verification import CHECKS, run_checks

__all__ = [
    "GameFile",
    "main",
    "parse_game",
    "parse_realization",
    "render_game",
    "render_realization",
]


@dataclass(frozen=True)
class GameFile:
    name: str
    game: Game
    density: Density


def _content_lines(text: str) -> list[tuple[int, list[str]]]:
    out = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            out.append((lineno, line.split()))
    return out


def _parse_int(tok: str, lineno: int, what: str) -> int:
    try:
        return int(tok)
    except ValueError:
        raise ParseError(f"{what} must be an integer, got {tok!r}", lineno) from None


def parse_game(text: str) -> GameFile:
    """Parse the line-oriented game format; see the module docstring."""
    name = "unnamed"
    n: Optional[int] = None
    k: Optional[int] = None
    wins: list[tuple[int, int, int, int]] = []
    uniform = False
    entries: dict[tuple[int, int], Fraction] = {}
    max_q = 0
    max_a = 0
    for lineno, parts in _content_lines(text):
        head, rest = parts[0], parts[1:]
        if head == "game":
            if len(rest) != 1:
                raise ParseError("expected: game <name>", lineno)
            name = rest[0]
        elif head == "inputs":
            if len(rest) != 1:
                raise ParseError("expected: inputs <n>", lineno)
            n = _parse_int(rest[0], lineno, "inputs")
        elif head == "outputs":
            if len(rest) != 1:
                raise ParseError("expected: outputs <k>", lineno)
            k = _parse_int(rest[0], lineno, "outputs")
        elif head == "allow":
            if len(rest) != 4:
                raise ParseError("expected: allow <x> <y> <a> <b>", lineno)
            x, y, a, b = (_parse_int(t, lineno, "allow index") for t in rest)
            if min(x, y, a, b) < 1:
                raise ParseError("allow indices are 1-based", lineno)
            max_q = max(max_q, x, y)
            max_a = max(max_a, a, b)
            wins.append((x - 1, y - 1, a - 1, b - 1))
        elif head == "density":
            if rest == ["uniform"]:
                uniform = True
            elif len(rest) == 3:
                x = _parse_int(rest[0], lineno, "density question")
                y = _parse_int(rest[1], lineno, "density question")
                if min(x, y) < 1:
                    raise ParseError("density indices are 1-based", lineno)
                try:
                    w = Fraction(rest[2])
                except (ValueError, ZeroDivisionError):
                    raise ParseError(f"bad weight {rest[2]!r}", lineno) from None
                max_q = max(max_q, x, y)
                entries[(x - 1, y - 1)] = entries.get((x - 1, y - 1), Fraction(0)) + w
            else:
                raise ParseError("expected: density uniform | density <x> <y> <p/q>", lineno)
        else:
            raise ParseError(f"unknown directive {head!r}", lineno)
    if uniform and entries:
        raise ParseError("both uniform and explicit density given")
    if n is None:
        n = max_q
    if n < 1:
        raise ParseError("number of inputs not given and not inferable")
    if any(q >= n for pair in entries for q in pair) or any(
        w[0] >= n or w[1] >= n for w in wins
    ):
        raise ParseError(f"question index out of range 1..{n}")
    if uniform:
        density = uniform_density(n)
    elif entries:
        density = Density(
            tuple(
                tuple(entries.get((x, y), Fraction(0)) for y in range(n))
                for x in range(n)
            )
        )
    else:
        raise ParseError("no density given")
    if k is None:
        k = max_a
    if k < 1:
        raise ParseError("number of outputs not given and not inferable")
    game = new_game(n, k, wins)
    return GameFile(name, game, density)


def render_game(gf: GameFile, header: str = "") -> str:
    """Canonical text for a game file; parse(render(gf)) == gf."""
    g, d = gf.game, gf.density
    lines = []
    if header:
        lines.extend("# " + h if h else "#" for h in header.splitlines())
    lines.append(f"game {gf.name}")
    lines.append(f"inputs {g.n_inputs}")
    lines.append(f"outputs {g.n_outputs}")
    for x in range(g.n_inputs):
        for y in range(g.n_inputs):
            for a, b in g.winning_pairs(x, y):
                lines.append(f"allow {x + 1} {y + 1} {a + 1} {b + 1}")
    if d == uniform_density(g.n_inputs):
        lines.append("density uniform")
    else:
        for x in range(g.n_inputs):
            for y in range(g.n_inputs):
                if d.weights[x][y] != 0:
                    lines.append(f"density {x + 1} {y + 1} {d.weights[x][y]}")
    return "\n".join(lines) + "\n"


def _parse_complex(tok: str, lineno: int) -> complex:
    if not tok.endswith("i"):
        raise ParseError(f"matrix entry {tok!r} must end in 'i'", lineno)
    body = tok[:-1]
    for pos in range(len(body) - 1, 0, -1):
        if body[pos] in "+-" and body[pos - 1] not in "eE":
            re_part, im_part = body[:pos], body[pos:]
            break
    else:
        raise ParseError(f"matrix entry {tok!r} is not of the form re+imi", lineno)
    try:
        return complex(float(re_part), float(im_part))
    except ValueError:
        raise ParseError(f"matrix entry {tok!r} is not of the form re+imi", lineno) from None


def _fmt_complex(v: complex) -> str:
    re, im = float(v.real), float(v.imag)
    sign = "+" if im >= 0 else "-"
    return f"{re!r}{sign}{abs(im)!r}i"


def parse_realization(text: str) -> Realization:
    """Parse the block-diagonal realization format; see the module docstring."""
    lines = _content_lines(text)
    pos = 0

    def take(expect: str, count: int) -> tuple[int, list[str]]:
        nonlocal pos
        if pos >= len(lines):
            raise ParseError(f"unexpected end of file, expected {expect!r}")
        lineno, parts = lines[pos]
        if parts[0] != expect or len(parts) != count + 1:
            raise ParseError(f"expected {expect!r} with {count} fields", lineno)
        pos += 1
        return lineno, parts[1:]

    lineno, rest = take("blocks", 1)
    n_blocks = _parse_int(rest[0], lineno, "blocks")
    if n_blocks < 1:
        raise ParseError("at least one block required", lineno)
    blocks = []
    for _ in range(n_blocks):
        lineno, rest = take("weight", 1)
        try:
            weight = float(Fraction(rest[0]))
        except (ValueError, ZeroDivisionError):
            raise ParseError(f"bad weight {rest[0]!r}", lineno) from None
        lineno, rest = take("dim", 1)
        dim = _parse_int(rest[0], lineno, "dim")
        if dim < 1:
            raise ParseError("dim must be positive", lineno)
        mats: dict[tuple[int, int], np.ndarray] = {}
        while pos < len(lines) and lines[pos][1][0] == "P":
            lineno, parts = lines[pos]
            if len(parts) != 3:
                raise ParseError("expected: P <x> <a>", lineno)
            x = _parse_int(parts[1], lineno, "question")
            a = _parse_int(parts[2], lineno, "answer")
            if min(x, a) < 1:
                raise ParseError("projection indices are 1-based", lineno)
            if (x - 1, a - 1) in mats:
                raise ParseError(f"duplicate projection P {x} {a}", lineno)
            pos += 1
            rows = []
            for _ in range(dim):
                if pos >= len(lines):
                    raise ParseError(f"matrix P {x} {a} cut short", lineno)
                row_lineno, toks = lines[pos]
                if len(toks) != dim:
                    raise ParseError(f"expected {dim} entries", row_lineno)
                rows.append([_parse_complex(t, row_lineno) for t in toks])
                pos += 1
            mats[(x - 1, a - 1)] = np.array(rows, dtype=complex)
        if not mats:
            raise ParseError("block has no projections", lineno)
        n = 1 + max(x for x, _ in mats)
        k = 1 + max(a for _, a in mats)
        missing = [(x, a) for x in range(n) for a in range(k) if (x, a) not in mats]
        if missing:
            x, a = missing[0]
            raise ParseError(f"missing projection P {x + 1} {a + 1}")
        blocks.append(
            Block(weight, tuple(tuple(mats[(x, a)] for a in range(k)) for x in range(n)))
        )
    if pos != len(lines):
        raise ParseError("trailing content", lines[pos][0])
    return Realization(tuple(blocks))


def render_realization(r: Realization) -> str:
    lines = [f"blocks {len(r.blocks)}"]
    for blk in r.blocks:
        lines.append(f"weight {blk.weight!r}")
        lines.append(f"dim {blk.dim}")
        for x in range(blk.n_inputs):
            for a in range(blk.n_outputs):
                lines.append(f"P {x + 1} {a + 1}")
                for row in blk.projections[x][a]:
                    lines.append(" ".join(_fmt_complex(v) for v in row))
    return "\n".join(lines) + "\n"


def _read_text(path: str) -> str:
    p = Path(path)
    if p.exists():
        return p.read_text()
    if "/" not in path and "\\" not in path:
        res = resources.files("syncgames").joinpath("data", path)
        if res.is_file():
            return res.read_text()
    raise ParseError(f"no such file: {path}")


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def _emit(pairs: list[tuple[str, object]]) -> None:
    for key, value in pairs:
        print(f"{key} = {value}")


def _cmd_value(args: argparse.Namespace) -> int:
    gf = parse_game(_read_text(args.game))
    out: list[tuple[str, object]] = [("game", gf.name), ("class", args.value_class)]
    start = time.perf_counter()
    status = 0
    if args.value_class == "loc":
        rep = local_synchronous_value(gf.game, gf.density)
        out.append(("value", rep.value))
        out.append(("witness", " ".join(str(a + 1) for a in rep.witness.assignment)))
    elif args.value_class == "ns":
        rep = ns_synchronous_value(gf.game, gf.density)
        out.append(("value", rep.value))
        out.append(("certificate", "verified" if rep.certificate.verified else "unverified"))
        out.append(("witness_support", len(rep.witness.exact)))
    elif args.value_class == "q-lower":
        value, _ = seesaw_lower_bound(
            gf.game,
            gf.density,
            dim=args.dim,
            restarts=args.restarts,
            seed=args.seed,
            max_iters=args.max_iters or 500,
        )
        out.append(("value", repr(value)))
        out.append(("dim", args.dim))
        out.append(("restarts", args.restarts))
        out.append(("seed", args.seed))
    else:  # qc-upper
        qb = qc_upper_bound(
            gf.game,
            gf.density,
            level=args.level,
            tol=args.tol,
            max_iters=args.max_iters or 200000,
        )
        out.append(("value", repr(qb.objective_value)))
        out.append(("bound", repr(qb.bound)))
        out.append(("soundness_margin", f"{qb.soundness_margin:.3e}"))
        out.append(("level", args.level))
        out.append(("iterations", qb.solution.iterations))
        out.append(("status", qb.solution.status))
    if not args.no_timing:
        out.append(("time_s", f"{time.perf_counter() - start:.3f}"))
    _emit(out)
    return status


def _cmd_product(args: argparse.Namespace) -> int:
    gf1 = parse_game(_read_text(args.game1))
    gf2 = parse_game(_read_text(args.game2))
    gp = product(gf1.game, gf2.game)
    dp = product_density(gf1.density, gf2.density)
    name = args.name or f"{gf1.name}x{gf2.name}"
    n2, k2 = gf2.game.n_inputs, gf2.game.n_outputs
    header = (
        "conjunctive product game: question (i,j) of the factors becomes\n"
        f"question (i-1)*{n2} + j here, and answer (a,b) becomes (a-1)*{k2} + b\n"
        "(1-based, row-major in the second factor)"
    )
    text = render_game(GameFile(name, gp, dp), header=header)
    Path(args.output).write_text(text)
    _emit([("written", args.output), ("inputs", gp.n_inputs), ("outputs", gp.n_outputs)])
    return 0


def _cmd_verify(args: argparse.Namespace) -> int:
    skip = set(args.skip or [])
    start = time.perf_counter()
    results = run_checks(skip)
    by_name = {r.name: r for r in results}
    failures = []
    for name, category, _ in CHECKS:
        if category in skip:
            print(f"check {name} = skipped")
            continue
        r = by_name[name]
        print(f"check {name} = {'pass' if r.passed else 'fail'}")
        if not r.passed:
            failures.append(name)
            for line in r.details:
                print(f"info {name}: {line}")
    print(f"checks_passed = {sum(1 for r in results if r.passed)}")
    print(f"checks_failed = {len(failures)}")
    if failures:
        print(f"first_failure = {failures[0]}")
    if not args.no_timing:
        print(f"time_s = {time.perf_counter() - start:.3f}")
    print(f"result = {'pass' if not failures else 'fail'}")
    return 0 if not failures else 1


def _cmd_check_realization(args: argparse.Namespace) -> int:
    gf = parse_game(_read_text(args.game))
    r = parse_realization(_read_text(args.realization))
    rep = verify_realization(r, gf.game, tol=args.tol)
    corr = correlation_of(r)
    value = expected_value(corr, gf.game, gf.density)
    out = [
        ("projection_defect", f"{rep.projection_defect:.3e}"),
        ("completeness_defect", f"{rep.completeness_defect:.3e}"),
        ("rule_defect", f"{rep.rule_defect:.3e}"),
        ("value", repr(float(value))),
        ("perfect", "yes" if is_perfect(corr, gf.game) else "no"),
        ("passed", "yes" if rep.passed else "no"),
    ]
    _emit(out)
    return 0 if rep.passed else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="syncgames",
        description="synchronous non-local games: values, products, verification",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_value = sub.add_parser("value", help="compute or bound a synchronous value")
    p_value.add_argument("game", help="game file (bundled names like example1.game work)")
    p_value.add_argument(
        "--class",
        dest="value_class",
        required=True,
        choices=["loc", "ns", "q-lower", "qc-upper"],
        help="which synchronous value to compute",
    )
    p_value.add_argument("--dim", type=int, default=2, help="search dimension (q-lower)")
    p_value.add_argument("--restarts", type=int, default=20, help="restarts (q-lower)")
    p_value.add_argument("--seed", type=int, default=0, help="random seed (q-lower)")
    p_value.add_argument("--level", type=int, default=1, choices=[1, 2], help="relaxation level (qc-upper)")
    p_value.add_argument("--tol", type=float, default=1e-8, help="solver tolerance (qc-upper)")
    p_value.add_argument("--max-iters", type=int, default=None, help="iteration cap")
    p_value.add_argument("--no-timing", action="store_true", help="suppress timing lines")
    p_value.set_defaults(func=_cmd_value)

    p_prod = sub.add_parser("product", help="write the conjunctive product of two games")
    p_prod.add_argument("game1")
    p_prod.add_argument("game2")
    p_prod.add_argument("output", help="path of the product game file to write")
    p_prod.add_argument("--name", default=None, help="name recorded in the output file")
    p_prod.set_defaults(func=_cmd_product)

    p_ver = sub.add_parser("verify", help="run the bundled verification suite")
    p_ver.add_argument(
        "--skip",
        action="append",
        choices=["exact", "quantum", "sdp"],
        help="skip a check category (repeatable)",
    )
    p_ver.add_argument("--no-timing", action="store_true", help="suppress timing lines")
    p_ver.set_defaults(func=_cmd_verify)

    p_chk = sub.add_parser("check-realization", help="measure a realization against a game")
    p_chk.add_argument("game")
    p_chk.add_argument("realization")
    p_chk.add_argument("--tol", type=float, default=1e-9, help="defect tolerance")
    p_chk.set_defaults(func=_cmd_check_realization)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except NotConverged as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (SyncGamesError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
