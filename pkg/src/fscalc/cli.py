"""Command line front end: a small script interpreter and batch commands.

Scripts are sequences of ``;``-terminated statements::

    define NAME : REGEX ;        bind a network
    regex REGEX ;                compile and push onto the stack
    apply up|down [NAME] "STR" ; map a string through NAME or the stack top
    words upper|lower|pairs N ;  list the first N strings of the stack top
    save NAME FILE ;             write a network (and FILE.sigma)
    load NAME FILE ;             read a network saved by ``save``
    print sigma|size ;           describe the stack top
    set limit N ;                output limit for apply/words
    set debug on|off ;           keep intermediate rule networks
    symbols A B ... ;            declare multi-character symbols
    read lexicon NAME FILE ;     word list, one entry per line
"""

from __future__ import annotations

import argparse
import logging
import os
import shlex
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import TextIO

from . import algebra as alg
from .apply import apply, default_limit, enumerate_words, tokenize as tokenize_input
from .errors import FscError
from .fsm import Network, from_att, from_string, minimize, parse_sigma, sigma_text, to_att
from .regex import Environment, compile_regex

EXIT_OK, EXIT_USAGE, EXIT_COMPILE, EXIT_IO = 0, 1, 2, 3
TRUNCATED_MARK = "+∞"
NO_OUTPUT_MARK = "+?"

log = logging.getLogger(__name__)


class ScriptError(Exception):
    def __init__(self, message: str, line: int | None = None, exit_code: int = EXIT_COMPILE):
        self.line = line
        self.exit_code = exit_code
        super().__init__(f"line {line}: {message}" if line is not None else message)


# ---------------------------------------------------------------------------
# Network files
# ---------------------------------------------------------------------------

def save_network(net: Network, path: str | Path) -> None:
    path = Path(path)
    path.write_text(to_att(net), encoding="utf-8")
    Path(str(path) + ".sigma").write_text(sigma_text(net), encoding="utf-8")


def load_network(path: str | Path) -> Network:
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    sigma_path = Path(str(path) + ".sigma")
    sigma = parse_sigma(sigma_path.read_text(encoding="utf-8")) if sigma_path.exists() else []
    try:
        return from_att(text, sigma)
    except ValueError as exc:
        raise FscError(f"{path}: {exc}") from exc


def read_lexicon(path: str | Path, symbols=()) -> Network:
    """One entry per line; spaces separate symbols, otherwise letters do."""
    words = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        words.append(tokenize_input(line, symbols) if " " in line or symbols else list(line))
    if not words:
        return minimize(alg.union())
    return minimize(alg.union(*(from_string(w) for w in words)))


def format_result(result, empty_mark: str = NO_OUTPUT_MARK) -> list[str]:
    outputs = list(result.outputs) or [empty_mark]
    if result.truncated:
        outputs.append(TRUNCATED_MARK)
    return outputs


# ---------------------------------------------------------------------------
# Script interpreter
# ---------------------------------------------------------------------------

def split_statements(text: str) -> list[tuple[int, str]]:
    """Split on ``;`` outside quotes; drop comments.  Returns (line, text)."""
    statements = []
    buf: list[str] = []
    line = 1
    start_line = None
    i, n = 0, len(text)
    in_quote = False
    while i < n:
        c = text[i]
        if c == "\n":
            line += 1
        if in_quote:
            buf.append(c)
            if c == "\\" and i + 1 < n:
                buf.append(text[i + 1])
                i += 1
            elif c == '"':
                in_quote = False
            i += 1
            continue
        if c in "#!" and (i == 0 or text[i - 1].isspace()) and not text.startswith("#.", i):
            while i < n and text[i] != "\n":
                i += 1
            continue
        if c == "%" and i + 1 < n:
            buf.append(text[i:i + 2])
            i += 2
            continue
        if c == '"':
            in_quote = True
        if c == ";":
            stmt = "".join(buf).strip()
            if stmt:
                statements.append((start_line, stmt))
            buf = []
            start_line = None
        else:
            if start_line is None and not c.isspace():
                start_line = line
            buf.append(c)
        i += 1
    rest = "".join(buf).strip()
    if rest:
        raise ScriptError("statement not terminated by ';'", start_line)
    return statements


@dataclass
class Session:
    env: Environment = field(default_factory=Environment)
    stack: list[Network] = field(default_factory=list)
    limit: int = field(default_factory=default_limit)
    debug: bool = False
    out: TextIO = field(default_factory=lambda: sys.stdout)
    base_dir: Path = field(default_factory=Path.cwd)

    @property
    def top(self) -> Network:
        if not self.stack:
            raise ScriptError("the stack is empty")
        return self.stack[-1]

    def emit(self, text: str) -> None:
        print(text, file=self.out)

    def resolve(self, name: str) -> Path:
        path = Path(name)
        return path if path.is_absolute() else self.base_dir / path

    def network(self, name: str | None) -> Network:
        if name is None:
            return self.top
        if name not in self.env.bindings:
            raise ScriptError(f"undefined network: {name}")
        return self.env.bindings[name]

    # statements
    def execute(self, stmt: str) -> None:
        keyword, _, rest = stmt.partition(" ")
        keyword = keyword.strip()
        rest = rest.strip()
        handler = getattr(self, f"do_{keyword}", None)
        if handler is None:
            raise ScriptError(f"unknown statement {keyword!r}", exit_code=EXIT_USAGE)
        handler(rest)

    def compile(self, src: str) -> Network:
        if self.debug:
            self.env.debug = {}
        return compile_regex(src, self.env)

    def do_define(self, rest: str) -> None:
        name, _, body = rest.partition(" ")
        body = body.strip()
        if name.endswith(":"):
            name = name[:-1]
        elif body.startswith(":"):
            body = body[1:].strip()
        if not name or not body:
            raise ScriptError("usage: define NAME : REGEX ;", exit_code=EXIT_USAGE)
        self.env.define(name, self.compile(body))

    def do_regex(self, rest: str) -> None:
        self.stack.append(self.compile(rest))

    def do_apply(self, rest: str) -> None:
        args = shlex.split(rest)
        if not args or args[0] not in ("up", "down"):
            raise ScriptError("usage: apply up|down [NAME] STRING ;", exit_code=EXIT_USAGE)
        side, args = args[0], args[1:]
        name = None
        if len(args) >= 2 and args[0] in self.env.bindings:
            name, args = args[0], args[1:]
        net = self.network(name)
        for text in args or [""]:
            for line in format_result(apply(net, text, side, self.limit)):
                self.emit(line)

    def do_words(self, rest: str) -> None:
        args = rest.split()
        if not args or args[0] not in ("upper", "lower", "pairs"):
            raise ScriptError("usage: words upper|lower|pairs [N] ;", exit_code=EXIT_USAGE)
        limit = int(args[1]) if len(args) > 1 else self.limit
        for line in format_result(enumerate_words(self.top, args[0], limit), "(none)"):
            self.emit(line)

    def do_save(self, rest: str) -> None:
        args = shlex.split(rest)
        if len(args) != 2:
            raise ScriptError("usage: save NAME FILE ;", exit_code=EXIT_USAGE)
        save_network(self.network(args[0]), self.resolve(args[1]))

    def do_load(self, rest: str) -> None:
        args = shlex.split(rest)
        if len(args) != 2:
            raise ScriptError("usage: load NAME FILE ;", exit_code=EXIT_USAGE)
        self.env.define(args[0], load_network(self.resolve(args[1])))

    def do_print(self, rest: str) -> None:
        net = self.top
        if rest == "sigma":
            self.emit(" ".join(sorted(net.sigma)))
        elif rest == "size":
            self.emit(describe(net))
        else:
            raise ScriptError("usage: print sigma|size ;", exit_code=EXIT_USAGE)

    def do_set(self, rest: str) -> None:
        args = rest.split()
        if len(args) == 2 and args[0] == "limit" and args[1].isdigit():
            self.limit = max(1, int(args[1]))
        elif len(args) == 2 and args[0] == "debug" and args[1] in ("on", "off"):
            self.debug = args[1] == "on"
            if not self.debug:
                self.env.debug = None
        else:
            raise ScriptError("usage: set limit N ; or set debug on|off ;",
                              exit_code=EXIT_USAGE)

    def do_symbols(self, rest: str) -> None:
        self.env.symbols.update(shlex.split(rest))

    def do_read(self, rest: str) -> None:
        args = shlex.split(rest)
        if len(args) != 3 or args[0] != "lexicon":
            raise ScriptError("usage: read lexicon NAME FILE ;", exit_code=EXIT_USAGE)
        self.env.define(args[1], read_lexicon(self.resolve(args[2])))

    def run(self, text: str) -> None:
        for line, stmt in split_statements(text):
            try:
                self.execute(stmt)
            except ScriptError as exc:
                if exc.line is None:
                    raise ScriptError(str(exc), line, exc.exit_code) from exc
                raise
            except OSError as exc:
                raise ScriptError(str(exc), line, EXIT_IO) from exc
            except FscError as exc:
                raise ScriptError(str(exc), line, EXIT_COMPILE) from exc

    def dump_debug(self, directory: str | Path) -> list[Path]:
        """Write the intermediate networks of the last rule compilation."""
        written = []
        for name, net in (self.env.debug or {}).items():
            path = Path(directory) / f"{name}.att"
            save_network(net, path)
            written.append(path)
        return written


def describe(net: Network) -> str:
    return f"states {net.num_states}, arcs {net.num_arcs}, sigma {len(net.sigma)}"


def run_script(path: str | Path, out: TextIO | None = None, session: Session | None = None) -> int:
    """Run a script file; returns an exit status."""
    path = Path(path)
    session = session or Session()
    if out is not None:
        session.out = out
    session.base_dir = path.parent
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        print(f"fsc: {exc}", file=sys.stderr)
        return EXIT_IO
    try:
        session.run(text)
    except ScriptError as exc:
        print(f"fsc: {path}: {exc}", file=sys.stderr)
        return exc.exit_code
    return EXIT_OK


# ---------------------------------------------------------------------------
# Batch commands
# ---------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fsc", description="Finite-state calculus toolkit.")
    parser.add_argument("-v", "--verbose", action="store_true", help="show compiler warnings")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("compile", help="compile a regex or script to a network file")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("-e", "--regex", help="regular expression")
    src.add_argument("-f", "--script", help="script whose final network is written")
    p.add_argument("-o", "--output", required=True, help="output network file")
    p.add_argument("--debug-dir", help="write intermediate rule networks here")

    p = sub.add_parser("apply", help="apply a network to lines read from stdin")
    side = p.add_mutually_exclusive_group(required=True)
    side.add_argument("--up", action="store_const", const="up", dest="side")
    side.add_argument("--down", action="store_const", const="down", dest="side")
    p.add_argument("-f", "--file", required=True, help="network file")
    p.add_argument("--limit", type=int, default=None)

    p = sub.add_parser("info", help="print network statistics")
    p.add_argument("-f", "--file", required=True)

    p = sub.add_parser("run", help="run a script")
    p.add_argument("script")
    return parser


def _cmd_compile(args) -> int:
    session = Session(out=sys.stderr)
    if args.debug_dir:
        session.debug = True
    try:
        if args.regex is not None:
            net = session.compile(args.regex)
        else:
            path = Path(args.script)
            session.base_dir = path.parent
            session.run(path.read_text(encoding="utf-8"))
            if session.stack:
                net = session.top
            elif session.env.bindings:
                net = list(session.env.bindings.values())[-1]
            else:
                raise ScriptError("script produced no network")
    except ScriptError as exc:
        print(f"fsc: {exc}", file=sys.stderr)
        return exc.exit_code
    except FscError as exc:
        print(f"fsc: {exc}", file=sys.stderr)
        return EXIT_COMPILE
    except OSError as exc:
        print(f"fsc: {exc}", file=sys.stderr)
        return EXIT_IO
    try:
        save_network(net, args.output)
        if args.debug_dir:
            os.makedirs(args.debug_dir, exist_ok=True)
            session.dump_debug(args.debug_dir)
    except OSError as exc:
        print(f"fsc: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def _cmd_apply(args) -> int:
    try:
        net = load_network(args.file)
    except (OSError, FscError) as exc:
        print(f"fsc: {exc}", file=sys.stderr)
        return EXIT_IO
    limit = args.limit if args.limit is not None else default_limit()
    for line in sys.stdin:
        text = line.rstrip("\n")
        try:
            result = apply(net, text, args.side, limit)
        except FscError as exc:
            print(f"fsc: {exc}", file=sys.stderr)
            print(NO_OUTPUT_MARK)
            continue
        print("\t".join(format_result(result)))
    return EXIT_OK


def _cmd_info(args) -> int:
    try:
        net = load_network(args.file)
    except (OSError, FscError) as exc:
        print(f"fsc: {exc}", file=sys.stderr)
        return EXIT_IO
    print(describe(net))
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.verbose else logging.ERROR,
                        format="%(levelname)s: %(message)s")
    if args.command == "compile":
        return _cmd_compile(args)
    if args.command == "apply":
        return _cmd_apply(args)
    if args.command == "info":
        return _cmd_info(args)
    return run_script(args.script)


if __name__ == "__main__":
    sys.exit(main())
