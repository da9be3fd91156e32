"""Running strings through networks."""

from __future__ import annotations

import os
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import TokenizationError
from .fsm import (BOUNDARY, EPSILON, EPSILON_LABEL, IDENTITY, IDENTITY_LABEL, RESERVED,
                  UNKNOWN, Network, remove_epsilons)
from . import algebra

DEFAULT_LIMIT = 1000
UNKNOWN_DISPLAY = "?"


def default_limit() -> int:
    value = os.environ.get("FSC_LIMIT")
    if value:
        try:
            return max(1, int(value))
        except ValueError:
            pass
    return DEFAULT_LIMIT


@dataclass(frozen=True)
class ApplyResult:
    outputs: tuple[str, ...]
    truncated: bool = False
    limit: int = DEFAULT_LIMIT
    sequences: tuple[tuple[str, ...], ...] = field(default=(), repr=False, compare=False)

    def __iter__(self):
        return iter(self.outputs)

    def __len__(self):
        return len(self.outputs)

    def __contains__(self, item):
        return item in self.outputs

    @property
    def output_set(self) -> set[str]:
        return set(self.outputs)


# ---------------------------------------------------------------------------
# Tokenization and formatting
# ---------------------------------------------------------------------------

def tokenize(text: str, sigma: Iterable[str] = ()) -> list[str]:
    """Split ``text`` into symbols.

    Whitespace separates chunks; inside a chunk the longest multi-character
    symbol known to ``sigma`` wins, otherwise a single character is taken.
    """
    multi = sorted({s for s in sigma if len(s) > 1}, key=len, reverse=True)
    tokens: list[str] = []
    for chunk in text.split():
        if chunk.startswith("@") and chunk.endswith("@") and len(chunk) > 2 \
                and chunk not in multi:
            raise TokenizationError(f"reserved symbol spelling in input: {chunk!r}")
        i = 0
        while i < len(chunk):
            for name in multi:
                if chunk.startswith(name, i):
                    tokens.append(name)
                    i += len(name)
                    break
            else:
                tokens.append(chunk[i])
                i += 1
    for tok in tokens:
        if tok in RESERVED or tok == BOUNDARY:
            raise TokenizationError(f"reserved symbol in input: {tok!r}")
    return tokens


def format_symbols(symbols: Sequence[str]) -> str:
    """Join symbols: runs of single characters touch, longer names get spaces."""
    out = []
    prev_multi = False
    for i, sym in enumerate(symbols):
        if sym in (UNKNOWN, IDENTITY):
            sym = UNKNOWN_DISPLAY
        multi = len(sym) > 1
        if i and (multi or prev_multi):
            out.append(" ")
        out.append(sym)
        prev_multi = multi
    return "".join(out)


# ---------------------------------------------------------------------------
# Output graphs
# ---------------------------------------------------------------------------

class _Graph:
    """A small epsilon-NFA over output symbols."""

    def __init__(self):
        self.edges: list[list[tuple[str, int]]] = []
        self.finals: set[int] = set()
        self.start = 0

    def closure(self, nodes: Iterable[int]) -> frozenset[int]:
        stack = list(nodes)
        seen = set(stack)
        while stack:
            n = stack.pop()
            for sym, m in self.edges[n]:
                if sym == EPSILON and m not in seen:
                    seen.add(m)
                    stack.append(m)
        return frozenset(seen)

    def prune(self) -> None:
        """Keep only nodes on some path from start to a final node."""
        reverse: list[list[int]] = [[] for _ in self.edges]
        for n, out in enumerate(self.edges):
            for _, m in out:
                reverse[m].append(n)
        alive = set(self.finals)
        stack = list(self.finals)
        while stack:
            n = stack.pop()
            for p in reverse[n]:
                if p not in alive:
                    alive.add(p)
                    stack.append(p)
        self.edges = [[(s, m) for s, m in out if m in alive] if n in alive else []
                      for n, out in enumerate(self.edges)]
        self.alive = alive

    def has_cycle(self) -> bool:
        """Cycle among live nodes reachable from the start (iterative DFS)."""
        if self.start not in self.alive:
            return False
        color = {self.start: 1}
        stack = [(self.start, iter(self.edges[self.start]))]
        while stack:
            node, it = stack[-1]
            for _, m in it:
                c = color.get(m, 0)
                if c == 1:
                    return True
                if c == 0:
                    color[m] = 1
                    stack.append((m, iter(self.edges[m])))
                    break
            else:
                color[node] = 2
                stack.pop()
        return False

    def enumerate(self, limit: int, max_length: int | None = None):
        """Shortlex enumeration of accepted symbol sequences."""
        results: list[tuple[str, ...]] = []
        if self.start not in self.alive:
            return results, False
        level = {(): self.closure([self.start])}
        length = 0
        while level:
            for word in sorted(level):
                if level[word] & self.finals:
                    if len(results) == limit:
                        return results, True
                    results.append(word)
            if max_length is not None and length >= max_length:
                more = any(sym != EPSILON for nodes in level.values()
                           for n in nodes for sym, _ in self.edges[n])
                return results, more
            nxt: dict[tuple[str, ...], set[int]] = {}
            for word, nodes in level.items():
                for n in nodes:
                    for sym, m in self.edges[n]:
                        if sym != EPSILON:
                            nxt.setdefault(word + (sym,), set()).add(m)
            level = {w: self.closure(ns) for w, ns in nxt.items()}
            length += 1
        return results, False


def _match(sym: str, tok: str, sigma: frozenset[str]) -> bool:
    if sym in (UNKNOWN, IDENTITY):
        return tok not in sigma
    return sym == tok


def _emit(label: tuple[str, str], out_side: int, tok: str | None) -> str:
    if label == IDENTITY_LABEL:
        return tok if tok is not None else UNKNOWN
    return label[out_side]


def _apply_graph(net: Network, tokens: Sequence[str], down: bool) -> _Graph:
    in_side, out_side = (0, 1) if down else (1, 0)
    g = _Graph()
    index = {(net.start, 0): 0}
    g.edges.append([])
    queue = deque([(net.start, 0)])
    n = len(tokens)
    while queue:
        q, pos = queue.popleft()
        i = index[(q, pos)]
        if pos == n and q in net.finals:
            g.finals.add(i)
        for label, t in net.arcs[q]:
            sym = label[in_side]
            if sym == EPSILON:
                target = (t, pos)
                tok = None
            elif pos < n and _match(sym, tokens[pos], net.sigma):
                target = (t, pos + 1)
                tok = tokens[pos]
            else:
                continue
            j = index.get(target)
            if j is None:
                j = index[target] = len(g.edges)
                g.edges.append([])
                queue.append(target)
            g.edges[i].append((_emit(label, out_side, tok), j))
    g.prune()
    return g


def _ensure_epsilon_free(net: Network) -> Network:
    for state_arcs in net.arcs:
        for label, _ in state_arcs:
            if label == EPSILON_LABEL:
                return remove_epsilons(net)
    return net


def apply(net: Network, text: str | Sequence[str], side: str = "down",
          limit: int | None = None, max_length: int | None = None) -> ApplyResult:
    """Map ``text`` through ``net``; ``side`` is ``"down"`` or ``"up"``."""
    if side not in ("down", "up"):
        raise ValueError(f"side must be 'down' or 'up', not {side!r}")
    limit = default_limit() if limit is None else limit
    net = _ensure_epsilon_free(net)
    tokens = tokenize(text, net.sigma) if isinstance(text, str) else list(text)
    graph = _apply_graph(net, tokens, side == "down")
    words, cut = graph.enumerate(limit, max_length)
    truncated = cut or graph.has_cycle()
    return ApplyResult(tuple(format_symbols(w) for w in words), truncated, limit,
                       tuple(words))


def apply_down(net: Network, text, limit: int | None = None, **kw) -> ApplyResult:
    return apply(net, text, "down", limit, **kw)


def apply_up(net: Network, text, limit: int | None = None, **kw) -> ApplyResult:
    return apply(net, text, "up", limit, **kw)


def _language_graph(net: Network) -> _Graph:
    g = _Graph()
    net = _ensure_epsilon_free(net)
    g.edges = [[(label[0], t) for label, t in state_arcs] for state_arcs in net.arcs]
    g.start = net.start
    g.finals = set(net.finals)
    g.prune()
    return g


def enumerate_words(net: Network, side: str = "upper", limit: int | None = None,
                    max_length: int | None = None) -> ApplyResult:
    """Shortest-first listing of one side of ``net``, or of its pair strings.

    For ``side="pairs"`` each entry is ``upper:lower`` built from one path;
    lengths count arcs.
    """
    limit = default_limit() if limit is None else limit
    if side == "upper":
        g = _language_graph(algebra.project_upper(net))
    elif side == "lower":
        g = _language_graph(algebra.project_lower(net))
    elif side == "pairs":
        g = _Graph()
        net = _ensure_epsilon_free(net)
        g.edges = [[(f"{label[0]}\x00{label[1]}", t) for label, t in state_arcs]
                   for state_arcs in net.arcs]
        g.start, g.finals = net.start, set(net.finals)
        g.prune()
        words, cut = g.enumerate(limit, max_length)
        seen = []
        for w in words:
            labels = [tuple(s.split("\x00")) for s in w]
            up = format_symbols([u for u, _ in labels if u != EPSILON])
            low = format_symbols([lo for _, lo in labels if lo != EPSILON])
            entry = f"{up}:{low}"
            if entry not in seen:
                seen.append(entry)
        return ApplyResult(tuple(seen), cut or g.has_cycle(), limit)
    else:
        raise ValueError(f"side must be upper, lower or pairs, not {side!r}")
    words, cut = g.enumerate(limit, max_length)
    return ApplyResult(tuple(format_symbols(w) for w in words), cut or g.has_cycle(),
                       limit, tuple(words))


def relation_pairs(net: Network, inputs: Iterable[Sequence[str]],
                   max_length: int | None = None) -> set[tuple[tuple[str, ...], tuple[str, ...]]]:
    """``{(input, output)}`` for each input sequence (test helper)."""
    pairs = set()
    for word in inputs:
        res = apply(net, list(word), "down", limit=10**6, max_length=max_length)
        for out in res.sequences:
            pairs.add((tuple(word), out))
    return pairs
