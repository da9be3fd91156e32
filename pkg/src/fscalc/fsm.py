"""Network data model and structural algorithms.

A network is a finite-state machine whose arcs carry ``(upper, lower)``
symbol pairs.  Acceptors are networks whose labels are all identity pairs.
Symbols are plain strings; a handful of reserved spellings encode epsilon,
the unknown symbol and the identity-over-unknown symbol.

Minimization and equivalence treat every label as an atomic pair symbol
(the "acceptor view").  For relations this is a decidable proxy for
relation equivalence; it is exact for languages.
"""

from __future__ import annotations

from collections import deque
from itertools import permutations
from typing import Iterable, Iterator

EPSILON = "@0@"
UNKNOWN = "@_UNKNOWN_@"
IDENTITY = "@_IDENTITY_@"
BOUNDARY = "@#@"

RESERVED = frozenset({EPSILON, UNKNOWN, IDENTITY})

Label = tuple[str, str]

IDENTITY_LABEL: Label = (IDENTITY, IDENTITY)
EPSILON_LABEL: Label = (EPSILON, EPSILON)


def is_reserved(sym: str) -> bool:
    return sym in RESERVED


def label_symbols(label: Label) -> Iterator[str]:
    for sym in label:
        if sym not in RESERVED:
            yield sym


class Network:
    """An immutable finite-state network.

    States are dense integers ``0 .. n-1``.  ``arcs[q]`` is a sorted tuple of
    ``(label, target)`` pairs.  ``sigma`` holds every ordinary symbol the
    network knows about; unknown/identity arcs stand for symbols outside it.
    """

    __slots__ = ("arcs", "start", "finals", "sigma")

    def __init__(self, arcs: Iterable[Iterable[tuple[Label, int]]], start: int = 0,
                 finals: Iterable[int] = (), sigma: Iterable[str] = ()):
        arcs = tuple(tuple(sorted(set(state_arcs))) for state_arcs in arcs)
        if not arcs:
            arcs = ((),)
        n = len(arcs)
        if not 0 <= start < n:
            raise ValueError(f"start state {start} out of range")
        symbols = set(sigma)
        labels = set()
        for state_arcs in arcs:
            for label, target in state_arcs:
                if not 0 <= target < n:
                    raise ValueError(f"arc target {target} out of range")
                labels.add(label)
        for label in labels:
            symbols.update(label_symbols(label))
        symbols -= RESERVED
        self.arcs = arcs
        self.start = start
        self.finals = frozenset(f for f in finals)
        self.sigma = frozenset(symbols)

    def __setattr__(self, name, value):
        if hasattr(self, name):
            raise AttributeError("Network is immutable")
        object.__setattr__(self, name, value)

    def __repr__(self):
        return (f"Network(states={self.num_states}, arcs={self.num_arcs}, "
                f"finals={len(self.finals)}, sigma={len(self.sigma)})")

    @property
    def num_states(self) -> int:
        return len(self.arcs)

    @property
    def num_arcs(self) -> int:
        return sum(len(a) for a in self.arcs)

    @property
    def states(self) -> range:
        return range(len(self.arcs))

    def labels(self) -> set[Label]:
        return {label for state_arcs in self.arcs for label, _ in state_arcs}

    @property
    def is_relation(self) -> bool:
        for label in self.labels():
            if label[0] != label[1] or UNKNOWN in label:
                return True
        return False

    @property
    def accepts_epsilon(self) -> bool:
        return any(q in self.finals for q in epsilon_closure(self, [self.start]))

    def is_deterministic(self) -> bool:
        for state_arcs in self.arcs:
            seen = set()
            for label, _ in state_arcs:
                if EPSILON_LABEL == label or label in seen:
                    return False
                seen.add(label)
        return True

    def with_sigma(self, extra: Iterable[str]) -> "Network":
        """Declare extra symbols as known without adding arcs for them.

        Unknown/identity arcs stop standing for the declared symbols.
        """
        return Network(self.arcs, self.start, self.finals, self.sigma | set(extra))

    def without_sigma(self, symbols: Iterable[str]) -> "Network":
        """Forget symbols that no longer occur on any arc."""
        drop = set(symbols)
        for label in self.labels():
            if drop.intersection(label):
                raise ValueError(f"cannot drop symbols still on arcs: {sorted(drop & set(label))}")
        sigma = self.sigma - drop
        net = object.__new__(Network)
        object.__setattr__(net, "arcs", self.arcs)
        object.__setattr__(net, "start", self.start)
        object.__setattr__(net, "finals", self.finals)
        object.__setattr__(net, "sigma", frozenset(sigma))
        return net


# ---------------------------------------------------------------------------
# Elementary constructors
# ---------------------------------------------------------------------------

def empty(sigma: Iterable[str] = ()) -> Network:
    """The network denoting no strings at all."""
    return Network([()], 0, (), sigma)


def epsilon(sigma: Iterable[str] = ()) -> Network:
    """The network denoting only the empty string."""
    return Network([()], 0, (0,), sigma)


def from_label(label: Label, sigma: Iterable[str] = ()) -> Network:
    if label == EPSILON_LABEL:
        return epsilon(sigma)
    return Network([[(label, 1)], []], 0, (1,), sigma)


def symbol(sym: str) -> Network:
    return from_label((sym, sym))


def any_symbol(exclude: Iterable[str] = ()) -> Network:
    """``?``: one symbol of any kind except the ``exclude``d ones."""
    return from_label(IDENTITY_LABEL, exclude)


def universal(exclude: Iterable[str] = ()) -> Network:
    """``?*``: the sigma-star language (minus the ``exclude``d symbols)."""
    return Network([[(IDENTITY_LABEL, 0)]], 0, (0,), exclude)


def from_string(symbols: Iterable[str]) -> Network:
    """Acceptor for a single string given as a sequence of symbols."""
    syms = [s for s in symbols if s != EPSILON]
    arcs = [[((s, s), i + 1)] for i, s in enumerate(syms)] + [[]]
    return Network(arcs, 0, (len(syms),))


def from_strings(words: Iterable[Iterable[str]]) -> Network:
    """Trie acceptor for a finite set of symbol sequences."""
    trie: list[dict[str, int]] = [{}]
    finals = set()
    for word in words:
        q = 0
        for s in word:
            if s == EPSILON:
                continue
            nxt = trie[q].get(s)
            if nxt is None:
                nxt = len(trie)
                trie.append({})
                trie[q][s] = nxt
            q = nxt
        finals.add(q)
    arcs = [[((s, s), t) for s, t in d.items()] for d in trie]
    return minimize(Network(arcs, 0, finals))


# ---------------------------------------------------------------------------
# Structural passes
# ---------------------------------------------------------------------------

def epsilon_closure(net: Network, states: Iterable[int]) -> frozenset[int]:
    stack = list(states)
    seen = set(stack)
    while stack:
        q = stack.pop()
        for label, t in net.arcs[q]:
            if label == EPSILON_LABEL and t not in seen:
                seen.add(t)
                stack.append(t)
    return frozenset(seen)


def _renumber(arcs: list[list[tuple[Label, int]]], start: int, finals: set[int],
              sigma: Iterable[str], keep: set[int] | None = None) -> Network:
    """Renumber states breadth-first from the start state (stable ids)."""
    order = {start: 0}
    queue = deque([start])
    while queue:
        q = queue.popleft()
        for label, t in sorted(arcs[q]):
            if keep is not None and t not in keep:
                continue
            if t not in order:
                order[t] = len(order)
                queue.append(t)
    new_arcs: list[list[tuple[Label, int]]] = [[] for _ in order]
    for q, i in order.items():
        new_arcs[i] = [(label, order[t]) for label, t in arcs[q] if t in order]
    new_finals = {order[f] for f in finals if f in order}
    return Network(new_arcs, 0, new_finals, sigma)


def trim(net: Network) -> Network:
    """Drop states that are not both accessible and co-accessible."""
    reverse_adj: list[list[int]] = [[] for _ in net.states]
    for q, state_arcs in enumerate(net.arcs):
        for _, t in state_arcs:
            reverse_adj[t].append(q)
    coaccessible = set(net.finals)
    stack = list(net.finals)
    while stack:
        q = stack.pop()
        for p in reverse_adj[q]:
            if p not in coaccessible:
                coaccessible.add(p)
                stack.append(p)
    if net.start not in coaccessible:
        return empty(net.sigma)
    arcs = [list(a) for a in net.arcs]
    return _renumber(arcs, net.start, set(net.finals), net.sigma, keep=coaccessible)


def remove_epsilons(net: Network) -> Network:
    """Eliminate ``0:0`` arcs; one-sided epsilon labels are kept."""
    if all(label != EPSILON_LABEL for state_arcs in net.arcs for label, _ in state_arcs):
        return trim(net)
    arcs = []
    finals = set()
    for q in net.states:
        closure = epsilon_closure(net, [q])
        if closure & net.finals:
            finals.add(q)
        arcs.append([(label, t) for p in closure for label, t in net.arcs[p]
                     if label != EPSILON_LABEL])
    return trim(Network(arcs, net.start, finals, net.sigma))


def determinize(net: Network) -> Network:
    """Subset construction over atomic pair labels."""
    net = remove_epsilons(net)
    start = frozenset([net.start])
    index = {start: 0}
    subsets = [start]
    arcs: list[list[tuple[Label, int]]] = []
    finals = set()
    i = 0
    while i < len(subsets):
        subset = subsets[i]
        if subset & net.finals:
            finals.add(i)
        moves: dict[Label, set[int]] = {}
        for q in subset:
            for label, t in net.arcs[q]:
                moves.setdefault(label, set()).add(t)
        state_arcs = []
        for label in sorted(moves):
            target = frozenset(moves[label])
            j = index.get(target)
            if j is None:
                j = index[target] = len(subsets)
                subsets.append(target)
            state_arcs.append((label, j))
        arcs.append(state_arcs)
        i += 1
    return trim(Network(arcs, 0, finals, net.sigma))


def minimize(net: Network) -> Network:
    """Minimal deterministic acceptor over the pair alphabet.

    Moore-style partition refinement on the trimmed DFA; missing transitions
    are an implicit dead state.
    """
    dfa = determinize(net)
    n = dfa.num_states
    if not dfa.finals:
        return empty(dfa.sigma)
    block = [1 if q in dfa.finals else 0 for q in range(n)]
    num_blocks = len(set(block))
    while True:
        signatures: dict[tuple, int] = {}
        new_block = []
        for q in range(n):
            sig = (block[q], tuple((label, block[t]) for label, t in dfa.arcs[q]))
            new_block.append(signatures.setdefault(sig, len(signatures)))
        block = new_block
        if len(signatures) == num_blocks:
            break
        num_blocks = len(signatures)
    arcs: list[list[tuple[Label, int]]] = [[] for _ in range(num_blocks)]
    filled = set()
    finals = set()
    for q in range(n):
        b = block[q]
        if q in dfa.finals:
            finals.add(b)
        if b not in filled:
            filled.add(b)
            arcs[b] = [(label, block[t]) for label, t in dfa.arcs[q]]
    return _renumber(arcs, block[dfa.start], finals, dfa.sigma)


def acceptor_alphabet(sigma: Iterable[str]) -> list[Label]:
    """Labels needed to make an acceptor total over ``sigma`` plus unknowns."""
    return sorted({(s, s) for s in sigma} | {IDENTITY_LABEL})


def complete(net: Network, sigma: Iterable[str] = ()) -> Network:
    """Total deterministic acceptor over ``sigma`` and the unknown symbol.

    A non-final sink is added when some transition is missing.
    """
    net = harmonize_to(net, set(sigma))
    dfa = determinize(net)
    alphabet = acceptor_alphabet(dfa.sigma)
    for label in dfa.labels():
        if label not in alphabet:
            alphabet.append(label)
    alphabet.sort()
    arcs = [list(a) for a in dfa.arcs]
    sink = None
    for q in range(len(arcs)):
        present = {label for label, _ in arcs[q]}
        for label in alphabet:
            if label not in present:
                if sink is None:
                    sink = len(arcs)
                    arcs.append([])
                arcs[q].append((label, sink))
    if sink is not None:
        arcs[sink] = [(label, sink) for label in alphabet]
    return Network(arcs, dfa.start, dfa.finals, dfa.sigma)


# ---------------------------------------------------------------------------
# Alphabet harmonization
# ---------------------------------------------------------------------------

def _expand_label(label: Label, new: list[str]) -> list[Label]:
    up, low = label
    if label == IDENTITY_LABEL:
        return [(s, s) for s in new]
    if up == UNKNOWN and low == UNKNOWN:
        out = [(s, UNKNOWN) for s in new] + [(UNKNOWN, s) for s in new]
        out.extend((s, t) for s, t in permutations(new, 2))
        return out
    if up == UNKNOWN:
        return [(s, low) for s in new]
    if low == UNKNOWN:
        return [(up, s) for s in new]
    return []


def harmonize_to(net: Network, sigma: set[str]) -> Network:
    """Extend ``net`` to know ``sigma``, spelling out what its unknowns covered."""
    new = sorted(set(sigma) - net.sigma - RESERVED)
    if not new:
        return net
    arcs = []
    for state_arcs in net.arcs:
        extra = [(lab, t) for label, t in state_arcs for lab in _expand_label(label, new)]
        arcs.append(list(state_arcs) + extra)
    return Network(arcs, net.start, net.finals, net.sigma | set(new))


def harmonize(a: Network, b: Network) -> tuple[Network, Network]:
    sigma = set(a.sigma | b.sigma)
    return harmonize_to(a, sigma), harmonize_to(b, sigma)


# ---------------------------------------------------------------------------
# Equivalence
# ---------------------------------------------------------------------------

def equivalent(a: Network, b: Network) -> bool:
    """True iff both networks denote the same set of pair strings."""
    a, b = harmonize(a, b)
    a, b = determinize(a), determinize(b)
    seen = {(a.start, b.start)}
    queue = deque(seen)
    while queue:
        p, q = queue.popleft()
        if (p is not None and p in a.finals) != (q is not None and q in b.finals):
            return False
        moves_a = dict(a.arcs[p]) if p is not None else {}
        moves_b = dict(b.arcs[q]) if q is not None else {}
        for label in moves_a.keys() | moves_b.keys():
            pair = (moves_a.get(label), moves_b.get(label))
            if pair not in seen:
                seen.add(pair)
                queue.append(pair)
    return True


def isomorphic(a: Network, b: Network) -> bool:
    """Structural identity of two canonically numbered networks."""
    return a.arcs == b.arcs and a.start == b.start and a.finals == b.finals


# ---------------------------------------------------------------------------
# Text serialization
# ---------------------------------------------------------------------------

_SPELL = {EPSILON: "@0@", UNKNOWN: "@_UNKNOWN_@", IDENTITY: "@_IDENTITY_@", BOUNDARY: "@#@"}


def to_att(net: Network) -> str:
    """Tab-separated arc list; the start state (0) comes first."""
    lines = []
    for q in net.states:
        for (up, low), t in net.arcs[q]:
            lines.append(f"{q}\t{t}\t{_SPELL.get(up, up)}\t{_SPELL.get(low, low)}")
    for f in sorted(net.finals):
        lines.append(str(f))
    return "".join(line + "\n" for line in lines)


def from_att(text: str, sigma: Iterable[str] = ()) -> Network:
    arcs: dict[int, list[tuple[Label, int]]] = {}
    finals = set()
    start = None
    max_state = 0
    for lineno, raw in enumerate(text.splitlines(), 1):
        if not raw.strip():
            continue
        fields = raw.split("\t")
        if len(fields) in (1, 2):
            f = int(fields[0])
            finals.add(f)
            max_state = max(max_state, f)
            if start is None:
                start = f
        elif len(fields) in (4, 5):
            src, dst = int(fields[0]), int(fields[1])
            if start is None:
                start = src
            arcs.setdefault(src, []).append(((fields[2], fields[3]), dst))
            max_state = max(max_state, src, dst)
        else:
            raise ValueError(f"line {lineno}: expected 1 or 4 tab-separated fields")
    table = [arcs.get(q, []) for q in range(max_state + 1)]
    return Network(table, start or 0, finals, sigma)


def sigma_text(net: Network) -> str:
    return "".join(s + "\n" for s in sorted(net.sigma))


def parse_sigma(text: str) -> list[str]:
    return [line for line in text.splitlines() if line]
