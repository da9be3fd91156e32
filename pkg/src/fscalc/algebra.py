"""Rational operators over networks.

Every binary operator harmonizes the alphabets of its operands first, so
that ``?`` in one operand never matches a symbol the other operand names.
Results are epsilon-free and trimmed but not minimized; callers minimize
when size matters.
"""

from __future__ import annotations

from collections import deque
from functools import reduce
from typing import Callable, Iterable

from .errors import ArityError, RelationOperandError
from .fsm import (EPSILON, EPSILON_LABEL, IDENTITY, IDENTITY_LABEL, UNKNOWN, Label,
                  Network, complete, determinize, empty, epsilon, harmonize,
                  harmonize_to, minimize, remove_epsilons, symbol, any_symbol, trim,
                  universal)


def _require_language(kind: str, *nets: Network) -> None:
    for net in nets:
        if net.is_relation:
            raise RelationOperandError(f"{kind} requires language operands, got a relation")


def _harmonize_all(nets: Iterable[Network]) -> list[Network]:
    nets = list(nets)
    sigma = set().union(*(n.sigma for n in nets)) if nets else set()
    return [harmonize_to(n, sigma) for n in nets]


class _Builder:
    """Mutable arc table used while gluing networks together."""

    def __init__(self):
        self.arcs: list[list[tuple[Label, int]]] = []
        self.finals: set[int] = set()

    def new_state(self) -> int:
        self.arcs.append([])
        return len(self.arcs) - 1

    def add(self, net: Network) -> int:
        """Copy ``net`` in; return the offset of its states."""
        offset = len(self.arcs)
        for state_arcs in net.arcs:
            self.arcs.append([(label, t + offset) for label, t in state_arcs])
        return offset

    def build(self, start: int, sigma) -> Network:
        return remove_epsilons(Network(self.arcs, start, self.finals, sigma))


# ---------------------------------------------------------------------------
# Regular operators
# ---------------------------------------------------------------------------

def union(*nets: Network) -> Network:
    if not nets:
        return empty()
    nets = _harmonize_all(nets)
    b = _Builder()
    start = b.new_state()
    for net in nets:
        off = b.add(net)
        b.arcs[start].append((EPSILON_LABEL, net.start + off))
        b.finals.update(f + off for f in net.finals)
    return b.build(start, nets[0].sigma)


def concat(*nets: Network) -> Network:
    if not nets:
        return epsilon()
    nets = _harmonize_all(nets)
    b = _Builder()
    prev_finals = None
    start = None
    for net in nets:
        off = b.add(net)
        if prev_finals is None:
            start = net.start + off
        else:
            for f in prev_finals:
                b.arcs[f].append((EPSILON_LABEL, net.start + off))
        prev_finals = [f + off for f in net.finals]
    b.finals.update(prev_finals)
    return b.build(start, nets[0].sigma)


def star(net: Network) -> Network:
    b = _Builder()
    start = b.new_state()
    off = b.add(net)
    b.arcs[start].append((EPSILON_LABEL, net.start + off))
    for f in net.finals:
        b.arcs[f + off].append((EPSILON_LABEL, start))
    b.finals.add(start)
    return b.build(start, net.sigma)


def plus(net: Network) -> Network:
    return concat(net, star(net))


def option(net: Network) -> Network:
    return union(net, epsilon())


def _product(a: Network, b: Network, accept: Callable[[bool, bool], bool]) -> Network:
    """Synchronous product over identical labels of two epsilon-free networks."""
    a, b = harmonize(a, b)
    a, b = remove_epsilons(a), remove_epsilons(b)
    index = {(a.start, b.start): 0}
    queue = deque([(a.start, b.start)])
    arcs: list[list[tuple[Label, int]]] = [[]]
    finals = set()
    while queue:
        p, q = queue.popleft()
        i = index[(p, q)]
        if accept(p in a.finals, q in b.finals):
            finals.add(i)
        moves_b: dict[Label, list[int]] = {}
        for label, t in b.arcs[q]:
            moves_b.setdefault(label, []).append(t)
        for label, s in a.arcs[p]:
            for t in moves_b.get(label, ()):
                j = index.get((s, t))
                if j is None:
                    j = index[(s, t)] = len(arcs)
                    arcs.append([])
                    queue.append((s, t))
                arcs[i].append((label, j))
    return trim(Network(arcs, 0, finals, a.sigma))


def intersect(*nets: Network) -> Network:
    if not nets:
        raise ArityError("intersect needs at least one operand")
    _require_language("intersect", *nets)
    return reduce(lambda x, y: _product(x, y, lambda fa, fb: fa and fb), nets)


def complement(net: Network) -> Network:
    """``~A``: every string over the open alphabet not in ``A``."""
    _require_language("complement", net)
    total = complete(net)
    flipped = Network(total.arcs, total.start,
                      set(total.states) - total.finals, total.sigma)
    return trim(flipped)


def minus(a: Network, b: Network) -> Network:
    _require_language("minus", a, b)
    a, b = harmonize(a, b)
    return intersect(a, complement(b))


def contains(net: Network) -> Network:
    """``$A``: strings with at least one substring in ``A``."""
    _require_language("contains", net)
    return concat(universal(), net, universal())


def ignore(a: Network, b: Network) -> Network:
    """``A/B``: strings of ``A`` with strings of ``B`` freely interspersed."""
    _require_language("ignore", a, b)
    a, b = harmonize(a, b)
    a = remove_epsilons(a)
    loop = star(b)
    builder = _Builder()
    off_a = builder.add(a)
    for q in a.states:
        off = builder.add(loop)
        builder.arcs[q + off_a].append((EPSILON_LABEL, loop.start + off))
        for f in loop.finals:
            builder.arcs[f + off].append((EPSILON_LABEL, q + off_a))
    builder.finals.update(f + off_a for f in a.finals)
    return builder.build(a.start + off_a, a.sigma)


def ignore_inside(a: Network, b: Network) -> Network:
    """Like ``ignore`` but interspersal is only allowed strictly inside."""
    _require_language("ignore_inside", a, b)
    nonempty = minus(b, epsilon())
    edges = union(concat(nonempty, universal()), concat(universal(), nonempty))
    return minus(ignore(a, b), edges)


# ---------------------------------------------------------------------------
# Structural conversions
# ---------------------------------------------------------------------------

def _map_labels(net: Network, fn: Callable[[Label], Label]) -> Network:
    arcs = [[(fn(label), t) for label, t in state_arcs] for state_arcs in net.arcs]
    return remove_epsilons(Network(arcs, net.start, net.finals, net.sigma))


def invert(net: Network) -> Network:
    return _map_labels(net, lambda label: (label[1], label[0]))


def _side(sym: str) -> Label:
    if sym in (UNKNOWN, IDENTITY):
        return IDENTITY_LABEL
    return (sym, sym)


def project_upper(net: Network) -> Network:
    return _map_labels(net, lambda label: _side(label[0]))


def project_lower(net: Network) -> Network:
    return _map_labels(net, lambda label: _side(label[1]))


def reverse(net: Network) -> Network:
    arcs: list[list[tuple[Label, int]]] = [[] for _ in range(net.num_states + 1)]
    for q, state_arcs in enumerate(net.arcs):
        for label, t in state_arcs:
            arcs[t + 1].append((label, q + 1))
    arcs[0] = [(EPSILON_LABEL, f + 1) for f in net.finals]
    return remove_epsilons(Network(arcs, 0, {net.start + 1}, net.sigma))


def identity(net: Network) -> Network:
    """Identity relation of a language (languages already are one)."""
    _require_language("identity", net)
    return net


# ---------------------------------------------------------------------------
# Composition
# ---------------------------------------------------------------------------

_LINKED = "linked"
_FREE = "free"


def _merge(up, low) -> list[Label]:
    """Combine the outer sides of a matched step into result labels.

    ``up``/``low`` are either a concrete symbol (or EPSILON) or a marker
    saying the side is an unknown symbol that is linked to the matched
    middle symbol or free of it.
    """
    up_unknown = up in (_LINKED, _FREE)
    low_unknown = low in (_LINKED, _FREE)
    if not up_unknown and not low_unknown:
        return [(up, low)]
    if up_unknown and not low_unknown:
        return [(UNKNOWN, low)]
    if low_unknown and not up_unknown:
        return [(up, UNKNOWN)]
    if up == _LINKED and low == _LINKED:
        return [IDENTITY_LABEL]
    if up == _LINKED or low == _LINKED:
        return [(UNKNOWN, UNKNOWN)]
    return [IDENTITY_LABEL, (UNKNOWN, UNKNOWN)]


def _outer(label: Label, side: int):
    """Describe the outer side of a label for ``_merge``."""
    if label == IDENTITY_LABEL:
        return _LINKED
    sym = label[side]
    return _FREE if sym == UNKNOWN else sym


def _is_unknown(sym: str) -> bool:
    return sym in (UNKNOWN, IDENTITY)


def compose(a: Network, b: Network) -> Network:
    """Relational composition with a three-state epsilon filter.

    Filter state 0 allows every move; after ``a`` moved alone on ``x:0``
    (state 1) only further lone ``a`` moves or matched moves are allowed,
    symmetrically for ``b`` (state 2).  Paired lone moves are only allowed
    from state 0.  This keeps exactly one alignment per path pair.
    """
    a, b = harmonize(a, b)
    a, b = remove_epsilons(a), remove_epsilons(b)

    # index b's arcs by their upper symbol
    b_index: list[dict[str, list[tuple[Label, int]]]] = []
    for state_arcs in b.arcs:
        by_upper: dict[str, list[tuple[Label, int]]] = {}
        for label, t in state_arcs:
            key = UNKNOWN if _is_unknown(label[0]) else label[0]
            by_upper.setdefault(key, []).append((label, t))
        b_index.append(by_upper)

    start = (a.start, b.start, 0)
    index = {start: 0}
    queue = deque([start])
    arcs: list[list[tuple[Label, int]]] = [[]]
    finals = set()

    def push(i: int, labels: list[Label], target: tuple[int, int, int]) -> None:
        j = index.get(target)
        if j is None:
            j = index[target] = len(arcs)
            arcs.append([])
            queue.append(target)
        for label in labels:
            arcs[i].append((label, j))

    while queue:
        p, q, f = state = queue.popleft()
        i = index[state]
        if p in a.finals and q in b.finals:
            finals.add(i)
        b_eps = b_index[q].get(EPSILON, ())
        for la, s in a.arcs[p]:
            mid = la[1]
            if mid == EPSILON:
                if f in (0, 1):
                    push(i, [(la[0], EPSILON)], (s, q, 1))
                if f == 0:
                    for lb, t in b_eps:
                        push(i, _merge(_outer(la, 0), _outer(lb, 1)), (s, t, 0))
                continue
            key = UNKNOWN if _is_unknown(mid) else mid
            for lb, t in b_index[q].get(key, ()):
                if key == UNKNOWN:
                    up, low = _outer(la, 0), _outer(lb, 1)
                else:
                    up = _FREE if la[0] == UNKNOWN else la[0]
                    low = _FREE if lb[1] == UNKNOWN else lb[1]
                push(i, _merge(up, low), (s, t, 0))
        if f in (0, 2):
            for lb, t in b_eps:
                push(i, [(EPSILON, lb[1])], (p, t, 2))
    return remove_epsilons(Network(arcs, 0, finals, a.sigma))


def compose_all(*nets: Network) -> Network:
    if not nets:
        raise ArityError("compose needs at least one operand")
    return reduce(lambda x, y: minimize(compose(x, y)), nets)


def crossproduct(a: Network, b: Network) -> Network:
    """``A .x. B``: every string of ``A`` paired with every string of ``B``."""
    _require_language("crossproduct", a, b)
    a, b = harmonize(a, b)

    def to_upper(label: Label) -> Label:
        return (UNKNOWN if label == IDENTITY_LABEL else label[0], EPSILON)

    def to_lower(label: Label) -> Label:
        return (EPSILON, UNKNOWN if label == IDENTITY_LABEL else label[1])

    return compose(_map_labels(a, to_upper), _map_labels(b, to_lower))


def pair(upper: str, lower: str) -> Network:
    """``a:b`` as a network; either side may be EPSILON or UNKNOWN."""
    if upper == lower:
        if upper == EPSILON:
            return epsilon()
        if upper == UNKNOWN:
            return crossproduct(any_symbol(), any_symbol())
        return symbol(upper)
    side_u = epsilon() if upper == EPSILON else (any_symbol() if upper == UNKNOWN else symbol(upper))
    side_l = epsilon() if lower == EPSILON else (any_symbol() if lower == UNKNOWN else symbol(lower))
    return crossproduct(side_u, side_l)


# ---------------------------------------------------------------------------
# Dispatch by operator name
# ---------------------------------------------------------------------------

_UNARY = {
    "option": option, "star": star, "plus": plus, "complement": complement,
    "contains": contains, "reverse": reverse, "invert": invert,
    "project_upper": project_upper, "project_lower": project_lower,
}
_BINARY = {
    "concat": concat, "union": union, "intersect": intersect, "minus": minus,
    "ignore": ignore, "ignore_inside": ignore_inside, "crossproduct": crossproduct,
    "compose": compose,
}

OP_KINDS = frozenset(_UNARY) | frozenset(_BINARY)


def apply_op(kind: str, args: list[Network]) -> Network:
    if kind in _UNARY:
        if len(args) != 1:
            raise ArityError(f"{kind} takes 1 operand, got {len(args)}")
        return _UNARY[kind](args[0])
    if kind in _BINARY:
        if len(args) != 2:
            raise ArityError(f"{kind} takes 2 operands, got {len(args)}")
        return _BINARY[kind](*args)
    raise ValueError(f"unknown operator kind: {kind}")
