"""Compilation of conditional parallel replacement rules.

A rule set is compiled as the composition

    InsertBrackets .o. ConstrainBrackets .o. {LeftContext, RightContext,
    Replace in an orientation-dependent order} .o. RemoveBrackets

over the user alphabet extended with one fresh bracket pair per elementary
rule.  Brackets ``<k``/``>k`` mark positions where the left/right context of
rule ``k`` holds; Replace rewrites bracketed upper strings.  Rules whose
upper side is the empty string use a separate bracket series (``<kE``,
``>kE``) and are rewritten between adjacent ``>kE <kE``.

Contexts that mention the boundary symbol are handled by padding the input
with a boundary marker on both sides for the duration of the construction.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace as dc_replace
from typing import Sequence

from . import algebra as alg
from .fsm import (BOUNDARY, EPSILON, Network, any_symbol, empty, epsilon, equivalent,
                  minimize, symbol, universal)

log = logging.getLogger(__name__)

ORIENTATIONS = ("upward", "right", "left", "downward")
DIRECTIONS = ("forward", "inverse", "bidirectional")


@dataclass(frozen=True)
class ReplaceClause:
    """One ``U1 -> L1, U2 -> L2 || l1 _ r1, l2 _ r2`` clause with compiled parts.

    ``dotted[i]`` records whether ``uppers[i]`` was written as ``[. X .]``.
    A context side of ``None`` means unspecified.
    """
    uppers: tuple[Network, ...]
    lowers: tuple[Network, ...]
    contexts: tuple[tuple[Network | None, Network | None], ...] = ()
    dotted: tuple[bool, ...] = ()


@dataclass(frozen=True)
class ElementaryRule:
    upper: Network
    lower: Network
    left: Network
    right: Network
    empty_upper: bool = False
    dotted: bool = False


@dataclass
class RuleSetSpec:
    rules: list[ElementaryRule]
    orientation: str = "upward"
    optional: bool = False
    direction: str = "forward"

    def __post_init__(self):
        if not self.rules:
            raise ValueError("a rule set needs at least one rule")
        if self.orientation not in ORIENTATIONS:
            raise ValueError(f"unknown orientation {self.orientation!r}")
        if self.direction not in DIRECTIONS:
            raise ValueError(f"unknown direction {self.direction!r}")


@dataclass
class BracketAlphabet:
    left_ne: list[str] = field(default_factory=list)
    right_ne: list[str] = field(default_factory=list)
    left_e: list[str] = field(default_factory=list)
    right_e: list[str] = field(default_factory=list)

    @property
    def all_left(self) -> list[str]:
        return self.left_e + self.left_ne

    @property
    def all_right(self) -> list[str]:
        return self.right_e + self.right_ne

    @property
    def all_e(self) -> list[str]:
        return self.left_e + self.right_e

    @property
    def all_ne(self) -> list[str]:
        return self.left_ne + self.right_ne

    @property
    def all(self) -> list[str]:
        return self.all_left + self.all_right


# ---------------------------------------------------------------------------
# Preparatory steps
# ---------------------------------------------------------------------------

def expand_rules(clauses: Sequence[ReplaceClause]) -> list[ElementaryRule]:
    """Cartesian expansion of replacement pairs and contexts."""
    rules = []
    for clause in clauses:
        if len(clause.uppers) != len(clause.lowers):
            raise ValueError("each upper needs exactly one lower")
        dotted = clause.dotted or (False,) * len(clause.uppers)
        contexts = clause.contexts or ((None, None),)
        for upper, lower, dot in zip(clause.uppers, clause.lowers, dotted):
            for left, right in contexts:
                rules.append(ElementaryRule(
                    upper, lower,
                    universal() if left is None else left,
                    universal() if right is None else right,
                    dotted=dot))
    return rules


def split_rule_groups(rules: Sequence[ElementaryRule]
                      ) -> tuple[list[ElementaryRule], list[ElementaryRule]]:
    """Separate rules by whether their upper side is empty.

    A rule whose upper language contains the empty string among other
    strings contributes to both groups.
    """
    non_empty, empty_group = [], []
    eps = epsilon()
    for rule in rules:
        if not rule.upper.accepts_epsilon:
            non_empty.append(rule)
            continue
        if not equivalent(rule.upper, eps):
            non_empty.append(dc_replace(rule, upper=minimize(alg.minus(rule.upper, eps))))
        empty_group.append(dc_replace(rule, upper=eps, empty_upper=True))
    return non_empty, empty_group


def normalize_empty_upper(rules: Sequence[ElementaryRule]) -> list[ElementaryRule]:
    """Plain empty uppers become ``[. .]`` with a starred lower side."""
    out = []
    for rule in rules:
        if rule.dotted:
            out.append(rule)
        else:
            out.append(dc_replace(rule, lower=minimize(alg.star(rule.lower)), dotted=True))
    return out


def allocate_brackets(n_ne: int, n_e: int, taken: set[str] = frozenset()) -> BracketAlphabet:
    """Fresh bracket names in rule order, primed when they clash with ``taken``."""
    def fresh(name: str) -> str:
        while name in taken:
            name = name[:-1] + "'@"
        return name

    ba = BracketAlphabet()
    for i in range(1, n_ne + 1):
        ba.left_ne.append(fresh(f"@<{i}@"))
        ba.right_ne.append(fresh(f"@>{i}@"))
    for i in range(1, n_e + 1):
        ba.left_e.append(fresh(f"@<{i}E@"))
        ba.right_e.append(fresh(f"@>{i}E@"))
    return ba


# ---------------------------------------------------------------------------
# The six relations
# ---------------------------------------------------------------------------

def _syms(names) -> Network:
    """Language of single symbols drawn from ``names`` (empty if none)."""
    names = list(names)
    if not names:
        return empty()
    return alg.union(*(symbol(n) for n in names))


def _not_contains(net: Network) -> Network:
    return minimize(alg.complement(minimize(alg.contains(net))))


def insert_brackets(ba: BracketAlphabet) -> Network:
    """Identity on bracket-free strings, inserting any brackets anywhere below."""
    keep = any_symbol(ba.all)
    add = alg.crossproduct(epsilon(), _syms(ba.all))
    return minimize(alg.star(alg.union(keep, add)))


def remove_brackets(ba: BracketAlphabet) -> Network:
    return alg.invert(insert_brackets(ba))


def constrain_brackets(ba: BracketAlphabet) -> Network:
    """Bracket runs must follow the order >NE* >E* <E* <NE*."""
    right_all = _syms(ba.all_right)
    parts = [
        _not_contains(alg.concat(_syms(ba.right_e), _syms(ba.right_ne))),
        _not_contains(alg.concat(_syms(ba.left_e), right_all)),
        _not_contains(alg.concat(_syms(ba.left_ne),
                                 alg.union(_syms(ba.left_e), right_all))),
    ]
    return minimize(alg.intersect(*parts))


def _lambda(context: Network, bracket: str, closers, ba: BracketAlphabet,
            padded: bool) -> Network:
    """Bracket ``bracket`` occurs exactly at the positions that end ``context``.

    Brackets inside the context are ignored, and so is any run of brackets
    between the end of the context and ``bracket``.  A position right after
    one of ``closers`` also counts as a context end: an emptied site (a
    deletion) leaves the context in force for the next site.
    """
    brackets = _syms(ba.all)
    any_star = universal()
    tail = alg.concat(any_star, alg.ignore_inside(context, brackets))
    ends = minimize(alg.minus(tail, alg.concat(any_star, brackets)))
    closed = minimize(alg.concat(tail, alg.star(brackets), _syms(closers)))
    ends = minimize(alg.union(ends, closed))
    if padded:
        # only positions strictly inside the padding count
        inside = alg.concat(symbol(BOUNDARY), _not_contains(symbol(BOUNDARY)))
        ends = minimize(alg.intersect(ends, inside))
    others = minimize(alg.star(brackets))
    br = symbol(bracket)
    before = alg.complement(minimize(alg.concat(
        alg.complement(minimize(alg.concat(ends, others))), br, any_star)))
    after = alg.complement(minimize(alg.concat(
        ends, alg.complement(minimize(alg.concat(others, br, any_star))))))
    return minimize(alg.intersect(minimize(before), minimize(after)))


def _rule_brackets(ba: BracketAlphabet, non_empty, empty_group):
    """(rule, left bracket, right bracket) for every rule, non-empty first."""
    out = [(r, ba.left_ne[i], ba.right_ne[i]) for i, r in enumerate(non_empty)]
    out += [(r, ba.left_e[i], ba.right_e[i]) for i, r in enumerate(empty_group)]
    return out


def left_context(ba: BracketAlphabet, labelled, padded: bool = False) -> Network:
    parts = [_lambda(rule.left, lb, ba.all_right, ba, padded) for rule, lb, _ in labelled]
    return minimize(alg.intersect(*parts)) if parts else universal()


def right_context(ba: BracketAlphabet, labelled, padded: bool = False) -> Network:
    parts = [_lambda(alg.reverse(rule.right), rb, ba.all_left, ba, padded)
             for rule, _, rb in labelled]
    if not parts:
        return universal()
    return minimize(alg.reverse(minimize(alg.intersect(*parts))))


def _no_match_nonempty(side: Network, lb: str, rb: str, ba: BracketAlphabet) -> Network:
    inner = alg.ignore_inside(side, _syms(ba.all))
    pattern = alg.concat(
        symbol(lb), alg.star(_syms(b for b in ba.left_ne if b != lb)),
        inner,
        alg.star(_syms(b for b in ba.right_ne if b != rb)), symbol(rb))
    return _not_contains(minimize(pattern))


def _no_match_empty(lb: str, rb: str, ba: BracketAlphabet) -> Network:
    between = _syms(b for b in ba.all_e if b not in (lb, rb))
    return _not_contains(alg.concat(symbol(rb), alg.star(between), symbol(lb)))


def _no_match_empty_lower(lower: Network, lb: str, rb: str, ba: BracketAlphabet) -> Network:
    """Excludes an unreplaced bracketed lower for an empty-upper rule."""
    inner = alg.ignore_inside(lower, _syms(ba.all))
    pattern = alg.concat(
        symbol(lb),
        alg.star(_syms([b for b in ba.left_e if b != lb] + ba.left_ne)),
        inner,
        alg.star(_syms(ba.right_ne + [b for b in ba.right_e if b != rb])),
        symbol(rb))
    return _not_contains(minimize(pattern))


def _replace_nonempty(rule: ElementaryRule, lb: str, rb: str, ba: BracketAlphabet) -> Network:
    brackets = _syms(ba.all)
    core = alg.crossproduct(minimize(alg.ignore_inside(rule.upper, brackets)),
                            minimize(alg.ignore_inside(rule.lower, brackets)))
    return minimize(alg.concat(symbol(lb), core, symbol(rb)))


def _replace_empty(rule: ElementaryRule, lb: str, rb: str, ba: BracketAlphabet) -> Network:
    brackets = _syms(ba.all)
    eps = epsilon()
    pre = alg.star(alg.crossproduct(
        eps, _syms([b for b in ba.all_e if b != lb] + ba.left_ne)))
    post = alg.star(alg.crossproduct(
        eps, _syms([b for b in ba.all_e if b != rb] + ba.right_ne)))
    body = alg.crossproduct(eps, minimize(alg.ignore_inside(rule.lower, brackets)))
    return minimize(alg.concat(
        pre, alg.crossproduct(symbol(rb), symbol(lb)), body,
        alg.crossproduct(symbol(lb), symbol(rb)), post))


def replace_core(ba: BracketAlphabet, non_empty, empty_group, optional: bool = False,
                 bidirectional: bool = False) -> Network:
    """``[N R]* N`` (obligatory) or ``[?* R]* ?*`` (optional)."""
    labelled = _rule_brackets(ba, non_empty, empty_group)
    relations = []
    excluded = []
    for rule, lb, rb in labelled:
        if rule.empty_upper:
            relations.append(_replace_empty(rule, lb, rb, ba))
            excluded.append(_no_match_empty(lb, rb, ba))
            if bidirectional:
                excluded.append(_no_match_empty_lower(rule.lower, lb, rb, ba))
        else:
            relations.append(_replace_nonempty(rule, lb, rb, ba))
            excluded.append(_no_match_nonempty(rule.upper, lb, rb, ba))
            if bidirectional:
                excluded.append(_no_match_nonempty(rule.lower, lb, rb, ba))
    r = minimize(alg.union(*relations))
    if optional:
        n = universal()
    else:
        n = minimize(alg.intersect(*excluded)) if excluded else universal()
    return minimize(alg.concat(alg.star(minimize(alg.concat(n, r))), n))


# ---------------------------------------------------------------------------
# Assembly
# ---------------------------------------------------------------------------

def _declare(rule: ElementaryRule, hidden: set[str]) -> ElementaryRule:
    return dc_replace(rule, upper=rule.upper.with_sigma(hidden),
                      lower=rule.lower.with_sigma(hidden),
                      left=rule.left.with_sigma(hidden),
                      right=rule.right.with_sigma(hidden))


def _check_degenerate(rule: ElementaryRule) -> None:
    if not rule.upper.finals or minimize(rule.upper).finals == frozenset():
        log.warning("replacement rule has an empty upper language; it is vacuous")
    if minimize(rule.lower).finals == frozenset():
        log.warning("replacement rule has an empty lower language; matches have no output")


def _user_sigma(rules: Sequence[ElementaryRule]) -> set[str]:
    sigma = set()
    for r in rules:
        for net in (r.upper, r.lower, r.left, r.right):
            sigma |= net.sigma
    return sigma


def assemble_replacement(spec: RuleSetSpec, debug: dict | None = None) -> Network:
    """Compile a rule set; ``debug`` (if given) receives the intermediate networks."""
    rules = list(spec.rules)
    if spec.direction == "inverse":
        rules = [dc_replace(r, upper=r.lower, lower=r.upper) for r in rules]
    for rule in rules:
        _check_degenerate(rule)

    user_sigma = _user_sigma(rules)
    padded = BOUNDARY in user_sigma
    user_sigma.discard(BOUNDARY)

    non_empty, empty_group = split_rule_groups(rules)
    empty_group = normalize_empty_upper(empty_group)
    ba = allocate_brackets(len(non_empty), len(empty_group), user_sigma | {BOUNDARY})
    hidden = set(ba.all) | ({BOUNDARY} if padded else set())
    non_empty = [_declare(r, hidden) for r in non_empty]
    empty_group = [_declare(r, hidden) for r in empty_group]
    labelled = _rule_brackets(ba, non_empty, empty_group)

    insert = insert_brackets(ba)
    constrain = constrain_brackets(ba)
    left = left_context(ba, labelled, padded)
    right = right_context(ba, labelled, padded)
    core = replace_core(ba, non_empty, empty_group, spec.optional,
                        spec.direction == "bidirectional")
    remove = remove_brackets(ba)

    # the filters are identity acceptors, so an intersection of them equals
    # their composition; composing them one at a time stays much smaller
    if spec.orientation == "upward":
        chain = [insert, constrain, left, right, core, remove]
    elif spec.orientation == "right":
        chain = [insert, constrain, right, core, left, remove]
    elif spec.orientation == "left":
        chain = [insert, constrain, left, core, right, remove]
    else:
        chain = [insert, constrain, core, left, right, remove]

    if padded:
        pad = minimize(alg.concat(
            alg.crossproduct(epsilon(), symbol(BOUNDARY)),
            alg.star(any_symbol(hidden)),
            alg.crossproduct(epsilon(), symbol(BOUNDARY))))
        chain = [pad] + chain + [alg.invert(pad)]

    # right to left: the core and removal are small and prune the filters
    result = chain[-1]
    for net in reversed(chain[:-1]):
        result = minimize(alg.compose(net, result))
    result = minimize(result.without_sigma(hidden & result.sigma))
    if spec.direction == "inverse":
        result = minimize(alg.invert(result))

    if debug is not None:
        debug.update(insert=insert, constrain=constrain, left=left, right=right,
                     replace=core, remove=remove)
    return result


def compile_ruleset(clauses: Sequence[ReplaceClause], orientation: str = "upward",
                    optional: bool = False, direction: str = "forward",
                    debug: dict | None = None) -> Network:
    spec = RuleSetSpec(expand_rules(clauses), orientation, optional, direction)
    return assemble_replacement(spec, debug)
