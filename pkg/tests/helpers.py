"""Bounded enumeration helpers that walk networks directly."""

from __future__ import annotations

import random

from fscalc.fsm import EPSILON_LABEL, IDENTITY_LABEL, Network


def pair_strings(net: Network, max_len: int) -> set[tuple]:
    """Label sequences (without 0:0 labels) of accepted paths, up to ``max_len``."""
    def closure(states):
        stack, seen = list(states), set(states)
        while stack:
            q = stack.pop()
            for label, t in net.arcs[q]:
                if label == EPSILON_LABEL and t not in seen:
                    seen.add(t)
                    stack.append(t)
        return seen

    result = set()
    level = {(): closure({net.start})}
    for _ in range(max_len + 1):
        nxt = {}
        for word, states in level.items():
            if states & net.finals:
                result.add(word)
            for q in states:
                for label, t in net.arcs[q]:
                    if label != EPSILON_LABEL:
                        nxt.setdefault(word + (label,), set()).add(t)
        level = {w: closure(s) for w, s in nxt.items()}
    return result


LABELS = [("a", "a"), ("b", "b"), ("a", "b"), ("@0@", "a"), ("b", "@0@"),
          EPSILON_LABEL, IDENTITY_LABEL]


def random_network(rng: random.Random, labels=LABELS, max_states: int = 4) -> Network:
    n = rng.randint(1, max_states)
    arcs = [[(rng.choice(labels), rng.randrange(n)) for _ in range(rng.randint(0, 3))]
            for _ in range(n)]
    finals = {q for q in range(n) if rng.random() < 0.4}
    return Network(arcs, 0, finals)


def random_language_regex(rng: random.Random, depth: int = 3, alphabet="ab") -> str:
    """A random small regular expression over ``alphabet``."""
    if depth == 0 or rng.random() < 0.3:
        return rng.choice(list(alphabet) + ["?", "0"])
    op = rng.choice(["concat", "union", "star", "inter", "compl", "opt"])
    a = random_language_regex(rng, depth - 1, alphabet)
    if op == "star":
        return f"[{a}]*"
    if op == "compl":
        return f"~[{a}]"
    if op == "opt":
        return f"({a})"
    b = random_language_regex(rng, depth - 1, alphabet)
    sep = {"concat": " ", "union": " | ", "inter": " & "}[op]
    return f"[{a}{sep}{b}]"


def random_relation_regex(rng: random.Random, depth: int = 2) -> str:
    if depth == 0 or rng.random() < 0.3:
        return rng.choice(["a:b", "b:a", "a:0", "0:b", "a", "b", "?", "a:c", "c:a"])
    op = rng.choice(["concat", "union", "star"])
    a = random_relation_regex(rng, depth - 1)
    if op == "star":
        return f"[{a}]*"
    b = random_relation_regex(rng, depth - 1)
    return f"[{a}{' ' if op == 'concat' else ' | '}{b}]"
