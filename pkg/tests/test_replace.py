import random

import pytest

from fscalc import algebra as alg
from fscalc.apply import apply_down, relation_pairs
from fscalc.fsm import BOUNDARY, epsilon, equivalent, minimize, symbol, universal
from fscalc.regex import Environment, compile
from fscalc.replace import (ElementaryRule, ReplaceClause, RuleSetSpec, allocate_brackets,
                            compile_ruleset, constrain_brackets, expand_rules,
                            insert_brackets, normalize_empty_upper, split_rule_groups)

from oracle import Rule, RuleSet, all_words, outputs

ANY = "[^#]"


def down(net, text, **kw):
    return set(apply_down(net, text, limit=10**6, **kw).outputs)


def clause(uppers, lowers, contexts=(), dotted=()):
    return ReplaceClause(tuple(compile(u) for u in uppers),
                         tuple(compile(l) for l in lowers),
                         tuple((None if l is None else compile(l),
                                None if r is None else compile(r)) for l, r in contexts),
                         tuple(dotted))


# -- preparatory steps ----------------------------------------------------------

def test_expand_rules_counts():
    # {a -> b, b -> c || x _ y}: two elementary rules
    assert len(expand_rules([clause(["a", "b"], ["b", "c"], [("x", "y")])])) == 2
    # {a -> b, b -> c || x _ y, v _ w}, {a -> c || p _ q}: five
    rules = expand_rules([clause(["a", "b"], ["b", "c"], [("x", "y"), ("v", "w")]),
                          clause(["a"], ["c"], [("p", "q")])])
    assert len(rules) == 5


def test_expand_rules_default_contexts_are_universal():
    (rule,) = expand_rules([clause(["a"], ["b"])])
    assert equivalent(rule.left, universal()) and equivalent(rule.right, universal())


def test_expand_rules_rejects_unpaired():
    bad = ReplaceClause((compile("a"), compile("b")), (compile("c"),))
    with pytest.raises(ValueError):
        expand_rules([bad])


def test_split_groups():
    rules = expand_rules([
        clause(["(a)"], ["b"], [("x", "y")], dotted=[True]),
        clause(["0", "e"], ["c", "f"], [("v", "w")]),
    ])
    non_empty, empty_group = split_rule_groups(rules)
    # (a) goes to both groups, [] only to the empty one, e only to the non-empty one
    assert len(non_empty) == 2 and len(empty_group) == 2
    assert equivalent(non_empty[0].upper, symbol("a"))
    assert all(equivalent(r.upper, epsilon()) for r in empty_group)
    assert [r.dotted for r in empty_group] == [True, False]


def test_normalize_empty_upper_stars_lower():
    rules = split_rule_groups(expand_rules([clause(["0"], ["c"], [("v", "w")])]))[1]
    (rule,) = normalize_empty_upper(rules)
    assert rule.dotted
    assert equivalent(rule.lower, compile("c*"))


def test_allocate_brackets_avoids_clashes():
    ba = allocate_brackets(2, 1, {"@<1@"})
    assert ba.left_ne == ["@<1'@", "@<2@"]
    assert ba.right_e == ["@>1E@"]
    assert len(set(ba.all)) == 6


def test_rule_set_spec_validation():
    rule = expand_rules([clause(["a"], ["b"])])[0]
    with pytest.raises(ValueError):
        RuleSetSpec([rule], orientation="sideways")
    with pytest.raises(ValueError):
        RuleSetSpec([], orientation="upward")


# -- component relations ---------------------------------------------------------

def test_insert_brackets_is_identity_without_brackets():
    ba = allocate_brackets(1, 0)
    ins = insert_brackets(ba)
    outs = apply_down(ins, "ab", max_length=3).sequences
    assert ("a", "b") in outs
    assert ("@<1@", "a", "b") in outs
    assert all([s for s in o if not s.startswith("@")] == ["a", "b"] for o in outs)


def test_constrain_bracket_order():
    ba = allocate_brackets(1, 1)
    c = constrain_brackets(ba)
    ok = ["@>1@", "@>1E@", "@<1E@", "@<1@"]
    assert apply_down(c, ok).outputs
    assert not apply_down(c, ["@<1@", "@>1@"]).outputs
    assert not apply_down(c, ["@<1E@", "@>1E@"]).outputs
    assert not apply_down(c, ["@>1E@", "@>1@"]).outputs


def test_debug_networks_are_filled():
    debug = {}
    env = Environment(debug=debug)
    compile("a -> b || x _ y", env)
    assert set(debug) == {"insert", "constrain", "left", "right", "replace", "remove"}


# -- worked examples -------------------------------------------------------------

def test_parallel_rules_do_not_feed():
    net = compile("{ a -> b, b -> c || x _ y }")
    assert down(net, "xaxayby") == {"xaxbyby"}
    assert down(net, "xbybyxa") == {"xcybyxa"}


def test_shared_context():
    assert down(compile("a -> b || x _ x"), "xaxax") == {"xbxbx"}


def test_dotted_empty_upper_alternates():
    assert down(compile("[. a* .] -> x || _"), "bb") == {"xbxbx"}


def test_plain_empty_upper_is_unbounded():
    res = apply_down(compile("a* -> x || _"), "bb", limit=50)
    assert res.truncated
    assert "xbxbx" in res.outputs and "xxbxbx" in res.outputs


def test_boundary_contexts():
    net = compile("{ a -> b || .#. _ , v _ ? ? .#. }")
    assert down(net, "abc") == {"bbc"}
    assert down(net, "vabc") == {"vbbc"}
    assert down(net, "vab") == {"vab"}
    assert down(net, "vabcd") == {"vabcd"}
    assert BOUNDARY not in net.sigma


def test_deletion_and_multi_symbol_lower():
    assert down(compile("a -> 0 || b _"), "bab") == {"bb"}
    assert down(compile("a -> x y || _"), "aba") == {"xybxy"}


def test_inverse_direction():
    net = compile("a <- b || x _")
    assert equivalent(net, alg.invert(compile("b -> a || x _")))
    assert down(net, "xa") == {"xa", "xb"}
    assert down(net, "xb") == set()


def test_optional():
    assert down(compile("a (->) b || x _"), "xaxa") == {"xaxa", "xbxa", "xaxb", "xbxb"}


def test_longest_and_overlapping_matches_are_all_produced():
    assert down(compile("[a | a b] -> x || _ c"), "abc") == {"xc"}
    assert down(compile("a b -> c || _"), "abab") == {"cc"}


def test_multi_character_symbols():
    env = Environment(symbols={"TAG"})
    net = compile('TAG -> x || a _', env)
    assert down(net, ["a", "TAG"]) == {"ax"}


# -- oracle comparison -------------------------------------------------------------

R = Rule
CASES = [
    ("a -> b || x _ y", RuleSet([R("a", ("b",), "x", "y")]), "axy"),
    ("{a -> b, b -> c || x _ y}",
     RuleSet([R("a", ("b",), "x", "y"), R("b", ("c",), "x", "y")]), "abxy"),
    ("a -> b || x _ x", RuleSet([R("a", ("b",), "x", "x")]), "axb"),
    ("a -> b // a _", RuleSet([R("a", ("b",), "a", None)], "right"), "ab"),
    ("a -> b \\\\ _ a", RuleSet([R("a", ("b",), None, "a")], "left"), "ab"),
    ("a -> b \\/ a _ a", RuleSet([R("a", ("b",), "a", "a")], "downward"), "ab"),
    ("a -> b || a _ a", RuleSet([R("a", ("b",), "a", "a")]), "ab"),
    ("a (->) b || x _", RuleSet([R("a", ("b",), "x", None)], optional=True), "ax"),
    ("[a | a b] -> x || _ c", RuleSet([R("a|ab", ("x",), None, "c")]), "abc"),
    ("[. .] -> x || a _ b", RuleSet([R(None, ("x",), "a", "b", dotted=True)]), "abc"),
    ("{[. .] -> x || a _ }, {b -> y || _ }",
     RuleSet([R(None, ("x",), "a", None, dotted=True), R("b", ("y",))]), "abc"),
    ("a -> b || .#. _ , v _ ? ? .#.",
     RuleSet([R("a", ("b",), "#", None), R("a", ("b",), "v", f"{ANY}{ANY}#")]), "abcv"),
    ("a -> 0 || b _", RuleSet([R("a", ("",), "b", None)]), "ab"),
    ("a <-> b || x _", RuleSet([R("a", ("b",), "x", None)], bidirectional=True), "abx"),
    ("[. .] -> x // x _", RuleSet([R(None, ("x",), "x", None, dotted=True)], "right"), "ax"),
    ("{a -> b // _ c}, {[. .] -> c // b _}",
     RuleSet([R("a", ("b",), None, "c"), R(None, ("c",), "b", None, dotted=True)], "right"),
     "abc"),
]


def compare_with_oracle(src, rs, alphabet, max_len, max_out=None):
    net = compile(src)
    mismatches = []
    for w in all_words(alphabet, max_len):
        got = down(net, w, max_length=max_out)
        expected = outputs(rs, w, max_out)
        if got != expected:
            mismatches.append((w, sorted(got - expected), sorted(expected - got)))
    return mismatches


@pytest.mark.parametrize("src,rs,alphabet", CASES, ids=[c[0] for c in CASES])
def test_matches_oracle(src, rs, alphabet):
    assert compare_with_oracle(src, rs, alphabet, 4) == []


# -- invariants ----------------------------------------------------------------------

RANDOM_UP = ["a", "b", "a b", "[a|b]", "a a"]
RANDOM_LO = ["b", "a", "c", "0", "c c"]
RANDOM_CTX = ["", "a", "b", "c", "[a|b]", "?"]
MARKS = ["||", "//", "\\\\", "\\/"]
INPUTS = [tuple(w) for w in all_words("abc", 4)]


def random_rule_set(rng, arrow="->"):
    mark = rng.choice(MARKS)
    blocks = []
    for _ in range(rng.randint(1, 2)):
        blocks.append("{ %s %s %s %s %s _ %s }" % (
            rng.choice(RANDOM_UP), arrow, rng.choice(RANDOM_LO), mark,
            rng.choice(RANDOM_CTX), rng.choice(RANDOM_CTX)))
    return ", ".join(blocks)


@pytest.mark.invariant
@pytest.mark.parametrize("seed", range(12))
def test_no_brackets_leak(seed):
    src = random_rule_set(random.Random(seed))
    net = compile(src)
    assert not any(s.startswith("@<") or s.startswith("@>") for s in net.sigma)
    for upper, lower in net.labels():
        assert not upper.startswith("@<") and not lower.startswith("@>")
        assert not upper.startswith("@>") and not lower.startswith("@<")
    assert BOUNDARY not in net.sigma


@pytest.mark.invariant
@pytest.mark.parametrize("seed", range(12))
def test_optional_contains_obligatory(seed):
    rng = random.Random(seed)
    src = random_rule_set(rng)
    obligatory = relation_pairs(compile(src), INPUTS)
    optional = relation_pairs(compile(src.replace("->", "(->)")), INPUTS)
    assert obligatory <= optional
    # the optional relation always keeps the identity
    assert {(w, w) for w in INPUTS} <= optional


@pytest.mark.invariant
@pytest.mark.parametrize("left,right", [("x", "y"), ("x", ""), ("", "y"), ("x", "x")])
def test_obligatory_rule_leaves_no_match(left, right):
    net = compile(f"a -> b || {left} _ {right}")
    for w in all_words("axy", 5):
        for out in down(net, w):
            for i, ch in enumerate(w):
                lhs = not left or (i > 0 and w[i - 1] == left)
                rhs = not right or (i + 1 < len(w) and w[i + 1] == right)
                if ch == "a" and lhs and rhs:
                    assert out[i] == "b", (w, out)


@pytest.mark.invariant
@pytest.mark.parametrize("mark", MARKS)
@pytest.mark.parametrize("ctx", ["x _ y", "_ a", "a _", "_"])
def test_identity_rule_is_identity(mark, ctx):
    net = compile(f"a -> a {mark} {ctx}")
    assert equivalent(net, universal())


@pytest.mark.invariant
@pytest.mark.parametrize("lower", ["c", "c d", "[c | d]"])
def test_empty_upper_equals_dotted_starred_lower(lower):
    assert equivalent(compile(f"[] -> {lower} || v _ w"),
                      compile(f"[. .] -> [{lower}]* || v _ w"))


@pytest.mark.invariant
@pytest.mark.parametrize("rule", ["a -> b", "a b -> c", "[a | b] -> c c", "[. .] -> x"])
def test_unconditional_equals_empty_contexts(rule):
    assert equivalent(compile(rule), compile(f"{rule} || _"))


@pytest.mark.invariant
def test_expansion_soundness():
    assert equivalent(compile("{ a -> b, b -> c || x _ y }"),
                      compile("{ a -> b || x _ y }, { b -> c || x _ y }"))
    assert equivalent(
        compile("{ a -> b, b -> c || x _ y, v _ w }, { a -> c || p _ q }"),
        compile("{ a -> b || x _ y }, { a -> b || v _ w }, { b -> c || x _ y }, "
                "{ b -> c || v _ w }, { a -> c || p _ q }"))


@pytest.mark.invariant
@pytest.mark.parametrize("seed", range(8))
def test_random_rule_sets_match_oracle(seed):
    rng = random.Random(100 + seed)
    ups = [("a", "a"), ("b", "b"), ("a b", "ab"), ("[a|b]", "a|b")]
    los = [("b", "b"), ("c", "c"), ("0", ""), ("c c", "cc")]
    ctxs = [("", None), ("a", "a"), ("b", "b"), ("c", "c")]
    marks = [("||", "upward"), ("//", "right"), ("\\\\", "left"), ("\\/", "downward")]
    mark, orientation = rng.choice(marks)
    optional = rng.random() < 0.3
    arrow = "(->)" if optional else "->"
    blocks, rules = [], []
    for _ in range(rng.randint(1, 2)):
        u, lo, lc, rc = (rng.choice(ups), rng.choice(los), rng.choice(ctxs), rng.choice(ctxs))
        blocks.append(f"{{ {u[0]} {arrow} {lo[0]} {mark} {lc[0]} _ {rc[0]} }}")
        rules.append(Rule(u[1], (lo[1],), lc[1], rc[1]))
    rs = RuleSet(rules, orientation, optional)
    assert compare_with_oracle(", ".join(blocks), rs, "abc", 4) == []


def test_compile_ruleset_direct():
    net = compile_ruleset([clause(["a"], ["b"], [("x", None)])], "upward")
    assert down(net, "xa") == {"xb"}
    assert isinstance(expand_rules([clause(["a"], ["b"])])[0], ElementaryRule)
