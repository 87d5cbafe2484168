from dataclasses import replace

import pytest
from hypothesis import given, strategies as st

from wordmachines import builtin, format_machine_table, parse_machine_table, validate_machine
from wordmachines.machine import (DequeRule, Kind, MachineError, NotInvertible, TapeRule,
                                  injectivity_findings, invert_rule, is_injective)

TAPE_HEADER = """\
kind: tape
radius: 1
min-length: 2
initial: a
halting: h
outputs: a
"""

DEQUE_HEADER = """\
kind: deque
radius: 2
min-length: 3
initial: a
halting: h
outputs: ALL
"""


def tape(*rules: str) -> str:
    return TAPE_HEADER + "".join(f"rule {r}\n" for r in rules)


def deque(*rules: str) -> str:
    return DEQUE_HEADER + "".join(f"rule {r}\n" for r in rules)


def test_parse_tape_rule_fields():
    spec = parse_machine_table(tape("a | >[0]1 -> h | =1= | R"))
    (rule,) = spec.rules
    assert spec.kind is Kind.TAPE
    assert rule == TapeRule("a", (">", "0", "1"), 1, "h", ("=", "1", "="), 1)


def test_parse_deque_rule_with_copy_tokens():
    spec = parse_machine_table(deque("a | 10 .. 1 -> h | ~L1 .. $L2 $R1"))
    (rule,) = spec.rules
    assert rule == DequeRule("a", ("1", "0"), ("1",), "h", ("~L1",), ("$L2", "$R1"))


def test_comments_and_blank_lines_are_ignored():
    text = "# a comment\n\n" + tape("a | >[0]1 -> h | === | S   # trailing")
    assert len(parse_machine_table(text).rules) == 1


@pytest.mark.parametrize("text, reason", [
    (TAPE_HEADER, "no rules"),
    (TAPE_HEADER + "radius: 2\nrule a | >[0] -> h | == | S\n", "duplicate header key 'radius'"),
    (tape("a | >[0]1 -> h | =1 | S"), "replacement length differs"),
    (tape("a | 0>[1] -> h | === | S"), "left marker may only be the leftmost cell"),
    (tape("a | >[0]1 -> h | 1== | S"), "marker cells must be kept"),
    (tape("a | 00[0]1 -> h | ==== | S"), "beyond the declared radius"),
    (tape("a | >[0]1 -> h | === | X"), "move must be L, S or R"),
    (tape("a | >01 -> h | === | S"), "exactly one [head] cell"),
    (tape("h | >[0]1 -> a | === | S"), "no rule may leave the halting state"),
    (deque("a | 10 .. 1 -> h | 1 .. 1"), "length not preserved"),
    (deque("a | 1 .. 1 -> h | $L2 .. 1"), "refers outside the matched L window"),
    (deque("a | 101 .. - -> h | 1 0 1 .. -"), "window wider than the declared radius"),
    (deque("a | 10 .. 10 -> h | 1 0 .. 1 0"), "windows overlap below min-length"),
    (TAPE_HEADER.replace("kind: tape", "kind: turing") + "rule a | x -> h | y\n",
     "unknown machine kind"),
    (TAPE_HEADER.replace("outputs: a", "outputs: z") + "rule a | >[0]1 -> h | === | S\n",
     "outputs state 'z' appears in no rule"),
])
def test_parse_errors(text, reason):
    with pytest.raises(MachineError) as info:
        parse_machine_table(text)
    assert reason in str(info.value)


def test_error_carries_line_number():
    with pytest.raises(MachineError) as info:
        parse_machine_table(tape("a | >[0]1 -> h | =1= | S", "a | >[1]1 -> h | == | S"))
    assert info.value.line == 8
    assert "replacement length" in info.value.reason


def test_queue_rule_must_read_radius_bits():
    text = "kind: queue\nradius: 2\nmin-length: 2\ninitial: a\noutputs: ALL\nrule a | 0 -> a | 1\n"
    with pytest.raises(MachineError, match="exactly radius bits"):
        parse_machine_table(text)


def test_stack_action_is_checked():
    text = "kind: stack\nradius: 1\nmin-length: 1\ninitial: a\noutputs: ALL\nrule a | 0 -> a | swap\n"
    with pytest.raises(MachineError, match="stack action"):
        parse_machine_table(text)


@pytest.mark.parametrize("name", ["T0", "T1", "T2", "D0", "D1", "D2", "toy_stack", "toy_queue"])
def test_format_round_trip(name):
    spec = builtin(name)
    again = parse_machine_table(format_machine_table(spec))
    assert again == spec


tape_cells = st.sampled_from("01.")


@st.composite
def tape_rules(draw):
    left = draw(st.lists(tape_cells, max_size=1))
    right = draw(st.lists(tape_cells, max_size=1))
    head = draw(st.sampled_from("01."))
    pattern = "".join(left) + f"[{head}]" + "".join(right)
    width = len(left) + 1 + len(right)
    repl = "".join(draw(st.lists(st.sampled_from("01=~"), min_size=width, max_size=width)))
    move = draw(st.sampled_from("LSR"))
    source = draw(st.sampled_from(["a", "b"]))
    return f"{source} | {pattern} -> {draw(st.sampled_from(['a', 'b', 'h']))} | {repl} | {move}"


@given(st.lists(tape_rules(), min_size=1, max_size=6))
def test_round_trip_random_tape_tables(rules):
    spec = parse_machine_table(tape(*rules, "a | >[0]. -> h | === | S"))
    assert parse_machine_table(format_machine_table(spec)) == spec


def test_builtin_tape_machines_lint_clean(tape_machine):
    assert validate_machine(tape_machine) == []
    assert is_injective(tape_machine)


def test_deque_machines_are_not_reversible():
    for name in ("D0", "D1"):
        findings = validate_machine(builtin(name))
        assert findings
        assert {f.category for f in findings} == {"non-injective"}


def test_shadowed_rule_is_reported():
    spec = parse_machine_table(tape("a | .[0]. -> h | === | S", "a | 1[0]1 -> h | === | R"))
    (finding,) = [f for f in validate_machine(spec) if f.category == "shadowed"]
    assert finding.rules == (0, 1) and finding.is_shadowing


def test_conflicting_rules_are_reported():
    spec = parse_machine_table(tape("a | 1[0]. -> h | === | S", "a | 1[0]. -> h | =1= | S"))
    findings = validate_machine(spec)
    assert any(f.category == "conflicting" and "conflicting rules 0 and 1" in f.message
               for f in findings)
    assert all(f.is_shadowing for f in findings if f.category == "conflicting")


def test_duplicate_rule_is_reported():
    spec = parse_machine_table(tape("a | 1[0]. -> h | === | S", "a | 1[0]. -> h | === | S"))
    assert [f.category for f in validate_machine(spec)][0] == "duplicate"


def test_unreachable_state_is_reported():
    spec = parse_machine_table(tape("a | >[0]. -> h | === | S", "b | >[0]. -> a | === | S"))
    assert any(f.category == "unreachable" and "'b'" in f.message for f in validate_machine(spec))


def test_lookahead_rule_placed_after_generic_rule_is_shadowed():
    # moving a more specific rule behind the generic one it refines must be caught
    spec = builtin("D2")
    rules = list(spec.rules)
    generic = next(i for i, r in enumerate(rules)
                   if r.source.startswith("down0") and r.left == ("1",) and r.right == ())
    specific = next((i for i, r in enumerate(rules)
                     if i < generic and r.source == rules[generic].source
                     and r.left[:1] == ("1",) and len(r.left + r.right) > 1), None)
    assert specific is not None
    moved = rules[:specific] + rules[specific + 1:generic + 1] + [rules[specific]] + rules[generic + 1:]
    findings = validate_machine(replace(spec, rules=tuple(moved)))
    assert any(f.is_shadowing for f in findings)


def test_d2_lint_reports_only_unused_template_states():
    findings = validate_machine(builtin("D2"))
    assert findings
    assert all(f.category in ("unreachable", "non-injective") for f in findings)
    assert not any(f.is_shadowing for f in findings)


def test_invert_tape_rule():
    rule = TapeRule("a", ("0", "1", "."), 1, "b", ("1", "=", "~"), 1)
    inv = invert_rule(rule)
    assert inv == TapeRule("b", ("1", "1", "."), 2, "a", ("0", "=", "~"), -1)
    assert invert_rule(inv) == rule


def test_invert_rejects_lossy_rules():
    with pytest.raises(NotInvertible):
        invert_rule(TapeRule("a", (".",), 0, "b", ("1",), 0))
    with pytest.raises(NotInvertible):
        invert_rule(DequeRule("a", (".",), (), "b", (), ("1",)))


def test_injectivity_flags_two_rules_with_the_same_image():
    spec = parse_machine_table(tape("a | >[0]1 -> b | =1= | S", "a | >[1]1 -> b | === | S",
                                    "b | >[1]. -> h | === | S"))
    assert any("rules 0 and 1" in f.message for f in injectivity_findings(spec))


def test_generic_bottom_rule_before_special_rules_is_flagged():
    # the generic rule at the bottom of the last half must not precede the special-state rules
    spec = builtin("D2")
    rules = list(spec.rules)
    special = next(i for i, r in enumerate(rules)
                   if r.source == "up1.h1.last" and r.target == "special.h1")
    generic = parse_machine_table(
        "kind: deque\nradius: 2\nmin-length: 3\ninitial: up1.h1.last\noutputs: ALL\n"
        "rule up1.h1.last | - .. 1 -> down2.h0.last | - .. 1\n").rules[0]
    variant = replace(spec, rules=tuple(rules[:special] + [generic] + rules[special:]))
    flagged = [f for f in validate_machine(variant) if f.is_shadowing]
    assert flagged and flagged[0].rules == (special, special + 1)
