import itertools

import pytest
from hypothesis import given, settings, strategies as st

from wordmachines import (Config, Halted, MachineError, Next, NoRuleApplies, ReverseUnsupported,
                          Stuck, builtin, initial_config, parse_machine_table, reverse_run,
                          reverse_step, run, step, trace_visits)
from wordmachines.engine import default_budget


def test_initial_configuration():
    assert initial_config(builtin("T0"), 4) == Config("qi", "0000", 1)
    assert initial_config(builtin("T2"), 4) == Config("qi", "0000", 4)
    assert initial_config(builtin("D0"), 5) == Config("qi", "00000")


def test_initial_configuration_rejects_short_words():
    with pytest.raises(MachineError, match="minimum 3"):
        initial_config(builtin("T1"), 2)


def test_t0_first_steps():
    spec = builtin("T0")
    c = initial_config(spec, 4)
    first = step(spec, c)
    assert isinstance(first, Next)
    assert first.config == Config("down.E", "1000", 1) and first.rule_index == 0
    second = step(spec, first.config)
    assert second.config == Config("down.O", "0100", 2)
    assert second.config.render() == "down.O >0[1]00<"


def test_step_reports_halted_and_stuck():
    spec = builtin("T0")
    assert isinstance(step(spec, Config("qf", "1000", 1)), Halted)
    assert isinstance(step(spec, Config("down.E", "0000", 1)), Stuck)


def test_deque_step_copies_and_flips():
    spec = parse_machine_table(
        "kind: deque\nradius: 2\nmin-length: 4\ninitial: a\nhalting: h\noutputs: ALL\n"
        "rule a | 10 .. 1 -> h | $R1 ~L1 .. $L2\n")
    result = step(spec, Config("a", "10011"))
    assert result.config == Config("h", "10010")


def test_queue_step_pushes_left_and_pops_right():
    spec = builtin("toy_queue")
    # reading 01 on the right pops two bits and pushes 10 on the left
    assert step(spec, Config("a", "11101")).config == Config("a", "10111")
    # reading 00 pops one bit and pushes 1
    assert step(spec, Config("a", "11100")).config == Config("b", "11110")


def test_stack_pop_on_empty_is_a_no_op():
    spec = parse_machine_table(
        "kind: stack\nradius: 1\nmin-length: 1\ninitial: a\nhalting: h\noutputs: ALL\n"
        "rule a | @ -> b | pop\nrule b | @ -> h | push1\n")
    c = step(spec, Config("a", "")).config
    assert c == Config("b", "")
    assert step(spec, c).config == Config("h", "1")


def test_stack_word_length_varies():
    spec = builtin("toy_stack")
    lengths = set()
    run(spec, 5, 200, collect=False, on_step=lambda c, i: lengths.add(len(c.word)))
    assert len(lengths) > 1


def test_missing_rule_raises():
    spec = parse_machine_table(
        "kind: tape\nradius: 1\nmin-length: 2\ninitial: a\nhalting: h\noutputs: a\n"
        "rule a | >[1]. -> h | === | S\n")
    with pytest.raises(NoRuleApplies) as info:
        run(spec, 3)
    assert info.value.config == Config("a", "000", 1) and info.value.steps == 0


def test_budget_exhaustion_is_reported():
    report = run(builtin("D0"), 4, 10)
    assert report.budget_exhausted and not report.halted and report.steps == 10


def test_t0_length4_run():
    report = run(builtin("T0"), 4)
    assert report.halted and report.output_count == 16
    assert report.first_output_step == 0
    assert report.final == Config("qf", "1000", 1)


@pytest.mark.parametrize("name", ["T0", "T1", "T2", "D0", "D1", "D2"])
def test_word_length_is_preserved(name):
    spec = builtin(name)
    lengths = set()
    run(spec, 7, collect=False, on_step=lambda c, i: lengths.add(len(c.word)))
    assert lengths == {7}


@pytest.mark.parametrize("name", ["T0", "T1", "T2", "D1", "D2"])
@pytest.mark.parametrize("length", [3, 6, 9])
def test_delay_bookkeeping(name, length):
    report = run(builtin(name), length)
    hist = report.delay_histogram
    # every configuration is either an output or idle
    assert report.output_count + report.idle_configurations == report.steps + 1
    # one segment before each output plus the tail after the last one
    assert sum(hist.values()) == report.output_count + (report.steps > report.last_output_step)
    assert report.max_delay == max(hist)


def test_delay_histogram_without_outputs():
    spec = parse_machine_table(
        "kind: tape\nradius: 1\nmin-length: 2\ninitial: a\nhalting: h\noutputs: h2\n"
        "states: h2\nrule a | >[0]. -> b | === | S\nrule b | >[0]. -> h | === | S\n")
    report = run(spec, 2)
    assert report.output_count == 0 and report.delay_histogram == {2: 1} and report.max_delay == 2


def test_default_budget():
    assert default_budget(10) == 64 * 1024


def _all_tape_configs(spec, length):
    states = sorted(spec.states - {spec.halting})
    for state in states:
        for bits in itertools.product("01", repeat=length):
            for head in range(length + 2):
                yield Config(state, "".join(bits), head)


@pytest.mark.parametrize("length", [3, 5, 7])
def test_reverse_step_undoes_every_step(tape_machine, length):
    for c in _all_tape_configs(tape_machine, length):
        result = step(tape_machine, c)
        if isinstance(result, Next):
            back = reverse_step(tape_machine, result.config)
            assert isinstance(back, Next) and back.config == c


@pytest.mark.slow
def test_reverse_step_exhaustive_up_to_ten(tape_machine):
    # every configuration, reachable or not, for all lengths up to 10
    for length in range(tape_machine.min_length, 11):
        for c in _all_tape_configs(tape_machine, length):
            result = step(tape_machine, c)
            if isinstance(result, Next):
                assert reverse_step(tape_machine, result.config).config == c


@pytest.mark.parametrize("length", range(3, 11))
def test_reverse_run_reverses_outputs(tape_machine, length):
    forward = run(tape_machine, length)
    back = reverse_run(tape_machine, forward.final)
    assert back.outputs == forward.outputs[::-1]
    assert back.halted and back.final == initial_config(tape_machine, length)
    assert back.steps == forward.steps


def test_reverse_rejected_for_non_injective_machines():
    spec = builtin("D0")
    with pytest.raises(ReverseUnsupported, match="reverse unsupported"):
        reverse_run(spec, Config("down.E", "0001"))


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(["T0", "T1", "T2"]), st.integers(3, 9), st.data())
def test_reverse_from_any_reached_configuration(name, length, data):
    spec = builtin(name)
    trace = []
    run(spec, length, collect=False, on_step=lambda c, i: trace.append(c))
    k = data.draw(st.integers(0, len(trace) - 1))
    back = reverse_run(spec, trace[k], collect=False, on_step=None)
    assert back.steps == k


def test_streaming_callbacks():
    words, steps = [], []
    report = run(builtin("T1"), 4, collect=False,
                 on_output=lambda w, s: words.append((w, s)), on_step=lambda c, i: steps.append(i))
    assert report.outputs == [] and len(words) == 16
    assert steps == list(range(report.steps + 1))
    assert [s for _, s in words] == sorted(s for _, s in words)


def test_max_outputs_stops_early():
    report = run(builtin("D0"), 5, max_outputs=7)
    assert report.output_count == 7 and not report.halted and not report.budget_exhausted


def test_trace_visits_filters_configurations():
    hits = trace_visits(builtin("T0"), 3, lambda state, word: state == "qf")
    assert len(hits) == 1
    step_index, config = hits[0]
    assert config.word == "100" and step_index == run(builtin("T0"), 3).steps
