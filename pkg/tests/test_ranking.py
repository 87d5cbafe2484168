import pytest
from hypothesis import given, settings, strategies as st

from wordmachines import (CounterOverflow, CounterUnderflow, MachineError, ReverseUnsupported,
                          builtin, counter_decrement, counter_increment, counter_new, rank_t1,
                          run, unrank_t1)
from wordmachines.codes import code_B
from wordmachines.ranking import Counter, correct, uncorrect


def test_printed_examples():
    assert rank_t1("01001") == 6
    assert unrank_t1(22, 5) == "10010"


def test_corrected_word_example():
    assert correct("0100") == "0010"
    assert uncorrect("0010") == "0100"


@given(st.text("01", max_size=20))
def test_correct_round_trip(u):
    assert uncorrect(correct(u)) == u


@pytest.mark.parametrize("n", range(2, 11))
def test_rank_and_unrank_follow_code_b(n):
    for i, word in enumerate(code_B(n)):
        assert rank_t1(word) == i
        assert unrank_t1(i, n) == word


@given(st.integers(2, 40), st.data())
def test_unrank_then_rank_large(n, data):
    i = data.draw(st.integers(0, 2 ** n - 1))
    assert rank_t1(unrank_t1(i, n)) == i


def test_rank_rejects_bad_input():
    for bad in ("", "0", "012"):
        with pytest.raises(ValueError):
            rank_t1(bad)
    with pytest.raises(ValueError):
        unrank_t1(32, 5)
    with pytest.raises(ValueError):
        unrank_t1(0, 1)


def test_counter_full_cycle():
    c = counter_new("T1", 4)
    values = [c.value] + [counter_increment(c) for _ in range(15)]
    assert values == code_B(4)
    with pytest.raises(CounterOverflow):
        counter_increment(c)
    assert c.value == "1000" and c.index == 15
    back = [counter_decrement(c) for _ in range(15)]
    assert back == code_B(4)[-2::-1]
    with pytest.raises(CounterUnderflow):
        counter_decrement(c)
    assert c.value == "0000" and c.index == 0


@pytest.mark.parametrize("name", ["T0", "T2"])
def test_counter_follows_machine_order(name):
    c = counter_new(name, 5)
    values = [c.value] + [c.increment() for _ in range(31)]
    assert values == run(builtin(name), 5).outputs


def test_counter_cost_is_bounded():
    c = counter_new("T1", 12)
    costs = set()
    for _ in range(500):
        c.increment()
        costs.add(c.last_cost)
    for _ in range(200):
        c.decrement()
        costs.add(c.last_cost)
    assert max(costs) <= 2


@settings(max_examples=25, deadline=None)
@given(st.lists(st.booleans(), max_size=300))
def test_random_walk_matches_unrank(moves):
    c = counter_new("T1", 8)
    index = 0
    for up in moves:
        try:
            c.increment() if up else c.decrement()
            index += 1 if up else -1
        except (CounterOverflow, CounterUnderflow):
            assert index in (0, 255)
        assert c.value == unrank_t1(index, 8)
        assert c.index == index


def test_deque_counter_only_increments():
    c = Counter.new(builtin("D1"), 5)
    assert c.increment() != "00000"
    with pytest.raises(ReverseUnsupported, match="positive"):
        c.decrement()


def test_counter_rejects_stack_machines():
    with pytest.raises(MachineError):
        Counter.new(builtin("toy_stack"), 4)
