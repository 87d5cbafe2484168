"""Constant-delay enumeration of binary words by tape and deque machines."""

from .builtins import BUILTIN_NAMES, builtin, load_machine
from .codes import b_from_a, code_A, code_B, rbgc, sliding_code, universal_word
from .engine import (Config, Halted, Next, NoRuleApplies, ReverseUnsupported, RunReport, Stuck,
                     initial_config, reverse_run, reverse_step, run, step, trace_visits)
from .machine import (Finding, Kind, MachineError, MachineSpec, format_machine_table,
                      parse_machine_table, validate_machine)
from .ranking import (Counter, CounterOverflow, CounterUnderflow, counter_decrement,
                      counter_increment, counter_new, rank_t1, unrank_t1)
from .verify import (VerificationReport, change_window_profile, check_hamiltonian,
                     check_prefix_hamiltonian, compare_codes, coverage_report, delay_profile,
                     hamming_profile, pushpop_profile, skew_profile)

__version__ = "0.1.0"
