import math
import random

import numpy as np
import pytest

from geoprog.executor import (
    ANSWERED,
    DOMAIN_ERROR,
    GRAMMAR_ERROR,
    NO_RESULT,
    VALUE,
    DomainError,
    MatchPolicy,
    execute_beam,
    execute_program,
    execute_step,
    match_option,
)
from geoprog.ops import OPERATIONS_BY_NAME
from geoprog.program import parse_program


def run(name, *args):
    return execute_step(OPERATIONS_BY_NAME[name], list(args))


class TestStepSemantics:
    def test_basic(self):
        assert run("Equal", 7.5) == 7.5
        assert run("Double", 21.0) == 42.0
        assert run("Half", 42.0) == 21.0

    def test_arithmetic(self):
        assert run("Add", 2.0, 3.0) == 5.0
        assert run("Minus", 2.0, 3.0) == -1.0
        assert run("Multiply", 2.5, 4.0) == 10.0
        assert run("Divide", 9.0, 3.0) == 3.0

    def test_trigonometric(self):
        assert run("Sin", 30.0) == pytest.approx(0.5, abs=1e-12)
        assert run("Cos", 60.0) == pytest.approx(0.5, abs=1e-12)
        assert run("Tan", 45.0) == pytest.approx(1.0, abs=1e-12)
        assert run("ArcSin", 1.0) == pytest.approx(90.0, abs=1e-12)
        assert run("ArcCos", -1.0) == pytest.approx(180.0, abs=1e-12)

    def test_theorem_formula(self):
        assert run("PythagoreanAdd", 3.0, 4.0) == 5.0
        assert run("PythagoreanMinus", 5.0, 4.0) == 3.0
        assert run("Proportion", 2.0, 6.0, 3.0) == 4.0  # a*b/c
        assert run("CircleArea", 1.0) == pytest.approx(math.pi)
        assert run("CirclePerimeter", 1.0) == pytest.approx(2 * math.pi)
        assert run("ConeArea", 3.0, 5.0) == pytest.approx(15 * math.pi)

    def test_divide_by_near_zero(self):
        with pytest.raises(DomainError):
            run("Divide", 1.0, 0.0)
        with pytest.raises(DomainError):
            run("Divide", 1.0, 5e-13)
        run("Divide", 1.0, 2e-12)  # just outside the guard

    def test_pythagorean_minus_domain(self):
        with pytest.raises(DomainError):
            run("PythagoreanMinus", 3.0, 4.0)
        assert run("PythagoreanMinus", 4.0, 4.0) == 0.0

    def test_arc_domain(self):
        with pytest.raises(DomainError):
            run("ArcSin", 1.0000001)
        with pytest.raises(DomainError):
            run("ArcCos", -1.0000001)

    def test_tan_poles(self):
        for angle in (90.0, 270.0, -90.0, 90.0 + 5 * 180.0):
            with pytest.raises(DomainError):
                run("Tan", angle)
        run("Tan", 89.999)  # close but outside the guard

    def test_proportion_denominator(self):
        with pytest.raises(DomainError):
            run("Proportion", 1.0, 2.0, 0.0)

    def test_non_finite_result(self):
        with pytest.raises(DomainError):
            run("Multiply", 1e308, 1e308)

    def test_arity_precondition(self):
        with pytest.raises(ValueError):
            run("Add", 1.0)


class TestExecuteProgram:
    def test_single_step(self):
        out = execute_program(parse_program("PythagoreanAdd(N_0, N_1)"), [3, 4])
        assert out.status == VALUE
        assert out.trace == (5.0,)
        assert out.final == 5.0
        assert out.error is None

    def test_two_step_trace(self):
        out = execute_program(parse_program("Minus(C_180, N_0); Half(V_0)"), [100])
        assert out.status == VALUE
        assert out.trace == (80.0, 40.0)
        assert out.final == 40.0

    def test_grammar_error_runs_nothing(self):
        out = execute_program(parse_program("Half(N_5)"), [3, 4])
        assert out.status == GRAMMAR_ERROR
        assert out.trace == ()
        assert out.final is None
        assert out.error.step == 0

    def test_domain_error_partial_trace(self):
        out = execute_program(parse_program("Minus(N_0, N_1); PythagoreanMinus(V_0, N_0)"), [3, 4])
        assert out.status == DOMAIN_ERROR
        assert out.trace == (-1.0,)
        assert out.error.step == 1

    def test_final_equals_last_trace_element(self):
        out = execute_program(parse_program("Double(N_0); Double(V_0); Double(V_1)"), [1])
        assert out.final == out.trace[-1] == 8.0

    def test_deterministic(self):
        program = parse_program("Sin(N_0); Multiply(N_1, V_0)")
        a = execute_program(program, [33.3, 7.7])
        b = execute_program(program, [33.3, 7.7])
        assert a == b

    def test_too_many_steps_is_grammar_error(self):
        program = parse_program("; ".join(["Half(C_30)"] * 5))
        assert execute_program(program, []).status == GRAMMAR_ERROR
        assert execute_program(program, [], max_steps=5).status == VALUE

    def test_to_dict_shape(self):
        out = execute_program(parse_program("Half(N_0)"), [5])
        assert out.to_dict() == {
            "status": "Value",
            "trace": [2.5],
            "final": 2.5,
            "error": None,
        }


class TestMatchOption:
    def test_exact(self):
        assert match_option(5.0, [3, 4, 5, 6]) == 2

    def test_tolerance(self):
        # 2*sqrt(3) against a rounded option
        assert match_option(3.464, [2, 3.4641016, 4, 5]) == 1

    def test_none(self):
        assert match_option(7.0, [3, 4, 5, 6.5]) is None

    def test_closest_wins(self):
        assert match_option(5.004, [5.0, 5.01, 6, 7]) == 0
        assert match_option(5.007, [5.0, 5.01, 6, 7]) == 1

    def test_tie_breaks_low_index(self):
        assert match_option(5.0, [5.0, 5.0, 6, 7]) == 0

    def test_relative_tolerance(self):
        # 1e-4 relative dominates past |c| = 100: window is 1.0 at c = 10000
        assert match_option(10000.5, [10000.0, 20000, 30000, 40000]) == 0
        assert match_option(10002.0, [10000.0, 20000, 30000, 40000]) is None
        assert match_option(10002.0, [10000.0, 20000, 30000, 40000],
                            MatchPolicy(rel_tol=1e-3)) == 0

    def test_requires_four_options(self):
        with pytest.raises(ValueError):
            match_option(1.0, [1, 2, 3])

    def test_policy_validation(self):
        with pytest.raises(ValueError):
            MatchPolicy(abs_tol=-1)


class TestExecuteBeam:
    def test_first_failure_then_success(self):
        outcome = execute_beam(
            ["Add(N_0)", "PythagoreanAdd(N_0, N_1)"], [3, 4], [3, 4, 5, 6]
        )
        assert outcome.status == ANSWERED
        assert outcome.chosen_option == 2
        assert outcome.chosen_rank == 1
        assert [a.kind for a in outcome.attempts] == [GRAMMAR_ERROR]

    def test_all_grammar_errors(self):
        outcome = execute_beam(["Add(N_0)", "Frob(N_0)", "Half(V_3)"], [1], [1, 2, 3, 4])
        assert outcome.status == NO_RESULT
        assert [a.kind for a in outcome.attempts] == [GRAMMAR_ERROR] * 3

    def test_value_without_match_is_skipped(self):
        outcome = execute_beam(
            ["Add(N_0, N_1)", "PythagoreanAdd(N_0, N_1)"], [3, 4], [3, 4, 5, 6]
        )
        assert outcome.status == ANSWERED
        assert outcome.chosen_rank == 1
        assert outcome.attempts[0].kind == "NoMatch"

    def test_accepts_programs_and_strings(self):
        outcome = execute_beam(
            [parse_program("Half(N_0)"), "Double(N_0)"], [10], [5, 20, 30, 40]
        )
        assert outcome.chosen_option == 0
        assert outcome.chosen_rank == 0

    def test_empty_candidates(self):
        outcome = execute_beam([], [1], [1, 2, 3, 4])
        assert outcome.status == NO_RESULT
        assert outcome.attempts == ()

    def test_domain_error_attempt(self):
        outcome = execute_beam(["PythagoreanMinus(N_0, N_1)"], [3, 4], [1, 2, 3, 4])
        assert outcome.attempts[0].kind == DOMAIN_ERROR


class TestBeamProperties:
    def _random_candidates(self, rng):
        from helpers import random_structural_program

        return [random_structural_program(rng, max_steps=3) for _ in range(rng.randint(1, 12))]

    def test_prefix_stability(self):
        rng = random.Random(501)
        for _ in range(200):
            cands = self._random_candidates(rng)
            pvars = [rng.uniform(1, 50) for _ in range(2)]
            options = [rng.uniform(1, 400) for _ in range(4)]
            full = execute_beam(cands, pvars, options)
            if full.status != ANSWERED:
                continue
            for m in range(full.chosen_rank + 1, len(cands) + 1):
                prefix = execute_beam(cands[:m], pvars, options)
                assert prefix.status == ANSWERED
                assert prefix.chosen_rank == full.chosen_rank
                assert prefix.chosen_option == full.chosen_option
                assert prefix.chosen_program == full.chosen_program

    def test_monotone_no_result(self):
        rng = random.Random(502)
        for _ in range(200):
            cands = self._random_candidates(rng)
            pvars = [rng.uniform(1, 50) for _ in range(2)]
            options = [rng.uniform(1, 400) for _ in range(4)]
            answered_at = None
            for m in range(len(cands) + 1):
                out = execute_beam(cands[:m], pvars, options)
                if answered_at is None and out.status == ANSWERED:
                    answered_at = m
                if answered_at is not None and m >= answered_at:
                    assert out.status == ANSWERED


class TestInverseIdentities:
    # acceptance runs these at 10k draws; keep a faster seeded version here
    N = 2000

    def test_double_half(self):
        rng = np.random.default_rng(1)
        for a in rng.uniform(0, 1000, self.N):
            a = a or 1.0
            assert run("Double", run("Half", a)) == a

    def test_pythagorean_roundtrip(self):
        rng = np.random.default_rng(2)
        a = rng.uniform(0, 1000, self.N)
        b = rng.uniform(0, 1000, self.N)
        for x, y in zip(a, b):
            x = x or 1.0
            got = run("PythagoreanMinus", run("PythagoreanAdd", x, y), y)
            # recovering x below the hypotenuse's ulp is impossible in doubles,
            # so the bound is relative to the dominant input scale
            assert abs(got - x) <= 1e-9 * max(x, y)

    def test_sin_arcsin(self):
        rng = np.random.default_rng(3)
        for x in rng.uniform(-1, 1, self.N):
            got = run("Sin", run("ArcSin", x))
            assert abs(got - x) <= 1e-9 * max(abs(x), 1e-300)

    def test_multiply_divide(self):
        rng = np.random.default_rng(4)
        a = rng.uniform(0, 1000, self.N)
        b = rng.uniform(0, 1000, self.N)
        for x, y in zip(a, b):
            x, y = x or 1.0, y or 1.0
            got = run("Multiply", run("Divide", x, y), y)
            assert abs(got - x) <= 1e-9 * abs(x)
