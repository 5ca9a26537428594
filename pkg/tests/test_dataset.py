import json
import random

import pytest

from geoprog.dataset import (
    DatasetError,
    Problem,
    dataset_stats,
    load_fixture_corpus,
    load_problems,
    program_token_count,
    verify_annotations,
)
from geoprog.executor import MatchPolicy
from geoprog.program import parse_program


def make_record(**over):
    record = {
        "id": "p-1",
        "text": "In circle O the inscribed angle is 30 degrees.",
        "diagram": None,
        "vars": [30.0],
        "options": [30.0, 45.0, 60.0, 75.0],
        "answer": 2,
        "program": "Double(N_0)",
        "type": "angle",
        "knowledge": ["central angle theorem"],
        "explanation": None,
        "split": "train",
    }
    record.update(over)
    return record


def write_dataset(tmp_path, records, name="data.json", jsonl=False):
    path = tmp_path / name
    if jsonl:
        path.write_text("\n".join(json.dumps(r) for r in records) + "\n")
    else:
        path.write_text(json.dumps(records, indent=1))
    return path


class TestLoad:
    def test_array_file(self, tmp_path):
        records = [make_record(id=f"p-{i}", split=s)
                   for i, s in enumerate(["train", "val", "test"])]
        problems = load_problems(write_dataset(tmp_path, records))
        assert [p.split for p in problems] == ["train", "val", "test"]
        assert problems[0].gold_program == parse_program("Double(N_0)")

    def test_jsonl_file(self, tmp_path):
        records = [make_record(id=f"p-{i}") for i in range(3)]
        problems = load_problems(write_dataset(tmp_path, records, jsonl=True))
        assert len(problems) == 3

    def test_missing_options_field(self, tmp_path):
        record = make_record()
        del record["options"]
        path = write_dataset(tmp_path, [record])
        with pytest.raises(DatasetError, match="options"):
            load_problems(path, strict=True)
        errors = []
        assert load_problems(path, errors=errors) == []
        assert errors and errors[0].fieldname == "options"

    def test_bad_gold_program_arity(self, tmp_path):
        path = write_dataset(tmp_path, [make_record(program="Add(N_0)")])
        with pytest.raises(DatasetError, match="program"):
            load_problems(path, strict=True)
        # lenient mode keeps the problem, clears the program
        errors = []
        problems = load_problems(path, errors=errors)
        assert len(problems) == 1 and problems[0].gold_program is None
        assert errors[0].fieldname == "program"

    def test_gold_program_must_validate_against_vars(self, tmp_path):
        path = write_dataset(tmp_path, [make_record(program="Half(N_3)")])
        with pytest.raises(DatasetError, match="program"):
            load_problems(path, strict=True)

    def test_answer_range(self, tmp_path):
        path = write_dataset(tmp_path, [make_record(answer=4)])
        with pytest.raises(DatasetError, match="answer"):
            load_problems(path, strict=True)

    def test_wrong_option_count(self, tmp_path):
        path = write_dataset(tmp_path, [make_record(options=[1, 2, 3])])
        with pytest.raises(DatasetError, match="options"):
            load_problems(path, strict=True)

    def test_unknown_fields_preserved(self, tmp_path):
        path = write_dataset(tmp_path, [make_record(source_url="http://example.com")])
        problems = load_problems(path)
        assert problems[0].extra == {"source_url": "http://example.com"}
        assert problems[0].to_dict()["source_url"] == "http://example.com"

    def test_non_finite_numbers_rejected(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('[{"id": "x", "text": "t", "vars": [NaN], "options": [1,2,3,4],'
                        ' "answer": 0, "type": "angle", "split": "train"}]')
        with pytest.raises(DatasetError):
            load_problems(path, strict=True)

    def test_optional_fields_default(self, tmp_path):
        record = make_record()
        for key in ("diagram", "program", "knowledge", "explanation"):
            del record[key]
        problems = load_problems(write_dataset(tmp_path, [record]))
        p = problems[0]
        assert p.diagram_path is None and p.gold_program is None
        assert p.knowledge_tags == () and p.explanation is None

    def test_empty_vars_allowed(self, tmp_path):
        record = make_record(vars=[], program="Double(C_30)", options=[50, 60, 70, 80],
                             answer=1)
        problems = load_problems(write_dataset(tmp_path, [record]))
        assert problems[0].problem_vars == ()


class TestStats:
    def test_single_problem_derived_example(self, tmp_path):
        record = make_record(program="Minus(C_180, N_0); Half(V_0)",
                             vars=[100.0], options=[35.0, 40.0, 55.0, 85.0], answer=1)
        problems = load_problems(write_dataset(tmp_path, [record]))
        stats = dataset_stats(problems)
        assert stats.avg_op == 2.0
        # tokens: (Minus C_180 N_0) + (Half V_0) = 3 + 2
        assert stats.avg_pl == 5.0
        assert stats.avg_pl >= stats.avg_op

    def test_empty_list(self):
        stats = dataset_stats([])
        assert stats.total == 0
        assert stats.avg_op == 0.0 and stats.avg_pl == 0.0
        assert sum(stats.per_type.values()) == 0

    def test_counts_and_permutation_invariance(self):
        problems = load_fixture_corpus()
        stats = dataset_stats(problems)
        assert stats.total == len(problems)
        assert sum(stats.per_type.values()) == stats.total
        assert sum(stats.per_split.values()) == stats.total
        shuffled = problems[:]
        random.Random(5).shuffle(shuffled)
        assert dataset_stats(shuffled) == stats

    def test_means_only_over_annotated(self, tmp_path):
        records = [
            make_record(id="a", program="Double(N_0)"),
            make_record(id="b", program=None),
        ]
        stats = dataset_stats(load_problems(write_dataset(tmp_path, records)))
        assert stats.total == 2 and stats.annotated == 1
        assert stats.avg_op == 1.0 and stats.avg_pl == 2.0

    def test_token_count(self):
        assert program_token_count(parse_program("Proportion(N_0, N_1, N_2)")) == 4
        assert program_token_count(parse_program("Half(N_0); Half(V_0)")) == 4


class TestVerify:
    def test_fixture_pass(self, tmp_path):
        record = make_record(program="PythagoreanAdd(N_0, N_1)", vars=[3.0, 4.0],
                             options=[3.0, 4.0, 5.0, 6.0], answer=2)
        problems = load_problems(write_dataset(tmp_path, [record]))
        report = verify_annotations(problems)
        assert report.total_checked == 1 and report.passed == 1
        assert report.failures == ()

    def test_value_mismatch(self, tmp_path):
        record = make_record(program="PythagoreanAdd(N_0, N_1)", vars=[3.0, 4.0],
                             options=[3.0, 4.0, 5.0, 6.0], answer=0)
        problems = load_problems(write_dataset(tmp_path, [record]))
        report = verify_annotations(problems)
        assert report.passed == 0
        assert report.failures[0].reason == "ValueMismatch"

    def test_grammar_error_forward_reference(self):
        # built programmatically: the loader would reject this file
        problem = Problem(
            id="fwd", text="", problem_vars=(4.0,), options=(1.0, 2.0, 3.0, 4.0),
            answer_index=0, problem_type="angle", split="train",
            gold_program=parse_program("Divide(N_0, V_0)"),
        )
        report = verify_annotations([problem])
        assert report.failures[0].reason == "GrammarError"

    def test_domain_error(self):
        problem = Problem(
            id="dom", text="", problem_vars=(3.0, 4.0), options=(1.0, 2.0, 3.0, 4.0),
            answer_index=0, problem_type="length", split="train",
            gold_program=parse_program("PythagoreanMinus(N_0, N_1)"),
        )
        report = verify_annotations([problem])
        assert report.failures[0].reason == "DomainError"

    def test_missing_program_strict_only(self, tmp_path):
        records = [make_record(id="a", program=None)]
        problems = load_problems(write_dataset(tmp_path, records))
        assert verify_annotations(problems).total_checked == 0
        strict = verify_annotations(problems, strict=True)
        assert strict.total_checked == 1
        assert strict.failures[0].reason == "MissingProgram"

    def test_report_invariant(self):
        problems = load_fixture_corpus()
        report = verify_annotations(problems, MatchPolicy())
        assert report.passed + len(report.failures) == report.total_checked


def test_load_stats_verify_leave_file_untouched(tmp_path):
    path = write_dataset(tmp_path, [make_record()])
    before = path.read_bytes()
    problems = load_problems(path)
    dataset_stats(problems)
    verify_annotations(problems)
    assert path.read_bytes() == before


class TestFixtureCorpus:
    def test_loads_strict(self):
        problems = load_fixture_corpus()
        assert len(problems) >= 30
        assert all(p.gold_program is not None for p in problems)

    def test_covers_every_operation(self):
        from geoprog.ops import OPERATIONS

        used = set()
        for p in load_fixture_corpus():
            for step in p.gold_program.steps:
                used.add(step.op.name)
        assert used == {op.name for op in OPERATIONS}

    def test_types_and_splits_all_present(self):
        problems = load_fixture_corpus()
        assert {p.problem_type for p in problems} == {"angle", "length", "other"}
        assert {p.split for p in problems} == {"train", "val", "test"}
