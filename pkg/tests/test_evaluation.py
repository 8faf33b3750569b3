"""Split, FCR/ASR/MAP metrics against exhaustive oracles, and the runner."""

import itertools
import json
import random

import pytest

from kgrec.classify import RecommendationItem, RecommendationList, RepositoryRecord
from kgrec.errors import EmptyInput, MissingJudgments, TooSmall
from kgrec.evaluation import (
    EvaluationCase,
    GroundTruthRelevance,
    System,
    asr_at_k,
    average_precision,
    fcr,
    load_judgments,
    map_at_k,
    run_experiment,
    split,
)
from kgrec.reporting import render_table, write_report_files


# --- independent AP oracle: brute force over every rank ---------------------------


def oracle_average_precision(relevance):
    relevant_ranks = [r for r, flag in enumerate(relevance, start=1) if flag]
    if not relevant_ranks:
        return 0.0
    total = 0.0
    for rank in relevant_ranks:
        hits_up_to = sum(1 for r in relevant_ranks if r <= rank)
        total += hits_up_to / rank
    return total / len(relevant_ranks)


def case(flags, project="p", failed=False):
    return EvaluationCase(
        project=project,
        recommended=[] if failed else [f"t{i}" for i in range(len(flags))],
        relevance=[] if failed else list(flags),
        failed=failed,
    )


# --- split -----------------------------------------------------------------------


def records(n):
    return [RepositoryRecord(f"p{i}", f"text {i}", {f"t{i % 5}"}) for i in range(n)]


def test_split_sizes_eight_two():
    train, test = split(records(10), 0.8, seed=1)
    assert len(train) == 8 and len(test) == 2
    assert {r.id for r in train} | {r.id for r in test} == {f"p{i}" for i in range(10)}
    assert not ({r.id for r in train} & {r.id for r in test})


def test_split_deterministic_per_seed():
    a1 = split(records(30), 0.8, seed=7)
    a2 = split(records(30), 0.8, seed=7)
    assert [r.id for r in a1[0]] == [r.id for r in a2[0]]
    assert [r.id for r in a1[1]] == [r.id for r in a2[1]]


def test_distinct_seeds_give_distinct_splits():
    seen = set()
    for seed in range(100):
        train, _ = split(records(30), 0.8, seed=seed)
        seen.add(tuple(r.id for r in train))
    assert len(seen) > 95


def test_split_too_small():
    with pytest.raises(TooSmall):
        split(records(1), 0.8, seed=0)


# --- fcr -------------------------------------------------------------------------


def test_fcr_values():
    cases = [case([True]) for _ in range(50)]
    assert fcr(cases) == 0.0
    cases[0] = case([], failed=True)
    assert fcr(cases) == pytest.approx(0.02)
    cases = [case([], failed=True) for _ in range(23)] + [case([True]) for _ in range(27)]
    assert fcr(cases) == pytest.approx(0.46)


def test_fcr_complements_non_failed_fraction():
    rng = random.Random(2)
    for _ in range(20):
        cases = [case([True], failed=rng.random() < 0.4) for _ in range(rng.randint(1, 40))]
        for c in cases:
            if c.failed:
                c.recommended.clear()
                c.relevance.clear()
        non_failed = sum(1 for c in cases if not c.failed) / len(cases)
        assert fcr(cases) + non_failed == pytest.approx(1.0)


def test_fcr_empty_input():
    with pytest.raises(EmptyInput):
        fcr([])


# --- asr ------------------------------------------------------------------------


def test_asr_all_relevant_is_one_and_none_is_zero():
    assert asr_at_k([case([True] * 5)], 5) == 1.0
    assert asr_at_k([case([False] * 5)], 5) == 0.0


def test_asr_two_case_example():
    cases = [case([True, True, False, False, False]), case([True, False, True, False, True])]
    assert asr_at_k(cases, 5) == pytest.approx(0.5)


def test_asr_uses_actual_list_length_for_short_lists():
    assert asr_at_k([case([True, False, True])], 5) == pytest.approx(2 / 3)


def test_asr_ignores_failed_cases():
    cases = [case([True] * 5), case([], failed=True)]
    assert asr_at_k(cases, 5) == 1.0


def test_asr_permutation_invariant_over_cases():
    rng = random.Random(3)
    cases = [case([rng.random() < 0.5 for _ in range(5)]) for _ in range(12)]
    base = asr_at_k(cases, 5)
    for _ in range(100):
        shuffled = cases[:]
        rng.shuffle(shuffled)
        assert asr_at_k(shuffled, 5) == pytest.approx(base)


# --- map ------------------------------------------------------------------------


def test_ap_matches_oracle_for_all_32_patterns():
    for flags in itertools.product([False, True], repeat=5):
        assert average_precision(flags) == pytest.approx(oracle_average_precision(flags))


def test_ap_examples():
    assert average_precision([True] * 5) == 1.0
    assert average_precision([True, False, True, False, False]) == pytest.approx((1 + 2 / 3) / 2)
    assert average_precision([False, False, False, False, True]) == pytest.approx(0.2)


def test_moving_relevant_item_earlier_never_decreases_ap():
    for flags in itertools.product([False, True], repeat=5):
        flags = list(flags)
        base = average_precision(flags)
        for i in range(1, 5):
            if flags[i] and not flags[i - 1]:
                swapped = flags[:]
                swapped[i - 1], swapped[i] = swapped[i], swapped[i - 1]
                assert average_precision(swapped) >= base - 1e-12


def test_map_over_cases():
    cases = [case([True, False, True, False, False]), case([False] * 5)]
    expected = (oracle_average_precision([1, 0, 1, 0, 0]) + 0.0) / 2
    assert map_at_k(cases, 5) == pytest.approx(expected)


def test_map_equals_asr_at_k_one():
    # with lists cut to a single slot, AP and per-list precision coincide
    rng = random.Random(4)
    for _ in range(20):
        cases = [
            case([rng.random() < 0.5 for _ in range(5)]) for _ in range(rng.randint(1, 10))
        ]
        assert map_at_k(cases, 1) == pytest.approx(asr_at_k(cases, 1))


# --- judgments -------------------------------------------------------------------


def test_majority_judgments_and_missing(tmp_path):
    path = tmp_path / "judgments.ndjson"
    rows = []
    for judge in ("j1", "j2", "j3"):
        rows.append({"project": "p1", "topic": "a", "judge": judge, "relevant": judge != "j3"})
    path.write_text("\n".join(json.dumps(r) for r in rows))
    relevance = load_judgments(path)
    record = RepositoryRecord("p1", "", {"x"})
    assert relevance.judge(record, "a") is True
    with pytest.raises(MissingJudgments):
        relevance.judge(record, "unjudged")


def test_fewer_than_three_judges_rejected(tmp_path):
    path = tmp_path / "judgments.ndjson"
    path.write_text(json.dumps({"project": "p", "topic": "a", "judge": "j1", "relevant": True}))
    with pytest.raises(MissingJudgments):
        load_judgments(path)


# --- runner ---------------------------------------------------------------------


def constant_system(name, topics, failed=False):
    def rec(record):
        if failed:
            return RecommendationList(items=[])
        return RecommendationList(
            items=[RecommendationItem(topic=t, score=1.0, source="classifier") for t in topics]
        )

    return System(name=name, recommend=rec)


def test_single_system_all_relevant():
    test_records = [RepositoryRecord(f"p{i}", "", {"a", "b"}) for i in range(2)]
    reports = run_experiment(
        [constant_system("s", ["a", "b"])], test_records, GroundTruthRelevance(), k=5
    )
    assert len(reports) == 1
    report = reports[0]
    assert report.asr_at_k == 1.0 and report.map_at_k == 1.0 and report.fcr_full == 0.0


def test_identical_systems_identical_reports():
    test_records = [RepositoryRecord(f"p{i}", "", {"a"}) for i in range(5)]
    reports = run_experiment(
        [constant_system("s1", ["a", "x"]), constant_system("s2", ["a", "x"])],
        test_records,
        GroundTruthRelevance(),
        k=5,
    )
    r1, r2 = reports
    assert (r1.fcr_full, r1.asr_at_k, r1.map_at_k) == (r2.fcr_full, r2.asr_at_k, r2.map_at_k)


def test_failed_system_reported_via_fcr():
    test_records = [RepositoryRecord(f"p{i}", "", {"a"}) for i in range(4)]
    reports = run_experiment(
        [constant_system("dead", [], failed=True)], test_records, GroundTruthRelevance(), k=5
    )
    assert reports[0].fcr_full == 1.0
    assert reports[0].asr_at_k == 0.0


def test_report_files_written(tmp_path):
    test_records = [RepositoryRecord(f"p{i}", "", {"a"}) for i in range(3)]
    reports = run_experiment(
        [constant_system("s", ["a", "b"])], test_records, GroundTruthRelevance(), k=5
    )
    table = render_table(reports)
    assert "asr@5" in table and "automated" in table
    paths = write_report_files(tmp_path / "out", reports)
    for path in paths.values():
        assert path.exists() and path.stat().st_size > 0
    csv_text = paths["csv"].read_text()
    assert csv_text.splitlines()[0].startswith("system,")
