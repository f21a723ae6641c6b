from __future__ import annotations

import random

import pytest

from digitdyn import search as S
from digitdyn.arith import is_prime
from digitdyn.core import ResourceLimitError, enumerate_cycles
from digitdyn.lines import v2_second_line


def test_prefilter_examples():
    assert S.prefilter_primality(10) == (True, True)
    assert S.prefilter_primality(7)[0] is False
    assert S.prefilter_primality(8626) == (True, True)
    prime, det = S.prefilter_primality(10**13)
    assert det and prime == is_prime(10**26 + 1)


def test_prefilter_soundness():
    # every base eliminated by the b^2+1 test has at least three cycles
    for b in range(2, 301):
        if not S.prefilter_primality(b)[0]:
            assert enumerate_cycles(b).total >= 3


@pytest.fixture(scope="module")
def library():
    return S.build_line_library(60)


def test_known_lines_prefilter(library):
    for t in range(1, 8):
        c = S.prefilter_known_lines(8 + 17 * t, library)
        assert c is not None and c.length == 2 and c.verify()
    lib = S.LineLibrary((v2_second_line(24, 16, 6, 4, 12),))
    c = S.prefilter_known_lines(24 + 53 * 5, lib)
    assert c.base == 289 and c.length == 2 and c.verify()
    assert S.prefilter_known_lines(25, lib) is None


def test_library_rejects_bad_lines():
    line = v2_second_line(8, 2, 3, 5, 1)
    bad = type(line)(line.point, 13, line.slopes, line.provenance)
    with pytest.raises(ValueError):
        S.LineLibrary((bad,))


def test_census_summary_examples():
    assert S.census_summary(3)["counts_by_length"] == {1: 3, 2: 1}
    assert S.census_summary(10)["counts_by_length"] == {1: 1, 8: 1}
    with pytest.raises(ResourceLimitError) as e:
        S.census_summary(288504)
    assert e.value.required_bytes > S.DEFAULT_MEM_LIMIT


def test_early_exit_verdicts_match_full_census():
    rng = random.Random(5)
    for b in rng.sample(range(2, 301), 50):
        full = enumerate_cycles(b)
        for i in (1, 2, 3):
            r = S.evaluate_base(S.Campaign("L", i, b, b, primality_prefilter=False), b)
            assert (r["verdict"] == "hit") == (full.total == i)
            if r["verdict"] == "miss" and "witness" in r["evidence"]:
                assert len(r["evidence"]["witness"]) > i
        for d in (2, 5, 10):
            r = S.evaluate_base(S.Campaign("M", d, b, b), b)
            assert (r["verdict"] == "hit") == (full.max_length <= d)
            if r["verdict"] == "miss":
                assert r["evidence"]["witness"][0]["length"] > d


def test_known_lines_do_not_change_verdicts(library):
    plain = S.run_campaign(S.Campaign("L", 2, 2, 400))
    lined = S.run_campaign(S.Campaign("L", 2, 2, 400, known_lines=True), library=library)
    assert S.hits(plain) == S.hits(lined) == [6, 10, 16, 20, 26, 40]


def test_pb_campaign():
    res = S.run_campaign(S.Campaign("PB", 2, 2, 30))
    assert {3, 8, 13} <= set(S.hits(res))
    for r in res:
        assert (r["verdict"] == "hit") == bool(enumerate_cycles(r["b"]).propagating(2))


def test_budget_guardrail():
    c = S.Campaign("L", 2, 2, 10**6)
    with pytest.raises(S.BudgetError):
        S.run_campaign(c)
    with pytest.raises(S.BudgetError):
        S.run_campaign(S.Campaign("M", 2, 2, 1000), budget=1000)


def test_campaign_validation():
    with pytest.raises(ValueError):
        S.Campaign("X", 2, 2, 10)
    with pytest.raises(ValueError):
        S.Campaign("L", 2, 10, 2)


def test_shards():
    c = S.Campaign("L", 2, 2, 200)
    sh = c.shards()
    assert sh[0] == (2, 65) and sh[-1][1] == 200
    assert sum(hi - lo + 1 for lo, hi in sh) == 199


def test_resume_is_byte_identical(tmp_path):
    c = S.Campaign("M", 2, 2, 400)
    full = S.to_jsonl(S.run_campaign(c))
    ck = tmp_path / "ck.txt"
    part = S.run_campaign(c, checkpoint=ck, max_shards=2)
    assert len(part) == 128
    resumed = S.to_jsonl(S.run_campaign(c, checkpoint=ck))
    assert resumed == full
    # a second resume recomputes nothing and still agrees
    assert S.to_jsonl(S.run_campaign(c, checkpoint=ck, max_shards=0)) == full


def test_parallel_determinism():
    c = S.Campaign("L", 2, 2, 300)
    assert S.to_jsonl(S.run_campaign(c, jobs=2)) == S.to_jsonl(S.run_campaign(c, jobs=1))


def test_checkpoint_corruption_detected(tmp_path):
    c = S.Campaign("L", 2, 2, 200)
    ck = tmp_path / "ck.txt"
    S.run_campaign(c, checkpoint=ck, max_shards=2)
    lines = ck.read_text().splitlines()
    lines[1] = lines[1].replace('"hit"', '"miss"') if '"hit"' in lines[1] else lines[1].replace('"miss"', '"hit"', 1)
    ck.write_text("\n".join(lines) + "\n")
    with pytest.raises(S.CheckpointError):
        S.run_campaign(c, checkpoint=ck)


def test_checkpoint_mismatch_detected(tmp_path):
    ck = tmp_path / "ck.txt"
    S.run_campaign(S.Campaign("L", 2, 2, 200), checkpoint=ck, max_shards=1)
    with pytest.raises(S.CheckpointError):
        S.run_campaign(S.Campaign("L", 1, 2, 200), checkpoint=ck)


def test_jsonl_schema():
    import json

    res = S.run_campaign(S.Campaign("L", 2, 2, 50))
    for line in S.to_jsonl(res).splitlines():
        r = json.loads(line)
        assert set(r) == {"b", "kind", "param", "verdict", "evidence"}
        assert r["verdict"] in ("hit", "miss")


def test_m10_range_includes_1932(census_oracle):
    # 1932 is a member: its longest cycle has length 9
    res = S.run_campaign(S.Campaign("M", 10, 400, 2000))
    assert S.hits(res) == [432, 596, 687, 1068, 1932]
    lengths = sorted(len(c) for c in census_oracle(1932))
    assert max(lengths) == 9
    assert lengths == sorted(c.length for c in enumerate_cycles(1932).cycles)
