"""Judge: precedence, loss-trend oracle agreement, purity, policy edges."""

import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from medlab.executor import JudgePolicy, judge_run, loss_trend_ok

from record_builders import make_manifest, make_record, oracle_trend_ok


class TestSingleCriteria:
    def test_clean_run_succeeds(self):
        verdict = judge_run(make_record())
        assert verdict.status == "success"
        assert verdict.failure_class is None

    def test_runtime_error(self):
        verdict = judge_run(make_record(exits=(0, 1), stage_names=("preprocess", "train")))
        assert verdict.failure_class == "runtime_error"
        assert verdict.feedback

    def test_timeout(self):
        verdict = judge_run(make_record(exits=(0, 124, 0, 0), timed_out_stage="train"))
        assert verdict.failure_class == "timeout"

    def test_nan_loss_is_explosion(self):
        verdict = judge_run(make_record(losses=(2.0, math.nan, 1.0, 0.9)))
        assert verdict.failure_class == "gradient_explosion"

    def test_nan_grad_is_explosion(self):
        verdict = judge_run(
            make_record(losses=(2.0, 1.5, 1.2, 0.9), grads=(1.0, math.nan, 1.0, 1.0))
        )
        assert verdict.failure_class == "gradient_explosion"

    def test_three_consecutive_huge_grads(self):
        grads = (1.0, 2e4, 3e4, 2e4, 1.0)
        verdict = judge_run(make_record(losses=(2.0, 1.8, 1.5, 1.2, 0.9), grads=grads))
        assert verdict.failure_class == "gradient_explosion"

    def test_two_huge_grads_not_consecutive_enough(self):
        grads = (1.0, 2e4, 1.0, 2e4, 1.0)
        verdict = judge_run(make_record(losses=(2.0, 1.8, 1.5, 1.2, 0.9), grads=grads))
        assert verdict.status == "success"

    def test_flat_loss_zero_slope_fails(self):
        # independent oracle: least-squares slope of an all-1.0 series is exactly 0,
        # which fails the slope < 0 requirement
        losses = (1.0, 1.0, 1.0, 1.0, 1.0)
        assert oracle_trend_ok(losses) is False
        verdict = judge_run(make_record(losses=losses))
        assert verdict.failure_class == "non_decreasing_loss"

    def test_insufficient_events(self):
        verdict = judge_run(make_record(losses=(2.0, 1.0, 0.5)))
        assert verdict.failure_class == "non_decreasing_loss"
        assert "insufficient metric events" in verdict.feedback

    def test_missing_manifest(self):
        verdict = judge_run(make_record(manifest=None))
        assert verdict.failure_class == "missing_weights"

    def test_zero_byte_weight(self):
        verdict = judge_run(make_record(manifest=make_manifest(bytes_=0)))
        assert verdict.failure_class == "missing_weights"

    def test_malformed_checksum(self):
        verdict = judge_run(make_record(manifest=make_manifest(sha="zz")))
        assert verdict.failure_class == "missing_weights"

    def test_weight_not_in_artifacts(self):
        record = make_record(artifacts=["logs/metrics.jsonl"])
        verdict = judge_run(record)
        assert verdict.failure_class == "missing_weights"

    def test_empty_weight_list(self):
        manifest = make_manifest()
        manifest.weights = []
        verdict = judge_run(make_record(manifest=manifest))
        assert verdict.failure_class == "missing_weights"


class TestPrecedence:
    def test_runtime_beats_explosion(self):
        record = make_record(
            losses=(2.0, math.nan, 1.0, 0.9), exits=(0, 1), stage_names=("preprocess", "train")
        )
        assert judge_run(record).failure_class == "runtime_error"

    def test_timeout_beats_loss(self):
        record = make_record(losses=(1.0, 1.0, 1.0, 1.0), timed_out_stage="validate",
                             exits=(0, 0, 124, 0))
        assert judge_run(record).failure_class == "timeout"

    def test_explosion_beats_missing_weights(self):
        record = make_record(losses=(2.0, math.nan, 1.0, 0.9), manifest=None)
        assert judge_run(record).failure_class == "gradient_explosion"

    def test_loss_beats_missing_weights(self):
        record = make_record(losses=(1.0, 1.0, 1.0, 1.0), manifest=None)
        assert judge_run(record).failure_class == "non_decreasing_loss"


class TestStrictMonotonePreset:
    def test_strict_rejects_plateau(self):
        policy = JudgePolicy(strict_monotone=True)
        assert loss_trend_ok([2.0, 1.5, 1.5, 1.0], policy) is False

    def test_strict_accepts_strictly_decreasing(self):
        policy = JudgePolicy(strict_monotone=True)
        assert loss_trend_ok([2.0, 1.5, 1.2, 1.0], policy) is True


class TestOracleAgreement:
    def test_hundred_random_series(self):
        rng = random.Random(20240811)
        policy = JudgePolicy()
        for _ in range(100):
            n = rng.randint(4, 60)
            start = rng.uniform(0.5, 5.0)
            drift = rng.uniform(-0.08, 0.04)
            noise = rng.uniform(0.0, 0.3)
            losses = [
                max(1e-6, start + drift * i + rng.gauss(0, noise)) for i in range(n)
            ]
            assert loss_trend_ok(losses, policy) == oracle_trend_ok(losses), losses


class TestPurity:
    @settings(max_examples=300, deadline=None)
    @given(
        losses=st.lists(
            st.floats(min_value=1e-3, max_value=10, allow_nan=False), min_size=1, max_size=20
        ),
        exit_code=st.sampled_from([0, 0, 0, 1, 2]),
        manifest_kind=st.sampled_from(["good", "none"]),
    )
    def test_repeat_call_equality(self, losses, exit_code, manifest_kind):
        record = make_record(
            losses=tuple(losses),
            exits=(0, exit_code, 0, 0),
            manifest="good" if manifest_kind == "good" else None,
        )
        policy = JudgePolicy()
        first = judge_run(record, policy)
        second = judge_run(record, policy)
        assert first.model_dump() == second.model_dump()
