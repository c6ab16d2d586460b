"""Content-addressed flow cache: keys, round-trips, and reuse."""

from __future__ import annotations

import numpy as np

from flowpool import FlowCache, FlowField, FlowParams, Frame, flow_cache_key
from flowpool import pipeline


def _frame(seed: int, w: int = 8, h: int = 8) -> Frame:
    gen = np.random.default_rng(seed)
    return Frame(gen.integers(0, 256, size=(h, w, 3), dtype=np.uint8))


def test_key_is_stable_for_equal_inputs():
    params = FlowParams()
    a = flow_cache_key(_frame(1), _frame(2), params)
    b = flow_cache_key(_frame(1), _frame(2), params)
    assert a == b


def test_key_changes_with_any_input():
    params = FlowParams()
    base = flow_cache_key(_frame(1), _frame(2), params)
    assert flow_cache_key(_frame(3), _frame(2), params) != base
    assert flow_cache_key(_frame(1), _frame(3), params) != base
    assert flow_cache_key(_frame(2), _frame(1), params) != base  # order matters
    assert flow_cache_key(_frame(1), _frame(2), FlowParams(smoothness=9.0)) != base
    assert flow_cache_key(_frame(1), _frame(2), FlowParams(iterations=7)) != base
    assert flow_cache_key(_frame(1), _frame(2), FlowParams(levels=1)) != base


def test_put_get_round_trip(tmp_path, rng):
    cache = FlowCache(tmp_path / "cache")
    field = FlowField(
        u=rng.standard_normal((6, 6)).astype(np.float32).astype(np.float64),
        v=rng.standard_normal((6, 6)).astype(np.float32).astype(np.float64),
    )
    cache.put("deadbeef", field)
    back = cache.get("deadbeef")
    assert back is not None
    assert np.array_equal(back.u, field.u)
    assert np.array_equal(back.v, field.v)
    # no leftover temporary files
    assert sorted(p.name for p in (tmp_path / "cache").iterdir()) == ["deadbeef.flo"]


def test_get_miss_returns_none(tmp_path):
    cache = FlowCache(tmp_path)
    assert cache.get("0" * 64) is None


def test_damaged_entry_is_a_miss(tmp_path):
    cache = FlowCache(tmp_path)
    (tmp_path / "abc.flo").write_bytes(b"garbage")
    assert cache.get("abc") is None


def test_pair_flows_reuse_cached_fields(tmp_path, monkeypatch, random_clip):
    seq = random_clip(4, w=8, h=8, seed=42)  # distinct frames, distinct keys
    params = FlowParams(iterations=5, levels=1)
    cache = FlowCache(tmp_path / "c")

    calls = {"n": 0}
    real = pipeline.optical_flow.estimate_flow

    def counting(prev, nxt, p=None):
        calls["n"] += 1
        return real(prev, nxt, p)

    monkeypatch.setattr(pipeline.optical_flow, "estimate_flow", counting)
    first = pipeline.compute_pair_flows(seq, params, cache)
    assert calls["n"] == 3
    second = pipeline.compute_pair_flows(seq, params, cache)
    assert calls["n"] == 3  # all three pairs served from the cache
    for f1, f2 in zip(first, second):
        assert np.array_equal(f1.u, f2.u)
        assert np.array_equal(f1.v, f2.v)


def test_pair_flows_without_cache_recompute(monkeypatch, identical_clip):
    seq = identical_clip(3, w=8, h=8)
    params = FlowParams(iterations=5, levels=1)

    calls = {"n": 0}
    real = pipeline.optical_flow.estimate_flow

    def counting(prev, nxt, p=None):
        calls["n"] += 1
        return real(prev, nxt, p)

    monkeypatch.setattr(pipeline.optical_flow, "estimate_flow", counting)
    pipeline.compute_pair_flows(seq, params, None)
    pipeline.compute_pair_flows(seq, params, None)
    assert calls["n"] == 4
