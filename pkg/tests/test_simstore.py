import random
from fractions import Fraction

import pytest

from cascade_ec.construct import layout_for
from cascade_ec.errors import NotFound, Undecodable
from cascade_ec.metrics import arc1, arc2
from cascade_ec.simstore import (KIB, all_pair_patterns, degraded_read, pack_files, random_patterns,
                                 run_repair_campaign, single_patterns, synthetic_workload)


def test_workload_is_seeded_and_bounded():
    a = synthetic_workload(50, seed=3)
    assert a == synthetic_workload(50, seed=3)
    assert all(5 * KIB <= s <= 30 * KIB * KIB for _, s in a)
    assert synthetic_workload(0) == []


def test_exact_stripe_fill_and_empty_store():
    lay = layout_for("azure", 6, 2, 2)
    store = pack_files([("x", 6 * 64)], lay, 64)
    assert len(store.stripes) == 1
    assert [e.length for e in store.objects["x"]] == [64] * 6
    empty = pack_files([], lay, 64)
    assert empty.stripes == [] and empty.objects == {}


def test_spanning_file_has_contiguous_extents():
    lay = layout_for("azure", 6, 2, 2)
    store = pack_files([("a", 100), ("b", 300)], lay, 128)
    ext = store.objects["b"]
    assert [(e.block, e.offset, e.length) for e in ext] == [(0, 100, 28), (1, 0, 128), (2, 0, 128), (3, 0, 16)]


def test_duplicate_ids_and_bad_payload_rejected():
    lay = layout_for("azure", 6, 2, 2)
    with pytest.raises(ValueError):
        pack_files([("a", 10), ("a", 10)], lay, 64)
    with pytest.raises(ValueError):
        pack_files([("a", 10)], lay, 64, payload={"a": b"short"})


def test_read_from_surviving_block_costs_file_size():
    lay = layout_for("base-mds", 2, 1, 0)
    store = pack_files([("F1", 100), ("F2", 60)], lay, 256)
    data, acct = degraded_read(store, "F2", failed_nodes=[1])
    assert data == store.original_file("F2")
    assert acct.bytes_read == 60 and acct.blocks_accessed == 1


def test_lost_file_reads_only_aligned_segments():
    lay = layout_for("base-mds", 2, 1, 0)
    store = pack_files([("F1", 100), ("F2", 60), ("F3", 200)], lay, 256)
    data, acct = degraded_read(store, "F2", failed_nodes=[store.node_of(0, 0)])
    assert data == store.original_file("F2")
    assert acct.bytes_read == 2 * 60 and acct.blocks_accessed == 2
    _, base = degraded_read(store, "F2", failed_nodes=[store.node_of(0, 0)], mode="block")
    assert base.bytes_read == 2 * 256


def test_file_over_two_lost_blocks_uses_two_erasure_decode():
    lay = layout_for("base-mds", 3, 2, 0)
    store = pack_files([("F1", 200), ("F4", 200)], lay, 256)
    down = [store.node_of(0, 1), store.node_of(0, 2)]
    data, acct = degraded_read(store, "F4", failed_nodes=down)
    assert data == store.original_file("F4")
    # D1, G1, G2 over the F4 ranges [0,144) and [200,256) of D2/D3 merged into one span per block
    assert acct.blocks_accessed == 3
    assert acct.bytes_read < 3 * 256


def test_repeated_ranges_are_read_once():
    lay = layout_for("base-mds", 2, 1, 0)
    store = pack_files([("F0", 50), ("F3", 326)], lay, 256)
    failed = [store.node_of(0, 0)]
    data, acct = degraded_read(store, "F3", failed_nodes=failed)
    assert data == store.original_file("F3")
    # own part of D2 is [0,120); D1's lost part [50,256) needs D2[50,256) too
    assert acct.repeated_bytes_avoided == 70
    _, raw = degraded_read(store, "F3", failed_nodes=failed, skip_repeated=False)
    assert raw.bytes_read == acct.bytes_read + 70


def test_unknown_file_and_undecodable():
    lay = layout_for("base-mds", 2, 1, 0)
    store = pack_files([("F1", 300)], lay, 256)
    with pytest.raises(NotFound):
        degraded_read(store, "nope")
    with pytest.raises(Undecodable):
        degraded_read(store, "F1", failed_nodes=[0, 1])
    with pytest.raises(NotFound):
        store.fail([99])


@pytest.mark.parametrize("scheme", ["azure", "cp-azure", "cp-uniform"])
def test_randomised_degraded_reads_match_originals(scheme):
    lay = layout_for(scheme, 6, 2, 2)
    rng = random.Random(scheme)
    files = [(f"f{i}", rng.randint(1, 3000)) for i in range(40)]
    store = pack_files(files, lay, 512, seed=1, num_nodes=12)
    done = 0
    while done < 340:
        fid = rng.choice(files)[0]
        down = rng.sample(range(12), rng.randint(0, 3))
        try:
            data, acct = degraded_read(store, fid, failed_nodes=down)
        except Undecodable:
            continue
        done += 1
        assert data == store.original_file(fid)
        _, base = degraded_read(store, fid, failed_nodes=down, mode="block")
        assert acct.bytes_read <= base.bytes_read
        assert acct.blocks_accessed == base.blocks_accessed


def test_node_failure_state_is_used():
    lay = layout_for("azure", 6, 2, 2)
    store = pack_files([("a", 100)], lay, 64)
    store.fail([store.node_of(0, 0)])
    assert store.failed_blocks(0) == {0}
    data, acct = degraded_read(store, "a")
    assert data == store.original_file("a") and acct.blocks_accessed > 2
    store.heal_all()
    assert store.failed_blocks(0) == frozenset()


def test_single_failure_campaign_tracks_arc1():
    lay = layout_for("azure", 24, 2, 2)
    store = pack_files(synthetic_workload(5, 100, 2000, seed=1), lay, 64)
    res = run_repair_campaign(store, single_patterns(lay), ["cp-azure", "azure"])
    ratio = Fraction(res.totals["cp-azure"].bytes_read, res.totals["azure"].bytes_read)
    assert ratio == arc1(layout_for("cp-azure", 24, 2, 2)) / arc1(lay)
    assert round(11.36 / 12.86, 3) == round(float(ratio), 3)


def test_pair_campaign_tracks_arc2():
    lay = layout_for("cp-uniform", 6, 2, 2)
    store = pack_files([("a", 900)], lay, 32)
    res = run_repair_campaign(store, all_pair_patterns(lay), ["cp-uniform", "azure"])
    assert all(r.status == "ok" for r in res.rows)
    per_block = Fraction(res.totals["cp-uniform"].bytes_read, len(store.stripes) * 32 * 45)
    assert per_block == arc2(lay)
    assert Fraction(res.totals["azure"].bytes_read, len(store.stripes) * 32 * 45) == arc2(
        layout_for("azure", 6, 2, 2))


def test_campaign_reports_undecodable_and_zero_patterns():
    lay = layout_for("cp-azure", 6, 2, 2)
    store = pack_files([("a", 200)], lay, 64)
    res = run_repair_campaign(store, [(), ("D1", "D2", "D3")], ["cp-azure", "azure"])
    by = {(r.scheme, r.pattern): r for r in res.rows}
    assert by[("cp-azure", "")].bytes_read == 0
    assert by[("cp-azure", "D1+D2+D3")].status == "undecodable"
    assert by[("azure", "D1+D2+D3")].status == "ok"
    assert res.to_csv().splitlines()[0] == "scheme,pattern,bytesRead,blocksAccessed,status"


def test_random_patterns_seeded():
    lay = layout_for("azure", 6, 2, 2)
    assert random_patterns(lay, 5, seed=2) == random_patterns(lay, 5, seed=2)
    assert all(len(set(p)) == 2 for p in random_patterns(lay, 20))


def test_index_estimate():
    lay = layout_for("azure", 6, 2, 2)
    est = pack_files([("a", 1000)], lay, 64).index_size_estimate()
    assert est["total"] == est["stripe_index"] + est["block_index"] + est["object_index"]
