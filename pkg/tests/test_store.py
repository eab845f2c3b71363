# Copyright (c) 2026- sgwc_bof contributors
#
# BSD 3-Clause License

"""Tests for the content-addressed descriptor cache."""

import logging
import struct

import numpy as np
import pytest

from sgwc_bof.bof import kmeans
from sgwc_bof.global_descriptor import geodesic_matrix
from sgwc_bof.laplacian import assemble, solve_eigs
from sgwc_bof.store import DescriptorStore, EntryKind, StoreStats
from sgwc_bof.utils import HEADER


@pytest.fixture
def store(tmp_path):
    return DescriptorStore(tmp_path / "cache")


class TestDescriptorStore:
    def test_computes_once_then_hits(self, store, rng):
        values = rng.standard_normal((5, 12))
        calls = []

        def compute():
            calls.append(1)
            return values

        first = store.get_or_compute(EntryKind.SIGNATURES, "ab" * 32, {"resolution": 2}, compute)
        second = store.get_or_compute(EntryKind.SIGNATURES, "ab" * 32, {"resolution": 2}, compute)
        assert len(calls) == 1
        np.testing.assert_array_equal(first, values)
        np.testing.assert_array_equal(second, values)
        assert store.stats.hits == 1
        assert store.stats.misses == 1
        assert store.stats.computed["signatures"] == 1

    def test_parameters_change_the_key(self, store):
        a = store.path_for(EntryKind.SIGNATURES, "cd" * 32, {"resolution": 2})
        b = store.path_for(EntryKind.SIGNATURES, "cd" * 32, {"resolution": 3})
        assert a != b
        assert a.parent == store.root / "signatures" / "cd"

    def test_eigenbasis_entry(self, store, sphere42):
        basis = solve_eigs(assemble(sphere42), 8)
        key = sphere42.content_hash()
        store.get_or_compute(EntryKind.EIGENBASIS, key, {"q": 8}, lambda: basis)
        cached = store.get_or_compute(EntryKind.EIGENBASIS, key, {"q": 8}, pytest.fail)
        np.testing.assert_array_equal(cached.eigenvalues, basis.eigenvalues)
        np.testing.assert_array_equal(cached.eigenfunctions, basis.eigenfunctions)
        np.testing.assert_array_equal(cached.vertex_areas, basis.vertex_areas)

    def test_geodesics_entry(self, store, ico):
        geodesics = geodesic_matrix(ico)
        store.get_or_compute(EntryKind.GEODESICS, ico.content_hash(), None, lambda: geodesics)
        cached = store.get_or_compute(EntryKind.GEODESICS, ico.content_hash(), None, pytest.fail)
        np.testing.assert_array_equal(cached.distances, geodesics.distances)
        assert cached.scale == geodesics.scale

    def test_geodesics_layout(self, store, ico):
        geodesics = geodesic_matrix(ico)
        store.get_or_compute(EntryKind.GEODESICS, ico.content_hash(), None, lambda: geodesics)
        raw = store.path_for(EntryKind.GEODESICS, ico.content_hash()).read_bytes()
        m = ico.n_vertices
        # header, m, diameter, then m x m row-major distances
        assert len(raw) == HEADER.size + 8 + 8 + 8 * m * m
        assert struct.unpack_from("<Qd", raw, HEADER.size) == (m, geodesics.scale)
        tail = np.frombuffer(raw, dtype="<f8", offset=HEADER.size + 16).reshape(m, m)
        np.testing.assert_array_equal(tail, geodesics.distances)

    def test_codebook_entry(self, store, rng):
        codebook = kmeans(rng.standard_normal((3, 40)), 4, seed=1, training_hash="feed")
        store.get_or_compute(EntryKind.CODEBOOK, "ef" * 32, {"k": 4}, lambda: codebook)
        cached = store.get_or_compute(EntryKind.CODEBOOK, "ef" * 32, {"k": 4}, pytest.fail)
        np.testing.assert_array_equal(cached.centers, codebook.centers)
        np.testing.assert_array_equal(cached.stats.counts, codebook.stats.counts)
        assert cached.alpha == codebook.alpha
        assert cached.seed == 1
        assert cached.training_hash == "feed"

    def test_bad_magic_is_recomputed(self, store, rng, caplog):
        values = rng.standard_normal((2, 3))
        path = store.path_for(EntryKind.SIGNATURES, "01" * 32, None)
        path.parent.mkdir(parents=True)
        path.write_bytes(HEADER.pack(b"GARBAGE!", 1) + bytes(64))
        with caplog.at_level(logging.WARNING, logger="sgwc_bof"):
            result = store.get_or_compute(EntryKind.SIGNATURES, "01" * 32, None, lambda: values)
        np.testing.assert_array_equal(result, values)
        assert "Bad magic" in caplog.text
        assert store.stats.misses == 1
        assert store.get_or_compute(EntryKind.SIGNATURES, "01" * 32, None, pytest.fail).shape == (2, 3)

    def test_truncated_entry_is_recomputed(self, store, rng):
        values = rng.standard_normal((4, 4))
        store.get_or_compute(EntryKind.SIGNATURES, "02" * 32, None, lambda: values)
        path = store.path_for(EntryKind.SIGNATURES, "02" * 32, None)
        path.write_bytes(path.read_bytes()[:-8])
        result = store.get_or_compute(EntryKind.SIGNATURES, "02" * 32, None, lambda: values * 2)
        np.testing.assert_array_equal(result, values * 2)
        assert store.stats.computed["signatures"] == 2

    def test_version_mismatch_is_recomputed(self, store, rng):
        values = rng.standard_normal((1, 2))
        path = store.path_for(EntryKind.SIGNATURES, "03" * 32, None)
        path.parent.mkdir(parents=True)
        path.write_bytes(HEADER.pack(EntryKind.SIGNATURES.magic, 99) + bytes(32))
        np.testing.assert_array_equal(
            store.get_or_compute(EntryKind.SIGNATURES, "03" * 32, None, lambda: values), values
        )

    def test_clear(self, store, rng):
        for key in ("aa", "bb", "cc"):
            store.get_or_compute(EntryKind.SIGNATURES, key * 32, None, lambda: rng.standard_normal((1, 1)))
        assert store.contains(EntryKind.SIGNATURES, "aa" * 32)
        assert store.clear() == 3
        assert not store.contains(EntryKind.SIGNATURES, "aa" * 32)


class TestStoreStats:
    def test_merge_and_counters(self):
        a = StoreStats(hits=1, misses=2)
        a.computed["eigenbasis"] += 2
        b = StoreStats(hits=3, misses=0)
        b.computed["geodesics"] += 1
        a.merge(b)
        assert a.as_dict() == {
            "cache_hits": 4,
            "cache_misses": 2,
            "eigenbasis_computed": 2,
            "geodesics_computed": 1,
        }
