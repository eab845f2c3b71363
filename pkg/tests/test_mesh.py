# Copyright (c) 2026- sgwc_bof contributors
#
# BSD 3-Clause License

"""Tests for mesh parsing and per-element LBO geometry."""

import io
import math

import numpy as np
import pytest

from sgwc_bof.mesh import (
    Mesh,
    MeshFormatError,
    MeshIndexError,
    cotangent_weights,
    load_mesh,
    save_mesh,
    vertex_areas,
)
from sgwc_bof.synthetic import icosphere, subdivide

SQRT3 = math.sqrt(3.0)

EQUILATERAL = np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.5, SQRT3 / 2, 0.0]])


def _diamond():
    """Two equilateral triangles sharing the edge (0, 1)."""
    vertices = np.vstack([EQUILATERAL, [[0.5, -SQRT3 / 2, 0.0]]])
    return Mesh(vertices, np.array([[0, 1, 2], [0, 3, 1]]))


class TestParsing:
    def test_off_with_comments_and_quad(self):
        text = """# a unit square
OFF
4 1 0
0 0 0   # origin
1 0 0
1 1 0

0 1 0
4 0 1 2 3
"""
        mesh = load_mesh(io.StringIO(text), "off")
        assert mesh.n_vertices == 4
        assert mesh.triangles.tolist() == [[0, 1, 2], [0, 2, 3]]

    def test_off_counts_on_header_line(self):
        mesh = load_mesh(b"OFF 3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n", "off")
        assert mesh.n_triangles == 1

    def test_obj_negative_and_slashed_indices(self):
        text = "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nvn 0 0 1\nf -4//1 -3//1 -2//1 -1//1\nf 1/1 2/1 3/1\n"
        mesh = load_mesh(io.StringIO(text), "obj")
        assert mesh.triangles.tolist() == [[0, 1, 2], [0, 2, 3], [0, 1, 2]]

    def test_off_index_error_names_line(self):
        text = "OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 5\n"
        with pytest.raises(MeshIndexError) as excinfo:
            load_mesh(io.StringIO(text), "off")
        assert excinfo.value.line == 6
        assert ":6:" in str(excinfo.value)

    def test_obj_zero_index_rejected(self):
        with pytest.raises(MeshIndexError):
            load_mesh(b"v 0 0 0\nv 1 0 0\nv 0 1 0\nf 0 1 2\n", "obj")

    def test_malformed_vertex_line(self):
        with pytest.raises(MeshFormatError, match="malformed vertex"):
            load_mesh(b"OFF\n3 1 0\n0 0 zero\n1 0 0\n0 1 0\n3 0 1 2\n", "off")

    def test_bad_header(self):
        with pytest.raises(MeshFormatError, match="OFF"):
            load_mesh(b"PLY\n", "off")

    def test_too_few_vertices(self):
        with pytest.raises(MeshFormatError):
            load_mesh(b"v 0 0 0\nv 1 0 0\n", "obj")

    def test_stream_needs_format(self):
        with pytest.raises(ValueError, match="format"):
            load_mesh(io.StringIO("OFF\n"))

    def test_unknown_suffix(self, tmp_path):
        with pytest.raises(ValueError, match=".off or .obj"):
            load_mesh(tmp_path / "shape.ply")

    @pytest.mark.parametrize("suffix", ["off", "obj"])
    def test_save_then_load_keeps_geometry(self, tmp_path, suffix):
        mesh = icosphere(1)
        path = tmp_path / f"sphere.{suffix}"
        save_mesh(mesh, path)
        loaded = load_mesh(path)
        np.testing.assert_array_equal(loaded.vertices, mesh.vertices)
        np.testing.assert_array_equal(loaded.triangles, mesh.triangles)
        assert loaded.name == "sphere"
        assert loaded.content_hash() == mesh.content_hash()


class TestMesh:
    def test_arrays_are_read_only(self):
        mesh = _diamond()
        with pytest.raises(ValueError):
            mesh.vertices[0, 0] = 1.0

    def test_repeated_index_rejected(self):
        with pytest.raises(ValueError, match="repeats"):
            Mesh(EQUILATERAL, np.array([[0, 1, 1]]))

    def test_out_of_range_rejected(self):
        with pytest.raises(MeshIndexError):
            Mesh(EQUILATERAL, np.array([[0, 1, 3]]))

    def test_edges_and_connectivity(self):
        mesh = _diamond()
        assert mesh.edges.tolist() == [[0, 1], [0, 2], [0, 3], [1, 2], [1, 3]]
        assert mesh.is_connected()

    def test_two_islands_are_disconnected(self):
        vertices = np.vstack([EQUILATERAL, EQUILATERAL + 5.0])
        mesh = Mesh(vertices, np.array([[0, 1, 2], [3, 4, 5]]))
        assert not mesh.is_connected()

    def test_content_hash_ignores_name(self):
        a = Mesh(EQUILATERAL, np.array([[0, 1, 2]]), name="a")
        b = Mesh(EQUILATERAL, np.array([[0, 1, 2]]), name="b")
        c = Mesh(EQUILATERAL * 2, np.array([[0, 1, 2]]))
        assert a.content_hash() == b.content_hash()
        assert a.content_hash() != c.content_hash()


class TestVertexAreas:
    def test_equilateral_triangle_thirds(self):
        areas = vertex_areas(Mesh(EQUILATERAL, np.array([[0, 1, 2]])))
        np.testing.assert_allclose(areas, SQRT3 / 12, rtol=1e-12)

    def test_obtuse_triangle_fallback(self):
        mesh = Mesh(np.array([[0.0, 0.0, 0.0], [4.0, 0.0, 0.0], [2.0, 0.5, 0.0]]), np.array([[0, 1, 2]]))
        np.testing.assert_allclose(vertex_areas(mesh), [0.25, 0.25, 0.5], rtol=1e-12)

    @pytest.mark.parametrize("subdivisions", [0, 1, 2])
    def test_areas_sum_to_surface_area(self, subdivisions):
        mesh = icosphere(subdivisions)
        assert vertex_areas(mesh).sum() == pytest.approx(mesh.total_area(), rel=1e-9)

    def test_refinement_preserves_total(self, small_torus):
        refined = subdivide(small_torus)
        assert vertex_areas(refined).sum() == pytest.approx(refined.total_area(), rel=1e-9)
        assert refined.total_area() == pytest.approx(small_torus.total_area(), rel=1e-12)

    def test_degenerate_triangle_contributes_nothing(self, collinear_strip):
        np.testing.assert_array_equal(vertex_areas(collinear_strip), 0.0)


class TestCotangentWeights:
    def test_shared_edge_averages_two_cotangents(self):
        weights = cotangent_weights(_diamond())
        assert weights[0, 1] == pytest.approx(1 / SQRT3, rel=1e-12)

    def test_boundary_edge_keeps_half_cotangent(self):
        weights = cotangent_weights(_diamond())
        assert weights[1, 2] == pytest.approx(1 / (2 * SQRT3), rel=1e-12)

    def test_symmetric_with_zero_diagonal(self, sphere42):
        weights = cotangent_weights(sphere42)
        assert (weights != weights.T).nnz == 0
        np.testing.assert_array_equal(weights.diagonal(), 0.0)
