import csv
import json

import numpy as np
import pytest

from intsing.bifurcation import (
    BifurcationDiagram,
    RankCertificationError,
    RefineDivergence,
    ScanParams,
    SingularSeed,
    TraceError,
    TraceParams,
    export_diagram,
    refine_singular_point,
    scan_singular_points,
    seed_arcs_near_vertex,
    trace_diagram,
)
from intsing.canonical import CanonicalSpec, build_canonical, randomized_disguise
from intsing.classify import rank_at
from intsing.kovalevskaya import build_kovalevskaya, involution_fixed_points

KOV_BOX = [(-1.2, 1.2)] * 3 + [(-4.0, 4.0)] * 3


def test_scan_two_elliptic_has_single_rank0_seed():
    m = build_canonical(CanonicalSpec(0, 2, 0, 0))
    seeds = scan_singular_points(m, [(-1, 1)] * 4, resolution=7)
    rank0 = [s for s in seeds if s.rank == 0]
    assert len(rank0) == 1
    assert np.linalg.norm(rank0[0].point) <= 1e-9


def test_scan_finds_rank1_family_on_axis():
    m = build_canonical(CanonicalSpec(1, 0, 1, 0))
    seeds = scan_singular_points(m, [(-1, 1)] * 4, resolution=7)
    rank1 = [s for s in seeds if s.rank == 1]
    assert rank1
    for s in rank1:
        # family is {x = y = 0}
        assert abs(s.point[2]) <= 1e-9 and abs(s.point[3]) <= 1e-9


def test_scan_kovalevskaya_includes_fixed_points():
    m = build_kovalevskaya(0.5)
    seeds = scan_singular_points(m, KOV_BOX, resolution=7)
    for target in involution_fixed_points(0.5, certify=False):
        dist = min(np.linalg.norm(s.point - target) for s in seeds)
        assert dist <= 1e-8


def test_scan_finds_tilted_equilibria_at_large_g():
    # for g^2 > 2 the leaf carries an involution-related pair of rank-0
    # points beyond the two fixed points: tilted uniform rotations, with
    # K = 0 exactly (both squares in K vanish along R parallel to dH/dS)
    g = 1.6
    m = build_kovalevskaya(g)
    seeds = scan_singular_points(m, KOV_BOX, resolution=5)
    rank0 = [s for s in seeds if s.rank == 0]
    fixed = involution_fixed_points(g, certify=False)
    tilted = [
        s for s in rank0 if all(np.linalg.norm(s.point - f) > 1e-3 for f in fixed)
    ]
    assert len(tilted) == 2
    a, b = tilted
    flip = np.array([1, -1, -1, 1, -1, -1], dtype=float)
    assert np.linalg.norm(a.point * flip - b.point) <= 1e-6  # involution pair
    for s in tilted:
        assert abs(s.value[1]) <= 1e-9  # on the K = 0 axis
        w = np.array([s.point[3], s.point[4], 2 * s.point[5]])
        r = s.point[:3]
        assert np.linalg.norm(np.cross(r, w)) <= 1e-8  # R parallel to dH/dS


def test_scan_seeds_satisfy_rank_condition():
    m = build_kovalevskaya(0.5)
    seeds = scan_singular_points(m, KOV_BOX, resolution=6)
    assert seeds
    for s in seeds[:12]:
        assert rank_at(m, s.point) == s.rank
        assert s.rank < m.n


def test_refine_perturbed_origin():
    m = build_canonical(CanonicalSpec(0, 1, 1, 0))
    p = refine_singular_point(m, np.full(4, 1e-3), 0)
    assert np.abs(p).max() <= 1e-11


def test_refine_kovalevskaya_fixed_point():
    g = 0.5
    m = build_kovalevskaya(g)
    seed = np.array([0.9, 0.05, -0.02, 0.45, 0.03, 0.01])
    p = refine_singular_point(m, seed, 0)
    assert np.linalg.norm(p - [1, 0, 0, g, 0, 0]) <= 1e-9


def test_refine_divergence_when_no_solution():
    m = build_canonical(CanonicalSpec(1, 0, 1, 0))  # d(lam) never vanishes
    with pytest.raises(TraceError):
        refine_singular_point(m, np.array([0.3, 0.2, 0.4, 0.1]), 0)


def test_refine_divergence_for_regular_model():
    from intsing.expr import parse
    from intsing.phasespace import IntegrableModel, PoissonStructure

    st = PoissonStructure.canonical_chart([("x", "y")])
    m = IntegrableModel(st, [parse("x", ("x", "y")), parse("y", ("x", "y"))])
    with pytest.raises(TraceError):
        refine_singular_point(m, np.array([0.2, 0.4]), 1)


def test_trace_hyperbolic_line():
    m = build_canonical(CanonicalSpec(1, 0, 1, 0))
    seeds = scan_singular_points(m, [(-1, 1)] * 4, resolution=5)
    d = trace_diagram(m, seeds, TraceParams(step=0.1, max_steps=60, value_box=(-1.5, 1.5)))
    assert len(d.arcs) == 1
    arc = d.arcs[0]
    assert arc.label == "hyperbolic-family"
    vals = np.array(arc.values)
    assert np.abs(vals[:, 1]).max() <= 1e-9
    assert vals[:, 0].min() < -1.0 and vals[:, 0].max() > 1.0


def test_trace_elliptic_ray_on_image_boundary():
    m = build_canonical(CanonicalSpec(1, 1, 0, 0))
    seeds = scan_singular_points(m, [(-1, 1)] * 4, resolution=5)
    d = trace_diagram(m, seeds, TraceParams(step=0.1, max_steps=60, value_box=(-1.5, 1.5)))
    assert len(d.arcs) == 1
    assert d.arcs[0].label == "elliptic-family"
    vals = np.array(d.arcs[0].values)
    assert np.abs(vals[:, 1]).max() <= 1e-9  # h2 = 0 on the ray
    # h2 >= 0 on the momentum image: sampled regular points stay above
    rng = np.random.default_rng(0)
    samples = rng.uniform(-1, 1, size=(200, 4))
    h2 = np.array([m.components[1].evaluate(p) for p in samples])
    assert h2.min() >= 0.0


def test_arc_labels_cross_check_reduced_type():
    # independent oracle: a 2x2 Hamiltonian block is elliptic iff the
    # determinant of the reduced operator is positive (eigenvalues +-i*b),
    # hyperbolic iff negative (+-a)
    from intsing.classify import reduce_at

    m = build_kovalevskaya(0.5)
    seeds = scan_singular_points(m, KOV_BOX, resolution=6)
    d = trace_diagram(
        m, seeds, TraceParams(step=0.12, max_steps=80, value_box=(-6, 8), phase_bound=12.0)
    )
    checked = 0
    for arc in d.arcs:
        if arc.label == "mixed/unknown":
            continue
        mid = arc.phase_samples[len(arc.phase_samples) // 2]
        L = reduce_at(m, mid)
        w = williamson_type_for(L)
        det = float(np.linalg.det(sum(c * M for c, M in zip(w.coefficients, L.matrices))))
        if arc.label == "elliptic-family":
            assert w.triple == (1, 0, 0) and det > 0
        else:
            assert w.triple == (0, 1, 0) and det < 0
        checked += 1
    assert checked >= 2


def williamson_type_for(L):
    from intsing.classify import williamson_type

    w = williamson_type(L)
    assert hasattr(w, "triple")
    return w


def test_arc_points_have_corank_one():
    m = build_kovalevskaya(0.5)
    fp, _ = involution_fixed_points(0.5, certify=False)
    seeds = seed_arcs_near_vertex(m, fp, delta=1e-2)
    d = trace_diagram(m, seeds[:2], TraceParams(step=0.1, max_steps=40, value_box=(-6, 8), phase_bound=12.0))
    assert d.arcs
    for arc in d.arcs:
        picks = np.linspace(1, len(arc.phase_samples) - 2, 4, dtype=int)
        for i in picks:
            assert rank_at(m, arc.phase_samples[i]) == 1


def test_diagram_vertices_are_rank0():
    m = build_kovalevskaya(0.5)
    seeds = scan_singular_points(m, KOV_BOX, resolution=6)
    d = trace_diagram(m, seeds, TraceParams(step=0.12, max_steps=60, value_box=(-6, 8), phase_bound=12.0))
    for v in d.vertices:
        assert rank_at(m, v.point) == 0


def test_diagram_invariant_under_symplectic_disguise():
    spec = CanonicalSpec(1, 0, 1, 0)
    m = build_canonical(spec)
    params = TraceParams(step=0.1, max_steps=60, value_box=(-1.2, 1.2))
    seeds = scan_singular_points(m, [(-1, 1)] * 4, resolution=5)
    base = trace_diagram(m, seeds, params)

    dres = randomized_disguise(m, seed=4, mix_components=False, translate_regular=False, shears=3)
    box = [(-1.5, 1.5)] * 4
    seeds2 = scan_singular_points(dres.model, box, resolution=5)
    other = trace_diagram(dres.model, seeds2, params)

    a = base.all_arc_values()
    b = other.all_arc_values()
    assert len(a) and len(b)
    # same value set within a continuation step
    for v in b[:: max(1, len(b) // 25)]:
        assert np.min(np.linalg.norm(a - v, axis=1)) <= 0.15


def test_export_empty_diagram_svg(tmp_path):
    d = BifurcationDiagram([], [], [])
    path = tmp_path / "empty.svg"
    export_diagram(d, "svg", str(path))
    text = path.read_text()
    assert text.startswith("<svg") and text.rstrip().endswith("</svg>")
    assert "<polyline" not in text


def test_export_single_arc_svg_and_csv(tmp_path):
    m = build_canonical(CanonicalSpec(1, 0, 1, 0))
    seeds = scan_singular_points(m, [(-1, 1)] * 4, resolution=5)
    d = trace_diagram(m, seeds, TraceParams(step=0.1, max_steps=40, value_box=(-1.2, 1.2)))

    svg = tmp_path / "one.svg"
    export_diagram(d, "svg", str(svg))
    assert svg.read_text().count("<polyline") == 1

    csv_path = tmp_path / "one.csv"
    export_diagram(d, "csv", str(csv_path))
    with open(csv_path) as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["arc_id", "h", "k"]
    assert len(rows) == 1 + sum(len(a.values) for a in d.arcs)

    json_path = tmp_path / "one.json"
    export_diagram(d, "json", str(json_path))
    data = json.loads(json_path.read_text())
    assert set(data) == {"arcs", "vertices", "cusp_candidates"}
    assert data["arcs"][0]["label"] == "hyperbolic-family"


def test_export_kovalevskaya_g0_vertices(tmp_path):
    from intsing.kovalevskaya import kovalevskaya_diagram

    d = kovalevskaya_diagram(
        0.0,
        resolution=5,
        trace_params=TraceParams(step=0.12, max_steps=80, value_box=(-6, 8), phase_bound=12.0),
    )
    path = tmp_path / "kov0.json"
    export_diagram(d, "json", str(path))
    data = json.loads(path.read_text())
    vertex_vals = [tuple(np.round(v["value"], 6)) for v in data["vertices"]]
    assert (1.0, 1.0) in vertex_vals
    assert (-1.0, 1.0) in vertex_vals


def test_unknown_export_format():
    with pytest.raises(ValueError, match="unknown format"):
        export_diagram(BifurcationDiagram([], [], []), "pdf", "/tmp/x.pdf")
