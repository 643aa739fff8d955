import math
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cflcolor.wireless import (
    DEFAULT_POWERS,
    DbmConfig,
    ExponentPathLoss,
    Node,
    ThreeGppIndoor,
    XyzFormatError,
    build_interference_graph,
    coverage_radius,
    generate_dbm,
    ingest_xyz,
    parse_xyz,
    path_loss_db,
    synthetic_ap_layout,
    write_xyz,
)

TGPP = ThreeGppIndoor(2.412)


def _tgpp_oracle(d, f=2.412):
    # written out independently of the model's slope/intercept split
    return 43.3 * math.log10(d) + 11.5 + 20 * math.log10(f)


@pytest.mark.parametrize("d", [1.0, 10.0, 0.5, 37.0])
def test_tgpp_loss_matches_formula(d):
    assert path_loss_db(TGPP, d) == pytest.approx(_tgpp_oracle(d), abs=1e-12)


def test_tgpp_loss_reference_points():
    # the rounded reference figures 62.449 / 19.149 are 0.0015 off the formula
    assert path_loss_db(TGPP, 10.0) == pytest.approx(62.44755, abs=1e-5)
    assert path_loss_db(TGPP, 1.0) == pytest.approx(19.14755, abs=1e-5)


def test_exponent_loss():
    assert path_loss_db(ExponentPathLoss(4.3), 10.0) == pytest.approx(43.0)
    assert path_loss_db(ExponentPathLoss(2.0), 1.0) == 0.0


def test_loss_rejects_nonpositive_distance():
    with pytest.raises(ValueError):
        path_loss_db(TGPP, 0.0)
    with pytest.raises(ValueError):
        path_loss_db(TGPP, np.array([1.0, -2.0]))


def test_model_validation():
    with pytest.raises(ValueError):
        ThreeGppIndoor(0.0)
    with pytest.raises(ValueError):
        ExponentPathLoss(-1.0)


def test_coverage_radius_examples():
    assert coverage_radius(TGPP, 20.0, -25.0) == pytest.approx(3.954, abs=0.01)
    # 43 log10 d = 63
    r = coverage_radius(ExponentPathLoss(4.3), 18.0, -45.0)
    assert r == pytest.approx(10 ** (63 / 43), rel=1e-12)
    assert r == pytest.approx(29.18, abs=0.05)


def test_coverage_radius_degenerate():
    assert coverage_radius(TGPP, -math.inf, -25.0) == 0.0
    assert coverage_radius(TGPP, 20.0, math.inf) == 0.0


@given(st.floats(-10, 40), st.floats(-90, -5), st.floats(1.5, 6.0))
def test_radius_loss_roundtrip(p, r, alpha):
    for model in (TGPP, ExponentPathLoss(alpha)):
        d = coverage_radius(model, p, r)
        assert abs(path_loss_db(model, d) - (p - r)) < 1e-6


@given(st.floats(1e-3, 1e3), st.floats(1e-3, 1e3))
def test_loss_monotone(d1, d2):
    lo, hi = sorted((d1, d2))
    assert path_loss_db(TGPP, lo) <= path_loss_db(TGPP, hi)


@given(st.floats(0, 30), st.floats(0, 30), st.floats(-80, -10))
def test_radius_monotone_in_power(p1, p2, r):
    lo, hi = sorted((p1, p2))
    assert coverage_radius(TGPP, lo, r) <= coverage_radius(TGPP, hi, r)


@pytest.mark.parametrize("seed", range(15))
def test_dbm_structural_law(seed):
    cfg = DbmConfig(intensity=0.5, area_side=10.0, detection_threshold=-25.0, seed=seed)
    g, s, nodes = generate_dbm(cfg)
    n = len(nodes)
    assert g.n_vertices == s.n_vertices == n
    for y in range(n):
        ry = coverage_radius(cfg.model, nodes[y].tx_power, cfg.detection_threshold)
        for z in range(n):
            if y == z:
                continue
            dist = math.hypot(nodes[y].x - nodes[z].x, nodes[y].y - nodes[z].y)
            assert ((y, z) in s.edges) == (dist <= ry)
    assert s.edges <= g.edges
    assert g == s.symmetric_closure()
    assert all(nd.tx_power in DEFAULT_POWERS for nd in nodes)
    assert all(0 <= nd.x <= 10 and 0 <= nd.y <= 10 for nd in nodes)


def test_dbm_zero_radius_edgeless():
    cfg = DbmConfig(detection_threshold=100.0, seed=3)
    g, s, nodes = generate_dbm(cfg)
    assert len(nodes) > 0
    assert not g.edges and not s.edges


def test_dbm_seeded_reproducible():
    a = generate_dbm(DbmConfig(seed=42))
    b = generate_dbm(DbmConfig(seed=42))
    assert a[0] == b[0] and a[1] == b[1] and a[2] == b[2]


def test_poisson_count_mean():
    cfg = DbmConfig(intensity=0.5, area_side=10.0, detection_threshold=100.0)
    rng = np.random.default_rng(2024)
    counts = [len(generate_dbm(cfg, rng)[2]) for _ in range(10_000)]
    assert abs(np.mean(counts) - 50.0) <= 1.5


def test_dbm_config_validation():
    with pytest.raises(ValueError):
        DbmConfig(intensity=0.0)
    with pytest.raises(ValueError):
        DbmConfig(power_set=())


def test_interference_one_meter_pair():
    # 18 - 19.148 = -1.148 >= -45
    nodes = [Node(0, 0, 18, -45), Node(1, 0, 18, -45)]
    g, s = build_interference_graph(nodes, TGPP)
    assert s.edges == {(0, 1), (1, 0)}
    assert g.edges == {(0, 1), (1, 0)}


def test_interference_asymmetric_powers():
    model = ExponentPathLoss(4.3)
    d = 20.0  # 43 log10 20 = 55.95 dB
    nodes = [Node(0, 0, 20, -45), Node(d, 0, 5, -45)]
    g, s = build_interference_graph(nodes, model)
    # 20 - 55.95 >= -45 but 5 - 55.95 < -45
    assert s.edges == {(0, 1)}
    assert g.edges == {(0, 1), (1, 0)}
    _, st_ = build_interference_graph(nodes, model, mode="tdma")
    assert st_.edges == {(1, 0)}


def test_interference_far_apart_empty():
    nodes = [Node(0, 0, 20, -45), Node(1000, 0, 20, -45)]
    g, s = build_interference_graph(nodes, ExponentPathLoss(4.3))
    assert not g.edges and not s.edges


def test_interference_coincident_warns():
    nodes = [Node(1, 1, 12, 50), Node(1, 1, 12, 50)]
    with pytest.warns(RuntimeWarning):
        g, s = build_interference_graph(nodes, TGPP)
    assert s.edges == {(0, 1), (1, 0)}


def test_interference_bad_mode_and_empty():
    with pytest.raises(ValueError):
        build_interference_graph([Node(0, 0, 1, 1)], TGPP, mode="fdma")
    g, s = build_interference_graph([], TGPP)
    assert g.n_vertices == 0


def test_interference_matches_pairwise_rule():
    rng = np.random.default_rng(8)
    model = ExponentPathLoss(3.5)
    pts = synthetic_ap_layout(30, 80.0, rng)
    nodes = [Node(x, y, float(rng.choice(DEFAULT_POWERS)), float(rng.uniform(-60, -30)), z) for x, y, z in pts]
    _, s = build_interference_graph(nodes, model)
    for j, nj in enumerate(nodes):
        for i, ni in enumerate(nodes):
            if i != j:
                d = math.hypot(nj.x - ni.x, nj.y - ni.y)
                assert ((j, i) in s.edges) == (nj.tx_power - 35 * math.log10(d) >= ni.threshold)


def test_parse_xyz_triangle(tmp_path):
    p = tmp_path / "aps.xyz"
    p.write_text("0 0 0\n3 4 0\n")
    nodes = ingest_xyz(p, rng=0)
    assert len(nodes) == 2
    assert math.hypot(nodes[1].x - nodes[0].x, nodes[1].y - nodes[0].y) == 5.0
    assert all(nd.tx_power in DEFAULT_POWERS and nd.threshold == -45.0 for nd in nodes)


def test_parse_xyz_81_rows(tmp_path):
    p = tmp_path / "layout.xyz"
    write_xyz(p, synthetic_ap_layout(81, rng=1))
    assert len(ingest_xyz(p, rng=2)) == 81


def test_parse_xyz_comments_and_blank():
    assert parse_xyz("# header\n\n1 2 3  # trailing\n   \n4,5,6\n") == [(1.0, 2.0, 3.0), (4.0, 5.0, 6.0)]
    assert parse_xyz("") == []


@pytest.mark.parametrize("text, line", [("0 0 0\n1 2\n", 2), ("# c\n\n1 x 2\n", 3)])
def test_parse_xyz_errors_report_line(text, line):
    with pytest.raises(XyzFormatError, match=f"line {line}"):
        parse_xyz(text)


def test_xyz_z_kept_as_metadata(tmp_path):
    p = tmp_path / "z.xyz"
    p.write_text("0 0 7\n0 1 -3\n")
    nodes = ingest_xyz(p, rng=0)
    assert [nd.z for nd in nodes] == [7.0, -3.0]
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        _, s = build_interference_graph(nodes, ExponentPathLoss(4.3))
    # planar distance 1 m; the z offset is ignored
    assert s.edges == {(0, 1), (1, 0)}


def test_synthetic_layout_shape():
    pts = synthetic_ap_layout(81, 150.0, np.random.default_rng(0))
    assert pts.shape == (81, 3)
    assert pts[:, :2].min() >= 0 and pts[:, :2].max() <= 150.0
    assert np.all(pts[:, 2] == 0)
