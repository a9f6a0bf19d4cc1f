import json
import math

import numpy as np
import pytest

from tammes import cases, geom
from tammes.cases import A13, D13, HALF_PI


class TestSolveDelta13:
    def test_published_degree_values(self):
        a, d = cases.solve_delta13()
        assert abs(math.degrees(a) - 69.4051) < 1e-3
        assert abs(math.degrees(d) - 57.1367) < 1e-3

    def test_defining_equations_hold(self):
        a, d = cases.solve_delta13()
        lhs = 2.0 * math.tan(3.0 * math.pi / 8.0 - a / 4.0)
        rhs = (1.0 - 2.0 * math.cos(a)) / math.cos(a) ** 2
        assert abs(lhs - rhs) < 1e-10
        assert abs(math.cos(d) - math.cos(a) / (1.0 - math.cos(a))) < 1e-12

    def test_a_is_alpha_of_d(self):
        a, d = cases.solve_delta13()
        assert abs(geom.alpha(d) - a) < 1e-10


class TestAngleChain:
    def test_closure_at_optimum(self):
        assert abs(cases.closure_residual(HALF_PI, HALF_PI, D13)) < 1e-9
        assert abs(cases.corner_defect(HALF_PI, HALF_PI, D13)) < 1e-9

    def test_all_vertex_sums_close_at_optimum(self):
        ch = cases.angle_chain(HALF_PI, HALF_PI, D13)
        table = cases.corner_table(ch)
        sums = {}
        for (face, v), ang in table.items():
            sums[v] = sums.get(v, 0.0) + ang
        for v in range(13):
            assert abs(sums[v] - 2.0 * math.pi) < 1e-9, f"vertex {v}"

    def test_attribute_and_index_access_agree(self):
        ch = cases.angle_chain(HALF_PI, HALF_PI, D13)
        assert ch.u0 == ch[0]
        assert ch.u18 == ch[18]
        assert abs(ch.u0 - geom.alpha(D13)) < 1e-15

    def test_symmetric_input_symmetric_chain(self):
        ch = cases.angle_chain(1.52, 1.52, 1.0)
        assert abs(ch[5] - ch[6]) < 1e-12

    def test_mirror_reversal_identities(self):
        # the mirror of the layout reverses the chain: running it from
        # (u4, u3) reproduces the partner angles of the original
        a = cases.angle_chain(1.50, 1.62, D13)
        b = cases.angle_chain(a[4], a[3], D13)
        assert abs(b[5] - a[8]) < 1e-12
        assert abs(b[6] - a[7]) < 1e-12
        assert abs(b[9] - a[11]) < 1e-12
        assert abs(b[13] - a[15]) < 1e-12

    def test_mirror_fixes_the_optimum(self):
        ch = cases.angle_chain(HALF_PI, HALF_PI, D13)
        for i, j in ((1, 4), (2, 3), (5, 8), (6, 7), (9, 11), (13, 15)):
            assert abs(ch[i] - ch[j]) < 1e-9

    def test_perturbation_moves_residual_quadratically(self):
        # the optimum is a critical point of the residual along u1: both
        # perturbation directions push the residual the same way, with
        # clean second-order scaling
        eps = 1e-5
        r0 = cases.closure_residual(HALF_PI, HALF_PI, D13)
        up = cases.closure_residual(HALF_PI + eps, HALF_PI, D13) - r0
        dn = cases.closure_residual(HALF_PI - eps, HALF_PI, D13) - r0
        assert up != 0.0 and dn != 0.0
        assert up * dn > 0.0
        assert abs(up - dn) < 1e-3 * abs(up)
        wide = cases.closure_residual(HALF_PI + 2 * eps, HALF_PI, D13) - r0
        assert abs(wide - 4.0 * up) < 0.02 * abs(wide)

    def test_residual_monotone_in_d_near_optimum(self):
        ds = np.linspace(0.98, 1.01, 12)
        vals = [cases.closure_residual(HALF_PI, HALF_PI, d) for d in ds]
        assert all(b > a for a, b in zip(vals, vals[1:]))

    def test_domain_error_names_first_failing_angle(self):
        with pytest.raises(cases.ChainDomainError) as e:
            cases.angle_chain(0.3, 0.3, D13)
        assert e.value.name == "u4"

    def test_vectorized_chain_matches_scalar(self):
        rng = np.random.default_rng(7)
        u1 = HALF_PI + rng.uniform(-0.2, 0.2, 40)
        u2 = HALF_PI + rng.uniform(-0.2, 0.2, 40)
        d = rng.uniform(0.97, 1.02, 40)
        u, ok = cases._chain_arrays(u1, u2, d)
        for k in range(40):
            try:
                ch = cases.angle_chain(u1[k], u2[k], d[k])
            except cases.ChainDomainError:
                assert not ok[k]
                continue
            assert ok[k]
            for i in range(19):
                assert abs(u[i][k] - ch[i]) < 1e-12


class TestCase1:
    def test_u18_at_optimum_is_a13(self):
        assert abs(cases.case1_u18(D13) - A13) < 1e-8

    def test_u18_decreasing_on_coarse_grid(self):
        ds = np.linspace(cases.D_LO, cases.D_HI, 16)
        vals = [cases.case1_u18(d) for d in ds]
        assert all(b < a for a, b in zip(vals, vals[1:]))

    def test_u18_above_a13_only_below_optimum(self):
        assert cases.case1_u18(D13 - 1.5e-5) > A13
        assert cases.case1_u18(D13 + 1.5e-5) < A13

    def test_crossing_is_the_optimum(self):
        v = cases.case1_analysis(step=2e-3)
        assert v.conclusion == "eliminated"
        assert v.evidence["monotone_decreasing"]
        assert v.evidence["distance_to_d13"] < 1e-4

    def test_out_of_window_rejected(self):
        with pytest.raises(ValueError):
            cases.case1_u18(1.2)


class TestCase2:
    def test_scan_collapses_to_right_angles(self):
        v = cases.case2_region_scan(0.01)
        assert v.conclusion == "optimal"
        assert v.evidence["contains_right_angle_point"]
        assert v.evidence["diameter"] <= 3 * 0.01
        assert abs(v.evidence["d_at_center"] - D13) < 1e-9

    def test_membership_requires_tight_corners(self):
        # a point well away from 90 deg solves the closure but fails D1
        d, ok = cases._solve_closure_d(np.array(HALF_PI + 0.1), np.array(HALF_PI - 0.05))
        assert bool(ok)
        u, valid = cases._chain_arrays(np.array(HALF_PI + 0.1), np.array(HALF_PI - 0.05), d)
        assert bool(valid)
        assert not (u[17] >= u[0] - 1e-9 and u[18] >= u[0] - 1e-9)


class TestCase3:
    def test_u19_at_optimum_is_a13(self):
        assert abs(cases.case3_u19(D13) - A13) < 1e-8

    def test_u19_decreasing_on_coarse_grid(self):
        ds = np.linspace(cases.D_LO, cases.D_HI, 10)
        vals = [cases.case3_u19(d) for d in ds]
        assert all(b < a for a, b in zip(vals, vals[1:]))

    def test_u19_below_a13_above_optimum(self):
        assert cases.case3_u19(D13 + 2e-4) < A13

    def test_frame_reproduces_configuration_at_optimum(self):
        pos = cases._case3_frame(HALF_PI, D13)
        P = cases.build_P13()
        for v, p in pos.items():
            assert geom.angular_dist(p, P[v]) < 1e-9
        x = cases._place_free_vertex(pos, D13)
        assert geom.angular_dist(x, P[cases.FREE_VERTEX]) < 1e-8


@pytest.fixture(scope="module")
def points():
    return np.array(cases.build_P13())


class TestBuildP13:
    def test_unit_norms(self, points):
        assert np.allclose(np.linalg.norm(points, axis=1), 1.0, atol=1e-12)

    def test_min_distance_is_optimal(self, points):
        D = np.arccos(np.clip(points @ points.T, -1, 1))
        iu = np.triu_indices(13, 1)
        assert abs(D[iu].min() - D13) < 1e-9

    def test_contact_count_matches_layout_edges(self, points):
        D = np.arccos(np.clip(points @ points.T, -1, 1))
        iu = np.triu_indices(13, 1)
        n_min = int(np.sum(np.abs(D[iu] - D13) < 1e-9))
        edges = set()
        for cyc in cases.FACES13.values():
            m = len(cyc)
            for k in range(m):
                a, b = cyc[k], cyc[(k + 1) % m]
                edges.add((min(a, b), max(a, b)))
        assert n_min == len(edges) == 24

    def test_mirror_isometry_exists(self, points):
        sigma = {0: 7, 7: 0, 1: 3, 3: 1, 5: 10, 10: 5, 6: 11, 11: 6,
                 2: 2, 4: 4, 8: 8, 9: 9, 12: 12}
        target = np.array([points[sigma[i]] for i in range(13)])
        c = target.T @ points
        uu, _, vt = np.linalg.svd(c)
        m = uu @ vt
        assert np.max(np.abs(points @ m.T - target)) < 1e-9


class TestExports:
    def test_coordinates_text_shape_and_precision(self):
        txt = cases.coordinates_text(cases.build_P13())
        rows = txt.strip().split("\n")
        assert len(rows) == 13
        back = np.array([[float(x) for x in r.split()] for r in rows])
        assert np.allclose(np.linalg.norm(back, axis=1), 1.0, atol=1e-14)

    def test_spherical_text(self):
        txt = cases.spherical_text(cases.build_P13())
        rows = [r.split() for r in txt.strip().split("\n")]
        assert len(rows) == 13
        for lat, lon in rows:
            assert -90.0 <= float(lat) <= 90.0
            assert -180.0 <= float(lon) <= 180.0

    def test_verdict_json_round_trip(self):
        v = cases.CaseVerdict("x", "eliminated", {"k": [1.0, 2.0]})
        data = json.loads(v.to_json())
        assert data["case"] == "x" and data["evidence"]["k"] == [1.0, 2.0]

    def test_u18_curve_decreasing(self):
        rows = cases.u18_curve(n=9)
        assert len(rows) == 9
        assert all(b[1] < a[1] for a, b in zip(rows, rows[1:]))
