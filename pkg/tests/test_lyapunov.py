import dataclasses
import math

import numpy as np
import pytest

import accelcert as ac
from accelcert import lyapunov as ly
from accelcert.errors import ParameterError


S, R = 0.4, 2.0


@pytest.fixture(scope="module")
def nag_trace(quad2d):
    params = ac.RunParams(algo="nag", step=S, iters=200, momentum_r=R)
    return ac.run(quad2d[0], params, [1.0, 1.0], problem_id="quad2d")


@pytest.fixture(scope="module")
def mnag_trace(quad2d):
    params = ac.RunParams(algo="m-nag", step=S, iters=200, momentum_r=R)
    return ac.run(quad2d[0], params, [1.0, 1.0], problem_id="quad2d")


@pytest.fixture(scope="module")
def stationary_trace(quad2d):
    oracle, optimum = quad2d
    params = ac.RunParams(algo="nag", step=S, iters=20, momentum_r=R)
    return ac.run(oracle, params, optimum.x_star)


def test_seq_r_at_start(nag_trace):
    # v0 = 0 kills the velocity term, leaving r*x0.
    assert ac.seq_R(nag_trace, 0, S, R) == pytest.approx([2.0, 2.0], rel=1e-15)


def test_seq_r_at_k1(nag_trace):
    # (k-1) = 0 at k = 1, so R1 = r*x1 = 2*(0.996, 0.2).
    assert ac.seq_R(nag_trace, 1, S, R) == pytest.approx([1.992, 0.4], rel=1e-14)


def test_seq_s_hand_value(nag_trace):
    # S0 = R0 - (0+r)*s*grad f(y0) = (2,2) - 0.8*(0.01, 2).
    assert ac.seq_S(nag_trace, 0, S, R) == pytest.approx([1.992, 0.4], rel=1e-14)


def test_seq_t_hand_value(nag_trace):
    # T0 = 2*y0 - 0*x0 - 0.8*grad f(y0), same vector as S0.
    assert ac.seq_T(nag_trace, 0, S, R) == pytest.approx([1.992, 0.4], rel=1e-14)


def test_sequences_on_stationary_trace(stationary_trace):
    for k in (0, 3, 20):
        assert np.all(ac.seq_R(stationary_trace, k, S, R) == 0.0)
        assert np.all(ac.seq_S(stationary_trace, k, S, R) == 0.0)
        assert np.all(ac.seq_T(stationary_trace, k, S, R) == 0.0)


def test_s_equals_t_along_nag_trace(nag_trace):
    for k in range(len(nag_trace.records)):
        s_vec = ac.seq_S(nag_trace, k, S, R)
        t_vec = ac.seq_T(nag_trace, k, S, R)
        assert np.linalg.norm(s_vec - t_vec) <= 1e-10 * (1.0 + np.linalg.norm(s_vec))


def test_mnag_t_matches_s_with_relation_velocity(mnag_trace):
    # On a monotone trace the stored v does not satisfy the position-velocity
    # relation, but substituting the velocity that does reproduces T_k.
    k = 5
    rec = mnag_trace.records[k]
    v_hat = (rec.y - rec.x) * (k + R) / ((k - 1.0) * math.sqrt(S))
    s_vec = (k - 1.0) * math.sqrt(S) * v_hat + R * rec.x - (k + R) * S * rec.first_order_at_y
    t_vec = ac.seq_T(mnag_trace, k, S, R)
    assert np.linalg.norm(s_vec - t_vec) <= 1e-10 * (1.0 + np.linalg.norm(t_vec))


def test_sequence_range_check(nag_trace):
    with pytest.raises(IndexError):
        ac.seq_R(nag_trace, len(nag_trace.records), S, R)


def test_sample_sequence_tags_vectors(nag_trace):
    sample = ac.sample_sequence(nag_trace, "S", 0, S, R)
    assert sample.kind == "S" and sample.k == 0
    assert np.array_equal(sample.value, ac.seq_S(nag_trace, 0, S, R))
    with pytest.raises(ParameterError):
        ac.sample_sequence(nag_trace, "Q", 0, S, R)


def test_energy_hand_values_at_zero(nag_trace, quad2d):
    breakdown = ac.energy(nag_trace, 0, S, R, quad2d[1], "velocity")
    assert breakdown.tau == pytest.approx(3.0)
    assert breakdown.potential == pytest.approx(0.053952096, rel=1e-12)
    assert breakdown.mixed == pytest.approx(2.064032, rel=1e-12)
    assert breakdown.total == pytest.approx(0.053952096 + 2.064032, rel=1e-12)


def test_energy_zero_on_stationary_trace(stationary_trace, quad2d):
    for k in range(10):
        assert ac.energy(stationary_trace, k, S, R, quad2d[1], "velocity").total == 0.0


def test_energy_forms_agree_on_nag(nag_trace, quad2d):
    for k in range(len(nag_trace.records) - 1):
        velocity = ac.energy(nag_trace, k, S, R, quad2d[1], "velocity").total
        xy = ac.energy(nag_trace, k, S, R, quad2d[1], "xy").total
        assert abs(velocity - xy) <= 1e-10 * (1.0 + abs(velocity))


def test_energy_nonnegative_on_analytic_traces(nag_trace, mnag_trace, quad2d):
    for trace, form in ((nag_trace, "velocity"), (mnag_trace, "xy")):
        for k in range(len(trace.records) - 1):
            assert ac.energy(trace, k, S, R, quad2d[1], form).total >= -1e-12


def test_energy_nearly_nonnegative_with_reference_optimum(lasso5):
    # A reference-run phi* can sit a few ulps above late iterates, and the
    # growing tau(k) amplifies that; the slack matches the reference-run
    # certification tolerance.
    problem, optimum = lasso5
    s = 0.9 / problem.smooth.lipschitz
    params = ac.RunParams(algo="fista", step=s, iters=300, momentum_r=R)
    trace = ac.run(problem, params, np.ones(5))
    for k in range(300):
        assert ac.energy(trace, k, s, R, optimum, "velocity").total >= -1e-9


def test_energy_velocity_form_rejected_for_monotone(mnag_trace, quad2d):
    with pytest.raises(ParameterError):
        ac.energy(mnag_trace, 0, S, R, quad2d[1], "velocity")


def test_energy_argument_errors(nag_trace, quad2d):
    with pytest.raises(IndexError):
        ac.energy(nag_trace, len(nag_trace.records) - 1, S, R, quad2d[1], "xy")
    with pytest.raises(ParameterError):
        ac.energy(nag_trace, 0, S, R, None, "xy")
    with pytest.raises(ParameterError):
        ac.energy(nag_trace, 0, S, R, quad2d[1], "kinetic")


@pytest.mark.parametrize("r,expected", [(2.0, 0), (3.0, 1), (4.0, 3)])
def test_threshold_values(r, expected):
    assert ac.threshold_K(r) == expected


def test_threshold_rejects_small_r():
    with pytest.raises(ParameterError):
        ac.threshold_K(1.9)


def test_theorem_bound_hand_value(nag_trace, quad2d):
    oracle, optimum = quad2d
    x1 = nag_trace.records[1].x
    f1_gap = nag_trace.records[1].f_or_phi_at_x
    dist_sq = float(np.dot(x1, x1))
    # Independent arithmetic: numerator 3*0.04496008 + 8*1.032016,
    # denominator 1*3*(1 + 0.2*0.004/4) at k = 1.
    assert f1_gap == pytest.approx(0.04496008, rel=1e-12)
    assert dist_sq == pytest.approx(1.032016, rel=1e-12)
    expected = (3.0 * 0.04496008 + 8.0 * 1.032016) / (3.0 * 1.0002)
    got = ac.theorem_bound(1, R, S, oracle.mu, oracle.lipschitz, f1_gap, dist_sq)
    assert got == pytest.approx(expected, rel=1e-12)
    assert got == pytest.approx(8.39100824 / 3.0006, rel=1e-12)


def test_theorem_bound_limit_structure():
    # As L*s -> 1 the contraction factor collapses to 1 and only the
    # 1/(k(k+r)) decay remains.
    assert ly.rate_factor(0.5, 1.0 - 1e-13, 1.0) == pytest.approx(1.0, abs=1e-12)
    b1 = ac.theorem_bound(10, 2.0, 1.0 - 1e-13, 0.5, 1.0, 1.0, 1.0)
    assert b1 == pytest.approx((3.0 + 4.0) / (10.0 * 12.0), rel=1e-9)


def test_theorem_bound_zero_numerator():
    for k in (1, 5, 100):
        assert ac.theorem_bound(k, R, S, 0.01, 2.0, 0.0, 0.0) == 0.0


def test_theorem_bound_rejects_k_zero():
    with pytest.raises(ParameterError):
        ac.theorem_bound(0, R, S, 0.01, 2.0, 1.0, 1.0)


def test_bound_strictly_decays(quad2d):
    oracle, _ = quad2d
    values = [
        ac.theorem_bound(k, R, S, oracle.mu, oracle.lipschitz, 1.0, 1.0)
        for k in range(1, 500)
    ]
    ratios = np.array(values[1:]) / np.array(values[:-1])
    assert np.all(ratios < 1.0)


def test_certify_passes_on_nag(nag_trace, quad2d):
    cert = ac.certify(nag_trace, quad2d[0], quad2d[1])
    assert cert.threshold_K == 0
    assert cert.overall_pass
    assert ly.first_failing_k(cert) is None
    assert len(cert.rows) == len(nag_trace.records)


def test_certify_passes_on_mnag_xy_form(mnag_trace, quad2d):
    cert = ac.certify(mnag_trace, quad2d[0], quad2d[1], form="xy")
    assert cert.overall_pass


def test_certify_stationary_trace(stationary_trace, quad2d):
    cert = ac.certify(stationary_trace, quad2d[0], quad2d[1])
    assert cert.overall_pass
    for row in cert.rows:
        assert row.f_gap == 0.0
        if row.bound is not None:
            assert row.bound >= 0.0


def test_certify_requires_certifiable_algorithm(quad2d):
    oracle, optimum = quad2d
    trace = ac.run(oracle, ac.RunParams(algo="gd", step=0.4, iters=10), [1.0, 1.0])
    with pytest.raises(ParameterError):
        ac.certify(trace, oracle, optimum)


def test_certify_requires_enough_records(quad2d):
    oracle, optimum = quad2d
    trace = ac.run(
        oracle, ac.RunParams(algo="nag", step=0.4, iters=1, momentum_r=2.0), [1.0, 1.0]
    )
    with pytest.raises(ParameterError):
        ac.certify(trace, oracle, optimum)


def test_certify_flags_tampered_trace(nag_trace, quad2d):
    records = list(nag_trace.records)
    bad = records[7]
    records[7] = dataclasses.replace(bad, f_or_phi_at_x=bad.f_or_phi_at_x + 1.0)
    tampered = dataclasses.replace(nag_trace, records=tuple(records))
    cert = ac.certify(tampered, quad2d[0], quad2d[1])
    assert not cert.overall_pass
    assert ly.first_failing_k(cert) in (5, 6, 7)


def test_certificate_serialization_schema(nag_trace, quad2d):
    cert = ac.certify(nag_trace, quad2d[0], quad2d[1])
    payload = ly.certificate_to_dict(cert)
    assert set(payload) == {"K", "pass", "rows"}
    assert payload["K"] == 0 and payload["pass"] is True
    assert set(payload["rows"][0]) == {"k", "gap", "bound", "energy", "decrease_margin"}
    assert payload["rows"][0]["bound"] is None
    assert payload["rows"][-1]["energy"] is None
