import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ctxselftest import linalg
from ctxselftest.certificates import (
    DualCertificate,
    Verdict,
    analytic_cycle_nondegeneracy,
    assemble_m,
    build_cycle_dual,
    certify_self_test,
    check_nondegeneracy,
    cycle_block_eigenvalues,
    cycle_dual_matrix,
    dual_from_multipliers,
    nondegeneracy_system,
    parameterized_m,
    relabeled_cycle_dual,
    schur_complement,
    verify_complementarity,
    verify_dual_feasible,
)
from ctxselftest.errors import InvalidArgumentError, UnsupportedGraphError
from ctxselftest.graphs import ExclusivityGraph, cycle_graph
from ctxselftest.theta_sdp import cycle_theta_closed_form, strict_feasible_point

ODD = [3, 5, 7, 9, 11, 13, 15]
C5 = (5 - math.sqrt(5)) / (2 * math.sqrt(5))


def test_z5_entries():
    z = build_cycle_dual(5).z
    assert C5 == pytest.approx(0.6180340, abs=5e-8)
    assert z[0, 0] == pytest.approx(math.sqrt(5), abs=1e-15)
    assert np.allclose(z[0, 1:], -1.0) and np.allclose(np.diag(z)[1:], 1.0)
    for i in range(1, 6):
        for j in range(1, 6):
            d = min(abs(i - j), 5 - abs(i - j))
            expected = {0: 1.0, 1: C5, 2: 0.0}[d]
            assert z[i, j] == pytest.approx(expected, abs=1e-14)


@pytest.mark.parametrize("n", ODD)
def test_template_matches_closed_matrix(n):
    assert np.allclose(build_cycle_dual(n).z, cycle_dual_matrix(n), atol=1e-14)


@pytest.mark.parametrize("n", ODD)
def test_cycle_dual_psd_and_rank(n):
    z = build_cycle_dual(n).z
    lo = np.linalg.eigvalsh(z)[0]
    assert abs(lo) <= 1e-9
    assert abs(linalg.min_eigenvalue(z)) <= 1e-9
    assert np.linalg.matrix_rank(z, tol=1e-8) == n - 2


def test_build_cycle_dual_rejects_even():
    with pytest.raises(InvalidArgumentError):
        build_cycle_dual(6)
    with pytest.raises(InvalidArgumentError):
        cycle_block_eigenvalues(8)


def test_verify_dual_passes():
    check = verify_dual_feasible(build_cycle_dual(5), cycle_graph(5))
    assert check.passed and check.failed_check is None


def test_top_left_replaced_fails_psd():
    base = build_cycle_dual(5)
    cert = dual_from_multipliers(cycle_graph(5), 1.0, base.lam, base.mu)
    check = verify_dual_feasible(cert, cycle_graph(5))
    assert not check.passed and check.failed_check == "psd"


def test_tampered_edge_coefficient_fails_psd():
    base = build_cycle_dual(5)
    cert = dual_from_multipliers(cycle_graph(5), base.t, base.lam, {e: 1.8 for e in base.mu})
    assert cert.z[1, 2] == pytest.approx(0.9)
    assert verify_dual_feasible(cert, cycle_graph(5)).failed_check == "psd"


def test_non_edge_entry_fails_template():
    base = build_cycle_dual(5)
    mu = dict(base.mu)
    mu[(1, 3)] = 0.01
    cert = dual_from_multipliers(cycle_graph(5), base.t, base.lam, mu)
    check = verify_dual_feasible(cert, cycle_graph(5))
    assert check.failed_check == "template"
    assert check.off_edge_multipliers == [(1, 3)]


def test_raw_matrix_off_template_fails():
    base = build_cycle_dual(5)
    z = base.z.copy()
    z[2, 4] = z[4, 2] = 0.05
    cert = DualCertificate(z, base.t, base.lam, base.mu)
    assert verify_dual_feasible(cert, cycle_graph(5)).failed_check == "template"


def test_dual_json_round_trip():
    g = cycle_graph(7)
    cert = build_cycle_dual(7)
    back = DualCertificate.from_dict(json.loads(json.dumps(cert.to_dict())), g)
    assert np.array_equal(back.z, cert.z)


@pytest.mark.parametrize(
    "payload,field",
    [({"lambda": [2] * 5, "mu": {}}, "'t'"), ({"t": 1, "lambda": [2], "mu": {}}, "lambda"), ({"t": 1, "lambda": [2] * 5, "mu": {"13": 1}}, "i,j")],
)
def test_dual_json_errors(payload, field):
    with pytest.raises(InvalidArgumentError, match=field):
        DualCertificate.from_dict(payload, cycle_graph(5))


@pytest.mark.parametrize("n", ODD)
def test_schur_spectrum_matches_eigh(n):
    z = build_cycle_dual(n).z
    analytic = np.sort(cycle_block_eigenvalues(n))
    numeric = np.sort(np.linalg.eigvalsh(schur_complement(z)))
    assert np.max(np.abs(analytic - numeric)) <= 1e-9
    assert abs(analytic.min()) <= 1e-12


def test_schur_zero_at_middle_frequency():
    theta = cycle_theta_closed_form(7)
    assert 1 + (7 - theta) / theta * math.cos(6 * math.pi / 7) == pytest.approx(0.0, abs=1e-12)


def test_complementarity_optimum(c5_solution):
    assert abs(verify_complementarity(c5_solution.x, build_cycle_dual(5))) <= 1e-8


def test_complementarity_interior_point_positive():
    assert verify_complementarity(strict_feasible_point(5, 6), build_cycle_dual(5)) > 1e-3


def test_complementarity_handle_only():
    x = np.zeros((6, 6))
    x[0, 0] = 1.0
    assert verify_complementarity(x, build_cycle_dual(5)) == pytest.approx(math.sqrt(5))


def test_nondegeneracy_c5():
    v = check_nondegeneracy(build_cycle_dual(5), cycle_graph(5))
    assert v.free_parameter_count == 10
    assert v.nullspace_dim == 0 and v.passed


@pytest.mark.parametrize("n", [7, 9, 11, 13])
def test_nondegeneracy_larger_cycles(n):
    v = check_nondegeneracy(build_cycle_dual(n), cycle_graph(n))
    assert v.passed
    # independent oracle: LAPACK rank of the same system
    rows = nondegeneracy_system(build_cycle_dual(n), cycle_graph(n))
    assert np.linalg.matrix_rank(rows, tol=1e-8 * np.linalg.norm(rows, 2)) == rows.shape[0]


def test_nondegeneracy_zero_dual():
    base = build_cycle_dual(5)
    cert = DualCertificate(np.zeros((6, 6)), base.t, base.lam, base.mu)
    v = check_nondegeneracy(cert, cycle_graph(5))
    assert v.nullspace_dim == v.free_parameter_count == 10
    assert not v.passed


def test_nondegeneracy_dimension_mismatch():
    with pytest.raises(InvalidArgumentError):
        check_nondegeneracy(build_cycle_dual(5), cycle_graph(7))


def test_parameterized_m_structure():
    g = cycle_graph(5)
    basis = parameterized_m(g)
    assert len(basis) == 5 + len(g.non_edges())
    m = assemble_m(g, np.arange(1, len(basis) + 1, dtype=float))
    assert m[0, 0] == 0
    assert np.array_equal(m[0, 1:], np.diag(m)[1:])
    assert all(m[i, j] == 0 for i, j in g.edges)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(-1, 1, allow_nan=False), min_size=10, max_size=10).filter(lambda v: max(map(abs, v)) > 1e-3))
def test_no_nonzero_m_annihilates_z5(params):
    g = cycle_graph(5)
    m = assemble_m(g, params)
    assert np.linalg.norm(m @ build_cycle_dual(5).z) > 1e-6 * np.linalg.norm(m)


@pytest.mark.parametrize("n", ODD[1:])
def test_analytic_chain(n):
    a = analytic_cycle_nondegeneracy(n)
    assert a["ratio"] == pytest.approx(a["alpha"], abs=1e-12)
    assert a["forces_zero"]


def test_relabelled_cycle_dual():
    g = cycle_graph(7).relabel({1: 3, 2: 6, 3: 1, 4: 4, 5: 7, 6: 2, 7: 5})
    cert = relabeled_cycle_dual(g)
    assert verify_dual_feasible(cert, g).passed
    assert check_nondegeneracy(cert, g).passed


@pytest.mark.parametrize("n", [5, 9])
def test_certify_cycles(n):
    report = certify_self_test(cycle_graph(n))
    assert report.verdict is Verdict.ROBUST_SELF_TEST
    assert report.theta == pytest.approx(cycle_theta_closed_form(n), abs=1e-6)
    assert report.nc_bound == (n - 1) / 2
    assert report.quantum_advantage > 0


def test_certify_tampered_dual():
    base = build_cycle_dual(5)
    bad = dual_from_multipliers(cycle_graph(5), base.t, base.lam, {e: 1.8 for e in base.mu})
    report = certify_self_test(cycle_graph(5), bad)
    assert report.verdict is Verdict.FAILED
    assert report.failed_stage == "dual_feasibility"
    assert report.to_dict()["verdict"] == "FAILED(dual_feasibility)"


def test_certify_feasible_but_suboptimal_dual_fails_complementarity():
    # a dual with larger t stays feasible but is not optimal
    base = build_cycle_dual(5)
    loose = dual_from_multipliers(cycle_graph(5), base.t + 0.5, base.lam, base.mu)
    report = certify_self_test(cycle_graph(5), loose)
    assert report.failed_stage == "complementarity"


def test_certify_unsupported_without_dual():
    with pytest.raises(UnsupportedGraphError):
        certify_self_test(ExclusivityGraph(3, []))


def test_triangle_dual_feasible_but_degenerate():
    # theta(C_3) = 1 is attained by every vertex, so no unique optimum exists
    g = cycle_graph(3)
    cert = build_cycle_dual(3)
    assert verify_dual_feasible(cert, g).passed
    assert not check_nondegeneracy(cert, g).passed
    assert not analytic_cycle_nondegeneracy(3)["forces_zero"]


@pytest.mark.parametrize("n", [5, 7, 9])
def test_strict_complementarity_ranks(n, solved_cycle):
    # three zero eigenvalues of Z_n (all-ones plus k = (n +- 1)/2) leave rank n - 2,
    # which together with the rank-3 optimum fills the whole space
    x = solved_cycle(n).x
    rank_x = np.linalg.matrix_rank(x, tol=1e-6)
    rank_z = np.linalg.matrix_rank(build_cycle_dual(n).z, tol=1e-8)
    assert (rank_x, rank_z) == (3, n - 2)
    assert rank_x + rank_z == n + 1


@pytest.mark.parametrize("shift", [1, 2, 4])
def test_nondegeneracy_invariant_under_rotation(shift):
    n = 9
    g = cycle_graph(n).relabel({i: (i - 1 + shift) % n + 1 for i in range(1, n + 1)})
    assert g == cycle_graph(n)
    cert = relabeled_cycle_dual(g)
    v = check_nondegeneracy(cert, g)
    assert v.passed and v.free_parameter_count == n + len(g.non_edges())
