import math
import random

import pytest
from conftest import random_connection, trace_free_connection

from equicurv._rational import Q
from equicurv.connections import (
    OneForm,
    PolyConnection,
    curvature_at,
    curvature_field,
    d_omega,
    lemma2_report,
    omega,
    poly_matrix_is_zero,
    projective_shift,
    ricci_field,
    ricci_field_omega_free,
    trace_curvature_field,
    volume_potential,
    weyl_projective_field,
)
from equicurv.constructions import (
    connection_from_one_form,
    remark6_operator,
    represent_equiaffine,
    represent_generic,
    theta_from_ricci,
)
from equicurv.errors import ClassViolationError, PotentialError
from equicurv.operators import random_operator, ricci, ricci_block, weyl_projective
from equicurv.poly import Poly


def quadratic_example():
    """m=2, Gamma_11^2 = x2, everything else zero."""
    p = Poly(2, {(0, 1): 1})
    return PolyConnection.from_entries(2, {(0, 0, 1): p})


# -- construction/validation ---------------------------------------------------

def test_torsion_rejected():
    m = 2
    z = Poly.zero(m)
    x1 = Poly.variable(m, 0)
    gamma = [[[z, z], [x1, z]], [[z, z], [z, z]]]  # G_12^1 != G_21^1
    with pytest.raises(ValueError, match="torsion"):
        PolyConnection(gamma)


def test_from_entries_mirrors_symmetry():
    conn = quadratic_example()
    assert conn.entry(0, 0, 1) == Poly(2, {(0, 1): 1})
    conn2 = PolyConnection.from_entries(2, {(0, 1, 0): Poly.variable(2, 0)})
    assert conn2.entry(1, 0, 0) == conn2.entry(0, 1, 0)


def test_connection_json_roundtrip():
    conn = random_connection(3, 8)
    again = PolyConnection.from_json_dict(conn.to_json_dict())
    assert again == conn


def test_connection_json_lower_triangle_only():
    conn = random_connection(3, 8)
    for g in conn.to_json_dict()["gamma"]:
        assert g["i"] <= g["j"]


# -- curvature field -------------------------------------------------------------

def test_zero_connection_zero_curvature():
    field = curvature_field(PolyConnection.zero(3))
    assert all(field.comp[i][j][k][l].is_zero
               for i in range(3) for j in range(3) for k in range(3) for l in range(3))


def test_quadratic_example_field():
    field = curvature_field(quadratic_example())
    one = Poly.constant(2, 1)
    for i in range(2):
        for j in range(2):
            for k in range(2):
                for l in range(2):
                    expected = Poly.zero(2)
                    if (i, j, k, l) == (1, 0, 0, 1):
                        expected = one
                    elif (i, j, k, l) == (0, 1, 0, 1):
                        expected = -one
                    assert field.comp[i][j][k][l] == expected


@pytest.mark.parametrize("seed", range(4))
def test_curvature_field_symmetries(seed):
    field = curvature_field(random_connection(3, seed))
    assert field.symmetry_report().passed


def test_curvature_at_equals_field_evaluation():
    conn = random_connection(3, 21)
    field = curvature_field(conn)
    for point in ([0, 0, 0], [Q(1, 2), Q(-1, 3), Q(2)], [1, 1, -1]):
        assert curvature_at(conn, point) == field.at(point)


def test_curvature_at_point_length():
    with pytest.raises(ValueError):
        curvature_at(quadratic_example(), [1])


def test_represent_generic_roundtrip_guard():
    op = random_operator(3, "generic", 33)
    conn = represent_generic(op)
    assert curvature_at(conn, [0, 0, 0]) == op


# -- finite-difference cross-check ----------------------------------------------

def fd_curvature(conn, point, h=1e-5):
    """Numeric curvature via difference quotients of the defining formula."""
    m = conn.dim
    g = conn.gamma

    def gval(x):
        return [[[g[i][j][k].eval_float(x) for k in range(m)] for j in range(m)]
                for i in range(m)]

    base = gval(point)
    plus, minus = [], []
    for a in range(m):
        xp = list(point)
        xm = list(point)
        xp[a] += h
        xm[a] -= h
        plus.append(gval(xp))
        minus.append(gval(xm))
    out = [[[[0.0] * m for _ in range(m)] for _ in range(m)] for _ in range(m)]
    for i in range(m):
        for j in range(m):
            for k in range(m):
                for l in range(m):
                    v = (plus[i][j][k][l] - minus[i][j][k][l]) / (2 * h) \
                        - (plus[j][i][k][l] - minus[j][i][k][l]) / (2 * h)
                    for n in range(m):
                        v += base[i][n][l] * base[j][k][n] \
                            - base[j][n][l] * base[i][k][n]
                    out[i][j][k][l] = v
    return out


def assert_fd_matches(conn, n_points, seed, rtol=1e-6):
    m = conn.dim
    rng = random.Random(f"fd:{seed}")
    for _ in range(n_points):
        q_point = [Q(rng.randint(-100, 100), 200) for _ in range(m)]
        f_point = [float(v) for v in q_point]
        exact = curvature_at(conn, q_point)
        approx = fd_curvature(conn, f_point)
        for i in range(m):
            for j in range(m):
                for k in range(m):
                    for l in range(m):
                        e = float(exact.comp[i][j][k][l])
                        a = approx[i][j][k][l]
                        assert abs(a - e) <= rtol * max(1.0, abs(e))


def test_finite_difference_quadratic_example():
    assert_fd_matches(quadratic_example(), 10, seed=1)


def test_finite_difference_random_connection():
    assert_fd_matches(random_connection(3, 2), 10, seed=2)


# -- trace one-form and its derivative --------------------------------------------

def test_omega_of_equiaffine_construction_closed():
    op = random_operator(3, "equiaffine", 5)
    conn = represent_equiaffine(op)
    assert poly_matrix_is_zero(d_omega(conn))


def test_omega_of_shifted_flat_connection():
    # connection built from a one-form has trace form (m+1) theta
    m = 3
    rho = ricci(random_operator(m, "proj-flat", 6))
    theta = theta_from_ricci(rho)
    conn = connection_from_one_form(theta)
    om = omega(conn)
    for i in range(m):
        assert om[i] == theta[i] * (m + 1)


def test_trace_curvature_equals_d_omega():
    for seed in range(6):
        conn = random_connection(3, seed)
        tr = trace_curvature_field(conn)
        dom = d_omega(conn)
        for i in range(3):
            for j in range(3):
                assert tr[i][j] == dom[i][j]


def test_ricci_antisymmetry_is_minus_trace():
    for seed in range(4):
        conn = random_connection(3, seed + 50)
        rho = ricci_field(conn)
        tr = trace_curvature_field(conn)
        for j in range(3):
            for k in range(3):
                assert rho[j][k] - rho[k][j] == -tr[j][k]


def test_ricci_field_matches_full_field_trace():
    conn = random_connection(3, 77)
    rho = ricci_field(conn)
    field = curvature_field(conn)
    for j in range(3):
        for k in range(3):
            expected = Poly.sum((field.comp[i][j][k][i] for i in range(3)), 3)
            assert rho[j][k] == expected


def test_omega_free_formula_matches_when_omega_vanishes():
    conn = trace_free_connection(3, 4)
    assert omega(conn).is_zero()
    full = ricci_field(conn)
    reduced = ricci_field_omega_free(conn)
    for j in range(3):
        for k in range(3):
            assert full[j][k] == reduced[j][k]


# -- volume potential ---------------------------------------------------------------

def test_potential_of_flat_connection():
    assert volume_potential(PolyConnection.zero(3)).is_zero


def test_potential_gradient_matches():
    op = random_operator(3, "equiaffine", 12)
    conn = represent_equiaffine(op)
    phi = volume_potential(conn)
    om = omega(conn)
    assert phi.eval_rational([0, 0, 0]) == 0
    for i in range(3):
        assert phi.partial_derivative(i) == om[i]


def test_potential_of_gradient_shift():
    # theta = d(x1 x2); the shifted flat connection has omega = -(m+1) d(x1 x2)
    m = 3
    f = Poly(m, {(1, 1, 0): 1})
    theta = OneForm.gradient(f)
    conn = projective_shift(PolyConnection.zero(m), theta)
    phi = volume_potential(conn)
    assert phi == f * Q(-(m + 1))


def test_potential_failure_witness():
    conn = PolyConnection.from_entries(2, {(0, 0, 0): Poly(2, {(0, 2): 1})})
    with pytest.raises(PotentialError) as err:
        volume_potential(conn)
    assert err.value.witness is not None


# -- the four-way equivalence ---------------------------------------------------------

def test_lemma2_all_true_for_equiaffine_construction():
    op = random_operator(3, "equiaffine", 30)
    report = lemma2_report(represent_equiaffine(op))
    assert report.passed


def test_lemma2_all_true_for_flat():
    assert lemma2_report(PolyConnection.zero(3)).passed


def test_lemma2_all_false_together():
    conn = PolyConnection.from_entries(2, {(0, 0, 0): Poly(2, {(0, 2): 1})})
    report = lemma2_report(conn)
    statuses = [report[name].passed for name in (
        "omega_closed", "curvature_trace_zero", "ricci_symmetric",
        "volume_potential_exists")]
    assert statuses == [False, False, False, False]
    assert report["conditions_agree"].passed


@pytest.mark.parametrize("seed", range(8))
def test_lemma2_conditions_always_agree(seed):
    conn = random_connection(3, seed + 100)
    assert lemma2_report(conn)["conditions_agree"].passed


# -- projective shift -------------------------------------------------------------------

def test_shift_by_zero():
    conn = random_connection(3, 9)
    assert projective_shift(conn, OneForm.zero(3)) == conn


def test_shift_of_flat_gives_one_form_connection():
    m = 3
    theta = OneForm.gradient(Poly(m, {(1, 1, 0): 1}))
    shifted = projective_shift(PolyConnection.zero(m), theta)
    built = connection_from_one_form(theta.scale(-1))
    assert shifted == built


def test_shift_keeps_torsion_free():
    conn = random_connection(3, 10)
    theta = OneForm.gradient(Poly(3, {(1, 0, 1): Q(1, 2)}))
    shifted = projective_shift(conn, theta)
    for i in range(3):
        for j in range(3):
            for k in range(3):
                assert shifted.gamma[i][j][k] == shifted.gamma[j][i][k]


def test_weyl_field_invariant_under_closed_shift():
    op = random_operator(3, "equiaffine", 14)
    conn = represent_equiaffine(op)
    theta = OneForm.gradient(Poly(3, {(1, 1, 0): 1}))
    shifted = projective_shift(conn, theta)
    before = weyl_projective_field(conn)
    after = weyl_projective_field(shifted)
    for i in range(3):
        for j in range(3):
            for k in range(3):
                for l in range(3):
                    assert before.comp[i][j][k][l] == after.comp[i][j][k][l]


# -- Weyl projective field ----------------------------------------------------------------

def test_weyl_field_of_ricci_flat_connection_is_curvature():
    conn = trace_free_connection(3, 15)
    rho = ricci_field(conn)
    if not all(rho[j][k] == rho[k][j] for j in range(3) for k in range(3)):
        pytest.skip("seed gave an asymmetric-Ricci connection")
    field = curvature_field(conn)
    weyl = weyl_projective_field(conn)
    rb_zero = all(rho[j][k].is_zero for j in range(3) for k in range(3))
    if rb_zero:
        for i in range(3):
            for j in range(3):
                for k in range(3):
                    for l in range(3):
                        assert weyl.comp[i][j][k][l] == field.comp[i][j][k][l]


def test_weyl_field_evaluation_commutes_with_projection():
    op = random_operator(3, "equiaffine", 16)
    conn = represent_equiaffine(op)
    weyl = weyl_projective_field(conn)
    for point in ([0, 0, 0], [Q(1, 3), Q(-1, 2), Q(1)]):
        at_point = curvature_at(conn, point)
        projected = weyl_projective(at_point)
        evaluated = weyl.at(point)
        assert evaluated == projected


def test_weyl_field_rejects_m2():
    with pytest.raises(ClassViolationError):
        weyl_projective_field(quadratic_example())


def test_weyl_field_rejects_asymmetric_ricci():
    conn = PolyConnection.from_entries(3, {(0, 0, 0): Poly(3, {(0, 2, 0): 1})})
    assert not lemma2_report(conn)["ricci_symmetric"].passed
    with pytest.raises(ClassViolationError):
        weyl_projective_field(conn)


def test_ricci_flat_connection_weyl_equals_curvature_remark6_naive():
    op = remark6_operator()
    conn = represent_generic(op)
    # the naive connection is trace-free but not Ricci-flat; at the origin the
    # Weyl field still agrees with the projection of the operator
    weyl = weyl_projective_field(conn)
    assert weyl.at([0, 0, 0]) == weyl_projective(op)
