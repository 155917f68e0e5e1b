"""Constructions realizing a prescribed curvature operator at the origin.

Four builders, one per operator class:

  represent_generic      linear Christoffel symbols
                         G_uv^l = (A_wuv^l + A_wvu^l) x^w / 3,
                         whose curvature at 0 is exactly A;
  represent_equiaffine   the same symbols, admissible precisely for
                         Ricci-symmetric A, where the trace one-form is
                         closed and the connection carries a parallel
                         volume form;
  represent_proj_flat    for pure-Ricci A: a closed linear one-form theta
                         with G_ij^k = theta_i d_j^k + theta_j d_i^k,
                         which has identically vanishing Weyl projective
                         field;
  represent_ricci_flat   for Ricci-flat A: the truncation of a recursive
                         series of odd layers whose Ricci field vanishes
                         to any prescribed order.

The Ricci-flat recursion starts from the linear layer and repeatedly
cancels the quadratic Ricci defect:

    T_2v[i][j]   = sum of G_a[i][n][l] * G_b[j][l][n] over layer pairs
                   (a, b) whose newer member is layer v  (cross terms for
                   unequal pairs),
    G_{2v+1}[i][j][l] = 0 unless l = k[i][j], where it is the
                   antiderivative of T_2v[i][j] along coordinate k[i][j],

with k[i][j] = k[j][i] an index distinct from i and j (smallest such, for
reproducibility).  Each layer is symmetric, trace-free in (j -> l), and
vanishes to order 2v-1, so the truncation after N layers is torsion free,
has zero trace one-form, reproduces A at the origin, and its exact Ricci
field equals minus the next quadratic defect, of order >= 2N.

The convergence diagnostics sample the geometric layer bound
||G_{2v-1}(x)|| <= C^v |x|^{2v-1} with C = 4*C1 on the sup-norm ball of
radius 1/(8*C1), where C1 >= 1 bounds the linear layer.

None of this is GL-equivariant (the index table k breaks it); the probe at
the end of the module compares building-then-transforming against
transforming-then-building for any of the four constructions.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

from equicurv import linalg
from equicurv._rational import Q, rat_to_str
from equicurv.connections import (
    OneForm,
    PolyConnection,
    curvature_at,
    poly_matrix_is_zero,
    poly_matrix_witness,
    ricci_field,
)
from equicurv.errors import ClassViolationError
from equicurv.operators import (
    CurvatureOperator,
    RicciTensor,
    is_ricci_flat,
    ricci,
    weyl_projective,
)
from equicurv.poly import Poly
from equicurv.report import VerificationReport


def represent_generic(op):
    """Torsion-free connection with curvature A at the origin, for any valid A."""
    op.require_valid()
    m = op.dim
    third = Q(1, 3)
    entries = {}
    for u in range(m):
        for v in range(u, m):
            for l in range(m):
                terms = {}
                for w in range(m):
                    c = (op.comp[w][u][v][l] + op.comp[w][v][u][l]) * third
                    if c:
                        exps = [0] * m
                        exps[w] = 1
                        terms[tuple(exps)] = c
                if terms:
                    entries[(u, v, l)] = Poly(m, terms)
    return PolyConnection.from_entries(m, entries)


def represent_equiaffine(op):
    """The linear construction, admitted only for Ricci-symmetric operators."""
    rho = ricci(op)
    if not rho.is_symmetric():
        raise ClassViolationError("operator is not equiaffine",
                                  rho.asymmetry_witness())
    return represent_generic(op)


def theta_from_ricci(rho):
    """Closed linear one-form theta_v = rho_vj x^j / (1 - m).

    Chosen so the shifted-flat connection built on theta has Ricci tensor
    exactly rho at the origin (the proportionality rho = (1-m) * dtheta,
    confirmed by exact expansion in the tests).
    """
    rows = rho.rows if isinstance(rho, RicciTensor) else [[Q(v) for v in r] for r in rho]
    m = len(rows)
    if m < 2:
        raise ValueError("need m >= 2")
    if not RicciTensor(rows).is_symmetric():
        raise ClassViolationError("theta_from_ricci needs a symmetric matrix",
                                  RicciTensor(rows).asymmetry_witness())
    scale = Q(1, 1 - m)
    comps = []
    for v in range(m):
        terms = {}
        for j in range(m):
            c = rows[v][j] * scale
            if c:
                exps = [0] * m
                exps[j] = 1
                terms[tuple(exps)] = c
        comps.append(Poly(m, terms))
    return OneForm(comps)


def connection_from_one_form(theta):
    """G_ij^k = theta_i d_j^k + theta_j d_i^k (projective shift of the flat one)."""
    m = theta.dim
    z = Poly.zero(m)
    gamma = [[[z for _ in range(m)] for _ in range(m)] for _ in range(m)]
    for i in range(m):
        for j in range(m):
            gamma[i][j][j] = gamma[i][j][j] + theta[i]
            gamma[i][j][i] = gamma[i][j][i] + theta[j]
    return PolyConnection(gamma, check=False)


def represent_proj_flat(op):
    """Equiaffine projectively flat connection realizing a pure-Ricci operator."""
    if op.dim < 3:
        raise ClassViolationError("projectively flat construction needs m >= 3")
    part_p = weyl_projective(op)  # also rejects non-equiaffine input
    if not part_p.is_zero():
        i, j, k, l, v = next(part_p.nonzero_entries())
        raise ClassViolationError(
            "operator has a nonzero trace-free (Weyl projective) part",
            {"indices": [i + 1, j + 1, k + 1, l + 1], "value": rat_to_str(v)})
    theta = theta_from_ricci(ricci(op))
    return connection_from_one_form(theta)


# -- Ricci-flat series ------------------------------------------------------

def choose_k_indices(m):
    """Symmetric table k[i][j] = k[j][i], the smallest index not in {i, j}.

    Needs m >= 3 (for m = 2 no admissible index exists).
    """
    if m < 3:
        raise ValueError("choose_k_indices needs m >= 3")
    table = [[0] * m for _ in range(m)]
    for i in range(m):
        for j in range(m):
            table[i][j] = min(x for x in range(m) if x != i and x != j)
    return table


def _theta_pair(ga, gb, m):
    """Matrix t[i][j] = sum_{n,l} ga[i][n][l] * gb[j][l][n]."""
    out = [[Poly.zero(m) for _ in range(m)] for _ in range(m)]
    for i in range(m):
        for j in range(m):
            t = Poly.zero(m)
            for n in range(m):
                for l in range(m):
                    a = ga[i][n][l]
                    b = gb[j][l][n]
                    if a and b:
                        t = t + a * b
            out[i][j] = t
    return out


def _matrix_add(a, b, m):
    return [[a[i][j] + b[i][j] for j in range(m)] for i in range(m)]


@dataclass
class RicciFlatSeries:
    """Layers and quadratic defects of the Ricci-flat recursion.

    layers[v] is the connection layer of order 2v+1 (0-based v), thetas[v]
    the defect matrix of order 2v+2, and k_table the antiderivative
    direction for each index pair.
    """

    dim: int
    k_table: list
    layers: list
    thetas: list

    @property
    def layer_count(self):
        return len(self.layers)

    def truncation(self, n_layers=None):
        """The connection summing the first n_layers layers."""
        n = self.layer_count if n_layers is None else n_layers
        if not 1 <= n <= self.layer_count:
            raise ValueError(f"need 1 <= n_layers <= {self.layer_count}")
        total = self.layers[0]
        for layer in self.layers[1:n]:
            total = total + layer
        return total

    def to_json_dict(self):
        return {
            "dim": self.dim,
            "k_table": [[k + 1 for k in row] for row in self.k_table],
            "layers": [layer.to_json_dict() for layer in self.layers],
            "thetas": [
                [[p.to_json_dict() for p in row] for row in theta]
                for theta in self.thetas
            ],
        }

    @classmethod
    def from_json_dict(cls, data):
        return cls(
            dim=data["dim"],
            k_table=[[k - 1 for k in row] for row in data["k_table"]],
            layers=[PolyConnection.from_json_dict(d) for d in data["layers"]],
            thetas=[
                [[Poly.from_json_dict(p) for p in row] for row in theta]
                for theta in data["thetas"]
            ],
        )


def ricci_flat_series(op, n_layers):
    """Run the layer recursion for a Ricci-flat operator.

    Produces n_layers connection layers (orders 1, 3, ..., 2N-1) and the
    matching quadratic defect matrices (orders 2, 4, ..., 2N); the last
    defect is the exact negative of the truncation's Ricci field.
    """
    if n_layers < 1:
        raise ValueError("need at least one layer")
    if op.dim < 3:
        raise ClassViolationError("Ricci-flat series needs m >= 3")
    op.require_valid()
    rho = ricci(op)
    if not rho.is_zero():
        witness = next(({"indices": [j + 1, k + 1], "value": rat_to_str(v)}
                        for j, row in enumerate(rho.rows)
                        for k, v in enumerate(row) if v), None)
        raise ClassViolationError("operator is not Ricci flat", witness)
    m = op.dim
    k_table = choose_k_indices(m)
    layers = [represent_generic(op)]
    thetas = []
    for nu in range(1, n_layers + 1):
        newest = layers[nu - 1].gamma
        theta = _theta_pair(newest, newest, m)
        for mu in range(nu - 1):
            older = layers[mu].gamma
            theta = _matrix_add(theta, _theta_pair(newest, older, m), m)
            theta = _matrix_add(theta, _theta_pair(older, newest, m), m)
        thetas.append(theta)
        if nu < n_layers:
            entries = {}
            for i in range(m):
                for j in range(i, m):
                    t = theta[i][j]
                    if t:
                        entries[(i, j, k_table[i][j])] = t.antiderivative(k_table[i][j])
            layers.append(PolyConnection.from_entries(m, entries))
    return RicciFlatSeries(dim=m, k_table=k_table, layers=layers, thetas=thetas)


def represent_ricci_flat(op, n_layers):
    """Truncated series connection: curvature A at 0, Ricci of order >= 2N."""
    return ricci_flat_series(op, n_layers).truncation()


# -- convergence diagnostics -------------------------------------------------

NORM_TAG = "m_times_max_entry_sup"


@dataclass
class ConvergenceParams:
    """Constants of the geometric layer bound.

    c1 bounds the linear layer (clamped to >= 1): with the norm
    ||G(x)|| = m * max_entry |G_ij^l(x)| and |x| the sup norm, c1 is
    m times the largest coefficient 1-norm among linear-layer entries.
    Then c = 4*c1 and the bound is checked on |x| <= epsilon = 1/(8*c1).
    """

    c1: float
    c: float
    epsilon: float
    norm: str = NORM_TAG


def convergence_params(series):
    m = series.dim
    gamma1 = series.layers[0].gamma
    best = Q(0)
    for i in range(m):
        for j in range(m):
            for l in range(m):
                total = sum((abs(c) for _, c in gamma1[i][j][l].terms()), Q(0))
                if total > best:
                    best = total
    c1 = best * m
    if c1 < 1:
        c1 = Q(1)
    return ConvergenceParams(
        c1=float(c1), c=float(4 * c1), epsilon=float(Q(1, 8) / c1))


def convergence_report(series, samples=1000, seed=0, radii=None, slack=1e-9):
    """Sample the per-layer geometric bound; report max ratios and violations.

    Points are drawn deterministically from the seed, spread over a radius
    grid within the sup-norm ball |x| <= epsilon.  A violation is a sample
    where m * max |entry(x)| exceeds c^v * |x|^(2v-1) by more than slack.
    """
    params = convergence_params(series)
    m = series.dim
    rng = random.Random(f"equicurv:estimate:{seed}")
    if radii is None:
        radii = [params.epsilon * (i + 1) / 12 for i in range(12)]
    points = []
    for s in range(samples):
        r = radii[s % len(radii)]
        coords = [rng.uniform(-1.0, 1.0) for _ in range(m)]
        top = max(abs(c) for c in coords)
        while top == 0.0:  # pragma: no cover - astronomically unlikely
            coords = [rng.uniform(-1.0, 1.0) for _ in range(m)]
            top = max(abs(c) for c in coords)
        points.append((r, [c * r / top for c in coords]))
    per_layer = []
    for v, layer in enumerate(series.layers, start=1):
        entries = [p for plane in layer.gamma for row in plane for p in row if p]
        max_ratio = 0.0
        violations = 0
        for r, x in points:
            value = m * max((abs(p.eval_float(x)) for p in entries), default=0.0)
            bound = params.c ** v * r ** (2 * v - 1)
            if value > bound + slack:
                violations += 1
            ratio = value / bound
            if ratio > max_ratio:
                max_ratio = ratio
        per_layer.append({"nu": v, "max_ratio": max_ratio, "violations": violations})
    return {
        "C1": params.c1,
        "C": params.c,
        "epsilon": params.epsilon,
        "norm": params.norm,
        "samples": samples,
        "seed": seed,
        "slack": slack,
        "per_layer": per_layer,
    }


# -- the correction-is-needed example ----------------------------------------

def remark6_operator():
    """The 3-dimensional Ricci-flat operator whose linear construction fails.

    Nonzero components (1-based): A_211^2 = 1, A_121^2 = -1, A_311^3 = -1,
    A_131^3 = 1.  Its Ricci trace vanishes, yet the curvature-linear
    connection has a quadratic Ricci defect of magnitude 2/9.
    """
    return CurvatureOperator.from_entries(3, {
        (1, 0, 0, 1): Q(1),
        (0, 1, 0, 1): Q(-1),
        (2, 0, 0, 2): Q(-1),
        (0, 2, 0, 2): Q(1),
    })


def _poly_matrix_order(rows):
    orders = [p.vanishing_order() for row in rows for p in row]
    return min(orders) if orders else math.inf


def remark6_demo(max_layers=4):
    """Golden walkthrough: the defect of the naive construction and its repair."""
    op = remark6_operator()
    report = VerificationReport(metadata={
        "dim": 3, "class": "ricci-flat", "seed": None,
        "truncation_order": max_layers,
    })
    report.add("operator_valid", op.is_valid())
    report.add("operator_ricci_flat", is_ricci_flat(op))

    naive = represent_generic(op)
    rho = ricci_field(naive)
    report.add("naive_ricci_nonzero", not poly_matrix_is_zero(rho),
               poly_matrix_witness(rho))
    m = op.dim
    independent = [(j, k) for j in range(m) for k in range(j, m) if rho[j][k]]
    single = len(independent) == 1 and all(
        rho[j][k] == rho[k][j] for j in range(m) for k in range(m))
    report.add("naive_defect_single_entry", single,
               {"indices": [independent[0][0] + 1, independent[0][1] + 1]}
               if independent else None)
    defect = rho[independent[0][0]][independent[0][1]] if independent else Poly.zero(m)
    quadratic = (not defect.is_zero and defect.vanishing_order() == 2
                 and defect.total_degree() == 2)
    report.add("naive_defect_quadratic", quadratic)
    terms = defect.terms()
    magnitude_ok = len(terms) == 1 and abs(terms[0][1]) == Q(2, 9)
    report.add("naive_defect_magnitude", magnitude_ok,
               {"value": rat_to_str(abs(terms[0][1])) if terms else "0",
                "monomial": Poly.monomial(m, terms[0][0]).pretty() if terms else "0"})

    series = ricci_flat_series(op, max_layers)
    for n in range(1, max_layers + 1):
        trunc = series.truncation(n)
        order = _poly_matrix_order(ricci_field(trunc))
        report.add(f"corrected_ricci_order_n{n}", order >= 2 * n,
                   {"order": "inf" if order == math.inf else int(order)})
        report.add(f"corrected_roundtrip_n{n}",
                   curvature_at(trunc, [0, 0, 0]) == op)
    return report


# -- equivariance probe ------------------------------------------------------

_METHODS = {
    "thm1": "generic", "generic": "generic",
    "thm3": "equiaffine", "equiaffine": "equiaffine",
    "thm4": "proj-flat", "proj-flat": "proj-flat",
    "thm5": "ricci-flat", "ricci-flat": "ricci-flat",
}


def construct_connection(method, op, n_layers=2):
    """Dispatch to the class construction named by method.

    Returns (connection, series-or-None); series accompanies the
    Ricci-flat method only.
    """
    kind = _METHODS.get(method)
    if kind is None:
        raise ValueError(f"unknown construction method {method!r}")
    if kind == "generic":
        return represent_generic(op), None
    if kind == "equiaffine":
        return represent_equiaffine(op), None
    if kind == "proj-flat":
        return represent_proj_flat(op), None
    series = ricci_flat_series(op, n_layers)
    return series.truncation(), series


def transform_operator(op, g):
    """Standard rank-(3,1) action: (g.A)(x,y)z = g A(g^-1 x, g^-1 y) g^-1 z."""
    m = op.dim
    h = linalg.invert_matrix(g)
    cur = op.comp
    # contract one slot at a time
    b1 = [[[[sum((cur[a][b][c][d] * g[l][d] for d in range(m)), Q(0))
             for l in range(m)] for c in range(m)] for b in range(m)] for a in range(m)]
    b2 = [[[[sum((b1[a][b][c][l] * h[c][k] for c in range(m)), Q(0))
             for l in range(m)] for k in range(m)] for b in range(m)] for a in range(m)]
    b3 = [[[[sum((b2[a][b][k][l] * h[b][j] for b in range(m)), Q(0))
             for l in range(m)] for k in range(m)] for j in range(m)] for a in range(m)]
    out = [[[[sum((b3[a][j][k][l] * h[a][i] for a in range(m)), Q(0))
              for l in range(m)] for k in range(m)] for j in range(m)] for i in range(m)]
    return CurvatureOperator(out)


def transform_connection(conn, g):
    """Pullback of the Christoffel field under the linear change x -> g x.

    G'_ij^k(x) = g[k][c] h[a][i] h[b][j] G_ab^c(h x) with h = g^-1; for a
    linear change there is no inhomogeneous term.
    """
    m = conn.dim
    h = linalg.invert_matrix(g)
    sub = [[[conn.gamma[a][b][c].linear_substitute(h) for c in range(m)]
            for b in range(m)] for a in range(m)]
    c1 = [[[Poly.sum((sub[a][b][c] * g[k][c] for c in range(m)), m)
            for k in range(m)] for b in range(m)] for a in range(m)]
    c2 = [[[Poly.sum((c1[a][b][k] * h[b][j] for b in range(m)), m)
            for k in range(m)] for j in range(m)] for a in range(m)]
    out = [[[Poly.sum((c2[a][j][k] * h[a][i] for a in range(m)), m)
             for k in range(m)] for j in range(m)] for i in range(m)]
    return PolyConnection(out, check=False)


def equivariance_probe(op, g, method, n_layers=2):
    """Does the construction commute with the tensor action of g?

    Compares construct(g.A) with g.construct(A) exactly; True iff equal.
    Raises on singular g or when A is outside the method's class.
    """
    built = construct_connection(method, op, n_layers)[0]
    moved_op = transform_operator(op, g)
    built_after = construct_connection(method, moved_op, n_layers)[0]
    moved_conn = transform_connection(built, g)
    return built_after == moved_conn
