"""Polynomial torsion-free connections and their derived fields.

A connection is a Christoffel array Gamma[i][j][k] of polynomials,
symmetric in (i, j).  From it we derive, all as exact polynomial data:

    curvature      R_ijk^l = d_i G_jk^l - d_j G_ik^l
                             + G_in^l G_jk^n - G_jn^l G_ik^n
    Ricci          rho_jk  = sum_i R_ijk^i
    trace one-form omega_i = sum_j G_ij^j, with exterior derivative d(omega)
    curvature trace        sum_l R_ijl^l      (equals d(omega) identically)
    volume potential Phi with grad(Phi) = omega, when omega is closed
    Weyl projective field  R - (delta rho - delta rho)/(m-1), pointwise

plus the projective shift by a one-form and the four-way equivalence
report (closed trace form / traceless curvature / symmetric Ricci /
existence of a parallel volume form).

The Ricci field is computed by contracting the curvature formula directly
(the sum over i is folded into each term), which is algebraically the
trace of the full curvature field but never materializes m^4 polynomial
entries; it is exact for arbitrary torsion-free input, including nonzero
omega.
"""

from __future__ import annotations

from equicurv._rational import Q, rat_to_str
from equicurv.errors import ClassViolationError, PotentialError
from equicurv.operators import CurvatureOperator, RicciTensor
from equicurv.poly import Poly
from equicurv.report import VerificationReport


class OneForm:
    """Polynomial one-form theta_i dx^i."""

    __slots__ = ("dim", "comps")

    def __init__(self, comps):
        self.dim = len(comps)
        self.comps = list(comps)
        for p in self.comps:
            if p.dim != self.dim:
                raise ValueError("component dimension mismatch")

    @classmethod
    def zero(cls, m):
        return cls([Poly.zero(m) for _ in range(m)])

    @classmethod
    def gradient(cls, f):
        """df for a scalar polynomial f."""
        return cls([f.partial_derivative(i) for i in range(f.dim)])

    def __getitem__(self, i):
        return self.comps[i]

    def __eq__(self, other):
        return isinstance(other, OneForm) and self.comps == other.comps

    __hash__ = None

    def is_zero(self):
        return all(p.is_zero for p in self.comps)

    def exterior_derivative(self):
        """(d theta)_ij = d_i theta_j - d_j theta_i, as a matrix of polys."""
        m = self.dim
        return [[self.comps[j].partial_derivative(i)
                 - self.comps[i].partial_derivative(j)
                 for j in range(m)] for i in range(m)]

    def is_closed(self):
        return poly_matrix_is_zero(self.exterior_derivative())

    def scale(self, c):
        return OneForm([p * c for p in self.comps])


def poly_matrix_is_zero(rows):
    return all(p.is_zero for row in rows for p in row)


def poly_matrix_is_symmetric(rows):
    m = len(rows)
    return all(rows[i][j] == rows[j][i] for i in range(m) for j in range(i + 1, m))


def poly_matrix_witness(rows):
    """First nonzero entry as a 1-based witness dict, or None."""
    for i, row in enumerate(rows):
        for j, p in enumerate(row):
            if not p.is_zero:
                exps, coef = p.terms()[0]
                return {
                    "indices": [i + 1, j + 1],
                    "monomial": Poly.monomial(p.dim, exps).pretty(),
                    "value": rat_to_str(coef),
                }
    return None


class PolyConnection:
    """Christoffel symbols Gamma[i][j][k] (lower pair symmetric), as polys."""

    __slots__ = ("dim", "gamma")

    def __init__(self, gamma, check=True):
        self.dim = len(gamma)
        self.gamma = gamma
        if check:
            m = self.dim
            for i in range(m):
                if len(gamma[i]) != m:
                    raise ValueError("Christoffel array is not m x m x m")
                for j in range(m):
                    if len(gamma[i][j]) != m:
                        raise ValueError("Christoffel array is not m x m x m")
                    for k in range(m):
                        if gamma[i][j][k].dim != m:
                            raise ValueError("polynomial dimension mismatch")
            for i in range(m):
                for j in range(i + 1, m):
                    for k in range(m):
                        if gamma[i][j][k] != gamma[j][i][k]:
                            raise ValueError(
                                f"torsion: Gamma[{i + 1}][{j + 1}]^{k + 1} != "
                                f"Gamma[{j + 1}][{i + 1}]^{k + 1}")

    @classmethod
    def zero(cls, m):
        z = Poly.zero(m)
        return cls([[[z for _ in range(m)] for _ in range(m)] for _ in range(m)],
                   check=False)

    @classmethod
    def from_entries(cls, m, entries):
        """Build from {(i,j,k): Poly}, mirroring (i,j) symmetry automatically."""
        z = Poly.zero(m)
        gamma = [[[z for _ in range(m)] for _ in range(m)] for _ in range(m)]
        for (i, j, k), p in entries.items():
            gamma[i][j][k] = p
            if i != j:
                gamma[j][i][k] = p
        return cls(gamma)

    def entry(self, i, j, k):
        return self.gamma[i][j][k]

    def __eq__(self, other):
        if not isinstance(other, PolyConnection):
            return NotImplemented
        return self.dim == other.dim and self.gamma == other.gamma

    __hash__ = None

    def __add__(self, other):
        if self.dim != other.dim:
            raise ValueError("dimension mismatch")
        m = self.dim
        return PolyConnection(
            [[[self.gamma[i][j][k] + other.gamma[i][j][k] for k in range(m)]
              for j in range(m)] for i in range(m)], check=False)

    def is_zero(self):
        return all(p.is_zero for plane in self.gamma for row in plane for p in row)

    def max_degree(self):
        degs = [p.total_degree() for plane in self.gamma for row in plane
                for p in row if not p.is_zero]
        return max(degs) if degs else 0

    def to_json_dict(self):
        out = []
        m = self.dim
        for i in range(m):
            for j in range(i, m):
                for k in range(m):
                    p = self.gamma[i][j][k]
                    if not p.is_zero:
                        out.append({"i": i + 1, "j": j + 1, "k": k + 1,
                                    "poly": p.to_json_dict()})
        return {"dim": m, "gamma": out}

    @classmethod
    def from_json_dict(cls, data):
        m = data["dim"]
        entries = {}
        for g in data["gamma"]:
            entries[(g["i"] - 1, g["j"] - 1, g["k"] - 1)] = Poly.from_json_dict(g["poly"])
        return cls.from_entries(m, entries)


class CurvatureField:
    """Polynomial curvature R[i][j][k][l] of a connection."""

    __slots__ = ("dim", "comp")

    def __init__(self, comp):
        self.dim = len(comp)
        self.comp = comp

    def entry(self, i, j, k, l):
        return self.comp[i][j][k][l]

    def at(self, point):
        m = self.dim
        return CurvatureOperator(
            [[[[self.comp[i][j][k][l].eval_rational(point) for l in range(m)]
               for k in range(m)] for j in range(m)] for i in range(m)])

    def symmetry_report(self):
        """Pointwise antisymmetry and first Bianchi, as polynomial identities."""
        m = self.dim
        report = VerificationReport(metadata={"dim": m})
        anti = None
        for i in range(m):
            for j in range(i, m):
                for k in range(m):
                    for l in range(m):
                        if not (self.comp[i][j][k][l] + self.comp[j][i][k][l]).is_zero:
                            anti = {"indices": [i + 1, j + 1, k + 1, l + 1]}
                            break
                    if anti:
                        break
                if anti:
                    break
            if anti:
                break
        report.add("antisymmetry", anti is None, anti)
        bianchi = None
        for i in range(m):
            for j in range(m):
                for k in range(m):
                    for l in range(m):
                        s = (self.comp[i][j][k][l] + self.comp[j][k][i][l]
                             + self.comp[k][i][j][l])
                        if not s.is_zero:
                            bianchi = {"indices": [i + 1, j + 1, k + 1, l + 1]}
                            break
                    if bianchi:
                        break
                if bianchi:
                    break
            if bianchi:
                break
        report.add("first_bianchi", bianchi is None, bianchi)
        return report


# -- derived fields ---------------------------------------------------------

def curvature_field(conn):
    """Full polynomial curvature of a torsion-free connection."""
    m = conn.dim
    g = conn.gamma
    comp = [[[[None] * m for _ in range(m)] for _ in range(m)] for _ in range(m)]
    for i in range(m):
        for j in range(m):
            for k in range(m):
                for l in range(m):
                    r = g[j][k][l].partial_derivative(i) \
                        - g[i][k][l].partial_derivative(j)
                    for n in range(m):
                        r = r + g[i][n][l] * g[j][k][n] - g[j][n][l] * g[i][k][n]
                    comp[i][j][k][l] = r
    return CurvatureField(comp)


def curvature_at(conn, point):
    """Exact curvature operator at a point (the curvature field, evaluated).

    Evaluates Christoffel entries and their first partials at the point and
    assembles the curvature formula on values, which is much cheaper than
    expanding the whole polynomial field first.
    """
    m = conn.dim
    if len(point) != m:
        raise ValueError(f"point length {len(point)} != dim {m}")
    pt = [Q(v) for v in point]
    g = conn.gamma
    gv = [[[g[i][j][k].eval_rational(pt) for k in range(m)] for j in range(m)]
          for i in range(m)]
    dv = [[[[g[i][j][k].partial_derivative(a).eval_rational(pt) for k in range(m)]
            for j in range(m)] for i in range(m)] for a in range(m)]
    comp = [[[[None] * m for _ in range(m)] for _ in range(m)] for _ in range(m)]
    for i in range(m):
        for j in range(m):
            for k in range(m):
                for l in range(m):
                    v = dv[i][j][k][l] - dv[j][i][k][l]
                    for n in range(m):
                        v += gv[i][n][l] * gv[j][k][n] - gv[j][n][l] * gv[i][k][n]
                    comp[i][j][k][l] = v
    return CurvatureOperator(comp)


def omega(conn):
    """Trace one-form omega_i = sum_j Gamma_ij^j."""
    m = conn.dim
    return OneForm([Poly.sum((conn.gamma[i][j][j] for j in range(m)), m)
                    for i in range(m)])


def d_omega(conn):
    """Exterior derivative of the trace one-form, as a poly matrix."""
    return omega(conn).exterior_derivative()


def trace_curvature_field(conn):
    """sum_l R_ijl^l as polynomials, expanded term by term.

    Computed independently of d_omega (the quadratic terms are expanded and
    cancelled by the arithmetic, not dropped), so comparing the two sides
    is a genuine identity check.
    """
    m = conn.dim
    g = conn.gamma
    out = [[None] * m for _ in range(m)]
    for i in range(m):
        for j in range(m):
            t = Poly.zero(m)
            for l in range(m):
                t = t + g[j][l][l].partial_derivative(i) \
                    - g[i][l][l].partial_derivative(j)
                for n in range(m):
                    t = t + g[i][n][l] * g[j][l][n] - g[j][n][l] * g[i][l][n]
            out[i][j] = t
    return out


def ricci_field(conn):
    """Polynomial Ricci tensor rho_jk = sum_i R_ijk^i of the curvature field."""
    m = conn.dim
    g = conn.gamma
    om = omega(conn)
    out = [[None] * m for _ in range(m)]
    for j in range(m):
        for k in range(m):
            t = Poly.sum((g[j][k][i].partial_derivative(i) for i in range(m)), m)
            t = t - om[k].partial_derivative(j)
            for n in range(m):
                t = t + om[n] * g[j][k][n]
                for i in range(m):
                    t = t - g[j][n][i] * g[i][k][n]
            out[j][k] = t
    return out


def ricci_field_omega_free(conn):
    """The reduced Ricci formula d_l G_jk^l - G_jn^l G_lk^n.

    Valid only when the trace one-form vanishes identically; kept as an
    independently tested identity, not used by ricci_field.
    """
    m = conn.dim
    g = conn.gamma
    out = [[None] * m for _ in range(m)]
    for j in range(m):
        for k in range(m):
            t = Poly.sum((g[j][k][l].partial_derivative(l) for l in range(m)), m)
            for n in range(m):
                for l in range(m):
                    t = t - g[j][n][l] * g[l][k][n]
            out[j][k] = t
    return out


def volume_potential(conn):
    """Scalar Phi with grad(Phi) = omega and Phi(0) = 0.

    Radial homotopy on the star-shaped coordinate space: each monomial of
    omega_i x^i is divided by its total degree.  Raises PotentialError
    (with a witness) when omega is not closed, i.e. when no potential
    exists.
    """
    m = conn.dim
    om = omega(conn)
    phi = Poly.zero(m)
    for i in range(m):
        q = om[i] * Poly.variable(m, i)
        if not q.is_zero:
            phi = phi + q.homogeneous_rescale_by_degree()
    for i in range(m):
        diff = phi.partial_derivative(i) - om[i]
        if not diff.is_zero:
            exps, coef = diff.terms()[0]
            raise PotentialError(
                "trace one-form is not closed; no volume potential exists",
                witness={"component": i + 1,
                         "monomial": Poly.monomial(m, exps).pretty(),
                         "value": rat_to_str(coef)})
    return phi


def lemma2_report(conn):
    """Evaluate the four equivalent equiaffinity conditions and their agreement.

    (1) the trace one-form is closed; (2) the curvature trace vanishes;
    (3) the Ricci field is symmetric; (4) a volume potential exists.
    """
    m = conn.dim
    report = VerificationReport(metadata={"dim": m})
    dom = d_omega(conn)
    c1 = poly_matrix_is_zero(dom)
    report.add("omega_closed", c1, None if c1 else poly_matrix_witness(dom))
    tr = trace_curvature_field(conn)
    c2 = poly_matrix_is_zero(tr)
    report.add("curvature_trace_zero", c2, None if c2 else poly_matrix_witness(tr))
    rho = ricci_field(conn)
    asym = [[rho[j][k] - rho[k][j] for k in range(m)] for j in range(m)]
    c3 = poly_matrix_is_zero(asym)
    report.add("ricci_symmetric", c3, None if c3 else poly_matrix_witness(asym))
    try:
        phi = volume_potential(conn)
        failed = None
    except PotentialError as err:
        phi = None
        failed = err.witness
    c4 = failed is None
    report.add("volume_potential_exists", c4, failed)
    if phi is not None:
        om = omega(conn)
        exact = all((phi.partial_derivative(i) - om[i]).is_zero for i in range(m))
        report.add("potential_gradient_matches", exact)
    agree = c1 == c2 == c3 == c4
    report.add("conditions_agree", agree,
               None if agree else {"statuses": [c1, c2, c3, c4]})
    return report


def projective_shift(conn, theta):
    """The projectively equivalent connection G_ij^k - theta_i d_j^k - theta_j d_i^k."""
    m = conn.dim
    if theta.dim != m:
        raise ValueError("dimension mismatch")
    g = conn.gamma
    out = [[[g[i][j][k] for k in range(m)] for j in range(m)] for i in range(m)]
    for i in range(m):
        for j in range(m):
            out[i][j][j] = out[i][j][j] - theta[i]
            out[i][j][i] = out[i][j][i] - theta[j]
    return PolyConnection(out, check=False)


def weyl_projective_field(conn):
    """Pointwise Weyl projective operator of the curvature field.

    Needs m >= 3 and a polynomially symmetric Ricci field.
    """
    m = conn.dim
    if m < 3:
        raise ClassViolationError("Weyl projective field needs m >= 3")
    rho = ricci_field(conn)
    asym = [[rho[j][k] - rho[k][j] for k in range(m)] for j in range(m)]
    if not poly_matrix_is_zero(asym):
        raise ClassViolationError("Ricci field is not symmetric",
                                  poly_matrix_witness(asym))
    field = curvature_field(conn)
    scale = Q(1, m - 1)
    comp = field.comp
    out = [[[[None] * m for _ in range(m)] for _ in range(m)] for _ in range(m)]
    for i in range(m):
        for j in range(m):
            for k in range(m):
                for l in range(m):
                    p = comp[i][j][k][l]
                    if l == i:
                        p = p - rho[j][k] * scale
                    if l == j:
                        p = p + rho[i][k] * scale
                    out[i][j][k][l] = p
    return CurvatureField(out)


def ricci_field_tensor_at(conn, point):
    """Exact Ricci tensor value at a point (evaluation of ricci_field)."""
    rho = ricci_field(conn)
    return RicciTensor([[p.eval_rational(point) for p in row] for row in rho])
