"""Algebra of algebraic curvature operators.

A curvature operator on an m-dimensional space is a rank-(3,1) rational
tensor A[i][j][k][l] (meaning A(e_i,e_j)e_k = A_{ijk}^l e_l) satisfying

    antisymmetry   A_{ijk}^l = -A_{jik}^l
    first Bianchi  A_{ijk}^l + A_{jki}^l + A_{kij}^l = 0

This module provides validation and projection onto that symmetry class,
the Ricci trace and its companions, the trace-free (Weyl projective) part
and the resulting two-summand decomposition of Ricci-symmetric operators,
seeded random generation in each class, and exact dimension counts of the
classes via rank computations on the defining linear constraints.

All indices in code are 0-based; witnesses and serialized files are
1-based to match the usual tensor-index notation.
"""

from __future__ import annotations

import random
from enum import Enum
from functools import lru_cache

from equicurv import linalg
from equicurv._rational import Q, rat_from_str, rat_to_str
from equicurv.errors import ClassViolationError
from equicurv.report import VerificationReport


def _zeros4(m):
    return [[[[Q(0) for _ in range(m)] for _ in range(m)] for _ in range(m)]
            for _ in range(m)]


def zeros_matrix(m):
    return [[Q(0) for _ in range(m)] for _ in range(m)]


def matrix_is_symmetric(rows):
    m = len(rows)
    return all(rows[i][j] == rows[j][i] for i in range(m) for j in range(i + 1, m))


def matrix_transpose(rows):
    m = len(rows)
    return [[rows[j][i] for j in range(m)] for i in range(m)]


def matrix_sub(a, b):
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def matrix_is_zero(rows):
    return all(not v for row in rows for v in row)


class RicciTensor:
    """Dense rational m-by-m bilinear form (the Ricci trace of an operator)."""

    __slots__ = ("dim", "rows")

    def __init__(self, rows):
        self.dim = len(rows)
        self.rows = [[Q(v) for v in row] for row in rows]
        if any(len(row) != self.dim for row in self.rows):
            raise ValueError("Ricci tensor must be square")

    def __getitem__(self, jk):
        j, k = jk
        return self.rows[j][k]

    def __eq__(self, other):
        if isinstance(other, RicciTensor):
            return self.rows == other.rows
        return self.rows == other

    __hash__ = None

    def is_symmetric(self):
        return matrix_is_symmetric(self.rows)

    def is_zero(self):
        return matrix_is_zero(self.rows)

    def asymmetry_witness(self):
        """First (j,k) with rho_jk != rho_kj, as a 1-based witness dict."""
        for j in range(self.dim):
            for k in range(j + 1, self.dim):
                if self.rows[j][k] != self.rows[k][j]:
                    return {
                        "indices": [j + 1, k + 1],
                        "value": rat_to_str(self.rows[j][k] - self.rows[k][j]),
                    }
        return None

    def to_json_dict(self):
        return {
            "dim": self.dim,
            "rows": [[rat_to_str(v) for v in row] for row in self.rows],
        }

    @classmethod
    def from_json_dict(cls, data):
        return cls([[rat_from_str(v) for v in row] for row in data["rows"]])


class CurvatureOperator:
    """Rank-(3,1) rational tensor with the torsion-free curvature symmetries."""

    __slots__ = ("dim", "comp")

    def __init__(self, comp):
        self.dim = len(comp)
        self.comp = comp

    @classmethod
    def zeros(cls, m):
        return cls(_zeros4(m))

    @classmethod
    def from_entries(cls, m, entries):
        """Build from {(i,j,k,l): value} with 0-based indices."""
        comp = _zeros4(m)
        for (i, j, k, l), v in entries.items():
            comp[i][j][k][l] = Q(v)
        return cls(comp)

    def entry(self, i, j, k, l):
        return self.comp[i][j][k][l]

    def nonzero_entries(self):
        m = self.dim
        for i in range(m):
            for j in range(m):
                for k in range(m):
                    for l in range(m):
                        v = self.comp[i][j][k][l]
                        if v:
                            yield (i, j, k, l, v)

    def is_zero(self):
        return next(self.nonzero_entries(), None) is None

    def __eq__(self, other):
        if not isinstance(other, CurvatureOperator):
            return NotImplemented
        return self.dim == other.dim and self.comp == other.comp

    __hash__ = None

    def __add__(self, other):
        if self.dim != other.dim:
            raise ValueError("dimension mismatch")
        m = self.dim
        return CurvatureOperator(
            [[[[self.comp[i][j][k][l] + other.comp[i][j][k][l]
                for l in range(m)] for k in range(m)] for j in range(m)]
             for i in range(m)])

    def __sub__(self, other):
        if self.dim != other.dim:
            raise ValueError("dimension mismatch")
        m = self.dim
        return CurvatureOperator(
            [[[[self.comp[i][j][k][l] - other.comp[i][j][k][l]
                for l in range(m)] for k in range(m)] for j in range(m)]
             for i in range(m)])

    def scale(self, c):
        c = Q(c)
        m = self.dim
        return CurvatureOperator(
            [[[[self.comp[i][j][k][l] * c
                for l in range(m)] for k in range(m)] for j in range(m)]
             for i in range(m)])

    # -- symmetry validation ----------------------------------------------

    def validate(self):
        """Check antisymmetry and first Bianchi; report witnesses on failure."""
        m = self.dim
        report = VerificationReport(metadata={"dim": m})
        anti_witness = None
        for i in range(m):
            for j in range(i, m):
                for k in range(m):
                    for l in range(m):
                        if self.comp[i][j][k][l] + self.comp[j][i][k][l]:
                            anti_witness = {
                                "indices": [i + 1, j + 1, k + 1, l + 1],
                                "value": rat_to_str(
                                    self.comp[i][j][k][l] + self.comp[j][i][k][l]),
                            }
                            break
                    if anti_witness:
                        break
                if anti_witness:
                    break
            if anti_witness:
                break
        report.add("antisymmetry", anti_witness is None, anti_witness)
        bianchi_witness = None
        for i in range(m):
            for j in range(m):
                for k in range(m):
                    for l in range(m):
                        s = (self.comp[i][j][k][l] + self.comp[j][k][i][l]
                             + self.comp[k][i][j][l])
                        if s:
                            bianchi_witness = {
                                "indices": [i + 1, j + 1, k + 1, l + 1],
                                "value": rat_to_str(s),
                            }
                            break
                    if bianchi_witness:
                        break
                if bianchi_witness:
                    break
            if bianchi_witness:
                break
        report.add("first_bianchi", bianchi_witness is None, bianchi_witness)
        return report

    def is_valid(self):
        return self.validate().passed

    def require_valid(self):
        rep = self.validate()
        if not rep.passed:
            fail = rep.failures()[0]
            raise ClassViolationError(
                f"not a curvature operator: {fail.name} fails", fail.witness)

    # -- serialization ----------------------------------------------------

    def to_json_dict(self):
        return {
            "dim": self.dim,
            "components": [
                {"i": i + 1, "j": j + 1, "k": k + 1, "l": l + 1,
                 "value": rat_to_str(v)}
                for i, j, k, l, v in self.nonzero_entries()
            ],
        }

    @classmethod
    def from_json_dict(cls, data):
        m = data["dim"]
        entries = {}
        for c in data["components"]:
            entries[(c["i"] - 1, c["j"] - 1, c["k"] - 1, c["l"] - 1)] = \
                rat_from_str(c["value"])
        return cls.from_entries(m, entries)


class OperatorClass(Enum):
    GENERIC = "generic"
    EQUIAFFINE = "equiaffine"
    PROJECTIVELY_FLAT = "proj-flat"
    RICCI_FLAT = "ricci-flat"

    @classmethod
    def from_string(cls, text):
        for member in cls:
            if member.value == text:
                return member
        raise ValueError(f"unknown operator class {text!r}; "
                         f"expected one of {[m.value for m in cls]}")


# -- pointwise tensor operations ------------------------------------------

def project_to_curvature_space(tensor):
    """Project a raw rank-(3,1) rational tensor onto the curvature symmetries.

    Antisymmetrize the first two slots, then remove the cyclic average so
    the first Bianchi sum vanishes.  Idempotent, and the identity on
    tensors that already satisfy both symmetries.
    """
    comp = tensor.comp if isinstance(tensor, CurvatureOperator) else tensor
    m = len(comp)
    half = Q(1, 2)
    anti = [[[[(comp[i][j][k][l] - comp[j][i][k][l]) * half
               for l in range(m)] for k in range(m)] for j in range(m)]
            for i in range(m)]
    third = Q(1, 3)
    out = _zeros4(m)
    for i in range(m):
        for j in range(m):
            for k in range(m):
                for l in range(m):
                    cyc = (anti[i][j][k][l] + anti[j][k][i][l]
                           + anti[k][i][j][l]) * third
                    out[i][j][k][l] = anti[i][j][k][l] - cyc
    return CurvatureOperator(out)


def ricci(op):
    """Ricci tensor rho_jk = sum_i A_{ijk}^i (trace over the first slot)."""
    m = op.dim
    rows = [[sum((op.comp[i][j][k][i] for i in range(m)), Q(0))
             for k in range(m)] for j in range(m)]
    return RicciTensor(rows)


def trace_two_form(op):
    """The two-form T_ij = sum_l A_{ijl}^l.

    For every valid operator this equals rho_ji - rho_ij, which is the
    trace identity tying the full trace to the Ricci antisymmetry.
    """
    m = op.dim
    return [[sum((op.comp[i][j][l][l] for l in range(m)), Q(0))
             for j in range(m)] for i in range(m)]


def is_equiaffine(op):
    """Ricci-symmetric, i.e. in the class realized by equiaffine connections."""
    return ricci(op).is_symmetric()


def is_ricci_flat(op):
    return ricci(op).is_zero()


def ricci_block(rho, m=None):
    """Embed a symmetric bilinear form as the pure-Ricci curvature operator.

    A(x,y)z = (rho(y,z) x - rho(x,z) y) / (m-1); its Ricci trace is exactly
    rho and its trace-free part vanishes, so this is the section of the
    Ricci map onto the symmetric-form summand.
    """
    rows = rho.rows if isinstance(rho, RicciTensor) else [[Q(v) for v in r] for r in rho]
    dim = len(rows)
    if m is not None and m != dim:
        raise ValueError(f"matrix size {dim} does not match m={m}")
    if dim < 2:
        raise ValueError("need m >= 2")
    if not matrix_is_symmetric(rows):
        raise ClassViolationError(
            "ricci_block needs a symmetric matrix",
            RicciTensor(rows).asymmetry_witness())
    scale = Q(1, dim - 1)
    comp = _zeros4(dim)
    for i in range(dim):
        for j in range(dim):
            for k in range(dim):
                # only l = i and l = j receive contributions
                comp[i][j][k][i] += rows[j][k] * scale
                comp[i][j][k][j] -= rows[i][k] * scale
    return CurvatureOperator(comp)


def weyl_projective(op):
    """Trace-free part P_A = A - ricci_block(ricci(A)); needs m >= 3.

    Defined on Ricci-symmetric operators; the projection onto the kernel
    of the Ricci map in the two-summand splitting.
    """
    if op.dim < 3:
        raise ClassViolationError("Weyl projective part needs m >= 3 "
                                  "(the Ricci kernel is trivial for m = 2)")
    rho = ricci(op)
    if not rho.is_symmetric():
        raise ClassViolationError("operator is not equiaffine",
                                  rho.asymmetry_witness())
    return op - ricci_block(rho)


def decompose_equiaffine(op):
    """Split an equiaffine operator as (pure-Ricci part, trace-free part)."""
    part_p = weyl_projective(op)
    part_s = op - part_p
    return part_s, part_p


# -- class constraint systems and dimensions -------------------------------

def _var(m, i, j, k, l):
    return ((i * m + j) * m + k) * m + l


def _symmetry_rows(m):
    rows = []
    for i in range(m):
        for j in range(i, m):
            for k in range(m):
                for l in range(m):
                    if i == j:
                        rows.append({_var(m, i, j, k, l): Q(2)})
                    else:
                        rows.append({_var(m, i, j, k, l): Q(1),
                                     _var(m, j, i, k, l): Q(1)})
    for i in range(m):
        for j in range(i + 1, m):
            for k in range(j + 1, m):
                for l in range(m):
                    rows.append({_var(m, i, j, k, l): Q(1),
                                 _var(m, j, k, i, l): Q(1),
                                 _var(m, k, i, j, l): Q(1)})
    return rows


def _ricci_symmetric_rows(m):
    rows = []
    for j in range(m):
        for k in range(j + 1, m):
            row = {}
            for i in range(m):
                row[_var(m, i, j, k, i)] = row.get(_var(m, i, j, k, i), Q(0)) + 1
                row[_var(m, i, k, j, i)] = row.get(_var(m, i, k, j, i), Q(0)) - 1
            rows.append({c: v for c, v in row.items() if v})
    return rows


def _ricci_zero_rows(m):
    rows = []
    for j in range(m):
        for k in range(m):
            row = {}
            for i in range(m):
                row[_var(m, i, j, k, i)] = row.get(_var(m, i, j, k, i), Q(0)) + 1
            rows.append(row)
    return rows


def _weyl_zero_rows(m):
    # A_{ijk}^l - (delta_i^l rho_jk - delta_j^l rho_ik)/(m-1) = 0,
    # with rho_jk = sum_a A_{ajk}^a substituted as a linear expression
    scale = Q(1, m - 1)
    rows = []
    for i in range(m):
        for j in range(m):
            for k in range(m):
                for l in range(m):
                    row = {_var(m, i, j, k, l): Q(1)}
                    if l == i:
                        for a in range(m):
                            v = _var(m, a, j, k, a)
                            row[v] = row.get(v, Q(0)) - scale
                    if l == j:
                        for a in range(m):
                            v = _var(m, a, i, k, a)
                            row[v] = row.get(v, Q(0)) + scale
                    rows.append({c: x for c, x in row.items() if x})
    return rows


def _class_rows(m, klass):
    rows = _symmetry_rows(m)
    if klass is OperatorClass.EQUIAFFINE:
        rows += _ricci_symmetric_rows(m)
    elif klass is OperatorClass.RICCI_FLAT:
        rows += _ricci_zero_rows(m)
    elif klass is OperatorClass.PROJECTIVELY_FLAT:
        rows += _ricci_symmetric_rows(m)
        if m >= 3:
            rows += _weyl_zero_rows(m)
    return rows


def space_dimension(m, klass):
    """Dimension of the operator class, by rank reduction of its constraints.

    klass may be an OperatorClass or its string value.  Guarded to
    2 <= m <= 6; the constraint systems grow like m^4.
    """
    if not 2 <= m <= 6:
        raise ValueError("space_dimension supports 2 <= m <= 6")
    if not isinstance(klass, OperatorClass):
        klass = OperatorClass.from_string(klass)
    rows = _class_rows(m, klass)
    return m ** 4 - linalg.rank(rows, m ** 4)


@lru_cache(maxsize=None)
def _class_basis(m, klass_value):
    """Cached rational basis of the class's solution space (built once per m)."""
    klass = OperatorClass.from_string(klass_value)
    rows = _class_rows(m, klass)
    return tuple(nullvec for nullvec in linalg.nullspace(rows, m ** 4))


def _operator_from_vector(m, vec):
    comp = _zeros4(m)
    for var, value in vec.items():
        l = var % m
        k = (var // m) % m
        j = (var // (m * m)) % m
        i = var // (m * m * m)
        comp[i][j][k][l] = value
    return CurvatureOperator(comp)


def random_operator(m, klass, seed):
    """Seeded random operator with the exact class property.

    generic        projection of a random integer tensor;
    equiaffine     integer combination of a cached basis of the Ricci-
                   symmetric constraint system;
    proj-flat      pure-Ricci embedding of a random symmetric matrix;
    ricci-flat     trace-free part of a random equiaffine operator (m >= 3).

    Deterministic for a fixed (m, class, seed).
    """
    if not isinstance(klass, OperatorClass):
        klass = OperatorClass.from_string(klass)
    if m < 2:
        raise ValueError("need m >= 2")
    if klass is OperatorClass.RICCI_FLAT and m < 3:
        raise ClassViolationError(
            "ricci-flat generation needs m >= 3: for m = 2 the Ricci kernel "
            "is trivial, so the only Ricci-flat operator is zero")
    rng = random.Random(f"equicurv:{klass.value}:{m}:{seed}")
    if klass is OperatorClass.GENERIC:
        raw = [[[[Q(rng.randint(-9, 9)) for _ in range(m)] for _ in range(m)]
                for _ in range(m)] for _ in range(m)]
        return project_to_curvature_space(raw)
    if klass is OperatorClass.EQUIAFFINE:
        basis = _class_basis(m, OperatorClass.EQUIAFFINE.value)
        vec = {}
        for b in basis:
            c = rng.randint(-9, 9)
            if not c:
                continue
            for col, v in b.items():
                vec[col] = vec.get(col, Q(0)) + c * v
        return _operator_from_vector(m, vec)
    if klass is OperatorClass.PROJECTIVELY_FLAT:
        sym = zeros_matrix(m)
        for i in range(m):
            for j in range(i, m):
                sym[i][j] = sym[j][i] = Q(rng.randint(-9, 9))
        return ricci_block(sym)
    # ricci-flat: project a random equiaffine operator onto the trace-free summand
    base = random_operator(m, OperatorClass.EQUIAFFINE, f"{seed}:pre")
    return weyl_projective(base)
