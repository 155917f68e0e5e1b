"""Exact sparse multivariate polynomials over the rationals.

A polynomial in m variables x1..xm is a finite map from monomials to
nonzero rational coefficients.  Monomials are stored packed: the exponent
of coordinate i occupies 8 bits of an integer key, so multiplying two
monomials is a single integer addition.  Exponents are therefore capped at
255 per coordinate, far beyond anything the constructions here produce.

Products are computed by scaling both factors to integer coefficient
dictionaries (one lcm per factor), convolving in pure integer arithmetic,
and dividing out the combined scale once per output term.  This avoids a
gcd per term pair and is the difference between seconds and minutes on the
deep recursion layers.

All values are immutable once built; every operation returns a new Poly.
"""

from __future__ import annotations

import math
from math import lcm

from equicurv._rational import Q, rat_from_str, rat_to_str

_SHIFT = 8
_MASK = 0xFF

#: largest exponent a single coordinate may carry in the packed representation
MAX_EXPONENT = _MASK


def _pack(exps):
    key = 0
    for i, e in enumerate(exps):
        key |= e << (_SHIFT * i)
    return key


def _unpack(key, dim):
    return tuple((key >> (_SHIFT * i)) & _MASK for i in range(dim))


def _key_degree(key, dim):
    deg = 0
    for _ in range(dim):
        deg += key & _MASK
        key >>= _SHIFT
    return deg


class Poly:
    """Sparse polynomial with exact rational coefficients."""

    __slots__ = ("dim", "_terms")

    def __init__(self, dim, terms=None):
        """Build from a mapping {exponent tuple: coefficient}.

        Zero coefficients are dropped; exponent tuples must have length
        ``dim`` with entries in [0, MAX_EXPONENT].
        """
        if dim < 1:
            raise ValueError(f"dim must be >= 1, got {dim}")
        packed = {}
        for exps, coef in (terms or {}).items():
            if len(exps) != dim:
                raise ValueError(f"exponent tuple {exps} has length != dim={dim}")
            for e in exps:
                if e < 0 or e > MAX_EXPONENT:
                    raise ValueError(f"exponent {e} outside [0, {MAX_EXPONENT}]")
            c = Q(coef)
            if c:
                packed[_pack(exps)] = c
        self.dim = dim
        self._terms = packed

    @classmethod
    def _raw(cls, dim, packed_terms):
        # internal fast path: packed_terms already validated, no zeros
        p = object.__new__(cls)
        p.dim = dim
        p._terms = packed_terms
        return p

    @classmethod
    def zero(cls, dim):
        if dim < 1:
            raise ValueError(f"dim must be >= 1, got {dim}")
        return cls._raw(dim, {})

    @classmethod
    def constant(cls, dim, value):
        c = Q(value)
        return cls._raw(dim, {0: c} if c else {})

    @classmethod
    def variable(cls, dim, index):
        """The polynomial x_{index+1} (0-based coordinate index)."""
        if not 0 <= index < dim:
            raise ValueError(f"coordinate index {index} out of range for dim {dim}")
        return cls._raw(dim, {1 << (_SHIFT * index): Q(1)})

    @classmethod
    def monomial(cls, dim, exps, coef=1):
        return cls(dim, {tuple(exps): coef})

    # -- basic protocol --------------------------------------------------

    def __bool__(self):
        return bool(self._terms)

    @property
    def is_zero(self):
        return not self._terms

    def __len__(self):
        return len(self._terms)

    def __eq__(self, other):
        if not isinstance(other, Poly):
            return NotImplemented
        return self.dim == other.dim and self._terms == other._terms

    __hash__ = None

    def __repr__(self):
        return f"Poly({self.dim}, {self.pretty()!r})"

    def pretty(self, names=None):
        """Readable form, canonical term order, e.g. '2/3*x1^2*x2'."""
        if not self._terms:
            return "0"
        names = names or [f"x{i + 1}" for i in range(self.dim)]
        parts = []
        for exps, coef in self.terms():
            factors = [
                names[i] if e == 1 else f"{names[i]}^{e}"
                for i, e in enumerate(exps)
                if e
            ]
            if not factors:
                parts.append(rat_to_str(coef))
            elif coef == 1:
                parts.append("*".join(factors))
            elif coef == -1:
                parts.append("-" + "*".join(factors))
            else:
                parts.append(rat_to_str(coef) + "*" + "*".join(factors))
        return " + ".join(parts).replace("+ -", "- ")

    def terms(self):
        """(exponent tuple, coefficient) pairs in canonical graded-lex order.

        Ascending total degree; within a degree the x1-dominant monomial
        comes first (ordinary lexicographic precedence of the variables).
        """
        dim = self.dim
        decorated = sorted(
            (_key_degree(k, dim), tuple(-e for e in _unpack(k, dim)), c)
            for k, c in self._terms.items()
        )
        return [(tuple(-e for e in negexps), c) for _, negexps, c in decorated]

    def coefficient(self, exps):
        return self._terms.get(_pack(exps), Q(0))

    def constant_term(self):
        return self._terms.get(0, Q(0))

    # -- ring operations -------------------------------------------------

    def _check_dim(self, other):
        if self.dim != other.dim:
            raise ValueError(f"dimension mismatch: {self.dim} vs {other.dim}")

    def __add__(self, other):
        if not isinstance(other, Poly):
            return NotImplemented
        self._check_dim(other)
        if not self._terms:
            return other
        if not other._terms:
            return self
        out = dict(self._terms)
        get = out.get
        for k, c in other._terms.items():
            s = get(k)
            if s is None:
                out[k] = c
            else:
                s = s + c
                if s:
                    out[k] = s
                else:
                    del out[k]
        return Poly._raw(self.dim, out)

    def __sub__(self, other):
        if not isinstance(other, Poly):
            return NotImplemented
        return self + (-other)

    def __neg__(self):
        return Poly._raw(self.dim, {k: -c for k, c in self._terms.items()})

    def __mul__(self, other):
        if isinstance(other, Poly):
            self._check_dim(other)
            return self._mul_poly(other)
        c = Q(other)
        if not c:
            return Poly.zero(self.dim)
        return Poly._raw(self.dim, {k: v * c for k, v in self._terms.items()})

    __rmul__ = __mul__

    def _mul_poly(self, other):
        a, b = self._terms, other._terms
        if not a or not b:
            return Poly.zero(self.dim)
        if len(a) > len(b):  # fewer outer rows → fewer rescans of the big dict
            a, b = b, a
        la = 1
        for c in a.values():
            la = lcm(la, c.denominator)
        lb = 1
        for c in b.values():
            lb = lcm(lb, c.denominator)
        ai = [(k, int(c * la)) for k, c in a.items()]
        bi = [(k, int(c * lb)) for k, c in b.items()]
        out = {}
        get = out.get
        for k1, c1 in ai:
            for k2, c2 in bi:
                k = k1 + k2
                out[k] = get(k, 0) + c1 * c2
        scale = la * lb
        return Poly._raw(self.dim, {k: Q(v, scale) for k, v in out.items() if v})

    def __pow__(self, n):
        if n < 0:
            raise ValueError("negative power of a polynomial")
        result = Poly.constant(self.dim, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    @staticmethod
    def sum(polys, dim):
        """Sum an iterable of polynomials of the given dimension."""
        total = Poly.zero(dim)
        for p in polys:
            total = total + p
        return total

    # -- calculus --------------------------------------------------------

    def partial_derivative(self, index):
        """Formal partial derivative with respect to x_{index+1} (0-based)."""
        if not 0 <= index < self.dim:
            raise ValueError(f"coordinate index {index} out of range for dim {self.dim}")
        shift = _SHIFT * index
        step = 1 << shift
        out = {}
        for k, c in self._terms.items():
            e = (k >> shift) & _MASK
            if e:
                out[k - step] = c * e
        return Poly._raw(self.dim, out)

    def antiderivative(self, index):
        """Indefinite integral along x_{index+1}, vanishing on {x_{index+1}=0}.

        On a monomial with exponent a in that coordinate this multiplies by
        x/(a+1); the total degree of every term rises by exactly one.
        """
        if not 0 <= index < self.dim:
            raise ValueError(f"coordinate index {index} out of range for dim {self.dim}")
        shift = _SHIFT * index
        step = 1 << shift
        out = {}
        for k, c in self._terms.items():
            e = (k >> shift) & _MASK
            if e + 1 > MAX_EXPONENT:
                raise OverflowError("exponent overflow in antiderivative")
            out[k + step] = c / (e + 1)
        return Poly._raw(self.dim, out)

    # -- evaluation ------------------------------------------------------

    def eval_rational(self, point):
        """Exact value at a point of rationals (or ints)."""
        if len(point) != self.dim:
            raise ValueError(f"point length {len(point)} != dim {self.dim}")
        pt = [Q(v) for v in point]
        total = Q(0)
        for k, c in self._terms.items():
            v = c
            kk = k
            for i in range(self.dim):
                e = kk & _MASK
                if e:
                    v = v * pt[i] ** e
                kk >>= _SHIFT
            total += v
        return total

    def eval_float(self, point):
        """Floating-point value at a float point (sampling boundary only)."""
        if len(point) != self.dim:
            raise ValueError(f"point length {len(point)} != dim {self.dim}")
        total = 0.0
        for k, c in self._terms.items():
            v = float(c)
            kk = k
            for i in range(self.dim):
                e = kk & _MASK
                if e:
                    v *= point[i] ** e
                kk >>= _SHIFT
            total += v
        return total

    # -- degree bookkeeping ----------------------------------------------

    def vanishing_order(self):
        """Minimal total degree of a stored term; math.inf for the zero poly."""
        if not self._terms:
            return math.inf
        dim = self.dim
        return min(_key_degree(k, dim) for k in self._terms)

    def total_degree(self):
        """Maximal total degree of a stored term; -math.inf for the zero poly."""
        if not self._terms:
            return -math.inf
        dim = self.dim
        return max(_key_degree(k, dim) for k in self._terms)

    def truncate_below_degree(self, degree):
        """Drop all terms of total degree < degree."""
        dim = self.dim
        return Poly._raw(
            dim, {k: c for k, c in self._terms.items() if _key_degree(k, dim) >= degree}
        )

    def homogeneous_rescale_by_degree(self):
        """Divide each term by its total degree (no constant term allowed).

        This is the radial-homotopy weight used when reconstructing a
        potential from a closed one-form on a star-shaped domain.
        """
        dim = self.dim
        out = {}
        for k, c in self._terms.items():
            d = _key_degree(k, dim)
            if d == 0:
                raise ValueError("cannot rescale a constant term by its degree")
            out[k] = c / d
        return Poly._raw(dim, out)

    # -- substitution ----------------------------------------------------

    def linear_substitute(self, matrix):
        """Substitute x_a -> sum_r matrix[a][r] * x_r (exact).

        matrix is an m-by-m nested sequence of rationals.
        """
        m = self.dim
        if len(matrix) != m or any(len(row) != m for row in matrix):
            raise ValueError("substitution matrix has the wrong shape")
        images = [
            Poly(m, {tuple(1 if r == s else 0 for s in range(m)): matrix[a][r] for r in range(m)})
            for a in range(m)
        ]
        result = Poly.zero(m)
        for k, c in self._terms.items():
            term = Poly.constant(m, c)
            kk = k
            for a in range(m):
                e = kk & _MASK
                if e:
                    term = term * images[a] ** e
                kk >>= _SHIFT
            result = result + term
        return result

    # -- serialization ---------------------------------------------------

    def to_json_dict(self):
        """Wire form: {"dim": m, "terms": [{"exps": [...], "coef": "p/q"}]}."""
        return {
            "dim": self.dim,
            "terms": [
                {"exps": list(exps), "coef": rat_to_str(c)} for exps, c in self.terms()
            ],
        }

    @classmethod
    def from_json_dict(cls, data):
        dim = data["dim"]
        return cls(
            dim,
            {tuple(t["exps"]): rat_from_str(t["coef"]) for t in data["terms"]},
        )
