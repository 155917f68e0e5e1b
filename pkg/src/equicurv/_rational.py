"""Rational scalar type shared by the whole package.

Everything field-valued is an exact rational.  gmpy2's mpq is used when
available (much faster normalization); plain fractions.Fraction otherwise.
Both expose .numerator/.denominator, normalize to lowest terms with a
positive denominator, and parse/print as "p/q" strings, which is all the
rest of the code relies on.
"""

from fractions import Fraction

try:
    from gmpy2 import mpq as Q
except ImportError:  # pragma: no cover - gmpy2 is an optional speedup
    Q = Fraction

ZERO = Q(0)
ONE = Q(1)


def rat_from_str(text):
    """Parse an exact "p/q" (or bare integer) string."""
    return Q(text.strip())


def rat_to_str(value):
    """Canonical fraction string: "p/q", or "p" when the denominator is 1."""
    return str(value)
