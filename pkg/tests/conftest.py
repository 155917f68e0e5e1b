import random

from equicurv._rational import Q
from equicurv.connections import PolyConnection, omega, projective_shift
from equicurv.poly import Poly


def random_connection(m, seed, max_degree=2, terms_per_entry=2):
    """Seeded torsion-free connection with sparse polynomial entries."""
    rng = random.Random(f"test-conn:{m}:{seed}")
    entries = {}
    for i in range(m):
        for j in range(i, m):
            for k in range(m):
                terms = {}
                for _ in range(rng.randint(0, terms_per_entry)):
                    exps = [0] * m
                    for _ in range(rng.randint(0, max_degree)):
                        exps[rng.randrange(m)] += 1
                    terms[tuple(exps)] = Q(rng.randint(-6, 6), rng.choice([1, 2, 3]))
                p = Poly(m, terms)
                if not p.is_zero:
                    entries[(i, j, k)] = p
    return PolyConnection.from_entries(m, entries)


def trace_free_connection(m, seed, **kw):
    """Random connection shifted so its trace one-form vanishes identically."""
    conn = random_connection(m, seed, **kw)
    theta = omega(conn).scale(Q(1, m + 1))
    return projective_shift(conn, theta)
