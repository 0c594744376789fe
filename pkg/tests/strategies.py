"""Shared hypothesis strategies."""
from fractions import Fraction

from hypothesis import strategies as st

from flatflow.quadratic import QuadraticIrrational

squarefree = st.sampled_from([2, 3, 5, 6, 7, 10, 11, 13, 14, 15, 17, 19, 21, 22, 23])


@st.composite
def quadratic_irrationals(draw, lo=0, hi=None):
    """(p + q*sqrt d)/r with q != 0, optionally confined to (lo, hi)."""
    d = draw(squarefree)
    q = draw(st.integers(1, 9)) * draw(st.sampled_from([1, -1]))
    p = draw(st.integers(-40, 40))
    r = draw(st.integers(1, 30))
    x = QuadraticIrrational(p, q, r, d)
    if lo is not None and hi is not None:
        x = x.frac() * (hi - lo) + lo
    return x


fractions_01 = st.fractions(min_value=0, max_value=1, max_denominator=10**6).filter(lambda f: f < 1)
small_fractions = st.fractions(min_value=-5, max_value=5, max_denominator=1000)
