from fractions import Fraction

from hypothesis import strategies as st

from vcselect.core import JointDistribution, Sample


@st.composite
def distributions(draw, n=None, min_n=1, max_n=4):
    n = n if n is not None else draw(st.integers(min_n, max_n))
    raw = draw(st.lists(st.integers(0, 9), min_size=2 * n, max_size=2 * n).filter(lambda v: sum(v) > 0))
    total = sum(raw)
    return JointDistribution(n, tuple(Fraction(v, total) for v in raw))


@st.composite
def samples(draw, n, min_size=1, max_size=30):
    records = draw(
        st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, 1)), min_size=min_size, max_size=max_size)
    )
    return Sample(n, tuple(records))


@st.composite
def tables(draw, n):
    return tuple(draw(st.lists(st.integers(0, 1), min_size=n, max_size=n)))
