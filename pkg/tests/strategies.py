"""Hypothesis strategies: seeds and dimensions feeding the instance factory."""
from hypothesis import strategies as st

from opmetric.oracles import InstanceFactory

dims = st.tuples(st.integers(1, 8), st.integers(1, 3))
seeds = st.integers(0, 2**32 - 1)


@st.composite
def operators(draw, count=1, max_hat_norm=0.95):
    m, n = draw(dims)
    f = InstanceFactory(draw(seeds))
    return [f.operator(m, n, max_hat_norm) for _ in range(count)]


@st.composite
def ball_points(draw, count=1, max_norm=0.95):
    m, n = draw(dims)
    f = InstanceFactory(draw(seeds))
    return [f.ball_matrix(m, n, max_norm) for _ in range(count)]


@st.composite
def automorphism_params(draw):
    m, n = draw(dims)
    f = InstanceFactory(draw(seeds))
    return f.automorphism_params(m, n), [f.ball_matrix(m, n) for _ in range(2)]
