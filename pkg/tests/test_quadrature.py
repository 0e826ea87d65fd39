"""Principal-value quadrature and the sinh-spaced momentum grid."""
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from dipolebounds.quadrature import (
    SinhGrid,
    double_sum,
    pv_integral,
    pv_matrix,
    trapezoid_weights,
)


def test_trapezoid_weights_match_numpy():
    x = np.sort(np.concatenate([np.linspace(0, 1, 40), [0.013, 0.42, 0.777]]))
    y = np.cos(3.0 * x)
    assert trapezoid_weights(x) @ y == pytest.approx(np.trapezoid(y, x), rel=1e-14)


class TestPvIntegral:
    def test_constant_integrand_gives_log(self):
        # PV int_1^4 dk/(k-2) = ln 2; pole subtraction makes this exact
        nodes = np.linspace(1.0, 4.0, 3001)
        pv = pv_integral(np.ones_like(nodes), nodes, 2.0)
        assert pv == pytest.approx(math.log(2.0), abs=1e-10)

    @given(st.floats(-5, 5), st.floats(0.1, 10), st.floats(0.05, 0.95),
           st.integers(5, 300))
    @settings(max_examples=60, deadline=None)
    def test_log_window_on_uneven_nodes(self, a, width, frac, n):
        # the analytic endpoint term survives any sampling of a constant
        nodes = a + width * np.linspace(0.0, 1.0, n) ** 2
        pole = a + frac * width
        if not nodes[0] < pole < nodes[-1]:
            return
        expect = math.log((nodes[-1] - pole) / (pole - nodes[0]))
        assert pv_integral(np.ones(n), nodes, pole) == pytest.approx(
            expect, rel=1e-9, abs=1e-9)

    def test_even_integrand_symmetric_window(self):
        nodes = np.linspace(-8.0, 8.0, 4001)
        pv = pv_integral(lambda x: np.exp(-np.square(x)), nodes, 0.0)
        assert abs(pv) < 1e-10

    def test_callable_and_samples_agree(self):
        nodes = np.linspace(0.2, 3.0, 801)
        f = lambda x: np.exp(-np.square(x - 1.3))
        a = pv_integral(f, nodes, 1.1)
        b = pv_integral(f(nodes), nodes, 1.1)
        assert b == pytest.approx(a, rel=1e-6)

    @pytest.mark.parametrize("pole", [0.2, 3.0, -1.0, 5.0])
    def test_pole_must_be_interior(self, pole):
        nodes = np.linspace(0.2, 3.0, 11)
        with pytest.raises(ValueError):
            pv_integral(np.ones(11), nodes, pole)

    def test_pole_on_a_node_is_removable(self):
        # odd subtracted part + zero log term: exact zero again
        nodes = np.linspace(-2.0, 2.0, 41)  # 0.0 is a node
        pv = pv_integral(np.exp(-nodes ** 2), nodes, 0.0)
        assert abs(pv) < 1e-12


class TestPvMatrix:
    def setup_method(self):
        self.nodes = 0.1 + 3.0 * np.linspace(0.0, 1.0, 220) ** 2
        self.f = np.exp(-4.0 * (self.nodes - 1.0) ** 2)

    def test_interior_rows_match_single_pole_version(self):
        m = pv_matrix(self.nodes)
        out = m @ self.f
        for i in (5, 60, 110, 214):
            ref = pv_integral(self.f, self.nodes, self.nodes[i])
            assert out[i] == pytest.approx(ref, rel=1e-12, abs=1e-12)

    def test_boundary_rows_stay_finite(self):
        m = pv_matrix(self.nodes)
        assert np.all(np.isfinite(m))

    def test_support_mask_drops_endpoint_log(self):
        support = np.ones(self.nodes.size, dtype=bool)
        support[0] = support[-1] = False
        m = pv_matrix(self.nodes, support=support)
        assert np.all(np.isfinite(m))
        # interior behaviour is untouched by the mask
        out = m @ self.f
        ref = pv_integral(self.f, self.nodes, self.nodes[100])
        assert out[100] == pytest.approx(ref, rel=1e-12, abs=1e-12)


def test_double_sum_factorizes_separable_kernel():
    rng = np.random.default_rng(7)
    w = rng.uniform(0.1, 1.0, 30)
    u, v = rng.normal(size=30), rng.normal(size=30)
    fa, fb = rng.normal(size=30), rng.normal(size=30)
    kernel = np.outer(u, v)
    expect = ((w * fa) @ u) * ((w * fb) @ v)
    assert double_sum(kernel, fa, fb, w) == pytest.approx(expect, rel=1e-13)


class TestSinhGrid:
    def test_carrier_node_is_exact(self):
        g = SinhGrid()
        assert g.nodes[g.carrier_index] == 1.0
        assert g.nodes[0] > 0.0
        assert np.all(np.diff(g.nodes) > 0)
        assert np.all(g.weights > 0)
        assert g.size == g.nodes.size == g.weights.size

    def test_gaussian_integral_matches_analytic(self):
        # uniform trapezoid in the sinh variable is exponentially accurate
        from scipy.special import erf

        g = SinhGrid()
        f = lambda p: np.exp(-50.0 * np.square(p - 1.0))
        root = math.sqrt(50.0)
        ref = math.sqrt(math.pi / 200.0) * (erf(root * (g.nodes[-1] - 1.0))
                                            - erf(root * (g.nodes[0] - 1.0)))
        assert g.integrate(f(g.nodes)) == pytest.approx(ref, rel=1e-12)

    def test_tail_cutoff_is_converged(self):
        # the hard-UV integrand used in practice: k^3 against the squared
        # source form factor at a0 = 0.2
        from dipolebounds.qfi import regularizer

        def total(grid):
            k = grid.nodes
            return grid.integrate(k ** 3 * regularizer(k, 0.2) ** 2)

        base = total(SinhGrid())
        assert total(SinhGrid(k_max=2.2e3)) == pytest.approx(base, rel=1e-7)

    def test_step_halving_is_converged(self):
        from dipolebounds.qfi import regularizer

        def total(grid):
            k = grid.nodes
            return grid.integrate(k ** 3 * regularizer(k, 0.2) ** 2)

        base = total(SinhGrid())
        fine = total(SinhGrid(delta=1.9e-2))
        assert fine == pytest.approx(base, rel=1e-9)
