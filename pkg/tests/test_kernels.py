import subprocess
import sys

import numpy as np
import pytest

from aclsim import kernels
from aclsim.kernels import _numpy_impl

numba_impl = kernels.numba_impl

needs_numba = pytest.mark.skipif(numba_impl is None, reason="numba backend unavailable")


@pytest.fixture
def rng():
    return np.random.default_rng(99)


def random_complex(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


@needs_numba
class TestBackendsAgree:
    def test_phase_evolve(self, rng):
        d = 37
        rho = random_complex(rng, d, d)
        eigs = rng.standard_normal(d)
        a = _numpy_impl.phase_evolve(rho, eigs, 0.73)
        b = numba_impl.phase_evolve(rho, eigs, 0.73)
        assert np.abs(a - b).max() <= 1e-13

    def test_partial_traces(self, rng):
        d_s, d_e = 5, 7
        rho = random_complex(rng, d_s * d_e, d_s * d_e)
        assert np.abs(_numpy_impl.partial_trace_env(rho, d_s, d_e)
                      - numba_impl.partial_trace_env(rho, d_s, d_e)).max() <= 1e-13
        assert np.abs(_numpy_impl.partial_trace_sys(rho, d_s, d_e)
                      - numba_impl.partial_trace_sys(rho, d_s, d_e)).max() <= 1e-13

    def test_branch_reductions(self, rng):
        vecs = random_complex(rng, 4, 6, 5)
        w = rng.random(5)
        assert np.abs(_numpy_impl.branch_reduce_sys(vecs, w)
                      - numba_impl.branch_reduce_sys(vecs, w)).max() <= 1e-13
        assert np.abs(_numpy_impl.branch_reduce_env(vecs, w)
                      - numba_impl.branch_reduce_env(vecs, w)).max() <= 1e-13

    def test_hermite_functions(self, rng):
        q = np.linspace(-6, 6, 301)
        a = _numpy_impl.hermite_functions(q, 16)
        b = numba_impl.hermite_functions(q, 16)
        assert np.abs(a - b).max() <= 1e-13

    def test_entropy(self, rng):
        w = rng.random(64)
        w /= w.sum()
        a = _numpy_impl.entropy_from_eigs(w, 1e-12)
        b = numba_impl.entropy_from_eigs(w, 1e-12)
        assert abs(a - b) <= 1e-13

    def test_positive_variation_bitwise(self, rng):
        s = rng.random(601)
        assert _numpy_impl.positive_variation(s) == numba_impl.positive_variation(s)


class TestNumpyImplSemantics:
    def test_phase_evolve_zero_time_identity(self, rng):
        rho = random_complex(rng, 6, 6)
        out = _numpy_impl.phase_evolve(rho, rng.standard_normal(6), 0.0)
        assert np.abs(out - rho).max() == 0

    def test_entropy_clips_tiny_and_negative(self):
        w = np.array([0.5, 0.5, 1e-13, -1e-11])
        got = _numpy_impl.entropy_from_eigs(w, 1e-12)
        assert got == pytest.approx(np.log(2.0), abs=1e-12)

    def test_positive_variation_simple(self):
        assert _numpy_impl.positive_variation(np.array([0.0, 1.0, 0.25, 0.75])) == \
            pytest.approx(1.5, abs=1e-15)

    def test_hermite_orthonormality(self):
        q = np.linspace(-10, 10, 4001)
        phi = _numpy_impl.hermite_functions(q, 12)
        gram = np.trapezoid(phi[:, None, :] * phi[None, :, :], q, axis=-1)
        assert np.abs(gram - np.eye(12)).max() <= 1e-7


class TestBackendSelection:
    def test_active_backend_exports(self):
        assert kernels.BACKEND in ("numba", "numpy")
        for name in ("phase_evolve", "partial_trace_env", "branch_reduce_sys",
                     "hermite_functions", "entropy_from_eigs", "positive_variation"):
            assert callable(getattr(kernels, name))

    def test_env_flag_forces_numpy(self):
        code = ("import aclsim.kernels as k; "
                "print(k.BACKEND); print(k.numba_impl is None)")
        out = subprocess.run([sys.executable, "-c", code],
                             env={"ACLSIM_DISABLE_NUMBA": "1", "PATH": "/usr/bin:/bin"},
                             capture_output=True, text=True, check=True)
        lines = out.stdout.split()
        assert lines[0] == "numpy"
        assert lines[1] == "True"
