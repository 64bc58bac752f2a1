import os
import subprocess
import sys

import numpy as np
import pytest

from reconsume.kernels import _numpy, active_backend

try:
    from reconsume.kernels import _numba
    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False

needs_numba = pytest.mark.skipif(not HAVE_NUMBA, reason="numba not installed")


def random_packed_days(rng, n_days, n_codes):
    """CSR-style (day_ptr, codes) with sorted unique codes per day."""
    ptr = [0]
    codes: list[int] = []
    for _ in range(n_days):
        size = int(rng.integers(0, min(n_codes, 5)))
        day = sorted(rng.choice(n_codes, size=size, replace=False))
        codes.extend(int(c) for c in day)
        ptr.append(len(codes))
    return np.array(ptr, dtype=np.int64), np.array(codes, dtype=np.int64)


@needs_numba
def test_day_fraction_backends_agree():
    rng = np.random.default_rng(0)
    for trial in range(40):
        n_days = int(rng.integers(2, 11))
        ptr, codes = random_packed_days(rng, n_days, 8)
        for k in (2, 3, 7):
            if k > n_days:
                continue
            for forward in (True, False):
                a = _numpy.day_repeat_fractions(ptr, codes, 8, k, forward)
                b = _numba.day_repeat_fractions(ptr, codes, 8, k, forward)
                np.testing.assert_array_equal(a, b, err_msg=str((trial, k, forward)))


@needs_numba
def test_across_fraction_backends_agree():
    rng = np.random.default_rng(1)
    for trial in range(40):
        n_days = int(rng.integers(2, 11))
        ptr_a, codes_a = random_packed_days(rng, n_days, 8)
        ptr_b, codes_b = random_packed_days(rng, n_days, 8)
        for k in (2, 3):
            if k > n_days:
                continue
            for forward in (True, False):
                a = _numpy.across_repeat_fractions(
                    ptr_a, codes_a, ptr_b, codes_b, 8, k, forward)
                b = _numba.across_repeat_fractions(
                    ptr_a, codes_a, ptr_b, codes_b, 8, k, forward)
                np.testing.assert_array_equal(a, b, err_msg=str((trial, k, forward)))


@needs_numba
def test_em_batch_backends_agree():
    rng = np.random.default_rng(2)
    for _ in range(20):
        n_users = int(rng.integers(1, 6))
        ptr = [0]
        for _ in range(n_users):
            ptr.append(ptr[-1] + int(rng.integers(1, 5)))
        total = ptr[-1]
        theta_ind = rng.random(total)
        theta_pop = rng.random(total) * 0.5 + 1e-3
        weights = rng.integers(1, 4, size=total).astype(np.float64)
        args = (np.array(ptr, dtype=np.int64), theta_ind, theta_pop, weights,
                0.5, 1e-6, 100, 1e-6)
        pi_a, it_a, cv_a, ll_a = _numpy.em_fit_batch(*args)
        pi_b, it_b, cv_b, ll_b = _numba.em_fit_batch(*args)
        np.testing.assert_allclose(pi_a, pi_b, atol=1e-12)
        np.testing.assert_array_equal(it_a, it_b)
        np.testing.assert_array_equal(cv_a, cv_b)
        np.testing.assert_allclose(ll_a, ll_b, atol=1e-9, equal_nan=True)


def _backend_in_subprocess(extra_env):
    env = dict(os.environ)
    env.pop("RECONSUME_NO_NUMBA", None)
    env.update(extra_env)
    out = subprocess.run(
        [sys.executable, "-c",
         "from reconsume.kernels import active_backend; print(active_backend())"],
        capture_output=True, text=True, env=env, check=True)
    return out.stdout.strip()


def test_env_flag_forces_numpy_backend():
    assert _backend_in_subprocess({"RECONSUME_NO_NUMBA": "1"}) == "numpy"
    assert _backend_in_subprocess({"RECONSUME_NO_NUMBA": "false"}) != "numpy" \
        or not HAVE_NUMBA


@needs_numba
def test_default_backend_is_numba():
    assert _backend_in_subprocess({}) == "numba"


def test_active_backend_reports_a_known_name():
    assert active_backend() in ("numba", "numpy")
