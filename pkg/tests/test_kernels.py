from __future__ import annotations

import json
import os
import subprocess
import sys

import numpy as np
import pytest
import scipy.linalg

from orbitcert import _accel, kernels, models
from orbitcert import subalgebra as sa
from orbitcert.congruence import make_chart
from orbitcert.structure import cached_structure


def test_expm_edge_cases(rng):
    assert np.array_equal(kernels.expm(np.zeros((3, 3))), np.eye(3))
    for scale in (1e-8, 0.3, 5.0, 40.0):
        A = scale * rng.standard_normal((4, 4))
        ref = scipy.linalg.expm(A)
        assert np.allclose(kernels.expm(A), ref, rtol=1e-11, atol=1e-13 * np.abs(ref).max())


def test_nilpotent_log_inverts_exp():
    N = np.array([[0.0, 0, 0], [1.5, 0, 0], [-0.25, 2.0, 0]])
    assert np.allclose(kernels.nilpotent_log(kernels.expm(N)), N, atol=1e-14)


@pytest.mark.parametrize("name,n", [("sl", 3), ("so1n", 3)])
def test_section_is_in_s_and_hits_point(name, n, rng):
    st = cached_structure(name, n)
    m = st.model
    for _ in range(10):
        x = models.random_point(m, rng).column()
        S = kernels.section(m.kind, x)
        assert np.allclose(kernels.act(m.kind, S, models.origin(m).column()), x, atol=1e-12)
        L = scipy.linalg.logm(S).real
        B = st.s.float_basis.reshape(st.s.dim, -1).T
        coef = np.linalg.lstsq(B, L.ravel(), rcond=None)[0]
        assert np.max(np.abs(B @ coef - L.ravel())) < 1e-10


@pytest.mark.parametrize("name,n,phi", [("sl", 3, (1,)), ("sl", 4, (1, 3)), ("so1n", 4, ())])
def test_peel_recovers_coordinates(name, n, phi, rng):
    st = cached_structure(name, n)
    sub = sa.build_s_Phi(st.dec, st.ps, phi)
    chart = make_chart(st.model, sub, st.s)
    base = models.random_point(st.model, rng).column()
    for _ in range(5):
        theta = rng.uniform(-1.5, 1.5, sub.dim)
        x = kernels.orbit_point(st.model.kind, theta, chart.mats, base)
        got = kernels.peel_coords(st.model.kind, x, base, *chart.guess_args())
        assert np.allclose(got, theta, atol=1e-9)


def test_nelder_mead_quadratic():
    # objective is a distance, so use an orbit whose coordinates are identifiable
    st = cached_structure("sl", 2)
    m = st.model
    mats = np.ascontiguousarray(st.s.float_basis)
    base = np.eye(2)
    target = kernels.orbit_point(m.kind, np.array([0.4, -0.7]), mats, base)
    x, f, nfev, conv = kernels.nelder_mead(np.zeros(2), 0.25, m.kind, mats, base, target, m.metric_scale, 1e-12, 1e-12, 1e-16, 5000)
    assert conv and f <= 1e-10 and nfev <= 5000
    x, f, nfev, conv = kernels.nelder_mead(np.zeros(2), 0.25, m.kind, mats, base, target, m.metric_scale, 1e-30, 0.0, 0.0, 20)
    assert not conv and nfev <= 25


@pytest.mark.skipif(not _accel.USE_NUMBA, reason="numba disabled")
def test_jit_matches_python_source(rng):
    A = rng.standard_normal((5, 5))
    assert np.allclose(kernels.expm(A), kernels.expm.py_func(A), rtol=1e-13)
    p = models.random_point(models.make_model("sl", 3), rng).column()
    q = models.random_point(models.make_model("sl", 3), rng).column()
    assert kernels.dist_spd(p, q, 1.0) == pytest.approx(kernels.dist_spd.py_func(p, q, 1.0), rel=1e-13)


_SNIPPET = """
import json, numpy as np
from orbitcert import kernels, models, backend
rng = np.random.default_rng(5)
A = rng.standard_normal((4, 4))
m = models.make_model("so1n", 3)
p, q = models.random_point(m, rng), models.random_point(m, rng)
print(json.dumps({"backend": backend(), "expm": kernels.expm(A).tolist(), "d": models.distance(m, p, q)}))
"""


def _run(disable: bool) -> dict:
    env = dict(os.environ)
    env.pop("ORBITCERT_DISABLE_NUMBA", None)
    if disable:
        env["ORBITCERT_DISABLE_NUMBA"] = "1"
    out = subprocess.run([sys.executable, "-c", _SNIPPET], env=env, capture_output=True, text=True, check=True)
    return json.loads(out.stdout)


def test_numpy_fallback_parity():
    fast, slow = _run(False), _run(True)
    assert slow["backend"] == "numpy"
    assert np.allclose(fast["expm"], slow["expm"], rtol=1e-13)
    assert fast["d"] == pytest.approx(slow["d"], rel=1e-13)
