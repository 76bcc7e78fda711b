import math

import numpy as np
import pytest

import gramforge as gf


def test_named_graphs():
    v8 = gf.named_graph("V8")
    assert v8.n == 8
    assert len(v8.edges) == 12
    assert v8.has_edge(0, 4)
    k3 = gf.suspension(gf.named_graph("K2"))
    assert k3 == gf.named_graph("K3")
    with pytest.raises(ValueError):
        gf.named_graph("zorn")


def test_certify_roundtrip():
    g = gf.named_graph("K5")
    cert = gf.certify(g)
    assert (cert["lower"], cert["upper"]) == (5, 5)
    assert gf.verify_certificate(g, cert)
    v8 = gf.named_graph("V8")
    c8 = gf.certify(v8)
    assert (c8["lower"], c8["upper"]) == (4, 4)
    assert c8["treewidth"]["width"] == 4


def test_ktree_completion():
    g = gf.named_graph("C4")
    rng = np.random.default_rng(7)
    pts = rng.normal(size=(4, 4)) / 2.0
    a = gf.project_to_graph(pts @ pts.T, g)
    r = gf.ktree_complete(g, a, 2)
    assert r["rank"] <= 3
    assert r["residual"] <= 1e-8
    x = np.asarray(r["X"])
    assert x.shape == (4, 4)
    assert np.allclose(x, x.T)
    evals = np.linalg.eigvalsh(x)
    assert evals.min() >= -1e-9


def test_feasibility_identity():
    g = gf.named_graph("C5")
    a = gf.PartialMatrix(g, [1.0] * 5, [0.0] * 5)
    f = gf.psd_completion_feasible(a)
    assert f["feasible"]
    assert f["min_eig"] == pytest.approx(1.0, abs=1e-6)
    assert np.allclose(np.asarray(f["X"]), np.eye(5), atol=1e-5)


def test_lowrank_fit_converges():
    g = gf.named_graph("K3")
    a = gf.PartialMatrix(g, [1.0, 1.0, 1.0], [1.0, 1.0, 1.0])
    r = gf.lowrank_fit(a, 1, seed=3)
    assert r["converged"]
    assert r["residual"] < 1e-10
    assert np.asarray(r["points"]).shape == (3, 1)


def test_phi_roundtrip_exact():
    g = gf.Graph(3, [(0, 1), (1, 2)])
    q = np.array([[1.0, 0.25], [0.5, -0.75], [0.125, 1.0]])
    a = gf.project_to_graph(q @ q.T, g)
    d = gf.phi(a)
    assert d.graph == gf.suspension(g)
    back = gf.phi_inv(d)
    assert back.diag == a.diag
    assert back.edge_values == a.edge_values


def test_witness_bundle():
    w = gf.k222_witness()
    assert w["singular_block"] == [0, 1, 5]
    assert len(w["forced"]) == 3
    assert all(e["v"] == 0.0 for e in w["forced"])
    x = np.asarray(w["X"])
    assert np.linalg.matrix_rank(x, tol=1e-8) == 5


def test_stretch_analytic():
    g = gf.named_graph("C4")
    a = gf.PartialMatrix(g, [1.0] * 4, [0.0] * 4)
    rep = gf.stretch(g, a, (0, 2))
    assert rep["pair"] == [0, 2]
    assert rep["optimum"] == pytest.approx(1.0, abs=1e-6)
    assert rep["w_diag"][0] == pytest.approx(0.5, abs=1e-6)


def test_maxcut_pipeline():
    g = gf.named_graph("C4")
    problem = gf.maxcut_relaxation(g)
    sol = gf.sdp_solve(problem)
    assert sol["status"] == "optimal"
    assert sol["primal_objective"] == pytest.approx(4.0, abs=1e-6)
    red = gf.rank_reduce(problem, np.asarray(sol["X"]), preserve_objective=True)
    assert red["rank"] == 1


def test_oracle_helpers():
    assert gf.clique_number(gf.named_graph("petersen")) == 2
    assert gf.chromatic_number(gf.named_graph("C5")) == 3
    assert gf.orthogonality_dimension_search(gf.named_graph("K4"), 3) == 1


def test_error_translation():
    g = gf.named_graph("K3")
    with pytest.raises(ValueError):
        gf.PartialMatrix(g, [1.0, 1.0], [0.0, 0.0, 0.0])
