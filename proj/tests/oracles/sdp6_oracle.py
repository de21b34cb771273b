"""Brute-force optimum of the frozen 6x6 SDP used in test_sdp_solver.cpp.

min tr(C X)  s.t.  tr(A_i X) = b_i (i = 0..3), X >= 0, with A_0 = I.

X is parameterized as L L^T / tr(L L^T); 40 random starts are refined by
SLSQP on the remaining three equality constraints. Prints the instance as C++
initializers followed by the optimum. cvxpy (Clarabel, else SCS), when installed, is reported as a
second opinion.
"""
import numpy as np
from scipy.optimize import minimize

rng = np.random.default_rng(20240611)
n = 6


def sym(m):
    return np.round(0.5 * (m + m.T), 3)


C = sym(rng.normal(size=(n, n)))
A = [np.eye(n)] + [sym(rng.normal(size=(n, n))) for _ in range(3)]
G = rng.normal(size=(n, n))
X0 = G @ G.T
X0 /= np.trace(X0)
b = np.round([np.trace(a @ X0) for a in A], 6)
b[0] = 1.0

iu = np.tril_indices(n)


def unpack(theta):
    L = np.zeros((n, n))
    L[iu] = theta
    X = L @ L.T
    return X / np.trace(X)


def objective(theta):
    return np.trace(C @ unpack(theta))


def lin_grad(M):
    # d/dtheta tr(M X) for X = L L^T / tr(L L^T).
    def grad(theta):
        L = np.zeros((n, n))
        L[iu] = theta
        s = np.sum(L * L)
        v = np.trace(M @ L @ L.T) / s
        g = 2.0 * (M @ L) / s - 2.0 * v * L / s
        return g[iu]
    return grad


cons = [{"type": "eq", "fun": (lambda t, a=a, bi=bi: np.trace(a @ unpack(t)) - bi), "jac": lin_grad(a)}
        for a, bi in zip(A[1:], b[1:])]

best = np.inf
best_x = None
for start in range(40):
    theta0 = rng.normal(size=len(iu[0]))
    res = minimize(objective, theta0, jac=lin_grad(C), constraints=cons, method="SLSQP",
                   options={"ftol": 1e-14, "maxiter": 2000})
    if not res.success:
        continue
    X = unpack(res.x)
    viol = max(abs(np.trace(a @ X) - bi) for a, bi in zip(A, b))
    if viol < 1e-9 and res.fun < best:
        best, best_x = res.fun, X


def cpp(name, m):
    rows = ",\n    ".join("{" + ", ".join(f"{v:.3f}" for v in r) + "}" for r in m)
    return f"{name} = {{\n    {rows}}};"


print(cpp("C", C))
for i, a in enumerate(A[1:], 1):
    print(cpp(f"A{i}", a))
print("b =", ", ".join(f"{v:.6f}" for v in b))
print(f"brute-force optimum {best:.10f}")
print("min eig", np.linalg.eigvalsh(best_x).min())

try:
    import cvxpy as cp
    Xv = cp.Variable((n, n), symmetric=True)
    prob = cp.Problem(cp.Minimize(cp.trace(C @ Xv)),
                      [Xv >> 0] + [cp.trace(a @ Xv) == bi for a, bi in zip(A, b)])
    try:
        prob.solve(solver=cp.CLARABEL, tol_gap_abs=1e-12, tol_gap_rel=1e-12, tol_feas=1e-12)
    except Exception:
        prob.solve(solver=cp.SCS, eps=1e-10, max_iters=200000)
    print(f"cvxpy optimum {prob.value:.10f}")
except Exception as exc:  # pragma: no cover
    print("cvxpy unavailable:", exc)
