"""
The dense LP solver
===================

``onebit.lp.solve`` handles any ``max c @ v s.t. G v <= h``. The default
interior-point backend reports iteration counts; HiGHS dual simplex is
available as a cross-check.
"""

import numpy as np

from onebit.channel import draw_channel
from onebit.lp import LpProblem, estimate_iteration_cost, solve
from onebit.precoding import assemble_msm_lp, build_modified_channel, build_real_matrices
from onebit.pskmod import PskConstellation

# A toy problem first.
p = LpProblem(c=[1.0, 1.0], G=[[1, 0], [0, 1], [1, 1]], h=[1, 1, 1.5])
print(solve(p))

# Infeasible and unbounded problems come back flagged rather than raising.
print("infeasible:", solve(LpProblem([1.0], [[1.0], [-1.0]], [-1.0, 0.0])).infeasible)
print("unbounded :", solve(LpProblem([1.0, 0.0], [[-1.0, 0.0]], [0.0])).unbounded)

# The precoding LP at full size: 2N+1 unknowns and 2M+4N rows.
const = PskConstellation(4)
rng = np.random.default_rng(0)
N, M = 128, 16
H = draw_channel(M, N, rng)
s = const.points[rng.integers(0, 4, M)]
lp = assemble_msm_lp(build_real_matrices(build_modified_channel(H, s), const.theta))
print(f"G is {lp.n_cons} x {lp.n_vars}")

ipm = solve(lp)
spx = solve(lp, method="simplex")
print(f"interior point: delta = {ipm.objective:.6f} in {ipm.iterations} iterations")
print(f"dual simplex  : delta = {spx.objective:.6f} in {spx.iterations} iterations")
print(f"operations per interior-point iteration ~ {estimate_iteration_cost(N, M):,}")
