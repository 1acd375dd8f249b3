"""Recover a hidden-variable star from the seven joint moments of three binary variables.

The moments below come from a star whose hidden variable W has P(W=1) = 0.9,
with P(Xi=1 | W=1) = u and P(Xi=1 | W=0) = v.  Two of the v entries fall
outside [0, 1], so the recovered star is an improper (signed) model.  Its
predictions for the observed variables are still exact.
"""

from treedecomp import TripletStats, posterior, star_posterior, star_reroot, star_residual, star_solve

stats = TripletStats(p1=0.7, p2=0.56, p3=0.41, p12=0.428, p13=0.278, p23=0.226, p123=0.1708)
print("covariances c12, c13, c23:", ", ".join(f"{c:.4f}" for c in stats.covariances()))

params = star_solve(stats)
print(f"w = {params.w:.6f}")
print("u =", tuple(round(x, 6) for x in params.u))
print("v =", tuple(round(x, 6) for x in params.v))
print("proper:", params.proper)
print(f"moment residual: {star_residual(params, stats):.2e}")

# The second root of the quadratic swaps the roles of W=0 and W=1.
print("mirror root w =", round(params.flipped().w, 6))

# Inference through the star agrees with conditioning the table directly.
table = stats.to_table()
print(f"P(X1=1 | X2=1) via star  = {star_posterior(params, {2: True}, 1):.6f}")
print(f"P(X1=1 | X2=1) via table = {posterior(table, {'X2': True}, 'X1'):.6f}")

# Any observed variable can be made the root; the joint is unchanged.
r = star_reroot(params, 1)
print(f"rooted at X1: P(X1=1) = {r.p_root:.6f}, P(W=1 | X1=1) = {r.w_given_root:.6f}")
