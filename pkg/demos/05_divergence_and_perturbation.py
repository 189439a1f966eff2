"""What the solver does when there is nothing to converge to, and how far a
component can drift when its inputs are only approximate.

Deciding whether a monotone system has a finite least fixed point at all is
intractably hard in general, so the solver certifies only one direction:
value iterates are lower bounds on any fixed point, and escaping a bound
that every fixed point must respect is a proof that none exists.  The
perturbation bounds quantify the other failure mode of decomposed solving:
lower components are solved approximately, and the error the upper
component inherits can be the square root of what it was fed.
"""

from lfpsolve import (
    DivergenceCertified,
    NoFiniteLfp,
    SingularMatrix,
    perturbation_bound,
    rat,
    solve,
    system_of,
    univariate_quadratic_lfp,
    value_iterate,
)

print("x = x^2 + 1 has no real fixed point (discriminant < 0):")
try:
    univariate_quadratic_lfp("1", 0, "1")
except NoFiniteLfp as exc:
    print("  oracle:", exc)

no_lfp = system_of(["x"], [("1", {"x": 2}), ("1", {})])
print("  value iteration squares its way past any bound:",
      [str(v[0]) for v in (value_iterate(no_lfp, k) for k in range(1, 7))])
try:
    solve(no_lfp, rat(1, 2))
except DivergenceCertified as exc:
    print("  solver:", exc)

print("\nx = x + 1 fails differently: I - B is singular at the first step.")
affine = system_of(["x"], [("1", {"x": 1}), ("1", {})])
try:
    solve(affine, rat(1, 2))
except SingularMatrix as exc:
    print("  solver:", exc)

print("\nPerturbation: feed x = x^2/2 + y/2 a truncated y and watch the LFP move.")
print("With y = 1 the fixed point is 1; with y = 1 - dy it is 1 - sqrt(dy),")
print("so a dy perturbation below becomes a sqrt(dy) shift above:")
for k in (8, 12):
    dy = rat(1, 2**k)
    root = univariate_quadratic_lfp("1/2", 0, (1 - dy) / 2)
    hi = root.enclosure(64)[1] if hasattr(root, "enclosure") else root
    shift = 1 - float(hi)
    print(f"  dy = 2^-{k}: measured shift ~ {shift:.6f}  (sqrt(dy) = 2^-{k//2})")
    upper = system_of(["x"], [("1/2", {"x": 2}), ("1/2", {})])  # the component's shape
    alpha = rat(1, 2) * rat(1, 2)  # min(1, c_min) * min(y_min, q*_min / 2)
    bound = perturbation_bound(upper, alpha, rat(1), dy, linear=False)
    print(f"      certified over-approximation: {float(bound):.6f}"
          f"  (contains the shift: {rat(1) - hi <= bound})")

print("\nLinear components degrade only linearly:")
linear = system_of(["x"], [("1/2", {"x": 1}), ("1/2", {})])
dy = rat(1, 16)
bound = perturbation_bound(linear, rat(1, 4), rat(1), dy, linear=True)
print(f"  dy = 1/16 with alpha = 1/4: bound {bound}")
