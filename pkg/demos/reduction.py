"""Walk a solution of the fourth-order rigidity equation down to the first-order form."""
from beamsym.reduction import (coefficient_table, initial_from_uv, reduce_all, slope_at,
                               solve_rigidity, stage3_equilibria)

sol = solve_rigidity((1.0, 0.8, 0.3, -0.2), (0.0, 0.4))
s1, s2, s3 = reduce_all(sol, sol.interval, samples=9)
for st in (s1, s2, s3):
    print(f"stage {st.stage}: derived {st.max_derived:.1e}  alternative {st.max_alternative:.1e}")

print("equilibria on v = 0:", [str(u) for u in stage3_equilibria()])

u, v = 0.5, 0.2
for f0, f1 in ((1.0, 1.0), (2.5, -0.7)):
    print("dv/du through (0.5, 0.2):", slope_at(initial_from_uv(u, v, f0, f1))[2])

print("\nstage  term        derived   alternative")
for stage, name, d, p in coefficient_table():
    mark = "" if d == p else "  *"
    print(f"{stage:5d}  {name:10s} {str(d):>8s} {str(p):>12s}{mark}")
