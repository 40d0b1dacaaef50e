"""Classify a handful of rigidity/density pairs and print their residual patterns."""
import numpy as np

from beamsym import BeamProfile, classify

np.set_printoptions(precision=2)

beams = [
    ("uniform", "1", "1", (0, 1)),
    ("linear", "x", "x", (1, 2)),
    ("inverse quartic mass", "1", "x^(-4)", (1, 2)),
    ("exponential rigidity", "exp(x)", "1", (0, 1)),
    ("exponential, both", "exp(x)", "exp(x)", (0, 1)),
    ("mixed", "exp(x)", "1+x", (0, 1)),
]

for name, f, m, dom in beams:
    c = classify(BeamProfile.from_strings(name, f, m, dom))
    print(f"{name:22s} {str(c.label):10s} shift={c.g_shift:+.3g}  |H|/n max = {c.h_max()}")

# The exponential rigidity admits x -> x + b, t -> exp(-b/2) t, so it lands in
# the two-parameter solvable class rather than the generic one.
