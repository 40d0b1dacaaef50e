"""Clamped spectra of a few class-I beams against the uniform beam of equal g-length."""
from beamsym import GottliebParams, make_gottlieb
from beamsym.spectral import isospectral_check

members = [
    GottliebParams("3/2", 1, 1, 1, 0, 1, 1, 0, (0, 1)),
    GottliebParams("5/2", 2, 1, 1, 1, 1, 1, 2, (0, 1)),
    GottliebParams(4, 1, 1, 1, 1, 1, 1, 2, (0, 1)),
]

for p in members:
    beam = make_gottlieb(p)
    rep = isospectral_check(beam, n_modes=3, N=1000)
    print(beam.name, "length", round(rep.length, 6), "passed" if rep.passed else "FAILED")
    for row in rep.rows:
        print(f"  mode {row.mode}: {row.omega:12.5f} vs {row.reference:12.5f}"
              f"  dev {row.deviation:.1e}  orders {[round(q, 3) for q in row.orders]}")
