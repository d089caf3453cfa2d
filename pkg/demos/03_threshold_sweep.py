# %% [markdown]
# # Where does unique assembly kick in?
#
# For a fixed grid, sweep the number of jig types and record how often all
# solutions are similar.  The counting bound caps that rate for small q.

# %%
from randjig.combinatorics import expected_piece_stats, uea_probability_bound
from randjig.experiments import sweep
from randjig.io import sweep_csv

rows = sweep(5, [2, 4, 8, 16, 32], "identity", trials=40, seed=3, budget=10**6)
print(sweep_csv(rows))

# %%
for r in rows:
    ey, ex = expected_piece_stats(r.n, r.q)
    lo, hi = r.wilson_ci["uea"]
    print(f"q={r.q:3d}  uea={r.uea_rate:.2f} [{lo:.2f}, {hi:.2f}]  "
          f"mean X={r.mean_X:.2f} (E={float(ex):.2f})  bound 10^{uea_probability_bound(r.n, r.q).log10:.1f}")
