# %% [markdown]
# # Swapping two pieces
#
# Exchange two interior pieces of the planted assembly.  The dual edges
# that now join sides which were not neighbours form the contour graph; the
# old/new graph built on them gives the exact chance that a random carving
# makes the swapped assembly fit.

# %%
from randjig.core import Assembly, JigSystem
from randjig.experiments import feasibility_mc
from randjig.structure import connected_regions, contour_graph, exact_feasibility_probability, old_new_graph, render_contours

a = Assembly.planted(6).swapped((1, 1), (4, 4))
print(render_contours(a))

# %%
cg = contour_graph(a)
g = old_new_graph(a)
print("contour edges:", len(cg), "contours:", len(cg.contours))
print("regions:", sorted(len(r) for r in connected_regions(a)))
print("cycles:", g.num_cycles, "paths:", len(g.paths))

# %%
sys_ = JigSystem.identity(5)
exact = exact_feasibility_probability(a, sys_)
print("exact:", exact.value)
mc = feasibility_mc(a, 6, sys_, 400_000, seed=1)
print(f"empirical {mc.empirical:.5f}  z={mc.z:+.2f}")

# %% [markdown]
# A swap touching the boundary leaves open paths instead of cycles, so
# every new edge costs a full factor of q.

# %%
b = Assembly.planted(3).swapped((0, 0), (2, 2))
print(exact_feasibility_probability(b, JigSystem.identity(2)).value)
