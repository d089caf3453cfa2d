# %% [markdown]
# # Counting connected lattice subgraphs
#
# Grow every connected subgraph of the square lattice edge by edge and
# compare the counts per (edges, bounded faces) with the binomial bound.

# %%
from randjig.combinatorics import enumerate_lattice_subgraphs, subgraph_count_bound

table = enumerate_lattice_subgraphs(6)
for (E, F), count in table.counts.items():
    print(f"E={E} F={F}  count={count:5d}  bound={subgraph_count_bound(E, F)}")

# %%
w = table.witnesses[(4, 1)]
print("the unit square:", w.edges, "faces", w.face_perimeters)
