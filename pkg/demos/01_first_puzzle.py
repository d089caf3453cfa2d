# %% [markdown]
# # A first random jigsaw
#
# Sample a small puzzle, look at its pieces, and ask the solver whether the
# box can be reassembled in more than one essentially different way.

# %%
from randjig.core import piece_grid
from randjig.sampler import box_of, jig_system_of_kind, make_rng, sample_carving
from randjig.solver import classify, enumerate_solution_carvings

sys_ = jig_system_of_kind(5, "paired")
print("iota:", sys_.iota)

w = sample_carving(4, sys_, make_rng(2024))
print("north values\n", w.north)
print("west values\n", w.west)

# %% [markdown]
# Each cell becomes a piece with four sides in N, E, S, W order.  The box
# forgets positions and orientations.

# %%
grid = piece_grid(w, sys_)
print(grid[0, :3])
box = box_of(w, sys_)
print(len(box.counts), "distinct piece types in a box of", box.total)

# %%
res = enumerate_solution_carvings(box, 4, sys_, node_budget=10**6)
print("distinct carvings:", len(res.distinct_carvings), "exhausted:", res.exhausted)
print("nodes:", res.nodes_expanded, "X:", res.duplicates_X, "Y:", res.symmetric_Y)

# %%
for q in (3, 5, 12, 40):
    s = jig_system_of_kind(q, "identity")
    c = classify(sample_carving(4, s, make_rng(q)), s)
    print(f"q={q:3d}  {c.verdict.name:20s} uva={c.uva}  nodes={c.nodes_expanded}")
