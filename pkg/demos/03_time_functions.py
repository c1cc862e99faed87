"""
Averaged time functions on the product and their level set
==========================================================

The spacetime is lifted to a product with an extra fiber coordinate.  Future
and past masses of a Gaussian measure, averaged over a family of widened
cones, give two functions increasing along every causal edge.  The log of
their ratio crosses one level on every fiber column, and that crossing is a
function on the base that grows at least as fast as the length of each edge
(up to one fiber step).
"""
from pathlib import Path

import numpy as np

from steeptime import build_causal_graph, builtin_spacetime, is_steep
from steeptime.product import ProductSpacetime
from steeptime.timefn import (averaged_functions, centered_measure, common_level_range,
                              default_fiber_spacing, geroch_tau, level_set_graph,
                              steep_scale, strictly_increasing)

st = builtin_spacetime("minkowski2d", dims=(9, 9))
g = build_causal_graph(st, 1)
h = default_fiber_spacing(g)
ps = ProductSpacetime(g, 9, h)
avg = averaged_functions(ps, centered_measure(ps), a_samples=8, eps_max=0.3)
tau = geroch_tau(avg.down, avg.up)

for name, f in (("tau_down", avg.down), ("tau_up", avg.up), ("tau", tau)):
    ok, bad = strictly_increasing(f, ps)
    print(f"{name}: strictly increasing on all {ps.n_edges} product edges: {ok}")

lo, hi = common_level_range(tau, ps)
t = level_set_graph(tau, ps, 0.5 * (lo + hi))
print(f"common level range [{lo:.3f}, {hi:.3f}], missing columns {t.info['missing']}")
print(f"steep margin {is_steep(t, g).margin:.4f} (fiber step {h:g})")
print(f"rescale factor to exact steepness: {steep_scale(t.values, g):.4f}")

# the level set as a grid over (t, x)
print(np.round(t.values.reshape(st.dims), 2))

# the CLI writes the same data plus an SVG
out = Path(__file__).with_name("out")
from steeptime.cli import main
main(["timefn", "--builtin", "minkowski2d", "-o", str(out / "timefn")])
print("wrote", out / "timefn" / "level_set.svg")
