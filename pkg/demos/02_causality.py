"""
Closed causal curves and tilted cones
=====================================

A time-periodic strip contains closed causal curves: the causal graph has a
cycle, and the distance between points on it is infinite.  Cones that tilt
with the space coordinate on a periodic space axis turn causality off once
the tilt is strong enough.
"""
from steeptime import build_causal_graph, builtin_spacetime, distance, is_causal
from steeptime.causal import tilt_sweep, transition_is_monotone

st = builtin_spacetime("periodic_time", period=5, nx=5)
g = build_causal_graph(st, 1)
ok, cycle = is_causal(g)
print("periodic_time causal:", ok)
print("witness cycle:", " -> ".join(str(st.multi_index(v)) for v in cycle))
print("d along the cycle:", distance(g, cycle[0], cycle[2]).value)

# a coarse sweep locates the transition; the flags never switch back
sweep = tilt_sweep([0.0, 0.05, 0.1, 0.15, 0.2, 0.25, 0.28])
for omega, causal in sweep:
    print(f"omega = {omega:.2f}: {'causal' if causal else 'closed causal curve'}")
print("monotone transition:", transition_is_monotone(sweep))
