"""The Treiber stack as an implementation of the abstract stack.

The message-passing client is run on the Treiber stack.  Every reachable
configuration satisfies the stack's structural invariants, the client cannot
tell the implementation from the abstract stack, and the timestamp-based
simulation relation holds.  Client-view inclusion alone is too weak a
relation to be preserved by every step.
"""

from rarsim import corpus
from rarsim.explorer import Bounds, explore
from rarsim.refinement import refine, simulate, treiber_invariants

bounds = Bounds(loop_bound=3)
client = corpus.load("mp-sync")

res = explore(corpus.load("treiber-client"), bounds)
bad = [v for cfg in res.states for v in treiber_invariants(cfg)]
print(f"invariants (1)-(6) over {len(res.states)} configurations: {'hold' if not bad else bad[:3]}")

r = refine(client, "stack", "treiber", bounds)
print(f"refinement of stack by treiber: {r.verdict}")

for relation in ("treiber", "client-obs"):
    s = simulate(client, "stack", "treiber", relation, bounds)
    print(f"simulation under '{relation}': {s.verdict}")
    for o in s.obligations:
        if not o.holds:
            print(f"   {o.name}: {o.detail}")
