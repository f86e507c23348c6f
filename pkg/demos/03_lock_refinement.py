"""Checking lock implementations against the abstract lock.

Trace refinement asks whether every client-observable behaviour of the client
running on an implementation is also a behaviour with the abstract lock.  The
sequence lock and ticket lock pass; a sequence lock whose release write is
relaxed fails, and the counterexample shows thread 2 holding the lock while it
can still read the stale d1 = 0.  Forward simulation with the implementation's
relation gives the same verdicts through local proof obligations.
"""

import json

from rarsim import corpus
from rarsim.refinement import check_refinement, instantiate, replay, simulate

client = corpus.load("lock-client")

for concrete in ("seqlock", "ticketlock", "seqlock_rlx"):
    a, c = instantiate(client, "lock", concrete)
    r = check_refinement(a, c)
    print(f"== lock-client on {concrete}: refinement {r.verdict} ({r.pairs} product states)")
    if r.counterexample is not None:
        cex = r.counterexample
        print("   concrete execution:")
        for step in cex.labels:
            print(f"      {step}")
        print("   client state no abstract execution can produce:")
        print("      " + json.dumps(cex.trace[cex.failing_index].to_json(), sort_keys=True))
        print(f"   replays: {replay(cex, a, c)}")

print()
for concrete, relation in (("seqlock", "seqlock"), ("ticketlock", "ticketlock"),
                           ("seqlock_rlx", "seqlock")):
    s = simulate(client, "lock", concrete, relation)
    failed = [o for o in s.obligations if not o.holds]
    detail = f": {failed[0].name} fails, {failed[0].detail}" if failed else ""
    print(f"== simulation of lock by {concrete} under '{relation}': {s.verdict}{detail}")
