"""Message passing through a stack, with and without synchronisation.

Thread 1 writes d := 5 and pushes a flag; thread 2 pops the flag and reads d.
With relaxed push/pop the read may still see the initial 0.  Making the push
releasing and the pop acquiring rules that out, and the proof outline that
says so is checked in every reachable configuration.
"""

from rarsim import corpus
from rarsim.assertions.outline import check_outline
from rarsim.explorer import Bounds, explore, final_valuations

bounds = Bounds(loop_bound=2)

for name in ("mp-unsync", "mp-sync"):
    spec = corpus.load(name)
    print(f"== {name}: {corpus.describe(name)}")
    res = explore(spec, bounds)
    print(f"   {len(res.states)} reachable configurations")
    print(f"   final (r1, r2): {sorted(final_valuations(res, ['r1', 'r2']))}")

print("\n== proof outline of mp-sync")
report = check_outline(corpus.load("mp-sync"), bounds)
for v in report.verdicts:
    print(f"   {'ok  ' if v.holds else 'FAIL'} {v.where:<8} {v.text}")
print(f"   outline valid: {report.valid}")
