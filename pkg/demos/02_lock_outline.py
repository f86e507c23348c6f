"""A lock-protected client and what breaks when the acquire does not synchronise.

The outline of the lock client proves that thread 2 reads either both initial
values or both new ones.  The same outline fails on a variant whose acquire is
relaxed; the checker reports the first failing assertion with an execution
that reaches it.
"""

from rarsim import corpus
from rarsim.assertions.outline import check_outline
from rarsim.explorer import final_valuations

for name in ("lock-client", "lock-client-rlx"):
    spec = corpus.load(name)
    report = check_outline(spec)
    res = report.result
    print(f"== {name}: {corpus.describe(name)}")
    print(f"   final (r1, r2): {sorted(final_valuations(res, ['r1', 'r2']))}")
    print(f"   outline valid: {report.valid}")
    bad = next((v for v in report.verdicts if not v.holds), None)
    if bad is not None:
        print(f"   first failure at {bad.where}: {bad.text}")
        for label, _ in res.path_to(bad.witness):
            print(f"      {label}")
