"""Hoare-rule schemas checked on explored programs.

Each rule is instantiated on every matching transition of its corpus
programs.  A rule passes when its postcondition holds after every exercised
instance, and is vacuous when its precondition never held.  Alternative
readings of two rules are reported next to the counted ones.
"""

from rarsim.assertions.rules import RULESETS, check_ruleset

for name in sorted(RULESETS):
    results = check_ruleset(name)
    counted = [r for r in results if r.rule.counted]
    passed = sum(r.status == "pass" for r in counted)
    print(f"== {name}: {passed}/{len(counted)} counted rules pass over {', '.join(RULESETS[name][1])}")
    for r in results:
        if r.status != "pass" or not r.rule.counted:
            tag = "counted" if r.rule.counted else "alternative reading"
            print(f"   {r.rule.name} ({tag}): {r.status}")
            if r.witness:
                print(f"      witness: {r.witness}")
