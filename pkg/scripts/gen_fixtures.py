"""Generate the many-agent scenario files (norcross-a/b/c, concentrated-diffuse).

Run from the repository root:  python3 scripts/gen_fixtures.py
The utilities in these fixtures are illustrative choices, not measured values.
"""
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "src" / "harmcalc" / "scenarios"
N = 50


def write(name, text):
    (OUT / f"{name}.harm").write_text(text.lstrip(), encoding="utf-8")


def norcross_a():
    return """
[meta]
name = norcross-a
description = Imposing causes one premature death (utility shortfall 1).
illustrative = true

[variables]
Act : endogenous = refrain, impose
Victim : endogenous = alive, dead

[equations]
Act := refrain
Victim := if Act = impose then dead else alive

[agent victim]
outcome = Victim
default = 0
utility = alive: 0, dead: -1

[policies]
impose: Act = impose
refrain: Act = refrain
"""


def norcross_b():
    lines = ["""
[meta]
name = norcross-b
description = Imposing gives each of %d people a certain mild headache (utility shortfall 0.01).
illustrative = true

[variables]
Act : endogenous = refrain, impose""" % N]
    lines += [f"H{i} : endogenous = fine, headache" for i in range(1, N + 1)]
    lines += ["", "[equations]", "Act := refrain"]
    lines += [f"H{i} := if Act = impose then headache else fine" for i in range(1, N + 1)]
    for i in range(1, N + 1):
        lines += ["", f"[agent h{i}]", f"outcome = H{i}", "default = 0", "utility = fine: 0, headache: -0.01"]
    lines += ["", "[policies]", "impose: Act = impose", "refrain: Act = refrain", ""]
    return "\n".join(lines)


def norcross_c():
    exposed = ", ".join(["nobody"] + [f"a{i}" for i in range(1, N + 1)])
    lines = ["""
[meta]
name = norcross-c
description = Imposing kills whichever of %d people is exposed; each is exposed with probability 1/1000000.
illustrative = true

[variables]
exposed : exogenous = %s
Act : endogenous = refrain, impose""" % (N, exposed)]
    lines += [f"D{i} : endogenous = alive, dead" for i in range(1, N + 1)]
    lines += ["", "[equations]", "Act := refrain"]
    lines += [f"D{i} := if Act = impose and exposed = a{i} then dead else alive" for i in range(1, N + 1)]
    lines += ["", "[distribution]", "exposed=nobody : 19999/20000"]
    lines += [f"exposed=a{i} : 1/1000000" for i in range(1, N + 1)]
    for i in range(1, N + 1):
        lines += ["", f"[agent a{i}]", f"outcome = D{i}", "default = 0", "utility = alive: 0, dead: -1"]
    lines += ["", "[policies]", "impose: Act = impose", "refrain: Act = refrain", ""]
    return "\n".join(lines)


def concentrated_diffuse(n=10):
    names = ", ".join(f"a{i}" for i in range(1, n + 1))
    lines = ["""
[meta]
name = concentrated-diffuse
description = Two policies with equal expected harm: one harms a1 for sure, the other harms one person chosen by lottery.
illustrative = true

[variables]
lottery : exogenous = %s
P : endogenous = refrain, concentrate, diffuse""" % names]
    lines += [f"O{i} : endogenous = ok, hurt" for i in range(1, n + 1)]
    lines += ["", "[equations]", "P := refrain",
              "O1 := if P = concentrate or (P = diffuse and lottery = a1) then hurt else ok"]
    lines += [f"O{i} := if P = diffuse and lottery = a{i} then hurt else ok" for i in range(2, n + 1)]
    lines += ["", "[distribution]"] + [f"lottery=a{i} : 1/{n}" for i in range(1, n + 1)]
    for i in range(1, n + 1):
        lines += ["", f"[agent a{i}]", f"outcome = O{i}", "default = 0", "utility = ok: 0, hurt: -1"]
    lines += ["", "[groups]"] + [f"g{i} = a{i}" for i in range(1, n + 1)]
    lines += ["", "[fairness]", "alpha = 1", "beta = 0.5", "penalty_mode = once"]
    lines += ["", "[policies]", "concentrate: P = concentrate", "diffuse: P = diffuse", "refrain: P = refrain", ""]
    return "\n".join(lines)


if __name__ == "__main__":
    write("norcross-a", norcross_a())
    write("norcross-b", norcross_b())
    write("norcross-c", norcross_c())
    write("concentrated-diffuse", concentrated_diffuse())
