"""The command line end to end: publish, simulate, audit, sweep, allocate.

Writes a config, then drives every subcommand into a scratch directory and
prints the artifacts.  The same five commands work from a shell:

    bailrule rulecard --config rule.cfg --out-dir out
    bailrule simulate --config rule.cfg --seed 7 --noise 0.02 --out-dir out
    bailrule audit    --config rule.cfg --data out/episodes.csv --out-dir out
    bailrule sweep    --config rule.cfg --out-dir out
    bailrule allocate --config towns.cfg --strict --out-dir out

Run:  python3 demos/05_cli_walkthrough.py
"""

import tempfile
from pathlib import Path

from bailrule.cli import main

RULE_CFG = """\
# a provincial bailout rule
[mechanism]
omega_b = 2.0
c = 4.0
omega_T = 1.0
T = 0.1
b_bar = 0.5
theta_bar = 3.0

[distribution]
family = uniform

[simulate]
n = 300

[sweep]
parameter = omega_T
start = 0.5
stop = 2.0
steps = 7
"""

TOWNS_CFG = """\
[treasury]
budget = 1.0

[municipality north]
omega_b = 1.0
c = 1.0
omega_T = 0.0
T = 0.0
b_bar = 10.0
theta_bar = 10.0
theta = 1.0

[municipality south]
omega_b = 1.0
c = 1.0
omega_T = 0.0
T = 0.0
b_bar = 10.0
theta_bar = 10.0
theta = 2.0
"""


def run(*args):
    argv = [str(a) for a in args]
    print(f"$ bailrule {' '.join(argv)}")
    code = main(argv)
    print(f"  -> exit {code}\n")
    return code


with tempfile.TemporaryDirectory() as tmp:
    tmp = Path(tmp)
    rule_cfg = tmp / "rule.cfg"
    rule_cfg.write_text(RULE_CFG)
    towns_cfg = tmp / "towns.cfg"
    towns_cfg.write_text(TOWNS_CFG)
    out = tmp / "out"

    run("rulecard", "--config", rule_cfg, "--out-dir", out)
    run("simulate", "--config", rule_cfg, "--seed", "7", "--noise", "0.02",
        "--out-dir", out)
    run("audit", "--config", rule_cfg, "--data", out / "episodes.csv",
        "--tol", "0.08", "--out-dir", out)
    run("sweep", "--config", rule_cfg, "--out-dir", out)
    run("allocate", "--config", towns_cfg, "--strict", "--out-dir", out)

    print("artifacts:")
    for f in sorted(out.iterdir()):
        print(f"  {f.name:22} {f.stat().st_size:>7,} bytes")

    print("\n--- rulecard.txt " + "-" * 40)
    print((out / "rulecard.txt").read_text())
    print("--- audit_report.txt " + "-" * 36)
    print((out / "audit_report.txt").read_text())
    print("--- allocation.txt " + "-" * 38)
    print((out / "allocation.txt").read_text())
