"""
Comparing stopping rules on one shared reading path
===================================================

Stopping rules never influence which comment is read next, so a single
run can report where each rule would have halted: the estimate-driven
target rule, the consecutive-miss rule, and the knee/slope-ratio rule.
"""

from pathlib import Path

from satdsurvey.corpus import discover_corpora
from satdsurvey.datagen import write_benchmark
from satdsurvey.harness import RigConfig, run_survey_cell

data = Path("demo_output/benchmark")
if not data.exists():
    write_benchmark(data, seed=7)
corpora = discover_corpora(data)

config = RigConfig(
    rules=("target@0.9", "target@0.95", "ros:10", "cormack:12"),
    cap_fraction=0.75,
)
records, curve = run_survey_cell(corpora, "jmeter", seed=11, repeat=0, config=config)

print(f"{'rule':<12} {'reads':>6} {'found':>6} {'recall%':>8} {'cost%':>6}")
for r in sorted(records, key=lambda r: r.reads):
    capped = " (gave up waiting)" if r.capped else ""
    print(f"{r.rule:<12} {r.reads:>6} {r.found:>6} {r.recall:>8.1f} {r.cost:>6.1f}{capped}")
