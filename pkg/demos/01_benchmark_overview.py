"""
Generate the benchmark corpus and look at its shape
===================================================

The package ships a deterministic generator for a ten-project benchmark
of labeled code comments. Debt comments are rare (a few percent of each
project), and each project has its own debt idiom: some projects admit
debt in the shared vocabulary everyone uses ("todo", "fixme", ...), some
mostly in project-local phrasing that only reviewer feedback can teach.
"""

from pathlib import Path

from satdsurvey.datagen import write_benchmark
from satdsurvey.corpus import discover_corpora

out = Path("demo_output/benchmark")
write_benchmark(out, seed=7)
corpora = discover_corpora(out)

print(f"{'project':<12} {'comments':>9} {'debt':>6} {'prevalence':>11}")
for corpus in corpora:
    print(
        f"{corpus.name:<12} {len(corpus):>9} {corpus.positives():>6} "
        f"{100 * corpus.prevalence():>10.2f}%"
    )
print(f"{'TOTAL':<12} {sum(len(c) for c in corpora):>9} {sum(c.positives() for c in corpora):>6}")

# a few raw comments, debt and clean
sample = corpora[-1]
debt = next(c for c in sample.comments if c.label)
clean = next(c for c in sample.comments if not c.label)
print(f"\na debt comment from {sample.name}:\n  {debt.text}")
print(f"a clean comment from {sample.name}:\n  {clean.text}")
