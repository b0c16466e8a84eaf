"""The twelve acceptance criteria, one test each.

Each test prints a single PASS/FAIL line (also collected into the terminal
summary) before asserting.
"""

import itertools
import os
import subprocess
import sys

from conftest import ACCEPTANCE_LINES, FIXTURES
from qconn import verify as V
from qconn.laws import check_quantale_laws, well_above_by_definition
from qconn.quantale import EXT, OmegaQuantale


def report(n: int, title: str, ok: bool, detail: str) -> None:
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'} {title} ({detail})"
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert ok, line


def _reports_line(reports):
    return "; ".join(f"{r.instances} instances, {r.failures} failures" for r in reports)


def test_criterion_01_quantale_laws():
    details, ok = [], True
    for size in (0, 1, 2):
        rep = check_quantale_laws(OmegaQuantale([str(i) for i in range(size)]))
        ok &= rep.ok and all(r.exhaustive for r in rep.results)
        details.append(f"Omega({size}) exhaustive")
    for q in (EXT, OmegaQuantale(["0", "1", "2"])):
        rep = check_quantale_laws(q, budget=1000, seed=0)
        sampled = [r for r in rep.results if not r.exhaustive]
        ok &= rep.ok and all(r.cases >= 1000 for r in sampled)
        details.append(f"{q!r} min sampled cases {min((r.cases for r in sampled), default=0)}")
    report(1, "quantale laws", ok, ", ".join(details))


def test_criterion_02_well_above_rule():
    pairs = disagreements = 0
    for size in (0, 1, 2):
        q = OmegaQuantale([str(i) for i in range(size)])
        carrier = q.enumerate()
        for b, a in itertools.product(carrier, repeat=2):
            pairs += 1
            disagreements += q.well_above(b, a) != well_above_by_definition(q, b, a, carrier)
    ok = disagreements == 0 and pairs == 2 * 2 + 3 * 3 + 6 * 6
    report(2, "well-above rule vs definition", ok, f"{pairs} pairs, {disagreements} disagreements")


def test_criterion_03_metrization_fidelity():
    counts = [len(V.all_topologies(n)) for n in range(1, 5)]
    rep = V.verify_metrization(V.Corpus.parse("exhaustive:4"))
    ok = counts == [1, 4, 29, 355] and rep.ok and rep.instances == 389
    report(3, "metrization fidelity", ok, f"counts {counts}, {_reports_line([rep])}")


def test_criterion_04_connectedness_equivalence():
    rep = V.verify_connectedness_equivalence(V.Corpus.parse("exhaustive:4"), full_scales_upto=3)
    report(4, "connectedness equivalence", rep.ok and rep.exhaustive, _reports_line([rep]))


def test_criterion_05_compactness():
    rep = V.verify_compactness_theorem(V.Corpus.parse("exhaustive:4"))
    report(5, "connected iff uniformly connected", rep.ok and rep.exhaustive, _reports_line([rep]))


def test_criterion_06_sigma_lemma():
    corpus = V.Corpus.parse("exhaustive:3")
    reps = [V.verify_sigma_lemma(corpus, s) for s in ("all", "uniform", "bounded")]
    ok = all(r.ok and r.exhaustive for r in reps)
    report(6, "four-condition lemma (all, uniform, bounded)", ok, _reports_line(reps))


def test_criterion_07_component_properties():
    rep = V.verify_component_properties(V.Corpus.parse("exhaustive:4"))
    report(7, "components clopen and closed", rep.ok and rep.exhaustive, _reports_line([rep]))


def test_criterion_08_grid_surrogate():
    rep = V.verify_interval_and_product(grid_sizes=range(2, 10), max_factors=0)
    ok = rep.ok and rep.instances == 8 * 4 * 4
    report(8, "grid connected iff spacing <= eps", ok, _reports_line([rep]))


def test_criterion_09_structure_theorems():
    reps = V.verify_structure_theorems(count=500, seed=0)
    ok = all(r.ok and r.instances >= 500 for r in reps)
    report(9, "closure, chain-union, common-point", ok, _reports_line(reps))


def test_criterion_10_products():
    rep = V.verify_interval_and_product(grid_sizes=(), factor_points=3, max_factors=3)
    n = 34
    expected = n + n * (n + 1) // 2 + n * (n + 1) * (n + 2) // 6
    ok = rep.ok and rep.instances == expected
    report(10, "products of up to 3 factors", ok, _reports_line([rep]))


def test_criterion_11_weak_strict_agree():
    rep = V.verify_alterstep(V.Corpus.parse("exhaustive:3"))
    report(11, "weak and strict steps agree", rep.ok and rep.exhaustive, _reports_line([rep]))


CLI_RUNS = [
    ["metrize", "--in", FIXTURES / "sierpinski.json"],
    ["components", "--in", FIXTURES / "sierpinski.json", "--canonical"],
    ["components", "--in", FIXTURES / "grid5.json", "--uniform", "1/4", "--variant", "weak"],
    ["walk", "--in", FIXTURES / "grid5.json", "--uniform", "1/4", "--variant", "weak", "--from", "0", "--to", "1"],
    ["connected", "--in", FIXTURES / "discrete2.json"],
    ["uniform-connected", "--in", FIXTURES / "two_point_infinity.json"],
    ["sigma-connected", "--in", FIXTURES / "grid5.json", "--system", "bounded:1/4"],
    ["sigma-connected", "--in", FIXTURES / "sierpinski.json", "--system", "bounded-exists"],
    ["verify", "--theorem", "connectedness-equivalence", "--corpus", "random:4:15", "--seed", "3"],
    ["verify", "--theorem", "structure", "--corpus", "random:4:20", "--seed", "1"],
    ["verify", "--theorem", "sigma-lemma", "--system", "bounded", "--corpus", "exhaustive:2"],
    ["laws", "--quantale", "ext_rational", "--seed", "5", "--budget", "300"],
    ["laws", "--quantale", "omega:2"],
    ["random", "--kind", "topology", "--points", "6", "--seed", "11"],
    ["random", "--kind", "flagg", "--points", "4", "--seed", "11"],
    ["random", "--kind", "metric", "--points", "5", "--seed", "11"],
]


def _cli(argv, hashseed):
    env = dict(os.environ, PYTHONHASHSEED=str(hashseed))
    return subprocess.run(
        [sys.executable, "-m", "qconn", *map(str, argv), "--format", "json"],
        capture_output=True, env=env, check=False,
    )


def test_criterion_12_cli_determinism():
    mismatched = []
    for argv in CLI_RUNS:
        a, b = _cli(argv, 1), _cli(argv, 2)
        if a.returncode not in (0, 1) or a.stdout != b.stdout or a.returncode != b.returncode or not a.stdout:
            mismatched.append(" ".join(map(str, argv[:2])))
    report(12, "CLI determinism", not mismatched, f"{len(CLI_RUNS)} commands, mismatches: {mismatched or 'none'}")
