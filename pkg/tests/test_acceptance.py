"""One test per acceptance criterion; the terminal summary prints a PASS/FAIL line for each."""

import json
import os
import subprocess
import sys

import test_critical
import test_jets
import test_prolong
from semple.catalog import CENSUS, LEVEL4_MULTI, NORMAL_FORMS
from semple.critical import enumerate_classes, rvt_code
from semple.curves import parse_curve
from semple.prolong import canonical_chart, prolong_diffeo
from semple.symmetry import equivalent, orbit_count
from semple.tower import prolong_curve

# Every comparison below is exact equality over the rationals (tolerance 0).
# The only numeric knobs are pinned here.
PROPERTY_MIN_EXAMPLES = 200
VERIFY_SEED = 11


def test_criterion_1_normal_form_codes(record_criterion):
    bad = []
    for level, word, _, curves in NORMAL_FORMS:
        for text in curves:
            got = str(rvt_code(parse_curve(text), level))
            if got != word:
                bad.append((text, word, got))
    record_criterion(1, not bad, "%d curves coded" % sum(len(r[3]) for r in NORMAL_FORMS)
                     + ("; mismatches %s" % bad if bad else ""))
    assert not bad


def test_criterion_2_census(record_criterion):
    counts = {k: len(enumerate_classes(k)) for k in (1, 2, 3, 4)}
    words = {str(w) for w in enumerate_classes(4)}
    missing = sorted(set(LEVEL4_MULTI) - words)
    ok = counts == CENSUS and not missing
    record_criterion(2, ok, "census %s, named level-4 classes missing: %s" % (counts, missing))
    assert ok


def test_criterion_3_low_level_orbits(record_criterion):
    totals, certified = [], True
    for k in (1, 2, 3):
        total = 0
        for w in enumerate_classes(k):
            oc = orbit_count(str(w))
            assert oc.exact is not None
            total += oc.exact
            certified &= all(link["certificate"] for orb in oc.orbits for link in orb.chain)
        totals.append(total)
    rvt = orbit_count("RVT").exact
    ok = totals == [1, 2, 7] and rvt == 2 and certified
    record_criterion(3, ok, "totals %s, RVT=%s, certificates %s" % (totals, rvt, certified))
    assert ok


def test_criterion_4_level_four_spot_checks(record_criterion):
    observed = {w: orbit_count(w).exact for w in ("RVVV", "RVTT", "RRVT", "RVT")}
    expected = {"RVVV": 2, "RVTT": 4, "RRVT": 2, "RVT": 2}
    ok = observed == expected and observed["RRVT"] == observed["RVT"]
    record_criterion(4, ok, "observed %s, expected %s" % (observed, expected))
    assert ok


def _point(text, level):
    return prolong_curve(parse_curve(text), level).point


def test_criterion_5_equivalence(record_criterion):
    p, q = _point("t^3, t^5, t^7", 3), _point("t^3, t^5, 0", 3)
    v1 = equivalent(p, q, seed=VERIFY_SEED)
    reverified = v1.witness is not None and \
        prolong_diffeo(v1.witness, canonical_chart(p)) == canonical_chart(q)
    v2 = equivalent(_point("t^3, t^4, t^5", 3), _point("t^3, t^4, 0", 3), seed=VERIFY_SEED)
    ok = v1.verdict == "Equivalent" and reverified and v2.verdict == "Distinguished"
    record_criterion(5, ok, "RVV pair %s (witness re-verified %s), RVT pair %s by %s"
                     % (v1.verdict, reverified, v2.verdict, v2.invariant))
    assert ok


PROPERTIES = [
    test_jets.test_series_ring_laws,
    test_jets.test_multiseries_ring_laws,
    test_jets.test_jet_group_laws,
    test_prolong.test_functoriality,
    test_prolong.test_projection_equivariance,
    test_prolong.test_curve_equivariance,
    test_critical.test_code_invariant_under_diffeomorphisms,
    test_critical.test_curve_code_invariant_under_diffeomorphisms,
    test_critical.test_code_invariant_under_reparametrization,
]


def test_criterion_6_property_suites(record_criterion):
    failures = []
    for prop in PROPERTIES:
        n = prop._hypothesis_internal_use_settings.max_examples
        if n < PROPERTY_MIN_EXAMPLES:
            failures.append("%s runs only %d cases" % (prop.__name__, n))
            continue
        try:
            prop()
        except Exception as exc:  # report every suite, not just the first failure
            failures.append("%s: %s" % (prop.__name__, type(exc).__name__))
    record_criterion(6, not failures, "%d suites at >=%d cases%s" % (
        len(PROPERTIES), PROPERTY_MIN_EXAMPLES, "; " + "; ".join(failures) if failures else ""))
    assert not failures


def test_criterion_7_deterministic_verify(record_criterion):
    argv = [sys.executable, "-m", "semple.cli", "verify", "--levels", "1..3", "--json",
            "--seed", str(VERIFY_SEED)]
    env = {k: v for k, v in os.environ.items() if k != "SEMPLE_LOG"}
    runs = [subprocess.run(argv, capture_output=True, check=False, env=env) for _ in range(2)]
    same = runs[0].stdout == runs[1].stdout
    report = json.loads(runs[0].stdout)
    ok = same and runs[0].returncode == 0 and report["result"]["failed"] == 0
    record_criterion(7, ok, "byte-identical %s, %d checks passed, exit %d"
                     % (same, report["result"]["passed"], runs[0].returncode))
    assert ok
