"""End-to-end acceptance battery.

Each test runs one named check from vertexset.verify and prints its
PASS/FAIL line with the measured value (visible under pytest -s); the
battery is the same one `vertexset verify all` runs.  Results are
memoized so the battery executes once even though every check gets its
own test.
"""

from vertexset.verify import SUITES, _CHECKS, run_check

_RESULTS: dict = {}


def _run(name: str) -> None:
    res = _RESULTS.get(name)
    if res is None:
        res = run_check(name)
        _RESULTS[name] = res
        status = "PASS" if res.passed else "FAIL"
        print(f"{status} {name}: {res.measured} ({res.seconds:.1f}s)")
    assert res.passed, f"{name}: {res.measured}"


def test_curvature_identity_oracle():
    _run("curvature-identity")


def test_jet_factorizations():
    _run("jet-structure")


def test_origin_branch_geometry():
    _run("origin-branches")


def test_discriminant_directions():
    _run("discriminant-angles")


def test_sector_relabeling():
    _run("pairing-flip")


def test_vertex_count_transition():
    _run("count-transition")


def test_degenerate_vertex_level():
    _run("degenerate-level")


def test_cup_section_geometry():
    _run("cup-section")


def test_fixed_surface_branches():
    _run("fixture-branches")


def test_census_intersection_consistency():
    _run("cross-pipeline")


def test_battery_covers_every_check():
    assert SUITES["all"] == tuple(_CHECKS)
    assert len(SUITES["all"]) == 10
    covered = {name for suite, names in SUITES.items() if suite != "all"
               for name in names}
    assert covered == set(_CHECKS)
