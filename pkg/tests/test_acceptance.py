"""Acceptance gate: the eight headline guarantees of the toolkit.

Each criterion prints one ``criterion N (...): PASS`` / ``FAIL`` line on the
real terminal (bypassing capture) and then asserts, so a single run of this
module gives the complete scorecard.
"""

import math

import numpy as np
import pytest

from tenseg import (DesignBounds, SegmentGeometry, SpringParams, SpringSpec,
                    cable_lengths, cable_lengths_squared,
                    classify_home_stability, energy, energy_profile, optimize,
                    scan_singularities, singular_angles, singularity_condition,
                    total_energy)
from tenseg.cli import main
from tenseg.energy import Stability

from conftest import STABLE_FLAT, UNIT, UNSTABLE_TALL, random_geometry, random_angle


@pytest.fixture(scope="module")
def default_report():
    """The design sweep at default resolutions (shared by criteria 4, 5, 7)."""
    return optimize(bounds=DesignBounds(), springs=SpringSpec(), workers=1)


@pytest.fixture()
def verdict(capsys):
    def _verdict(number: int, title: str, ok: bool, detail: str = ""):
        line = f"criterion {number} ({title}): {'PASS' if ok else 'FAIL'}"
        with capsys.disabled():
            print(line, flush=True)
        assert ok, detail or line
    return _verdict


def test_criterion_1_unit_geometry_singular_angles(verdict):
    """The all-ones segment has four loop-1 singular angles with closed forms."""
    s7 = math.sqrt(7.0)
    expected = sorted([
        math.atan((1.0 - s7) / (-1.0 - s7)) - math.pi,
        -math.pi / 4.0,
        math.atan((1.0 + s7) / (s7 - 1.0)),
        3.0 * math.pi / 4.0,
    ])
    found = singular_angles(UNIT)
    angle_errors = [abs(a - e) for a, e in zip(found.loop1, expected)]
    sing_error = abs(found.alpha_sing - math.pi / 4.0)
    ok = (len(found.loop1) == 4
          and max(angle_errors) <= 1e-9
          and sing_error <= 1e-9)
    verdict(1, "unit-geometry singular angles", ok,
            f"angle errors {angle_errors}, alpha_sing error {sing_error:.3g}")


def test_criterion_2_roots_match_dense_scan(verdict):
    """Polynomial roots of 100 random designs agree with a 10^6-sample scan."""
    rng = np.random.default_rng(421)
    failures = []
    for case in range(100):
        g = random_geometry(rng)
        found = singular_angles(g)
        crossings = [a for a, m in zip(found.loop1, found.multiplicities)
                     if m % 2 == 1]
        brackets = scan_singularities(g, n=1_000_000)
        if len(brackets) != len(crossings):
            failures.append(f"case {case}: {len(crossings)} crossing roots "
                            f"but {len(brackets)} scan brackets")
            continue
        for root, (lo, hi) in zip(sorted(crossings), brackets):
            if abs(root - 0.5 * (lo + hi)) > 1e-5:
                failures.append(f"case {case}: root {root} vs bracket "
                                f"({lo}, {hi})")
    verdict(2, "singularities vs dense scan", not failures,
            "; ".join(failures[:5]))


def test_criterion_3_reference_stability_verdicts(verdict):
    """A flat-plate segment is stable at home, the tall half-width one is not."""
    springs_flat = SpringParams.for_geometry(STABLE_FLAT, 1.0, 1.0, 0.4)
    springs_tall = SpringParams.for_geometry(UNSTABLE_TALL, 1.0, 1.0, 0.4)
    flat = classify_home_stability(STABLE_FLAT, springs_flat)
    tall = classify_home_stability(UNSTABLE_TALL, springs_tall)
    ok = (flat.stability is Stability.STABLE
          and tall.stability is Stability.UNSTABLE)
    verdict(3, "reference stability verdicts", ok,
            f"flat -> {flat.stability.value} (curvature {flat.curvature:.4g}), "
            f"tall -> {tall.stability.value} (curvature {tall.curvature:.4g})")


def test_criterion_4_optimum_reaches_the_cap_with_flat_ends(verdict,
                                                            default_report):
    """Every per-taper optimum deflects to ~pi/2 and uses zero end links."""
    report = default_report
    shortfalls = [math.pi / 2.0 - r.alpha_sing for r in report.best]
    end_links = [r.x[0] for r in report.best]
    ok = (len(report.best) == 20
          and max(shortfalls) <= 0.02
          and all(h1 == 0.0 for h1 in end_links))
    verdict(4, "optimum reaches the deflection cap with flat ends", ok,
            f"max shortfall {max(shortfalls):.4g} rad, "
            f"end links {sorted(set(end_links))}")


def test_criterion_5_energy_trends_of_the_best_family(verdict, default_report):
    """The best family should keep a constant energy step and shed total energy.

    Checks two trends over the 20 taper samples: the climb
    ``E(alpha_sing) - E(0)`` stays constant to within 5% relative, and the
    total energy decreases monotonically as the taper ratio approaches 1.
    """
    report = default_report
    deltas = [r.energy_at_sing - r.energy_at_zero for r in report.best]
    mean = sum(deltas) / len(deltas)
    spread = (max(deltas) - min(deltas)) / abs(mean)
    totals = [r.total_energy for r in report.best]
    rises = [(a, b) for a, b in zip(totals, totals[1:]) if b > a + 1e-12]
    ok = len(deltas) >= 20 and spread <= 0.05 and not rises
    verdict(5, "energy trends of the best family", ok,
            f"energy step spans {min(deltas):.4g}..{max(deltas):.4g} "
            f"(spread {spread:.0%} of the mean, limit 5%); total energy "
            f"rises in {len(rises)} of 19 steps, from {totals[0]:.4g} at "
            f"the smallest taper to {totals[-1]:.4g} at taper 1")


def test_criterion_6_analytic_cross_checks(verdict):
    """Cable lengths, the singularity condition and the energy integral
    each agree with an independent evaluation route."""
    rng = np.random.default_rng(90125)
    problems = []

    worst_cable = 0.0
    for _ in range(1000):
        g = random_geometry(rng)
        alpha = random_angle(rng)
        direct = np.asarray(cable_lengths(g, alpha))
        squared = np.sqrt(np.asarray(cable_lengths_squared(g, alpha)))
        worst_cable = max(worst_cable,
                          float(np.max(np.abs(direct - squared) / squared)))
    if worst_cable > 1e-12:
        problems.append(f"cable-length routes diverge by {worst_cable:.3g}")

    step = 1e-6
    worst_cond = 0.0
    for _ in range(100):
        g = random_geometry(rng)
        alpha = random_angle(rng)
        analytic = float(singularity_condition(g, alpha))
        ahead = cable_lengths_squared(g, alpha + step)[0]
        behind = cable_lengths_squared(g, alpha - step)[0]
        fd = (ahead - behind) / (2.0 * step)
        worst_cond = max(worst_cond, abs(analytic - fd) / abs(analytic))
    if worst_cond > 1e-6:
        problems.append(f"condition vs finite difference off by {worst_cond:.3g}")

    worst_energy = 0.0
    for _ in range(20):
        g = random_geometry(rng)
        springs = SpringParams.for_geometry(g, 1.0, 1.0, 0.4)
        alpha_sing = singular_angles(g).alpha_sing
        value = total_energy(g, springs, alpha_sing=alpha_sing)
        grid = np.linspace(-alpha_sing, alpha_sing, 1_000_001)
        dense = float(np.trapezoid(energy(g, springs, grid), grid))
        worst_energy = max(worst_energy, abs(value - dense) / abs(dense))
    if worst_energy > 1e-6:
        problems.append(f"energy integral off by {worst_energy:.3g}")

    verdict(6, "analytic cross-checks", not problems, "; ".join(problems))


def test_criterion_7_best_designs_have_clean_energy_wells(verdict,
                                                          default_report):
    """Each per-taper optimum has its global minimum at home and no interior
    local maximum before the singularity."""
    failures = []
    for record in default_report.best:
        h1, h2, h3, l1, _ = record.x
        g = SegmentGeometry(h1=h1, h2=h2, h3=h3, l1=l1, l2=record.l2)
        springs = SpringParams.for_geometry(g, 1.0, 1.0, 0.4)
        profile = energy_profile(
            g, springs, n=201,
            alpha_range=(-record.alpha_sing, record.alpha_sing))
        e = profile.energies
        if int(np.argmin(e)) != 100:
            failures.append(f"taper {record.lam:.3g}: minimum at sample "
                            f"{int(np.argmin(e))}, not the centre")
        interior = [i for i in range(101, 200)
                    if e[i] > e[i - 1] and e[i] > e[i + 1]]
        if interior:
            failures.append(f"taper {record.lam:.3g}: interior maxima at "
                            f"samples {interior}")
    verdict(7, "best designs have clean energy wells", not failures,
            "; ".join(failures[:5]))


def test_criterion_8_sweep_output_is_worker_independent(verdict, tmp_path):
    """The full-resolution sweep writes byte-identical files for 1 or 8 workers."""
    serial = tmp_path / "serial"
    parallel = tmp_path / "parallel"
    assert main(["optimize", "--output", str(serial), "--workers", "1"]) == 0
    assert main(["optimize", "--output", str(parallel), "--workers", "8"]) == 0
    names = ("best.csv", "lambda_curve.csv", "energy_curve.csv")
    different = [name for name in names
                 if (serial / name).read_bytes() != (parallel / name).read_bytes()]
    verdict(8, "sweep output is worker-independent", not different,
            f"files differing between worker counts: {different}")
