"""Executable verification suites.

Each check runs one acceptance property end to end on seeded random
instances and reports pass/fail with a short detail line.  The suites group
the checks by subject: s2 projection machinery, s3 free-space geometry,
s4 duality, s5 quotients, s6 the exact model on the line.  The acceptance
test module and the ``verify`` CLI subcommand both run these functions, so a
fixed seed reproduces bit-identical reports.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from random import Random

from . import mean_projection as mp
from . import real_line
from .duality import hat_norm_check, linearity_test, pair
from .free_norm import free_norm_dual, free_norm_primal
from .funcspec import parse_function
from .molecule import EtaPair, Molecule, beta, canonicalize, delta, eta, eta_inverse, is_kernel
from .quotient import dist_to_linear, quotient_oracle_1d, theta_isometry_check
from .random_instances import (
    rnd_kernel_molecule,
    rnd_molecule,
    rnd_point,
    rnd_pw_affine,
    rnd_sample,
)
from .spaces import EXACT, FLOAT, LinearMap, Point, Space, origin, point, unit_vector


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.name}: {self.detail}"


def _spaces_under_test(include_l2: bool):
    for dim in (1, 2, 3):
        kinds = ("l1", "l2", "linf") if include_l2 else ("l1", "linf")
        for kind in kinds:
            yield Space(dim, kind)


def _rel_close(a, b, tol=1e-9) -> bool:
    a, b = float(a), float(b)
    return abs(a - b) <= tol * max(1.0, abs(a), abs(b))


# ---------------------------------------------------------------------------
# criterion 1: the point embedding is an isometry


def check_delta_isometry(seed: int = 42, include_l2: bool = True) -> CheckResult:
    rng = Random(seed)
    failures = []
    total = 0
    for space in _spaces_under_test(include_l2):
        exact = space.is_polyhedral()
        for _ in range(12):
            x = rnd_point(rng, space.dim, nonzero=True)
            y = rnd_point(rng, space.dim, nonzero=True)
            if x.coords == y.coords:
                y = y + point(*([1] * space.dim))
            total += 1
            mode = EXACT if exact else FLOAT
            nx = free_norm_dual(delta(space, x), mode).value
            nd = free_norm_dual(delta(space, x) - delta(space, y), mode).value
            if exact:
                ok = nx == space.norm(x) and nd == space.dist(x, y)
            else:
                ok = _rel_close(nx, space.norm(x)) and _rel_close(nd, space.dist(x, y))
            if not ok:
                failures.append(f"{space.norm_kind} dim {space.dim}: x={x.coords}")
    detail = f"{total - len(failures)}/{total} point/pair isometries"
    if failures:
        detail += f"; first failure {failures[0]}"
    return CheckResult("delta-isometry", not failures, detail)


# ---------------------------------------------------------------------------
# criteria 2 and 4 share one molecule stream


def _duality_stream(seed: int, count: int, include_l2: bool):
    rng = Random(seed)
    spaces = list(_spaces_under_test(include_l2))
    for i in range(count):
        space = spaces[i % len(spaces)]
        yield space, rnd_molecule(rng, space, max_terms=6)


def check_strong_duality(seed: int = 42, count: int = 200, include_l2: bool = True) -> CheckResult:
    failures = []
    for space, m in _duality_stream(seed, count, include_l2):
        mode = EXACT if space.is_polyhedral() else FLOAT
        d = free_norm_dual(m, mode).value
        p = free_norm_primal(m, mode).value
        ok = d == p if mode == EXACT else _rel_close(d, p)
        if not ok:
            failures.append(f"{space.norm_kind} dim {space.dim}: dual {d} primal {p}")
    detail = f"{count - len(failures)}/{count} molecules with dual == primal"
    if failures:
        detail += f"; first failure {failures[0]}"
    return CheckResult("strong-duality", not failures, detail)


def check_beta_contraction(seed: int = 42, count: int = 200, include_l2: bool = True) -> CheckResult:
    failures = 0
    for space, m in _duality_stream(seed, count, include_l2):
        mode = EXACT if space.is_polyhedral() else FLOAT
        norm = free_norm_primal(m, mode).value
        b = space.norm(beta(m))
        ok = b <= norm if mode == EXACT else float(b) <= float(norm) + 1e-9
        if not ok:
            failures += 1
    return CheckResult(
        "beta-contraction", failures == 0, f"{count - failures}/{count} molecules with ||beta(m)|| <= ||m||"
    )


# ---------------------------------------------------------------------------
# criterion 3: exact identities on the line


def check_real_line(seed: int = 42, count: int = 200) -> CheckResult:
    rng = Random(seed)
    space = Space(1, "l1")
    failures = 0
    for i in range(count):
        m = rnd_molecule(rng, space, max_terms=6, max_den=12)
        if i % 2 == 0:
            m = canonicalize(m - delta(space, beta(m)))  # force a kernel molecule
        s = real_line.phi_map(m)
        norm_ok = real_line.l1_norm(s) == free_norm_dual(m, EXACT).value
        factor_ok = real_line.integral(s) == Fraction(beta(m).coords[0])
        kernel_ok = is_kernel(m) == (real_line.integral(s) == 0)
        if not (norm_ok and factor_ok and kernel_ok):
            failures += 1
    return CheckResult(
        "real-line-exactness",
        failures == 0,
        f"{count - failures}/{count} molecules with exact norm/integral/kernel identities",
    )


# ---------------------------------------------------------------------------
# criterion 5: sampled Lipschitz constant equals the unit-ball pairing sup


def check_hat_isometry(seed: int = 42, count: int = 50) -> CheckResult:
    rng = Random(seed)
    failures = []
    for i in range(count):
        if i % 2 == 0:
            domain = Space(1, "l1")
        else:
            domain = Space(2, "l1" if i % 4 == 1 else "linf")
        codomain = Space(1, "l1") if i % 3 else Space(2, "linf")
        f = rnd_pw_affine(rng, domain, codomain)
        sample = rnd_sample(rng, domain, 5)
        report = hat_norm_check(f, sample, mode=EXACT)
        if report.gap != 0:
            failures.append(f"gap {report.gap} for {f.source!r}")
    detail = f"{count - len(failures)}/{count} functions with exact pairing/Lipschitz equality"
    if failures:
        detail += f"; first failure {failures[0]}"
    return CheckResult("hat-isometry", not failures, detail)


# ---------------------------------------------------------------------------
# criterion 6: the annihilation criterion for linearity


def check_linearity(seed: int = 42, maps: int = 20, trials: int = 200) -> CheckResult:
    rng = Random(seed)
    failures = []
    for _ in range(maps):
        n = rng.randint(1, 3)
        m = rng.randint(1, 3)
        T = LinearMap(
            tuple(tuple(round(rng.uniform(-3, 3), 3) for _ in range(n)) for _ in range(m))
        )
        f = mp.as_function(T, Space(n, "l2"), Space(m, "linf" if m > 1 else "l2"))
        report = linearity_test(f, trials=trials, tol=1e-8, seed=seed)
        if not report.is_linear:
            failures.append(f"false witness for linear {T.rows}")
    nonlinear = ["abs(x0)", "max(x0, 2*x0)", "x0 + sin(x0)"]
    for text in nonlinear:
        f = parse_function(text, Space(1, "l2"), Space(1, "l2"))
        report = linearity_test(f, trials=trials, tol=1e-8, seed=seed)
        if report.is_linear:
            failures.append(f"missed nonlinearity of {text!r}")
        elif float(f.codomain.norm(report.pairing)) <= 1e-3:
            failures.append(f"weak witness for {text!r}")
    total = maps + len(nonlinear)
    detail = f"{total - len(failures)}/{total} linearity verdicts"
    if failures:
        detail += f"; first failure {failures[0]}"
    return CheckResult("linearity-criterion", not failures, detail)


# ---------------------------------------------------------------------------
# criterion 7: the projection onto linear maps


def check_projection(seed: int = 42) -> CheckResult:
    rng = Random(seed)
    failures = []

    # machine-precision recovery of linear maps (constant-window shortcut)
    for _ in range(20):
        n = rng.randint(1, 3)
        m = rng.randint(1, 3)
        T = LinearMap(tuple(tuple(rng.uniform(-3, 3) for _ in range(n)) for _ in range(m)))
        f = mp.as_function(T, Space(n, "l2"), Space(m, "linf" if m > 1 else "l2"))
        got = mp.project_linear(f)
        err = max(
            abs(float(got.entry(i, j)) - float(T.entry(i, j)))
            for i in range(m)
            for j in range(n)
        )
        if err > 1e-12:
            failures.append(f"linear recovery error {err:.2e}")

    # oscillation-perturbed slopes on the line
    domain = Space(1, "l2")
    perturbed = []
    for _ in range(4):
        c = round(rng.uniform(-3, 3), 3)
        a = round(rng.uniform(0.3, 1.0), 3)
        perturbed.append((f"{c}*x0 + {a}*sin(x0)", [c]))
    perturbed.append(("1.5*x0 + 0.5*sin(x0); -2*x0", [1.5, -2.0]))
    for text, slopes in perturbed:
        codomain = Space(len(slopes), "linf" if len(slopes) > 1 else "l2")
        f = parse_function(text, domain, codomain, mode=FLOAT)
        got = mp.project_linear(f)
        err = max(abs(float(got.entry(k, 0)) - s) for k, s in enumerate(slopes))
        if err > 1e-3:
            failures.append(f"perturbed recovery error {err:.2e} for {text!r}")

    # abs projects to zero
    f_abs = parse_function("abs(x0)", domain, Space(1, "l2"))
    t_abs = mp.project_linear(f_abs)
    if abs(float(t_abs.entry(0, 0))) > 1e-3:
        failures.append(f"abs projected to {t_abs.entry(0, 0)}")

    # the norm-equivalence bound on every admissible test function
    sample = [point(Fraction(k, 4)) for k in range(-12, 13)]
    for text in ["2*x0 + sin(x0)", "abs(x0)", "1*x0"]:
        f = parse_function(text, domain, Space(1, "l2"))
        rep = mp.decompose(f, sample, tol=1e-6)
        if not (rep.lower_ok and rep.upper_ok):
            failures.append(f"norm-equivalence bound failed for {text!r}")

    total = 20 + len(perturbed) + 1 + 3
    detail = f"{total - len(failures)}/{total} projection recoveries and bounds"
    if failures:
        detail += f"; first failure {failures[0]}"
    return CheckResult("projection", not failures, detail)


# ---------------------------------------------------------------------------
# criterion 8: quotient distance equals the kernel-ball supremum


def check_theta(seed: int = 42, count: int = 50) -> CheckResult:
    rng = Random(seed)
    failures = []
    for i in range(count):
        if i < 30:
            domain = Space(1, "l1")
        else:
            domain = Space(2, "l1" if i % 2 else "linf")
        codomain = Space(1, "l1") if i % 5 else Space(2, "linf")
        f = rnd_pw_affine(rng, domain, codomain)
        sample = rnd_sample(rng, domain, rng.randint(3, 6))
        try:
            report = theta_isometry_check(f, sample, mode=EXACT)
        except Exception as exc:  # IsometryViolation or engine failure
            failures.append(f"{type(exc).__name__} for {f.source!r}")
            continue
        if report.gap != 0:
            failures.append(f"gap {report.gap}")
            continue
        if domain.dim == 1:
            oracle = quotient_oracle_1d(f, sample)
            if Fraction(oracle) != Fraction(report.distance.value):
                failures.append(f"oracle {oracle} vs LP {report.distance.value}")
    detail = f"{count - len(failures)}/{count} exact primal/dual quotient agreements"
    if failures:
        detail += f"; first failure {failures[0]}"
    return CheckResult("theta-isometry", not failures, detail)


# ---------------------------------------------------------------------------
# criterion 9: the eta decomposition and its Lipschitz constants


def _exact_norm(m: Molecule) -> Fraction:
    return free_norm_primal(m, EXACT).value


def check_eta(seed: int = 42, count: int = 100) -> CheckResult:
    rng = Random(seed)
    failures = 0
    for i in range(count):
        space = Space(1 + i % 2, "l1" if i % 4 < 2 else "linf")
        p = EtaPair(rnd_point(rng, space.dim, max_den=4), rnd_kernel_molecule(rng, space, 2))
        q = EtaPair(rnd_point(rng, space.dim, max_den=4), rnd_kernel_molecule(rng, space, 2))
        mp_, mq = eta(p), eta(q)
        back = eta_inverse(mp_)
        round_ok = (
            back.base.coords == beta(mp_).coords
            and back.base.coords == tuple(Fraction(c) for c in p.base.coords)
            and back.kernel_part == p.kernel_part
            and eta(back) == mp_
        )
        lhs = _exact_norm(mp_ - mq)
        rhs = space.dist(p.base, q.base) + _exact_norm(p.kernel_part - q.kernel_part)
        contraction_ok = lhs <= rhs
        bp, bq = eta_inverse(mp_), eta_inverse(mq)
        inv_dist = space.dist(bp.base, bq.base) + _exact_norm(bp.kernel_part - bq.kernel_part)
        expansion_ok = inv_dist <= 3 * lhs
        if not (round_ok and contraction_ok and expansion_ok):
            failures += 1
    return CheckResult(
        "eta-bounds",
        failures == 0,
        f"{count - failures}/{count} pairs with exact round-trips and 1-/3-Lipschitz bounds",
    )


# ---------------------------------------------------------------------------
# suites


ALL_CHECKS = {
    "delta-isometry": check_delta_isometry,
    "strong-duality": check_strong_duality,
    "real-line-exactness": check_real_line,
    "beta-contraction": check_beta_contraction,
    "hat-isometry": check_hat_isometry,
    "linearity-criterion": check_linearity,
    "projection": check_projection,
    "theta-isometry": check_theta,
    "eta-bounds": check_eta,
}

SUITES = {
    "s2": ["projection"],
    "s3": ["delta-isometry", "strong-duality", "beta-contraction", "eta-bounds"],
    "s4": ["hat-isometry", "linearity-criterion"],
    "s5": ["theta-isometry"],
    "s6": ["real-line-exactness"],
}


def run_suite(suite: str = "all", seed: int = 42, include_l2: bool = True) -> list[CheckResult]:
    if suite == "all":
        names = list(ALL_CHECKS)
    elif suite in SUITES:
        names = SUITES[suite]
    else:
        raise ValueError(f"unknown suite {suite!r}; expected all|s2|s3|s4|s5|s6")
    results = []
    for name in names:
        fn = ALL_CHECKS[name]
        if name in ("delta-isometry", "strong-duality", "beta-contraction"):
            results.append(fn(seed=seed, include_l2=include_l2))
        else:
            results.append(fn(seed=seed))
    return results
