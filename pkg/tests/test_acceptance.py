"""Acceptance gate: one printed PASS/FAIL line per criterion.

Runs the command-line build of the default model (rho = 2, K = 1.5,
j_max = 8) once, verifies it at the default budgets and checks each
criterion at its stated tolerance.
"""
import math
import time

import pytest

from baker_lab import Model, ModelParams, Mutation, eval_F, iterate, modelfile, verify_superattracting
from baker_lab.cli import main
from baker_lab.dynamics import ESCAPING, PERIOD2, check_forward_images
from baker_lab.verification import check_rng, sample_u0, verify_model

SAMPLES = 10_000
SEED = 0


@pytest.fixture(scope="module")
def say(pytestconfig):
    capman = pytestconfig.pluginmanager.getplugin("capturemanager")

    def emit(n, ok, detail):
        with capman.global_and_fixture_disabled():
            print(f"\n[acceptance {n}] {'PASS' if ok else 'FAIL'}: {detail}", flush=True)

    return emit


@pytest.fixture(scope="module")
def built(tmp_path_factory):
    out = tmp_path_factory.mktemp("acc") / "model.json"
    t0 = time.perf_counter()
    code = main(["build", "--rho", "2", "--K", "1.5", "--levels", "8", "--out", str(out)])
    elapsed = time.perf_counter() - t0
    return out, code, elapsed


@pytest.fixture(scope="module")
def model(built):
    return modelfile.load(built[0])


@pytest.fixture(scope="module")
def report(model):
    t0 = time.perf_counter()
    rep = verify_model(model, samples=SAMPLES, seed=SEED)
    return rep, time.perf_counter() - t0


def _entries(rep, suffixes, levels=range(9)):
    return [rep.entry(f"level{j}.{s}") for j in levels for s in suffixes]


def test_1_build_gate(built, model, say):
    _, code, elapsed = built
    n = model.n_local_models
    eps_ok = all(math.isfinite(s.spec.eps) and s.spec.eps > 0 for lv in model.built_levels for s in lv.subdiscs)
    ok = code == 0 and elapsed < 60 and n == 2**9 - 1 and eps_ok
    say(1, ok, f"CLI build {elapsed:.1f} s (< 60), {n} local models (want 511), eps selected everywhere: {eps_ok}")
    assert ok


def test_2_superattracting_cycles(model, report, say):
    worst = 0.0
    count = 0
    quad_ok = True
    for j in range(8):
        for c in model.level(j).crit_points:
            omega = eval_F(c, model)
            worst = max(worst, abs(eval_F(omega, model) - c) / max(1.0, abs(c)))
            quad_ok &= verify_superattracting(c, model).passed
            count += 1
    anchor = iterate(model.params.zeta0, 5, model)
    anchor_ok = anchor.points[:3] == [model.params.zeta0, 0, 0] and anchor.classification == PERIOD2
    ok = count == 2**9 - 2 and worst <= 1e-9 and quad_ok and anchor_ok
    say(2, ok, f"{count} critical points, max |F^2(c)-c|/max(1,|c|) = {worst:.2e} (<= 1e-9), "
               f"quadratic test all pass: {quad_ok}, anchor zeta0 -> 0 -> 0: {anchor_ok}")
    assert ok


def test_3_glueing_exactness(report, say):
    rep, _ = report
    es = _entries(rep, ["glueing.outer", "glueing.inner"])
    worst = max(e.worst for e in es)
    ok = all(e.passed and e.tol == 1e-12 for e in es) and min(e.samples for e in es) >= 512
    say(3, ok, f"max boundary defect |h - f0| relative to local scale = {worst:.2e} (<= 1e-12), "
               f"512 samples per circle")
    assert ok


def test_4_quasiregularity(report, model, say):
    rep, _ = report
    bound = model.params.dilatation_bound
    x = max(e.worst for e in _entries(rep, ["dilatation.X"]))
    inner = max(e.worst for e in _entries(rep, ["dilatation.inner"]))
    v = max(e.worst for e in _entries(rep, ["dilatation.V"]))
    u0 = rep.entry("u0.dilatation").worst
    ok = x <= bound + 1e-4 and inner <= 1e-6 and v <= 1e-8 and u0 <= 1e-8
    ok &= all(e.samples >= SAMPLES for e in _entries(rep, ["dilatation.X"]))
    say(4, ok, f"|mu_F| on X_j {x:.4f} (<= {bound + 1e-4:.4f}), inner {inner:.1e} (<= 1e-6), "
               f"V_j {v:.1e} and U0 {u0:.1e} (<= 1e-8)")
    assert ok


def test_5_forward_images(model, say):
    bad = 0
    for j in range(8):
        bad += len(check_forward_images(j, 8 - j, SAMPLES, model, seed=SEED).violations)
    ok = bad == 0
    say(5, ok, f"F^n(X_j) in V_(j+n) for all j + n <= 8 with {SAMPLES} samples per level: {bad} violations")
    assert ok


def test_6_escape_and_invariance(model, report, say):
    rep, _ = report
    mu = model.params.mu
    z = sample_u0(model.params, SAMPLES, check_rng(SEED, "acceptance.u0"))
    exact = all(eval_F(complex(p), model) == mu * complex(p) for p in z)
    escaping = all(iterate(complex(p), 40, model).classification == ESCAPING for p in z if p != 0)
    annuli = [rep.entry(n) for n in ("annuli.in_u0", "annuli.discs_avoid_skeleton", "annuli.witness_ratio",
                                     "annuli.modulus")]
    ratio = math.sqrt(mu)
    ok = exact and escaping and all(e.passed for e in annuli) and ratio >= model.params.rho
    say(6, ok, f"{SAMPLES} U0 samples: F = mu z exactly {exact}, escaping {escaping}; "
               f"witness annuli j <= 8 contained, ratio mu^(1/2) = {ratio:g} >= rho = {model.params.rho:g}")
    assert ok


def test_7_inductive_hypotheses(report, say):
    rep, _ = report
    es = _entries(rep, ["hypA", "hypC.analytic", "hypC.sampled", "count"])
    es += _entries(rep, ["hypB.distinct", "hypB.sibling_bound"], range(8))
    counts = [int(rep.entry(f"level{j}.count").worst) for j in range(9)]
    min_sep = min(e.worst for e in _entries(rep, ["hypB.distinct"], range(8)))
    ok = all(e.passed for e in es) and counts == [2**j for j in range(9)]
    say(7, ok, f"(A), (B) and (C) hold on all levels; #Omega_j = {counts}; min relative separation of "
               f"Omega_(j+1) {min_sep:.2e} > 0; sibling bound 4 mu r sqrt(eps) recorded")
    assert ok


def _failing(model):
    return sorted(e.check for e in verify_model(model, samples=2000, seed=SEED).failing())


def test_8_negative_controls(say):
    tight = ModelParams.from_rho(2.0, K=1.005, j_max=3)
    doubled = _failing(Model(tight, mutation=Mutation(eps_factor=2.0)).build_all())
    swapped = _failing(Model(ModelParams.from_rho(2.0, j_max=3), mutation=Mutation(swap_targets_level=2)).build_all())
    good = ModelParams.from_rho(2.0, j_max=3)
    big = ModelParams(mu=good.mu, rho=good.rho, K=good.K, zeta0=good.zeta0,
                      r0=1.05 * (abs(good.zeta0) - math.sqrt(good.mu)), j_max=3, validate=False)
    oversized = _failing(Model(big).build_all())
    ok = (doubled == ["level1.dilatation.X"] and swapped == ["level1.period2.residual"]
          and oversized == ["annuli.discs_avoid_skeleton", "annuli.in_u0"])
    say(8, ok, f"doubled eps fails {doubled}; swapped back-target fails {swapped}; "
               f"oversized base disc fails {oversized}")
    assert ok


def test_9_determinism(built, tmp_path, say, capsys):
    path = tmp_path / "again.json"
    assert main(["build", "--rho", "2", "--K", "1.5", "--levels", "8", "--out", str(path)]) == 0
    same_model = path.read_bytes() == built[0].read_bytes()
    reports = []
    for k in range(2):
        out = tmp_path / f"r{k}.json"
        main(["verify", str(built[0]), "--samples", str(SAMPLES), "--seed", str(SEED), "--report", str(out)])
        reports.append(out.read_bytes())
    images = []
    for k, threads in enumerate(("1", "4")):
        out = tmp_path / f"i{k}.ppm"
        main(["render", str(built[0]), "--out", str(out), "--center=-181+0i", "--width", "400",
              "--px", "96x96", "--threads", threads])
        images.append(out.read_bytes())
    capsys.readouterr()
    ok = same_model and reports[0] == reports[1] and images[0] == images[1]
    say(9, ok, f"model file identical {same_model}, report identical {reports[0] == reports[1]}, "
               f"image identical {images[0] == images[1]}")
    assert ok


def test_full_verification_time(report, say):
    rep, elapsed = report
    ok = rep.passed and elapsed < 300
    say("2-7", ok, f"full verification {elapsed:.1f} s (< 300), {len(rep.entries)} checks, "
                   f"{len(rep.failing())} failing")
    assert ok
