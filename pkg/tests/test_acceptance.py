"""Acceptance suite: one PASS/FAIL line per criterion, at the stated tolerances."""

import time
from dataclasses import replace

import numpy as np
import pytest

from ellint import elliptic_gamma, theta
from ellint.identities import (
    IdentityKind,
    QuadratureSettings,
    bh1_limit_probe,
    integrate_side,
    main_as_selberg,
    selberg_lhs_spec,
    selberg_transform_params,
    sides_for,
    verify_bh,
    verify_classical,
    verify_dixon,
    verify_lemma_sym,
    verify_main,
    verify_selberg,
)
from ellint.quadrature import JacobiRule, TorusGrid, jacobi_integrate, tree_sum
from ellint.sampling import (
    sample_bh1,
    sample_bh2,
    sample_classical,
    sample_dixon,
    sample_lemma,
    sample_main,
    sample_selberg,
)


def rel(a, b):
    return abs(a - b) / max(abs(a), abs(b))


def run_batch(fn, seeds):
    reports = [fn(s) for s in seeds]
    return reports, max(r.rel_err for r in reports), all(r.converged for r in reports)


def test_gamma_functional_equations(acceptance_line):
    start = time.perf_counter()
    worst = 0.0
    for seed in range(100):
        rng = np.random.default_rng(seed)
        p, q = (r * np.exp(2j * np.pi * rng.uniform()) for r in rng.uniform(0.05, 0.6, 2))
        z = rng.uniform(0.3, 1.5) * np.exp(2j * np.pi * rng.uniform())
        g = elliptic_gamma(z, p, q)
        worst = max(
            worst,
            rel(g * elliptic_gamma(p * q / z, p, q), 1.0),
            rel(elliptic_gamma(q * z, p, q), theta(z, p) * g),
            rel(elliptic_gamma(p * z, p, q), theta(z, q) * g),
        )
    elapsed = time.perf_counter() - start
    ok = worst < 1e-12 and elapsed < 5
    acceptance_line("1 gamma reflection and difference equations", ok, f"max rel {worst:.2e}, {elapsed:.2f}s")
    assert ok


def test_theta_sum_lemma(acceptance_line):
    start = time.perf_counter()
    worst = forms = 0.0
    for n in (1, 2, 3, 4):
        for seed in range(50):
            rep = verify_lemma_sym(n, sample_lemma(n, seed))
            worst = max(worst, rep.rel_err)
            forms = max(forms, rep.extra["forms_rel_err"])
    elapsed = time.perf_counter() - start
    ok = worst < 1e-10 and forms < 1e-12 and elapsed < 10
    acceptance_line("2 theta-sum lemma n=1..4", ok,
                    f"sum {worst:.2e}, forms {forms:.2e}, {elapsed:.2f}s")
    assert ok


def test_elliptic_beta_integral(acceptance_line):
    start = time.perf_counter()
    cfg = QuadratureSettings(target_rel=1e-10)
    _, worst, conv = run_batch(
        lambda s: verify_selberg(IdentityKind.SelbergEval, sample_selberg(1, False, s), settings=cfg), range(20))
    elapsed = time.perf_counter() - start
    ok = worst < 1e-9 and conv and elapsed < 30
    acceptance_line("3 elliptic beta integral", ok, f"max rel {worst:.2e}, {elapsed:.2f}s")
    assert ok


def test_selberg_evaluation_and_transformation(acceptance_line):
    start = time.perf_counter()
    _, ev, conv1 = run_batch(
        lambda s: verify_selberg(IdentityKind.SelbergEval, sample_selberg(2, False, s)), range(5))
    ev_time = time.perf_counter() - start
    _, tr, conv2 = run_batch(
        lambda s: verify_selberg(IdentityKind.SelbergTransform, sample_selberg(1, True, s)), range(10))
    inv = 0.0
    for s in range(10):
        params = sample_selberg(1, True, s)
        twice = selberg_transform_params(selberg_transform_params(params))
        spec, pre = selberg_lhs_spec(params)
        spec2, pre2 = selberg_lhs_spec(twice)
        inv = max(inv, rel(pre * integrate_side(spec).value, pre2 * integrate_side(spec2).value))
    ok = ev < 1e-6 and tr < 1e-8 and inv < 1e-9 and conv1 and conv2 and ev_time < 300
    acceptance_line("4 Selberg evaluation n=2, transformation n=1, involution", ok,
                    f"eval {ev:.2e} ({ev_time:.1f}s), transform {tr:.2e}, involution {inv:.2e}")
    assert ok


def test_dixon_transformation(acceptance_line):
    worst = flip = 0.0
    conv = True
    for s in range(10):
        params = sample_dixon(1, 1, s)
        a = verify_dixon(params)
        b = verify_dixon(params, sqrt_sign=-1)
        worst = max(worst, a.rel_err)
        flip = max(flip, abs(a.rel_err - b.rel_err))
        conv = conv and a.converged and b.converged
    ok = worst < 1e-8 and flip < 1e-10 and conv
    acceptance_line("5 Dixon transformation n=m=1 with branch flip", ok,
                    f"max rel {worst:.2e}, branch change {flip:.2e}")
    assert ok


def test_main_transformation(acceptance_line):
    start = time.perf_counter()
    _, r10, c10 = run_batch(lambda s: verify_main(sample_main(1, 0, s)), range(20))
    lhs_gap = 0.0
    for s in range(20):
        params = sample_main(1, 0, s)
        spec, pre, _, _ = sides_for(IdentityKind.MainTheorem, params)
        sspec, spre = selberg_lhs_spec(main_as_selberg(params))
        lhs_gap = max(lhs_gap, rel(pre * integrate_side(spec).value, spre * integrate_side(sspec).value))
    _, r11, c11 = run_batch(lambda s: verify_main(sample_main(1, 1, s)), range(20))
    cfg = QuadratureSettings(target_rel=1e-7)
    _, r21, c21 = run_batch(lambda s: verify_main(sample_main(2, 1, s), settings=cfg), range(5))
    _, r22, c22 = run_batch(lambda s: verify_main(sample_main(2, 2, s), settings=cfg), range(5))
    elapsed = time.perf_counter() - start
    ok = (r10 < 1e-9 and lhs_gap < 1e-12 and r11 < 1e-8 and r21 < 1e-6 and r22 < 1e-6
          and c10 and c11 and c21 and c22 and elapsed < 900)
    acceptance_line("6 main transformation", ok,
                    f"(1,0) {r10:.2e} lhs {lhs_gap:.2e}, (1,1) {r11:.2e}, (2,1) {r21:.2e}, "
                    f"(2,2) {r22:.2e}, {elapsed:.1f}s")
    assert ok


def test_basic_hypergeometric_limits(acceptance_line):
    _, k1, c1 = run_batch(lambda s: verify_bh(1, sample_bh1(1, 1, 1, s)), range(10))
    _, k2, c2 = run_batch(lambda s: verify_bh(1, sample_bh1(1, 1, 2, s)), range(10))
    probe = bh1_limit_probe(sample_bh1(1, 1, 2, 0), p_values=(1e-3, 1e-4))
    g3, g4 = probe[0][2], probe[1][2]
    _, b2, c3 = run_batch(lambda s: verify_bh(2, sample_bh2(1, 1, s, which=2)), range(10))
    _, b3, c4 = run_batch(lambda s: verify_bh(3, sample_bh2(1, 1, s, which=3)), range(10))
    ok = (max(k1, k2, b2, b3) < 1e-8 and g3 < 0.05 and g3 / g4 >= 5 and c1 and c2 and c3 and c4)
    acceptance_line("7 basic hypergeometric limits", ok,
                    f"k=1 {k1:.2e}, k=2 {k2:.2e}, gap {g3:.2e} -> {g4:.2e}, "
                    f"symmetry-broken {b2:.2e} / {b3:.2e}")
    assert ok


def test_classical_limit(acceptance_line):
    start = time.perf_counter()
    kinds = (IdentityKind.ClassicalEuler, IdentityKind.ClassicalContiguous)
    worst = {}
    conv = True
    for kind, which in zip(kinds, ("euler", "contiguous")):
        for n, count in ((1, 10), (2, 5)):
            _, r, c = run_batch(lambda s: verify_classical(kind, sample_classical(n, which, s)), range(count))
            worst[which, n] = r
            conv = conv and c
    elapsed = time.perf_counter() - start
    ok = (worst["euler", 1] < 1e-9 and worst["euler", 2] < 1e-6 and worst["contiguous", 1] < 1e-9
          and worst["contiguous", 2] < 1e-6 and conv and elapsed < 300)
    acceptance_line("8 classical Selberg-type identities", ok,
                    ", ".join(f"{w} n={n} {v:.2e}" for (w, n), v in worst.items()) + f", {elapsed:.1f}s")
    assert ok


def test_quadrature_properties(acceptance_line, tmp_path):
    import subprocess
    import sys

    import scipy.special as sp

    orth = 0.0
    for N in (8, 16, 32, 64):
        z = TorusGrid(1, N).nodes()
        for k in range(-N + 1, N):
            orth = max(orth, abs(tree_sum(z**k) / N - (k == 0)))
    rng = np.random.default_rng(0)
    beta = 0.0
    for alpha, bet in rng.uniform(0.2, 4.0, size=(20, 2)):
        val = jacobi_integrate(lambda x: np.ones(len(x)), JacobiRule(0.0, 1.0, alpha, bet, 8), 1)
        beta = max(beta, rel(val, sp.beta(alpha, bet)))
    outs = []
    for threads in ("1", "2", "8"):
        path = tmp_path / f"report{threads}.json"
        subprocess.run([sys.executable, "-m", "ellint", "verify", "--identity", "all", "--seeds", "0..2",
                        "--output", str(path)], check=True, env={"ELLINT_THREADS": threads, "PATH": ""})
        outs.append(path.read_bytes())
    same = outs[0] == outs[1] == outs[2]
    ok = orth < 1e-14 and beta < 1e-12 and same
    acceptance_line("9 quadrature orthogonality, Beta reproduction, worker-count determinism", ok,
                    f"orth {orth:.1e}, beta {beta:.1e}, identical {same}")
    assert ok
