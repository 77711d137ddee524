#!/usr/bin/env python3
"""Solve for the pinned reference parameter vector.

The dollar-scale knobs (alpha, beta, policy_unit_cost, C0) are solved against
the frozen calibration targets; the structural disease/coupling shape is
scanned over a small candidate set.  Run this only to regenerate
src/adhersim/data/reference_params.txt; the shipped file is the frozen output
of one such run.

Component decomposition: for unit alpha, unit |beta| and unit policy_unit_cost
the engine is linear in each channel, so per preset
    net_savings = alpha * SS + |beta| * BS - u * PI
with SS, BS, PI computed by three engine passes.  The baseline golden pins
C_base = 3953.07 exactly (C0 absorbs), so ROI comparisons reduce to linear
inequalities in (alpha, |beta|, u) plus the compressed-baseline shift
alpha * dID.
"""

from __future__ import annotations

import sys
from dataclasses import replace

import numpy as np

sys.path.insert(0, "src")

from adhersim.analytics import breakeven_gamma, roi
from adhersim.costmodel import simulate_trajectory
from adhersim.params import ModelParams
from adhersim.scenarios import (
    DEFAULT_BASELINE_DECAY,
    PRESET_NAMES,
    StressKind,
    apply_stress,
    build_preset,
)

BASELINE_TARGET = 3953.07
EARLY_TARGET = 3602.26
LOW_IMPACT_FLOOR = 4600.0
COMPRESSION = 0.85
INFLATION = 1.2

BASE_STRUCT = dict(
    discount_rate_rho=0.03,
    disease_max_Dmax=0.95,
    disease_midpoint_s0=0.0,
    adherence_baseline_A0=0.55,
    health_weight_lambda=0.0,
    horizon_T=10.0,
)


def params_with(struct, alpha, beta, u, c0):
    kw = dict(BASE_STRUCT)
    kw.update(struct)
    return ModelParams(
        baseline_cost_C0=c0,
        disease_cost_alpha=alpha,
        adherence_cost_beta=beta,
        policy_unit_cost=u,
        **kw,
    )


def components(struct, policy, compression=1.0):
    """(SS, BS, PI) for one policy vs the flat baseline."""
    base = build_preset("baseline")
    if compression != 1.0:
        policy = apply_stress(policy, StressKind.ACCELERATED_PROGRESSION, compression)
        base = apply_stress(base, StressKind.ACCELERATED_PROGRESSION, compression)
    p_ss = params_with(struct, 1.0, 0.0, 0.0, 0.0)
    ss = simulate_trajectory(p_ss, base).final_cost - simulate_trajectory(p_ss, policy).final_cost
    p_bs = params_with(struct, 0.0, -1.0, 0.0, 0.0)
    bs = simulate_trajectory(p_bs, base).final_cost - simulate_trajectory(p_bs, policy).final_cost
    p_pi = params_with(struct, 0.0, 0.0, 1.0, 0.0)
    pi = simulate_trajectory(p_pi, policy).final_cost
    return ss, bs, pi


def severity_targets_ok(struct):
    p = params_with(struct, 1.0, 0.0, 0.0, 0.0)
    d10 = {n: simulate_trajectory(p, build_preset(n)).severity[-1] for n in PRESET_NAMES}
    ok = (
        d10["early_adherence"] < 0.695
        and d10["adaptive_nudges"] < 0.695
        and d10["delayed"] > 0.875
        and d10["regressive"] > 0.875
        and d10["low_impact"] > 0.875
    )
    return ok, d10


def solve(struct):
    presets = {n: build_preset(n) for n in PRESET_NAMES}
    comp = {n: components(struct, presets[n]) for n in PRESET_NAMES}
    comp_c = {n: components(struct, presets[n], COMPRESSION) for n in PRESET_NAMES}

    p_id = params_with(struct, 1.0, 0.0, 0.0, 0.0)
    id_flat = simulate_trajectory(p_id, presets["baseline"]).final_cost
    id_comp = simulate_trajectory(
        p_id, apply_stress(presets["baseline"], StressKind.ACCELERATED_PROGRESSION, COMPRESSION)
    ).final_cost
    d_id = id_comp - id_flat  # compressed-baseline cost shift per unit alpha

    def net(name, alpha, bmag, u, inflation=1.0, compressed=False):
        ss, bs, pi = (comp_c if compressed else comp)[name]
        return alpha * ss + bmag * bs - u * pi * inflation

    early_savings = BASELINE_TARGET - EARLY_TARGET
    low_excess_required = LOW_IMPACT_FLOOR - BASELINE_TARGET

    best = None
    ss_e, bs_e, pi_e = comp["early_adherence"]
    for u in np.arange(28.0, 46.01, 0.5):
        for bmag in np.arange(20.0, 260.01, 2.0):
            alpha = (early_savings - bmag * bs_e + u * pi_e) / ss_e
            if alpha <= 0:
                continue
            cb = BASELINE_TARGET
            cb_c = BASELINE_TARGET + alpha * d_id
            n_e = early_savings
            n_a = net("adaptive_nudges", alpha, bmag, u)
            n_d = net("delayed", alpha, bmag, u)
            n_r = net("regressive", alpha, bmag, u)
            n_l = net("low_impact", alpha, bmag, u)
            if not (n_e >= n_a > n_d > n_r > n_l):
                continue
            if n_r >= 0 or n_l >= -low_excess_required:
                continue
            n_a_inf = net("adaptive_nudges", alpha, bmag, u, inflation=INFLATION)
            n_r_inf = net("regressive", alpha, bmag, u, inflation=INFLATION)
            n_l_inf = net("low_impact", alpha, bmag, u, inflation=INFLATION)
            if n_a_inf <= 0 or n_r_inf >= 0 or n_l_inf >= 0:
                continue
            # compression: ROI' >= ROI  <=>  net' * C_b >= net * C_b'
            n_e_c = net("early_adherence", alpha, bmag, u, compressed=True)
            n_a_c = net("adaptive_nudges", alpha, bmag, u, compressed=True)
            n_l_c = net("low_impact", alpha, bmag, u, compressed=True)
            e_gain = n_e_c * cb - n_e * cb_c
            a_gain = n_a_c * cb - n_a * cb_c
            l_worsen = n_l * cb_c - n_l_c * cb  # positive when low-impact ROI drops
            if e_gain <= 0 or a_gain <= 0 or l_worsen <= 0:
                continue
            margin = min(
                n_a_inf / 10.0,
                (-low_excess_required - n_l) / 5.0,
                (n_a - n_d) / 10.0,
                (n_d - n_r) / 10.0,
                e_gain / 20000.0,
                a_gain / 20000.0,
                l_worsen / 20000.0,
            )
            if best is None or margin > best[0]:
                best = (margin, u, bmag, alpha)
    return best, comp, comp_c, d_id


def report(struct, u, bmag, alpha):
    presets = {n: build_preset(n) for n in PRESET_NAMES}
    p0 = params_with(struct, alpha, -bmag, u, 0.0)
    c0 = BASELINE_TARGET - simulate_trajectory(p0, presets["baseline"]).final_cost
    p = params_with(struct, alpha, -bmag, u, c0)
    c_base = simulate_trajectory(p, presets["baseline"]).final_cost

    print(f"\n=== struct {struct} ===")
    print(f"alpha={alpha:.4f} beta={-bmag:.1f} u={u:.2f} C0={c0:.4f}")
    print(f"baseline C(10) = {c_base:.4f}")
    rois, costs = {}, {}
    for n in PRESET_NAMES:
        t = simulate_trajectory(p, presets[n])
        costs[n], rois[n] = t.final_cost, roi(c_base, t.final_cost)
        print(f"  {n:16s} C={t.final_cost:9.2f}  ROI={rois[n]:7.3f}%  "
              f"D(10)={t.severity[-1]:.4f}  A(10)={t.adherence[-1]:.3f}")
    print(f"early target {EARLY_TARGET}: {costs['early_adherence']:.2f}; "
          f"low floor {LOW_IMPACT_FLOOR}: {costs['low_impact']:.2f}")
    print("ordering ok:",
          rois["early_adherence"] >= rois["adaptive_nudges"] > rois["delayed"]
          > rois["regressive"] > rois["low_impact"], " low<0:", rois["low_impact"] < 0)

    print("inflation 1.2:")
    for n in ("early_adherence", "adaptive_nudges", "delayed", "regressive", "low_impact"):
        pol = apply_stress(presets[n], StressKind.COST_INFLATION, INFLATION)
        r = roi(c_base, simulate_trajectory(p, pol).final_cost)
        print(f"  {n:16s} {rois[n]:7.3f}% -> {r:7.3f}%")

    print("compression 0.85:")
    base_c = apply_stress(presets["baseline"], StressKind.ACCELERATED_PROGRESSION, COMPRESSION)
    c_base_c = simulate_trajectory(p, base_c).final_cost
    print(f"  compressed baseline C(10) = {c_base_c:.2f}")
    for n in ("early_adherence", "adaptive_nudges", "delayed", "regressive", "low_impact"):
        pol = apply_stress(presets[n], StressKind.ACCELERATED_PROGRESSION, COMPRESSION)
        r = roi(c_base_c, simulate_trajectory(p, pol).final_cost)
        print(f"  {n:16s} {rois[n]:7.3f}% -> {r:7.3f}%  delta={r - rois[n]:+.4f}pp")

    print("break-even gamma*:")
    for d in (0.10, 0.15, 0.25):
        print(f"  delta={d:.2f}: gamma* = {breakeven_gamma(p, presets['early_adherence'], d)}")

    for n in ("regressive", "low_impact"):
        pol = replace(presets[n], baseline_decay=DEFAULT_BASELINE_DECAY)
        t = simulate_trajectory(p, pol)
        print(f"decaying {n}: A(10) = {t.adherence[-1]:.4f}")
    return p


def main():
    candidates = []
    for k in (1.1, 1.25, 1.4, 1.6):
        for k_eta in (5.6, 6.3, 7.0, 7.7):
            struct = dict(disease_steepness_k=k, severity_coupling_eta=k_eta / k)
            ok, d10 = severity_targets_ok(struct)
            if not ok:
                continue
            candidates.append(struct)
    print(f"{len(candidates)} structural candidates pass severity targets")

    results = []
    for struct in candidates:
        best, *_ = solve(struct)
        if best:
            results.append((best[0], struct, best))
            print(f"  k={struct['disease_steepness_k']:.2f} eta={struct['severity_coupling_eta']:.3f}"
                  f" -> margin {best[0]:.3f} (u={best[1]:.1f}, beta={-best[2]:.0f}, alpha={best[3]:.1f})")
        else:
            print(f"  k={struct['disease_steepness_k']:.2f} eta={struct['severity_coupling_eta']:.3f}"
                  f" -> infeasible")

    if not results:
        print("NO FEASIBLE STRUCTURE")
        return
    results.sort(key=lambda r: -r[0])
    _, struct, (margin, u, bmag, alpha) = results[0]
    report(struct, u, bmag, alpha)


if __name__ == "__main__":
    main()
