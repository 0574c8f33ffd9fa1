"""Verification suites: every structural identity of the library, evaluated
on one chart and recorded as (name, residual, tolerance, passed)."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .actions import GxAPoint, canonical_form_matrix, momentum_JG, momentum_JK, twist, left_translate
from .normalform import (
    NormalFormError,
    _h_elements,
    kks_form,
    splitting_alpha0,
    splitting_K_subset_Gmu,
    symplectic_normal_space,
    tangent_level_chain,
    witt_artin,
    direct_splitting_residual,
)
from .slices import SliceChart, check_case_flags, metric_invariance_residual
from .subspace import numerical_rank
from .tube import TubeChart


@dataclass
class Options:
    seed: int = 0
    tol: float = 1e-9
    tol_fd: float = 1e-6
    samples: int = 50
    fd_step: float = 1e-5


@dataclass
class CheckLog:
    """Ordered record of executed and skipped checks."""

    checks: list = field(default_factory=list)
    skipped: list = field(default_factory=list)

    def add(self, module, name, residual, tol, samples=1):
        residual = float(residual)
        ok = bool(np.isfinite(residual) and residual < tol)
        self.checks.append(
            {"module": module, "name": name, "residual": residual, "tol": float(tol), "samples": int(samples), "passed": ok}
        )
        return ok

    def add_bound(self, module, name, value, lower, samples=1):
        """Record a check of the form value > lower (an infinite value passes)."""
        value = float(value)
        ok = bool(not np.isnan(value) and value > lower)
        self.checks.append(
            {"module": module, "name": name, "value": value, "lower": float(lower), "samples": int(samples), "passed": ok}
        )
        return ok

    def skip(self, module, name, reason):
        self.skipped.append({"module": module, "name": name, "reason": reason})

    @property
    def passed(self):
        return all(c["passed"] for c in self.checks)

    def summary(self):
        failed = [f"{c['module']}.{c['name']}" for c in self.checks if not c["passed"]]
        return {"executed": len(self.checks), "failed": failed, "skipped": len(self.skipped), "all_passed": self.passed}


def _max(values):
    return max((float(v) for v in values), default=0.0)


def _subgroup_sample(chart: SliceChart, sub, rng):
    xi = sub.columns @ rng.normal(size=sub.dim) * 2.0 if sub.dim else np.zeros(chart.group.dim)
    return chart.group.exp(xi)


# -- liealg --------------------------------------------------------------


def check_liealg(chart: SliceChart, opts: Options, log: CheckLog):
    G = chart.group
    d = G.dim
    rng = np.random.default_rng([opts.seed, 1])
    c = G.structure
    # cyclic sum of [[E_i, E_j], E_l] in structure-constant form
    jac = np.einsum("ijm,mln->ijln", c, c)
    jac = jac + np.transpose(jac, (1, 2, 0, 3)) + np.transpose(jac, (2, 0, 1, 3))
    log.add("liealg", "jacobi_identity", np.abs(jac).max(initial=0.0), 1e-10)
    log.add("liealg", "basis_rank", d - numerical_rank(G.basis.reshape(d, -1).T) if d else 0, 0.5)
    closure = _max(
        np.abs(np.tensordot(c[i, j], G.basis, 1) - (G.basis[i] @ G.basis[j] - G.basis[j] @ G.basis[i])).max()
        for i in range(d)
        for j in range(d)
    )
    log.add("liealg", "bracket_closure", closure, 1e-10)
    M = G.metric
    spd = max(float(np.abs(M - M.T).max(initial=0.0)), -float(np.linalg.eigvalsh(M).min()) if d else 0.0, 0.0)
    log.add("liealg", "metric_symmetric_positive", spd, 1e-12)
    hs = [_subgroup_sample(chart, chart.h, rng) for _ in range(opts.samples)]
    log.add(
        "liealg", "metric_Ad_H_invariant", _max(np.abs(G.Ad_matrix(h).T @ M @ G.Ad_matrix(h) - M).max(initial=0.0) for h in hs),
        opts.tol, opts.samples,
    )

    worst_exp = worst_member = worst_coad = worst_gen = worst_adstar = 0.0
    for _ in range(opts.samples):
        xi = rng.normal(size=d)
        xi *= rng.uniform(0.0, 5.0) / max(np.linalg.norm(xi), 1e-300)
        g = G.exp(xi)
        worst_exp = max(worst_exp, np.abs(g @ G.exp(-xi) - G.identity()).max())
        worst_member = max(worst_member, G.membership_residual(g))
        nu = rng.normal(size=d)
        h = G.haar_sample(rng)
        worst_member = max(worst_member, G.membership_residual(h))
        worst_coad = max(worst_coad, np.abs(G.Ad_star(h, G.Ad_star(np.linalg.inv(h), nu)) - nu).max(initial=0.0))
        eta = rng.normal(size=d)
        worst_adstar = max(worst_adstar, abs(G.ad_star(xi, nu) @ eta - nu @ G.bracket(xi, eta)))
        t = opts.fd_step
        fd = (G.coadjoint_action(G.exp(t * xi), nu) - G.coadjoint_action(G.exp(-t * xi), nu)) / (2 * t)
        worst_gen = max(worst_gen, np.abs(fd + G.ad_star(xi, nu)).max(initial=0.0))
    log.add("liealg", "exp_inverse", worst_exp, 1e-10, opts.samples)
    log.add("liealg", "group_membership", worst_member, 1e-10, opts.samples)
    log.add("liealg", "coadjoint_is_action", worst_coad, 1e-10, opts.samples)
    log.add("liealg", "ad_star_pairing", worst_adstar, 1e-10, opts.samples)
    log.add("liealg", "coadjoint_generator", worst_gen, opts.tol_fd, opts.samples)


# -- actions ---------------------------------------------------------------


def check_actions(chart: SliceChart, opts: Options, log: CheckLog):
    action = chart.action
    G = chart.group
    d, n = G.dim, action.dimQ
    rng = np.random.default_rng([opts.seed, 2])
    worst_rep = worst_act = worst_equiv = worst_pair = worst_dual = worst_form = 0.0
    min_form_sv = np.inf
    for _ in range(opts.samples):
        xi, eta = rng.normal(size=d), rng.normal(size=d)
        R = action.rho_matrix
        worst_rep = max(worst_rep, np.abs(R(G.bracket(xi, eta)) - (R(xi) @ R(eta) - R(eta) @ R(xi))).max(initial=0.0))
        t = opts.fd_step
        fd = (action.act(G.exp(t * xi)) - action.act(G.exp(-t * xi))) / (2 * t)
        worst_act = max(worst_act, np.abs(fd - R(xi)).max(initial=0.0))
        q, p = rng.normal(size=n), rng.normal(size=n)
        g = G.haar_sample(rng)
        q2, p2 = action.lift(g, q, p)
        worst_equiv = max(worst_equiv, np.abs(action.momentum(q2, p2) - G.coadjoint_action(g, action.momentum(q, p))).max(initial=0.0))
        worst_pair = max(worst_pair, abs(action.diamond(q, p) @ xi - p @ action.infinitesimal_action(xi, q)))
        worst_dual = max(worst_dual, abs(action.infinitesimal_dual_action(xi, p) @ q + p @ action.infinitesimal_action(xi, q)))
        nA = chart.A.dim
        Om = canonical_form_matrix(G, rng.normal(size=d), nA)
        worst_form = max(worst_form, np.abs(Om + Om.T).max())
        min_form_sv = min(min_form_sv, np.linalg.svd(Om, compute_uv=False).min())
    log.add("actions", "representation_property", worst_rep, 1e-10, opts.samples)
    log.add("actions", "act_derivative_is_rho", worst_act, opts.tol_fd, opts.samples)
    log.add("actions", "momentum_equivariance", worst_equiv, 1e-10, opts.samples)
    log.add("actions", "diamond_pairing", worst_pair, 1e-10, opts.samples)
    log.add("actions", "dual_action_pairing", worst_dual, 1e-10, opts.samples)
    log.add("actions", "canonical_form_antisymmetric", worst_form, 1e-12, opts.samples)
    log.add_bound("actions", "canonical_form_nondegenerate", min_form_sv, 1e-9, opts.samples)

    rep_A = chart.rep_A
    nA = chart.A.dim
    worst_jk = worst_jg = 0.0
    for _ in range(opts.samples):
        x = GxAPoint(G.haar_sample(rng), rng.normal(size=d), rng.normal(size=nA), rng.normal(size=nA))
        g0 = G.haar_sample(rng)
        worst_jk = max(worst_jk, np.abs(momentum_JK(rep_A, left_translate(G, g0, x), chart.k) - momentum_JK(rep_A, x, chart.k)).max(initial=0.0))
        kel = _subgroup_sample(chart, chart.k, rng)
        worst_jg = max(worst_jg, np.abs(momentum_JG(G, twist(G, rep_A, kel, x)) - momentum_JG(G, x)).max(initial=0.0))
    log.add("actions", "JK_left_invariant", worst_jk, 1e-10, opts.samples)
    log.add("actions", "JG_twist_invariant", worst_jg, 1e-10, opts.samples)


# -- slices ------------------------------------------------------------------


def check_slices(chart: SliceChart, opts: Options, log: CheckLog):
    for name, r in chart.invariant_residuals().items():
        log.add("slices", name, r, opts.tol)
    log.add("slices", "Q_metric_K_invariant", metric_invariance_residual(chart.action, chart.k, opts.samples, opts.seed), opts.tol, opts.samples)
    for name, sub in [("k", chart.k), ("h", chart.h), ("gmu", chart.gmu), ("m", chart.m), ("mk", chart.mk), ("A", chart.A), ("B", chart.B)]:
        log.add("slices", f"orthonormal_{name}", sub.orthonormality_residual(), 1e-10)


# -- normalform ------------------------------------------------------------


def check_normalform(chart: SliceChart, opts: Options, log: CheckLog):
    rng = np.random.default_rng([opts.seed, 4])
    G = chart.group
    nsd = symplectic_normal_space(chart)
    for name, r in nsd.invariant_residuals().items():
        log.add("normalform", f"Ns_{name}", r, opts.tol)
    # reduced form does not see the quotiented directions
    R, O = nsd.reps.columns, nsd.orbit_gmu.columns
    worst = 0.0
    for _ in range(opts.samples if nsd.dim and nsd.orbit_gmu.dim else 0):
        u, v = rng.normal(size=nsd.dim), rng.normal(size=nsd.dim)
        du, dv = O @ rng.normal(size=O.shape[1]), O @ rng.normal(size=O.shape[1])
        worst = max(worst, abs((R @ u + du) @ nsd.form @ (R @ v + dv) - u @ nsd.omega_red @ v))
    log.add("normalform", "reduced_form_well_defined", worst, 1e-10, opts.samples)

    wa = witt_artin(chart, nsd)
    for name, r in wa.invariant_residuals(chart).items():
        log.add("normalform", f"witt_artin_{name}", r, opts.tol)

    worst = 0.0
    for _ in range(opts.samples if chart.gmu.dim else 0):
        xi, eta = rng.normal(size=G.dim), rng.normal(size=G.dim)
        shift = chart.gmu.columns @ rng.normal(size=chart.gmu.dim)
        worst = max(worst, abs(kks_form(G, chart.mu, -1, xi + shift, eta) - kks_form(G, chart.mu, -1, xi, eta)))
    log.add("normalform", "kks_well_defined", worst, 1e-10, opts.samples)

    chain = tangent_level_chain(chart, nsd)
    hs = _h_elements(chart, 20, [opts.seed, 5])
    for name, split in chain.as_dict().items():
        _check_split(log, f"chain_{name}", split, hs, opts)
    log.add("normalform", "chain_triangle", chain.triangle_residual(), opts.tol)

    flags = check_case_flags(chart)
    for flag, builder, label in [("K_subset_Gmu", splitting_K_subset_Gmu, "split_K_subset_Gmu"), ("alpha_zero", splitting_alpha0, "split_alpha0")]:
        if not flags[flag]:
            log.skip("normalform", label, f"flag {flag} is false at this point")
            continue
        split = builder(chart, nsd, chain)
        _check_split(log, label, split, hs, opts)
        log.add("normalform", f"{label}_direct_route", direct_splitting_residual(chart, split, chain), opts.tol)
    return nsd, wa, chain


def _check_split(log, label, split, hs, opts):
    log.add("normalform", f"{label}_congruence", split.congruence_residual(), opts.tol)
    log.add("normalform", f"{label}_invertible", 0.0 if split.is_invertible() else 1.0, 0.5)
    log.add("normalform", f"{label}_H_equivariance", split.equivariance_residual(hs), opts.tol, len(hs))


# -- tube --------------------------------------------------------------------


def check_tube(tc: TubeChart, opts: Options, log: CheckLog):
    chart = tc.chart
    G = chart.group
    rng = np.random.default_rng([opts.seed, 6])
    N = opts.samples
    pts = [tc.sample_point(rng) for _ in range(N)]

    z0 = tc.tube_evaluate(tc.base_point())
    log.add("tube", "base_point_maps_to_z", np.abs(z0.flat() - np.concatenate([chart.q, chart.p])).max(), 1e-10)
    mk = chart.mk.dim
    worst_gamma = worst_inv = 0.0
    for m in pts:
        nubar = rng.normal(size=mk)
        worst_gamma = max(worst_gamma, tc.gamma_residual(m.delta, nubar))
        worst_inv = max(worst_inv, np.abs(tc.gamma_inverse(m.delta, tc.gamma_star(m.delta, nubar)) - nubar).max(initial=0.0))
    log.add("tube", "gamma_defining_relation", worst_gamma, 1e-10, N)
    log.add("tube", "gamma_inverse_identity", worst_inv, 1e-10, N)

    worst_jh = worst_jk = worst_alt = worst_eq = worst_hq = worst_mom = worst_tf = 0.0
    for m in pts:
        w = tc.l_map(m)
        worst_jh = max(worst_jh, np.abs(tc.momentum_JH(w)).max(initial=0.0))
        worst_jk = max(worst_jk, np.abs(tc.momentum_JK(tc.sigma_map(w))).max(initial=0.0))
        z = tc.tube_evaluate(m)
        worst_alt = max(worst_alt, np.abs(tc.tube_alternative(m).flat() - z.flat()).max())
        g0 = G.haar_sample(rng)
        q2, p2 = chart.action.lift(g0, z.point, z.covector)
        worst_eq = max(worst_eq, np.abs(tc.tube_evaluate(tc.left(g0, m)).flat() - np.concatenate([q2, p2])).max())
        h = _subgroup_sample(chart, chart.h, rng)
        worst_hq = max(worst_hq, np.abs(tc.tube_evaluate(tc.twist(h, m)).flat() - z.flat()).max())
        worst_mom = max(worst_mom, np.abs(tc.model_momentum(m) - chart.action.momentum(z.point, z.covector)).max(initial=0.0))
        rho = w.nu
        worst_tf = max(worst_tf, np.abs(tc._gamma_dual(m.delta, rho, -m.a) - tc.tfform_correction(m.delta, rho, -m.a)).max(initial=0.0))
    log.add("tube", "l_map_in_JH_zero", worst_jh, 1e-10, N)
    log.add("tube", "sigma_lands_in_JK_zero", worst_jk, opts.tol, N)
    log.add("tube", "alternative_construction_agrees", worst_alt, opts.tol, N)
    log.add("tube", "exchange_correction_matches_gamma", worst_tf, opts.tol, N)
    log.add("tube", "G_equivariance", worst_eq, 1e-10, N)
    log.add("tube", "H_quotient_respected", worst_hq, opts.tol, N)
    log.add("tube", "momentum_compatibility", worst_mom, opts.tol, N)

    sep = np.inf
    for i in range(0, len(pts) - 1, 2):
        sep = min(sep, float(np.abs(tc.tube_evaluate(pts[i]).flat() - tc.tube_evaluate(pts[i + 1]).flat()).max()))
    log.add_bound("tube", "injective_on_samples", sep if np.isfinite(sep) else 1.0, 1e-8, N // 2)

    worst_symp = worst_sig = 0.0
    for m in pts:
        worst_symp = max(worst_symp, tc.symplecticity_residual(m, opts.fd_step))
        worst_sig = max(worst_sig, tc.sigma_presymplectic_residual(m, opts.fd_step))
    log.add("tube", "symplecticity_fd", worst_symp, opts.tol_fd, N)
    log.add("tube", "sigma_presymplectic_fd", worst_sig, opts.tol_fd, N)
    log.add_bound("tube", "validity_radius_positive", tc.U_bound, 0.0)


def run_all(chart: SliceChart, opts: Options, tc: TubeChart | None = None):
    log = CheckLog()
    check_liealg(chart, opts, log)
    check_actions(chart, opts, log)
    check_slices(chart, opts, log)
    try:
        check_normalform(chart, opts, log)
    except NormalFormError as exc:
        log.add("normalform", "construction", float("inf"), opts.tol)
        log.skip("normalform", "remaining", str(exc))
    if tc is None:
        log.skip("tube", "all", "isotropy of mu is not the whole group (Gmu_full is false); the tube is out of theorem scope")
    else:
        check_tube(tc, opts, log)
    return log
