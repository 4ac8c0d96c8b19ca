"""Finite-mixture estimation of behavioral types from binary veil-of-ignorance
choices: EM with a lattice M-step, classification diagnostics (EN, ICL, NEC),
bootstrap standard errors, and the mapping from types to predicted behavior.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import log_expit, logsumexp

from .curves import PayoffCurve
from .errors import ConvergenceError, ValidationError
from .params import (
    ALPHA_BOUNDS,
    BETA_BOUNDS,
    ESTIMATION_ENDOWMENT,
    KAPPA_BOUNDS,
    LAMBDA_BOUNDS,
    PreferenceParams,
    validate_endowment,
)
from .utility import dg_transfer

ROLES = ("P", "R")
CHOICE_MODELS = ("constant", "logit")

_TIE_TOL = 1e-12
_STRATEGY_ORDER = ((0, 0), (0, 1), (1, 0), (1, 1))
_LOGIT_LAM_GRID = np.array([0.01, 0.02, 0.05, 0.1, 0.2, 0.4, 0.7, 0.99])


# ---------------------------------------------------------------------------
# data model


@dataclass(frozen=True)
class BinaryGame:
    """Two-action game played in both roles behind the veil.

    payoff_a[a][b] is the (own, other) point pair when holding role A and
    playing a against a role-B opponent playing b; payoff_b[b][a] mirrors it
    for role B. belief_a / belief_b give the probability that the opponent
    picks their first action, per own role.
    """

    game_id: str
    payoff_a: tuple
    payoff_b: tuple
    belief_a: float = 0.5
    belief_b: float = 0.5

    def __post_init__(self):
        for table in (self.payoff_a, self.payoff_b):
            if len(table) != 2 or any(len(row) != 2 for row in table):
                raise ValidationError(f"game {self.game_id}: payoff table must be 2x2")
            for row in table:
                for cell in row:
                    if len(cell) != 2 or min(cell) < 0:
                        raise ValidationError(
                            f"game {self.game_id}: payoffs must be (own, other) pairs >= 0"
                        )
        for b in (self.belief_a, self.belief_b):
            if not 0.0 <= b <= 1.0:
                raise ValidationError(f"game {self.game_id}: beliefs must lie in [0, 1]")

    @classmethod
    def mini_ug(
        cls,
        unequal: tuple,
        equal: tuple = (50.0, 50.0),
        punish: tuple = (10.0, 10.0),
        game_id: str | None = None,
    ) -> "BinaryGame":
        """Mini ultimatum game: equal vs unequal proposal; punishment hits the
        unequal proposal only (action 1 in both roles)."""
        u_own, u_oth = float(unequal[0]), float(unequal[1])
        eq = (float(equal[0]), float(equal[1]))
        pu = (float(punish[0]), float(punish[1]))
        gid = game_id or f"mini-ug-{int(u_own)}-{int(u_oth)}"
        payoff_a = ((eq, eq), ((u_own, u_oth), pu))
        payoff_b = (((eq[1], eq[0]), (u_oth, u_own)), ((eq[1], eq[0]), (pu[1], pu[0])))
        return cls(gid, payoff_a, payoff_b)


def default_games() -> tuple[BinaryGame, ...]:
    """The six built-in mini ultimatum games: (50,50) vs (60,40)...(85,15)."""
    splits = ((60, 40), (65, 35), (70, 30), (75, 25), (80, 20), (85, 15))
    return tuple(BinaryGame.mini_ug(s) for s in splits)


@dataclass(frozen=True)
class ChoiceRecord:
    subject_id: str
    game_id: str
    role: str
    action: int

    def __post_init__(self):
        if self.role not in ROLES:
            raise ValidationError(f"role must be one of {ROLES}, got {self.role!r}")
        if self.action not in (0, 1):
            raise ValidationError(f"action must be 0 or 1, got {self.action!r}")


@dataclass(frozen=True)
class MixtureFit:
    k: int
    params: tuple[PreferenceParams, ...]
    shares: tuple[float, ...]
    posterior: np.ndarray
    loglik: float
    en: float
    icl: float
    nec: float | None
    n_subjects: int
    n_records: int
    choice_model: str
    n_iter: int
    flags: tuple[str, ...] = ()


# ---------------------------------------------------------------------------
# utilities of pure veil strategies


def game_coefficients(game: BinaryGame, curve: PayoffCurve) -> np.ndarray:
    """Per-strategy utility coefficients: U(a,b) = c0 + kappa c1 + alpha c2 + beta c3.

    Utilities are linear in (kappa, alpha, beta) once the curve values of the
    payoff cells are fixed, which the lattice M-step exploits.
    """
    out = np.zeros((2, 2, 4))
    pa = np.asarray(game.payoff_a, dtype=float)
    pb = np.asarray(game.payoff_b, dtype=float)
    prob_a = (game.belief_a, 1.0 - game.belief_a)
    prob_b = (game.belief_b, 1.0 - game.belief_b)
    for a in (0, 1):
        for b in (0, 1):
            c = np.zeros(4)
            for table, own_act, probs in ((pa, a, prob_a), (pb, b, prob_b)):
                for opp in (0, 1):
                    v_own = curve.value(table[own_act, opp, 0])
                    v_oth = curve.value(table[own_act, opp, 1])
                    c[0] += 0.5 * probs[opp] * v_own
                    c[1] -= 0.5 * probs[opp] * v_own
                    c[2] -= 0.5 * probs[opp] * max(v_oth - v_own, 0.0)
                    c[3] -= 0.5 * probs[opp] * max(v_own - v_oth, 0.0)
            # universalization: everyone plays (a, b), so role A faces b and role B faces a
            c[1] += 0.5 * (curve.value(pa[a, b, 0]) + curve.value(pb[b, a, 0]))
            out[a, b] = c
    return out


def _basis(p: PreferenceParams) -> np.ndarray:
    return np.array([1.0, p.kappa, p.alpha, p.beta])


def strategy_utilities(p: PreferenceParams, curve: PayoffCurve, game: BinaryGame) -> np.ndarray:
    """Expected utility of the four pure veil strategies, indexed [a, b].

    Each role carries weight 1/2; opponent play follows the game's beliefs;
    the universalization term evaluates the strategy against itself.
    """
    return game_coefficients(game, curve) @ _basis(p)


def choice_prob(lam: float, u_chosen: float, u_other: float) -> float:
    """Constant-error choice probability: (1-lam) on the argmax plus lam/2.

    Exact utility ties give 1/2 regardless of lam.
    """
    if not 0.0 <= lam <= 1.0:
        raise ValidationError("lambda must lie in [0, 1]")
    if u_chosen == u_other:
        return 0.5
    return (1.0 - lam) + 0.5 * lam if u_chosen > u_other else 0.5 * lam


def logit_choice_prob(lam: float, u_chosen: float, u_other: float) -> float:
    """Logit alternative with lam acting as temperature (labeled, not default)."""
    if not lam > 0.0:
        raise ValidationError("logit temperature must be positive")
    return float(np.exp(log_expit((u_chosen - u_other) / lam)))


def _pattern_and_margin(p: PreferenceParams, curve: PayoffCurve, games):
    """Preferred action and utility margin per game and role.

    The off-role component is pinned at the joint argmax, so each entry
    reduces to a binary comparison between the two veil strategies that
    differ in that role's action alone. Margin = U(action 1) - U(action 0).
    """
    pat = np.zeros((len(games), 2), dtype=np.int8)
    margin = np.zeros((len(games), 2))
    for g, game in enumerate(games):
        u = strategy_utilities(p, curve, game)
        a_star, b_star = _STRATEGY_ORDER[int(np.argmax(u.ravel()))]
        d_p = u[1, b_star] - u[0, b_star]
        d_r = u[a_star, 1] - u[a_star, 0]
        margin[g] = (d_p, d_r)
        pat[g, 0] = 2 if abs(d_p) <= _TIE_TOL else int(d_p > 0)
        pat[g, 1] = 2 if abs(d_r) <= _TIE_TOL else int(d_r > 0)
    return pat, margin


def preferred_pattern(p: PreferenceParams, curve: PayoffCurve, games) -> np.ndarray:
    """Per-game, per-role preferred action (0, 1, or 2 for a tie)."""
    return _pattern_and_margin(p, curve, games)[0]


# ---------------------------------------------------------------------------
# data encoding


def _games_by_id(games) -> dict[str, int]:
    ids = [g.game_id for g in games]
    if len(set(ids)) != len(ids):
        raise ValidationError("duplicate game ids")
    return {gid: i for i, gid in enumerate(ids)}


def _encode(data, games):
    """Records -> (subject ids, count tensor (N, G, 2 roles, 2 actions))."""
    gmap = _games_by_id(games)
    subjects = sorted({r.subject_id for r in data})
    if not subjects:
        raise ValidationError("no choice records")
    smap = {sid: i for i, sid in enumerate(subjects)}
    cnt = np.zeros((len(subjects), len(games), 2, 2), dtype=np.int64)
    for r in data:
        if r.game_id not in gmap:
            raise ValidationError(f"record references unknown game {r.game_id!r}")
        cnt[smap[r.subject_id], gmap[r.game_id], ROLES.index(r.role), r.action] += 1
    return subjects, cnt


def _count_mdt(cnt: np.ndarray, pattern: np.ndarray):
    """Split each subject's records into matches, mismatches, ties for a pattern."""
    n, n_games = cnt.shape[:2]
    m = np.zeros(n)
    t = np.zeros(n)
    for g in range(n_games):
        for ro in range(2):
            pref = pattern[g, ro]
            if pref == 2:
                t += cnt[:, g, ro, 0] + cnt[:, g, ro, 1]
            else:
                m += cnt[:, g, ro, pref]
    d = cnt.sum(axis=(1, 2, 3)) - m - t
    return m, d, t


def _loglik_matrix(cnt, params, curve, games, choice_model):
    """Per-subject log-likelihood column for each type."""
    cols = []
    for p in params:
        pat, margin = _pattern_and_margin(p, curve, games)
        if choice_model == "constant":
            m, d, t = _count_mdt(cnt, pat)
            cols.append(
                m * math.log1p(-0.5 * p.lam) + d * math.log(0.5 * p.lam) + t * math.log(0.5)
            )
        else:
            z = margin / p.lam
            lp1 = log_expit(z)
            lp0 = log_expit(-z)
            cols.append(np.einsum("ngr,gr->n", cnt[..., 1], lp1) + np.einsum("ngr,gr->n", cnt[..., 0], lp0))
    return np.column_stack(cols)


# ---------------------------------------------------------------------------
# lattice M-step


class _Lattice:
    """Coarse parameter lattice with per-point choice structure.

    Under the constant-error model the likelihood is piecewise constant in
    (alpha, beta, kappa) with lambda profiled in closed form, so a scan over
    the sign-flip cells plus local refinement is the exact-enough direct
    search; the logit model reuses the same candidate machinery with the
    temperature profiled over a grid and polished on the winners.
    """

    def __init__(self, games, curve, step: float = 0.05):
        self.games = games
        self.curve = curve
        self.coeffs = np.stack([game_coefficients(g, curve) for g in games])
        aa, bb, kk = np.meshgrid(
            _axis(*ALPHA_BOUNDS, step), _axis(*BETA_BOUNDS, step), _axis(*KAPPA_BOUNDS, step),
            indexing="ij",
        )
        self.theta = np.column_stack([aa.ravel(), bb.ravel(), kk.ravel()])
        self.step = step
        self.patterns, self.margins = self._structure_at(self.theta)

    def _structure_at(self, theta: np.ndarray):
        """Vectorized preferred patterns and margins at arbitrary points."""
        basis = np.column_stack(
            [np.ones(len(theta)), theta[:, 2], theta[:, 0], theta[:, 1]]
        )
        u = np.einsum("gabc,tc->tgab", self.coeffs, basis)
        joint = u.reshape(len(theta), len(self.games), 4).argmax(axis=2)
        a_star, b_star = joint // 2, joint % 2
        u_b = np.take_along_axis(u, b_star[:, :, None, None], axis=3)[..., 0]
        d_p = u_b[:, :, 1] - u_b[:, :, 0]
        u_a = np.take_along_axis(u, a_star[:, :, None, None], axis=2)[:, :, 0, :]
        d_r = u_a[:, :, 1] - u_a[:, :, 0]
        margins = np.stack([d_p, d_r], axis=2)
        patterns = np.where(
            np.abs(margins) <= _TIE_TOL, 2, (margins > 0).astype(np.int8)
        ).astype(np.int8)
        return patterns, margins

    def _objective_constant(self, patterns: np.ndarray, weights3: np.ndarray):
        """Profiled-lambda weighted log-likelihood for a block of patterns.

        weights3 is the (G, 2, 2) responsibility-weighted action count table.
        The inner maximizer is lambda* = 2D / (M + D), clipped to its box.
        """
        n_pts = len(patterns)
        m = np.zeros(n_pts)
        t = np.zeros(n_pts)
        for g in range(len(self.games)):
            for ro in range(2):
                pref = patterns[:, g, ro]
                w0, w1 = weights3[g, ro, 0], weights3[g, ro, 1]
                tied = pref == 2
                m += np.where(tied, 0.0, np.where(pref == 1, w1, w0))
                t += np.where(tied, w0 + w1, 0.0)
        d = weights3.sum() - m - t
        lam = np.clip(2.0 * d / np.maximum(m + d, 1e-300), *LAMBDA_BOUNDS)
        obj = m * np.log1p(-0.5 * lam) + d * np.log(0.5 * lam) + t * math.log(0.5)
        return obj, lam

    def _objective_logit(self, margins: np.ndarray, weights3: np.ndarray, lams: np.ndarray):
        """Weighted logit log-likelihood, maximized over the lam grid."""
        w1, w0 = weights3[:, :, 1], weights3[:, :, 0]
        best_obj = np.full(len(margins), -np.inf)
        best_lam = np.full(len(margins), lams[0])
        for lam in lams:
            z = margins / lam
            obj = np.einsum("tgr,gr->t", log_expit(z), w1) + np.einsum(
                "tgr,gr->t", log_expit(-z), w0
            )
            improved = obj > best_obj
            best_obj = np.where(improved, obj, best_obj)
            best_lam = np.where(improved, lam, best_lam)
        return best_obj, best_lam

    def _score(self, theta, weights3, model, lam_grid):
        patterns, margins = (
            (self.patterns, self.margins)
            if theta is self.theta
            else self._structure_at(theta)
        )
        if model == "constant":
            return self._objective_constant(patterns, weights3)
        return self._objective_logit(margins, weights3, lam_grid)

    def maximize(self, weights3: np.ndarray, current: PreferenceParams | None, model: str):
        """Best (alpha, beta, kappa, lambda) for one type's weighted counts.

        Coarse scan, local 0.01-step refinement around the top three coarse
        cells, centroid-of-argmax reporting, and the incumbent parameters as
        a guaranteed candidate so EM ascent is preserved.
        """
        lam_grid = _LOGIT_LAM_GRID
        if current is not None:
            lam_grid = np.unique(np.append(lam_grid, current.lam))
        obj, _ = self._score(self.theta, weights3, model, lam_grid)
        order = np.argsort(obj)[::-1]
        cand = [self.theta[order[:3]]]
        for idx in order[:3]:
            cand.append(_local_box(self.theta[idx], self.step, 0.01))
        if current is not None:
            cand.append(np.array([[current.alpha, current.beta, current.kappa]]))
        theta = np.unique(np.vstack(cand), axis=0)
        obj_f, lam_f = self._score(theta, weights3, model, lam_grid)
        best = obj_f.max()
        at_max = obj_f >= best - 1e-12
        # Argmax ties form a plateau under the constant-error model.  The
        # coarse lattice samples it uniformly, so its tied points give an
        # unbiased plateau centroid; refinement points cluster around the
        # top coarse cells and would drag the mean toward them.
        coarse_at_max = obj >= best - 1e-12
        if coarse_at_max.any():
            centroid = self.theta[coarse_at_max].mean(axis=0)[None, :]
        else:
            centroid = theta[at_max].mean(axis=0)[None, :]
        c_obj, c_lam = self._score(centroid, weights3, model, lam_grid)
        if c_obj[0] >= best - 1e-12:
            pick, pick_lam, best = centroid[0], c_lam[0], c_obj[0]
        else:
            first = int(np.argmax(at_max))
            pick, pick_lam = theta[first], lam_f[first]
        if model == "logit":
            pick_lam, best = _polish_logit_lam(
                self, pick, weights3, float(pick_lam), float(best)
            )
        p = PreferenceParams(
            alpha=float(pick[0]), beta=float(pick[1]), kappa=float(pick[2]), lam=float(pick_lam)
        )
        return p, float(best)


def _polish_logit_lam(lattice, theta, weights3, lam0, obj0):
    """Golden refinement of the logit temperature at a fixed lattice point."""
    from scipy.optimize import minimize_scalar

    _, margins = lattice._structure_at(theta[None, :])
    w1, w0 = weights3[:, :, 1], weights3[:, :, 0]

    def neg(lam):
        z = margins[0] / lam
        return -(np.sum(log_expit(z) * w1) + np.sum(log_expit(-z) * w0))

    res = minimize_scalar(neg, bounds=LAMBDA_BOUNDS, method="bounded")
    if res.success and -res.fun > obj0:
        return float(res.x), float(-res.fun)
    return lam0, obj0


@lru_cache(maxsize=8)
def _lattice_for(games: tuple, curve: PayoffCurve, step: float) -> _Lattice:
    # games and curve are frozen dataclasses, so the pattern table can be
    # shared across restarts and bootstrap replicates
    return _Lattice(games, curve, step)


def _axis(lo: float, hi: float, step: float) -> np.ndarray:
    n = int(round((hi - lo) / step))
    return np.linspace(lo, hi, n + 1)


def _local_box(center: np.ndarray, radius: float, step: float) -> np.ndarray:
    bounds = (ALPHA_BOUNDS, BETA_BOUNDS, KAPPA_BOUNDS)
    axes = []
    for dim in range(3):
        lo = max(bounds[dim][0], center[dim] - radius)
        hi = min(bounds[dim][1], center[dim] + radius)
        axes.append(np.arange(lo, hi + 0.5 * step, step))
    aa, bb, kk = np.meshgrid(*axes, indexing="ij")
    return np.column_stack([aa.ravel(), bb.ravel(), kk.ravel()])


# ---------------------------------------------------------------------------
# EM


def em_fit(
    data,
    games,
    curve: PayoffCurve,
    k: int,
    restarts: int = 5,
    tol: float = 1e-6,
    seed: int = 0,
    choice_model: str = "constant",
    max_iter: int = 200,
    lattice_step: float = 0.05,
) -> MixtureFit:
    """Fit a k-type mixture of preference parameters to binary choices.

    E-step: posterior type responsibilities from current shares and
    per-subject likelihoods. M-step: closed-form shares; per-type bounded
    lattice search over (alpha, beta, kappa) with the noise parameter
    profiled (closed form under the constant-error model, grid plus golden
    polish under logit). Best of `restarts` random initializations wins.
    """
    if k < 1:
        raise ValidationError("k must be >= 1")
    if choice_model not in CHOICE_MODELS:
        raise ValidationError(f"choice_model must be one of {CHOICE_MODELS}")
    subjects, cnt = _encode(data, games)
    n = len(subjects)
    lattice = _lattice_for(tuple(games), curve, lattice_step)

    best = None
    n_restarts = 1 if k == 1 else max(1, restarts)
    for child in np.random.SeedSequence(seed).spawn(n_restarts):
        rng = np.random.default_rng(child)
        fit = _em_once(cnt, lattice, k, rng, tol, max_iter, choice_model)
        if best is None or fit[2] > best[2]:
            best = fit
    params, shares, loglik, posterior, n_iter = best

    order = np.argsort(-shares)
    params = tuple(params[i] for i in order)
    shares_arr = shares[order]
    posterior = posterior[:, order]

    flags = tuple(
        f"type-{idx}-degenerate-share"
        for idx, share in enumerate(shares_arr)
        if share < 1.0 / (10.0 * n)
    )

    en = entropy(posterior)
    icl_val = icl(loglik, k, n, en)
    nec_val = None
    if k >= 2:
        base = em_fit(
            data, games, curve, 1, restarts=1, tol=tol, seed=seed,
            choice_model=choice_model, max_iter=max_iter, lattice_step=lattice_step,
        )
        nec_val = nec(en, loglik, base.loglik)

    return MixtureFit(
        k=k,
        params=params,
        shares=tuple(float(s) for s in shares_arr),
        posterior=posterior,
        loglik=float(loglik),
        en=float(en),
        icl=float(icl_val),
        nec=nec_val,
        n_subjects=n,
        n_records=int(cnt.sum()),
        choice_model=choice_model,
        n_iter=n_iter,
        flags=flags,
    )


def _em_once(cnt, lattice, k, rng, tol, max_iter, choice_model):
    n = cnt.shape[0]
    idx = rng.choice(len(lattice.theta), size=k, replace=False)
    params = [
        PreferenceParams(
            alpha=float(lattice.theta[i, 0]),
            beta=float(lattice.theta[i, 1]),
            kappa=float(lattice.theta[i, 2]),
            lam=float(rng.uniform(0.1, 0.4)),
        )
        for i in idx
    ]
    shares = np.full(k, 1.0 / k)
    posterior = np.full((n, k), 1.0 / k)
    prev_ll = -np.inf
    ll = prev_ll
    it = 0
    for it in range(1, max_iter + 1):
        lmat = _loglik_matrix(cnt, params, lattice.curve, lattice.games, choice_model)
        joint = lmat + np.log(shares)[None, :]
        norm = logsumexp(joint, axis=1)
        ll = float(norm.sum())
        if ll < prev_ll - 1e-9:
            raise ConvergenceError(f"log-likelihood decreased: {prev_ll} -> {ll}")
        posterior = np.exp(joint - norm[:, None])
        if it > 1 and abs(ll - prev_ll) < tol:
            break
        prev_ll = ll
        shares = np.clip(posterior.mean(axis=0), 1e-12, None)
        shares /= shares.sum()
        params = [
            lattice.maximize(
                np.einsum("n,ngra->gra", posterior[:, j], cnt), params[j], choice_model
            )[0]
            for j in range(k)
        ]
    return params, shares, ll, posterior, it


# ---------------------------------------------------------------------------
# diagnostics


def entropy(posterior: np.ndarray) -> float:
    """Classification entropy EN = -sum tau ln tau, with 0 ln 0 = 0."""
    tau = np.asarray(posterior, dtype=float)
    if tau.ndim != 2 or np.any(tau < -1e-12):
        raise ValidationError("posterior must be a nonnegative matrix")
    with np.errstate(divide="ignore", invalid="ignore"):
        term = np.where(tau > 0.0, tau * np.log(np.where(tau > 0.0, tau, 1.0)), 0.0)
    return float(-term.sum())


def icl(loglik: float, k: int, n: int, en: float = 0.0) -> float:
    """ICL = -2 lnL + (5k - 1) ln N + EN (4 parameters per type plus shares)."""
    if n <= 0:
        raise ValidationError("n must be positive")
    return -2.0 * loglik + (5 * k - 1) * math.log(n) + en


def nec(en_k: float, loglik_k: float, loglik_1: float) -> float:
    """NEC = EN_K / (lnL_K - lnL_1); nan when the denominator vanishes."""
    denom = loglik_k - loglik_1
    if denom == 0.0:
        warnings.warn("NEC undefined: lnL_K equals lnL_1", stacklevel=2)
        return math.nan
    return en_k / denom


# ---------------------------------------------------------------------------
# bootstrap


@dataclass(frozen=True)
class BootstrapSE:
    """Per-parameter standard errors over aligned bootstrap replicates."""

    param_se: np.ndarray  # (k, 4): alpha, beta, kappa, lambda
    share_se: np.ndarray  # (k,)
    b: int
    unresolved: int


def bootstrap_se(
    data,
    games,
    curve: PayoffCurve,
    k: int,
    b: int = 50,
    seed: int = 0,
    restarts: int = 2,
    base: MixtureFit | None = None,
    **fit_kw,
) -> BootstrapSE:
    """Resample subjects with replacement, refit, align types, take SDs.

    Replicate types are aligned to the base fit by greedy nearest-neighbor
    matching in (alpha, beta, kappa, lambda); a replicate counts as
    unresolved when a matched distance exceeds half the smallest inter-type
    distance of the base fit (ambiguous attribution), and a warning fires
    when more than 10% of replicates are unresolved.
    """
    if b < 2:
        raise ValidationError("b must be >= 2")
    if base is None:
        base = em_fit(data, games, curve, k, seed=seed, **fit_kw)
    base_mat = np.array([[p.alpha, p.beta, p.kappa, p.lam] for p in base.params])
    if k > 1:
        gaps = [
            float(np.linalg.norm(base_mat[i] - base_mat[j]))
            for i in range(k)
            for j in range(i + 1, k)
        ]
        ambiguity_radius = 0.5 * min(gaps)
    else:
        ambiguity_radius = math.inf

    by_subject: dict[str, list] = {}
    for r in data:
        by_subject.setdefault(r.subject_id, []).append(r)
    ids = sorted(by_subject)

    reps_params = np.empty((b, k, 4))
    reps_shares = np.empty((b, k))
    unresolved = 0
    for rep, child in enumerate(np.random.SeedSequence(seed).spawn(b)):
        rng = np.random.default_rng(child)
        draw = rng.choice(len(ids), size=len(ids), replace=True)
        sample = [
            ChoiceRecord(f"b{copy:04d}", r.game_id, r.role, r.action)
            for copy, i in enumerate(draw)
            for r in by_subject[ids[i]]
        ]
        fit = em_fit(
            data=sample, games=games, curve=curve, k=k,
            restarts=restarts, seed=int(rng.integers(2**31)), **fit_kw,
        )
        rep_mat = np.array([[p.alpha, p.beta, p.kappa, p.lam] for p in fit.params])
        assign, worst = _greedy_align(base_mat, rep_mat)
        if worst > ambiguity_radius:
            unresolved += 1
        reps_params[rep] = rep_mat[assign]
        reps_shares[rep] = np.array(fit.shares)[assign]

    if unresolved > 0.1 * b:
        warnings.warn(
            f"label switching unresolved in {unresolved}/{b} replicates", stacklevel=2
        )
    return BootstrapSE(
        param_se=reps_params.std(axis=0, ddof=1),
        share_se=reps_shares.std(axis=0, ddof=1),
        b=b,
        unresolved=unresolved,
    )


def _greedy_align(base: np.ndarray, rep: np.ndarray):
    """Greedy nearest-neighbor bijection rep -> base; returns (assignment, worst distance)."""
    k = len(base)
    dist = np.linalg.norm(base[:, None, :] - rep[None, :, :], axis=2)
    assign = np.full(k, -1)
    open_b = set(range(k))
    open_r = set(range(k))
    worst = 0.0
    for _ in range(k):
        d, i, j = min((dist[i, j], i, j) for i in open_b for j in open_r)
        assign[i] = j
        open_b.discard(i)
        open_r.discard(j)
        worst = max(worst, d)
    return assign, worst


# ---------------------------------------------------------------------------
# behavioral summaries


@dataclass(frozen=True)
class RejectionSummary:
    points: float
    non_monotone: bool


def implicit_rejection_threshold(records, games) -> RejectionSummary:
    """Largest responder share among rejected unequal splits (0 if none).

    The responder share is read from each game's accept-the-unequal cell.
    A subject who accepts some split below a rejected one is flagged
    non-monotone but still scored by the definitional maximum.
    """
    gmap = {g.game_id: g for g in games}
    share_action: dict[str, int] = {}
    for r in records:
        if r.role != "R":
            continue
        if r.game_id not in gmap:
            raise ValidationError(f"record references unknown game {r.game_id!r}")
        share_action[r.game_id] = r.action
    rejected, accepted = [], []
    for gid, action in share_action.items():
        share = float(np.asarray(gmap[gid].payoff_b, dtype=float)[0, 1, 0])
        (rejected if action == 1 else accepted).append(share)
    if not rejected:
        return RejectionSummary(0.0, False)
    top = max(rejected)
    return RejectionSummary(top, any(a < top for a in accepted))


@dataclass(frozen=True)
class PredictedBehavior:
    dg_transfer: float
    ug_threshold: float


def predict_behavior(
    p: PreferenceParams,
    w: float = ESTIMATION_ENDOWMENT,
    curve: PayoffCurve | None = None,
) -> PredictedBehavior:
    """Map estimated type parameters to a DG transfer and a UG threshold.

    The threshold takes the proposer side as pinned at the equal split, so
    only the acceptance cutoff varies with (alpha, kappa).
    """
    from .nash import x2_lower_of

    validate_endowment(w)
    curve = curve or PayoffCurve.shifted_log()
    return PredictedBehavior(
        dg_transfer=dg_transfer(p, curve, w),
        ug_threshold=x2_lower_of(p.kappa, p.alpha, curve, w),
    )


# ---------------------------------------------------------------------------
# simulation


def simulate_choices(
    types,
    shares,
    games,
    curve: PayoffCurve,
    n_subjects: int,
    seed: int = 0,
):
    """Draw synthetic choice records from a known mixture.

    Each subject gets a type from `shares`; per decision the intended action
    is the type's preferred pattern, replaced by a uniform coin with the
    type's lam probability (ties always resolved by coin). Returns
    (records, type labels). Matches the constant-error choice model.
    """
    shares = np.asarray(shares, dtype=float)
    if len(types) != len(shares):
        raise ValidationError("types and shares must align")
    if abs(shares.sum() - 1.0) > 1e-9 or np.any(shares < 0.0):
        raise ValidationError("shares must be a probability vector")
    rng = np.random.default_rng(seed)
    patterns = [preferred_pattern(p, curve, games) for p in types]
    labels = rng.choice(len(types), size=n_subjects, p=shares)
    records = []
    for i in range(n_subjects):
        t = int(labels[i])
        lam = types[t].lam
        sid = f"s{i:04d}"
        for g, game in enumerate(games):
            for ro, role in enumerate(ROLES):
                pref = patterns[t][g, ro]
                if pref == 2 or rng.random() < lam:
                    action = int(rng.integers(2))
                else:
                    action = int(pref)
                records.append(ChoiceRecord(sid, game.game_id, role, action))
    return records, labels
