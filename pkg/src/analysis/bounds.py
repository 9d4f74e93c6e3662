"""
Rate Bounds
Closed-form average-rate expressions for B -> infinity: the GCLC bound
min{psi, m_bar - M_bar} (general and homogeneous forms) and the LFU baseline.

psi weighs every group of l requesting users by the caching term
(1 - pM)^(e-l+1) (pM)^(l-1) of the group's winning request. The winner is the
request with the largest term (ties -> lower file, then lower user), so each
inner sum collapses to the expected maximum term over the group's demands,
which is evaluated exactly from the per-user CDFs or by sampling demands.
"""

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from config import ANALYSIS_SAMPLES, ANALYSIS_SUBSET_SAMPLES, EXACT_OUTCOME_LIMIT, MAX_ENUMERATED_USERS, RHO_EXPONENT
from src.exceptions import DimensionMismatchError, InvalidConfigError
from src.network.model import NetworkConfig, truncated_uniform
from src.network.placement import popular_files
from src.utils.logger import logger
from src.utils.seeding import SeedLike, make_rng

RHO_METHODS = ("exact", "sampled")
RHO_EXPONENTS = ("n_j", "n")


@dataclass(frozen=True)
class RequestProfile:
    """Users ordered by request count; n_j users place a j-th request."""
    L_sorted: Tuple[int, ...]
    n_j: Tuple[int, ...]
    users_j: Tuple[Tuple[int, ...], ...]

    @classmethod
    def from_L(cls, L: Sequence[int]) -> 'RequestProfile':
        L = np.asarray(L, dtype=int)
        top = int(L.max()) if L.size else 0
        users = tuple(tuple(np.flatnonzero(L >= j).tolist()) for j in range(1, top + 1))
        return cls(
            L_sorted=tuple(sorted(L.tolist(), reverse=True)),
            n_j=tuple(len(u) for u in users),
            users_j=users,
        )


@dataclass(frozen=True)
class PsiEstimate:
    value: float
    stderr: float = 0.0
    method: str = "exact"
    # rho[l-1, f] for the homogeneous form
    rho: Optional[np.ndarray] = field(default=None, repr=False, compare=False)


@dataclass(frozen=True)
class RateBound:
    psi: float
    m_bar: float
    M_bar: float
    r_gclc: float
    psi_stderr: float = 0.0
    r_lfu: Optional[float] = None

    def to_dict(self) -> Dict[str, Optional[float]]:
        return {
            "m_bar": self.m_bar,
            "M_bar": self.M_bar,
            "psi": self.psi,
            "psi_stderr": self.psi_stderr,
            "r_gclc": self.r_gclc,
            "r_lfu": self.r_lfu,
        }


@dataclass(frozen=True)
class CachingOptimum:
    p: np.ndarray
    m_tilde: int
    bound: RateBound


def cache_term(pM: np.ndarray, ell: int, exponent: int) -> np.ndarray:
    """(1 - pM)^(exponent - ell + 1) * (pM)^(ell - 1)."""
    pM = np.clip(np.asarray(pM, dtype=float), 0.0, 1.0)
    return np.power(1.0 - pM, exponent - ell + 1) * np.power(pM, ell - 1)


def winner_probabilities(weights: np.ndarray, q: np.ndarray, ell: int) -> np.ndarray:
    """
    P(file f wins among ell i.i.d. demands drawn from q): f wins when it is
    drawn and every draw ranks at or below it, so each probability is a
    difference of powers of the ranked CDF.
    """
    m = len(weights)
    # Worst first; among equal weights the higher file id ranks lower
    order = np.lexsort((-np.arange(m), weights))
    cdf = np.minimum(np.cumsum(q[order]), 1.0)
    below = np.concatenate(([0.0], cdf[:-1]))
    rho = np.empty(m)
    rho[order] = cdf ** ell - below ** ell
    return rho


def expected_max(weights: np.ndarray, probs: np.ndarray) -> float:
    """
    E[max_u weights[u, f_u]] for independent f_u ~ probs[u], via
    P(max <= t) = prod_u F_u(t) on the grid of attainable values.
    """
    grid = np.unique(weights)
    joint = np.ones(len(grid))
    for w, q in zip(weights, probs):
        order = np.argsort(w, kind="stable")
        cdf = np.concatenate(([0.0], np.cumsum(q[order])))
        joint *= np.minimum(cdf[np.searchsorted(w[order], grid, side="right")], 1.0)
    mass = np.diff(np.concatenate(([0.0], joint)))
    return float(np.dot(grid, mass))


class RateBoundCalculator:
    """
    Evaluates psi with either exact order statistics or Monte Carlo demand
    draws. User subsets are enumerated while that stays affordable and
    sampled (with weight C(n_j, l)) otherwise.
    """

    def __init__(
        self,
        samples: int = ANALYSIS_SAMPLES,
        method: str = "exact",
        exponent: str = RHO_EXPONENT,
        subset_samples: int = ANALYSIS_SUBSET_SAMPLES,
        seed: SeedLike = None
    ):
        if samples < 1:
            raise InvalidConfigError("sample budget must be >= 1", field="samples")
        if subset_samples < 1:
            raise InvalidConfigError("subset sample budget must be >= 1", field="subset_samples")
        if method not in RHO_METHODS:
            raise InvalidConfigError(f"unknown rho method {method!r}; expected one of {RHO_METHODS}", field="method")
        if exponent not in RHO_EXPONENTS:
            raise InvalidConfigError(f"unknown exponent {exponent!r}; expected one of {RHO_EXPONENTS}", field="rho_exponent")
        self.samples = samples
        self.method = method
        self.exponent = exponent
        self.subset_samples = subset_samples
        self.rng = make_rng(seed)

    def _draw(self, probs: np.ndarray, count: int) -> np.ndarray:
        """count x len(probs) demand draws, one column per user."""
        cdf = np.cumsum(probs, axis=1)
        cdf[:, -1] = 1.0
        u = self.rng.random((count, len(probs)))
        return np.stack([np.searchsorted(cdf[i], u[:, i], side="right") for i in range(len(probs))], axis=1)

    def group_term(self, weights: np.ndarray, probs: np.ndarray) -> Tuple[float, float]:
        """Expected winning term of one user group and its standard error."""
        if self.method == "exact":
            return expected_max(weights, probs), 0.0
        draws = self._draw(probs, self.samples)
        values = weights[np.arange(len(weights))[None, :], draws].max(axis=1)
        return float(values.mean()), float(values.std(ddof=1) / math.sqrt(len(values))) if len(values) > 1 else 0.0

    def psi_heterogeneous(self, config: NetworkConfig) -> PsiEstimate:
        profile = RequestProfile.from_L(config.L)
        pM = config.P * config.M[:, None]
        total, variance = 0.0, 0.0
        for users, n_j in zip(profile.users_j, profile.n_j):
            users = np.array(users, dtype=int)
            for ell in range(1, n_j + 1):
                e = n_j if self.exponent == "n_j" else config.n
                terms = cache_term(pM[users], ell, e)
                count = math.comb(n_j, ell)
                enumerate_all = n_j <= MAX_ENUMERATED_USERS and count * ell * config.m <= EXACT_OUTCOME_LIMIT
                if enumerate_all:
                    for subset in combinations(range(n_j), ell):
                        idx = list(subset)
                        value, err = self.group_term(terms[idx], config.Q[users[idx]])
                        total += value
                        variance += err ** 2
                else:
                    picks = [np.sort(self.rng.choice(n_j, size=ell, replace=False)) for _ in range(self.subset_samples)]
                    values = np.array([self.group_term(terms[idx], config.Q[users[idx]])[0] for idx in picks])
                    total += count * values.mean()
                    if len(values) > 1:
                        variance += (count * values.std(ddof=1)) ** 2 / len(values)
        return PsiEstimate(total, math.sqrt(variance), self.method)

    def psi_homogeneous(self, p: np.ndarray, q: np.ndarray, M: float, L: int, n: int) -> PsiEstimate:
        p = np.asarray(p, dtype=float)
        q = np.asarray(q, dtype=float)
        m = len(q)
        rho = np.zeros((n, m))
        total, variance = 0.0, 0.0
        for ell in range(1, n + 1):
            weights = cache_term(p * M, ell, n)
            if self.method == "exact":
                rho[ell - 1] = winner_probabilities(weights, q, ell)
                inner, err = float(np.dot(rho[ell - 1], weights)), 0.0
            else:
                rank = np.empty(m, dtype=int)
                rank[np.lexsort((np.arange(m), -weights))] = np.arange(m)
                draws = self.rng.choice(m, size=(self.samples, ell), p=q)
                winners = np.take_along_axis(draws, np.argmin(rank[draws], axis=1)[:, None], axis=1)[:, 0]
                rho[ell - 1] = np.bincount(winners, minlength=m) / self.samples
                values = weights[winners]
                inner = float(values.mean())
                err = float(values.std(ddof=1) / math.sqrt(self.samples)) if self.samples > 1 else 0.0
            scale = L * math.comb(n, ell)
            total += scale * inner
            variance += (scale * err) ** 2
        return PsiEstimate(total, math.sqrt(variance), self.method, rho)

    def rate_bound(self, config: NetworkConfig) -> RateBound:
        if config.is_homogeneous:
            psi = self.psi_homogeneous(config.P[0], config.Q[0], float(config.M[0]), int(config.L[0]), config.n)
        else:
            psi = self.psi_heterogeneous(config)
        mb = m_bar(config.Q, config.L)
        Mb = M_bar(config.P, config.Q, config.L, config.M)
        return RateBound(
            psi=psi.value,
            m_bar=mb,
            M_bar=Mb,
            r_gclc=min(psi.value, mb - Mb),
            psi_stderr=psi.stderr,
            r_lfu=lfu_rate(config.Q, config.M, config.L),
        )


def _request_probability(Q: np.ndarray, L: np.ndarray) -> np.ndarray:
    """P(file f is requested by at least one user)."""
    Q = np.atleast_2d(np.asarray(Q, dtype=float))
    L = np.asarray(L, dtype=float).reshape(-1, 1)
    return 1.0 - np.prod(np.power(1.0 - Q, L), axis=0)


def m_bar(Q: np.ndarray, L: Sequence[int]) -> float:
    """Expected number of distinct requested files."""
    return float(_request_probability(Q, L).sum())


def M_bar(P: np.ndarray, Q: np.ndarray, L: Sequence[int], M: Sequence[float]) -> float:
    """
    Sum over files of the smallest caching probability any user gives the
    file, weighted by the chance the file is requested. ``M`` only fixes the
    number of users.
    """
    P = np.atleast_2d(np.asarray(P, dtype=float))
    if len(np.atleast_1d(M)) != P.shape[0]:
        raise DimensionMismatchError(f"{len(np.atleast_1d(M))} cache sizes for {P.shape[0]} users")
    common = np.min(P, axis=0)
    return float(np.dot(common, _request_probability(Q, L)))


def psi_heterogeneous(
    config: NetworkConfig,
    samples: int = ANALYSIS_SAMPLES,
    method: str = "exact",
    seed: SeedLike = None,
    exponent: str = RHO_EXPONENT
) -> PsiEstimate:
    return RateBoundCalculator(samples, method, exponent, seed=seed).psi_heterogeneous(config)


def psi_homogeneous(
    p: np.ndarray,
    q: np.ndarray,
    M: float,
    L: int,
    n: int,
    samples: int = ANALYSIS_SAMPLES,
    method: str = "exact",
    seed: SeedLike = None
) -> PsiEstimate:
    return RateBoundCalculator(samples, method, seed=seed).psi_homogeneous(p, q, M, L, n)


def lfu_rate(Q: np.ndarray, M: Sequence[float], L: Sequence[int]) -> float:
    """
    Expected number of distinct files requested by some user that does not
    hold them, when every user caches its floor(M_u) most popular files whole.
    """
    Q = np.atleast_2d(np.asarray(Q, dtype=float))
    M = np.asarray(M, dtype=float)
    L = np.asarray(L, dtype=float)
    miss = np.ones(Q.shape[1])
    for u in range(Q.shape[0]):
        exposed = np.ones(Q.shape[1], dtype=bool)
        exposed[popular_files(Q[u], M[u])] = False
        miss[exposed] *= np.power(1.0 - Q[u, exposed], L[u])
    return float(np.sum(1.0 - miss))


def rate_bound(
    config: NetworkConfig,
    samples: int = ANALYSIS_SAMPLES,
    method: str = "exact",
    seed: SeedLike = None,
    exponent: str = RHO_EXPONENT
) -> RateBound:
    return RateBoundCalculator(samples, method, exponent, seed=seed).rate_bound(config)


def optimize_caching_distribution(
    q: np.ndarray,
    M: float,
    L: int,
    n: int,
    grid: Optional[Sequence[int]] = None
) -> CachingOptimum:
    """
    Sweep truncated-uniform caching distributions (mass 1/m_tilde on the
    m_tilde most popular files) and keep the one minimizing the homogeneous
    bound. m_tilde < M is infeasible. Ties go to the larger m_tilde.
    """
    q = np.asarray(q, dtype=float)
    m = len(q)
    low = max(1, math.ceil(M - 1e-9))
    grid = [k for k in (grid or range(1, m + 1)) if low <= k <= m]
    if not grid:
        raise InvalidConfigError(f"no feasible m_tilde in [{low}, {m}]", field="grid")

    calc = RateBoundCalculator(method="exact")
    qs, Ls, Ms = np.tile(q, (n, 1)), np.full(n, L), np.full(n, M)
    mb = m_bar(qs, Ls)
    best: Optional[CachingOptimum] = None
    for k in sorted(grid, reverse=True):
        p = truncated_uniform(q, k)
        psi = calc.psi_homogeneous(p, q, M, L, n).value
        Mb = M_bar(np.tile(p, (n, 1)), qs, Ls, Ms)
        bound = RateBound(psi=psi, m_bar=mb, M_bar=Mb, r_gclc=min(psi, mb - Mb))
        if best is None or bound.r_gclc < best.bound.r_gclc - 1e-12:
            best = CachingOptimum(p, k, bound)
    logger.debug(f"Optimal truncation m_tilde={best.m_tilde} with bound {best.bound.r_gclc:.4f}")
    return best
