"""Closed-form outage probabilities and diversity-multiplexing tradeoffs.

The destination-outage formula models the full-cooperation protocol under
strict relay decoding: a relay joins the combining stage only after
decoding all N source packets, and a destination fails exactly when fewer
than N of its incoming packets survive (with an any-N-rows coding matrix
that is the rank criterion for recovering everything).  Conditioning on
the number of silent relays m and counting link outages n among the
N+M-m live transmitters gives a double binomial sum.

The DMT lines compare three protocols at multiplexing gain r:

  full network coding (M extra slots):  d = (M+1) (1 - (N+M)/N r)
  single-relay XOR (one extra slot):    d = 2 (1 - (N+1)/N r)
  repetition relaying (N extra frames): d = (M+1) (1 - 2 r)
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass

from .channel import (
    ScenarioConfig,
    link_outage_prob,
    link_up_prob,
    outage_threshold_tau,
)


def p_relay_all_decode(N: int, beta: float, tau: float) -> float:
    """Probability one relay receives all N source packets: exp(-N beta tau)."""
    if N < 0:
        raise ValueError("need N >= 0")
    return math.exp(-N * beta * tau)


def p_m_relays_fail(M: int, m: int, p_eps: float) -> float:
    """Probability exactly m of M relays miss at least one source packet.

    `p_eps` is the per-relay all-decode probability.
    """
    if not 0 <= m <= M:
        raise ValueError(f"need 0 <= m <= M, got m={m}, M={M}")
    return math.comb(M, m) * p_eps ** (M - m) * (1.0 - p_eps) ** m


def p_n_of_m_links_out(m: int, n: int, p0: float) -> float:
    """Probability exactly n of m independent links are in outage."""
    if not 0 <= n <= m:
        raise ValueError(f"need 0 <= n <= m, got n={n}, m={m}")
    return math.comb(m, n) * p0 ** n * (1.0 - p0) ** (m - n)


def p_destination_outage_exact(cfg: ScenarioConfig, rho: float) -> float:
    """Per-destination outage probability in the strict-decoding model.

    Exact for multicast traffic with an any-N-rows coding matrix; for
    unicast it is an upper bound (a destination may still pull its own
    packet out of fewer than N rows).  Requires a dncc config for the
    slot count; the traffic and assume_A fields do not enter.
    """
    if cfg.scheme != "dncc":
        raise ValueError(f"closed form applies to the dncc scheme, not {cfg.scheme!r}")
    N, M = cfg.N, cfg.M
    tau = outage_threshold_tau(cfg, rho)
    p0 = link_outage_prob(cfg.beta, tau)
    p_eps = p_relay_all_decode(N, cfg.beta, tau)
    total = 0.0
    for m in range(M + 1):
        live = N + M - m
        inner = sum(p_n_of_m_links_out(live, n, p0) for n in range(M - m + 1, live + 1))
        total += p_m_relays_fail(M, m, p_eps) * inner
    return total


def p_destination_outage_asymptotic(cfg: ScenarioConfig, rho: float) -> float:
    """Leading high-SNR term of the destination outage, order tau^(M+1).

    Every silent-relay count m contributes at the same order; the constant
    is sum_m C(M,m) N^m C(N+M-m, M-m+1) times beta^(M+1).
    """
    if cfg.scheme != "dncc":
        raise ValueError(f"closed form applies to the dncc scheme, not {cfg.scheme!r}")
    N, M = cfg.N, cfg.M
    tau = outage_threshold_tau(cfg, rho)
    const = sum(
        math.comb(M, m) * N ** m * math.comb(N + M - m, M - m + 1)
        for m in range(M + 1)
    )
    return const * (cfg.beta * tau) ** (M + 1)


def p_system_outage(per_dest: list[float]) -> float:
    """Probability any destination fails: 1 - prod(1 - p_i)."""
    for p in per_dest:
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"probability out of range: {p}")
    prod = 1.0
    for p in per_dest:
        prod *= 1.0 - p
    return 1.0 - prod


# -- diversity-multiplexing tradeoff ----------------------------------------

def dmt_r_intercept(scheme: str, N: int, M: int) -> float:
    """Multiplexing gain where the scheme's diversity reaches zero."""
    if scheme == "dncc":
        return N / (N + M)
    if scheme == "ncc":
        return N / (N + 1)
    if scheme == "cc":
        return 0.5
    raise ValueError(f"unknown scheme {scheme!r}")


def dmt(scheme: str, N: int, M: int, r: float) -> float:
    """Diversity gain d(r); clamped to 0 past the scheme's r-intercept."""
    if r < 0:
        raise ValueError(f"need r >= 0, got {r}")
    if N < 1 or M < 0:
        raise ValueError(f"need N >= 1 and M >= 0, got N={N}, M={M}")
    if scheme == "dncc":
        d = (M + 1) * (1.0 - (N + M) / N * r)
    elif scheme == "ncc":
        d = 2.0 * (1.0 - (N + 1) / N * r)
    elif scheme == "cc":
        d = (M + 1) * (1.0 - 2.0 * r)
    else:
        raise ValueError(f"unknown scheme {scheme!r}")
    if r > dmt_r_intercept(scheme, N, M):
        warnings.warn(
            f"r={r} is past the {scheme} intercept "
            f"{dmt_r_intercept(scheme, N, M):g}; diversity clamped to 0",
            stacklevel=2,
        )
    return max(d, 0.0)


@dataclass(frozen=True)
class DmtCurve:
    scheme: str
    N: int
    M: int
    points: tuple[tuple[float, float], ...]  # (r, d) samples


def dmt_curve(scheme: str, N: int, M: int, samples: int = 101) -> DmtCurve:
    """d(r) polyline from r=0 to the scheme's intercept, inclusive."""
    if samples < 2:
        raise ValueError("need at least 2 samples")
    r_max = dmt_r_intercept(scheme, N, M)
    pts = []
    for i in range(samples):
        r = r_max * i / (samples - 1)
        pts.append((r, dmt(scheme, N, M, r)))
    return DmtCurve(scheme, N, M, tuple(pts))


# -- tabulated curves ---------------------------------------------------------

ANALYTIC_CSV_HEADER = ["scheme", "N", "M", "beta", "R", "rho_db",
                       "p_exact", "p_asymptotic", "p_system"]


@dataclass(frozen=True)
class AnalyticCurve:
    """Exact, asymptotic, and system outage over a config's SNR grid."""

    cfg: ScenarioConfig
    rows: tuple[tuple[float, float, float, float], ...]
    # each row: (rho_db, p_exact, p_asymptotic, p_system)


def analytic_curve(cfg: ScenarioConfig) -> AnalyticCurve:
    rows = []
    for rho_db, rho in zip(cfg.rho_db, cfg.rho_grid):
        exact = p_destination_outage_exact(cfg, rho)
        asym = p_destination_outage_asymptotic(cfg, rho)
        system = p_system_outage([exact] * cfg.N)
        rows.append((rho_db, exact, asym, system))
    return AnalyticCurve(cfg=cfg, rows=tuple(rows))


def write_analytic_csv(curve: AnalyticCurve, path, comments: list[str] | None = None) -> None:
    cfg = curve.cfg
    with open(path, "w", newline="", encoding="ascii") as fh:
        for line in comments or []:
            fh.write(f"# {line}\n")
        writer = csv.writer(fh)
        writer.writerow(ANALYTIC_CSV_HEADER)
        for rho_db, exact, asym, system in curve.rows:
            writer.writerow([cfg.scheme, cfg.N, cfg.M, repr(cfg.beta),
                             repr(cfg.system_rate), repr(rho_db),
                             repr(exact), repr(asym), repr(system)])


DMT_CSV_HEADER = ["scheme", "N", "M", "r", "d"]


def write_dmt_csv(curves: list[DmtCurve], path) -> None:
    with open(path, "w", newline="", encoding="ascii") as fh:
        writer = csv.writer(fh)
        writer.writerow(DMT_CSV_HEADER)
        for c in curves:
            for r, d in c.points:
                writer.writerow([c.scheme, c.N, c.M, repr(r), repr(d)])
