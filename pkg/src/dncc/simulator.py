"""Monte-Carlo and exhaustive-enumeration outage engines.

A frame's randomness is the on/off state of N*M source-relay, N*N
source-destination, and M*N relay-destination links.  Whether destination
i recovers its packets is a deterministic function of (a) the shared
source-relay pattern, which fixes what each relay can forward, and (b)
the destination's own N+M incoming links.  Both engines evaluate that
function the same way: build the surviving (possibly column-masked)
coefficient rows and decide recoverability by Gaussian elimination over
GF(2^L), or apply the single-relay-XOR / repetition-relaying success
rules for the baseline schemes.

Because the pattern space is small for the sizes of interest, outcomes
are computed once per distinct pattern into a lookup table.  The
enumerator then sums exact pattern probabilities against the table; the
Monte-Carlo engine samples link bits in fixed-size blocks (counter-based
streams, reproducible for any worker count) and reads outcomes from the
same table.  For pattern spaces past the guard the sampler falls back to
per-trial elimination.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import linalg
from .channel import (
    STREAM_BLOCK,
    LinkStateMatrix,
    ScenarioConfig,
    link_up_prob,
    outage_threshold_tau,
    stream_for_block,
    uniforms_to_links,
)
from .coding import CodingMatrix, InfeasibleError, build_mds_matrix, default_field

# Past this many pattern bits (N*M + N + M) per destination, tables and
# exhaustive enumeration are refused / bypassed.
PATTERN_BITS_GUARD = 24


# -- per-frame recoverability -------------------------------------------------

@dataclass
class ReceivedSystem:
    """Surviving coefficient rows seen by one destination in one frame.

    Rows are original matrix rows, or relay rows with the coefficients of
    undecoded sources zeroed.  All-zero masked rows carry no information
    but are harmless to the rank logic.
    """

    dest: int
    n_sources: int
    rows: list[list[int]]
    matrix: CodingMatrix


def build_received_system(
    A: CodingMatrix, links: LinkStateMatrix, dest: int, assume_A: bool
) -> ReceivedSystem:
    """Rows that reach `dest` given the frame's link states.

    Under strict decoding (`assume_A`) a relay transmits its full
    combination only if it decoded every source packet, else stays silent.
    Relaxed, it combines just the packets it decoded (coefficients of the
    others masked to zero) and stays silent only with nothing decoded.
    """
    N, M = A.N, A.M
    rows: list[list[int]] = []
    for j in range(N):
        if links.sd[j, dest]:
            rows.append(list(A.rows[j]))
    for k in range(M):
        if not links.rd[k, dest]:
            continue
        decoded = [bool(links.sr[j, k]) for j in range(N)]
        if assume_A:
            if all(decoded):
                rows.append(list(A.rows[N + k]))
        elif any(decoded):
            rows.append([c if d else 0 for c, d in zip(A.rows[N + k], decoded)])
    return ReceivedSystem(dest=dest, n_sources=N, rows=rows, matrix=A)


def can_recover(sys: ReceivedSystem, traffic: str) -> bool:
    """Elimination-based recoverability of the received system.

    Multicast needs the full rank N; unicast only needs the destination's
    unit vector inside the row space.
    """
    if traffic == "multicast":
        return linalg.rank(sys.matrix.field, sys.rows, sys.n_sources) == sys.n_sources
    if traffic == "unicast":
        target = [1 if j == sys.dest else 0 for j in range(sys.n_sources)]
        return linalg.in_rowspan(sys.matrix.field, sys.rows, target)
    raise ValueError(f"unknown traffic mode {traffic!r}")


def dest_success(
    scheme: str,
    A: CodingMatrix | None,
    links: LinkStateMatrix,
    dest: int,
    traffic: str,
    assume_A: bool,
) -> bool:
    """One destination's success under the given scheme's decision rule."""
    N = links.sd.shape[0]
    M = links.rd.shape[0]
    if scheme == "dncc":
        if A is None:
            raise ValueError("dncc needs a coding matrix")
        return can_recover(build_received_system(A, links, dest, assume_A), traffic)
    if scheme == "ncc":
        # One XOR relay: the lowest-indexed relay that decoded everything
        # transmits; the destination must strip the other N-1 packets.
        if links.sd[dest, dest]:
            return True
        chosen = next((k for k in range(M) if all(links.sr[j, k] for j in range(N))), None)
        if chosen is None or not links.rd[chosen, dest]:
            return False
        return all(links.sd[j, dest] for j in range(N) if j != dest)
    if scheme == "cc":
        # Repetition relaying with selection: direct, or any two-hop path.
        if links.sd[dest, dest]:
            return True
        return any(links.sr[dest, k] and links.rd[k, dest] for k in range(M))
    raise ValueError(f"unknown scheme {scheme!r}")


# -- pattern tables ------------------------------------------------------------

def _links_from_codes(N: int, M: int, sr_code: int, dest: int, dest_code: int) -> LinkStateMatrix:
    """Synthetic frame: shared sr bits plus one destination's own column.

    sr bit j*M+k is link source j -> relay k; dest bit j (j < N) is source
    j -> dest, bit N+k is relay k -> dest.  Other destinations' columns
    are left down; per-destination rules never read them.
    """
    sr = np.zeros((N, M), dtype=bool)
    for j in range(N):
        for k in range(M):
            sr[j, k] = (sr_code >> (j * M + k)) & 1
    sd = np.zeros((N, N), dtype=bool)
    rd = np.zeros((M, N), dtype=bool)
    for j in range(N):
        sd[j, dest] = (dest_code >> j) & 1
    for k in range(M):
        rd[k, dest] = (dest_code >> (N + k)) & 1
    return LinkStateMatrix(sr=sr, sd=sd, rd=rd)


def _pattern_bits(N: int, M: int) -> int:
    return N * M + N + M


@lru_cache(maxsize=32)
def _success_table_cached(
    scheme: str, traffic: str, assume_A: bool, N: int, M: int, A: CodingMatrix | None
) -> np.ndarray:
    table = np.zeros((1 << (N * M), N, 1 << (N + M)), dtype=bool)
    multicast_shared = scheme == "dncc" and traffic == "multicast"
    for sr_code in range(1 << (N * M)):
        for dest in range(N):
            if multicast_shared and dest > 0:
                # The rank-N criterion sees the same surviving rows for
                # every destination; reuse destination 0's outcomes.
                table[sr_code, dest, :] = table[sr_code, 0, :]
                continue
            for code in range(1 << (N + M)):
                links = _links_from_codes(N, M, sr_code, dest, code)
                table[sr_code, dest, code] = dest_success(
                    scheme, A, links, dest, traffic, assume_A
                )
    table.setflags(write=False)
    return table


def success_table(cfg: ScenarioConfig, A: CodingMatrix | None) -> np.ndarray:
    """Per-pattern outcomes, indexed [sr_code, dest, dest_code].

    Shape (2^(N*M), N, 2^(N+M)); refused past the pattern-bits guard.
    """
    bits = _pattern_bits(cfg.N, cfg.M)
    if bits > PATTERN_BITS_GUARD:
        raise InfeasibleError(
            f"pattern space 2^{bits} exceeds the 2^{PATTERN_BITS_GUARD} guard"
        )
    return _success_table_cached(cfg.scheme, cfg.traffic, cfg.assume_A, cfg.N, cfg.M, A)


def resolve_matrix(cfg: ScenarioConfig, A: CodingMatrix | None) -> CodingMatrix | None:
    """The coding matrix a run will use: given, or built, or none (baselines)."""
    if cfg.scheme != "dncc":
        return None
    if A is None:
        return build_mds_matrix(cfg.N, cfg.M, default_field(cfg.N, cfg.M, cfg.L, cfg.poly))
    if A.N != cfg.N or A.M != cfg.M:
        raise ValueError(
            f"matrix is {A.N}x{A.M} sources x relays, config wants {cfg.N}x{cfg.M}"
        )
    return A


# -- exhaustive enumeration ----------------------------------------------------

@dataclass(frozen=True)
class ExactOutage:
    """Exact outage probabilities at one SNR grid point."""

    rho_db: float
    per_dest: tuple[float, ...]
    system: float

    @property
    def average(self) -> float:
        return sum(self.per_dest) / len(self.per_dest)


def _code_probs(nbits: int, p_up: float) -> np.ndarray:
    """Probability of each of the 2^nbits on/off patterns of iid links."""
    codes = np.arange(1 << nbits, dtype=np.uint32)
    bits = (codes[:, None] >> np.arange(nbits, dtype=np.uint32)) & 1
    per_bit = np.where(bits == 1, p_up, 1.0 - p_up)
    return per_bit.prod(axis=1)


def run_enumeration(cfg: ScenarioConfig, A: CodingMatrix | None = None) -> list[ExactOutage]:
    """Exact outage by summing link-pattern probabilities against outcomes.

    Destinations share only the source-relay links, so the sum factors:
    condition on the shared pattern, multiply each destination's own
    pattern probabilities, then combine per-destination conditionals into
    the anyone-fails system probability.
    """
    A = resolve_matrix(cfg, A)
    table = success_table(cfg, A)
    out = []
    for rho_db, rho in zip(cfg.rho_db, cfg.rho_grid):
        tau = outage_threshold_tau(cfg, rho)
        p_up = link_up_prob(cfg.beta, tau)
        sr_probs = _code_probs(cfg.N * cfg.M, p_up)
        dest_probs = _code_probs(cfg.N + cfg.M, p_up)
        # cond_fail[s, i] = P(dest i fails | sr pattern s)
        cond_fail = 1.0 - table @ dest_probs
        per_dest = tuple(float(sr_probs @ cond_fail[:, i]) for i in range(cfg.N))
        system = float(sr_probs @ (1.0 - (1.0 - cond_fail).prod(axis=1)))
        out.append(ExactOutage(rho_db=rho_db, per_dest=per_dest, system=system))
    return out


# -- Monte-Carlo ---------------------------------------------------------------

@dataclass(frozen=True)
class OutageEstimate:
    """Counts and derived estimates for one SNR grid point."""

    scheme: str
    traffic: str
    assume_A: bool
    N: int
    M: int
    rho_db: float
    trials: int
    dest_counts: tuple[int, ...]
    system_count: int

    def __post_init__(self):
        if any(c > self.trials for c in self.dest_counts) or self.system_count > self.trials:
            raise ValueError("outage count exceeds trial count")
        if self.dest_counts and self.system_count < max(self.dest_counts):
            raise ValueError("system count below a per-destination count")

    @property
    def p_hat(self) -> tuple[float, ...]:
        return tuple(c / self.trials for c in self.dest_counts)

    @property
    def stderr(self) -> tuple[float, ...]:
        return tuple(math.sqrt(p * (1.0 - p) / self.trials) for p in self.p_hat)

    @property
    def system_p(self) -> float:
        return self.system_count / self.trials

    @property
    def system_stderr(self) -> float:
        p = self.system_p
        return math.sqrt(p * (1.0 - p) / self.trials)

    @property
    def average_p(self) -> float:
        """Total errors over N*trials, the per-destination average."""
        return sum(self.dest_counts) / (self.N * self.trials)

    @property
    def total_events(self) -> int:
        return sum(self.dest_counts)


def _dest_bit_columns(N: int, M: int) -> np.ndarray:
    """Column indices of each destination's own bits in the flat link layout.

    Layout (matching uniforms_to_links): N*M sr bits, then N*N sd bits
    (row-major source, destination), then M*N rd bits (relay, destination).
    Result[i] lists dest i's N sd bits then M rd bits, in table bit order.
    """
    cols = np.empty((N, N + M), dtype=np.int64)
    for i in range(N):
        cols[i, :N] = N * M + np.arange(N) * N + i
        cols[i, N:] = N * M + N * N + np.arange(M) * N + i
    return cols


def _mc_counts_table(
    cfg: ScenarioConfig, table: np.ndarray, rho_index: int
) -> tuple[np.ndarray, int]:
    """Outage counts at one grid point via the pattern table."""
    N, M = cfg.N, cfg.M
    tau = outage_threshold_tau(cfg, cfg.rho_grid[rho_index])
    p_up = link_up_prob(cfg.beta, tau)
    sr_weights = (1 << np.arange(N * M, dtype=np.uint64)) if N * M else None
    dest_weights = 1 << np.arange(N + M, dtype=np.uint64)
    dest_cols = _dest_bit_columns(N, M)
    dest_counts = np.zeros(N, dtype=np.int64)
    system_count = 0
    flat_table = table.reshape(-1)  # index ((sr * N) + dest) * 2^(N+M) + code
    dest_stride = np.uint64(1 << (N + M))
    done = 0
    block = 0
    while done < cfg.trials:
        n = min(STREAM_BLOCK, cfg.trials - done)
        rng = stream_for_block(cfg.seed, rho_index, block)
        u = rng.random((n, cfg.n_links))
        bits = u < p_up
        if sr_weights is not None:
            sr_codes = bits[:, : N * M].astype(np.uint64) @ sr_weights
        else:
            sr_codes = np.zeros(n, dtype=np.uint64)
        fail_any = np.zeros(n, dtype=bool)
        base = sr_codes * np.uint64(N) * dest_stride
        for i in range(N):
            codes = bits[:, dest_cols[i]].astype(np.uint64) @ dest_weights
            ok = flat_table[(base + np.uint64(i) * dest_stride + codes).astype(np.int64)]
            dest_counts[i] += int(n - ok.sum())
            fail_any |= ~ok
        system_count += int(fail_any.sum())
        done += n
        block += 1
    return dest_counts, system_count


def _mc_counts_per_trial(
    cfg: ScenarioConfig, A: CodingMatrix | None, rho_index: int
) -> tuple[np.ndarray, int]:
    """Reference path: same streams, per-trial elimination, no table."""
    N = cfg.N
    tau = outage_threshold_tau(cfg, cfg.rho_grid[rho_index])
    p_up = link_up_prob(cfg.beta, tau)
    dest_counts = np.zeros(N, dtype=np.int64)
    system_count = 0
    done = 0
    block = 0
    while done < cfg.trials:
        n = min(STREAM_BLOCK, cfg.trials - done)
        rng = stream_for_block(cfg.seed, rho_index, block)
        u = rng.random((n, cfg.n_links))
        for t in range(n):
            links = uniforms_to_links(cfg, u[t], p_up)
            any_fail = False
            for i in range(N):
                if not dest_success(cfg.scheme, A, links, i, cfg.traffic, cfg.assume_A):
                    dest_counts[i] += 1
                    any_fail = True
            system_count += any_fail
        done += n
        block += 1
    return dest_counts, system_count


def _counts_one_rho(args) -> tuple[np.ndarray, int]:
    cfg, A, rho_index, use_table = args
    if use_table:
        return _mc_counts_table(cfg, success_table(cfg, A), rho_index)
    return _mc_counts_per_trial(cfg, A, rho_index)


def run_monte_carlo(
    cfg: ScenarioConfig, A: CodingMatrix | None = None, workers: int = 1
) -> list[OutageEstimate]:
    """Monte-Carlo outage estimates over the config's SNR grid.

    Counts are bit-identical for any `workers` value: every trial block
    has its own counter-based stream and blocks are reduced by integer
    sums.
    """
    A = resolve_matrix(cfg, A)
    use_table = _pattern_bits(cfg.N, cfg.M) <= PATTERN_BITS_GUARD
    if use_table:
        success_table(cfg, A)  # build (and cache) before forking workers
    tasks = [(cfg, A, k, use_table) for k in range(len(cfg.rho_db))]
    if workers > 1 and len(tasks) > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_counts_one_rho, tasks))
    else:
        results = [_counts_one_rho(t) for t in tasks]
    out = []
    for rho_db, (dest_counts, system_count) in zip(cfg.rho_db, results):
        out.append(
            OutageEstimate(
                scheme=cfg.scheme,
                traffic=cfg.traffic,
                assume_A=cfg.assume_A,
                N=cfg.N,
                M=cfg.M,
                rho_db=rho_db,
                trials=cfg.trials,
                dest_counts=tuple(int(c) for c in dest_counts),
                system_count=int(system_count),
            )
        )
    return out


def run_baseline(cfg: ScenarioConfig, workers: int = 1) -> list[OutageEstimate]:
    """Monte-Carlo runs for the ncc / cc comparison schemes."""
    if cfg.scheme not in ("ncc", "cc"):
        raise ValueError(f"baseline runner handles ncc and cc, not {cfg.scheme!r}")
    return run_monte_carlo(cfg, None, workers=workers)


# -- diversity-order fitting ----------------------------------------------------

@dataclass(frozen=True)
class SlopeFit:
    """Fitted log-log slope of outage versus SNR."""

    slope: float
    intercept: float
    n_points: int
    low_confidence: bool
    note: str = ""


def estimate_diversity_slope(
    rho: list[float],
    p: list[float],
    events: list[int] | None = None,
    min_events: int = 100,
) -> SlopeFit:
    """Least-squares slope of log p versus log rho.

    Only points backed by at least `min_events` outage events enter the
    fit (pass events=None for exact curves).  With fewer than two usable
    points the result is flagged low-confidence instead of extrapolated.
    """
    if events is not None and len(events) != len(p):
        raise ValueError("events and p differ in length")
    if len(rho) != len(p):
        raise ValueError("rho and p differ in length")
    usable = [
        (r, v)
        for idx, (r, v) in enumerate(zip(rho, p))
        if v > 0 and (events is None or events[idx] >= min_events)
    ]
    if len(usable) < 2:
        return SlopeFit(
            slope=math.nan,
            intercept=math.nan,
            n_points=len(usable),
            low_confidence=True,
            note=f"only {len(usable)} points with >= {min_events} events",
        )
    x = np.log([r for r, _ in usable])
    y = np.log([v for _, v in usable])
    slope, intercept = np.polyfit(x, y, 1)
    return SlopeFit(
        slope=float(slope),
        intercept=float(intercept),
        n_points=len(usable),
        low_confidence=False,
    )


def slope_inputs(
    estimates: list[OutageEstimate], metric: str = "average"
) -> tuple[list[float], list[float], list[int]]:
    """(rho_linear, p, events) series for slope fitting."""
    rho = [10.0 ** (e.rho_db / 10.0) for e in estimates]
    if metric == "average":
        p = [e.average_p for e in estimates]
        events = [e.total_events for e in estimates]
    elif metric == "system":
        p = [e.system_p for e in estimates]
        events = [e.system_count for e in estimates]
    else:
        raise ValueError(f"unknown metric {metric!r}")
    return rho, p, events


# -- result files ----------------------------------------------------------------

RESULTS_CSV_HEADER = [
    "scheme", "traffic", "assume_A", "N", "M", "L", "beta", "R",
    "rho_db", "trials", "dest_index", "outage_count", "p_hat", "stderr",
]


def write_results_csv(
    estimates: list[OutageEstimate],
    cfg: ScenarioConfig,
    A: CodingMatrix | None,
    path,
    comments: list[str] | None = None,
) -> None:
    """Frozen-format results table; one row per destination plus 'system'."""
    L = A.field.L if A is not None else 1
    with open(path, "w", newline="", encoding="ascii") as fh:
        for line in comments or []:
            fh.write(f"# {line}\n")
        writer = csv.writer(fh)
        writer.writerow(RESULTS_CSV_HEADER)
        for est in estimates:
            shared = [est.scheme, est.traffic, str(est.assume_A).lower(),
                      est.N, est.M, L, repr(cfg.beta), repr(cfg.system_rate),
                      repr(est.rho_db), est.trials]
            for i, count in enumerate(est.dest_counts):
                writer.writerow(shared + [i, count, repr(est.p_hat[i]), repr(est.stderr[i])])
            writer.writerow(shared + ["system", est.system_count,
                                      repr(est.system_p), repr(est.system_stderr)])


def write_manifest(cfg: ScenarioConfig, A: CodingMatrix | None, path, version: str) -> None:
    """Reproducibility record: config echo, seed, matrix hash, code version."""
    from .channel import config_lines

    lines = ["[run]"]
    lines.append(f"version = {version}")
    lines.append(f"stream_block = {STREAM_BLOCK}")
    lines.append(f"matrix_sha256 = {A.content_hash() if A is not None else 'none'}")
    lines.append("")
    lines.append("[config]")
    lines.extend(config_lines(cfg))
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")
