"""Scenario configuration and the Rayleigh-fading link abstraction.

Every link carries one packet per frame at a fixed per-packet rate R_i
derived from the system rate R and the scheme's slot count: a scheme that
spends S slots delivering N packets has R_i = (S/N) R.  A link is in outage
when log2(1 + |h|^2 rho) < R_i, i.e. when the exponential channel gain
|h|^2 ~ Exp(beta) falls below tau = (2^R_i - 1) / rho.  Packets either
survive or are erased at this granularity; nothing below it is modeled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

SCHEMES = ("dncc", "ncc", "cc")
TRAFFIC_MODES = ("unicast", "multicast")

# Trials are processed in fixed-size blocks, each with its own counter-based
# random stream keyed by (seed, rho index, block index).  Block boundaries
# depend only on the trial index, so aggregate counts are identical for any
# worker count or scheduling order.  The block size is part of the output
# contract: changing it changes which stream a trial draws from.
STREAM_BLOCK = 1 << 16


class ConfigError(Exception):
    """Invalid or inconsistent scenario configuration."""


def slots_per_frame(scheme: str, N: int, M: int) -> int:
    """Time slots spent delivering N packets: N+M, N+1, or 2N."""
    if scheme == "dncc":
        return N + M
    if scheme == "ncc":
        return N + 1
    if scheme == "cc":
        return 2 * N
    raise ConfigError(f"unknown scheme {scheme!r}")


@dataclass(frozen=True)
class ScenarioConfig:
    """Full description of one outage experiment.

    Exactly one of `system_rate` (R, BPCU) and `packet_rate` (R_i, BPCU)
    is given at construction; the other is derived.  The SNR grid is held
    in dB; `rho_grid` yields the linear values.
    """

    scheme: str
    N: int
    M: int
    beta: float
    rho_db: tuple[float, ...]
    traffic: str = "multicast"
    assume_A: bool = True
    trials: int = 10000
    seed: int = 0
    system_rate: float | None = None
    packet_rate: float | None = None
    L: int | None = None
    poly: int | None = None
    sample_gains: bool = False
    rate_given: str = ""  # "R" or "Ri"; set at construction

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ConfigError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if self.traffic not in TRAFFIC_MODES:
            raise ConfigError(f"traffic must be one of {TRAFFIC_MODES}, got {self.traffic!r}")
        if self.scheme in ("ncc", "cc") and self.traffic != "unicast":
            raise ConfigError(f"{self.scheme} supports only unicast traffic")
        if self.N < 1:
            raise ConfigError(f"need N >= 1, got {self.N}")
        if self.M < 0:
            raise ConfigError(f"need M >= 0, got {self.M}")
        if not self.beta > 0:
            raise ConfigError(f"need beta > 0, got {self.beta}")
        if not self.rho_db:
            raise ConfigError("empty SNR grid")
        if self.trials < 1:
            raise ConfigError(f"need trials >= 1, got {self.trials}")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must fit in 64 bits")
        slots = slots_per_frame(self.scheme, self.N, self.M)
        if self.system_rate is None and self.packet_rate is None:
            raise ConfigError("give exactly one of system rate R and packet rate Ri")
        if self.system_rate is not None and self.packet_rate is not None:
            # Only self-consistent pairs pass, so copies made by replace()
            # keep both values bit for bit instead of re-deriving one.
            ok = (self.packet_rate == self.system_rate * slots / self.N
                  or self.system_rate == self.packet_rate * self.N / slots)
            if not ok:
                raise ConfigError("give exactly one of system rate R and packet rate Ri")
        elif self.system_rate is not None:
            if not self.system_rate >= 0:
                raise ConfigError("system rate must be >= 0")
            object.__setattr__(self, "packet_rate", self.system_rate * slots / self.N)
            object.__setattr__(self, "rate_given", "R")
        else:
            if not self.packet_rate >= 0:
                raise ConfigError("packet rate must be >= 0")
            object.__setattr__(self, "system_rate", self.packet_rate * self.N / slots)
            object.__setattr__(self, "rate_given", "Ri")

    @property
    def rho_grid(self) -> tuple[float, ...]:
        return tuple(10.0 ** (db / 10.0) for db in self.rho_db)

    @property
    def n_links(self) -> int:
        """Independent fading links per frame: N*M + N*N + M*N."""
        return self.N * self.M + self.N * self.N + self.M * self.N

    def with_overrides(self, **kw) -> "ScenarioConfig":
        """Copy with changes; the user-given rate carries over and the
        derived one is recomputed (scheme changes shift R_i, not R)."""
        if "system_rate" in kw and "packet_rate" not in kw:
            kw["packet_rate"] = None
        elif "packet_rate" in kw and "system_rate" not in kw:
            kw["system_rate"] = None
        elif "system_rate" not in kw and "packet_rate" not in kw:
            kw["packet_rate" if self.rate_given == "R" else "system_rate"] = None
        return replace(self, **kw)


@dataclass(frozen=True)
class LinkStateMatrix:
    """Boolean per-link success indicators for one frame.

    sr[j, k]: source j reached relay k;  sd[j, i]: source j reached
    destination i;  rd[k, i]: relay k reached destination i.
    """

    sr: np.ndarray
    sd: np.ndarray
    rd: np.ndarray

    def __post_init__(self):
        N = self.sd.shape[0]
        M = self.sr.shape[1] if self.sr.size else self.rd.shape[0]
        if self.sr.shape != (N, M) or self.sd.shape != (N, N) or self.rd.shape != (M, N):
            raise ValueError(
                f"inconsistent link dimensions sr{self.sr.shape} sd{self.sd.shape} rd{self.rd.shape}"
            )


def outage_threshold_tau(cfg: ScenarioConfig, rho: float) -> float:
    """Channel-gain threshold below which a link cannot carry R_i BPCU."""
    if not rho > 0:
        raise ValueError(f"need rho > 0, got {rho}")
    return (2.0 ** cfg.packet_rate - 1.0) / rho


def link_outage_prob(beta: float, tau: float) -> float:
    """P(|h|^2 < tau) for |h|^2 ~ Exp(beta): 1 - exp(-beta*tau)."""
    if not beta > 0:
        raise ValueError(f"need beta > 0, got {beta}")
    if tau < 0:
        raise ValueError(f"need tau >= 0, got {tau}")
    return -math.expm1(-beta * tau)


def link_up_prob(beta: float, tau: float) -> float:
    """Complement of link_outage_prob, computed without cancellation."""
    if not beta > 0:
        raise ValueError(f"need beta > 0, got {beta}")
    if tau < 0:
        raise ValueError(f"need tau >= 0, got {tau}")
    return math.exp(-beta * tau)


def stream_for_block(seed: int, rho_index: int, block_index: int) -> np.random.Generator:
    """Counter-based stream for one block of trials at one grid point."""
    if not (0 <= rho_index < 2**32 and 0 <= block_index < 2**32):
        raise ValueError("rho or block index out of range")
    key = np.array([seed, (rho_index << 32) | block_index], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def uniforms_to_links(cfg: ScenarioConfig, u: np.ndarray, p_up: float) -> LinkStateMatrix:
    """Map one frame's worth of uniforms to link states.

    Layout: N*M source-relay draws first, then N*N source-destination,
    then M*N relay-destination, each block row-major.  A link is up when
    its uniform is below p_up; the gain view of the same draw is
    -log(u)/beta, so both samplers agree draw for draw, not only in
    distribution.
    """
    N, M = cfg.N, cfg.M
    bits = u < p_up
    sr = bits[: N * M].reshape(N, M)
    sd = bits[N * M: N * M + N * N].reshape(N, N)
    rd = bits[N * M + N * N:].reshape(M, N)
    return LinkStateMatrix(sr=sr, sd=sd, rd=rd)


def sample_links(cfg: ScenarioConfig, rho: float, rng: np.random.Generator) -> LinkStateMatrix:
    """Draw one frame of independent link states at average SNR `rho`."""
    tau = outage_threshold_tau(cfg, rho)
    p_up = link_up_prob(cfg.beta, tau)
    u = rng.random(cfg.n_links)
    if cfg.sample_gains:
        with np.errstate(divide="ignore"):
            gains = -np.log(u) / cfg.beta
        bits = gains > tau
        N, M = cfg.N, cfg.M
        return LinkStateMatrix(
            sr=bits[: N * M].reshape(N, M),
            sd=bits[N * M: N * M + N * N].reshape(N, N),
            rd=bits[N * M + N * N:].reshape(M, N),
        )
    return uniforms_to_links(cfg, u, p_up)


# -- key/value config files -------------------------------------------------

_CONFIG_KEYS = {
    "scheme", "traffic", "assume_A", "N", "M", "beta", "R", "Ri",
    "rho_db", "rho", "trials", "seed", "L", "poly", "sample_gains",
}

_BOOL_WORDS = {"true": True, "yes": True, "on": True, "1": True,
               "false": False, "no": False, "off": False, "0": False}


def _parse_bool(key: str, raw: str) -> bool:
    try:
        return _BOOL_WORDS[raw.strip().lower()]
    except KeyError:
        raise ConfigError(f"{key}: expected a boolean, got {raw!r}") from None


def _parse_grid(key: str, raw: str) -> tuple[float, ...]:
    """Grid syntax: whitespace/comma separated values, or start:step:stop."""
    raw = raw.strip()
    if ":" in raw:
        parts = raw.split(":")
        if len(parts) != 3:
            raise ConfigError(f"{key}: range syntax is start:step:stop, got {raw!r}")
        start, step, stop = (float(p) for p in parts)
        if step <= 0 or stop < start:
            raise ConfigError(f"{key}: bad range {raw!r}")
        n = int(round((stop - start) / step)) + 1
        return tuple(start + i * step for i in range(n))
    toks = raw.replace(",", " ").split()
    if not toks:
        raise ConfigError(f"{key}: empty grid")
    return tuple(float(t) for t in toks)


def parse_config(text: str, overrides: dict[str, str] | None = None) -> ScenarioConfig:
    """Parse `key = value` lines into a ScenarioConfig.

    Blank lines and `#` comments are ignored.  Unknown keys are hard
    errors.  `overrides` (from the command line) are applied after the
    file and before validation.
    """
    pairs: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key not in _CONFIG_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in pairs:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        pairs[key] = value
    for key, value in (overrides or {}).items():
        if key not in _CONFIG_KEYS:
            raise ConfigError(f"override: unknown key {key!r}")
        pairs[key] = value

    def need(key: str) -> str:
        if key not in pairs:
            raise ConfigError(f"missing required key {key!r}")
        return pairs[key]

    try:
        kw: dict = {
            "scheme": need("scheme").lower(),
            "N": int(need("N")),
            "M": int(need("M")),
            # Unstated fading and rate default to the reference simulation
            # point: unit channel-gain variance, one BPCU per packet.
            "beta": float(pairs.get("beta", "1")),
        }
        if "rho_db" in pairs and "rho" in pairs:
            raise ConfigError("give only one of rho_db and rho")
        if "rho_db" in pairs:
            kw["rho_db"] = _parse_grid("rho_db", pairs["rho_db"])
        elif "rho" in pairs:
            lin = _parse_grid("rho", pairs["rho"])
            if any(v <= 0 for v in lin):
                raise ConfigError("rho: linear SNR values must be > 0")
            kw["rho_db"] = tuple(10.0 * math.log10(v) for v in lin)
        else:
            raise ConfigError("missing SNR grid: give rho_db or rho")
        if "R" in pairs and "Ri" in pairs:
            raise ConfigError("give only one of R and Ri")
        if "R" in pairs:
            kw["system_rate"] = float(pairs["R"])
        elif "Ri" in pairs:
            kw["packet_rate"] = float(pairs["Ri"])
        else:
            kw["packet_rate"] = 1.0
        for key, conv in (("traffic", str.lower), ("trials", int), ("seed", int),
                          ("L", int), ("poly", int)):
            if key in pairs:
                kw[key] = conv(pairs[key])
        for key in ("assume_A", "sample_gains"):
            if key in pairs:
                kw[key] = _parse_bool(key, pairs[key])
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return ScenarioConfig(**kw)


def load_config(path, overrides: dict[str, str] | None = None) -> ScenarioConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read(), overrides)


def config_lines(cfg: ScenarioConfig) -> list[str]:
    """Canonical key=value echo of a config, for headers and manifests."""
    lines = [
        f"scheme = {cfg.scheme}",
        f"traffic = {cfg.traffic}",
        f"assume_A = {str(cfg.assume_A).lower()}",
        f"N = {cfg.N}",
        f"M = {cfg.M}",
        f"beta = {cfg.beta!r}",
        f"R = {cfg.system_rate!r}",
        f"Ri = {cfg.packet_rate!r}",
        "rho_db = " + " ".join(repr(v) for v in cfg.rho_db),
        f"trials = {cfg.trials}",
        f"seed = {cfg.seed}",
    ]
    if cfg.L is not None:
        lines.append(f"L = {cfg.L}")
    if cfg.poly is not None:
        lines.append(f"poly = {cfg.poly}")
    if cfg.sample_gains:
        lines.append("sample_gains = true")
    return lines
