"""Experiment configuration: one INI file, one section per subcommand.

Schema (every key optional except ``general.seed``; lists are comma separated)::

    [general]     seed, o1_constant, o1_exponent, jobs
    [jcount]      p, H, A, mset
    [jsweep]      primes, H, families, sizes, ell
    [lattice]     primes, triples, htok_primes, htok_H, htok_K, htok_M
    [weil]        primes, count, max_degree
    [kloosterman] primes, r, method, oracle_max_p
    [bilinear]    primes, r, M, N, shift, ell, weights
    [trilinear]   primes, H, K, M, ell, chi, eps, weights
    [verify]      see VerifyConfig
"""

import configparser
import dataclasses
import typing
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError
from .field import is_prime
from .report import O1Convention


@dataclass
class JCountConfig:
    p: int = 5
    H: int = 2
    A: int = 0
    mset: tuple[int, ...] = (1, 2)


@dataclass
class JSweepConfig:
    primes: tuple[int, ...] = (101, 1009)
    H: tuple[int, ...] = (10, 50, 200, 600)
    families: tuple[str, ...] = ("random", "interval", "quadratic_residues")
    sizes: tuple[int, ...] = (5, 20, 60)
    ell: int = 2


@dataclass
class LatticeConfig:
    primes: tuple[int, ...] = (101, 1009, 10007)
    triples: int = 30
    htok_primes: tuple[int, ...] = (101, 1009)
    htok_H: tuple[int, ...] = (20, 50, 100)
    htok_K: tuple[int, ...] = (5, 10, 50)
    htok_M: tuple[int, ...] = (4, 16)


@dataclass
class WeilConfig:
    primes: tuple[int, ...] = (5, 7, 11, 101, 1009)
    count: int = 20
    max_degree: int = 6


@dataclass
class KloostermanConfig:
    primes: tuple[int, ...] = (5, 7, 11, 101, 1009)
    r: tuple[int, ...] = (1, 2, 3, 4)
    method: str = "direct"
    oracle_max_p: int = 101


@dataclass
class BilinearConfig:
    primes: tuple[int, ...] = (1009,)
    r: tuple[int, ...] = (2, 3)
    M: tuple[int, ...] = (5, 20)
    N: tuple[int, ...] = (50, 200)
    shift: int = 0
    ell: tuple[int, ...] = (2, 4)
    weights: str = "random"


@dataclass
class TrilinearConfig:
    primes: tuple[int, ...] = (101, 1009)
    H: tuple[int, ...] = (10, 100)
    K: tuple[int, ...] = (10, 50)
    M: tuple[int, ...] = (3, 9)
    ell: tuple[int, ...] = (1, 2)
    chi: str = "quadratic"
    eps: float = 0.05
    weights: str = "unit"


@dataclass
class VerifyConfig:
    """Sizes of the acceptance checks; the defaults are the full acceptance scale."""

    j_primes: tuple[int, ...] = (5, 7, 11, 101, 1009)
    j_cells: int = 50
    lattice_primes: tuple[int, ...] = (101, 1009, 10007)
    lattice_triples: int = 1000
    htok_primes: tuple[int, ...] = (101, 1009)
    htok_cells: int = 100
    kl_oracle_primes: tuple[int, ...] = (5, 7, 11, 13, 31, 101)
    kl_deligne_primes: tuple[int, ...] = (5, 7, 11, 101, 1009, 10007)
    kl_rmax: int = 4
    route_queries: int = 30
    route_primes: tuple[int, ...] = (101, 1009)
    basic_primes: tuple[int, ...] = (101, 1009)
    determinism: bool = True


SECTIONS = {
    "jcount": JCountConfig,
    "jsweep": JSweepConfig,
    "lattice": LatticeConfig,
    "weil": WeilConfig,
    "kloosterman": KloostermanConfig,
    "bilinear": BilinearConfig,
    "trilinear": TrilinearConfig,
    "verify": VerifyConfig,
}


@dataclass
class ExperimentConfig:
    seed: int
    o1: O1Convention = O1Convention()
    jobs: int | None = None
    source: str = "<defaults>"
    jcount: JCountConfig = field(default_factory=JCountConfig)
    jsweep: JSweepConfig = field(default_factory=JSweepConfig)
    lattice: LatticeConfig = field(default_factory=LatticeConfig)
    weil: WeilConfig = field(default_factory=WeilConfig)
    kloosterman: KloostermanConfig = field(default_factory=KloostermanConfig)
    bilinear: BilinearConfig = field(default_factory=BilinearConfig)
    trilinear: TrilinearConfig = field(default_factory=TrilinearConfig)
    verify: VerifyConfig = field(default_factory=VerifyConfig)

    def all_primes(self) -> list[tuple[str, int]]:
        out = [("jcount.p", self.jcount.p)]
        for name in SECTIONS:
            sec = getattr(self, name)
            for f in dataclasses.fields(sec):
                if "primes" in f.name:
                    out.extend((f"{name}.{f.name}", p) for p in getattr(sec, f.name))
        return out

    def validate(self) -> "ExperimentConfig":
        for where, p in self.all_primes():
            if not is_prime(p) or p < 3:
                raise ConfigError(f"{self.source}: {where}: {p} is not prime")
        for ell in self.bilinear.ell:
            if ell < 2 or ell % 2:
                raise ConfigError(f"{self.source}: bilinear.ell: {ell} must be even")
        return self


def _line_of(text: str, section: str, key: str) -> int | None:
    current = None
    for lineno, line in enumerate(text.splitlines(), 1):
        s = line.strip()
        if s.startswith("[") and s.endswith("]"):
            current = s[1:-1].strip()
        elif current == section and s.split("=", 1)[0].strip().lower() == key.lower():
            return lineno
    return None


def _coerce(raw: str, tp):
    origin = typing.get_origin(tp)
    if origin is tuple:
        (inner, _) = typing.get_args(tp)
        return tuple(_coerce(part.strip(), inner) for part in raw.split(",") if part.strip())
    if origin is typing.Union:
        inner = next(a for a in typing.get_args(tp) if a is not type(None))
        return _coerce(raw, inner)
    if tp is bool:
        low = raw.strip().lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise ValueError(f"not a boolean: {raw!r}")
    return tp(raw.strip())


def _fill(cls, items: dict, text: str, section: str, source: str):
    hints = typing.get_type_hints(cls)
    kwargs = {}
    for key, raw in items.items():
        if key not in hints:
            line = _line_of(text, section, key)
            raise ConfigError(f"{source}:{line}: unknown key {key!r} in [{section}]")
        try:
            kwargs[key] = _coerce(raw, hints[key])
        except (TypeError, ValueError) as exc:
            line = _line_of(text, section, key)
            raise ConfigError(f"{source}:{line}: [{section}] {key} = {raw!r}: {exc}") from None
    return cls(**kwargs)


def parse_config(text: str, source: str = "<string>", seed: int | None = None) -> ExperimentConfig:
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from None
    general = dict(parser["general"]) if parser.has_section("general") else {}
    unknown = set(parser.sections()) - set(SECTIONS) - {"general"}
    if unknown:
        raise ConfigError(f"{source}: unknown section(s) {sorted(unknown)}")
    try:
        cfg_seed = seed if seed is not None else int(general.pop("seed"))
        general.pop("seed", None)
        o1 = O1Convention(float(general.pop("o1_constant", 1.0)), float(general.pop("o1_exponent", 1.0)))
        jobs = general.pop("jobs", None)
        jobs = int(jobs) if jobs is not None else None
    except KeyError:
        raise ConfigError(f"{source}: [general] seed is mandatory") from None
    except ValueError as exc:
        raise ConfigError(f"{source}: [general]: {exc}") from None
    if general:
        raise ConfigError(f"{source}: unknown key(s) in [general]: {sorted(general)}")
    sections = {
        name: _fill(cls, dict(parser[name]), text, name, source)
        for name, cls in SECTIONS.items()
        if parser.has_section(name)
    }
    return ExperimentConfig(seed=cfg_seed, o1=o1, jobs=jobs, source=source, **sections).validate()


def load_config(path: str | Path, seed: int | None = None) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config(text, str(path), seed)
