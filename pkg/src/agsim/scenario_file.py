"""Reading scenario ``.cfg`` files (INI syntax, units spelled out in key names).

Example::

    [nodes]
    ue = 0.0, 0.0, 0.0
    uav = 30.0, 0.0, 10.0

    [buildings]
    tower.min = 10.0, 0.0, -30.0
    tower.max = 20.0, 50.0, 30.0

    [radio]
    frequency_hz = 5e9

Sections ``obstacle_params``, ``error_params``, ``traffic``, ``timing`` and
``seeds`` are optional; omitted keys take the library defaults.
"""

from __future__ import annotations

import configparser
import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .channel import ObstacleLossParams, RadioConfig
from .errors import ConfigurationError, ScenarioParseError
from .geom import Box, Point3
from .link import ErrorModelParams
from .simcore import Scenario

FLOAT, INT, STR = float, int, str

SCHEMA = {
    "scenario": {"name": STR},
    "nodes": {"ue": "point", "uav": "point"},
    "radio": {
        "frequency_hz": FLOAT, "tx_power_dbm": FLOAT, "antenna_gain_tx_dbi": FLOAT,
        "antenna_gain_rx_dbi": FLOAT, "channel_width_hz": FLOAT, "phy_rate_bps": FLOAT,
        "noise_figure_db": FLOAT,
    },
    "obstacle_params": {
        "wall_loss_db": FLOAT, "walls_per_building": INT,
        "shadowing_sigma_los_db": FLOAT, "shadowing_sigma_nlos_db": FLOAT,
    },
    "error_params": {
        "snr_mid_db": FLOAT, "steepness_db": FLOAT, "max_retries": INT,
        "per_attempt_overhead_s": FLOAT,
    },
    "traffic": {
        "mode": STR, "offered_load_bps": FLOAT, "packet_bytes": INT,
        "queue_capacity_packets": INT, "tcp_window": INT, "rto_factor": FLOAT,
        "tcp_max_retransmits": INT,
    },
    "timing": {"warmup_s": FLOAT, "measure_s": FLOAT, "sample_interval_s": FLOAT},
    "seeds": {"seeds": "seeds"},
}
REQUIRED = (("nodes", "ue"), ("nodes", "uav"), ("radio", "frequency_hz"))

_SECTION_RE = re.compile(r"^\s*\[([^\]]+)\]")
_KEY_RE = re.compile(r"^([^\s#;=:][^=:]*?)\s*[=:]")


@dataclass(frozen=True)
class ScenarioFile:
    name: str
    scenario: Scenario
    seeds: tuple[int, ...]
    path: str | None = None


def parse_seeds(text: str) -> tuple[int, ...]:
    """``"1..10"``, ``"1, 4, 9"`` or a mix such as ``"1..3, 7"``."""
    seeds: list[int] = []
    for part in str(text).split(","):
        part = part.strip()
        if not part:
            continue
        if ".." in part:
            lo, hi = (int(v) for v in part.split("..", 1))
            if hi < lo:
                raise ValueError(f"empty seed range {part!r}")
            seeds.extend(range(lo, hi + 1))
        else:
            seeds.append(int(part))
    if not seeds:
        raise ValueError("no seeds given")
    return tuple(seeds)


def _parse_triple(text: str) -> Point3:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 3:
        raise ValueError(f"expected 'x, y, z', got {text!r}")
    return Point3(*(float(p) for p in parts))


def _key_lines(text: str) -> dict[tuple[str, str], int]:
    lines: dict[tuple[str, str], int] = {}
    section = None
    for no, raw in enumerate(text.splitlines(), start=1):
        if m := _SECTION_RE.match(raw):
            section = m.group(1).strip()
            lines.setdefault((section, ""), no)
        elif section and (m := _KEY_RE.match(raw)):
            lines.setdefault((section, m.group(1).strip().lower()), no)
    return lines


def loads(text: str, name: str = "scenario", path: str | None = None) -> ScenarioFile:
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    try:
        cp.read_string(text, source=path or "<string>")
    except configparser.ParsingError as exc:
        line = exc.errors[0][0] if getattr(exc, "errors", None) else None
        raise ScenarioParseError("malformed line", line=line) from exc
    except configparser.Error as exc:
        raise ScenarioParseError(exc.message, line=getattr(exc, "lineno", None)) from exc

    lines = _key_lines(text)

    def fail(msg, section, key=None):
        raise ScenarioParseError(msg, line=lines.get((section, key or "")),
                                 field=f"{section}.{key}" if key else section)

    values: dict[str, dict] = {s: {} for s in SCHEMA}
    buildings: dict[str, dict[str, Point3]] = {}
    for section in cp.sections():
        if section == "buildings":
            for key, raw in cp.items(section):
                label, dot, end = key.rpartition(".")
                if not dot or end not in ("min", "max"):
                    fail("building keys must look like '<label>.min' / '<label>.max'", section, key)
                try:
                    buildings.setdefault(label, {})[end] = _parse_triple(raw)
                except ValueError as exc:
                    fail(str(exc), section, key)
            continue
        if section not in SCHEMA:
            fail(f"unknown section [{section}]", section)
        for key, raw in cp.items(section):
            kind = SCHEMA[section].get(key)
            if kind is None:
                fail(f"unknown key {key!r}", section, key)
            try:
                if kind == "point":
                    values[section][key] = _parse_triple(raw)
                elif kind == "seeds":
                    values[section][key] = parse_seeds(raw)
                elif kind is INT:
                    values[section][key] = int(raw)
                else:
                    values[section][key] = kind(raw.strip())
            except ValueError as exc:
                fail(f"bad value {raw!r}: {exc}", section, key)

    for section, key in REQUIRED:
        if key not in values[section]:
            fail("required field is missing", section, key)

    boxes = []
    for label, ends in buildings.items():
        if set(ends) != {"min", "max"}:
            fail(f"building {label!r} needs both .min and .max", "buildings", f"{label}.min")
        try:
            boxes.append(Box(ends["min"], ends["max"]))
        except ValueError as exc:
            fail(str(exc), "buildings", f"{label}.min")

    try:
        err = dict(values["error_params"])
        overhead = err.pop("per_attempt_overhead_s", None)
        extra = {} if overhead is None else {"per_attempt_overhead_s": overhead}
        traffic = values["traffic"]
        timing = values["timing"]
        scenario_name = values["scenario"].get("name", name)
        scenario = Scenario(
            ue_pos=values["nodes"]["ue"],
            uav_pos=values["nodes"]["uav"],
            buildings=tuple(boxes),
            radio=RadioConfig(**values["radio"]),
            obstacle_params=ObstacleLossParams(**values["obstacle_params"]),
            error_params=ErrorModelParams(**err),
            name=scenario_name,
            **traffic, **timing, **extra,
        )
        scenario.validate()
    except ConfigurationError:
        raise
    except ValueError as exc:
        raise ConfigurationError(str(exc)) from exc
    seeds = values["seeds"].get("seeds", (1,))
    return ScenarioFile(scenario_name, scenario, seeds, path)


def bundled_path(name: str) -> Path:
    return Path(str(resources.files("agsim") / "scenarios" / name))


def load(path: str | Path) -> ScenarioFile:
    """Load a scenario file; a bare name such as ``scenario2.cfg`` that does not
    exist on disk is looked up among the bundled scenarios."""
    p = Path(path)
    if not p.exists() and p.parent == Path(".") and bundled_path(p.name).exists():
        p = bundled_path(p.name)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioParseError(f"cannot read {p}: {exc.strerror}") from exc
    return loads(text, name=p.stem, path=str(p))
