"""Stage tables (delimited text) and scenario configs (YAML or JSON)."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import yaml

from .exceptions import CodpError, NegativeFieldError, ParseError, ValidationError
from .fitting import DEFAULT_CV_THRESHOLD, Family
from .production import ProductionLine, StageProfile, build_line
from .simulation import DemandFamily, SimConfig

STAGE_TABLE_COLUMNS = (
    "stage_index",
    "time_mean",
    "time_std",
    "generic_unit_cost",
    "custom_unit_cost",
    "modification_cost",
    "holding_cost",
    "turnover",
    "std_inventory",
    "inventory_adjustment",
)
OPTIONAL_COLUMNS = ("inventory_adjustment",)


def read_stage_table(path) -> list[StageProfile]:
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"stage table not found: {path}")
    return parse_stage_table(path.read_text(encoding="utf-8"))


def parse_stage_table(text: str) -> list[StageProfile]:
    lines = text.splitlines()
    if not lines or not lines[0].strip():
        raise ParseError(1, "header", "empty stage table")
    try:
        dialect = csv.Sniffer().sniff(lines[0], delimiters=",;\t")
    except csv.Error:
        dialect = csv.excel
    reader = csv.reader(io.StringIO(text), dialect)
    header = [h.strip().lower() for h in next(reader)]
    for col in STAGE_TABLE_COLUMNS:
        if col not in header and col not in OPTIONAL_COLUMNS:
            raise ParseError(1, col, f"missing required column {col!r}")
    dupes = {h for h in header if header.count(h) > 1}
    if dupes:
        raise ParseError(1, sorted(dupes)[0], "duplicate column")
    where = {col: header.index(col) for col in STAGE_TABLE_COLUMNS if col in header}

    stages, seen = [], {}
    row_no = 0
    for cells in reader:
        lineno = reader.line_num
        if not any(c.strip() for c in cells):
            continue
        row_no += 1
        if len(cells) != len(header):
            raise ParseError(lineno, len(cells), f"expected {len(header)} cells, found {len(cells)}")
        values = {}
        for col, pos in where.items():
            raw = cells[pos].strip()
            try:
                values[col] = float(raw)
            except ValueError:
                raise ParseError(lineno, col, f"not a number: {raw!r}") from None
            if not math.isfinite(values[col]):
                raise ParseError(lineno, col, f"not a finite number: {raw!r}")
        index = values.pop("stage_index")
        if index != int(index):
            raise ValidationError(f"stage_index {index!r} is not an integer", row=row_no)
        index = int(index)
        if index in seen:
            raise ValidationError(f"stage_index {index} repeats row {seen[index]}", row=row_no)
        seen[index] = row_no
        stage = StageProfile(index=index, **values)
        try:
            stage.check()
        except NegativeFieldError as exc:
            raise ValidationError(f"{exc.field} must be {'> 0' if exc.field == 'turnover' else '>= 0'}, "
                                  f"got {exc.value!r}", row=row_no) from None
        stages.append(stage)
    if not stages:
        raise ValidationError("stage table has no data rows")
    return stages


def write_stage_table(line: ProductionLine, path) -> None:
    """Write ``line`` as a stage table that reloads to an identical line."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(STAGE_TABLE_COLUMNS)
    for st in line.stages:
        writer.writerow([st.index] + [repr(float(getattr(st, c))) for c in STAGE_TABLE_COLUMNS[1:]])
    Path(path).write_text(buf.getvalue(), encoding="utf-8")


@dataclass(frozen=True)
class SimSettings:
    config: SimConfig
    demand: DemandFamily | None = None
    position: int | None = None


@dataclass(frozen=True)
class FitSettings:
    families: tuple[Family, ...] | None = None
    cv_threshold: float = DEFAULT_CV_THRESHOLD


@dataclass(frozen=True)
class Scenario:
    frontier: int
    demand_rate: float
    demand_std: float = 0.0
    service_level: float = 0.95
    review_period: float = 1.0
    deadlines: tuple[float, ...] = ()
    volume: float = 1.0
    sim: SimSettings | None = None
    fit: FitSettings = field(default_factory=FitSettings)


def _number(doc, key, default=None, *, minimum=None, strict=False, integer=False):
    if key not in doc or doc[key] is None:
        if default is None:
            raise ValidationError(f"scenario is missing required key {key!r}")
        return default
    value = doc[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError(f"scenario key {key!r} must be a number, got {value!r}")
    if integer and value != int(value):
        raise ValidationError(f"scenario key {key!r} must be an integer, got {value!r}")
    if not math.isfinite(value):
        raise ValidationError(f"scenario key {key!r} must be finite")
    if minimum is not None and (value <= minimum if strict else value < minimum):
        raise ValidationError(f"scenario key {key!r} must be {'>' if strict else '>='} {minimum}, got {value!r}")
    return int(value) if integer else float(value)


def parse_scenario(text: str) -> Scenario:
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        line = mark.line + 1 if mark else 0
        column = mark.column + 1 if mark else 0
        raise ParseError(line, column, str(getattr(exc, "problem", exc))) from None
    if not isinstance(doc, dict):
        raise ValidationError("scenario must be a mapping of keys to values")

    if "deadlines" in doc and doc["deadlines"] is not None:
        raw = doc["deadlines"]
        if not isinstance(raw, list):
            raise ValidationError("'deadlines' must be a list")
        deadlines = tuple(_number({"deadline": d}, "deadline", minimum=0) for d in raw)
    elif "deadline" in doc:
        deadlines = (_number(doc, "deadline", minimum=0),)
    else:
        raise ValidationError("scenario needs 'deadline' or 'deadlines'")

    level = _number(doc, "service_level", 0.95)
    if not 0 < level < 1:
        raise ValidationError(f"service_level must lie in (0, 1), got {level}")

    sim = None
    if doc.get("sim") is not None:
        block = doc["sim"]
        if not isinstance(block, dict):
            raise ValidationError("'sim' must be a mapping")
        try:
            cfg = SimConfig(
                horizon=_number(block, "horizon", 2200, minimum=1, integer=True),
                warmup=_number(block, "warmup", 200, minimum=0, integer=True),
                seed=_number(block, "seed", 42, minimum=0, integer=True),
                replications=_number(block, "replications", 10, minimum=1, integer=True),
            )
        except CodpError as exc:
            raise ValidationError(f"sim: {exc}") from None
        demand = block.get("demand")
        try:
            demand = DemandFamily(str(demand).lower()) if demand is not None else None
        except ValueError:
            raise ValidationError(f"sim.demand must be one of {[f.value for f in DemandFamily]}") from None
        position = block.get("position")
        if position is not None:
            position = _number(block, "position", minimum=1, integer=True)
        sim = SimSettings(cfg, demand, position)

    fit = FitSettings()
    if doc.get("fit") is not None:
        block = doc["fit"]
        if not isinstance(block, dict):
            raise ValidationError("'fit' must be a mapping")
        families = block.get("families")
        if families is not None:
            try:
                families = tuple(Family(str(f).lower()) for f in families)
            except ValueError:
                raise ValidationError(f"fit.families must be drawn from {[f.value for f in Family]}") from None
        fit = FitSettings(families, _number(block, "cv_threshold", DEFAULT_CV_THRESHOLD, minimum=0, strict=True))

    return Scenario(
        frontier=_number(doc, "frontier", minimum=1, integer=True),
        demand_rate=_number(doc, "demand_rate", minimum=0),
        demand_std=_number(doc, "demand_std", 0.0, minimum=0),
        service_level=level,
        review_period=_number(doc, "review_period", 1.0, minimum=0),
        deadlines=deadlines,
        volume=_number(doc, "volume", 1.0, minimum=0, strict=True),
        sim=sim,
        fit=fit,
    )


def load(stage_table_path, scenario_path) -> tuple[ProductionLine, Scenario]:
    """Read both input files and build the validated line."""
    stages = read_stage_table(stage_table_path)
    path = Path(scenario_path)
    if not path.is_file():
        raise FileNotFoundError(f"scenario not found: {path}")
    scenario = parse_scenario(path.read_text(encoding="utf-8"))
    try:
        line = build_line(stages, scenario.frontier, scenario.demand_rate, scenario.demand_std)
    except CodpError as exc:
        raise ValidationError(str(exc)) from exc
    return line, scenario


def reference_paths() -> tuple[Path, Path]:
    """Paths of the bundled reference stage table and scenario."""
    root = resources.files("codp") / "data"
    return Path(str(root / "reference_stages.csv")), Path(str(root / "reference_scenario.yaml"))
