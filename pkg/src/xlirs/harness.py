"""Scenario files, model dispatch, parameter sweeps and CSV output."""

import ast
import csv
import io
import math
import operator
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

from . import models
from .channel import Scenario, SnrEstimate, from_db, snr_exact_sum, worker_count
from .errors import ConfigError, PreconditionError, ValidationError, XlirsError
from .geometry import IrsGeometry, NodePosition, nearest_odd

REQUIRED_KEYS = (
    "wavelength_m",
    "spacing_over_wavelength",
    "element_area_over_d2",
    "my",
    "mz",
    "tx.r_m",
    "tx.theta_rad",
    "tx.phi_rad",
    "rx.r_m",
    "rx.theta_rad",
    "rx.phi_rad",
    "pbar_db",
)
OPTIONAL_KEYS = ("upw.beta0_squared", "upw.reference", "sweep.var", "sweep.grid", "sweep.models")

MODEL_TAGS = (
    "exact-sum",
    "integral",
    "bounds",
    "boresight",
    "asymptotic",
    "ula-integral",
    "ula-closed",
    "ula-asymptotic",
    "upw",
)

# sweep variable aliases -> canonical names
SWEEP_VARS = {
    "L": "surface_size_L",
    "surface_size_L": "surface_size_L",
    "Lz": "ula_length_Lz",
    "ula_length_Lz": "ula_length_Lz",
    "rq": "tx_range_rq",
    "tx_range_rq": "tx_range_rq",
}

SIGNIFICANT_DIGITS = 10


# -- scenario files -----------------------------------------------------------

_BINOPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.Pow: operator.pow,
}


def _eval_number(text):
    """Evaluate a numeric literal or simple arithmetic in ``pi`` (e.g. ``3*pi/4``)."""

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        raise ValueError("unsupported expression")

    return ev(ast.parse(text.strip(), mode="eval"))


@dataclass(frozen=True)
class ScenarioConfig:
    scenario: Scenario
    upw: models.UpwConfig
    raw: dict = field(default_factory=dict)

    @property
    def sweep_var(self):
        return self.raw.get("sweep.var")

    @property
    def sweep_grid(self):
        return self.raw.get("sweep.grid")

    @property
    def sweep_models(self):
        return self.raw.get("sweep.models")


def parse_config_text(text):
    """Parse ``key = value`` lines into a flat dict; ``[section]`` prefixes keys."""
    values = {}
    lines = {}
    section = ""
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            if section and not section.replace("_", "").isalnum():
                raise ConfigError(f"bad section name {section!r}", line=lineno)
            continue
        if "=" not in line:
            raise ConfigError("expected 'key = value'", line=lineno)
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigError("empty key", line=lineno)
        if section and section not in ("geometry", "power"):
            key = f"{section}.{key}"
        if key not in REQUIRED_KEYS and key not in OPTIONAL_KEYS:
            raise ConfigError("unknown key", line=lineno, key=key)
        if key in values:
            raise ConfigError("duplicate key", line=lineno, key=key)
        values[key] = value
        lines[key] = lineno
    return values, lines


def config_from_text(text):
    values, lines = parse_config_text(text)
    missing = [k for k in REQUIRED_KEYS if k not in values]
    if missing:
        raise ConfigError(f"missing required keys: {', '.join(missing)}")

    nums = {}
    for key in REQUIRED_KEYS + ("upw.beta0_squared",):
        if key not in values:
            continue
        try:
            nums[key] = _eval_number(values[key])
        except (ValueError, SyntaxError, ZeroDivisionError, OverflowError):
            raise ConfigError(f"not a number: {values[key]!r}", line=lines[key], key=key) from None

    wavelength = nums["wavelength_m"]
    d = nums["spacing_over_wavelength"] * wavelength
    geom = IrsGeometry(
        _as_int(nums["my"], "my", lines),
        _as_int(nums["mz"], "mz", lines),
        d,
        nums["element_area_over_d2"] * d * d,
        wavelength,
    )
    tx = NodePosition(nums["tx.r_m"], nums["tx.theta_rad"], nums["tx.phi_rad"])
    rx = NodePosition(nums["rx.r_m"], nums["rx.theta_rad"], nums["rx.phi_rad"])
    scenario = Scenario(geom, tx, rx, from_db(nums["pbar_db"]))

    if "upw.beta0_squared" in nums:
        upw = models.UpwConfig(nums["upw.beta0_squared"])
    else:
        ref = values.get("upw.reference", "matched").strip()
        if ref == "matched":
            upw = models.UpwConfig.matched(scenario)
        elif ref == "free-space":
            upw = models.UpwConfig.free_space(wavelength)
        else:
            raise ConfigError(
                "expected 'matched' or 'free-space'", line=lines["upw.reference"], key="upw.reference"
            )
    return ScenarioConfig(scenario, upw, values)


def _as_int(x, key, lines):
    if x != int(x):
        raise ConfigError(f"expected an integer, got {x!r}", line=lines[key], key=key)
    return int(x)


def load_config(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise OSError(f"{path}: {exc.strerror or exc}") from exc
    return config_from_text(text)


# -- model dispatch -----------------------------------------------------------


@dataclass(frozen=True)
class ModelOutcome:
    tag: str
    estimates: tuple = ()
    skipped: str = None

    @property
    def ok(self):
        return self.skipped is None


def _estimates(tag, scenario, upw, threads):
    if tag == "exact-sum":
        return (snr_exact_sum(scenario, threads),)
    if tag == "integral":
        return (models.snr_integral_upa(scenario),)
    if tag == "bounds":
        b = models.snr_bounds_general(scenario)
        return (b.lower, b.upper)
    if tag == "boresight":
        b = models.snr_boresight(scenario)
        if isinstance(b, SnrEstimate):
            return (b, b)
        return (b.lower, b.upper)
    if tag == "asymptotic":
        return (models.snr_asymptotic_upa(scenario),)
    if tag == "ula-integral":
        return (models.snr_ula_integral(scenario),)
    if tag == "ula-closed":
        return (models.snr_ula_closed(scenario),)
    if tag == "ula-asymptotic":
        return (models.snr_ula_asymptotic(scenario),)
    if tag == "upw":
        return (models.snr_upw(scenario, upw),)
    raise ValidationError(f"unknown model tag {tag!r}; choose from {', '.join(MODEL_TAGS)}")


def column_names(tag, linear=False):
    suffix = "linear" if linear else "db"
    if tag in ("bounds", "boresight"):
        return (f"{tag}_lower_{suffix}", f"{tag}_upper_{suffix}")
    return (f"{tag}_{suffix}",)


def check_models(tags):
    tags = list(tags)
    if not tags:
        raise ValidationError("model list must not be empty")
    for t in tags:
        if t not in MODEL_TAGS:
            raise ValidationError(f"unknown model tag {t!r}; choose from {', '.join(MODEL_TAGS)}")
    return tags


def evaluate_models(scenario, tags, upw=None, threads=None):
    """Evaluate each model; inapplicable ones come back skipped with the reason."""
    upw = models.UpwConfig.matched(scenario) if upw is None else upw
    out = []
    for tag in check_models(tags):
        try:
            out.append(ModelOutcome(tag, _estimates(tag, scenario, upw, threads)))
        except PreconditionError as exc:
            out.append(ModelOutcome(tag, skipped=str(exc)))
    return out


@dataclass(frozen=True)
class Report:
    scenario: Scenario
    outcomes: tuple

    def format(self, linear=False):
        geom = self.scenario.geom
        lines = [
            f"geometry: {geom.m_y} x {geom.m_z} elements (L_y = {geom.length_y:.6g} m, "
            f"L_z = {geom.length_z:.6g} m), d = {geom.spacing_d:.6g} m, xi = {geom.occupation_ratio:.6g}",
            f"distance ratio rho = {self.scenario.distance_ratio:.6g}",
        ]
        for oc in self.outcomes:
            if not oc.ok:
                lines.append(f"{oc.tag:16s} skipped: {oc.skipped}")
                continue
            for name, est in zip(column_names(oc.tag, linear), oc.estimates):
                shown = est.value if linear else est.db
                unit = "" if linear else " dB"
                lines.append(f"{name:22s} {shown:.{SIGNIFICANT_DIGITS}g}{unit}")
                for note in est.diagnostics:
                    lines.append(f"{'':22s} note: {note}")
        return "\n".join(lines)


def run_scenario(config_path, tags=MODEL_TAGS, threads=None):
    cfg = load_config(config_path)
    return Report(cfg.scenario, tuple(evaluate_models(cfg.scenario, tags, cfg.upw, threads)))


# -- sweeps -------------------------------------------------------------------


@dataclass(frozen=True)
class SweepSpec:
    base: Scenario
    variable: str
    grid: tuple
    models: tuple
    upw: models.UpwConfig = None
    linear: bool = False

    def __post_init__(self):
        if self.variable not in SWEEP_VARS:
            raise ValidationError(f"unknown sweep variable {self.variable!r}")
        object.__setattr__(self, "variable", SWEEP_VARS[self.variable])
        grid = tuple(float(v) for v in self.grid)
        if not grid:
            raise ValidationError("sweep grid must not be empty")
        if any(not (math.isfinite(v) and v > 0) for v in grid):
            raise ValidationError("sweep grid values must be positive")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValidationError("sweep grid must be strictly increasing")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "models", tuple(check_models(self.models)))


@dataclass(frozen=True)
class SweepTable:
    variable: str
    columns: tuple
    rows: tuple  # (sweep value, tuple of cells (float or None), diagnostics string)


def scenario_at(base, variable, value):
    """The base scenario with one sweep variable set; returns (scenario, realized value, notes)."""
    geom = base.geom
    if variable == "surface_size_L":
        m = nearest_odd(value / geom.spacing_d)
        new = replace(geom, m_y=m, m_z=m)
        return base.with_geometry(new), new.length_z, [f"M={m}x{m}", f"requested={value:.10g}"]
    if variable == "ula_length_Lz":
        m = nearest_odd(value / geom.spacing_d)
        new = replace(geom, m_z=m)
        return base.with_geometry(new), new.length_z, [f"M={new.m_y}x{m}", f"requested={value:.10g}"]
    if variable == "tx_range_rq":
        tx = replace(base.tx, range_r=value)
        return Scenario(geom, tx, base.rx, base.transmit_snr_pbar), value, [f"M={geom.m_y}x{geom.m_z}"]
    raise ValidationError(f"unknown sweep variable {variable!r}")


def _sweep_row(spec, value, inner_threads):
    scenario, realized, notes = scenario_at(spec.base, spec.variable, value)
    upw = spec.upw if spec.upw is not None else models.UpwConfig.matched(scenario)
    cells = []
    for tag in spec.models:
        width = len(column_names(tag))
        try:
            ests = _estimates(tag, scenario, upw, inner_threads)
        except XlirsError as exc:
            cells.extend([None] * width)
            notes.append(f"{tag}: {exc}")
            continue
        for est in ests:
            cells.append(est.value if spec.linear else est.db)
        for est in ests[:1]:
            notes.extend(f"{tag}: {n}" for n in est.diagnostics)
    return realized, tuple(cells), "; ".join(notes)


def run_sweep(spec, threads=None):
    """Evaluate every grid point; row order always follows the grid."""
    workers = min(worker_count(threads), len(spec.grid))
    if workers <= 1:
        rows = [_sweep_row(spec, v, 1) for v in spec.grid]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda v: _sweep_row(spec, v, 1), spec.grid))
    columns = tuple(c for tag in spec.models for c in column_names(tag, spec.linear))
    return SweepTable(spec.variable, columns, tuple(rows))


def parse_grid(text):
    """``start:stop:steps[:lin|log]`` or a comma-separated list of values."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) not in (3, 4):
            raise ValidationError(f"grid must be start:stop:steps[:lin|log], got {text!r}")
        try:
            start, stop = _eval_number(parts[0]), _eval_number(parts[1])
            steps = int(parts[2])
        except (ValueError, SyntaxError):
            raise ValidationError(f"bad grid {text!r}") from None
        mode = parts[3].strip() if len(parts) == 4 else "lin"
        if steps < 1:
            raise ValidationError("grid needs at least one step")
        if steps == 1:
            return (start,)
        if mode == "lin":
            return tuple(start + (stop - start) * i / (steps - 1) for i in range(steps))
        if mode == "log":
            if start <= 0 or stop <= 0:
                raise ValidationError("log grid needs positive endpoints")
            ratio = math.log(stop / start)
            return tuple(start * math.exp(ratio * i / (steps - 1)) for i in range(steps))
        raise ValidationError(f"grid spacing must be 'lin' or 'log', got {mode!r}")
    try:
        return tuple(_eval_number(v) for v in text.split(",") if v.strip())
    except (ValueError, SyntaxError):
        raise ValidationError(f"bad grid {text!r}") from None


# -- CSV ----------------------------------------------------------------------


def _fmt(x):
    return "" if x is None else f"{x:.{SIGNIFICANT_DIGITS}g}"


def table_to_csv(table):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("sweep_var",) + table.columns + ("diagnostics",))
    for value, cells, diag in table.rows:
        w.writerow([_fmt(value)] + [_fmt(c) for c in cells] + [diag])
    return buf.getvalue()


def write_csv(table, path):
    data = table_to_csv(table).encode("utf-8")
    try:
        with open(path, "wb") as fh:
            fh.write(data)
    except OSError as exc:
        raise OSError(f"{path}: {exc.strerror or exc}") from exc


def read_csv(path):
    """Parse a sweep CSV back into (header, rows of floats/None, diagnostics)."""
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    parsed = []
    for row in body:
        nums = [float(v) if v else None for v in row[:-1]]
        parsed.append((nums, row[-1]))
    return header, parsed
