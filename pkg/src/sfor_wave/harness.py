"""Refinement sweeps: reference runs, max-in-time errors, observed orders, tables."""

import csv
import io
import math
import re
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from . import space1d
from .errors import NumericalError, ValidationError
from .mesh import build_graded_mesh, optimal_grading
from .sfor import Formula, ProblemSpec, Scheme, run


class Example(str, Enum):
    EX1 = "EX1"  # a0 = a1 = hat, f = sin x
    EX2 = "EX2"  # a0 = hat, a1 = indicator of (0, L/2], f = sin x


class ErrorNorm(str, Enum):
    H1_FULL = "H1_FULL"
    H1_SEMI = "H1_SEMI"
    L2 = "L2"


def example_data(example, L=math.pi):
    example = Example(str(getattr(example, "value", example)).upper())
    if example is Example.EX1:
        return space1d.hat(L), space1d.hat(L), space1d.sine(1, L)
    return space1d.hat(L), space1d.indicator_left_half(L), space1d.sine(1, L)


_NORMS = {
    ErrorNorm.H1_FULL: space1d.h1_norm,
    ErrorNorm.H1_SEMI: space1d.h1_seminorm,
    ErrorNorm.L2: space1d.l2_norm,
}

_EXPLICIT = re.compile(r"^EXPLICIT\(\s*([^)]+?)\s*\)$")


def _enum(cls, value, key):
    try:
        return cls(str(getattr(value, "value", value)).strip().upper())
    except ValueError:
        choices = ", ".join(m.value for m in cls)
        raise ValidationError(f"{key}: expected one of {choices}, got {value!r}") from None


def _parse_r_mode(value):
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return f"EXPLICIT({float(value)!r})"
    s = str(value).strip().upper()
    if s in ("UNIFORM", "OPTIMAL"):
        return s
    m = _EXPLICIT.match(s)
    if m:
        try:
            r = float(m.group(1))
        except ValueError:
            raise ValidationError(f"r_mode: bad grading exponent {m.group(1)!r}") from None
        if not r >= 1:
            raise ValidationError(f"r_mode: grading exponent must be >= 1, got {r}")
        return f"EXPLICIT({r!r})"
    raise ValidationError(f"r_mode: expected UNIFORM, OPTIMAL or EXPLICIT(r), got {value!r}")


@dataclass(frozen=True)
class ExperimentConfig:
    example: Example
    alpha: float
    scheme: Scheme
    formula: Formula
    r_mode: str
    N_list: tuple
    N_ref: int
    M_elems: int = 100
    error_norm: ErrorNorm = ErrorNorm.H1_FULL

    def __post_init__(self):
        object.__setattr__(self, "example", _enum(Example, self.example, "example"))
        object.__setattr__(self, "scheme", _enum(Scheme, self.scheme, "scheme"))
        object.__setattr__(self, "formula", _enum(Formula, self.formula, "formula"))
        object.__setattr__(self, "error_norm", _enum(ErrorNorm, self.error_norm, "error_norm"))
        object.__setattr__(self, "r_mode", _parse_r_mode(self.r_mode))
        if not 1 < float(self.alpha) < 2:
            raise ValidationError(f"alpha must lie in (1, 2), got {self.alpha}")
        object.__setattr__(self, "alpha", float(self.alpha))
        Ns = tuple(int(n) for n in self.N_list)
        if not Ns:
            raise ValidationError("N_list must not be empty")
        if min(Ns) < 2:
            raise ValidationError("all N values must be >= 2")
        if list(Ns) != sorted(set(Ns)):
            raise ValidationError("N_list must be strictly increasing")
        object.__setattr__(self, "N_list", Ns)
        if not int(self.N_ref) > max(Ns):
            raise ValidationError(f"N_ref={self.N_ref} must exceed max(N_list)={max(Ns)}")
        object.__setattr__(self, "N_ref", int(self.N_ref))
        if int(self.M_elems) < 2:
            raise ValidationError("M_elems must be >= 2")
        object.__setattr__(self, "M_elems", int(self.M_elems))

    @property
    def r(self):
        """Grading exponent resolved from ``r_mode``."""
        if self.r_mode == "UNIFORM":
            return 1.0
        if self.r_mode == "OPTIMAL":
            return optimal_grading(self.formula, self.scheme, self.alpha)
        return float(_EXPLICIT.match(self.r_mode).group(1))

    @property
    def optimal_order(self):
        """Convergence order expected on the optimal mesh: 2 - beta for L1, 2 for Alikhanov."""
        return 2.0 if self.formula is Formula.ALIKHANOV else 2.0 - self.alpha / 2.0


_FIELDS = ("example", "alpha", "scheme", "formula", "r_mode", "N_list", "N_ref", "M_elems", "error_norm")
_REQUIRED = ("example", "alpha", "scheme", "formula", "r_mode", "N_list", "N_ref")


def parse_config(text):
    """Parse ``key=value`` lines (``#`` starts a comment) into an :class:`ExperimentConfig`."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValidationError(f"line {lineno}: expected key=value, got {raw.strip()!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in _FIELDS:
            raise ValidationError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ValidationError(f"line {lineno}: duplicate key {key!r}")
        values[key] = value
    missing = [k for k in _REQUIRED if k not in values]
    if missing:
        raise ValidationError(f"missing keys: {', '.join(missing)}")
    try:
        values["alpha"] = float(values["alpha"])
        values["N_list"] = tuple(int(s) for s in re.split(r"[,\s]+", values["N_list"]) if s)
        values["N_ref"] = int(values["N_ref"])
        if "M_elems" in values:
            values["M_elems"] = int(values["M_elems"])
    except ValueError as exc:
        raise ValidationError(f"bad numeric value: {exc}") from None
    return ExperimentConfig(**values)


def load_config(path):
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


def format_config(cfg):
    lines = [
        f"example={cfg.example.value}",
        f"alpha={cfg.alpha!r}",
        f"scheme={cfg.scheme.value}",
        f"formula={cfg.formula.value}",
        f"r_mode={cfg.r_mode}",
        "N_list=" + ",".join(str(n) for n in cfg.N_list),
        f"N_ref={cfg.N_ref}",
        f"M_elems={cfg.M_elems}",
        f"error_norm={cfg.error_norm.value}",
    ]
    return "\n".join(lines) + "\n"


# ------------------------------------------------------------------ errors


def compute_error(traj, ref_traj, mesh, ref_mesh, disc, norm=ErrorNorm.H1_FULL):
    """max_{1<=n<=N} ||U^n - U_ref(t_n)|| with the reference read at the matching level.

    Coarse t_k must coincide with reference t_{k N_ref / N}; anything else is
    rejected rather than interpolated.
    """
    norm_fn = _NORMS[_enum(ErrorNorm, norm, "error_norm")]
    N, Nr = mesh.N, ref_mesh.N
    if Nr % N:
        raise ValidationError(f"N={N} does not divide N_ref={Nr}")
    stride = Nr // N
    idx = np.arange(N + 1) * stride
    if not np.allclose(ref_mesh.points[idx], mesh.points, rtol=1e-12, atol=0.0):
        raise ValidationError("coarse time levels do not coincide with reference levels")
    if traj.U.shape[1] != disc.dim or ref_traj.U.shape[1] != disc.dim:
        raise ValidationError("trajectory length does not match the spatial grid")
    diff = traj.U[1:] - ref_traj.U[idx[1:]]
    return max(norm_fn(disc, d) for d in diff)


def observed_order(e_coarse, e_fine):
    """log2(e(N/2) / e(N))."""
    if e_coarse > 0 and e_fine > 0:
        return math.log2(e_coarse) - math.log2(e_fine)
    return None


# ------------------------------------------------------------------ tables


@dataclass(frozen=True)
class TableRow:
    N: int
    error: float
    order: float = None


@dataclass(frozen=True)
class ConvergenceTable:
    rows: tuple
    config: ExperimentConfig = field(default=None, compare=False)
    label: str = field(default="", compare=False)

    @property
    def errors(self):
        return [row.error for row in self.rows]

    @property
    def orders(self):
        return [row.order for row in self.rows]

    @property
    def final_order(self):
        return self.rows[-1].order


def build_table(Ns, errors, config=None, label=""):
    rows = []
    for i, (N, e) in enumerate(zip(Ns, errors)):
        order = observed_order(errors[i - 1], e) if i else None
        rows.append(TableRow(int(N), float(e), order))
    return ConvergenceTable(tuple(rows), config, label)


def problem_for(cfg, L=math.pi, T=1.0):
    a0, a1, f = example_data(cfg.example, L)
    return ProblemSpec(cfg.alpha, a0, a1, f, cfg.scheme, cfg.formula, L=L, T=T)


def run_sweep(cfg, label="", L=math.pi, T=1.0):
    """Reference run at N_ref, then one run per N with errors and orders."""
    spec = problem_for(cfg, L, T)
    disc = space1d.build_fem(L, cfg.M_elems)
    r = cfg.r
    ref_mesh = build_graded_mesh(T, cfg.N_ref, r)
    ref = run(spec, ref_mesh, disc)
    errors = []
    for N in cfg.N_list:
        mesh = build_graded_mesh(T, N, r)
        try:
            traj = run(spec, mesh, disc)
        except NumericalError as exc:
            raise NumericalError(f"sweep failed at N={N}: {exc}") from exc
        errors.append(compute_error(traj, ref, mesh, ref_mesh, disc, cfg.error_norm))
    return build_table(cfg.N_list, errors, cfg, label)


# ------------------------------------------------------------------ output


def fmt_error(e):
    """4 significant digits in e-notation, two-digit exponent."""
    return f"{e:.3e}"


def fmt_order(o):
    """4 significant digits, trailing zeros kept."""
    return "" if o is None else f"{o:#.4g}"


def emit_csv(table):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["N", "error", "order"])
    for row in table.rows:
        w.writerow([row.N, fmt_error(row.error), fmt_order(row.order)])
    return buf.getvalue()


def parse_csv(text):
    rows = []
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header != ["N", "error", "order"]:
        raise ValidationError(f"unexpected CSV header {header!r}")
    for rec in reader:
        if not rec:
            continue
        if len(rec) != 3:
            raise ValidationError(f"bad CSV row {rec!r}")
        rows.append(TableRow(int(rec[0]), float(rec[1]), float(rec[2]) if rec[2] else None))
    return ConvergenceTable(tuple(rows))


def rounded(table):
    """Copy of ``table`` with values rounded exactly as the text output shows them."""
    rows = tuple(
        TableRow(r.N, float(fmt_error(r.error)), None if r.order is None else float(fmt_order(r.order)))
        for r in table.rows
    )
    return replace(table, rows=rows)


def _label(table):
    if table.label:
        return table.label
    cfg = table.config
    if cfg is None:
        return "error"
    return f"r={cfg.r:.4g}"


def emit_markdown(tables, title=None):
    """Side-by-side error/order columns for one or more sweeps sharing N_list."""
    if isinstance(tables, ConvergenceTable):
        tables = [tables]
    if not tables:
        raise ValidationError("nothing to emit")
    Ns = [row.N for row in tables[0].rows]
    if any([row.N for row in t.rows] != Ns for t in tables):
        raise ValidationError("tables must share the same N values")
    norm = tables[0].config.error_norm.value if tables[0].config else "error"
    lines = []
    if title:
        lines += [f"**{title}**", ""]
    head = ["N"]
    for t in tables:
        head += [f"{_label(t)} e_{norm}(N)", "Order"]
    lines.append("| " + " | ".join(head) + " |")
    lines.append("|" + "---|" * len(head))
    for i, N in enumerate(Ns):
        cells = [str(N)]
        for t in tables:
            row = t.rows[i]
            cells += [fmt_error(row.error), fmt_order(row.order) or "-"]
        lines.append("| " + " | ".join(cells) + " |")
    cfgs = [t.config for t in tables if t.config is not None]
    if cfgs:
        opt = [c.optimal_order for c in cfgs]
        if len(set(opt)) == 1:
            cells = ["Optimal order", f"{opt[0]:.4g}"] + [""] * (len(head) - 2)
        else:
            cells = ["Optimal order"]
            for o in opt:
                cells += [f"{o:.4g}", ""]
        lines.append("| " + " | ".join(cells) + " |")
    return "\n".join(lines) + "\n"


# ------------------------------------------------------------------ named tables

L1_N = (20, 40, 80, 160, 320)
L1_N_REF = 2560
ALIKHANOV_N = (8, 16, 32, 64)
ALIKHANOV_N_REF = 128


@dataclass(frozen=True)
class TableSpec:
    number: int
    title: str
    columns: tuple  # (label, ExperimentConfig)


def _cfg(example, alpha, scheme, formula, r_mode, norm):
    if formula == "ALIKHANOV":
        Ns, Nref = ALIKHANOV_N, ALIKHANOV_N_REF
    else:
        Ns, Nref = L1_N, L1_N_REF
    return ExperimentConfig(example, alpha, scheme, formula, r_mode, Ns, Nref, 100, norm)


def _r_columns(example, alpha, third, norm):
    return tuple(
        (label, _cfg(example, alpha, "V_FORM", "L1", mode, norm))
        for label, mode in (("r=1", "UNIFORM"), ("r_opt", "OPTIMAL"), (f"r={third:.4g}", third))
    )


def _alpha_columns(example, scheme, formula, norm):
    return tuple(
        (f"alpha={a}", _cfg(example, a, scheme, formula, "OPTIMAL", norm)) for a in (1.25, 1.5, 1.75)
    )


TABLES = {
    1: TableSpec(1, "L1, v-system, example 1, alpha=1.25", _r_columns("EX1", 1.25, (4 - 1.25) / 1.25, "H1_SEMI")),
    2: TableSpec(2, "L1, v-system, example 1, alpha=1.75", _r_columns("EX1", 1.75, 2.0, "H1_SEMI")),
    3: TableSpec(3, "L1, z-system, example 1, optimal r", _alpha_columns("EX1", "Z_FORM", "L1", "H1_SEMI")),
    4: TableSpec(4, "Alikhanov, z-system, example 1, optimal r", _alpha_columns("EX1", "Z_FORM", "ALIKHANOV", "H1_SEMI")),
    5: TableSpec(5, "L1, v-system, example 2, alpha=1.25", _r_columns("EX2", 1.25, (4 - 1.25) / 1.25, "L2")),
    6: TableSpec(6, "L1, v-system, example 2, alpha=1.75", _r_columns("EX2", 1.75, 2.0, "L2")),
    7: TableSpec(7, "L1, z-system, example 2, optimal r", _alpha_columns("EX2", "Z_FORM", "L1", "L2")),
}


def table_spec(number):
    try:
        return TABLES[int(number)]
    except (KeyError, ValueError):
        raise ValidationError(f"no table {number!r}; choose 1..{len(TABLES)}") from None


def run_table(number):
    """Run every column of a named table; returns the list of ConvergenceTables."""
    spec = table_spec(number)
    return [run_sweep(cfg, label) for label, cfg in spec.columns]
