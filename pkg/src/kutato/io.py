"""Text formats: ``.bn`` networks, case CSV files and learning-trace TSV files.

A ``.bn`` file::

    # comment
    network chain
    var A f t
    var B f t
    parents B A
    cpt A : 0.7 0.3
    cpt B | A=f : 0.8 0.2
    cpt B | A=t : 0.1 0.9

Sections must come in the order vars, parents, cpts; lines inside a section
may come in any order.
"""

from __future__ import annotations

import csv
import io
from pathlib import Path

import numpy as np

from .learner import LearnTrace
from .model import (MISSING, BeliefNetwork, CaseDatabase, Cpt, NetworkError, Variable,
                    all_assignments, config_count, encode_config)

MISSING_LABEL = "?"
WEIGHT_COLUMN = "__weight"
TRACE_COLUMNS = ("step", "from", "to", "delta_h", "df", "statistic", "p_value", "entropy_after")


class FormatError(ValueError):
    def __init__(self, message: str, source: str | None = None, line: int | None = None):
        where = ""
        if source is not None:
            where = f"{source}:{line}: " if line is not None else f"{source}: "
        super().__init__(where + message)


# --- networks ---------------------------------------------------------------

_SECTIONS = {"var": 0, "parents": 1, "cpt": 2}


def parse_network(text: str, source: str = "<string>") -> BeliefNetwork:
    """Parse ``.bn`` text; CPT rows are validated then renormalised."""
    name = None
    variables: list[Variable] = []
    parents: dict[str, list[str]] = {}
    cpt_lines: list[tuple[int, str, dict[str, str], list[float]]] = []
    stage = 0

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        keyword, _, rest = line.partition(" ")
        rest = rest.strip()
        if keyword == "network":
            if name is not None or variables or parents or cpt_lines:
                raise FormatError("'network' must come once, before any section", source, lineno)
            name = rest or "unnamed"
            continue
        if keyword not in _SECTIONS:
            raise FormatError(f"unknown keyword {keyword!r}", source, lineno)
        if _SECTIONS[keyword] < stage:
            raise FormatError(f"'{keyword}' line after a later section", source, lineno)
        stage = _SECTIONS[keyword]
        fields = rest.split()
        try:
            if keyword == "var":
                if len(fields) < 2:
                    raise FormatError("var needs a name and at least one label", source, lineno)
                if any(v.name == fields[0] for v in variables):
                    raise FormatError(f"variable {fields[0]!r} declared twice", source, lineno)
                variables.append(Variable(fields[0], tuple(fields[1:])))
            elif keyword == "parents":
                if not fields:
                    raise FormatError("parents needs a child name", source, lineno)
                if fields[0] in parents:
                    raise FormatError(f"parents of {fields[0]!r} given twice", source, lineno)
                parents[fields[0]] = fields[1:]
            else:
                head, colon, probs = rest.partition(":")
                if not colon:
                    raise FormatError("cpt line needs ':' before the probabilities", source, lineno)
                child, bar, cond = head.partition("|")
                assignment = {}
                for item in cond.split() if bar else []:
                    pname, eq, label = item.partition("=")
                    if not eq:
                        raise FormatError(f"bad parent assignment {item!r}", source, lineno)
                    assignment[pname] = label
                try:
                    values = [float(p) for p in probs.split()]
                except ValueError:
                    raise FormatError("probabilities must be decimal literals", source, lineno) from None
                cpt_lines.append((lineno, child.strip(), assignment, values))
        except NetworkError as exc:
            raise FormatError(str(exc), source, lineno) from None

    if not variables:
        raise NetworkError(f"{source}: network declares no variables")
    index = {v.name: i for i, v in enumerate(variables)}
    for child, ps in parents.items():
        for n in [child, *ps]:
            if n not in index:
                raise FormatError(f"parents line names unknown variable {n!r}", source)
    pidx = [tuple(index[p] for p in parents.get(v.name, ())) for v in variables]

    rows: list[dict[int, list[float]]] = [{} for _ in variables]
    for lineno, child, assignment, values in cpt_lines:
        if child not in index:
            raise FormatError(f"cpt for unknown variable {child!r}", source, lineno)
        i = index[child]
        pvars = [variables[p] for p in pidx[i]]
        if set(assignment) != {v.name for v in pvars}:
            raise FormatError(f"cpt for {child!r} must condition on exactly its parents "
                              f"{[v.name for v in pvars]}", source, lineno)
        try:
            config = [v.index(assignment[v.name]) for v in pvars]
        except NetworkError as exc:
            raise FormatError(str(exc), source, lineno) from None
        if len(values) != variables[i].arity:
            raise FormatError(f"cpt row for {child!r} needs {variables[i].arity} probabilities",
                              source, lineno)
        code = encode_config(config, [v.arity for v in pvars])
        if code in rows[i]:
            raise FormatError(f"duplicate cpt row for {child!r}", source, lineno)
        rows[i][code] = values

    cpts = []
    for i, var in enumerate(variables):
        n_rows = config_count(variables[p].arity for p in pidx[i])
        if len(rows[i]) != n_rows:
            raise FormatError(f"cpt for {var.name!r} has {len(rows[i])} of {n_rows} rows", source)
        cpts.append(Cpt(np.array([rows[i][c] for c in range(n_rows)])))
    # invariant violations (cycles, bad rows) surface as NetworkError, not FormatError
    return BeliefNetwork(name or "unnamed", variables, pidx, cpts).checked()


def read_network(path: str | Path) -> BeliefNetwork:
    path = Path(path)
    return parse_network(path.read_text(), str(path))


def format_network(net: BeliefNetwork) -> str:
    out = [f"network {net.name}"]
    for v in net.variables:
        out.append(" ".join(["var", v.name, *v.values]))
    for i, v in enumerate(net.variables):
        if net.parents[i]:
            out.append(" ".join(["parents", v.name, *(net.variables[p].name for p in net.parents[i])]))
    for i, v in enumerate(net.variables):
        pvars = [net.variables[p] for p in net.parents[i]]
        for code, config in enumerate(all_assignments([p.arity for p in pvars])):
            cond = " ".join(f"{p.name}={p.values[c]}" for p, c in zip(pvars, config))
            probs = " ".join(repr(float(x)) for x in net.cpts[i].rows[code])
            out.append(f"cpt {v.name} | {cond} : {probs}" if cond else f"cpt {v.name} : {probs}")
    return "\n".join(out) + "\n"


def write_network(net: BeliefNetwork, path: str | Path) -> None:
    Path(path).write_text(format_network(net))


# --- cases ------------------------------------------------------------------

def parse_cases(text: str, network: BeliefNetwork | None = None,
                source: str = "<string>") -> CaseDatabase:
    """Read a case CSV.

    With ``network`` the columns are mapped onto its variables (and put in its
    canonical order); otherwise each column's vocabulary is its sorted set of
    observed labels, so the result does not depend on row order.
    """
    reader = csv.reader(io.StringIO(text))
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        raise FormatError("empty case file", source) from None
    has_weight = bool(header) and header[-1] == WEIGHT_COLUMN
    names = header[:-1] if has_weight else header
    if not names or any(not n for n in names):
        raise FormatError("header must name every column", source, 1)
    if len(set(names)) != len(names) or WEIGHT_COLUMN in names:
        raise FormatError("duplicate or misplaced column names", source, 1)

    cells: list[list[str]] = []
    weights: list[float] = []
    for lineno, row in enumerate(reader, 2):
        if not row or all(not c.strip() for c in row):
            continue
        row = [c.strip() for c in row]
        if len(row) != len(header):
            raise FormatError(f"expected {len(header)} cells, got {len(row)}", source, lineno)
        if has_weight:
            try:
                w = float(row[-1])
            except ValueError:
                raise FormatError(f"bad weight {row[-1]!r}", source, lineno) from None
            if not w >= 0 or w == float("inf"):
                raise FormatError(f"weight must be finite and nonnegative, got {row[-1]}", source, lineno)
            weights.append(w)
            row = row[:-1]
        cells.append(row)

    if network is not None:
        if set(names) != set(network.names):
            raise FormatError(f"columns {sorted(names)} do not match network variables "
                              f"{sorted(network.names)}", source, 1)
        variables = list(network.variables)
        columns = [names.index(v.name) for v in variables]
    else:
        variables = []
        for j, n in enumerate(names):
            labels = sorted({r[j] for r in cells} - {MISSING_LABEL})
            variables.append(Variable(n, tuple(labels) or (MISSING_LABEL,)))
        columns = list(range(len(names)))

    data = np.empty((len(cells), len(variables)), dtype=np.int64)
    lookup = [{label: k for k, label in enumerate(v.values)} for v in variables]
    for r, row in enumerate(cells):
        for j, col in enumerate(columns):
            label = row[col]
            if label == MISSING_LABEL:
                data[r, j] = MISSING
                continue
            try:
                data[r, j] = lookup[j][label]
            except KeyError:
                raise FormatError(f"unknown label {label!r} for {variables[j].name!r}",
                                  source, r + 2) from None
    return CaseDatabase(variables, data, weights if has_weight else None)


def read_cases(path: str | Path, network: BeliefNetwork | None = None) -> CaseDatabase:
    path = Path(path)
    return parse_cases(path.read_text(), network, str(path))


def format_cases(db: CaseDatabase) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    weighted = bool(np.any(db.weights != 1.0))
    writer.writerow(list(db.names) + ([WEIGHT_COLUMN] if weighted else []))
    for r in range(db.n_rows):
        row = [MISSING_LABEL if k == MISSING else v.values[k]
               for v, k in zip(db.variables, db.data[r])]
        if weighted:
            row.append(repr(float(db.weights[r])))
        writer.writerow(row)
    return buf.getvalue()


def write_cases(db: CaseDatabase, path: str | Path) -> None:
    Path(path).write_text(format_cases(db))


# --- traces -----------------------------------------------------------------

def format_trace(trace: LearnTrace) -> str:
    lines = ["\t".join(TRACE_COLUMNS)]
    for s in trace.steps:
        ev = s.evaluation
        lines.append("\t".join([
            str(s.step), trace.names[ev.src], trace.names[ev.dst],
            f"{ev.delta_h:.6f}", str(ev.df), f"{ev.statistic:.6f}", f"{ev.p_value:.6e}",
            f"{s.entropy_after:.6f}",
        ]))
    lines.append(f"# halt: {trace.halt_reason}")
    return "\n".join(lines) + "\n"


def write_trace(trace: LearnTrace, path: str | Path) -> None:
    Path(path).write_text(format_trace(trace))


def parse_trace(text: str) -> tuple[list[dict[str, str]], str]:
    """Rows of a trace file as dicts, plus the halt reason."""
    rows, halt = [], ""
    lines = text.splitlines()
    header = lines[0].split("\t")
    for line in lines[1:]:
        if line.startswith("# halt:"):
            halt = line.split(":", 1)[1].strip()
        elif line and not line.startswith("#"):
            rows.append(dict(zip(header, line.split("\t"))))
    return rows, halt


def parse_order(text: str, base: Path | None = None) -> list[str]:
    """``a,b,c`` or ``@file`` (names separated by whitespace or commas)."""
    if text.startswith("@"):
        path = Path(text[1:])
        if base is not None and not path.is_absolute():
            path = base / path
        text = path.read_text()
    return [tok for tok in text.replace(",", " ").split() if tok]

