"""Problem files: YAML documents describing a shift tuple, a schedule and a check.

``parse_spec`` validates the whole document and keeps a normalised copy in
which every expression is re-printed canonically, so
``parse_spec(serialize(spec)) == spec``.  Diagnostics carry the line and
column of the offending YAML node or DSL token.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import yaml

from . import dsl
from .criteria import (
    Schedule,
    ScheduleNotFound,
    ShiftTuple,
    Windows,
    check_dhc,
    check_dsc,
    search_schedule,
    verify_criterion_pointwise,
)
from .errors import ParseError, PseudoShiftError, ValidationError
from .index_core import FiniteTable, Grid, Integers, Naturals, ShiftMap, TreeVertices
from .ows import DiagonalWeightFamily, OwsOperator, OwsProblem, check_ows_dsc, check_ows_powers_dsc
from .shift_ops import PseudoShift
from .spaces import path_tree, weighted_lp, zk_hilbert

SPEC_VERSION = 1
INDEX_KINDS = ("integers", "naturals", "grid", "tree", "table")
CHECK_KINDS = ("hyper", "super", "ows", "ows-powers", "criterion")
INDEX_VARIABLES = {"integers": ("i",), "naturals": ("i",), "grid": ("i", "j"), "tree": ("v",),
                   "table": ("x",)}
OWS_VARIABLES = ("k", "n")
TOP_KEYS = ("version", "name", "index", "constants", "sets", "space", "shifts", "powers", "ows",
            "schedule", "check")


# ----------------------------------------------------------------- YAML input


class _Source:
    """The composed YAML tree, used to find the position of any value."""

    def __init__(self, text: str):
        try:
            node = yaml.compose(text, Loader=yaml.SafeLoader)
        except yaml.MarkedYAMLError as exc:
            mark = exc.problem_mark or exc.context_mark
            line = mark.line + 1 if mark else None
            col = mark.column + 1 if mark else None
            raise ParseError(f"invalid YAML: {exc.problem}", line, col) from None
        if node is None:
            raise ParseError("empty problem file", 1, 1)
        loader = yaml.SafeLoader("")
        self.data = loader.construct_document(node)
        self.marks = {}
        self._walk(node, ())

    def _walk(self, node, path):
        quoted = isinstance(node, yaml.ScalarNode) and node.style in ("'", '"')
        self.marks[path] = (node.start_mark.line + 1, node.start_mark.column + 1, quoted)
        if isinstance(node, yaml.MappingNode):
            for key, value in node.value:
                self._walk(value, path + (key.value,))
        elif isinstance(node, yaml.SequenceNode):
            for n, value in enumerate(node.value):
                self._walk(value, path + (n,))

    def where(self, path):
        while path and path not in self.marks:
            path = path[:-1]
        return self.marks.get(path, (None, None, False))


class _Ctx:
    def __init__(self, source: _Source | None):
        self.source = source

    def fail(self, path, message):
        exc = ValidationError(".".join(str(p) for p in path) or "<root>", message)
        if self.source is not None:
            line, col, _ = self.source.where(path)
            exc.details.update(line=line, col=col)
        raise exc

    def dsl(self, path, parse, text):
        """Parse a DSL string, shifting token columns to file positions."""
        if not isinstance(text, (str, int, float)) or isinstance(text, bool):
            self.fail(path, "expected an expression string")
        try:
            return parse(str(text))
        except ParseError as exc:
            line, col = None, exc.col
            if self.source is not None:
                line, base, quoted = self.source.where(path)
                if base is not None and exc.col is not None:
                    col = base + exc.col - 1 + (1 if quoted else 0)
            raise type(exc)(exc.message, line, col) from None


def _mapping(ctx, path, value, allowed, required=()):
    if not isinstance(value, dict):
        ctx.fail(path, "expected a mapping")
    for key in value:
        if key not in allowed:
            ctx.fail(path + (key,), f"unknown key {key!r}; allowed: {', '.join(allowed)}")
    for key in required:
        if key not in value:
            ctx.fail(path, f"missing key {key!r}")
    return value


def _int(ctx, path, value, minimum=None):
    if not isinstance(value, int) or isinstance(value, bool):
        ctx.fail(path, "expected an integer")
    if minimum is not None and value < minimum:
        ctx.fail(path, f"must be >= {minimum}")
    return value


# --------------------------------------------------------------- normalising


def _norm_rules(ctx, path, value):
    if isinstance(value, (str, int, float)) and not isinstance(value, bool):
        value = [{"default": value}]
    if not isinstance(value, list) or not value:
        ctx.fail(path, "expected a list of weight rules")
    out = []
    for n, rule in enumerate(value):
        p = path + (n,)
        _mapping(ctx, p, rule, ("when", "value", "default"))
        if "default" in rule:
            if set(rule) != {"default"}:
                ctx.fail(p, "a default rule has only the 'default' key")
            if n != len(value) - 1:
                ctx.fail(p, "the default rule must come last")
            out.append({"default": dsl.to_text(ctx.dsl(p + ("default",), dsl.parse_expr, rule["default"]))})
        else:
            if set(rule) != {"when", "value"}:
                ctx.fail(p, "a rule needs 'when' and 'value'")
            when = ctx.dsl(p + ("when",), dsl.parse_predicate, rule["when"])
            val = ctx.dsl(p + ("value",), dsl.parse_expr, rule["value"])
            out.append({"when": dsl.to_text(when), "value": dsl.to_text(val)})
    if "default" not in out[-1]:
        ctx.fail(path, "the last weight rule must be a default")
    return out


def _norm_map(ctx, path, value, index_kind):
    _mapping(ctx, path, value, ("kind", "step", "power", "images"), ("kind",))
    kind = value["kind"]
    if kind == "translation":
        if index_kind not in ("integers", "naturals"):
            ctx.fail(path + ("kind",), "translation needs integers or naturals")
        step = _int(ctx, path + ("step",), value.get("step", 1))
        if index_kind == "naturals" and step < 0:
            ctx.fail(path + ("step",), "a translation of the naturals needs step >= 0")
        return {"kind": kind, "step": step}
    if kind == "grid-translation":
        if index_kind != "grid":
            ctx.fail(path + ("kind",), "grid-translation needs a grid index")
        return {"kind": kind, "step": _int(ctx, path + ("step",), value.get("step", -1))}
    if kind == "parent":
        if index_kind != "tree":
            ctx.fail(path + ("kind",), "parent maps need a tree index")
        return {"kind": kind, "power": _int(ctx, path + ("power",), value.get("power", 1), 1)}
    if kind == "table":
        if index_kind != "table":
            ctx.fail(path + ("kind",), "table maps need a table index")
        images = value.get("images")
        if not isinstance(images, dict):
            ctx.fail(path + ("images",), "expected a mapping of images")
        return {"kind": kind, "images": {str(a): str(b) for a, b in images.items()}}
    ctx.fail(path + ("kind",), f"unknown map kind {kind!r}")


def _norm_table_weights(ctx, path, value, labels):
    if isinstance(value, dict):
        out = {}
        for label in labels:
            if label not in value:
                ctx.fail(path, f"no weight for {label!r}")
            out[label] = dsl.to_text(ctx.dsl(path + (label,), dsl.parse_expr, value[label]))
        return out
    return _norm_rules(ctx, path, value)


def _normalize(ctx: _Ctx, raw) -> dict:
    root = _mapping(ctx, (), raw, TOP_KEYS, ("version", "index", "space", "schedule", "check"))
    if root["version"] != SPEC_VERSION:
        ctx.fail(("version",), f"unsupported version {root['version']!r}; expected {SPEC_VERSION}")
    out = {"version": SPEC_VERSION}
    if "name" in root:
        out["name"] = str(root["name"])

    index = _mapping(ctx, ("index",), root["index"], ("kind", "labels"), ("kind",))
    kind = index["kind"]
    if kind not in INDEX_KINDS:
        ctx.fail(("index", "kind"), f"unknown index kind {kind!r}")
    out["index"] = {"kind": kind}
    labels = None
    if kind == "table":
        labels = index.get("labels")
        if not isinstance(labels, list) or not labels:
            ctx.fail(("index", "labels"), "a table index needs a list of labels")
        labels = [str(x) for x in labels]
        if len(set(labels)) != len(labels):
            ctx.fail(("index", "labels"), "labels must be distinct")
        out["index"]["labels"] = labels
    elif "labels" in index:
        ctx.fail(("index", "labels"), "labels only apply to table indices")

    constants = root.get("constants") or {}
    _mapping(ctx, ("constants",), constants, tuple(constants))
    if constants:
        out["constants"] = {
            str(name): dsl.to_text(ctx.dsl(("constants", name), dsl.parse_expr, expr))
            for name, expr in constants.items()
        }
    sets = root.get("sets") or {}
    _mapping(ctx, ("sets",), sets, tuple(sets))
    if sets:
        out["sets"] = {
            str(name): dsl.to_text(ctx.dsl(("sets", name), dsl.parse_set, expr))
            for name, expr in sets.items()
        }

    space = _mapping(ctx, ("space",), root["space"], ("kind", "p", "weights"), ("kind",))
    skind = space["kind"]
    if skind not in ("weighted-lp", "tree-lp", "zk-hilbert"):
        ctx.fail(("space", "kind"), f"unknown space kind {skind!r}")
    if skind == "tree-lp" and kind != "tree":
        ctx.fail(("space", "kind"), "tree-lp needs a tree index")
    if skind == "zk-hilbert" and kind != "grid":
        ctx.fail(("space", "kind"), "zk-hilbert needs a grid index")
    p = space.get("p", 2)
    try:
        p_val = Fraction(str(p))
    except (ValueError, ZeroDivisionError):
        ctx.fail(("space", "p"), "p must be a number")
    if p_val < 1:
        ctx.fail(("space", "p"), "p must be >= 1")
    if skind == "zk-hilbert" and p_val != 2:
        ctx.fail(("space", "p"), "zk-hilbert has p = 2")
    out["space"] = {"kind": skind, "p": int(p_val) if p_val.denominator == 1 else str(p_val)}
    if skind == "zk-hilbert":
        if "weights" in space:
            ctx.fail(("space", "weights"), "zk-hilbert has unit basis norms")
    elif kind == "table":
        out["space"]["weights"] = _norm_table_weights(ctx, ("space", "weights"),
                                                      space.get("weights", "1"), labels)
    else:
        out["space"]["weights"] = _norm_rules(ctx, ("space", "weights"), space.get("weights", "1"))

    if ("shifts" in root) == ("ows" in root):
        ctx.fail((), "give exactly one of 'shifts' and 'ows'")
    if "shifts" in root:
        out["shifts"] = _norm_shifts(ctx, root["shifts"], kind, labels, root.get("powers"))
    else:
        if "powers" in root:
            ctx.fail(("powers",), "give ows powers inside the ows block")
        if kind != "grid" or skind != "zk-hilbert":
            ctx.fail(("ows",), "operator-weighted shifts need a grid index and zk-hilbert space")
        out["ows"] = _norm_ows(ctx, root["ows"])

    out["schedule"] = _norm_schedule(ctx, root["schedule"])
    out["check"] = _norm_check(ctx, root["check"], "ows" in out)
    return out


def _norm_shifts(ctx, value, index_kind, labels, powers=None):
    if not isinstance(value, list) or not value:
        ctx.fail(("shifts",), "expected a list of shifts")
    if powers is not None:
        if not isinstance(powers, list):
            ctx.fail(("powers",), "expected a list of powers")
        if len(powers) != len(value):
            ctx.fail(("powers",), f"{len(powers)} powers for {len(value)} shift entries; each power "
                                  "pairs with its own shift entry (mark repeats with 'reuse')")
    out, names, seen = [], set(), {}
    for n, entry in enumerate(value):
        path = ("shifts", n)
        _mapping(ctx, path, entry, ("name", "map", "weights", "power", "reuse"))
        name = str(entry.get("name", f"T{n + 1}"))
        if name in names:
            ctx.fail(path + ("name",), f"duplicate shift name {name!r}")
        names.add(name)
        if powers is not None:
            if "power" in entry:
                ctx.fail(path + ("power",), "give powers either per shift or as a top-level list")
            power = _int(ctx, ("powers", n), powers[n], 1)
        elif "power" not in entry:
            ctx.fail(path, "missing key 'power'")
        else:
            power = _int(ctx, path + ("power",), entry["power"], 1)
        if "reuse" in entry:
            if "map" in entry or "weights" in entry:
                ctx.fail(path, "a reused shift takes neither map nor weights")
            target = str(entry["reuse"])
            if target not in {e["name"] for e in out}:
                ctx.fail(path + ("reuse",), f"reuse refers to unknown earlier shift {target!r}")
            out.append({"name": name, "reuse": target, "power": power})
            continue
        if "map" not in entry:
            ctx.fail(path, "missing key 'map'")
        m = _norm_map(ctx, path + ("map",), entry["map"], index_kind)
        if index_kind == "table":
            w = _norm_table_weights(ctx, path + ("weights",), entry.get("weights", "1"), labels)
        else:
            w = _norm_rules(ctx, path + ("weights",), entry.get("weights", "1"))
        key = yaml.safe_dump({"map": m, "weights": w}, sort_keys=True)
        if key in seen:
            ctx.fail(path, f"shift duplicates {seen[key]!r}; pair powers with distinct shifts "
                           f"or mark the repeat with 'reuse: {seen[key]}'")
        seen[key] = name
        out.append({"name": name, "map": m, "weights": w, "power": power})
    if len(out) < 2:
        ctx.fail(("shifts",), "need at least two shifts (use 'reuse' to repeat one)")
    powers = [e["power"] for e in out]
    if any(a >= b for a, b in zip(powers, powers[1:])):
        ctx.fail(("shifts",), f"powers must be strictly increasing, got {powers}")
    return out


def _norm_ows(ctx, value):
    path = ("ows",)
    _mapping(ctx, path, value, ("direction", "operators", "powers"), ("operators", "powers"))
    direction = value.get("direction", "forward")
    if direction != "forward":
        ctx.fail(path + ("direction",), "criteria are stated for forward shifts")
    ops = value["operators"]
    if not isinstance(ops, list) or not ops:
        ctx.fail(path + ("operators",), "expected a list of operators")
    out, names = [], []
    for n, entry in enumerate(ops):
        p = path + ("operators", n)
        _mapping(ctx, p, entry, ("name", "weights", "reuse"))
        name = str(entry.get("name", f"T{n + 1}"))
        if name in names:
            ctx.fail(p + ("name",), f"duplicate operator name {name!r}")
        if "reuse" in entry:
            if "weights" in entry:
                ctx.fail(p, "a reused operator takes no weights")
            if str(entry["reuse"]) not in names:
                ctx.fail(p + ("reuse",), f"reuse refers to unknown earlier operator {entry['reuse']!r}")
            out.append({"name": name, "reuse": str(entry["reuse"])})
        else:
            if "weights" not in entry:
                ctx.fail(p, "missing key 'weights'")
            out.append({"name": name, "weights": _norm_rules(ctx, p + ("weights",), entry["weights"])})
        names.append(name)
    powers = value["powers"]
    if not isinstance(powers, list) or len(powers) != len(out):
        ctx.fail(path + ("powers",), "one power per operator")
    powers = [_int(ctx, path + ("powers", n), r, 1) for n, r in enumerate(powers)]
    if len(out) < 2 or any(a >= b for a, b in zip(powers, powers[1:])):
        ctx.fail(path + ("powers",), f"need N >= 2 strictly increasing powers, got {powers}")
    return {"direction": direction, "operators": out, "powers": powers}


def _norm_schedule(ctx, value):
    path = ("schedule",)
    if isinstance(value, list):
        value = {"values": value}
    if value is None:
        ctx.fail(path, "expected a schedule")
    _mapping(ctx, path, value, ("values", "formula", "K", "search"))
    if value.get("values") == [] and "search" in value:
        value = {k: v for k, v in value.items() if k != "values"}
    forms = [k for k in ("values", "formula", "search") if k in value]
    if len(forms) != 1:
        ctx.fail(path, "give exactly one of 'values', 'formula' and 'search'")
    form = forms[0]
    if form == "values":
        vals = value["values"]
        if not isinstance(vals, list) or not vals:
            ctx.fail(path + ("values",), "expected a non-empty list")
        vals = [_int(ctx, path + ("values", n), v, 1) for n, v in enumerate(vals)]
        if any(a >= b for a, b in zip(vals, vals[1:])):
            ctx.fail(path + ("values",), "schedule must be strictly increasing")
        return {"values": vals}
    if form == "formula":
        if "K" not in value:
            ctx.fail(path, "a formula schedule needs K")
        expr = dsl.to_text(ctx.dsl(path + ("formula",), dsl.parse_expr, value["formula"]))
        return {"formula": expr, "K": _int(ctx, path + ("K",), value["K"], 1)}
    if "K" in value:
        ctx.fail(path + ("K",), "K belongs inside the search block")
    search = _mapping(ctx, path + ("search",), value["search"], ("K", "n_max"), ("K", "n_max"))
    K = _int(ctx, path + ("search", "K"), search["K"], 1)
    n_max = _int(ctx, path + ("search", "n_max"), search["n_max"], K)
    return {"search": {"K": K, "n_max": n_max}}


def _norm_check(ctx, value, is_ows):
    path = ("check",)
    if isinstance(value, str):
        value = {"kind": value}
    _mapping(ctx, path, value, ("kind", "mode", "criterion_mode", "windows", "horizon"), ("kind",))
    kind = value["kind"]
    if kind not in CHECK_KINDS:
        ctx.fail(path + ("kind",), f"unknown check kind {kind!r}")
    if kind in ("ows", "ows-powers") and not is_ows:
        ctx.fail(path + ("kind",), f"check {kind!r} needs an ows block")
    out = {"kind": kind}
    mode = value.get("mode", "general")
    if mode not in ("general", "same-map", "escaping"):
        ctx.fail(path + ("mode",), f"unknown mode {mode!r}")
    if mode != "general" and kind != "super":
        ctx.fail(path + ("mode",), "modes apply to the super check only")
    out["mode"] = mode
    if kind == "criterion":
        cm = value.get("criterion_mode", "hyper")
        if cm not in ("hyper", "super"):
            ctx.fail(path + ("criterion_mode",), "criterion_mode is hyper or super")
        out["criterion_mode"] = cm
    windows = value.get("windows", {"growth": "linear"})
    _mapping(ctx, path + ("windows",), windows, ("growth", "bound", "size"))
    if "size" in windows:
        if len(windows) != 1:
            ctx.fail(path + ("windows",), "a fixed window takes only 'size'")
        out["windows"] = {"size": _int(ctx, path + ("windows", "size"), windows["size"], 1)}
    else:
        if windows.get("growth", "linear") != "linear":
            ctx.fail(path + ("windows", "growth"), "growth is linear (or give size)")
        out["windows"] = {"growth": "linear"}
        if "bound" in windows:
            pred = ctx.dsl(path + ("windows", "bound"), dsl.parse_predicate, windows["bound"])
            out["windows"]["bound"] = dsl.to_text(pred)
    if "horizon" in value:
        out["horizon"] = _int(ctx, path + ("horizon",), value["horizon"], 1)
    return out


# --------------------------------------------------------------------- spec


@dataclass
class ProblemSpec:
    data: dict
    _built: object = field(default=None, repr=False, compare=False)

    @property
    def name(self) -> str:
        return self.data.get("name", "")

    def build(self) -> "BuiltProblem":
        if self._built is None:
            self._built = _build(self.data)
        return self._built


def parse_spec(text: str) -> ProblemSpec:
    source = _Source(text)
    data = _normalize(_Ctx(source), source.data)
    spec = ProblemSpec(data)
    try:
        spec.build()
    except ParseError:
        raise
    except PseudoShiftError as exc:
        if isinstance(exc, ValidationError):
            raise
        raise ValidationError("<problem>", str(exc)) from None
    return spec


def spec_from_dict(data: dict) -> ProblemSpec:
    return ProblemSpec(_normalize(_Ctx(None), data))


def serialize(spec: ProblemSpec) -> str:
    return yaml.safe_dump(spec.data, sort_keys=False, default_flow_style=False, allow_unicode=True)


# --------------------------------------------------------------------- build


@dataclass
class BuiltProblem:
    data: dict
    index_space: object
    variables: tuple
    problem: object  # ShiftTuple | OwsProblem
    schedule: Schedule | None
    search: dict | None
    sets: dict
    constants: dict

    def windows(self, override_size: int | None = None, variables=None) -> Windows:
        if override_size is not None:
            return Windows.fixed(override_size)
        w = self.data["check"]["windows"]
        if "size" in w:
            return Windows.fixed(w["size"])
        if "bound" in w:
            variables = variables or self.variables
            pred = dsl.compile_predicate(dsl.parse_predicate(w["bound"]), self.sets, self.constants)
            if len(variables) == 1:
                test = lambda i: pred({variables[0]: i})
            else:
                test = lambda idx: pred(dict(zip(variables, idx)))
            return Windows.bounded(test, w["bound"])
        return Windows.linear()


def _index_space(data):
    kind = data["index"]["kind"]
    return {
        "integers": Integers,
        "naturals": Naturals,
        "grid": Grid,
        "tree": TreeVertices,
    }.get(kind, lambda: FiniteTable(data["index"]["labels"]))()


def _rules(node_list, variables, sets, constants):
    rules = []
    for r in node_list:
        if "default" in r:
            rules.append(dsl.WeightRule(None, dsl.parse_expr(r["default"])))
        else:
            rules.append(dsl.WeightRule(dsl.parse_predicate(r["when"]), dsl.parse_expr(r["value"])))
    return dsl.WeightRuleSet(rules, variables, sets, constants)


def _index_fn(spec_weights, variables, sets, constants, table):
    if table and isinstance(spec_weights, dict):
        values = {k: dsl.compile_value(dsl.parse_expr(v), constants)({}) for k, v in spec_weights.items()}
        return values.__getitem__
    rules = _rules(spec_weights, variables, sets, constants)
    if table:
        return lambda x: rules(x)
    if len(variables) == 1:
        return rules
    return lambda idx: rules(*idx)


def _build(data: dict) -> BuiltProblem:
    constants = {}
    for name, expr in (data.get("constants") or {}).items():
        constants[name] = dsl.compile_expr(dsl.parse_expr(expr), constants)({})
    sets = {}
    for name, expr in (data.get("sets") or {}).items():
        sets[name] = dsl.SetPredicate(dsl.parse_set(expr), sets, constants)
    kind = data["index"]["kind"]
    variables = INDEX_VARIABLES[kind]
    index = _index_space(data)
    table = kind == "table"
    sp = data["space"]
    p = Fraction(str(sp["p"]))
    tree = None
    if sp["kind"] == "zk-hilbert":
        space = zk_hilbert()
    elif sp["kind"] == "tree-lp":
        tree = path_tree(_index_fn(sp["weights"], variables, sets, constants, False), p)
        space = tree.space()
    else:
        space = weighted_lp(index, p, _index_fn(sp["weights"], variables, sets, constants, table))

    problem = None
    if "shifts" in data:
        built = {}
        shifts = []
        for entry in data["shifts"]:
            if "reuse" in entry:
                T = built[entry["reuse"]]
            else:
                T = PseudoShift(space, _shift_map(entry["map"], index, tree),
                                _index_fn(entry["weights"], variables, sets, constants, table),
                                entry["name"])
            built[entry["name"]] = T
            shifts.append(T)
        problem = ShiftTuple(shifts, [e["power"] for e in data["shifts"]], data.get("name", ""))
    else:
        ops = {}
        seq = []
        for entry in data["ows"]["operators"]:
            if "reuse" in entry:
                op = ops[entry["reuse"]]
            else:
                rules = _rules(entry["weights"], OWS_VARIABLES, sets, constants)
                op = OwsOperator(DiagonalWeightFamily(rules, entry["name"]), "forward")
            ops[entry["name"]] = op
            seq.append(op)
        problem = OwsProblem(seq, data["ows"]["powers"], data.get("name", ""))
        if data["check"]["kind"] == "ows-powers":
            if any(op is not seq[0] for op in seq):
                raise ValidationError("ows.operators", "ows-powers needs one operator reused N times")
            if list(problem.powers) != list(range(1, len(seq) + 1)):
                raise ValidationError("ows.powers", "ows-powers needs powers 1, 2, ..., N")

    sched = data["schedule"]
    schedule, search = None, None
    if "values" in sched:
        schedule = Schedule(tuple(sched["values"]))
    elif "formula" in sched:
        f = dsl.compile_expr(dsl.parse_expr(sched["formula"]), constants)
        values = tuple(f({"k": k}) for k in range(1, sched["K"] + 1))
        if any(Fraction(v).denominator != 1 for v in values):
            raise ValidationError("schedule.formula", "schedule values must be integers")
        try:
            schedule = Schedule(values)
        except PseudoShiftError as exc:
            raise ValidationError("schedule.formula", exc.message) from None
    else:
        search = dict(sched["search"])
    return BuiltProblem(data, index, variables, problem, schedule, search, sets, constants)


def _shift_map(m, index, tree):
    kind = m["kind"]
    if kind == "translation":
        return ShiftMap.translation(index, m["step"])
    if kind == "grid-translation":
        return ShiftMap.grid_translation(m["step"])
    if kind == "parent":
        return tree.shift_map(m["power"])
    try:
        return ShiftMap.from_table(index, m["images"])
    except ValueError as exc:
        raise ValidationError("map.images", str(exc)) from None


# ----------------------------------------------------------------------- run


def with_K(schedule: Schedule, data: dict, constants: dict, K: int) -> Schedule:
    """The schedule truncated or, for formula schedules, extended to ``K`` terms."""
    sched = data["schedule"]
    if "formula" in sched:
        f = dsl.compile_expr(dsl.parse_expr(sched["formula"]), constants)
        return Schedule(tuple(f({"k": k}) for k in range(1, K + 1)))
    if K > schedule.K:
        raise ValidationError("K", f"the explicit schedule has only {schedule.K} terms")
    return Schedule(schedule.values[:K])


def run_spec(spec: ProblemSpec, K: int | None = None, n_max: int | None = None,
             window: int | None = None, horizon: int | None = None, mode: str | None = None):
    """Run the problem file's check. Returns a report or a ScheduleNotFound result."""
    b = spec.build()
    check = spec.data["check"]
    kind = check["kind"]
    dsc_mode = mode or check["mode"]
    horizon = horizon or check.get("horizon")
    problem = b.problem
    if kind == "ows-powers":
        windows = b.windows(window, variables=("i",))
    else:
        windows = b.windows(window)
    schedule = b.schedule
    if schedule is None:
        search = b.search
        tuple_ = problem if isinstance(problem, ShiftTuple) else problem.to_shift_tuple()
        search_mode = "hyper" if kind == "hyper" or (
            kind == "criterion" and check.get("criterion_mode") == "hyper") else "super"
        found = search_schedule(tuple_, search_mode, K or search["K"], n_max or search["n_max"],
                                windows, check_mode=dsc_mode)
        if isinstance(found, ScheduleNotFound):
            return found
        schedule = found
    elif K is not None:
        schedule = with_K(schedule, spec.data, b.constants, K)
    if kind == "ows":
        return check_ows_dsc(problem, schedule, windows)
    if kind == "ows-powers":
        return check_ows_powers_dsc(problem.operators[0], len(problem.operators), schedule, windows)
    tuple_ = problem if isinstance(problem, ShiftTuple) else problem.to_shift_tuple()
    if kind == "hyper":
        return check_dhc(tuple_, schedule, windows, horizon=horizon)
    if kind == "super":
        return check_dsc(tuple_, schedule, windows, mode=dsc_mode, horizon=horizon)
    return verify_criterion_pointwise(tuple_, schedule, windows, check["criterion_mode"])


__all__ = ["ProblemSpec", "parse_spec", "spec_from_dict", "serialize", "run_spec", "BuiltProblem"]
