"""Key-value run documents and the matrix interchange format.

Documents are ``key = value`` lines; ``#`` starts a comment. Values are
quoted strings, ``true``/``false``, integers, rationals written ``p/q``,
decimals (kept exact) and bracketed lists of these.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

COMMANDS = ("simulate", "timeline", "optimize", "bounds", "posver", "decompose", "report")
FORMATS = ("human", "records", "csv")
SEED_LIMIT = 1 << 64


class ConfigError(ValueError):
    def __init__(self, message: str, line: int | None = None, key: str | None = None):
        self.line = line
        self.key = key
        super().__init__(f"line {line}: {message}" if line else message)


# ---------------------------------------------------------------- value syntax

_TOKEN = re.compile(r'\s*(?:(\[)|(\])|(,)|("(?:[^"\\]|\\.)*")|([^\s,\[\]"]+))')
_INT = re.compile(r"^[+-]?\d+$")
_RATIONAL = re.compile(r"^[+-]?\d+/\d+$")
_DECIMAL = re.compile(r"^[+-]?(\d+\.\d*|\.\d+|\d+)([eE][+-]?\d+)?$")


def _scalar(word: str, line: int):
    if word == "true":
        return True
    if word == "false":
        return False
    if _INT.match(word):
        return int(word)
    if _RATIONAL.match(word):
        num, den = word.split("/")
        if int(den) == 0:
            raise ConfigError(f"zero denominator in {word!r}", line)
        return Fraction(int(num), int(den))
    if _DECIMAL.match(word):
        return Fraction(word)
    raise ConfigError(f"malformed value {word!r}", line)


def parse_value(text: str, line: int = 0):
    """Parse one value; lists become tuples."""
    tokens = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ConfigError(f"cannot parse {text[pos:]!r}", line)
        tokens.append(m)
        pos = m.end()
        while pos < len(text) and text[pos].isspace():
            pos += 1
    if not tokens:
        raise ConfigError("missing value", line)

    def parse(i):
        m = tokens[i]
        if m.group(1):
            items = []
            i += 1
            if i < len(tokens) and tokens[i].group(2):
                return (), i + 1
            while True:
                if i >= len(tokens):
                    raise ConfigError("unterminated list", line)
                item, i = parse(i)
                items.append(item)
                if i >= len(tokens):
                    raise ConfigError("unterminated list", line)
                if tokens[i].group(2):
                    return tuple(items), i + 1
                if not tokens[i].group(3):
                    raise ConfigError("expected ',' or ']' in list", line)
                i += 1
        if m.group(4):
            return re.sub(r"\\(.)", r"\1", m.group(4)[1:-1]), i + 1
        if m.group(5):
            return _scalar(m.group(5), line), i + 1
        raise ConfigError(f"unexpected {m.group(0).strip()!r}", line)

    value, end = parse(0)
    if end != len(tokens):
        raise ConfigError("trailing text after value", line)
    return value


def format_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, Fraction):
        return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"
    if isinstance(value, str):
        return '"' + value.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(value, (tuple, list)):
        return "[" + ", ".join(format_value(v) for v in value) + "]"
    raise TypeError(f"cannot format {type(value).__name__}")


def _strip_comment(line: str) -> str:
    in_str, escaped = False, False
    for k, ch in enumerate(line):
        if escaped:
            escaped = False
        elif ch == "\\" and in_str:
            escaped = True
        elif ch == '"':
            in_str = not in_str
        elif ch == "#" and not in_str:
            return line[:k]
    return line


def parse_document(text: str) -> dict:
    """Raw ``{key: (value, line)}`` with duplicate and syntax checks."""
    out: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw).strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {line!r}", lineno)
        key, _, rest = line.partition("=")
        key = key.strip()
        if not re.match(r"^[A-Za-z_][A-Za-z0-9_]*$", key):
            raise ConfigError(f"invalid key {key!r}", lineno, key)
        if key in out:
            raise ConfigError(f"duplicate key {key!r} (first set on line {out[key][1]})", lineno, key)
        out[key] = (parse_value(rest, lineno), lineno)
    return out


# ---------------------------------------------------------------- coercion

def _rational(v, line, key):
    if isinstance(v, bool):
        raise ConfigError(f"{key}: expected a rational, got {v}", line, key)
    if isinstance(v, (int, Fraction)):
        return Fraction(v)
    if isinstance(v, str):
        try:
            return _to_rational_text(v.strip())
        except (ValueError, ZeroDivisionError):
            pass
    raise ConfigError(f"{key}: malformed rational {v!r}", line, key)


def _to_rational_text(s: str) -> Fraction:
    if _RATIONAL.match(s) or _INT.match(s) or _DECIMAL.match(s):
        return Fraction(s)
    raise ValueError(s)


def _integer(v, line, key):
    if isinstance(v, bool) or not isinstance(v, int):
        raise ConfigError(f"{key}: expected an integer, got {format_value(v) if v is not None else v}", line, key)
    return v


def _positive_int(v, line, key):
    v = _integer(v, line, key)
    if v < 1:
        raise ConfigError(f"{key}: must be at least 1", line, key)
    return v


def _string(v, line, key):
    if not isinstance(v, str):
        raise ConfigError(f"{key}: expected a quoted string", line, key)
    return v


def _boolean(v, line, key):
    if not isinstance(v, bool):
        raise ConfigError(f"{key}: expected true or false", line, key)
    return v


def _list_of(item):
    def coerce(v, line, key):
        if not isinstance(v, tuple):
            v = (v,)
        return tuple(item(x, line, key) for x in v)
    return coerce


def _choice(*options):
    def coerce(v, line, key):
        v = _string(v, line, key)
        if v not in options:
            raise ConfigError(f"{key}: {v!r} is not one of {', '.join(options)}", line, key)
        return v
    return coerce


def _point(v, line, key):
    if not isinstance(v, tuple) or len(v) != 2:
        raise ConfigError(f"{key}: a point is a two-element list [x, y]", line, key)
    return tuple(_rational(c, line, key) for c in v)


def _variant(v, line, key):
    from .timeline import TimelineError, parse_variant
    v = _string(v, line, key) if not isinstance(v, Fraction) else str(float(v))
    try:
        parse_variant(v)
    except TimelineError as exc:
        raise ConfigError(str(exc), line, key) from None
    return v


def _repeaters(v, line, key):
    if v == "unbounded":
        return None
    return _integer(v, line, key)


_ALL = COMMANDS
# key -> (coercer, commands that accept it)
SCHEMA = {
    "command": (_choice(*COMMANDS), _ALL),
    "inputs": (_list_of(_string), _ALL),
    "seed": (_integer, _ALL),
    "format": (_choice(*FORMATS), _ALL),
    "svg": (_string, ("timeline",)),
    "variant": (_variant, ("timeline",)),
    "positions": (_list_of(_rational), ("timeline",)),
    "offsets": (_list_of(_rational), ("timeline",)),
    "dims": (_list_of(_positive_int), ("timeline", "simulate", "decompose")),
    "group_order": (_positive_int, ("timeline",)),
    "n_control": (_positive_int, ("timeline",)),
    "ladder_steps": (_positive_int, ("timeline",)),
    "redundancy": (_positive_int, ("timeline",)),
    "protocol": (_string, ("simulate",)),
    "fixture": (_choice("random", "cnot"), ("simulate",)),
    "trials": (_positive_int, ("simulate",)),
    "unitary": (_string, ("simulate", "decompose")),
    "input": (_string, ("simulate",)),
    "family": (_string, ("optimize",)),
    "n": (_integer, ("optimize",)),
    "method": (_choice("exact", "grid"), ("optimize",)),
    "q": (_positive_int, ("optimize",)),
    "table": (_boolean, ("bounds",)),
    "max_k": (_integer, ("bounds",)),
    "verifiers": (_list_of(_point), ("posver",)),
    "prover": (_point, ("posver",)),
    "attacker_nodes": (_list_of(_point), ("posver",)),
    "delta": (_rational, ("posver",)),
    "max_attacker_repeaters": (_repeaters, ("posver",)),
    "exact_mode": (_boolean, ("posver",)),
    "form": (_choice("double", "single", "controlled"), ("decompose",)),
}

REQUIRED = {
    "timeline": ("variant",),
    "simulate": ("protocol",),
    "optimize": ("family",),
    "posver": ("verifiers", "prover"),
    "decompose": ("unitary", "dims"),
}

_TOP_LEVEL = ("command", "inputs", "seed", "format", "svg")


@dataclass(frozen=True)
class RunConfig:
    command: str
    inputs: tuple = ()
    seed: int = 0
    format: str = "human"
    svg: str | None = None
    options: dict = field(default_factory=dict)

    def get(self, key, default=None):
        return self.options.get(key, default)

    def variant_label(self) -> str | None:
        """Variant name with positions folded in, e.g. ``P3.2(1/5,3/5)``."""
        from .timeline import parse_variant
        if "variant" not in self.options:
            return None
        variant, reps = parse_variant(self.options["variant"])
        reps = self.options.get("positions", reps)
        return variant.label(reps) if reps is not None else variant.label()


def _check_positions(positions, line):
    for p in positions:
        if not 0 < p < 1:
            raise ConfigError(f"positions: {format_value(p)} is outside (0, 1)", line, "positions")
    for a, b in zip(positions, positions[1:]):
        if not a < b:
            raise ConfigError(f"positions must be strictly increasing ({format_value(a)} then {format_value(b)})",
                              line, "positions")


def build_config(raw: dict, command: str | None = None, nlines: int = 0) -> RunConfig:
    """Validate ``{key: (value, line)}`` into a RunConfig."""
    if command is None:
        if "command" not in raw:
            raise ConfigError(f"missing required key 'command' (document has {nlines} lines)", key="command")
        command = SCHEMA["command"][0](raw["command"][0], raw["command"][1], "command")
    elif "command" in raw:
        given = SCHEMA["command"][0](raw["command"][0], raw["command"][1], "command")
        if given != command:
            raise ConfigError(f"document is for {given!r}, invoked as {command!r}", raw["command"][1], "command")
    elif command not in COMMANDS:
        raise ConfigError(f"unknown command {command!r}")
    values: dict = {}
    for key, (value, line) in raw.items():
        if key not in SCHEMA:
            raise ConfigError(f"unknown key {key!r}", line, key)
        coerce, allowed = SCHEMA[key]
        if command not in allowed:
            raise ConfigError(f"key {key!r} is not used by {command}", line, key)
        values[key] = coerce(value, line, key)
    for key in REQUIRED.get(command, ()):
        if key not in values:
            raise ConfigError(f"missing required key {key!r} for {command}", key=key)
    seed = values.get("seed", 0)
    if not 0 <= seed < SEED_LIMIT:
        raise ConfigError("seed must fit in 64 bits", raw["seed"][1], "seed")
    if "positions" in values:
        line = raw["positions"][1]
        _check_positions(values["positions"], line)
        if "variant" in values:
            from .timeline import parse_variant
            variant, reps = parse_variant(values["variant"])
            if reps is not None:
                raise ConfigError("positions given twice (in variant and positions)", line, "positions")
            if len(values["positions"]) != variant.n:
                raise ConfigError(f"{variant.name} takes {variant.n} positions, got {len(values['positions'])}",
                                  line, "positions")
    options = {k: v for k, v in sorted(values.items()) if k not in _TOP_LEVEL}
    return RunConfig(command, values.get("inputs", ()), seed, values.get("format", "human"), values.get("svg"), options)


def parse_config(document: str, command: str | None = None) -> RunConfig:
    return build_config(parse_document(document), command, len(document.splitlines()))


def emit_config(config: RunConfig) -> str:
    lines = [f"command = {format_value(config.command)}"]
    if config.inputs:
        lines.append(f"inputs = {format_value(config.inputs)}")
    lines.append(f"seed = {config.seed}")
    lines.append(f"format = {format_value(config.format)}")
    if config.svg is not None:
        lines.append(f"svg = {format_value(config.svg)}")
    for key, value in sorted(config.options.items()):
        if key == "max_attacker_repeaters" and value is None:
            lines.append(f'{key} = "unbounded"')
        else:
            lines.append(f"{key} = {format_value(value)}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- matrices

def _float_pair(v, line):
    if not isinstance(v, tuple) or len(v) != 2:
        raise ConfigError("entries are [re, im] pairs", line, "entries")
    return complex(float(_rational(v[0], line, "entries")), float(_rational(v[1], line, "entries")))


def read_matrix(text: str) -> tuple:
    """Returns (dims, array). A column (cols = 1) is a state vector."""
    raw = parse_document(text)
    for key, (_, line) in raw.items():
        if key not in ("dims", "rows", "cols", "entries"):
            raise ConfigError(f"unknown key {key!r}", line, key)
    for key in ("dims", "rows", "cols", "entries"):
        if key not in raw:
            raise ConfigError(f"missing required key {key!r}", key=key)
    dims = _list_of(_positive_int)(*raw["dims"], "dims")
    rows = _positive_int(*raw["rows"], "rows")
    cols = _positive_int(*raw["cols"], "cols")
    entries_raw, line = raw["entries"]
    entries = [_float_pair(e, line) for e in entries_raw]
    if len(entries) != rows * cols:
        raise ConfigError(f"expected {rows * cols} entries, got {len(entries)}", line, "entries")
    if rows != math.prod(dims):
        raise ConfigError(f"rows = {rows} does not match dims {list(dims)}", raw["rows"][1], "rows")
    return dims, np.array(entries, dtype=complex).reshape(rows, cols)


def _decimal(x: float) -> str:
    return repr(float(x)) if x != 0 else "0"


def write_matrix(dims, matrix) -> str:
    m = np.asarray(matrix, dtype=complex)
    if m.ndim == 1:
        m = m.reshape(-1, 1)
    pairs = ", ".join(f"[{_decimal(z.real)}, {_decimal(z.imag)}]" for z in m.reshape(-1))
    return (f"dims = {format_value(tuple(int(d) for d in dims))}\nrows = {m.shape[0]}\ncols = {m.shape[1]}\n"
            f"entries = [{pairs}]\n")
