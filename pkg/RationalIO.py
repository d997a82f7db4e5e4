"""
Exact rational parsing/formatting and JSON document loading shared by every
file format of the toolkit (emip-v1, cover-v1, election-v1 and PWL functions).
"""
import json
import math
from fractions import Fraction


class SchemaError(ValueError):
    """A JSON document does not follow its schema; carries file/line context."""

    def __init__(self, message, source=None, line=None):
        self.source = source
        self.line = line
        where = ""
        if source is not None:
            where = f"{source}:{line}: " if line is not None else f"{source}: "
        super().__init__(f"{where}{message}")


def parse_rational(value, where="value"):
    """Parse an int, a decimal string or a "p/q" string into a Fraction.

    Floats are refused unless they are integral, so no binary rounding error
    can enter a model.
    """
    if isinstance(value, bool):
        raise SchemaError(f"Invalid rational at {where}: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        if value.is_integer():
            return Fraction(int(value))
        raise SchemaError(f"Invalid rational at {where}: {value!r} (write non-integers as strings)")
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            raise SchemaError(f"Invalid rational at {where}: {value!r}")
    raise SchemaError(f"Invalid rational at {where}: {value!r}")


def parse_integer(value, where="value", minimum=None):
    q = parse_rational(value, where)
    if q.denominator != 1:
        raise SchemaError(f"Invalid integer at {where}: {value!r}")
    if minimum is not None and q < minimum:
        raise SchemaError(f"Invalid integer at {where}: {value!r} is below {minimum}")
    return int(q)


def format_rational(q):
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def denominator_lcm(values):
    return math.lcm(1, *(Fraction(v).denominator for v in values))


def load_document(path, schema):
    """Read a JSON file and check its "schema" tag."""
    try:
        with open(path, encoding="utf-8") as handle:
            text = handle.read()
    except OSError as e:
        raise SchemaError(f"cannot read file: {e.strerror}", source=str(path))
    return parse_document(text, schema, source=str(path))


def parse_document(text, schema, source="<string>"):
    try:
        document = json.loads(text)
    except json.JSONDecodeError as e:
        raise SchemaError(f"malformed JSON: {e.msg}", source=source, line=e.lineno)
    if not isinstance(document, dict):
        raise SchemaError("top-level JSON value must be an object", source=source)
    found = document.get("schema")
    if found != schema:
        raise SchemaError(f"schema version mismatch: expected {schema!r}, found {found!r}", source=source)
    return document


def dump_document(document):
    # sorted keys and fixed separators keep reports byte-identical across runs
    return json.dumps(document, sort_keys=True, indent=2, separators=(",", ": ")) + "\n"
