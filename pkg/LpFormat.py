"""
CPLEX LP format writer and a reader for the subset the writer produces
(plus >= and = rows), so exported models can be checked by round trip.
"""
import re
from fractions import Fraction

from EmipModel import VariableKind
from MilpSolver import MilpModel, MilpVariable
from RationalIO import denominator_lcm, format_rational

NAME_PATTERN = re.compile(r"^[A-Za-z!\"#$%&()/,;?@_`'{}|~][A-Za-z0-9!\"#$%&()/,.;?@_`'{}|~]*$")
SECTIONS = {
    "maximize": "objective", "maximum": "objective", "max": "objective",
    "minimize": "objective", "minimum": "objective", "min": "objective",
    "subject to": "rows", "such that": "rows", "st": "rows", "s.t.": "rows",
    "bounds": "bounds", "bound": "bounds",
    "general": "general", "generals": "general", "gen": "general",
    "end": "end",
}


class LpParseError(ValueError):
    def __init__(self, message, line):
        self.line = line
        super().__init__(f"line {line}: {message}")


def _number(q):
    q = Fraction(q)
    if q.denominator != 1:
        # only integral numbers reach the writer after denominator clearing
        raise ValueError(f"Invalid LP number {q}: expected an integer")
    return str(q.numerator)


def _check_name(name):
    if not NAME_PATTERN.match(name) or len(name) > 255:
        raise ValueError(f"Invalid LP variable name {name!r}")
    return name


def _expression(coefficients, fallback):
    terms = []
    for name, a in coefficients.items():
        a = Fraction(a)
        sign = "-" if a < 0 else "+"
        magnitude = abs(a)
        term = name if magnitude == 1 else f"{_number(magnitude)} {name}"
        terms.append(f"{sign} {term}")
    if not terms:
        return f"0 {fallback}" if fallback else "0"
    text = " ".join(terms)
    return text[2:] if text.startswith("+ ") else text


def export_lp(model, objective=None, sense="maximize", title="pwlmip model"):
    """CPLEX LP text for the model; objective 0 unless given."""
    for v in model.variables:
        _check_name(v.name)
    fallback = model.variables[0].name if model.variables else ""
    lines = [f"\\* {title} *\\", "Maximize" if sense == "maximize" else "Minimize"]
    if objective:
        # LP numbers are integers, so the objective is scaled by its common denominator
        scale = denominator_lcm(objective.values())
        scaled = {v: Fraction(c) * scale for v, c in objective.items() if c != 0}
        lines.append(f" obj: {_expression(scaled, fallback)}")
    else:
        lines.append(f" obj: {_expression({}, fallback)}")

    lines.append("Subject To")
    for row in model.rows:
        lines.append(f" {_check_name(row.name)}: {_expression(row.coefficients, fallback)} <= {_number(row.rhs)}")

    lines.append("Bounds")
    for v in model.variables:
        if v.lower is None and v.upper is None:
            lines.append(f" {v.name} free")
        elif v.lower is None:
            lines.append(f" -inf <= {v.name} <= {_number(v.upper)}")
        elif v.upper is None:
            lines.append(f" {v.name} >= {_number(v.lower)}")
        else:
            lines.append(f" {_number(v.lower)} <= {v.name} <= {_number(v.upper)}")

    integers = [v.name for v in model.variables if v.is_integer]
    if integers:
        lines.append("General")
        for start in range(0, len(integers), 8):
            lines.append(" " + " ".join(integers[start:start + 8]))
    lines.append("End")
    return "\n".join(lines) + "\n"


def _parse_number(token, line):
    if token.lower() in ("inf", "+inf", "infinity", "+infinity"):
        return None
    if token.lower() in ("-inf", "-infinity"):
        return None
    try:
        return Fraction(token)
    except (ValueError, ZeroDivisionError):
        raise LpParseError(f"expected a number, found {token!r}", line)


def _parse_expression(text, line):
    coefficients = {}
    tokens = re.findall(r"[+-]|[^\s+-]+", text)
    sign = Fraction(1)
    magnitude = None
    for token in tokens:
        if token in "+-":
            sign = Fraction(1) if token == "+" else Fraction(-1)
            continue
        if re.fullmatch(r"\d+(\.\d*)?|\.\d+", token):
            magnitude = Fraction(token)
            continue
        a = sign * (magnitude if magnitude is not None else 1)
        coefficients[token] = coefficients.get(token, Fraction(0)) + a
        sign, magnitude = Fraction(1), None
    if magnitude is not None and magnitude != 0:
        raise LpParseError(f"dangling constant in expression {text!r}", line)
    return coefficients


def parse_lp(text):
    """Parse LP text into (MilpModel, objective dict, sense)."""
    section = None
    sense = "maximize"
    objective = {}
    rows = []
    bounds = {}
    declared = []
    referenced = []
    integers = set()

    def note(name, declaring=False):
        if name not in bounds:
            # LP default bounds are [0, +inf)
            bounds[name] = (Fraction(0), None)
        target = declared if declaring else referenced
        if name not in target:
            target.append(name)

    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("\\", 1)[0].strip()
        if not line:
            continue
        keyword = line.lower()
        if keyword in SECTIONS:
            section = SECTIONS[keyword]
            if section == "objective":
                sense = "minimize" if keyword.startswith("min") else "maximize"
            if section == "end":
                break
            continue

        if section == "objective":
            body = line.split(":", 1)[1] if ":" in line else line
            objective = {v: a for v, a in _parse_expression(body, number).items() if a != 0}
        elif section == "rows":
            if ":" not in line:
                raise LpParseError("row without a name", number)
            name, body = (part.strip() for part in line.split(":", 1))
            match = re.match(r"^(.*?)(<=|>=|=<|=>|=)\s*(\S+)$", body)
            if not match:
                raise LpParseError(f"cannot read row {body!r}", number)
            coefficients = _parse_expression(match.group(1), number)
            for v in coefficients:
                note(v)
            rhs = _parse_number(match.group(3), number)
            if rhs is None:
                raise LpParseError("row right-hand side must be finite", number)
            relation = match.group(2)
            coefficients = {v: a for v, a in coefficients.items() if a != 0}
            if relation in ("<=", "=<", "="):
                rows.append((name, coefficients, rhs))
            if relation in (">=", "=>", "="):
                rows.append((name if relation != "=" else f"{name}.ge", {v: -a for v, a in coefficients.items()}, -rhs))
        elif section == "bounds":
            parts = line.split()
            if len(parts) == 2 and parts[1].lower() == "free":
                note(parts[0], True)
                bounds[parts[0]] = (None, None)
            elif len(parts) == 5 and parts[1] in ("<=", "=<") and parts[3] in ("<=", "=<"):
                note(parts[2], True)
                bounds[parts[2]] = (_parse_number(parts[0], number), _parse_number(parts[4], number))
            elif len(parts) == 3 and parts[1] in (">=", "=>", "<=", "=<"):
                name, value = parts[0], _parse_number(parts[2], number)
                note(name, True)
                lower, upper = bounds[name]
                if parts[1] in (">=", "=>"):
                    bounds[name] = (value, upper)
                else:
                    bounds[name] = (lower, value)
            else:
                raise LpParseError(f"cannot read bound {line!r}", number)
        elif section == "general":
            for name in line.split():
                note(name, True)
                integers.add(name)
        else:
            raise LpParseError(f"text outside any section: {line!r}", number)

    for v in objective:
        note(v)
    model = MilpModel()
    # declaration order from the Bounds section reproduces the written column order
    order = declared + [name for name in referenced if name not in declared]
    for name in order:
        lower, upper = bounds[name]
        kind = VariableKind.INTEGER if name in integers else VariableKind.CONTINUOUS
        model.variables.append(MilpVariable(name, kind, lower, upper))
    for name, coefficients, rhs in rows:
        model.add_row(coefficients, rhs, name)
    return model, objective, sense


def format_assignment(assignment):
    return {name: format_rational(value) for name, value in assignment.items()}
