import re
from typing import Dict, List, Tuple

from loadcoupling.errors import ModelError

from .model import Constraint, MilpModel, Sense, Variable, VariableKind

TERMS_PER_LINE = 8

_SECTIONS = {
    "minimize": "objective",
    "minimum": "objective",
    "min": "objective",
    "subject to": "rows",
    "such that": "rows",
    "st": "rows",
    "s.t.": "rows",
    "bounds": "bounds",
    "binaries": "binaries",
    "binary": "binaries",
    "end": "end",
}

_NUMBER = re.compile(r"^[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?$|^[+-]?inf(inity)?$",
                     re.IGNORECASE)


def _num(value: float) -> str:
    return "%.17g" % (float(value) + 0.0)


def _render_terms(terms) -> List[str]:
    """Terms as text chunks, TERMS_PER_LINE to a chunk."""
    parts = []
    for pos, (name, coef) in enumerate(terms):
        sign = "-" if coef < 0 else "+"
        mag = abs(coef)
        body = name if mag == 1.0 else f"{_num(mag)} {name}"
        if pos == 0:
            parts.append(body if sign == "+" else f"- {body}")
        else:
            parts.append(f"{sign} {body}")
    chunks = [
        " ".join(parts[k:k + TERMS_PER_LINE])
        for k in range(0, len(parts), TERMS_PER_LINE)
    ]
    return chunks or ["0"]


def export_lp(model: MilpModel) -> str:
    """
    CPLEX LP text for model.

    Rows are unnamed and written in model order; rows longer than
    TERMS_PER_LINE terms continue on indented lines. Numbers use 17
    significant digits so the text reproduces the model exactly.
    """
    lines = ["Minimize"]
    obj = _render_terms(model.objective)
    lines.append(f" obj: {obj[0]}")
    lines.extend(f"   {chunk}" for chunk in obj[1:])

    lines.append("Subject To")
    for row in model.constraints:
        chunks = _render_terms(row.terms)
        head = f"{row.name}: " if row.name else ""
        tail = f" {row.sense.value} {_num(row.rhs)}"
        if len(chunks) == 1:
            lines.append(f"{head}{chunks[0]}{tail}")
        else:
            lines.append(f"{head}{chunks[0]}")
            lines.extend(f"   {chunk}" for chunk in chunks[1:-1])
            lines.append(f"   {chunks[-1]}{tail}")

    lines.append("Bounds")
    for var in model.variables:
        if var.kind is VariableKind.BINARY:
            continue
        if var.upper is None:
            lines.append(f" {var.name} >= {_num(var.lower)}")
        else:
            lines.append(
                f" {_num(var.lower)} <= {var.name} <= {_num(var.upper)}"
            )

    binaries = [v.name for v in model.variables
                if v.kind is VariableKind.BINARY]
    if binaries:
        lines.append("Binaries")
        for k in range(0, len(binaries), TERMS_PER_LINE):
            lines.append(" " + " ".join(binaries[k:k + TERMS_PER_LINE]))
    lines.append("End")
    return "\n".join(lines) + "\n"


def _split_sections(text: str) -> Dict[str, List[str]]:
    sections: Dict[str, List[str]] = {}
    current = None
    for raw in text.splitlines():
        line = raw.split("\\", 1)[0].strip()
        if not line:
            continue
        key = _SECTIONS.get(line.lower())
        if key == "end":
            break
        if key is not None:
            current = key
            sections.setdefault(current, [])
            continue
        if current is None:
            raise ModelError(f"text before the first section: {line!r}")
        sections[current].append(line)
    return sections


def _parse_linear(tokens: List[str]) -> List[Tuple[str, float]]:
    terms = []
    sign, coef = 1.0, None
    for tok in tokens:
        if tok in "+-":
            sign = -1.0 if tok == "-" else 1.0
        elif _NUMBER.match(tok):
            coef = float(tok)
        else:
            terms.append((tok, sign * (1.0 if coef is None else coef)))
            sign, coef = 1.0, None
    return terms


def _tokenize(line: str) -> List[str]:
    line = re.sub(r"(<=|>=|=<|=>|=|<|>)", r" \1 ", line)
    line = re.sub(r"(?<![eE])([+-])", r" \1 ", line)
    return line.split()


def _normalize_sense(tok: str) -> Sense:
    if tok in ("=<", "<=", "<"):
        return Sense.LE
    if tok in ("=>", ">=", ">"):
        return Sense.GE
    return Sense.EQ


def read_lp(text: str) -> MilpModel:
    """
    Parse the LP subset written by export_lp back into a MilpModel.

    Variables come back as the bounded continuous ones in Bounds order
    followed by the binaries.
    """
    sections = _split_sections(text)
    obj_tokens = _tokenize(" ".join(sections.get("objective", [])))
    if obj_tokens and obj_tokens[0].endswith(":"):
        obj_tokens = obj_tokens[1:]
    objective = tuple(_parse_linear(obj_tokens))

    constraints = []
    pending: List[str] = []
    for line in sections.get("rows", []):
        pending.extend(_tokenize(line))
        sense_at = [k for k, t in enumerate(pending)
                    if t in ("<=", ">=", "=<", "=>", "=", "<", ">")]
        if not sense_at or sense_at[-1] == len(pending) - 1:
            continue
        k = sense_at[-1]
        name = None
        body = pending[:k]
        if body and body[0].endswith(":"):
            name, body = body[0][:-1], body[1:]
        rhs_tokens = pending[k + 1:]
        try:
            rhs = float("".join(rhs_tokens))
        except ValueError as e:
            raise ModelError(f"bad right-hand side {rhs_tokens}") from e
        constraints.append(Constraint(tuple(_parse_linear(body)),
                                      _normalize_sense(pending[k]), rhs, name))
        pending = []
    if pending:
        raise ModelError(f"unterminated row: {' '.join(pending)}")

    variables = []
    for line in sections.get("bounds", []):
        toks = _tokenize(line)
        joined = _join_signed(toks)
        if len(joined) == 5 and joined[1] in ("<=", "=<"):
            variables.append(Variable(joined[2], lower=float(joined[0]),
                                      upper=float(joined[4])))
        elif len(joined) == 3 and joined[1] in (">=", "=>"):
            variables.append(Variable(joined[0], lower=float(joined[2])))
        elif len(joined) == 3 and joined[1] in ("<=", "=<"):
            variables.append(Variable(joined[0], upper=float(joined[2])))
        elif len(joined) == 2 and joined[1].lower() == "free":
            variables.append(Variable(joined[0], lower=float("-inf")))
        else:
            raise ModelError(f"unsupported bound line {line!r}")
    for line in sections.get("binaries", []):
        variables.extend(Variable(name, VariableKind.BINARY, upper=1.0)
                         for name in line.split())

    return MilpModel(tuple(variables), tuple(constraints), objective)


def _join_signed(tokens: List[str]) -> List[str]:
    """Glue a lone sign token onto the number that follows it."""
    out: List[str] = []
    for tok in tokens:
        if out and out[-1] in ("+", "-") and _NUMBER.match(tok):
            out[-1] = out[-1] + tok
        else:
            out.append(tok)
    return out
