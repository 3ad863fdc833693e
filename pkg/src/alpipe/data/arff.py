"""Dense ARFF parsing and serialization.

Supports the classification-relevant subset: @relation, @attribute with
numeric/real/integer or nominal {a,b,...} types, dense @data rows, '?' for
missing, % comments. Sparse rows and string/date attributes are rejected.
"""

import re

from alpipe.errors import ParseError
from alpipe.data.tables import Column, RawTable

_NOMINAL_RE = re.compile(r"^\{(.*)\}$", re.S)


def _unquote(token):
    token = token.strip()
    if len(token) >= 2 and token[0] == token[-1] and token[0] in "'\"":
        return token[1:-1]
    return token


def _split_csv_line(line):
    """Split a data/category line on commas, honoring single/double quotes."""
    out, buf, quote = [], [], None
    for ch in line:
        if quote:
            buf.append(ch)
            if ch == quote:
                quote = None
        elif ch in "'\"":
            quote = ch
            buf.append(ch)
        elif ch == ",":
            out.append("".join(buf))
            buf = []
        else:
            buf.append(ch)
    out.append("".join(buf))
    return out


def parse_arff(text: str) -> RawTable:
    relation = ""
    columns = []
    in_data = False
    lineno = 0
    for raw in text.splitlines():
        lineno += 1
        line = raw.strip()
        if not line or line.startswith("%"):
            continue
        if not in_data:
            lower = line.lower()
            if lower.startswith("@relation"):
                relation = _unquote(line[len("@relation"):].strip())
            elif lower.startswith("@attribute"):
                rest = line[len("@attribute"):].strip()
                if rest.startswith(("'", '"')):
                    quote = rest[0]
                    end = rest.index(quote, 1)
                    name = rest[1:end]
                    typespec = rest[end + 1:].strip()
                else:
                    parts = rest.split(None, 1)
                    if len(parts) != 2:
                        raise ParseError("malformed @attribute", lineno)
                    name, typespec = parts
                m = _NOMINAL_RE.match(typespec)
                if m:
                    cats = tuple(_unquote(t) for t in _split_csv_line(m.group(1)))
                    columns.append(Column(name, "nominal", [], categories=cats))
                elif typespec.lower() in ("numeric", "real", "integer"):
                    columns.append(Column(name, "numeric", []))
                else:
                    raise ParseError(
                        f"unsupported attribute type {typespec!r}", lineno
                    )
            elif lower.startswith("@data"):
                if not columns:
                    raise ParseError("@data before any @attribute", lineno)
                in_data = True
            else:
                raise ParseError(f"unrecognized declaration {line!r}", lineno)
            continue

        if line.startswith("{"):
            raise ParseError("sparse ARFF rows are not supported", lineno)
        cells = [_unquote(t) for t in _split_csv_line(line)]
        if len(cells) != len(columns):
            raise ParseError(
                f"row has {len(cells)} values, expected {len(columns)}", lineno
            )
        for col, cell in zip(columns, cells):
            if cell == "?":
                col.values.append(None)
            elif col.kind == "numeric":
                try:
                    col.values.append(float(cell))
                except ValueError:
                    raise ParseError(f"bad numeric value {cell!r}", lineno)
            else:
                if cell not in col.categories:
                    raise ParseError(
                        f"undeclared nominal value {cell!r} in {col.name!r}",
                        lineno,
                    )
                col.values.append(cell)

    if not columns:
        raise ParseError("no @attribute declarations found", lineno or 1)
    target = columns[-1].name
    return RawTable(name=relation, columns=columns, target_column=target)


def _format_number(v: float) -> str:
    if v == int(v) and abs(v) < 1e15:
        return str(int(v))
    return repr(v)


def _quote_if_needed(token: str) -> str:
    if token == "" or any(ch in token for ch in " ,{}%'\""):
        return "'" + token + "'"
    return token


def serialize_arff(table: RawTable) -> str:
    lines = [f"@relation {_quote_if_needed(table.name or 'table')}"]
    for col in table.columns:
        if col.kind == "numeric":
            lines.append(f"@attribute {_quote_if_needed(col.name)} numeric")
        else:
            cats = ",".join(_quote_if_needed(c) for c in col.categories)
            lines.append(f"@attribute {_quote_if_needed(col.name)} {{{cats}}}")
    lines.append("@data")
    for i in range(table.n_rows):
        cells = []
        for col in table.columns:
            v = col.values[i]
            if v is None:
                cells.append("?")
            elif col.kind == "numeric":
                cells.append(_format_number(v))
            else:
                cells.append(_quote_if_needed(v))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"
