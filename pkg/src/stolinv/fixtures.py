"""Reference polynomials stored as small ``key: value`` text files.

Each ``*.poly`` file holds one published quantity in the canonical polynomial
text form.  Lines starting with ``#`` are comments; a line starting with
whitespace continues the previous value.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .exact import parse_rational
from .multipoly import MultiPoly, parse_poly

BUILTIN = "builtin"

REQUIRED = (
    "C2", "C4", "t_binding", "C6", "R_binding", "C8", "C10", "C12",
    "R8_10", "P8_10", "refutation",
)


class FixtureError(ValueError):
    pass


@dataclass
class Fixture:
    name: str
    fields: dict
    path: str = ""
    comments: list = field(default_factory=list)

    @property
    def vars(self) -> tuple:
        return tuple(self.fields["vars"].split())

    def poly(self, key: str, vars=None) -> MultiPoly:
        try:
            return parse_poly(self.fields[key], vars or self.vars)
        except KeyError:
            raise FixtureError(f"fixture {self.name!r} has no {key!r} field") from None
        except ValueError as exc:
            raise FixtureError(f"fixture {self.name!r} field {key!r}: {exc}") from None

    def rational(self, key: str):
        try:
            return parse_rational(self.fields[key])
        except (KeyError, ValueError) as exc:
            raise FixtureError(f"fixture {self.name!r} field {key!r}: {exc}") from None

    def monomial(self, key: str = "monomial") -> tuple:
        """Signed exponent vector from text like ``w^-3*v^-2`` (``1`` for none)."""
        text = self.fields.get(key, "1").strip()
        exps = dict.fromkeys(self.vars, 0)
        if text == "1":
            return tuple(exps.values())
        for factor in text.split("*"):
            name, _, e = factor.strip().partition("^")
            if name not in exps:
                raise FixtureError(f"fixture {self.name!r}: unknown variable {name!r} in {key}")
            exps[name] += int(e) if e else 1
        return tuple(exps.values())

    def monomial_list(self, key: str, vars=None) -> list:
        """Comma separated monomials as exponent tuples, or ``["overall"]``."""
        text = self.fields.get(key, "").strip()
        if not text:
            return []
        out = []
        for item in text.split(","):
            item = item.strip()
            if item == "overall":
                out.append("overall")
            else:
                m = parse_poly(item, vars or self.vars)
                (exps, _), = m.items()
                out.append(exps)
        return out

    def get(self, key, default=None):
        return self.fields.get(key, default)


def parse_fixture(text: str, name: str = "?", path: str = "") -> Fixture:
    fields: dict = {}
    comments = []
    last = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        if not raw.strip():
            continue
        if raw.lstrip().startswith("#"):
            comments.append(raw.lstrip()[1:].strip())
            continue
        if raw[0].isspace():
            if last is None:
                raise FixtureError(f"{name}:{lineno}: continuation line without a key")
            fields[last] += " " + raw.strip()
            continue
        key, sep, value = raw.partition(":")
        if not sep:
            raise FixtureError(f"{name}:{lineno}: expected 'key: value'")
        last = key.strip()
        fields[last] = value.strip()
    return Fixture(fields.get("name", name), fields, path, comments)


def load_fixtures(directory: str | Path | None = None) -> dict:
    """Load every required fixture from ``directory`` (default: bundled set)."""
    out = {}
    if directory in (None, BUILTIN):
        base = resources.files("stolinv") / "fixtures"
        for name in REQUIRED:
            res = base / f"{name}.poly"
            out[name] = parse_fixture(res.read_text(), name, f"{BUILTIN}/{name}.poly")
        return out
    directory = Path(directory)
    for name in REQUIRED:
        path = directory / f"{name}.poly"
        if not path.is_file():
            raise FixtureError(f"missing fixture file {path}")
        out[name] = parse_fixture(path.read_text(), name, str(path))
    return out
