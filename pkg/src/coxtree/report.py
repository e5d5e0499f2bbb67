"""Plain-text reports: a schema header, the resolved config, then sections of ``key: value`` lines.

Layout::

    coxtree-report: <schema>
    version: <package version>
    command: <name>
    config.<key>: <value>
    ...

    [section]
    key: value
    check.<name>: pass | fail

Floats are printed with 12 significant digits, so identical runs give identical bytes.
"""

from __future__ import annotations

from fractions import Fraction

from . import __version__

SCHEMA = 1


def fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return "none"
    if isinstance(value, float):
        return format(value, ".12g")
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, tuple):
        return "(" + ",".join(fmt(v) for v in value) + ")"
    if isinstance(value, (list, set, frozenset)):
        return "[" + ", ".join(fmt(v) for v in value) + "]"
    return str(value)


class Report:
    def __init__(self, command: str, config: dict):
        self.command = command
        self.config = dict(config)
        self.sections: list[tuple[str, list[tuple[str, str]]]] = []
        self.failures: list[str] = []

    def section(self, name: str) -> "Report":
        self.sections.append((name, []))
        return self

    def add(self, key: str, value) -> None:
        if not self.sections:
            self.section(self.command)
        self.sections[-1][1].append((key, fmt(value)))

    def lines(self, key: str, text: str) -> None:
        """A multi-line value, one ``key: line`` per line."""
        for line in text.splitlines():
            self.add(key, line)

    def check(self, name: str, ok: bool) -> bool:
        self.add(f"check.{name}", "pass" if ok else "fail")
        if not ok:
            self.failures.append(name)
        return ok

    @property
    def ok(self) -> bool:
        return not self.failures

    def render(self) -> str:
        out = [f"coxtree-report: {SCHEMA}", f"version: {__version__}", f"command: {self.command}"]
        out += [f"config.{k}: {fmt(v)}" for k, v in self.config.items()]
        for name, rows in self.sections:
            out.append("")
            out.append(f"[{name}]")
            out += [f"{k}: {v}" for k, v in rows]
        out.append("")
        out.append(f"status: {'pass' if self.ok else 'fail'}")
        return "\n".join(out) + "\n"
