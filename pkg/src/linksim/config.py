"""TOML scenario-config reading and writing.

Reading uses the stdlib parser (tomllib, or tomli on 3.10).  Writing is a
small emitter restricted to the value shapes the scenario config uses:
scalars, lists, lists of pairs, and one level of nested tables.  A written
file reloads to an equal dict, so export -> load -> export is idempotent.
"""

from __future__ import annotations

from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:
    import tomli as tomllib


def load_config(path) -> dict:
    with open(path, "rb") as fh:
        return tomllib.load(fh)


def _fmt_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, str):
        return '"' + v.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_fmt_value(x) for x in v) + "]"
    if isinstance(v, dict):
        return "{" + ", ".join(f"{k} = {_fmt_value(x)}" for k, x in v.items()) + "}"
    raise TypeError(f"cannot serialize {type(v).__name__} to TOML")


def dump_config(cfg: dict, path) -> None:
    lines: list[str] = []
    for key, val in cfg.items():
        if not isinstance(val, dict):
            lines.append(f"{key} = {_fmt_value(val)}")
    for section, body in cfg.items():
        if not isinstance(body, dict):
            continue
        lines.append("")
        lines.append(f"[{section}]")
        for key, val in body.items():
            lines.append(f"{key} = {_fmt_value(val)}")
    Path(path).write_text("\n".join(lines) + "\n")
