from __future__ import annotations

import subprocess
import textwrap
from pathlib import Path

import pytest

FIXTURES = Path(__file__).parent / "fixtures"

MAIN_V1 = """\
def run(a):
    return a + 1
"""

MAIN_V2 = """\
def run(a):
    return a + 1


def choose(a, b):
    if a:
        return a
    return b
"""

UTIL_V1 = """\
def scale(values, factor):
    out = []
    for v in values:
        out.append(v * factor)
    return out
"""

UTIL_V2 = UTIL_V1 + """\


def clamp(v, lo, hi):
    if v < lo:
        return lo
    if v > hi:
        return hi
    return v
"""

_HANDLER_OPS = ["+", "-", "*", "/", "//", "%", "**", "&", "|", "^", ">>", "<<", "+", "-"]


def handler_source(name: str, var: str) -> str:
    lines = [f"def {name}(code, {var}):"]
    for i, op in enumerate(_HANDLER_OPS, start=1):
        lines.append(f"    if code == {i}:")
        lines.append(f"        {var} = {var} {op} {i}")
    lines.append(f"    return {var}")
    return "\n".join(lines) + "\n"


SLOP = handler_source("handle_alpha", "x") + "\n\n" + handler_source("handle_beta", "y")

# (files after the commit, committer date)
HISTORY_COMMITS = [
    ({"main.py": MAIN_V1}, "2023-05-10T10:00:00+00:00"),
    ({"main.py": MAIN_V2}, "2023-08-15T10:00:00+00:00"),
    ({"main.py": MAIN_V2, "util.py": UTIL_V1}, "2023-11-20T10:00:00+00:00"),
    ({"main.py": MAIN_V2, "util.py": UTIL_V2}, "2024-02-25T10:00:00+00:00"),
    ({"main.py": MAIN_V2, "util.py": UTIL_V2, "slop.py": SLOP}, "2024-06-30T10:00:00+00:00"),
]


def _git(repo: Path, *args: str, env: dict | None = None) -> None:
    subprocess.run(["git", "-C", str(repo), *args], check=True, capture_output=True, env=env)


def build_history_repo(dest: Path, commits=None) -> Path:
    """A deterministic git repository with the crafted commit sequence."""
    import os

    dest.mkdir(parents=True, exist_ok=True)
    _git(dest, "init", "-q", "-b", "main")
    _git(dest, "config", "user.email", "fixtures@example.com")
    _git(dest, "config", "user.name", "Fixture Builder")
    for i, (files, when) in enumerate(commits or HISTORY_COMMITS):
        for existing in dest.glob("*.py"):
            existing.unlink()
        for name, text in files.items():
            (dest / name).write_text(text, encoding="utf-8")
        _git(dest, "add", "-A")
        env = dict(os.environ, GIT_AUTHOR_DATE=when, GIT_COMMITTER_DATE=when)
        _git(dest, "commit", "-q", "-m", f"checkpoint {i + 1}", env=env)
    return dest


@pytest.fixture(scope="session")
def history_repo(tmp_path_factory) -> Path:
    return build_history_repo(tmp_path_factory.mktemp("histrepo"))


@pytest.fixture(scope="session")
def cc_corpus() -> Path:
    return FIXTURES / "cc_corpus"


def write_tree(root: Path, files: dict[str, str]) -> Path:
    for rel, text in files.items():
        path = root / rel
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(textwrap.dedent(text), encoding="utf-8")
    return root
