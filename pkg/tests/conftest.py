import importlib
import re

import pytest

from thzturb import _kernels_py

try:
    _compiled = importlib.import_module("thzturb._kernels")
except ImportError:  # extension not built
    _compiled = None

BACKENDS = {"python": _kernels_py}
if _compiled is not None:
    BACKENDS["cython"] = _compiled


@pytest.fixture(params=sorted(BACKENDS))
def backend(request):
    """Each kernel implementation in turn."""
    return BACKENDS[request.param]


@pytest.fixture
def pure_python(monkeypatch):
    """Route the package-level kernels through the numpy fallback."""
    from thzturb import kernels

    monkeypatch.setattr(kernels, "mie_ab", _kernels_py.mie_ab)
    monkeypatch.setattr(kernels, "losc_pair_sum", _kernels_py.losc_pair_sum)
    return kernels


def _natural(item):
    m = re.match(r"(\d+)(.*)", item[0])
    return (int(m.group(1)), m.group(2)) if m else (10**6, item[0])


def pytest_terminal_summary(terminalreporter):
    lines = []
    for outcome in ("passed", "failed"):
        for rep in terminalreporter.stats.get(outcome, []):
            if rep.when != "call":
                continue
            props = dict(rep.user_properties)
            if "criterion" in props:
                lines.append((props["criterion"], "PASS" if outcome == "passed" else "FAIL", props.get("detail", "")))
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for crit, status, detail in sorted(lines, key=_natural):
        terminalreporter.write_line(f"criterion {crit}: {status}  {detail}")
