import numpy as np
import pytest

from fracnls import Field, NonlinearitySpec, PotentialSpec, ProblemSpec, TorusGrid

_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): acceptance criterion")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    props = dict(report.user_properties)
    if "criterion" not in props:
        return
    num = props["criterion"]
    entry = _CRITERIA.setdefault(num, {"title": props.get("title", ""), "ok": True, "details": []})
    entry["ok"] = entry["ok"] and report.outcome == "passed"
    if props.get("detail"):
        entry["details"].append(props["detail"])


@pytest.fixture(autouse=True)
def _tag_criterion(request, record_property):
    m = request.node.get_closest_marker("acceptance")
    if m is not None:
        record_property("criterion", m.args[0])
        record_property("title", m.args[1])


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for num in sorted(_CRITERIA):
        e = _CRITERIA[num]
        status = "PASS" if e["ok"] else "FAIL"
        extra = "; ".join(e["details"])
        tr.write_line(f"criterion {num:2d}  {status}  {e['title']}" + (f"  [{extra}]" if extra else ""))


# --- shared builders --------------------------------------------------------------------


def gaussian(grid, width=1.0, center=None, amp=1.0):
    c = center if center is not None else (0.0,) * grid.dim
    r2 = sum((x - ci) ** 2 for x, ci in zip(grid.coords, c))
    return Field(grid, amp * np.exp(-np.broadcast_to(r2, grid.shape) / (2.0 * width**2)))


def random_bumps(grid, rng, n_bumps=3, spread=2.0, widths=(0.6, 1.5), signed=True):
    """Sum of a few randomly placed Gaussians; smooth and well localized."""
    out = np.zeros(grid.shape)
    for _ in range(n_bumps):
        c = rng.uniform(-spread, spread, grid.dim)
        w = rng.uniform(*widths)
        a = rng.uniform(0.3, 1.5) * (rng.choice([-1.0, 1.0]) if signed else 1.0)
        r2 = sum((x - ci) ** 2 for x, ci in zip(grid.coords, c))
        out = out + a * np.exp(-np.broadcast_to(r2, grid.shape) / (2.0 * w * w))
    return Field(grid, out)


def simple_spec(grid, alpha=0.5, p=3.5, q=2.5, V=1.0, K=0.0, kind="periodic", v_loc=0.0, mu=0.0, coercive=None):
    pot = PotentialSpec(kind=kind, v_per=V, v_loc=v_loc, coercive=coercive, mu=mu)
    return ProblemSpec(grid, alpha, pot, NonlinearitySpec(p, q, 1.0, K))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def grid1():
    return TorusGrid(1, 20.0, 128)
