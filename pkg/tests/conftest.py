import numpy as np
import pytest

from plasmon_emit import EmitterSpec, SpectralDensityModel, SphereSpec, build_enhancement_table

QD_TAU0 = 4.0e6
JAGR_TAU0 = 7.0e4
BAND_GRID = np.linspace(3.5, 4.5, 2001)


@pytest.fixture(scope="session")
def band_tables():
    """Band tables at the distances used by the figure scenarios."""
    cache = {}

    def get(distance):
        if distance not in cache:
            cache[distance] = build_enhancement_table(SphereSpec(), BAND_GRID, [distance])
        return cache[distance]

    return get


@pytest.fixture(scope="session")
def make_model(band_tables):
    def make(omega0, tau0, distance, dipole_config="v_circular", init=(1, 0), fca=False):
        emitter = EmitterSpec(omega0, tau0, dipole_config, init)
        return SpectralDensityModel(emitter, band_tables(distance), distance, fca=fca)

    return make


# -- acceptance reporting ---------------------------------------------------

_criteria = {}


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    crit = dict(report.user_properties).get("criterion")
    if crit is None:
        return
    ok = report.passed
    _criteria.setdefault(crit, []).append((report.nodeid, ok))


def pytest_runtest_setup(item):
    marker = item.get_closest_marker("criterion")
    if marker is not None:
        item.user_properties.append(("criterion", marker.args[0]))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for crit in sorted(_criteria):
        results = _criteria[crit]
        failed = [nid.split("::")[-1] for nid, ok in results if not ok]
        status = "PASS" if not failed else "FAIL"
        detail = f" ({', '.join(failed)})" if failed else ""
        tr.write_line(f"criterion {crit:>2}: {status} [{len(results) - len(failed)}/{len(results)}]{detail}")
