import os
import sys
from functools import lru_cache

from hypothesis import HealthCheck, settings

settings.register_profile(
    "suite", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow], derandomize=True
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "suite"))

sys.path.insert(0, os.path.dirname(__file__))


@lru_cache(maxsize=None)
def family_groups(key):
    """Built representatives of a catalog family, keyed by name; unbuildable ones map to None."""
    from rootcryst.invariants import case_family, catalog_status, parse_family_key

    fam = case_family(*parse_family_key(key))
    return fam, {name: W for name, W, _ in catalog_status(fam)}


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    results = getattr(module, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        parts = results[n]
        status = "PASS" if all(ok for ok, _ in parts) else "FAIL"
        terminalreporter.write_line(f"{status} criterion {n}: " + " | ".join(text for _, text in parts))
