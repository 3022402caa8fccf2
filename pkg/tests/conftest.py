import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from rsma_sop import presets  # noqa: E402


@pytest.fixture(scope="session")
def fig2():
    """Fig. 2 base configurations keyed by scenario letter (a = I ... d = IV)."""
    out = {}
    for key in "abcd":
        run = presets.load_preset(f"fig2{key}")
        out[key] = (run.system, run.eve_layout())
    return out
