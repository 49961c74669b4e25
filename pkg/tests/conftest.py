import numpy as np
import pytest

from fsevideo.synth import SequenceSpec, textured_image


@pytest.fixture
def texture():
    """128x128 uint8 band-limited texture."""
    return np.floor(textured_image(128, 128, seed=11) + 0.5).astype(np.uint8)


@pytest.fixture
def ramp4():
    return np.arange(16, dtype=np.uint8).reshape(4, 4) * 10


def shifted(image, dm, dn, size):
    """Crop of ``image`` moved by (dm, dn): out[m, n] = image[m - dm + o, n - dn + o]."""
    o = 20
    return image[o - dm:o - dm + size, o - dn:o - dn + size].copy()


@pytest.fixture
def translate_spec():
    return SequenceSpec(kind="translate", rate=(1, 0), frames=6, height=64, width=64, seed=4)


ACCEPTANCE_LINES = []


@pytest.fixture
def criterion():
    """Record a pass/fail line for the terminal summary, then assert."""
    def check(name, ok, detail=""):
        ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
        assert ok, f"{name}: {detail}"
    return check


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
