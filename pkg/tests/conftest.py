import numpy as np
import pytest

from curriculum_augment.imageio import encode_png

_CRITERIA = {}


@pytest.fixture
def make_image():
    """Random uint8 RGB image factory, seeded per call."""

    def factory(width, height, seed=0):
        return np.random.default_rng(seed).integers(0, 256, (height, width, 3), dtype=np.uint8)

    return factory


@pytest.fixture
def png_file(tmp_path, make_image):
    def factory(width=64, height=64, seed=0, name="img.png"):
        path = tmp_path / name
        encode_png(make_image(width, height, seed), path)
        return path

    return factory


@pytest.fixture
def dataset(tmp_path, make_image):
    """Write ``n`` PNGs plus a manifest; returns the manifest path."""

    def factory(n=12, width=40, height=36, n_classes=3, name="data"):
        root = tmp_path / name
        lines = [f"#classes={n_classes}", "path,label"]
        for i in range(n):
            rel = f"class_{i % n_classes}/img_{i:04d}.png"
            encode_png(make_image(width, height, seed=1000 + i), root / rel)
            lines.append(f"{rel},{i % n_classes}")
        manifest = root / "manifest.csv"
        manifest.write_text("\n".join(lines) + "\n")
        return manifest

    return factory


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if report.when == "call" or (report.when == "setup" and not report.passed):
        for marker in item.iter_markers("criterion"):
            number, title = marker.args
            _CRITERIA[number] = (title, report.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        title, outcome = _CRITERIA[number]
        verdict = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"[{verdict}] criterion {number:>2}: {title}")
