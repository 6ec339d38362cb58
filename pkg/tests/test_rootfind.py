import math

import numpy as np
import pytest

from eqarea.errors import BracketingFailure
from eqarea.rootfind import bisect, scan_roots


def test_bisect_simple():
    root = bisect(lambda x: x * x - 2.0, 0.0, 2.0)
    assert root == pytest.approx(math.sqrt(2.0), abs=1e-14)


def test_bisect_needs_sign_change():
    with pytest.raises(BracketingFailure):
        bisect(lambda x: x * x + 1.0, -1.0, 1.0)


def test_scan_finds_all_roots():
    roots = scan_roots(lambda x: np.sin(x), 0.5, 10.0)
    assert roots == pytest.approx([math.pi, 2 * math.pi, 3 * math.pi], abs=1e-12)


def test_scan_excludes_endpoint_zeros():
    roots = scan_roots(lambda x: np.sin(x), 0.0, math.pi)
    assert roots == []


def test_scan_osculation_detection():
    # (x - 1)^2 touches zero without crossing; the interval is chosen so the
    # double root falls between grid points
    with pytest.raises(BracketingFailure):
        scan_roots(lambda x: (x - 1.0) ** 2, 0.0, 2.1, osculation_tol=1e-6)


def test_scan_reports_exact_double_root_on_grid():
    # when the osculating zero lands exactly on a grid point it is a root
    roots = scan_roots(lambda x: (x - 1.0) ** 2, 0.0, 2.0, osculation_tol=1e-6)
    assert roots == [1.0]


def test_scan_root_on_grid_point():
    roots = scan_roots(lambda x: x - 1.0, 0.0, 2.0, cells=4)
    assert roots == pytest.approx([1.0], abs=0.0)
