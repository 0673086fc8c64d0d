import numpy as np
import pytest

from hoidet.types import BBox, Detection, PoseKeypoints


def random_box(rng, lo=0.0, hi=100.0, min_side=1.0):
    x1 = rng.uniform(lo, hi - min_side)
    y1 = rng.uniform(lo, hi - min_side)
    return BBox(x1, y1, x1 + rng.uniform(min_side, hi - x1), y1 + rng.uniform(min_side, hi - y1))


def det(box, score=0.9, class_id=1, is_human=False):
    return Detection(box=box, class_id=class_id, score=score, is_human=is_human)


def upright_pose(cx=50.0, top=10.0, height=80.0, conf=0.9):
    """Simple standing skeleton centered at cx spanning [top, top+height]."""
    w = 0.25 * height
    pts = np.zeros((17, 3))
    layout = {
        0: (0.0, 0.00),
        1: (-0.08, -0.02),
        2: (0.08, -0.02),
        3: (-0.16, 0.00),
        4: (0.16, 0.00),
        5: (-0.5, 0.15),
        6: (0.5, 0.15),
        7: (-0.62, 0.32),
        8: (0.62, 0.32),
        9: (-0.66, 0.50),
        10: (0.66, 0.50),
        11: (-0.3, 0.52),
        12: (0.3, 0.52),
        13: (-0.32, 0.75),
        14: (0.32, 0.75),
        15: (-0.33, 0.97),
        16: (0.33, 0.97),
    }
    for j, (fx, fy) in enumerate(layout.items()):
        dx, dy = layout[j]
        pts[j] = (cx + dx * w, top + dy * height, conf)
    return PoseKeypoints(pts)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
