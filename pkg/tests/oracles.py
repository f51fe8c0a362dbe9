"""Slow, obviously-correct reference implementations used as test oracles."""

import numpy as np


def bisect_recursive(x, y, w, h, n, vertical=True):
    """Literal recursive alternating bisection; returns (x, y, w, h) tuples."""
    if n == 1:
        return [(x, y, w, h)]
    if vertical:
        left = (w + 1) // 2
        return (bisect_recursive(x, y, left, h, n // 2, False)
                + bisect_recursive(x + left, y, w - left, h, n // 2, False))
    top = (h + 1) // 2
    return (bisect_recursive(x, y, w, top, n // 2, True)
            + bisect_recursive(x, y + top, w, h - top, n // 2, True))


def coverage_violations(box, rects):
    """Count pixels of ``box`` covered != 1 times plus pixels outside it."""
    bx, by, bw, bh = box
    counts = np.zeros((by + bh + 1, bx + bw + 1), dtype=np.int64)
    outside = 0
    for x, y, w, h in rects:
        if w < 1 or h < 1:
            return float("inf")
        for yy in range(y, y + h):
            for xx in range(x, x + w):
                if bx <= xx < bx + bw and by <= yy < by + bh:
                    counts[yy, xx] += 1
                else:
                    outside += 1
    inside = counts[by:by + bh, bx:bx + bw]
    return int(np.count_nonzero(inside != 1)) + outside


def pixels_changed_outside(before, after, rect):
    mask = np.ones(before.shape[:2], dtype=bool)
    mask[rect.y:rect.y + rect.h, rect.x:rect.x + rect.w] = False
    return int(np.count_nonzero(np.any(before[mask] != after[mask], axis=-1)))


def distinct_colors(img, rect):
    patch = img[rect.y:rect.y + rect.h, rect.x:rect.x + rect.w].reshape(-1, 3)
    return len({tuple(p) for p in patch.tolist()})


def ks_uniform(samples):
    """Kolmogorov-Smirnov distance between ``samples`` and U(0, 1)."""
    x = np.sort(np.asarray(samples))
    n = len(x)
    upper = np.arange(1, n + 1) / n - x
    lower = x - np.arange(0, n) / n
    return float(max(upper.max(), lower.max()))


def tree_bytes(directory, skip=("summary.json",)):
    """Relative path -> file bytes for every file under ``directory``."""
    return {
        p.relative_to(directory).as_posix(): p.read_bytes()
        for p in sorted(directory.rglob("*"))
        if p.is_file() and p.name not in skip
    }
