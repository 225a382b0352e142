"""Static SVG renderings of barcodes, curves and dendrograms.

Output is plain text built from fixed-precision numbers so that the same
input always yields the same bytes.
"""

from __future__ import annotations

import math
from typing import Dict, List, Sequence, Tuple
from xml.sax.saxutils import escape

from .filtration import Direction
from .persistence import Barcode
from .phylo import Dendrogram, Node

WIDTH = 640
MARGIN_L = 60
MARGIN_R = 30
MARGIN_T = 40
MARGIN_B = 40
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def _f(x: float) -> str:
    s = f"{x:.2f}".rstrip("0").rstrip(".")
    return "0" if s == "-0" else s


def _doc(height: int, body: List[str], title: str) -> str:
    head = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" '
        f'viewBox="0 0 {WIDTH} {height}" font-family="sans-serif" font-size="11">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{height}" fill="white"/>',
    ]
    if title:
        head.append(f'<text x="{WIDTH // 2}" y="20" text-anchor="middle" font-size="13">{escape(title)}</text>')
    return "\n".join(head + body + ["</svg>"]) + "\n"


def _ticks(lo: float, hi: float, count: int = 5) -> List[float]:
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / count
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=10 * mag)
    first = math.ceil(lo / step) * step
    out = []
    t = first
    while t <= hi + 1e-9 * step:
        out.append(round(t, 10))
        t += step
    return out


class _Axis:
    def __init__(self, lo: float, hi: float, a: float, b: float):
        if hi == lo:
            hi = lo + 1
        self.lo, self.hi, self.a, self.b = lo, hi, a, b

    def __call__(self, v: float) -> float:
        return self.a + (v - self.lo) / (self.hi - self.lo) * (self.b - self.a)


def _x_axis(body: List[str], ax: _Axis, y: float, label: str) -> None:
    body.append(f'<line x1="{_f(ax.a)}" y1="{_f(y)}" x2="{_f(ax.b)}" y2="{_f(y)}" stroke="black"/>')
    for t in _ticks(min(ax.lo, ax.hi), max(ax.lo, ax.hi)):
        x = ax(t)
        body.append(f'<line x1="{_f(x)}" y1="{_f(y)}" x2="{_f(x)}" y2="{_f(y + 4)}" stroke="black"/>')
        body.append(f'<text x="{_f(x)}" y="{_f(y + 16)}" text-anchor="middle">{_f(t)}</text>')
    if label:
        body.append(f'<text x="{_f((ax.a + ax.b) / 2)}" y="{_f(y + 32)}" text-anchor="middle">{escape(label)}</text>')


def barcode_svg(B: Barcode, title: str = "", label: str = "parameter") -> str:
    """One horizontal bar per interval, grouped by dimension.

    Essential bars run to the far edge and end in an arrow head.  Decreasing
    filtrations are drawn with the parameter decreasing left to right.
    """
    bars = sorted(B.intervals, key=lambda iv: (iv.dim, B.key(iv.birth), B.key(iv.death)))
    finite = [float(v) for iv in bars for v in (iv.birth, iv.death) if not math.isinf(float(v))]
    lo, hi = (min(finite), max(finite)) if finite else (0.0, 1.0)
    if any(iv.essential for iv in bars):
        pad = max((hi - lo) * 0.1, 1.0)
        if B.direction is Direction.SUBLEVEL:
            hi += pad
        else:
            lo -= pad
    left, right = MARGIN_L, WIDTH - MARGIN_R
    ax = _Axis(lo, hi, left, right) if B.direction is Direction.SUBLEVEL else _Axis(hi, lo, left, right)
    row = 12
    gap = 10
    dims = sorted({iv.dim for iv in bars})
    body: List[str] = []
    y = MARGIN_T
    for d in dims:
        color = PALETTE[d % len(PALETTE)]
        body.append(f'<text x="8" y="{_f(y + 9)}" fill="{color}">H{d}</text>')
        for iv in (iv for iv in bars if iv.dim == d):
            x0 = ax(float(iv.birth))
            x1 = ax(ax.hi) if iv.essential else ax(float(iv.death))
            yc = y + row / 2
            body.append(
                f'<line x1="{_f(x0)}" y1="{_f(yc)}" x2="{_f(x1)}" y2="{_f(yc)}" stroke="{color}" stroke-width="4"/>'
            )
            if iv.essential:
                body.append(
                    f'<polygon points="{_f(x1)},{_f(yc - 4)} {_f(x1 + 6)},{_f(yc)} {_f(x1)},{_f(yc + 4)}" fill="{color}"/>'
                )
            y += row
        y += gap
    _x_axis(body, ax, y + 4, label)
    return _doc(int(y + MARGIN_B + 20), body, title)


def curves_svg(
    curves: Dict[str, Tuple[Sequence[float], Sequence[float]]],
    title: str = "",
    xlabel: str = "t",
    height: int = 360,
) -> str:
    """Step plot of named curves ``name -> (grid, values)``."""
    xs = [float(x) for g, _ in curves.values() for x in g]
    ys = [float(y) for _, v in curves.values() for y in v]
    x_lo, x_hi = (min(xs), max(xs)) if xs else (0.0, 1.0)
    y_lo, y_hi = (min(0.0, min(ys)), max(ys)) if ys else (0.0, 1.0)
    if y_hi <= y_lo:
        y_hi = y_lo + 1
    y_hi += (y_hi - y_lo) * 0.05
    ax = _Axis(x_lo, x_hi, MARGIN_L, WIDTH - MARGIN_R - 90)
    ay = _Axis(y_lo, y_hi, height - MARGIN_B - 20, MARGIN_T)
    body: List[str] = []
    body.append(f'<line x1="{_f(ax.a)}" y1="{_f(ay.b)}" x2="{_f(ax.a)}" y2="{_f(ay.a)}" stroke="black"/>')
    for t in _ticks(y_lo, y_hi):
        y = ay(t)
        body.append(f'<line x1="{_f(ax.a - 4)}" y1="{_f(y)}" x2="{_f(ax.a)}" y2="{_f(y)}" stroke="black"/>')
        body.append(f'<text x="{_f(ax.a - 6)}" y="{_f(y + 4)}" text-anchor="end">{_f(t)}</text>')
    for k, name in enumerate(sorted(curves)):
        grid, values = curves[name]
        color = PALETTE[k % len(PALETTE)]
        pts = []
        for i, (x, v) in enumerate(zip(grid, values)):
            px, py = ax(float(x)), ay(float(v))
            if i:
                pts.append(f"{_f(px)},{_f(prev)}")
            pts.append(f"{_f(px)},{_f(py)}")
            prev = py
        if pts:
            body.append(f'<polyline points="{" ".join(pts)}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        ly = MARGIN_T + 14 * k
        body.append(f'<line x1="{_f(ax.b + 10)}" y1="{_f(ly)}" x2="{_f(ax.b + 24)}" y2="{_f(ly)}" stroke="{color}" stroke-width="2"/>')
        body.append(f'<text x="{_f(ax.b + 28)}" y="{_f(ly + 4)}">{escape(name)}</text>')
    _x_axis(body, ax, ay.a, xlabel)
    return _doc(height, body, title)


def dendrogram_svg(T: Dendrogram, title: str = "") -> str:
    """Rectangular dendrogram with leaves on the right, height increasing leftwards."""
    leaves = T.root.leaves()
    row = 18
    height = MARGIN_T + row * len(leaves) + MARGIN_B + 20
    label_w = 8 + 7 * max(len(x) for x in leaves)
    ax = _Axis(T.root.height, 0.0, MARGIN_L, WIDTH - MARGIN_R - label_w)
    pos = {name: MARGIN_T + row * (i + 0.5) for i, name in enumerate(leaves)}
    body: List[str] = []

    def draw(node: Node) -> float:
        x = ax(node.height)
        if node.is_leaf:
            y = pos[node.name]
            body.append(f'<text x="{_f(x + 4)}" y="{_f(y + 4)}">{escape(node.name)}</text>')
            return y
        ys = []
        for c in node.children:
            yc = draw(c)
            body.append(f'<line x1="{_f(x)}" y1="{_f(yc)}" x2="{_f(ax(c.height))}" y2="{_f(yc)}" stroke="black"/>')
            ys.append(yc)
        body.append(f'<line x1="{_f(x)}" y1="{_f(min(ys))}" x2="{_f(x)}" y2="{_f(max(ys))}" stroke="black"/>')
        return (min(ys) + max(ys)) / 2

    draw(T.root)
    _x_axis(body, ax, height - MARGIN_B - 10, "height")
    return _doc(height, body, title)
