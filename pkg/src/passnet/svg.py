"""Minimal standalone SVG 1.1 charts: pie, bar and grayscale heatmap."""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

import numpy as np

from .evaluation import FigureData

PALETTE = ("red", "orange", "blue", "green", "grey")


def _doc(width: int, height: int, body: list[str], title: str) -> str:
    head = (f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
            f'width="{width}" height="{height}" viewBox="0 0 {width} {height}">')
    parts = [head, f"<title>{escape(title)}</title>"] + body + ["</svg>"]
    return "\n".join(parts) + "\n"


def _num(x: float) -> str:
    return f"{x:.3f}"


def pie_svg(fig: FigureData, size: int = 240) -> str:
    r = size * 0.4
    cx = cy = size / 2
    body = []
    angle = -math.pi / 2
    total = sum(v for _, v in fig.rows) or 1.0
    for k, (label, value) in enumerate(fig.rows):
        share = value / total
        color = PALETTE[k % len(PALETTE)]
        tip = f"<title>{escape(str(label))}: {share:.4f}</title>"
        if share <= 0:
            continue
        if share >= 1.0 - 1e-12:
            body.append(f'<circle cx="{_num(cx)}" cy="{_num(cy)}" r="{_num(r)}" fill="{color}">{tip}</circle>')
            angle += 2 * math.pi
            continue
        end = angle + 2 * math.pi * share
        x0, y0 = cx + r * math.cos(angle), cy + r * math.sin(angle)
        x1, y1 = cx + r * math.cos(end), cy + r * math.sin(end)
        large = 1 if share > 0.5 else 0
        d = (f"M {_num(cx)} {_num(cy)} L {_num(x0)} {_num(y0)} "
             f"A {_num(r)} {_num(r)} 0 {large} 1 {_num(x1)} {_num(y1)} Z")
        body.append(f'<path d="{d}" fill="{color}" stroke="white">{tip}</path>')
        angle = end
    legend_y = 14
    for k, (label, value) in enumerate(fig.rows):
        body.append(f'<text x="4" y="{legend_y + 14 * k}" font-size="11" '
                    f'fill="{PALETTE[k % len(PALETTE)]}">{escape(str(label))}: {value:.3f}</text>')
    return _doc(size, size, body, fig.title)


def bar_svg(fig: FigureData, bar_width: int = 28, height: int = 200) -> str:
    pad = 24
    n = len(fig.rows)
    width = pad * 2 + bar_width * n
    top = max((v for _, v in fig.rows), default=0.0)
    scale = (height - 2 * pad) / top if top > 0 else 0.0
    base = height - pad
    body = [f'<line x1="{pad}" y1="{base}" x2="{width - pad}" y2="{base}" stroke="black"/>']
    for k, (label, value) in enumerate(fig.rows):
        h = value * scale
        x = pad + k * bar_width
        body.append(f'<rect x="{x + 2}" y="{_num(base - h)}" width="{bar_width - 4}" '
                    f'height="{_num(h)}" fill="steelblue"><title>{escape(str(label))}: '
                    f'{value:.4f}</title></rect>')
        body.append(f'<text x="{x + bar_width / 2:.1f}" y="{base + 14}" font-size="10" '
                    f'text-anchor="middle">{escape(str(label))}</text>')
    return _doc(width, height, body, fig.title)


def heatmap_svg(grid, labels, cell: int = 20, title: str = "") -> str:
    """Grayscale cells; higher probability is lighter."""
    grid = np.clip(np.asarray(grid, dtype=float), 0.0, 1.0)
    m = grid.shape[0]
    pad = 24
    size = pad + m * cell
    body = []
    for j, label in enumerate(labels):
        body.append(f'<text x="{pad + j * cell + cell / 2:.1f}" y="16" font-size="10" '
                    f'text-anchor="middle">{escape(label)}</text>')
    for i, label in enumerate(labels):
        body.append(f'<text x="4" y="{pad + i * cell + cell * 0.7:.1f}" font-size="10">{escape(label)}</text>')
        for j in range(grid.shape[1]):
            level = int(round(255 * grid[i, j]))
            body.append(f'<rect x="{pad + j * cell}" y="{pad + i * cell}" width="{cell}" '
                        f'height="{cell}" fill="rgb({level},{level},{level})"/>')
    return _doc(size, size, body, title)
