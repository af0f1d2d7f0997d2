"""Static SVG training curves, one file per split.

Loss is drawn as a dotted blue line and accuracy as a solid red line, both
against epoch on a shared x-axis. Each series is scaled to its own vertical
range; the exact data values are stored on the ``<polyline>`` as ``data-*``
attributes so :func:`read_series` can recover them from the file.
"""
from __future__ import annotations

import xml.etree.ElementTree as ET
from pathlib import Path

from .metrics import by_split, read_metrics

SVG_NS = "http://www.w3.org/2000/svg"
WIDTH, HEIGHT = 640, 400
MARGIN = 50
STYLES = {
    "loss": {"stroke": "blue", "stroke-dasharray": "2,3"},
    "accuracy": {"stroke": "red"},
}


def _scale(values, lo, hi, out_lo, out_hi):
    span = hi - lo
    if span == 0:
        return [0.5 * (out_lo + out_hi)] * len(values)
    return [out_lo + (v - lo) / span * (out_hi - out_lo) for v in values]


def _svg_for(split: str, rows) -> ET.Element:
    epochs = [r.epoch for r in rows]
    root = ET.Element("svg", {
        "xmlns": SVG_NS, "width": str(WIDTH), "height": str(HEIGHT),
        "viewBox": f"0 0 {WIDTH} {HEIGHT}", "data-split": split,
    })
    ET.SubElement(root, "title").text = f"{split}: loss and accuracy per epoch"
    x0, x1 = MARGIN, WIDTH - MARGIN
    y0, y1 = HEIGHT - MARGIN, MARGIN  # svg y grows downward
    ET.SubElement(root, "line", {"x1": str(x0), "y1": str(y0), "x2": str(x1), "y2": str(y0),
                                 "stroke": "black"})
    ET.SubElement(root, "line", {"x1": str(x0), "y1": str(y0), "x2": str(x0), "y2": str(y1),
                                 "stroke": "black"})
    label = ET.SubElement(root, "text", {"x": str((x0 + x1) // 2), "y": str(HEIGHT - 12),
                                         "text-anchor": "middle"})
    label.text = f"epoch ({epochs[0]} to {epochs[-1]})"
    xs = _scale(epochs, epochs[0], epochs[-1], x0, x1)
    for i, name in enumerate(("loss", "accuracy")):
        values = [getattr(r, name) for r in rows]
        lo, hi = min(values), max(values)
        ys = _scale(values, lo, hi, y0, y1)
        attrs = {
            "fill": "none", "stroke-width": "1.5", "data-series": name,
            "data-epochs": " ".join(str(e) for e in epochs),
            "data-values": " ".join(repr(float(v)) for v in values),
            "data-y-min": repr(float(lo)), "data-y-max": repr(float(hi)),
            "points": " ".join(f"{x:.2f},{y:.2f}" for x, y in zip(xs, ys)),
            **STYLES[name],
        }
        ET.SubElement(root, "polyline", attrs)
        legend = ET.SubElement(root, "text", {"x": str(x1 - 120), "y": str(y1 + 16 * i),
                                              "fill": STYLES[name]["stroke"]})
        legend.text = f"{name} [{lo:.3g}, {hi:.3g}]"
    return root


def emit_plot(metrics_csv, out) -> list[Path]:
    """Write ``<stem>-<split>.svg`` next to ``out`` for every split present.

    ``out`` may be a directory or an ``.svg`` path whose stem is reused. The
    CSV is fully validated before anything is written.
    """
    groups = by_split(read_metrics(metrics_csv))
    out = Path(out)
    if out.suffix.lower() == ".svg":
        folder, stem = out.parent, out.stem
    else:
        folder, stem = out, Path(metrics_csv).stem
    trees = {split: ET.ElementTree(_svg_for(split, rows)) for split, rows in groups.items() if rows}
    folder.mkdir(parents=True, exist_ok=True)
    paths = []
    for split, tree in trees.items():
        path = folder / f"{stem}-{split}.svg"
        tree.write(path, encoding="utf-8", xml_declaration=True)
        paths.append(path)
    return paths


def read_series(svg_path) -> dict[str, list[tuple[int, float]]]:
    """Recover ``{series: [(epoch, value), ...]}`` from an emitted SVG."""
    root = ET.parse(svg_path).getroot()
    out = {}
    for el in root.iter(f"{{{SVG_NS}}}polyline"):
        epochs = [int(e) for e in el.get("data-epochs").split()]
        values = [float(v) for v in el.get("data-values").split()]
        out[el.get("data-series")] = list(zip(epochs, values))
    return out
