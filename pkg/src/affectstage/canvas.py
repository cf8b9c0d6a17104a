"""Deterministic 2-D collage substrate.

Scenes are immutable lists of placed image fragments, rasterized by
back-to-front alpha compositing over an opaque background.  The per-sequence
utility function scores the rendered image on coverage, balance against a
target centroid, palette match against a target histogram, and an overlap
penalty; agents greedily improve it.
"""

from __future__ import annotations

import base64
import hashlib
import io
import math
from dataclasses import dataclass, field, replace

import numpy as np

PALETTE_BINS = 8  # per channel; histogram is the 24-bin concatenation of R, G, B

DEFAULT_CANVAS_WIDTH = 256
DEFAULT_CANVAS_HEIGHT = 144


class CanvasError(ValueError):
    """Raised for invalid scenes, placements or fragment specs."""


# ---------------------------------------------------------------------------
# Fragments
# ---------------------------------------------------------------------------


def _fill_pixels(spec: dict) -> np.ndarray:
    kind = spec.get("kind")
    if kind == "solid":
        w, h = int(spec["size"][0]), int(spec["size"][1])
        color = np.asarray(spec["color"], dtype=np.float64)
        if color.shape != (4,):
            raise CanvasError("solid fill needs an RGBA color")
        px = np.empty((h, w, 4), dtype=np.float64)
        px[:, :] = color
        return px
    if kind == "gradient":
        w, h = int(spec["size"][0]), int(spec["size"][1])
        c0 = np.asarray(spec["start"], dtype=np.float64)
        c1 = np.asarray(spec["stop"], dtype=np.float64)
        if c0.shape != (4,) or c1.shape != (4,):
            raise CanvasError("gradient fill needs RGBA start/stop colors")
        axis = spec.get("axis", "x")
        n = w if axis == "x" else h
        t = np.linspace(0.0, 1.0, n) if n > 1 else np.array([0.0])
        ramp = c0[None, :] * (1.0 - t[:, None]) + c1[None, :] * t[:, None]
        if axis == "x":
            px = np.broadcast_to(ramp[None, :, :], (h, w, 4)).copy()
        else:
            px = np.broadcast_to(ramp[:, None, :], (h, w, 4)).copy()
        return px
    if kind == "png":
        from PIL import Image

        if "data_b64" in spec:
            img = Image.open(io.BytesIO(base64.b64decode(spec["data_b64"])))
        else:
            img = Image.open(spec["path"])
        arr = np.asarray(img.convert("RGBA"), dtype=np.float64) / 255.0
        return arr
    raise CanvasError(f"unknown fragment fill kind {kind!r}")


@dataclass(frozen=True)
class Fragment:
    """An image fragment carried by one agent.

    ``spec`` is the portable description (solid / gradient / png) used for
    script files and for shipping the fragment to the rehearsal console;
    ``pixels`` is the decoded (h, w, 4) float buffer in [0, 1].
    """

    id: str
    spec: dict
    pixels: np.ndarray = field(compare=False, repr=False, default=None)

    def __post_init__(self):
        px = self.pixels if self.pixels is not None else _fill_pixels(self.spec)
        px = np.asarray(px, dtype=np.float64)
        if px.ndim != 3 or px.shape[2] != 4 or px.shape[0] == 0 or px.shape[1] == 0:
            raise CanvasError(f"fragment {self.id!r} has no area")
        if px.min() < 0.0 or px.max() > 1.0 or not np.all(np.isfinite(px)):
            raise CanvasError(f"fragment {self.id!r} pixel values outside [0, 1]")
        px.setflags(write=False)
        object.__setattr__(self, "pixels", px)

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    def portable_spec(self) -> dict:
        """Spec safe to send over the wire (PNG files inlined as base64)."""
        if self.spec.get("kind") == "png" and "data_b64" not in self.spec:
            with open(self.spec["path"], "rb") as fh:
                data = fh.read()
            return {"kind": "png", "data_b64": base64.b64encode(data).decode("ascii")}
        return dict(self.spec)


@dataclass(frozen=True)
class Placement:
    """Position, scale and opacity of one fragment; draw order is the agent id."""

    x: float
    y: float
    scale: float = 1.0
    opacity: float = 1.0

    def __post_init__(self):
        if not (self.scale > 0.0 and math.isfinite(self.scale)):
            raise CanvasError(f"placement scale must be positive, got {self.scale}")
        if not (0.0 <= self.opacity <= 1.0):
            raise CanvasError(f"placement opacity must be in [0, 1], got {self.opacity}")
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise CanvasError("placement coordinates must be finite")


@dataclass(frozen=True)
class Perturbation:
    """One candidate move: exactly one of translate / rescale / fade."""

    kind: str
    dx: float = 0.0
    dy: float = 0.0
    factor: float = 1.0
    delta: float = 0.0

    @classmethod
    def translate(cls, dx: float, dy: float) -> "Perturbation":
        return cls(kind="translate", dx=dx, dy=dy)

    @classmethod
    def rescale(cls, factor: float) -> "Perturbation":
        return cls(kind="scale", factor=factor)

    @classmethod
    def fade(cls, delta: float) -> "Perturbation":
        return cls(kind="opacity", delta=delta)

    def inverse(self) -> "Perturbation":
        if self.kind == "translate":
            return Perturbation.translate(-self.dx, -self.dy)
        if self.kind == "scale":
            return Perturbation.rescale(1.0 / self.factor)
        return Perturbation.fade(-self.delta)


@dataclass(frozen=True)
class Scene:
    """Immutable scene graph: canvas, background, placed fragments by agent id."""

    width: int
    height: int
    background: tuple[float, float, float]
    items: tuple[tuple[int, Fragment, Placement], ...]

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise CanvasError("canvas must have positive size")
        ids = [agent_id for agent_id, _, _ in self.items]
        if sorted(ids) != ids or len(set(ids)) != len(ids):
            raise CanvasError("scene items must be strictly ordered by agent id")
        bg = tuple(float(c) for c in self.background)
        if len(bg) != 3 or any(not 0.0 <= c <= 1.0 for c in bg):
            raise CanvasError("background must be an RGB triple in [0, 1]")
        object.__setattr__(self, "background", bg)
        object.__setattr__(self, "items", tuple(self.items))

    def placement_of(self, agent_id: int) -> Placement:
        for aid, _, placement in self.items:
            if aid == agent_id:
                return placement
        raise CanvasError(f"unknown agent id {agent_id}")

    def fragment_of(self, agent_id: int) -> Fragment:
        for aid, fragment, _ in self.items:
            if aid == agent_id:
                return fragment
        raise CanvasError(f"unknown agent id {agent_id}")

    def with_placement(self, agent_id: int, placement: Placement) -> "Scene":
        if all(aid != agent_id for aid, _, _ in self.items):
            raise CanvasError(f"unknown agent id {agent_id}")
        items = tuple(
            (aid, frag, placement if aid == agent_id else pl) for aid, frag, pl in self.items
        )
        return replace(self, items=items)


def apply_action(scene: Scene, agent_id: int, perturbation: Perturbation) -> Scene:
    """Return the scene with one placement perturbed.

    Opacity is clamped into [0, 1]; a move that would drive scale non-positive
    is rejected.
    """
    current = scene.placement_of(agent_id)
    if perturbation.kind == "translate":
        new = replace(current, x=current.x + perturbation.dx, y=current.y + perturbation.dy)
    elif perturbation.kind == "scale":
        factor = perturbation.factor
        if not factor > 0.0:
            raise CanvasError(f"scale factor must be positive, got {factor}")
        new = replace(current, scale=current.scale * factor)
    elif perturbation.kind == "opacity":
        new = replace(current, opacity=min(1.0, max(0.0, current.opacity + perturbation.delta)))
    else:
        raise CanvasError(f"unknown perturbation kind {perturbation.kind!r}")
    return scene.with_placement(agent_id, new)


# ---------------------------------------------------------------------------
# Rasterization
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Raster:
    """Rendered image plus the per-pixel count of fragments that painted it."""

    rgba: np.ndarray    # (h, w, 4) uint8, alpha always 255 (opaque canvas)
    painted: np.ndarray  # (h, w) uint16

    def digest(self) -> str:
        h, w = self.painted.shape
        hasher = hashlib.sha256()
        hasher.update(f"{w}x{h}:".encode("ascii"))
        hasher.update(self.rgba.tobytes())
        return hasher.hexdigest()


def _blit(rgb: np.ndarray, counts: np.ndarray, fragment: Fragment, placement: Placement) -> None:
    fh, fw = fragment.pixels.shape[:2]
    dw = max(1, int(round(fw * placement.scale)))
    dh = max(1, int(round(fh * placement.scale)))
    x0 = int(round(placement.x))
    y0 = int(round(placement.y))
    height, width = counts.shape
    dx0, dy0 = max(0, x0), max(0, y0)
    dx1, dy1 = min(width, x0 + dw), min(height, y0 + dh)
    if dx0 >= dx1 or dy0 >= dy1:
        return
    # nearest-neighbour source index for each destination pixel center
    cols = np.minimum(((np.arange(dx0, dx1) - x0 + 0.5) * fw / dw).astype(np.int64), fw - 1)
    rows = np.minimum(((np.arange(dy0, dy1) - y0 + 0.5) * fh / dh).astype(np.int64), fh - 1)
    src = fragment.pixels[np.ix_(rows, cols)]
    alpha = src[..., 3] * placement.opacity
    region = rgb[dy0:dy1, dx0:dx1]
    rgb[dy0:dy1, dx0:dx1] = src[..., :3] * alpha[..., None] + region * (1.0 - alpha[..., None])
    counts[dy0:dy1, dx0:dx1] += (alpha > 0.0).astype(np.uint16)


def render(scene: Scene) -> Raster:
    """Composite back-to-front in agent-id order; bit-identical for equal scenes.

    Internal math runs in float64; the result is quantized once to 8 bits per
    channel so digests are stable.  A pixel counts as painted when a fragment
    contributed any non-zero alpha to it.
    """
    rgb = np.empty((scene.height, scene.width, 3), dtype=np.float64)
    rgb[:, :] = scene.background
    counts = np.zeros((scene.height, scene.width), dtype=np.uint16)
    for _, fragment, placement in scene.items:
        _blit(rgb, counts, fragment, placement)
    rgba = np.empty((scene.height, scene.width, 4), dtype=np.uint8)
    rgba[..., :3] = np.clip(np.rint(rgb * 255.0), 0, 255).astype(np.uint8)
    rgba[..., 3] = 255
    return Raster(rgba=rgba, painted=counts)


# ---------------------------------------------------------------------------
# Image qualities and utility
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class QualityVector:
    """Global qualities of the composed image, all in [0, 1]."""

    coverage: float
    balance: float
    palette_match: float
    overlap_penalty: float

    def __post_init__(self):
        for name in ("coverage", "balance", "palette_match", "overlap_penalty"):
            v = getattr(self, name)
            if not (0.0 <= v <= 1.0):
                raise CanvasError(f"quality {name}={v} outside [0, 1]")

    def as_dict(self) -> dict:
        return {
            "coverage": self.coverage,
            "balance": self.balance,
            "palette_match": self.palette_match,
            "overlap_penalty": self.overlap_penalty,
        }


def _normalized_palette(values) -> tuple[float, ...]:
    arr = np.asarray(values, dtype=np.float64)
    if arr.shape != (3 * PALETTE_BINS,):
        raise CanvasError(f"target palette must have {3 * PALETTE_BINS} bins")
    if arr.min() < 0.0 or not np.all(np.isfinite(arr)):
        raise CanvasError("target palette bins must be finite and non-negative")
    total = arr.sum()
    if total <= 0.0:
        raise CanvasError("target palette must have positive mass")
    return tuple(arr / total)


@dataclass(frozen=True)
class SequenceConfig:
    """Per-sequence utility weights, targets, and scalar values for the environment."""

    w_cov: float = 1.0
    w_bal: float = 0.0
    w_pal: float = 0.0
    w_ovl: float = 0.0
    target_centroid: tuple[float, float] = (0.5, 0.5)  # relative canvas coords
    target_palette: tuple[float, ...] = tuple([1.0 / (3 * PALETTE_BINS)] * (3 * PALETTE_BINS))
    values: tuple[tuple[str, float], ...] = ()

    def __post_init__(self):
        weights = (self.w_cov, self.w_bal, self.w_pal, self.w_ovl)
        if any(w < 0.0 or not math.isfinite(w) for w in weights):
            raise CanvasError("utility weights must be finite and non-negative")
        if not any(w > 0.0 for w in weights):
            raise CanvasError("at least one utility weight must be positive")
        object.__setattr__(self, "target_palette", _normalized_palette(self.target_palette))
        tc = (float(self.target_centroid[0]), float(self.target_centroid[1]))
        object.__setattr__(self, "target_centroid", tc)
        object.__setattr__(
            self, "values", tuple((str(k), float(v)) for k, v in self.values)
        )

    def values_dict(self) -> dict[str, float]:
        return dict(self.values)


def palette_histogram(rgba: np.ndarray) -> np.ndarray:
    """24-bin color histogram (8 bins per RGB channel), normalized to sum 1."""
    if rgba.size == 0:
        raise CanvasError("empty raster")
    bins = np.empty(3 * PALETTE_BINS, dtype=np.float64)
    scale = 256 // PALETTE_BINS
    for c in range(3):
        idx = rgba[..., c].astype(np.int64) // scale
        bins[c * PALETTE_BINS:(c + 1) * PALETTE_BINS] = np.bincount(
            idx.ravel(), minlength=PALETTE_BINS
        )[:PALETTE_BINS]
    return bins / bins.sum()


def metrics(raster: Raster, cfg: SequenceConfig) -> QualityVector:
    """Measure the four image qualities on a rendered raster.

    coverage: fraction of pixels any fragment painted.
    balance: 1 minus the ink-centroid distance to the target centroid,
      normalized by the canvas diagonal (0 when nothing is painted).
    palette_match: 1 - 0.5 * L1 between the image color histogram and target.
    overlap_penalty: fraction of pixels painted by two or more fragments.
    """
    counts = raster.painted
    if counts.size == 0:
        raise CanvasError("empty raster")
    height, width = counts.shape
    total = counts.size
    painted = counts >= 1
    coverage = float(painted.sum()) / total
    overlap = float((counts >= 2).sum()) / total
    if coverage > 0.0:
        ys, xs = np.nonzero(painted)
        cx = xs.mean() + 0.5
        cy = ys.mean() + 0.5
        tx = cfg.target_centroid[0] * width
        ty = cfg.target_centroid[1] * height
        diag = math.hypot(width, height)
        balance = 1.0 - math.hypot(cx - tx, cy - ty) / diag
    else:
        balance = 0.0
    hist = palette_histogram(raster.rgba)
    palette = 1.0 - 0.5 * float(np.abs(hist - np.asarray(cfg.target_palette)).sum())
    clamp = lambda v: min(1.0, max(0.0, v))
    return QualityVector(clamp(coverage), clamp(balance), clamp(palette), clamp(overlap))


def utility(scene: Scene, cfg: SequenceConfig) -> float:
    """Weighted quality score of the rendered scene; agents hill-climb this."""
    q = metrics(render(scene), cfg)
    return (
        cfg.w_cov * q.coverage
        + cfg.w_bal * q.balance
        + cfg.w_pal * q.palette_match
        - cfg.w_ovl * q.overlap_penalty
    )


# ---------------------------------------------------------------------------
# Export
# ---------------------------------------------------------------------------


def scene_graph(scene: Scene) -> dict:
    """The documented JSON scene graph consumed by the rehearsal console."""
    return {
        "canvas": {"width": scene.width, "height": scene.height},
        "background": list(scene.background),
        "items": [
            {
                "agent": agent_id,
                "fragment": fragment.id,
                "x": placement.x,
                "y": placement.y,
                "scale": placement.scale,
                "opacity": placement.opacity,
            }
            for agent_id, fragment, placement in scene.items
        ],
    }


def write_png(raster: Raster, path) -> None:
    from PIL import Image

    Image.fromarray(raster.rgba, "RGBA").save(path, format="PNG")


def write_ppm(raster: Raster, path) -> None:
    """Binary P6 PPM (RGB, 8-bit)."""
    h, w = raster.painted.shape
    with open(path, "wb") as fh:
        fh.write(f"P6\n{w} {h}\n255\n".encode("ascii"))
        fh.write(raster.rgba[..., :3].tobytes())
