"""Deterministic rasterizer turning a FaceSpec into an RGB image.

Pure numpy float64 compositing over a fixed draw order, so the same spec and
size always produce a bit-identical image. Raw parameters are clamped to
their valid ranges here and only here; the spec vector itself stays exact.
"""

from __future__ import annotations

import numpy as np

from .faces import FaceSpec

DEFAULT_SIZE = 128
MIN_SIZE = 32

# Base palette (RGB in [0,1]).
_BG = np.array([0.86, 0.88, 0.92])
_SKIN_PALE = np.array([0.98, 0.88, 0.78])
_SKIN_TAN = np.array([0.62, 0.44, 0.30])
_HAIR_LIGHT = np.array([0.55, 0.40, 0.25])
_HAIR_DARK = np.array([0.08, 0.06, 0.05])
_LIP = np.array([0.72, 0.22, 0.25])
_BROW = np.array([0.20, 0.13, 0.08])
_PUPIL = np.array([0.10, 0.08, 0.07])
_SCLERA = np.array([0.97, 0.97, 0.95])
_GLASS = np.array([0.15, 0.15, 0.18])
_BEARD = np.array([0.17, 0.12, 0.08])
_NOSE_SHADE = 0.82  # multiplicative shading of skin inside the nose wedge
_CHEEK = np.array([0.90, 0.45, 0.45])


def _clamp(v, lo, hi):
    return float(min(max(v, lo), hi))


def _blend(canvas: np.ndarray, alpha: np.ndarray, color: np.ndarray) -> None:
    canvas += alpha[..., None] * (color[None, None, :] - canvas)


def _edge(field: np.ndarray, size: int) -> np.ndarray:
    """~1px anti-aliased coverage from a signed distance field (negative inside)."""
    return np.clip(0.5 - field * size, 0.0, 1.0)


def render(spec: FaceSpec, size: int = DEFAULT_SIZE) -> np.ndarray:
    """Rasterize to a (3, size, size) float array in [0, 1]."""
    if size < MIN_SIZE:
        raise ValueError(f"size {size} below minimum {MIN_SIZE}")
    p = spec
    yy, xx = np.meshgrid(
        (np.arange(size) + 0.5) / size, (np.arange(size) + 0.5) / size,
        indexing="ij",
    )
    canvas = np.tile(_BG, (size, size, 1))

    # Head geometry
    cx = 0.5 + 0.10 * (_clamp(p["head_cx"], 0, 1) - 0.5)
    cy = 0.48 + 0.08 * (_clamp(p["head_cy"], 0, 1) - 0.5)
    rx = 0.24 + 0.10 * _clamp(p["head_rx"], 0, 1)
    ry = 0.30 + 0.10 * _clamp(p["head_ry"], 0, 1)
    jaw = 0.85 + 0.30 * _clamp(p["jaw_width"], 0, 1.5)

    # Lower half of the head uses a jaw-scaled x radius
    rx_map = np.where(yy > cy, rx * jaw, rx)
    head_field = np.sqrt(((xx - cx) / rx_map) ** 2 + ((yy - cy) / ry) ** 2) - 1.0
    head_alpha = _edge(head_field * min(rx, ry), size)
    skin = _SKIN_PALE + _clamp(p["skin_tone"], 0, 1.5) * (_SKIN_TAN - _SKIN_PALE)
    _blend(canvas, head_alpha, skin)

    # Cheek tint: soft blobs either side of the nose
    tint = _clamp(p["cheek_tint"], 0, 1.5)
    for sx in (-1.0, 1.0):
        ccx, ccy = cx + sx * 0.55 * rx, cy + 0.18 * ry
        d2 = ((xx - ccx) / (0.22 * rx)) ** 2 + ((yy - ccy) / (0.16 * ry)) ** 2
        blob = np.exp(-d2) * 0.85 * tint
        _blend(canvas, blob * head_alpha, _CHEEK)

    # Beard: chin band inside the head, deterministic stipple texture
    beard = _clamp(p["beard_density"], 0, 1.5)
    if beard > 0:
        band = _edge((yy - (cy + 0.45 * ry)) * -1.0 * 0.05, size)  # soft start below mouth
        band = np.clip((yy - (cy + 0.42 * ry)) / (0.45 * ry), 0.0, 1.0)
        stipple = 0.55 + 0.45 * np.sin(xx * 97.0) * np.sin(yy * 83.0)
        _blend(canvas, head_alpha * band * beard * 0.85 * stipple, _BEARD)

    # Mouth: band around a curved centerline; curvature bends it up/down
    mw = (0.07 + 0.12 * _clamp(p["lip_width"], 0, 1.5)) * 0.5
    curve = (_clamp(p["lip_curve"], -0.5, 2.0) - 0.5) * 0.10
    mth = 0.016
    my = cy + 0.52 * ry
    u = np.clip((xx - cx) / mw, -1.0, 1.0)
    centerline = my + curve * (u * u - 0.5)
    dy = np.abs(yy - centerline) - mth * (1.0 - 0.55 * u * u)
    inside_x = _edge((np.abs(xx - cx) - mw) * 1.0, size)
    _blend(canvas, _edge(dy, size) * inside_x, _LIP)

    # Nose: shaded wedge from between the eyes down to nose tip
    nl = 0.05 + 0.13 * _clamp(p["nose_len"], 0, 1.5)
    nw = (0.015 + 0.05 * _clamp(p["nose_width"], 0, 1.5)) * 0.5
    ny0 = cy - 0.10 * ry
    t = np.clip((yy - ny0) / nl, 0.0, 1.0)
    half = nw * (0.25 + 0.75 * t)
    nose_field = np.maximum(np.abs(xx - cx) - half,
                            np.maximum(ny0 - yy, yy - (ny0 + nl)))
    nose_alpha = _edge(nose_field, size)
    canvas *= 1.0 - nose_alpha[..., None] * (1.0 - _NOSE_SHADE)

    # Eyes: sclera + pupil
    eye_geo = []
    for side, (px_, py_, pr_) in (("l", ("eye_l_x", "eye_l_y", "eye_l_r")),
                                  ("r", ("eye_r_x", "eye_r_y", "eye_r_r"))):
        sgn = -1.0 if side == "l" else 1.0
        ex = cx + sgn * (0.30 + 0.25 * _clamp(p[px_], 0, 1.5)) * rx
        ey = cy - (0.08 + 0.25 * _clamp(p[py_], 0, 1.5)) * ry
        er = 0.012 + 0.045 * _clamp(p[pr_], 0, 1.5)
        eye_geo.append((ex, ey, er))
        d = np.sqrt((xx - ex) ** 2 + (yy - ey) ** 2)
        _blend(canvas, _edge(d - er, size), _SCLERA)
        _blend(canvas, _edge(d - er * 0.45, size), _PUPIL)

    # Eyebrows: tilted bars above the eyes
    ang = (_clamp(p["brow_angle"], -0.5, 1.5) - 0.5) * 0.9
    bth = (0.006 + 0.020 * _clamp(p["brow_thick"], 0, 1.5)) * 0.5
    for i, (ex, ey, er) in enumerate(eye_geo):
        sgn = -1.0 if i == 0 else 1.0
        by = ey - er - 0.035
        dx, dyr = xx - ex, yy - by
        rot = dyr * np.cos(sgn * ang) - dx * np.sin(sgn * ang)
        along = dx * np.cos(sgn * ang) + dyr * np.sin(sgn * ang)
        bar = np.maximum(np.abs(rot) - bth, np.abs(along) - (er + 0.025))
        _blend(canvas, _edge(bar, size), _BROW)

    # Hair: skull cap plus a fringe whose depth is the hair height param
    hair_col = _HAIR_LIGHT + _clamp(p["hair_dark"], 0, 1.5) * (_HAIR_DARK - _HAIR_LIGHT)
    fringe = 0.04 + 0.16 * _clamp(p["hair_height"], 0, 1.5)
    top_field = np.sqrt(((xx - cx) / rx) ** 2 + ((yy - cy) / ry) ** 2) - 1.0
    cap = _edge(top_field * min(rx, ry), size) * _edge(yy - (cy - ry + fringe), size)
    wave = 0.012 * np.sin((xx - cx) * 55.0)
    cap = cap * _edge(yy - (cy - ry + fringe + wave), size)
    _blend(canvas, cap, hair_col)

    # Glasses: two rings and a bridge, alpha from opacity
    gop = _clamp(p["glasses_opacity"], 0, 1)
    if gop > 0:
        gfw = (0.003 + 0.020 * _clamp(p["glasses_frame"], 0, 1.5)) * 0.5
        ring = np.full((size, size), np.inf)
        for ex, ey, er in eye_geo:
            rr = er + 0.030
            d = np.abs(np.sqrt((xx - ex) ** 2 + (yy - ey) ** 2) - rr)
            ring = np.minimum(ring, d - gfw)
        (lx, ly, lr), (rx_e, ry_e, rr_e) = eye_geo
        bx0, bx1 = lx + lr + 0.030, rx_e - rr_e - 0.030
        if bx1 > bx0:
            bridge_y = 0.5 * (ly + ry_e) - 0.030
            bar = np.maximum(np.abs(yy - bridge_y) - gfw,
                             np.maximum(bx0 - xx, xx - bx1))
            ring = np.minimum(ring, bar)
        _blend(canvas, _edge(ring, size) * gop, _GLASS)

    return np.clip(canvas, 0.0, 1.0).transpose(2, 0, 1)


def to_uint8(img: np.ndarray) -> np.ndarray:
    """(3,H,W) float in [0,1] -> (H,W,3) uint8."""
    return np.round(np.clip(img, 0, 1) * 255.0).astype(np.uint8).transpose(1, 2, 0)


def from_uint8(arr: np.ndarray) -> np.ndarray:
    """(H,W,3) uint8 -> (3,H,W) float in [0,1]."""
    return arr.astype(np.float64).transpose(2, 0, 1) / 255.0
