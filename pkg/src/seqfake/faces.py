"""Parametric faces and invertible sequential manipulation ops.

A face is a 24-parameter vector in normalized units. A manipulation op is an
affine map p' = A @ p + degree * b on that vector, where A is unit
lower-triangular (det 1, exactly invertible) and carries deliberate
cross-parameter coupling: editing one component leaks into others, so the
*order* of edits is observable in the final parameters and hence in pixels.

Exactness contract: every sampled parameter, coupling entry, push direction
and degree sits on a dyadic grid (2^-16 / 2^-6), so all affine arithmetic in
float64 is exact (no rounding anywhere, <= ~48 mantissa bits after five ops).
Inverting a sequence therefore recovers the original vector bit-for-bit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .vocab import Vocabulary, ManipulationSequence

NUM_PARAMS = 24

PARAM_NAMES = (
    "head_cx", "head_cy", "head_rx", "head_ry",
    "eye_l_x", "eye_l_y", "eye_l_r",
    "eye_r_x", "eye_r_y", "eye_r_r",
    "brow_angle", "brow_thick",
    "nose_len", "nose_width",
    "lip_width", "lip_curve",
    "hair_height", "hair_dark",
    "glasses_opacity", "glasses_frame",
    "beard_density",
    "skin_tone",
    "cheek_tint",
    "jaw_width",
)

PARAM_INDEX = {n: i for i, n in enumerate(PARAM_NAMES)}

# Dyadic grids: parameters on 2^-16, couplings/pushes/degrees on 2^-6.
PARAM_GRID_BITS = 16
COEFF_GRID = 64

# Coupling magnitude bound (9/64 = 0.140625 <= 0.15 default).
DEFAULT_ALPHA = 0.15

# Degree window for per-record push magnitudes, in 1/64 ticks.
DEGREE_TICKS = (52, 64)  # [0.8125, 1.0]


@dataclass(frozen=True)
class FaceSpec:
    """Raw face parameter vector. Unclamped; the renderer clamps at draw time."""

    p: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.p, dtype=np.float64)
        if arr.shape != (NUM_PARAMS,):
            raise ValueError(f"expected {NUM_PARAMS} parameters, got {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("non-finite face parameters")
        object.__setattr__(self, "p", arr)

    def __getitem__(self, name: str) -> float:
        return float(self.p[PARAM_INDEX[name]])


@dataclass(frozen=True)
class ManipulationOp:
    """One invertible edit: p' = A @ p + degree * b_dir."""

    label_id: int
    name: str
    A: np.ndarray       # (24, 24) unit lower-triangular
    b_dir: np.ndarray   # (24,) push direction, scaled per record by a degree
    target_cols: tuple[int, ...]

    def apply(self, spec: FaceSpec, degree: float = 1.0) -> FaceSpec:
        return FaceSpec(self.A @ spec.p + degree * self.b_dir)

    def invert(self, spec: FaceSpec, degree: float = 1.0) -> FaceSpec:
        """Exact inverse by forward substitution (A has unit diagonal)."""
        x = spec.p - degree * self.b_dir
        out = np.empty_like(x)
        for i in range(NUM_PARAMS):
            out[i] = x[i] - self.A[i, :i] @ out[:i]
        return FaceSpec(out)


# Per-op wiring: (primary target, pushes {col: ticks/64}, head-source col, sink row).
# Each op writes its pushes, couples its primary target from a head-geometry
# source, and couples its sink row from every other op's primary target --
# the sink accumulates order-dependent residue from whatever ran before.
_OP_TABLES = {
    "components": {
        "nose":    (12, {12: 20, 13: 10}, 0, 22),
        "eye":     (6,  {6: 20, 9: 20, 5: 7, 8: 7}, 1, 17),
        "eyebrow": (10, {10: 20, 11: 10}, 2, 19),
        "lip":     (15, {15: 20, 14: 12}, 3, 21),
        "hair":    (16, {16: 20, 17: 12}, 4, 23),
    },
    "attributes": {
        "bangs":      (16, {16: 20, 17: 8}, 0, 22),
        "eyeglasses": (18, {18: 20, 19: 10}, 1, 23),
        "beard":      (20, {20: 22}, 2, 22),
        "smiling":    (15, {15: 22, 14: 10}, 3, 23),
        "young":      (21, {21: -18, 17: -10}, 4, 22),
    },
}


def build_ops(vocab: Vocabulary, alpha: float = DEFAULT_ALPHA) -> list[ManipulationOp]:
    """Construct the default op set for a vocabulary track.

    alpha bounds the off-diagonal coupling; it is snapped down to the 1/64
    grid to keep arithmetic exact.
    """
    table = _OP_TABLES[vocab.track]
    a_ticks = int(np.floor(alpha * COEFF_GRID))
    if a_ticks < 1:
        raise ValueError(f"alpha {alpha} too small; needs >= 1/{COEFF_GRID}")
    a1 = a_ticks / COEFF_GRID            # self-target <- head source
    primaries = {name: table[name][0] for name in vocab.labels}

    ops = []
    for k, name in enumerate(vocab.labels):
        t_col, pushes, h_col, s_row = table[name]
        A = np.eye(NUM_PARAMS)
        A[t_col, h_col] = a1 if k % 2 == 0 else -a1
        for j, other in enumerate(vocab.labels):
            if other == name:
                continue
            # sink row reads the other op's primary target; sign varies by pair
            a2 = (a_ticks - (j % 3)) / COEFF_GRID
            A[s_row, primaries[other]] = a2 if (k + j) % 2 == 0 else -a2
        b = np.zeros(NUM_PARAMS)
        for col, ticks in pushes.items():
            b[col] = ticks / COEFF_GRID
        ops.append(ManipulationOp(
            label_id=vocab.id_of(name), name=name, A=A, b_dir=b,
            target_cols=tuple(sorted(pushes)),
        ))
    return ops


class ManipulationEngine:
    """Applies and inverts op sequences for one vocabulary track."""

    def __init__(self, vocab: Vocabulary, alpha: float = DEFAULT_ALPHA):
        self.vocab = vocab
        self.ops = build_ops(vocab, alpha)
        self.by_id = {op.label_id: op for op in self.ops}
        self.by_name = {op.name: op for op in self.ops}

    def apply_sequence(self, spec: FaceSpec, seq: ManipulationSequence,
                       degrees: list[float]) -> FaceSpec:
        if len(degrees) != len(seq):
            raise ValueError("one degree per op required")
        out = spec
        for op_id, deg in zip(seq.ops, degrees):
            out = self.by_id[op_id].apply(out, deg)
        return out

    def recover(self, spec: FaceSpec, seq: ManipulationSequence,
                degrees: list[float]) -> FaceSpec:
        """Undo a sequence by applying op inverses in reverse order."""
        if len(degrees) != len(seq):
            raise ValueError("one degree per op required")
        out = spec
        for op_id, deg in zip(reversed(seq.ops), reversed(degrees)):
            out = self.by_id[op_id].invert(out, deg)
        return out


def param_distance(a: FaceSpec, b: FaceSpec) -> float:
    return float(np.linalg.norm(a.p - b.p))


# Sampling bands for original faces, chosen so that a pushed primary target
# always leaves the original band (min degree 0.8125 * min push 0.28 > band
# width margin). Bands are (lo, hi) in normalized units.
_DEFAULT_BAND = (0.30, 0.55)
_SAMPLING_BANDS = {
    "head_cx": (0.40, 0.60), "head_cy": (0.40, 0.60),
    "head_rx": (0.35, 0.60), "head_ry": (0.35, 0.60),
    "glasses_opacity": (0.25, 0.50),
    "beard_density": (0.25, 0.50),
    "skin_tone": (0.40, 0.65),
    "cheek_tint": (0.30, 0.55),
    "jaw_width": (0.35, 0.60),
}


def sample_face(rng: np.random.Generator) -> FaceSpec:
    """Draw an original face; every parameter lands on the 2^-16 grid."""
    scale = 1 << PARAM_GRID_BITS
    p = np.empty(NUM_PARAMS)
    for i, name in enumerate(PARAM_NAMES):
        lo, hi = _SAMPLING_BANDS.get(name, _DEFAULT_BAND)
        lo_t, hi_t = int(np.ceil(lo * scale)), int(np.floor(hi * scale))
        p[i] = rng.integers(lo_t, hi_t + 1) / scale
    return FaceSpec(p)


def sample_degree(rng: np.random.Generator,
                  ticks: tuple[int, int] = DEGREE_TICKS) -> float:
    """Per-record manipulation degree on the 1/64 grid."""
    lo, hi = ticks
    return rng.integers(lo, hi + 1) / COEFF_GRID
