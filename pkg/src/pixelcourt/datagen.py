"""Deterministic synthetic tampered-image corpus with masks and edge ground truth.

Every function here is a pure function of (inputs, seed): same arguments,
same bytes. Images are float32 HxWx3 arrays in [0, 1]; masks and edges are
uint8 HxW arrays in {0, 1}.
"""

import io
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image
from scipy import ndimage

TAMPER_KINDS = ("copy_move", "splice", "inpaint_sim")
ALL_KINDS = TAMPER_KINDS + ("pristine",)

PERTURBATION_RANGES = {
    "jpeg": (10, 100),        # encoder quality
    "gaussian_noise": (0.0, 0.2),  # sigma in image units
    "gaussian_blur": (0.0, 3.0),   # kernel sigma in pixels
}

REGION_AREA_RANGE = (0.02, 0.40)
INPAINT_ITERATIONS = 8


@dataclass
class Sample:
    image: np.ndarray       # HxWx3 float32 in [0,1]
    mask: np.ndarray        # HxW uint8 in {0,1}, 1 = manipulated
    edge: np.ndarray        # HxW uint8 in {0,1}
    kind: str
    seed: int


@dataclass
class Perturbation:
    kind: str
    severity: float

    def __post_init__(self):
        if self.kind not in PERTURBATION_RANGES:
            raise ValueError(f"unknown perturbation kind {self.kind!r}")
        lo, hi = PERTURBATION_RANGES[self.kind]
        if not lo <= self.severity <= hi:
            raise ValueError(
                f"{self.kind} severity {self.severity} outside [{lo}, {hi}]")


def _check_size(height: int, width: int) -> None:
    if height < 32 or width < 32 or height % 16 or width % 16:
        raise ValueError(
            f"image size {height}x{width} must be >=32 and a multiple of 16 "
            "(encoder stride requirement)")


def _smooth_noise(rng: np.random.Generator, height: int, width: int, cells: int) -> np.ndarray:
    """Value noise: a coarse random grid upsampled bilinearly (Perlin-ish)."""
    grid = rng.random((cells, cells)).astype(np.float32)
    img = Image.fromarray(grid, mode="F").resize((width, height), Image.BILINEAR)
    return np.asarray(img, dtype=np.float32)


def _fill_convex(height: int, width: int, points: np.ndarray) -> np.ndarray:
    """Rasterize a convex polygon given CCW-ordered vertices (x, y)."""
    yy, xx = np.mgrid[0:height, 0:width]
    inside = np.ones((height, width), dtype=bool)
    n = len(points)
    for i in range(n):
        x0, y0 = points[i]
        x1, y1 = points[(i + 1) % n]
        cross = (x1 - x0) * (yy - y0) - (y1 - y0) * (xx - x0)
        inside &= cross >= 0
    return inside


def _fill_ellipse(height: int, width: int, cx, cy, rx, ry, angle) -> np.ndarray:
    yy, xx = np.mgrid[0:height, 0:width]
    ca, sa = math.cos(angle), math.sin(angle)
    u = (xx - cx) * ca + (yy - cy) * sa
    v = -(xx - cx) * sa + (yy - cy) * ca
    return (u / max(rx, 1e-6)) ** 2 + (v / max(ry, 1e-6)) ** 2 <= 1.0


def _convex_points(rng: np.random.Generator, cx, cy, radius, n_vertices) -> np.ndarray:
    angles = np.sort(rng.uniform(0, 2 * math.pi, n_vertices))
    radii = rng.uniform(0.5, 1.0, n_vertices) * radius
    xs = cx + radii * np.cos(angles)
    ys = cy + radii * np.sin(angles)
    return np.stack([xs, ys], axis=1)


def generate_base(seed: int, size=(64, 64)) -> np.ndarray:
    """Procedural pristine image: gradient + value noise + a few filled shapes."""
    height, width = size
    _check_size(height, width)
    rng = np.random.default_rng(seed)

    yy, xx = np.mgrid[0:height, 0:width].astype(np.float32)
    theta = rng.uniform(0, 2 * math.pi)
    ramp = (xx * math.cos(theta) + yy * math.sin(theta))
    ramp = (ramp - ramp.min()) / max(np.ptp(ramp), 1e-6)
    c0 = rng.random(3).astype(np.float32)
    c1 = rng.random(3).astype(np.float32)
    img = ramp[..., None] * c1 + (1.0 - ramp[..., None]) * c0

    for cells in (4, 8, 16):
        tex = _smooth_noise(rng, height, width, cells)
        tint = rng.uniform(-0.15, 0.15, 3).astype(np.float32)
        img += tex[..., None] * tint

    for _ in range(int(rng.integers(3, 7))):
        cx = rng.uniform(0, width)
        cy = rng.uniform(0, height)
        radius = rng.uniform(0.08, 0.3) * min(height, width)
        if rng.random() < 0.5:
            shape = _fill_ellipse(height, width, cx, cy,
                                  radius, radius * rng.uniform(0.5, 1.0),
                                  rng.uniform(0, math.pi))
        else:
            shape = _fill_convex(height, width,
                                 _convex_points(rng, cx, cy, radius, int(rng.integers(4, 8))))
        color = rng.random(3).astype(np.float32)
        alpha = rng.uniform(0.5, 1.0)
        img[shape] = (1 - alpha) * img[shape] + alpha * color

    return np.clip(img, 0.0, 1.0).astype(np.float32)


def _region_mask(rng: np.random.Generator, height: int, width: int) -> np.ndarray:
    """Convex polygon or ellipse with area fraction clamped to REGION_AREA_RANGE."""
    lo, hi = REGION_AREA_RANGE
    total = height * width
    scale = 1.0
    for _ in range(50):
        cx = rng.uniform(0.25 * width, 0.75 * width)
        cy = rng.uniform(0.25 * height, 0.75 * height)
        radius = scale * rng.uniform(0.12, 0.30) * min(height, width)
        if rng.random() < 0.5:
            mask = _fill_ellipse(height, width, cx, cy,
                                 radius, radius * rng.uniform(0.6, 1.0),
                                 rng.uniform(0, math.pi))
        else:
            mask = _fill_convex(height, width,
                                _convex_points(rng, cx, cy, radius, int(rng.integers(4, 8))))
        frac = mask.sum() / total
        if lo <= frac <= hi:
            return mask.astype(np.uint8)
        scale *= 1.25 if frac < lo else 0.8
    # deterministic fallback: centered disc at ~10% area
    radius = math.sqrt(0.10 * total / math.pi)
    return _fill_ellipse(height, width, width / 2, height / 2, radius, radius, 0.0).astype(np.uint8)


def edge_from_mask(mask: np.ndarray) -> np.ndarray:
    """Binary morphological gradient (3x3 element): the 2-px band around
    mask transitions. Out-of-bounds neighbors are ignored, so the image
    border itself never counts as a transition."""
    mask = mask.astype(bool)
    struct = np.ones((3, 3), dtype=bool)
    grown = ndimage.binary_dilation(mask, structure=struct, border_value=0)
    kept = ndimage.binary_erosion(mask, structure=struct, border_value=1)
    return (grown & ~kept).astype(np.uint8)


def tamper(base: np.ndarray, kind: str, seed: int) -> Sample:
    """Apply one manipulation to a pristine base image."""
    if kind == "pristine":
        raise ValueError("tamper() requires a manipulation kind, not 'pristine'")
    if kind not in TAMPER_KINDS:
        raise ValueError(f"unknown manipulation kind {kind!r}")
    height, width = base.shape[:2]
    rng = np.random.default_rng(seed)
    mask = _region_mask(rng, height, width)
    region = mask.astype(bool)
    img = base.copy()

    if kind == "copy_move":
        ys, xs = np.nonzero(region)
        y0, y1, x0, x1 = ys.min(), ys.max(), xs.min(), xs.max()
        max_shift = max(4, min(height, width) // 3)
        for _ in range(50):
            dy = int(rng.integers(-max_shift, max_shift + 1))
            dx = int(rng.integers(-max_shift, max_shift + 1))
            if (abs(dy) + abs(dx) >= 4 and 0 <= y0 - dy and y1 - dy < height
                    and 0 <= x0 - dx and x1 - dx < width):
                break
        else:
            dy, dx = 0, 0  # degenerate fallback: paste in place
        img[ys, xs] = base[ys - dy, xs - dx]
    elif kind == "splice":
        donor = generate_base(seed + 1, (height, width))
        img[region] = donor[region]
    else:  # inpaint_sim: pull smoothed surroundings into the region
        work = base.copy()
        for _ in range(INPAINT_ITERATIONS):
            blurred = ndimage.uniform_filter(work, size=(5, 5, 1), mode="nearest")
            work[region] = blurred[region]
        img = work

    img = np.clip(img, 0.0, 1.0).astype(np.float32)
    return Sample(image=img, mask=mask, edge=edge_from_mask(mask), kind=kind, seed=seed)


def pristine_sample(seed: int, size=(64, 64)) -> Sample:
    img = generate_base(seed, size)
    mask = np.zeros(size, dtype=np.uint8)
    return Sample(image=img, mask=mask, edge=np.zeros(size, dtype=np.uint8),
                  kind="pristine", seed=seed)


def _gaussian_kernel(sigma: float) -> np.ndarray:
    radius = math.ceil(3 * sigma)
    xs = np.arange(-radius, radius + 1, dtype=np.float64)
    k = np.exp(-0.5 * (xs / sigma) ** 2)
    return (k / k.sum()).astype(np.float32)


def perturb(image: np.ndarray, p: Perturbation, seed: int = 0) -> np.ndarray:
    """Benchmark degradations; output keeps the input's shape and [0,1] range."""
    Perturbation(p.kind, p.severity)  # re-validate severity
    if p.kind == "jpeg":
        buf = io.BytesIO()
        to_pil(image).save(buf, format="JPEG", quality=int(p.severity))
        buf.seek(0)
        return np.asarray(Image.open(buf).convert("RGB"), dtype=np.float32) / 255.0
    if p.kind == "gaussian_noise":
        if p.severity == 0:
            return image.copy()
        rng = np.random.default_rng(seed)
        noisy = image + rng.normal(0.0, p.severity, image.shape)
        return np.clip(noisy, 0.0, 1.0).astype(np.float32)
    # gaussian_blur, separable kernel of size 2*ceil(3*sigma)+1, reflect padding
    if p.severity == 0:
        return image.copy()
    k = _gaussian_kernel(p.severity)
    pad = len(k) // 2
    padded = np.pad(image, ((pad, pad), (0, 0), (0, 0)), mode="reflect")
    out = np.zeros_like(image)
    for i, w in enumerate(k):
        out += w * padded[i:i + image.shape[0]]
    padded = np.pad(out, ((0, 0), (pad, pad), (0, 0)), mode="reflect")
    out = np.zeros_like(image)
    for i, w in enumerate(k):
        out += w * padded[:, i:i + image.shape[1]]
    return np.clip(out, 0.0, 1.0).astype(np.float32)


# ---------------------------------------------------------------------------
# PNG + manifest I/O
# ---------------------------------------------------------------------------

def to_pil(image: np.ndarray) -> Image.Image:
    return Image.fromarray((np.clip(image, 0, 1) * 255).round().astype(np.uint8))


def save_image(image: np.ndarray, path) -> None:
    to_pil(image).save(path, format="PNG")


def load_image(path) -> np.ndarray:
    return np.asarray(Image.open(path).convert("RGB"), dtype=np.float32) / 255.0


def save_mask(mask: np.ndarray, path) -> None:
    Image.fromarray((mask.astype(np.uint8) * 255)).save(path, format="PNG")


def load_mask(path) -> np.ndarray:
    arr = np.asarray(Image.open(path).convert("L"))
    return (arr >= 128).astype(np.uint8)


def build_corpus(out_dir, n: int, size=(64, 64), seed: int = 0,
                 pristine_frac: float = 0.0) -> Path:
    """Write n samples + manifest.jsonl; byte-identical for identical args."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    n_pristine = int(round(n * pristine_frac))
    records = []
    for i in range(n):
        sample_seed = seed * 1_000_003 + i * 7
        if i < n - n_pristine:
            kind = TAMPER_KINDS[i % len(TAMPER_KINDS)]
            base = generate_base(sample_seed, size)
            sample = tamper(base, kind, sample_seed + 3)
        else:
            sample = pristine_sample(sample_seed, size)
        stem = f"{i:04d}"
        save_image(sample.image, out_dir / f"img_{stem}.png")
        save_mask(sample.mask, out_dir / f"mask_{stem}.png")
        save_mask(sample.edge, out_dir / f"edge_{stem}.png")
        records.append({
            "image": f"img_{stem}.png",
            "mask": f"mask_{stem}.png",
            "edge": f"edge_{stem}.png",
            "kind": sample.kind,
            "seed": sample.seed,
        })
    manifest = out_dir / "manifest.jsonl"
    with open(manifest, "w") as fh:
        for rec in records:
            fh.write(json.dumps(rec, sort_keys=True) + "\n")
    return manifest


def load_corpus(manifest_path) -> list[Sample]:
    manifest_path = Path(manifest_path)
    if not manifest_path.exists():
        raise FileNotFoundError(f"manifest not found: {manifest_path}")
    root = manifest_path.parent
    samples = []
    for line in manifest_path.read_text().splitlines():
        if not line.strip():
            continue
        rec = json.loads(line)
        samples.append(Sample(
            image=load_image(root / rec["image"]),
            mask=load_mask(root / rec["mask"]),
            edge=load_mask(root / rec["edge"]),
            kind=rec["kind"],
            seed=int(rec["seed"]),
        ))
    return samples
