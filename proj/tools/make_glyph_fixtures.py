#!/usr/bin/env python3
"""Regenerates the bundled glyph benchmark and the small test fixtures.

data/glyphs/
  templates/      one 32x32 grayscale glyph per class
  regularization/ a few perturbed copies per class
  heldout/        20 perturbed copies per class, used only for scoring
  *.txt           gol manifests

The perturbation here is deliberately written independently of the C++
generator (different transforms, parameterization and RNG) so the held-out
set is not drawn from the search space the trainer explores.
"""

import argparse
import math
from pathlib import Path

import numpy as np
from PIL import Image, ImageDraw, ImageFilter

SIZE = 32
SUPER = 4  # draw at 4x and downsample for anti-aliased edges
CLASSES = ["ring", "triangle", "cross", "bars", "square"]


def draw_glyph(name):
    n = SIZE * SUPER
    img = Image.new("L", (n, n), 0)
    d = ImageDraw.Draw(img)
    c, r, w = n / 2, n * 0.34, int(n * 0.09)
    if name == "ring":
        d.ellipse([c - r, c - r, c + r, c + r], outline=255, width=w)
    elif name == "triangle":
        d.polygon([(c, c - r), (c + r, c + r * 0.8), (c - r, c + r * 0.8)], fill=255)
    elif name == "cross":
        d.line([(c - r, c - r), (c + r, c + r)], fill=255, width=w)
        d.line([(c - r, c + r), (c + r, c - r)], fill=255, width=w)
    elif name == "bars":
        for k in (-1, 0, 1):
            y = c + k * r * 0.7
            d.rectangle([c - r, y - w / 2, c + r, y + w / 2], fill=255)
    elif name == "square":
        d.rectangle([c - r, c - r, c + r, c + r], outline=255, width=w)
    else:
        raise ValueError(name)
    return img.resize((SIZE, SIZE), Image.LANCZOS)


def perturb(img, rng):
    angle = rng.uniform(-20, 20)
    scale = rng.uniform(0.85, 1.15)
    tx, ty = rng.uniform(-3, 3, size=2)
    a = math.radians(angle)
    ca, sa = math.cos(a) / scale, math.sin(a) / scale
    cx = cy = SIZE / 2
    # PIL wants the output->input map.
    coeffs = (ca, sa, cx - ca * (cx + tx) - sa * (cy + ty), -sa, ca, cy + sa * (cx + tx) - ca * (cy + ty))
    out = img.transform((SIZE, SIZE), Image.AFFINE, coeffs, resample=Image.BILINEAR, fillcolor=0)
    out = out.filter(ImageFilter.GaussianBlur(rng.uniform(0.0, 1.0)))
    x = np.asarray(out, dtype=np.float64) / 255.0
    lo, hi = rng.uniform(0.0, 0.3), rng.uniform(0.65, 1.0)
    x = lo + (hi - lo) * x
    x += rng.normal(0.0, 0.03, size=x.shape)
    return Image.fromarray(np.clip(np.rint(x * 255.0), 0, 255).astype(np.uint8), "L")


def write_set(root, sub, items):
    lines = ["gol-manifest 1"]
    for label, idx, img in items:
        rel = f"{sub}/{CLASSES[label]}_{idx:03d}.png"
        (root / rel).parent.mkdir(parents=True, exist_ok=True)
        img.save(root / rel)
        lines.append(f"{rel}\t{label}\t{CLASSES[label]}")
    return lines


def write_manifest(path, lines):
    path.write_text("\n".join(lines) + "\n")


def make_glyphs(root, reg_per_class, heldout_per_class, seed):
    root.mkdir(parents=True, exist_ok=True)
    templates = [draw_glyph(n) for n in CLASSES]
    rng_reg = np.random.default_rng(seed)
    rng_held = np.random.default_rng(seed + 1)
    t = write_set(root, "templates", [(k, 0, templates[k]) for k in range(len(CLASSES))])
    e = write_set(root, "regularization",
                  [(k, j, perturb(templates[k], rng_reg)) for k in range(len(CLASSES)) for j in range(reg_per_class)])
    h = write_set(root, "heldout",
                  [(k, j, perturb(templates[k], rng_held)) for k in range(len(CLASSES)) for j in range(heldout_per_class)])
    write_manifest(root / "templates.txt", t)
    write_manifest(root / "regularization.txt", e)
    write_manifest(root / "heldout.txt", h)
    # Two-class subset for quick smoke runs.
    write_manifest(root / "templates2.txt", [t[0]] + [l for l in t[1:] if l.split("\t")[1] in ("0", "1")])
    write_manifest(root / "regularization2.txt", [e[0]] + [l for l in e[1:] if l.split("\t")[1] in ("0", "1")])


def write_ppm(path, w, h, rgb):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(f"P6\n{w} {h}\n255\n".encode() + bytes(rgb))


def make_test_fixtures(root):
    # 3x2 RGB with bytes chosen so each channel is distinguishable by hand.
    write_ppm(root / "tiny.ppm", 3, 2,
              [255, 0, 0, 0, 255, 0, 0, 0, 255,
               0, 0, 0, 128, 64, 32, 255, 255, 255])
    # Minimal GTSRB-style tree: two classes, two annotated images each.
    rng = np.random.default_rng(7)
    rows = {0: [("00000.ppm", 29, 30, 5, 6, 24, 25), ("00001.ppm", 31, 33, 5, 5, 26, 28)],
            1: [("00000.ppm", 40, 38, 4, 3, 35, 34), ("00001.ppm", 30, 30, 3, 3, 26, 26)]}
    for cls, items in rows.items():
        d = root / "gtsrb" / f"{cls:05d}"
        lines = ["Filename;Width;Height;Roi.X1;Roi.Y1;Roi.X2;Roi.Y2;ClassId"]
        for name, w, h, x1, y1, x2, y2 in items:
            write_ppm(d / name, w, h, rng.integers(0, 256, size=w * h * 3, dtype=np.uint8).tolist())
            lines.append(f"{name};{w};{h};{x1};{y1};{x2};{y2};{cls}")
        (d / f"GT-{cls:05d}.csv").write_text("\n".join(lines) + "\n")


def main():
    here = Path(__file__).resolve().parent.parent
    ap = argparse.ArgumentParser()
    ap.add_argument("--glyphs", type=Path, default=here / "data" / "glyphs")
    ap.add_argument("--fixtures", type=Path, default=here / "tests" / "fixtures")
    ap.add_argument("--regularization-per-class", type=int, default=5)
    ap.add_argument("--heldout-per-class", type=int, default=20)
    ap.add_argument("--seed", type=int, default=20240611)
    args = ap.parse_args()
    make_glyphs(args.glyphs, args.regularization_per_class, args.heldout_per_class, args.seed)
    make_test_fixtures(args.fixtures)


if __name__ == "__main__":
    main()
