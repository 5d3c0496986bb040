"""File formats: weight and trajectory CSV, 16-bit PGM images, key-value configs."""
from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

__all__ = [
    "fmt",
    "write_weights",
    "read_weights",
    "read_trajectory",
    "write_grid",
    "write_pgm",
    "read_pgm",
    "write_table",
    "parse_config",
    "ParseError",
]


class ParseError(ValueError):
    """Malformed input file; the message carries the 1-based line number."""


def fmt(value) -> str:
    """Scientific notation with 17 significant digits (round-trips float64)."""
    return f"{float(value):.16e}"


def write_weights(path, weights, band=None):
    """Write ``j, re(w_j), im(w_j)`` rows after a ``#`` metadata line."""
    w = np.asarray(weights.w, dtype=complex)
    meta = {"scheme": weights.scheme, "N": weights.sampling.N, "d": weights.sampling.d}
    band = band if band is not None else weights.band
    if band is not None:
        meta["M"] = band.M
    if weights.residual is not None:
        meta["residual_max_abs"] = fmt(weights.residual.max_abs)
    with open(path, "w", newline="") as fh:
        fh.write("# " + " ".join(f"{k}={v}" for k, v in meta.items()) + "\n")
        writer = csv.writer(fh)
        writer.writerow(["j", "re", "im"])
        for j, value in enumerate(w, start=1):
            writer.writerow([j, fmt(value.real), fmt(value.imag)])


def read_weights(path):
    """Return ``(metadata dict, complex weight array)`` from :func:`write_weights` output."""
    meta = {}
    values = []
    with open(path, newline="") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                for item in line[1:].split():
                    key, _, val = item.partition("=")
                    meta[key] = val
                continue
            if line.startswith("j,"):
                continue
            try:
                _, re, im = line.split(",")
                values.append(complex(float(re), float(im)))
            except ValueError as exc:
                raise ParseError(f"{path}:{lineno}: bad weight row {line!r}") from exc
    return meta, np.array(values, dtype=complex)


def read_trajectory(path) -> np.ndarray:
    """Read nodes from a CSV with header ``x1[,x2,...]``, one node per line."""
    rows = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = None
        for lineno, row in enumerate(reader, start=1):
            if not row or all(not c.strip() for c in row):
                continue
            if header is None:
                header = [c.strip() for c in row]
                expected = [f"x{i}" for i in range(1, len(header) + 1)]
                if header != expected:
                    raise ParseError(
                        f"{path}:{lineno}: header must be {','.join(expected)!r}, got {row!r}"
                    )
                continue
            if len(row) != len(header):
                raise ParseError(
                    f"{path}:{lineno}: expected {len(header)} columns, got {len(row)}"
                )
            try:
                rows.append([float(c) for c in row])
            except ValueError as exc:
                raise ParseError(f"{path}:{lineno}: not a number in {row!r}") from exc
    if header is None:
        raise ParseError(f"{path}: empty trajectory file")
    if not rows:
        raise ParseError(f"{path}: trajectory has a header but no points")
    return np.array(rows)


def write_grid(path, sampling):
    d = sampling.d
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"x{i}" for i in range(1, d + 1)])
        for p in sampling.points:
            writer.writerow([fmt(c) for c in p])


def write_pgm(path, image, vmin=None, vmax=None):
    """Write a 16-bit binary PGM, mapping ``[vmin, vmax]`` linearly to 0..65535.

    The range is stored in a sidecar ``<path>.txt``.
    """
    img = np.asarray(image, dtype=float)
    vmin = float(img.min()) if vmin is None else float(vmin)
    vmax = float(img.max()) if vmax is None else float(vmax)
    span = vmax - vmin
    scaled = np.zeros_like(img) if span <= 0 else (img - vmin) / span
    data = np.round(np.clip(scaled, 0, 1) * 65535).astype(">u2")
    h, w = img.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n65535\n".encode("ascii"))
        fh.write(data.tobytes())
    Path(str(path) + ".txt").write_text(f"min {fmt(vmin)}\nmax {fmt(vmax)}\n")


def read_pgm(path) -> np.ndarray:
    """Read back a 16-bit PGM written by :func:`write_pgm` (raw integer levels)."""
    raw = Path(path).read_bytes()
    parts = raw.split(maxsplit=4)
    if parts[0] != b"P5":
        raise ParseError(f"{path}: not a binary PGM")
    w, h, maxval = int(parts[1]), int(parts[2]), int(parts[3])
    dtype = ">u2" if maxval > 255 else "u1"
    return np.frombuffer(parts[4], dtype=dtype, count=w * h).reshape(h, w)


def write_table(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])


def parse_config(text, source="<config>") -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment.  Values stay strings."""
    out = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep or not key.strip():
            raise ParseError(f"{source}:{lineno}: expected 'key = value', got {line!r}")
        key = key.strip()
        if key in out:
            raise ParseError(f"{source}:{lineno}: duplicate key {key!r}")
        out[key] = value.strip()
    return out
