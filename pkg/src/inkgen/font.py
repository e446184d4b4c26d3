"""Single-stroke glyph font and synthetic corpus generation.

Each of the 26 lowercase glyphs is one continuous polyline (retraces
allowed) inside a unit-height box.  For corpus generation every character
is resampled to exactly ``POINTS_PER_CHAR`` points, so the points-per-
character ratio of a synthetic corpus is constant by construction; the
last point of a letter carries the pen-up flag, and a space is a run of
pen-up drift points covering one advance width (it draws nothing).
"""

from __future__ import annotations

import numpy as np

from inkgen.data import DataFormatError, InkSequence, TextSequence, Vocabulary

POINTS_PER_CHAR = 14
ADVANCE = 0.9

# vertex polylines, x right / y up, baseline at y=0, x-height ~0.66
GLYPHS = {
    "a": [(0.62, 0.58), (0.32, 0.66), (0.06, 0.50), (0.02, 0.22), (0.22, 0.02),
          (0.50, 0.04), (0.62, 0.20), (0.64, 0.62), (0.66, 0.02)],
    "b": [(0.06, 1.00), (0.06, 0.00), (0.06, 0.50), (0.35, 0.64), (0.60, 0.45),
          (0.60, 0.18), (0.35, 0.00), (0.06, 0.10)],
    "c": [(0.60, 0.52), (0.38, 0.66), (0.10, 0.56), (0.00, 0.32), (0.10, 0.08),
          (0.38, 0.00), (0.60, 0.12)],
    "d": [(0.60, 1.00), (0.60, 0.00), (0.60, 0.50), (0.32, 0.66), (0.05, 0.48),
          (0.05, 0.18), (0.30, 0.00), (0.60, 0.12)],
    "e": [(0.04, 0.36), (0.60, 0.40), (0.56, 0.58), (0.30, 0.68), (0.06, 0.54),
          (0.00, 0.30), (0.12, 0.06), (0.40, 0.00), (0.60, 0.10)],
    "f": [(0.56, 0.88), (0.40, 1.00), (0.26, 0.88), (0.24, 0.04), (0.26, 0.60),
          (0.04, 0.60), (0.50, 0.62)],
    "g": [(0.60, 0.60), (0.30, 0.66), (0.04, 0.50), (0.02, 0.22), (0.26, 0.08),
          (0.54, 0.16), (0.60, 0.42), (0.62, 0.64), (0.60, 0.10), (0.40, 0.00),
          (0.16, 0.04)],
    "h": [(0.06, 1.00), (0.06, 0.00), (0.06, 0.44), (0.32, 0.64), (0.56, 0.50),
          (0.60, 0.26), (0.60, 0.00)],
    "i": [(0.30, 0.92), (0.34, 0.96), (0.30, 0.64), (0.30, 0.04), (0.44, 0.00)],
    "j": [(0.48, 0.92), (0.52, 0.96), (0.48, 0.64), (0.50, 0.14), (0.34, 0.00),
          (0.12, 0.06), (0.04, 0.22)],
    "k": [(0.06, 1.00), (0.06, 0.00), (0.06, 0.34), (0.50, 0.64), (0.22, 0.40),
          (0.56, 0.00)],
    "l": [(0.28, 1.00), (0.28, 0.10), (0.38, 0.00), (0.50, 0.08)],
    "m": [(0.02, 0.00), (0.02, 0.64), (0.08, 0.60), (0.22, 0.66), (0.30, 0.50),
          (0.30, 0.00), (0.30, 0.50), (0.42, 0.66), (0.56, 0.60), (0.60, 0.44),
          (0.60, 0.00)],
    "n": [(0.06, 0.00), (0.06, 0.64), (0.10, 0.56), (0.34, 0.66), (0.56, 0.52),
          (0.60, 0.30), (0.60, 0.00)],
    "o": [(0.30, 0.66), (0.06, 0.52), (0.00, 0.26), (0.14, 0.04), (0.42, 0.00),
          (0.60, 0.16), (0.62, 0.44), (0.44, 0.64), (0.30, 0.66)],
    "p": [(0.06, 0.64), (0.06, 0.00), (0.06, 0.52), (0.34, 0.66), (0.58, 0.50),
          (0.56, 0.26), (0.30, 0.16), (0.06, 0.28)],
    "q": [(0.58, 0.66), (0.30, 0.64), (0.06, 0.48), (0.08, 0.20), (0.32, 0.10),
          (0.54, 0.20), (0.58, 0.44), (0.58, 0.66), (0.58, 0.00), (0.68, 0.12)],
    "r": [(0.08, 0.00), (0.08, 0.64), (0.10, 0.48), (0.30, 0.66), (0.54, 0.56)],
    "s": [(0.56, 0.56), (0.32, 0.66), (0.08, 0.56), (0.10, 0.38), (0.44, 0.30),
          (0.54, 0.14), (0.34, 0.00), (0.06, 0.08)],
    "t": [(0.26, 0.96), (0.26, 0.62), (0.06, 0.62), (0.48, 0.62), (0.26, 0.62),
          (0.26, 0.10), (0.40, 0.00), (0.54, 0.10)],
    "u": [(0.04, 0.64), (0.02, 0.18), (0.18, 0.00), (0.46, 0.06), (0.56, 0.28),
          (0.58, 0.64), (0.60, 0.00)],
    "v": [(0.02, 0.64), (0.30, 0.00), (0.58, 0.64)],
    "w": [(0.00, 0.64), (0.14, 0.00), (0.30, 0.50), (0.46, 0.00), (0.60, 0.64)],
    "x": [(0.02, 0.64), (0.56, 0.00), (0.30, 0.32), (0.04, 0.00), (0.58, 0.64)],
    "y": [(0.02, 0.64), (0.28, 0.16), (0.56, 0.64), (0.28, 0.16), (0.18, 0.00),
          (0.02, 0.06)],
    "z": [(0.04, 0.64), (0.56, 0.64), (0.06, 0.00), (0.58, 0.00)],
}

LETTERS = "".join(sorted(GLYPHS))


def resample_polyline(points, n):
    """Uniform arc-length resampling of an (m, 2) polyline to n points."""
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 2:
        raise DataFormatError(f"polyline must be (m>=2, 2), got {pts.shape}")
    seg = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    total = cum[-1]
    if total <= 0:
        return np.repeat(pts[:1], n, axis=0)
    targets = np.linspace(0.0, total, n)
    x = np.interp(targets, cum, pts[:, 0])
    y = np.interp(targets, cum, pts[:, 1])
    return np.stack([x, y], axis=1)


_glyph_cache = {}


def glyph_points(char):
    """The resampled (POINTS_PER_CHAR, 2) template for one letter."""
    pts = _glyph_cache.get(char)
    if pts is None:
        try:
            poly = GLYPHS[char]
        except KeyError:
            raise DataFormatError(f"no glyph for character {char!r}") from None
        pts = resample_polyline(poly, POINTS_PER_CHAR)
        pts.setflags(write=False)
        _glyph_cache[char] = pts
    return pts


def render_text_strokes(text, scale=1.0, slant=0.0):
    """Noise-free absolute points and pen flags for a text string.

    Returns (abs_points (L, 2), pen_up (L,)); L = POINTS_PER_CHAR * len(text).
    """
    coords = []
    flags = []
    origin_x = 0.0
    for ch in text:
        if ch == " ":
            frac = (np.arange(POINTS_PER_CHAR) + 1.0) / POINTS_PER_CHAR
            xs = origin_x + ADVANCE * frac
            coords.append(np.stack([xs, np.zeros(POINTS_PER_CHAR)], axis=1))
            flags.append(np.ones(POINTS_PER_CHAR))
        else:
            pts = glyph_points(ch) + np.array([origin_x, 0.0])
            coords.append(pts)
            f = np.zeros(POINTS_PER_CHAR)
            f[-1] = 1.0
            flags.append(f)
        origin_x += ADVANCE
    abs_pts = np.concatenate(coords, axis=0)
    pen_up = np.concatenate(flags)
    abs_pts = abs_pts.copy()
    abs_pts[:, 0] += slant * abs_pts[:, 1]
    abs_pts *= scale
    return abs_pts, pen_up


def text_to_ink(text, rng=None, jitter=0.0, scale=1.0, slant=0.0):
    """Offsets-and-pen-state ink for a text, with optional offset jitter."""
    abs_pts, pen_up = render_text_strokes(text, scale=scale, slant=slant)
    offsets = np.diff(abs_pts, axis=0, prepend=np.zeros((1, 2)))
    if jitter > 0:
        if rng is None:
            raise DataFormatError("jitter > 0 requires an rng")
        offsets = offsets + rng.normal(0.0, jitter, size=offsets.shape)
    return InkSequence(np.column_stack([offsets, pen_up]))


def random_text(rng, alphabet, min_word_len=2, max_word_len=8, max_words=1):
    words = []
    for _ in range(int(rng.integers(1, max_words + 1))):
        length = int(rng.integers(min_word_len, max_word_len + 1))
        words.append("".join(rng.choice(list(alphabet), size=length)))
    return " ".join(words)


def synth_corpus(
    alphabet,
    n_samples,
    seed,
    jitter,
    vocab=None,
    min_word_len=2,
    max_word_len=8,
    max_words=1,
    scale_spread=0.1,
    slant_spread=0.12,
    texts=None,
):
    """Deterministic synthetic corpus over the segment font.

    Every sample gets its own rng derived from (seed, index), a per-sample
    uniform scale in 1 +- scale_spread and shear in +- slant_spread, and
    additive Gaussian jitter of width ``jitter`` on the offsets.  When
    ``texts`` is given it overrides random word sampling (lengths still
    validated against the alphabet).
    """
    if not alphabet:
        raise DataFormatError("alphabet must be nonempty")
    if jitter < 0:
        raise DataFormatError("jitter must be >= 0")
    vocab = vocab if vocab is not None else Vocabulary()
    missing = [c for c in alphabet if c not in vocab.char_to_id]
    if missing:
        raise DataFormatError(f"alphabet characters missing from vocabulary: {missing!r}")
    unknown = [c for c in alphabet if c != " " and c not in GLYPHS]
    if unknown:
        raise DataFormatError(f"no glyphs for characters {unknown!r}")
    corpus = []
    for i in range(n_samples):
        rng = np.random.default_rng((seed, i))
        if texts is not None:
            text = texts[i % len(texts)]
        else:
            text = random_text(
                rng,
                [c for c in alphabet if c != " "],
                min_word_len=min_word_len,
                max_word_len=max_word_len,
                max_words=max_words,
            )
        scale = 1.0 + float(rng.uniform(-scale_spread, scale_spread))
        slant = float(rng.uniform(-slant_spread, slant_spread))
        ink = text_to_ink(text, rng=rng, jitter=jitter, scale=scale, slant=slant)
        corpus.append((TextSequence(text, vocab), ink))
    return corpus
