"""Ink and text data model: stroke sequences, vocabulary, normalization,
and the JSONL ingestion format.

On-disk sample format (one JSON object per line)::

    {"text": "hello", "points": [[dx, dy, s], ...]}

Offsets are pen movements relative to the previous point; ``s`` is the pen
state after the point (0 = down, 1 = up, i.e. the point ends its stroke).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

PAD = "<pad>"
UNK = "<unk>"

DEFAULT_CHARS = " abcdefghijklmnopqrstuvwxyz0123456789.,'!?-:;\""


class VocabularyError(KeyError):
    pass


class DataFormatError(ValueError):
    pass


@dataclass(frozen=True)
class StrokePoint:
    """One pen movement: offsets plus the pen state after the move."""

    dx: float
    dy: float
    pen_up: int

    def __post_init__(self):
        if self.pen_up not in (0, 1):
            raise DataFormatError(f"pen state must be 0 or 1, got {self.pen_up}")
        if not (np.isfinite(self.dx) and np.isfinite(self.dy)):
            raise DataFormatError("stroke offsets must be finite")


class InkSequence:
    """Ordered stroke points stored as an (L, 3) float64 array."""

    __slots__ = ("points",)

    def __init__(self, points):
        arr = np.asarray(points, dtype=np.float64)
        if arr.ndim != 2 or arr.shape[1] != 3:
            raise DataFormatError(f"ink array must be (L, 3), got {arr.shape}")
        if arr.shape[0] < 1:
            raise DataFormatError("ink sequence must contain at least one point")
        if not np.all(np.isfinite(arr[:, :2])):
            raise DataFormatError("ink offsets must be finite")
        s = arr[:, 2]
        if not np.all((s == 0.0) | (s == 1.0)):
            raise DataFormatError("pen states must be 0 or 1")
        self.points = arr

    def __len__(self):
        return self.points.shape[0]

    def __iter__(self):
        for dx, dy, s in self.points:
            yield StrokePoint(float(dx), float(dy), int(s))

    def __eq__(self, other):
        return isinstance(other, InkSequence) and np.array_equal(self.points, other.points)

    def pen_up_count(self):
        return int(np.sum(self.points[:, 2]))

    def absolute(self):
        """Cumulative-summed (L, 2) absolute coordinates from origin (0, 0)."""
        return np.cumsum(self.points[:, :2], axis=0)

    def to_list(self):
        return [[float(dx), float(dy), int(s)] for dx, dy, s in self.points]


class Vocabulary:
    """Fixed char->index map with reserved PAD (0) and UNK (1) entries."""

    def __init__(self, chars=DEFAULT_CHARS, allow_unk=True):
        chars = list(dict.fromkeys(chars))
        self.id_to_char = [PAD, UNK] + chars
        self.char_to_id = {c: i for i, c in enumerate(self.id_to_char)}
        if len(self.char_to_id) != len(self.id_to_char):
            raise VocabularyError("duplicate characters in vocabulary")
        self.allow_unk = allow_unk

    def __len__(self):
        return len(self.id_to_char)

    @property
    def pad_id(self):
        return 0

    @property
    def unk_id(self):
        return 1

    def encode(self, text):
        ids = []
        for ch in text:
            idx = self.char_to_id.get(ch)
            if idx is None:
                if not self.allow_unk:
                    raise VocabularyError(f"character {ch!r} not in vocabulary")
                idx = self.unk_id
            ids.append(idx)
        return np.asarray(ids, dtype=np.int64)

    def chars(self):
        """Regular characters (specials excluded), in index order."""
        return self.id_to_char[2:]

    def save(self, path):
        # one character per line, sorted; specials are implicit on load
        Path(path).write_text(
            "".join(c + "\n" for c in sorted(self.chars())), encoding="utf-8"
        )

    @classmethod
    def load(cls, path, allow_unk=True):
        chars = []
        for line in Path(path).read_text(encoding="utf-8").splitlines():
            if line == "":
                continue
            if len(line) != 1:
                raise DataFormatError(f"vocabulary line must hold one character, got {line!r}")
            chars.append(line)
        return cls(chars, allow_unk=allow_unk)


class TextSequence:
    """Character tokens plus their vocabulary indices."""

    __slots__ = ("chars", "ids")

    def __init__(self, text, vocab):
        if len(text) < 1:
            raise DataFormatError("text must contain at least one character")
        self.chars = text
        self.ids = vocab.encode(text)

    def __len__(self):
        return len(self.ids)

    def __eq__(self, other):
        return isinstance(other, TextSequence) and self.chars == other.chars


@dataclass
class NormalizationStats:
    """Offset standardization constants plus the stroke-points-per-character
    ratio estimated from the training corpus."""

    mean_dx: float
    mean_dy: float
    std_dx: float
    std_dy: float
    r: float

    def __post_init__(self):
        if self.std_dx <= 0 or self.std_dy <= 0:
            raise DataFormatError("normalization stds must be positive")
        if self.r <= 0:
            raise DataFormatError("points-per-character ratio must be positive")

    @classmethod
    def from_corpus(cls, corpus):
        if not corpus:
            raise DataFormatError("cannot estimate stats from an empty corpus")
        offsets = np.concatenate([ink.points[:, :2] for _, ink in corpus], axis=0)
        mean = offsets.mean(axis=0)
        std = offsets.std(axis=0)
        std = np.where(std < 1e-12, 1.0, std)
        return cls(
            mean_dx=float(mean[0]),
            mean_dy=float(mean[1]),
            std_dx=float(std[0]),
            std_dy=float(std[1]),
            r=estimate_r(corpus),
        )

    def to_dict(self):
        return {
            "mean_dx": self.mean_dx,
            "mean_dy": self.mean_dy,
            "std_dx": self.std_dx,
            "std_dy": self.std_dy,
            "r": self.r,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(**{k: float(d[k]) for k in ("mean_dx", "mean_dy", "std_dx", "std_dy", "r")})

    def save(self, path):
        Path(path).write_text(json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n")

    @classmethod
    def load(cls, path):
        return cls.from_dict(json.loads(Path(path).read_text()))


def one_hot(text, vocab):
    """(T, |V|) one-hot rows for a TextSequence."""
    out = np.zeros((len(text), len(vocab)), dtype=np.float64)
    out[np.arange(len(text)), text.ids] = 1.0
    return out


def normalize(ink, stats):
    """Standardize offsets; pen states pass through untouched."""
    pts = ink.points.copy()
    pts[:, 0] = (pts[:, 0] - stats.mean_dx) / stats.std_dx
    pts[:, 1] = (pts[:, 1] - stats.mean_dy) / stats.std_dy
    return InkSequence(pts)


def denormalize(ink, stats):
    pts = ink.points.copy()
    pts[:, 0] = pts[:, 0] * stats.std_dx + stats.mean_dx
    pts[:, 1] = pts[:, 1] * stats.std_dy + stats.mean_dy
    return InkSequence(pts)


def estimate_r(corpus):
    """Average stroke points per character: total points / total characters."""
    if not corpus:
        raise DataFormatError("cannot estimate r from an empty corpus")
    total_points = sum(len(ink) for _, ink in corpus)
    total_chars = sum(len(text) for text, _ in corpus)
    return total_points / total_chars


def save_ink_jsonl(path, corpus):
    with open(path, "w", encoding="utf-8") as fh:
        for text, ink in corpus:
            fh.write(json.dumps({"text": text.chars, "points": ink.to_list()}) + "\n")


def load_ink_jsonl(path, vocab):
    """Parse a JSONL ink file; malformed lines are reported with their
    1-based line number."""
    samples = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as err:
                raise DataFormatError(f"{path}:{lineno}: invalid JSON ({err.msg})") from None
            try:
                if not isinstance(obj, dict) or "text" not in obj or "points" not in obj:
                    raise DataFormatError('expected {"text": ..., "points": ...}')
                text = obj["text"]
                if not isinstance(text, str) or not text:
                    raise DataFormatError("text must be a nonempty string")
                pts = obj["points"]
                if not isinstance(pts, list) or not pts:
                    raise DataFormatError("points must be a nonempty list")
                for p in pts:
                    if not (isinstance(p, list) and len(p) == 3):
                        raise DataFormatError(f"point must be [dx, dy, s], got {p!r}")
                    if p[2] not in (0, 1):
                        raise DataFormatError(f"pen state must be 0 or 1, got {p[2]!r}")
                samples.append((TextSequence(text, vocab), InkSequence(pts)))
            except DataFormatError as err:
                raise DataFormatError(f"{path}:{lineno}: {err}") from None
    return samples


def load_prompts_jsonl(path):
    """Evaluation prompt file: one {"text": str} object per line."""
    prompts = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as err:
                raise DataFormatError(f"{path}:{lineno}: invalid JSON ({err.msg})") from None
            if not isinstance(obj, dict) or not isinstance(obj.get("text"), str) or not obj["text"]:
                raise DataFormatError(f"{path}:{lineno}: expected {{\"text\": nonempty str}}")
            prompts.append(obj["text"])
    return prompts
