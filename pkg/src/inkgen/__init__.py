"""Transformer encoder-decoder ink synthesis at desk scale.

Subpackage map:

- ``autodiff`` / ``optim`` / ``checkpoint`` / ``_kernels``: dense float64
  tensor math with taped reverse-mode differentiation and Adam.
- ``data`` / ``font``: stroke and text data model, synthetic glyph corpus.
- ``model``: encoder-decoder with scaled sinusoidal positions and the
  monotonic Gaussian cross-attention mask.
- ``mdn``: bivariate Gaussian mixture output head, loss and sampling.
- ``pipeline``: training loop, autoregressive generation, top-k selection.
- ``metrics`` / ``recognizer`` / ``evaluate`` / ``render``: CER/WER,
  template recognizer, evaluation reports, SVG output.
- ``cli``: the ``inkgen`` command.
"""

__version__ = "0.1.0"
