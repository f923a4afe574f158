"""Stylometric authorship attribution with subword tokenization.

Subpackages: corpus loading/splitting, byte-pair tokenizer, autodiff tensor
core, the BLSTM + 2D-CNN classifier, the training harness, and a CLI.
"""

__version__ = "0.1.0"
