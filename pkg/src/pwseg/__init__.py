"""Chinese word segmentation with character, Pinyin and Wubi unit embeddings.

BMES character tagging with a Bi-LSTM-CRF backbone and three fusion variants
for the auxiliary Pinyin/Wubi unit streams (independent encoders, FC-fused
inputs, and a shared encoder).
"""

__version__ = "0.1.0"
