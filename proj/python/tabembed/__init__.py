# Copyright (c) 2026, the tabembed authors
# SPDX-License-Identifier: Apache-2.0
"""Learned feature embeddings for tabular data."""

from ._tabembed import (
    auc,
    binary_code_length,
    default_d_hat,
    embed_categorical,
    embed_numerical,
    handcrafted,
    param_count_categorical,
    param_count_numerical,
    precompute_table,
    train_synth,
)

__all__ = [
    "auc",
    "binary_code_length",
    "default_d_hat",
    "embed_categorical",
    "embed_numerical",
    "handcrafted",
    "param_count_categorical",
    "param_count_numerical",
    "precompute_table",
    "train_synth",
]
