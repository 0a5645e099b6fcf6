# Copyright (c) 2026, the tabembed authors
# SPDX-License-Identifier: Apache-2.0
"""Smoke tests for the _tabembed extension module."""

import math
import sys

import _tabembed as te


def check(condition, message):
    if not condition:
        print("FAIL:", message)
        sys.exit(1)


def main():
    check(te.param_count_numerical("deep", d=8, layers=1, width=8) == 104,
          "numerical deep param count")
    check(te.param_count_numerical("none", d=8) == 0, "none param count")
    check(te.param_count_categorical("lookup", v=1000, d=16) == 16000,
          "lookup param count")
    check(te.param_count_categorical("deep", v=1000, d=16, d_hat=4,
                                     layers=1) == 4080,
          "categorical deep param count")

    check(te.auc([0.1, 0.4, 0.35, 0.8], [0, 0, 1, 1]) == 0.75, "auc value")
    check(te.binary_code_length(5) == 3, "binary code length")
    check(te.default_d_hat(16) == 2, "default d_hat")

    hc = te.handcrafted(1.0, 4)
    check(len(hc) == 4 and abs(hc[3] - math.log(2.0)) < 1e-12, "handcrafted")

    vec = te.embed_numerical("deep", 0.5, d=8, layers=1, width=8, seed=3)
    check(len(vec) == 8, "numerical embedding dim")
    again = te.embed_numerical("deep", 0.5, d=8, layers=1, width=8, seed=3)
    check(vec == again, "deterministic embedding")

    onehot = te.embed_categorical("onehot", 2, v=4)
    check(onehot == [0.0, 0.0, 1.0, 0.0], "onehot code")

    table = te.precompute_table(v=20, d=8, d_hat=2, seed=1)
    check(len(table) == 20 and len(table[0]) == 8, "precomputed table shape")
    row = te.embed_categorical("deep", 7, v=20, d=8, d_hat=2, seed=1)
    check(max(abs(a - b) for a, b in zip(table[7], row)) < 1e-12,
          "precompute equals live embedding")

    report = te.train_synth("numeric", n=500, seeds=1, max_epochs=2)
    check(0.0 <= report["test_auc_mean"] <= 1.0, "training auc in range")
    check(report["runs"] == 1, "run count")

    print("python smoke tests passed")


if __name__ == "__main__":
    main()
