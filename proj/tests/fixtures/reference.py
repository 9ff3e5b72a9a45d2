#!/usr/bin/env python3
"""Brute-force scorer used to produce golden reports.

usage: reference.py LOG MANIFEST STRATEGY P DELTA [VAL_LOG]

Prints `checkpoint_step,strategy,value` like `ugcs score`.
"""

import json
import math
import sys
from collections import defaultdict

TOLERANCE = 1e-6


def answer_anll(rec):
    if "token_logprobs" in rec:
        total = sum(0.0 if 0 < v <= TOLERANCE else v for v in rec["token_logprobs"])
    else:
        v = rec["sum_logprob"]
        total = 0.0 if 0 < v <= TOLERANCE else v
    return -total / rec["num_tokens"]


def load_samples(path):
    groups = defaultdict(list)
    with open(path) as f:
        for line in f:
            if line.strip():
                rec = json.loads(line)
                groups[(rec["step"], rec["sample_id"])].append(rec)
    samples = []
    for (step, sid), answers in sorted(groups.items(), key=lambda kv: (kv[0][0], kv[0][1].encode())):
        reward = sum(a["reward"] for a in answers) / len(answers)
        diff = sum(answer_anll(a) for a in answers) / len(answers)
        samples.append((step, sid, reward, diff))
    return samples


def k_of(p, m):
    return min(m, max(1, math.ceil(p * m / 100.0)))


def main(argv):
    log, manifest_path, strategy, p, delta = argv[1], argv[2], argv[3], float(argv[4]), int(argv[5])
    with open(manifest_path) as f:
        manifest = json.load(f)
    checkpoints = manifest.get("checkpoint_steps") or list(
        range(manifest["save_every"], manifest["total_steps"] + 1, manifest["save_every"]))
    samples = load_samples(log)
    val = load_samples(argv[6]) if len(argv) > 6 else []
    print("checkpoint_step,strategy,value")
    for c in checkpoints:
        lo = max(1, c - delta)
        window = [s for s in samples if lo <= s[0] < c]
        if strategy == "last_checkpoint":
            value = 1.0 if c == checkpoints[-1] else 0.0
        elif strategy == "val_reward":
            rs = [s[2] for s in val if s[0] == c]
            value = sum(rs) / len(rs)
        elif not window:
            continue
        elif strategy == "train_reward":
            value = sum(s[2] for s in window) / len(window)
        elif strategy == "ugcs":
            ranked = sorted(window, key=lambda s: (-s[3], s[0], s[1].encode()))
            top = ranked[:k_of(p, len(window))]
            value = sum(s[2] for s in top) / len(top)
        elif strategy == "top_reward":
            ranked = sorted(window, key=lambda s: -s[2])
            top = ranked[:k_of(p, len(window))]
            value = sum(s[2] for s in top) / len(top)
        else:
            raise SystemExit(f"unknown strategy {strategy}")
        print(f"{c},{strategy},{value!r}")


if __name__ == "__main__":
    main(sys.argv)
