#!/usr/bin/env python3
"""Writes the bundled log fixture: 200 steps, B=8, N=8, a checkpoint every 20."""

import json
import random
import sys
from pathlib import Path

STEPS, SAVE_EVERY, BATCH, ANSWERS, POOL, VAL_POOL = 200, 20, 8, 8, 150, 16


def answer(rng, step, sid, index, p_correct, hardness):
    rec = {"step": step, "sample_id": sid, "answer_index": index,
           "reward": 1.0 if rng.random() < p_correct else 0.0}
    n = rng.randint(1, 30)
    rec["num_tokens"] = n
    if rng.random() < 0.5:
        vals = [-round(rng.random() * 2 * hardness, 6) for _ in range(n)]
        if rng.random() < 0.05:
            vals[0] = 5e-7  # within the clamp tolerance
        rec["token_logprobs"] = vals
    else:
        rec["sum_logprob"] = -rng.random() * 2 * hardness * n
    if rng.random() < 0.1:
        rec["meta"] = {"trainer": "mock", "tags": [1, 2]}
    return rec


def main(out_dir):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rng = random.Random(20240611)
    hardness = [0.2 + 1.8 * rng.random() for _ in range(POOL)]
    train = []
    for step in range(1, STEPS + 1):
        progress = step / STEPS
        for q in rng.sample(range(POOL), BATCH):
            pc = min(1.0, max(0.0, 1.3 - hardness[q] * (0.8 - 0.4 * progress)))
            for a in range(ANSWERS):
                train.append(answer(rng, step, f"q{q}", a, pc, hardness[q]))
    rng.shuffle(train)
    val = []
    for cp in range(SAVE_EVERY, STEPS + 1, SAVE_EVERY):
        for v in range(VAL_POOL):
            pc = rng.random()
            for a in range(ANSWERS):
                val.append(answer(rng, cp, f"v{v}", a, pc, 1.0))
    with open(out / "train.jsonl", "w") as f:
        for r in train:
            f.write(json.dumps(r, separators=(",", ":")) + "\n")
    with open(out / "val.jsonl", "w") as f:
        for r in val:
            f.write(json.dumps(r, separators=(",", ":")) + "\n")
    manifest = {"n_per_question": ANSWERS, "batch_size": BATCH, "total_steps": STEPS,
                "save_every": SAVE_EVERY, "max_response_len": 1200}
    with open(out / "manifest.json", "w") as f:
        json.dump(manifest, f, indent=2)
        f.write("\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else Path(__file__).parent / "small")
