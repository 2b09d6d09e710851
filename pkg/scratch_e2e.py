"""Scratch: validate the criterion-6 experimental design across seeds."""
import shutil
import time
from pathlib import Path

import numpy as np

import topicalign as ta
from topicalign.cli import PipelineConfig, run_pipeline
from topicalign import alignment, evaluation, topics as topics_mod
from topicalign.corpus import Vocabulary

MONEY = ["money", "loan", "cash", "credit", "deposit", "teller", "vault",
         "interest", "account", "savings"]
WATER = ["river", "water", "shore", "fish", "stream", "boat", "mud",
         "current", "reed", "tide"]
NEUTRAL = ["the", "a", "old", "big", "near", "town", "people", "day",
           "good", "long", "small", "new", "place", "time", "way", "side",
           "end", "part", "thing", "year", "man", "woman", "child", "house"]
CONTROLS = ["person", "story", "window", "garden"]


def make_corpus(seed: int, docs_per_theme: int = 40, sents_per_doc: int = 10):
    rng = np.random.default_rng(seed)
    lines = []
    for theme in (MONEY, WATER):
        for _ in range(docs_per_theme):
            for _ in range(sents_per_doc):
                r = rng.random()
                if r < 0.25:
                    # control sentence: neutral companions only, both themes
                    ctrl = CONTROLS[rng.integers(len(CONTROLS))]
                    toks = list(rng.choice(NEUTRAL, size=7)) + [ctrl]
                elif r < 0.55:
                    # themed sentence featuring the polysemous word
                    toks = (["bank"] + list(rng.choice(theme, size=4))
                            + list(rng.choice(NEUTRAL, size=3)))
                else:
                    toks = list(rng.choice(theme, size=5)) + list(rng.choice(NEUTRAL, size=3))
                rng.shuffle(toks)
                lines.append(" ".join(toks))
            lines.append("")  # document boundary
    return "\n".join(lines)


def run_seed(seed: int, outbase: Path):
    outdir = outbase / f"seed_{seed}"
    if outdir.exists():
        shutil.rmtree(outdir)
    outdir.mkdir(parents=True)
    corpus_file = outdir / "corpus.txt"
    corpus_file.write_text(make_corpus(seed), encoding="utf-8")
    config = PipelineConfig(
        corpus=str(corpus_file), outdir=str(outdir), topics=2, threshold=0.1,
        dim=16, window=5, anchors=20, components=0, min_count=1, negative=5,
        epochs=12, learning_rate=0.05, alpha="0.1", lda_iterations=300,
        infer_iterations=50, lda_seed=seed, partition_seed=seed,
        embed_seed=seed, smooth_seed=seed)
    t0 = time.time()
    run_pipeline(config, log=lambda *a, **k: None)
    elapsed = time.time() - t0

    vocab = Vocabulary.load(outdir / "vocab.tsv")
    lda = topics_mod.TopicModel.load(outdir / "lda.model", vocab)
    model = alignment.load_model(outdir / "utdsm.txt")

    # (a) cross-topic similarity: polysemous < monosemous controls
    bank_sim = ta.cross_topic_similarity(model, "bank", 0, 1)
    ctrl_sims = [ta.cross_topic_similarity(model, c, 0, 1)
                 for c in CONTROLS if set(model.available_topics(c)) == {0, 1}]
    part_a = bool(ctrl_sims) and bank_sim < min(ctrl_sims)

    # (b) MaxSimC theme-consistent vs inconsistent
    rng = np.random.default_rng(seed + 999)
    c_money = ["bank"] + list(rng.choice(MONEY, size=4)) + list(rng.choice(NEUTRAL, size=3))
    c_water = ["bank"] + list(rng.choice(WATER, size=4)) + list(rng.choice(NEUTRAL, size=3))
    c_money2 = ["loan"] + list(rng.choice(MONEY, size=4)) + list(rng.choice(NEUTRAL, size=3))
    c_water2 = ["fish"] + list(rng.choice(WATER, size=4)) + list(rng.choice(NEUTRAL, size=3))
    mm = evaluation.max_sim_c("bank", c_money, "loan", c_money2, model, lda, seed=1)
    mw = evaluation.max_sim_c("bank", c_money, "fish", c_water2, model, lda, seed=1)
    wm = evaluation.max_sim_c("bank", c_water, "loan", c_money2, model, lda, seed=1)
    ww = evaluation.max_sim_c("bank", c_water, "fish", c_water2, model, lda, seed=1)
    part_b = (mm > mw) and (ww > wm)

    print(f"seed {seed}: {elapsed:5.1f}s  bank={bank_sim:+.3f} "
          f"ctrl_min={min(ctrl_sims) if ctrl_sims else float('nan'):+.3f} "
          f"A={'pass' if part_a else 'FAIL'}  "
          f"mm={mm:+.3f} mw={mw:+.3f} ww={ww:+.3f} wm={wm:+.3f} "
          f"B={'pass' if part_b else 'FAIL'}")
    return part_a, part_b


if __name__ == "__main__":
    base = Path("/tmp/e2e_scratch")
    results = [run_seed(s, base) for s in range(10)]
    a_wins = sum(a for a, _ in results)
    b_wins = sum(b for _, b in results)
    print(f"part (a): {a_wins}/10   part (b): {b_wins}/10")
