"""Command-line pipeline and analysis tools.

Subcommands cover the four pipeline stages (lda-train, partition,
embed-train, anchors + align, smooth), evaluation (eval-scws, features,
classify), analysis (analyze neighbors|pca|cross-sim) and orchestration
(pipeline run|validate). ``pipeline run`` persists every intermediate as
plain text together with a manifest of file digests; finished stages are
skipped on rerun and identical configs yield byte-identical artifacts.
"""

from __future__ import annotations

import argparse
import dataclasses
import glob as globlib
import hashlib
import json
import os
import sys
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from . import alignment
from . import anchors as anchors_mod
from . import corpus as corpus_mod
from . import embeddings as emb_mod
from . import evaluation
from . import smoothing
from . import topics as topics_mod


class PipelineError(RuntimeError):
    pass


@dataclass
class PipelineConfig:
    """Settings for a full pipeline run; defaults follow the documented
    experimental setup (K=50, threshold 0.1, window 5, |A|=5000)."""
    corpus: str = ""
    outdir: str = ""
    topics: int = 50
    threshold: float = 0.1
    dim: int = 300
    window: int = 5
    anchors: int = 5000
    components: int = 0          # 0 disables smoothing
    min_count: int = 5
    negative: int = 5
    epochs: int = 5
    learning_rate: float = 0.025
    alpha: str = "auto"          # "auto" = 50/K
    beta: float = 0.01
    lda_iterations: int = 1000
    infer_iterations: int = 50
    block_rows: int = 256
    lda_seed: int = 1
    partition_seed: int = 0
    embed_seed: int = 1
    smooth_seed: int = 1


def default_outdir() -> str:
    return os.environ.get("TOPICALIGN_OUTDIR", "runs")


def load_config_file(path: str | Path) -> dict[str, str]:
    """Flat ``key = value`` format; '#' starts a comment."""
    values: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for ln, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{ln}: expected 'key = value'")
            key, value = line.split("=", 1)
            values[key.strip()] = value.strip()
    return values


def make_config(file_values: dict[str, str] | None = None,
                **overrides) -> PipelineConfig:
    """Build a config from file values plus overrides (overrides win)."""
    fields = {f.name: f for f in dataclasses.fields(PipelineConfig)}
    merged: dict = {}
    for key, raw in (file_values or {}).items():
        if key not in fields:
            raise ValueError(f"unknown config key {key!r}")
        ftype = fields[key].type
        if ftype == "int":
            merged[key] = int(raw)
        elif ftype == "float":
            merged[key] = float(raw)
        else:
            merged[key] = raw
    for key, value in overrides.items():
        if value is not None:
            merged[key] = value
    config = PipelineConfig(**merged)
    if not config.outdir:
        config.outdir = default_outdir()
    return config


def validate_config(config: PipelineConfig) -> tuple[list[str], list[str]]:
    """Range checks; returns (errors, warnings)."""
    errors, warns = [], []
    if config.topics < 1:
        errors.append(f"topics must be >= 1 (got {config.topics})")
    if not 0 < config.threshold < 1:
        errors.append(f"threshold must be in (0, 1) (got {config.threshold})")
    if config.dim < 2:
        errors.append(f"dim must be >= 2 (got {config.dim})")
    if config.anchors < 1:
        errors.append(f"anchors must be >= 1 (got {config.anchors})")
    if config.components < 0:
        errors.append(f"components must be >= 0 (got {config.components})")
    if config.min_count < 1:
        errors.append(f"min_count must be >= 1 (got {config.min_count})")
    if config.window < 1:
        errors.append(f"window must be >= 1 (got {config.window})")
    if config.negative < 0:
        errors.append(f"negative must be >= 0 (got {config.negative})")
    if config.epochs < 0:
        errors.append(f"epochs must be >= 0 (got {config.epochs})")
    if config.learning_rate <= 0:
        errors.append(f"learning_rate must be positive (got {config.learning_rate})")
    if config.lda_iterations < 1:
        errors.append(f"lda_iterations must be >= 1 (got {config.lda_iterations})")
    if config.infer_iterations < 1:
        errors.append(f"infer_iterations must be >= 1 (got {config.infer_iterations})")
    if config.block_rows < 1:
        errors.append(f"block_rows must be >= 1 (got {config.block_rows})")
    if config.alpha != "auto":
        try:
            if float(config.alpha) <= 0:
                errors.append("alpha must be positive or 'auto'")
        except ValueError:
            errors.append(f"alpha must be a number or 'auto' (got {config.alpha!r})")
    if config.beta <= 0:
        errors.append(f"beta must be positive (got {config.beta})")
    if config.anchors > 5000:
        warns.append(f"anchors={config.anchors} is beyond the documented sweep "
                     "range; the exact bound is checked at the anchor stage")
    return errors, warns


def _digest(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


@dataclass
class StageRecord:
    action: str                 # "run" or "skipped"
    config_hash: str
    inputs: dict[str, str]
    outputs: dict[str, str]
    finished: str


@dataclass
class RunManifest:
    version: str
    config: dict
    created: str
    updated: str
    stages: dict[str, StageRecord] = field(default_factory=dict)

    def save(self, path: str | Path) -> None:
        payload = dataclasses.asdict(self)
        Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n",
                              encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "RunManifest":
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
        stages = {name: StageRecord(**rec) for name, rec in payload["stages"].items()}
        return cls(version=payload["version"], config=payload["config"],
                   created=payload["created"], updated=payload["updated"],
                   stages=stages)

    def verify_digests(self, base: Path) -> list[str]:
        """Recompute output digests; returns mismatch descriptions."""
        problems = []
        for name, rec in self.stages.items():
            for rel, expect in rec.outputs.items():
                p = base / rel
                if not p.is_file():
                    problems.append(f"stage {name}: missing output {rel}")
                elif _digest(p) != expect:
                    problems.append(f"stage {name}: digest mismatch for {rel}")
        return problems


def run_pipeline(config: PipelineConfig, log=print) -> RunManifest:
    """Execute all stages, skipping those whose inputs, outputs and
    configuration are unchanged since the last run."""
    errors, warns = validate_config(config)
    if errors:
        raise PipelineError("invalid configuration:\n  " + "\n  ".join(errors))
    for w in warns:
        log(f"warning: {w}")
    corpus_path = Path(config.corpus)
    if not corpus_path.is_file():
        raise PipelineError(f"corpus file not found: {config.corpus}")
    outdir = Path(config.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    manifest_path = outdir / "manifest.json"
    previous = None
    if manifest_path.is_file():
        try:
            previous = RunManifest.load(manifest_path)
        except (ValueError, KeyError, TypeError):
            log("warning: existing manifest unreadable; rerunning all stages")
    manifest = RunManifest(version=__version__,
                           config=dataclasses.asdict(config),
                           created=previous.created if previous else _now(),
                           updated=_now())

    def rel(p: Path) -> str:
        try:
            return str(p.relative_to(outdir))
        except ValueError:
            return str(p)

    def stage(name: str, cfg: dict, inputs: list[Path], outputs: list[Path],
              compute, load=lambda: None):
        chash = hashlib.sha256(
            json.dumps(cfg, sort_keys=True).encode()).hexdigest()[:16]
        in_dig = {rel(p): _digest(p) for p in inputs}
        prev = previous.stages.get(name) if previous else None
        skippable = (
            prev is not None and prev.config_hash == chash
            and prev.inputs == in_dig
            and all(p.is_file() for p in outputs)
            and {rel(p): _digest(p) for p in outputs} == prev.outputs)
        if skippable:
            log(f"[{name}] up to date, skipped")
            result = load()
            action = "skipped"
        else:
            log(f"[{name}] running")
            try:
                result = compute()
            except PipelineError:
                manifest.stages[name] = StageRecord(
                    "failed", chash, in_dig, {}, _now())
                manifest.save(manifest_path)
                raise
            except Exception as exc:
                manifest.stages[name] = StageRecord(
                    "failed", chash, in_dig, {}, _now())
                manifest.save(manifest_path)
                raise PipelineError(f"stage {name} failed: {exc}") from exc
            action = "run"
        manifest.stages[name] = StageRecord(
            action, chash, in_dig, {rel(p): _digest(p) for p in outputs}, _now())
        return result

    raw = corpus_mod.read_corpus_file(corpus_path)

    # stage: vocabulary
    vocab_path = outdir / "vocab.tsv"

    def compute_vocab():
        vocab = corpus_mod.build_vocab(raw, config.min_count)
        vocab.save(vocab_path)
        return vocab

    vocab = stage("corpus", {"min_count": config.min_count},
                  [corpus_path], [vocab_path], compute_vocab,
                  lambda: corpus_mod.Vocabulary.load(vocab_path))
    encoded = corpus_mod.encode(raw, vocab)

    # stage: topic model
    lda_path = outdir / "lda.model"
    alpha = None if config.alpha == "auto" else float(config.alpha)

    def compute_lda():
        model = topics_mod.train_lda(encoded, config.topics, alpha, config.beta,
                                     config.lda_iterations, config.lda_seed)
        model.save(lda_path)
        return model

    lda = stage("lda",
                {"topics": config.topics, "alpha": config.alpha,
                 "beta": config.beta, "iterations": config.lda_iterations,
                 "seed": config.lda_seed},
                [corpus_path, vocab_path], [lda_path], compute_lda,
                lambda: topics_mod.TopicModel.load(lda_path, vocab))

    # stage: soft partition into sub-corpora
    subdir = outdir / "subcorpora"
    sub_paths = [subdir / f"sub_{k:03d}.txt" for k in range(config.topics)]

    def compute_partition():
        subdir.mkdir(exist_ok=True)
        subs = topics_mod.partition_corpus(lda, encoded, config.threshold,
                                           config.infer_iterations,
                                           config.partition_seed)
        for k, sentences in enumerate(subs):
            corpus_mod.write_sentences(
                corpus_mod.decode_sentences(sentences, vocab), sub_paths[k])

    stage("partition",
          {"threshold": config.threshold, "iterations": config.infer_iterations,
           "seed": config.partition_seed},
          [corpus_path, vocab_path, lda_path], sub_paths, compute_partition)

    embed_cfg = {"dim": config.dim, "window": config.window,
                 "negative": config.negative, "epochs": config.epochs,
                 "learning_rate": config.learning_rate,
                 "min_count": config.min_count, "seed": config.embed_seed}

    # stage: global space
    global_path = outdir / "global.vec"

    def compute_global():
        emb = emb_mod.train_cbow(encoded, vocab, config.dim, config.window,
                                 config.negative, config.epochs,
                                 config.learning_rate, config.embed_seed)
        emb_mod.save_text(emb, global_path)

    stage("embed_global", embed_cfg, [corpus_path, vocab_path], [global_path],
          compute_global)

    # stage: one space per topic sub-corpus
    tdsm_paths = [outdir / f"tdsm_{k:03d}.vec" for k in range(config.topics)]
    for k in range(config.topics):
        def compute_topic(k=k):
            sub_raw = corpus_mod.read_corpus_file(sub_paths[k])
            if not sub_raw:
                raise PipelineError(
                    f"topic {k} sub-corpus is empty; lower --topics or --min-count")
            sub_vocab = corpus_mod.build_vocab(sub_raw, config.min_count)
            sub_enc = corpus_mod.encode(sub_raw, sub_vocab)
            emb = emb_mod.train_cbow(sub_enc, sub_vocab, config.dim,
                                     config.window, config.negative,
                                     config.epochs, config.learning_rate,
                                     config.embed_seed + k + 1)
            emb_mod.save_text(emb, tdsm_paths[k])

        stage(f"embed_topic_{k}", {**embed_cfg, "topic": k},
              [sub_paths[k]], [tdsm_paths[k]], compute_topic)

    def load_shared_spaces():
        gl = emb_mod.normalize_rows(emb_mod.load_text(global_path))
        tms = [emb_mod.normalize_rows(emb_mod.load_text(p)) for p in tdsm_paths]
        shared = corpus_mod.intersect_vocabs([gl.vocab] + [t.vocab for t in tms])
        return gl, tms, shared

    # stage: anchor selection on the shared vocabulary
    anchors_path = outdir / "anchors.tsv"

    def compute_anchors():
        gl, tms, shared = load_shared_spaces()
        scores = anchors_mod.anchor_scores(
            [emb_mod.restrict(t, shared) for t in tms],
            emb_mod.restrict(gl, shared), config.block_rows)
        aset = anchors_mod.select_anchors(scores, config.anchors, shared)
        aset.save(anchors_path)

    stage("anchors", {"count": config.anchors, "block_rows": config.block_rows},
          [global_path] + tdsm_paths, [anchors_path], compute_anchors)

    # stage: orthogonal maps and unified model
    utdsm_path = outdir / "utdsm.txt"

    def compute_align():
        gl, tms, shared = load_shared_spaces()
        aset = anchors_mod.AnchorSet.load(anchors_path, shared)
        meta = {"anchor_count": len(aset),
                "seeds": {"lda": config.lda_seed,
                          "partition": config.partition_seed,
                          "embed": config.embed_seed}}
        unified = alignment.build_unified(tms, gl, aset, meta=meta)
        alignment.save_model(unified, utdsm_path)

    stage("align", {}, [global_path] + tdsm_paths + [anchors_path],
          [utdsm_path], compute_align)

    # stage: optional mixture smoothing
    if config.components >= 1:
        smooth_path = outdir / "utdsm_smoothed.txt"

        def compute_smooth():
            unified = alignment.load_model(utdsm_path)
            sm = smoothing.smooth_model(unified, config.components,
                                        config.smooth_seed)
            alignment.save_model(sm, smooth_path)

        stage("smooth", {"components": config.components,
                         "seed": config.smooth_seed},
              [utdsm_path], [smooth_path], compute_smooth)

    manifest.save(manifest_path)
    return manifest


# ---------------------------------------------------------------- commands


def _read_encoded(corpus_file: str, vocab_file: str | None, min_count: int):
    raw = corpus_mod.read_corpus_file(corpus_file)
    if vocab_file:
        vocab = corpus_mod.Vocabulary.load(vocab_file)
    else:
        vocab = corpus_mod.build_vocab(raw, min_count)
    return corpus_mod.encode(raw, vocab), vocab


def _expand_spaces(value: str) -> list[str]:
    """Comma list, glob pattern (sorted) or single path -> topic file list."""
    if "," in value:
        return [v for v in value.split(",") if v]
    if any(ch in value for ch in "*?["):
        paths = sorted(globlib.glob(value))
        if not paths:
            raise PipelineError(f"no files match {value!r}")
        return paths
    return [value]


def cmd_lda_train(args) -> int:
    encoded, vocab = _read_encoded(args.input, None, args.min_count)
    alpha = None if args.alpha == "auto" else float(args.alpha)
    model = topics_mod.train_lda(encoded, args.topics, alpha, args.beta,
                                 args.iters, args.seed)
    model.save(args.out)
    if args.vocab_out:
        vocab.save(args.vocab_out)
    print(f"trained {args.topics}-topic model on {encoded.num_tokens()} tokens "
          f"-> {args.out}")
    return 0


def cmd_partition(args) -> int:
    encoded, vocab = _read_encoded(args.input, args.vocab, 1)
    model = topics_mod.TopicModel.load(args.model, vocab)
    subs = topics_mod.partition_corpus(model, encoded, args.threshold,
                                       args.iters, args.seed)
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    for k, sentences in enumerate(subs):
        corpus_mod.write_sentences(corpus_mod.decode_sentences(sentences, vocab),
                                   outdir / f"sub_{k:03d}.txt")
        print(f"topic {k}: {len(sentences)} sentences")
    return 0


def cmd_embed_train(args) -> int:
    encoded, vocab = _read_encoded(args.input, None, args.min_count)
    emb = emb_mod.train_cbow(encoded, vocab, args.dim, args.window,
                             args.negative, args.epochs, args.lr, args.seed)
    emb_mod.save_text(emb, args.output)
    print(f"trained {len(vocab)} x {args.dim} embeddings -> {args.output}")
    return 0


def _load_normalized_spaces(global_file: str, topic_files: list[str]):
    gl = emb_mod.normalize_rows(emb_mod.load_text(global_file))
    tms = [emb_mod.normalize_rows(emb_mod.load_text(p)) for p in topic_files]
    shared = corpus_mod.intersect_vocabs([gl.vocab] + [t.vocab for t in tms])
    return gl, tms, shared


def cmd_anchors(args) -> int:
    gl, tms, shared = _load_normalized_spaces(args.global_file,
                                              _expand_spaces(args.topics))
    scores = anchors_mod.anchor_scores(
        [emb_mod.restrict(t, shared) for t in tms],
        emb_mod.restrict(gl, shared), args.block_rows)
    aset = anchors_mod.select_anchors(scores, args.count, shared)
    aset.save(args.out)
    print(f"selected {len(aset)} anchors from |V|={len(shared)} -> {args.out}")
    return 0


def cmd_align(args) -> int:
    topic_files = _expand_spaces(args.topics)
    gl, tms, shared = _load_normalized_spaces(args.global_file, topic_files)
    aset = anchors_mod.AnchorSet.load(args.anchors, shared)
    unified = alignment.build_unified(tms, gl, aset,
                                      meta={"anchor_count": len(aset)})
    alignment.save_model(unified, args.out)
    print(f"unified model: {len(unified.vocab)} words, K={unified.n_topics}, "
          f"d={unified.dim} -> {args.out}")
    return 0


def cmd_smooth(args) -> int:
    model = alignment.load_model(args.model)
    sm = smoothing.smooth_model(model, args.components, args.seed)
    alignment.save_model(sm, args.out)
    print(f"smoothed {len(sm.vocab)} words into <= {args.components} "
          f"components each -> {args.out}")
    return 0


def cmd_eval_scws(args) -> int:
    vocab = corpus_mod.Vocabulary.load(args.vocab)
    lda = topics_mod.TopicModel.load(args.lda, vocab)
    model = alignment.load_model(args.model)
    backoff = None
    if args.backoff_global:
        backoff = emb_mod.normalize_rows(emb_mod.load_text(args.backoff_global))
    result = evaluation.run_scws(
        args.dataset, model, lda, args.metric.replace("-", ""),
        smoothed=model.smoothed is not None, exclude_target=args.exclude_target,
        iterations=args.iters, seed=args.seed, backoff=backoff)
    print(f"pairs: {result.n_pairs}  scored: {result.n_scored}  "
          f"coverage: {result.coverage:.3f}")
    for msg in result.diagnostics:
        print(f"note: {msg}")
    print(f"spearman rho ({args.metric}): {result.rho:.4f}")
    return 0


def cmd_features(args) -> int:
    vocab = corpus_mod.Vocabulary.load(args.vocab)
    lda = topics_mod.TopicModel.load(args.lda, vocab)
    model = alignment.load_model(args.model)
    records = []
    with open(args.input, encoding="utf-8") as fh:
        for ln, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            if "\t" not in line:
                raise PipelineError(f"{args.input}:{ln}: expected 'label<TAB>text'")
            label, text = line.split("\t", 1)
            vec = evaluation.doc_features(corpus_mod.tokenize(text), model, lda,
                                          args.mode, iterations=args.iters,
                                          seed=args.seed + ln)
            records.append(evaluation.FeatureRecord(int(label), vec))
    evaluation.save_features(records, args.out)
    print(f"wrote {len(records)} {args.mode} feature vectors -> {args.out}")
    return 0


def cmd_classify(args) -> int:
    train = evaluation.load_features(args.train)
    clf = evaluation.train_linear_classifier(train, epochs=args.epochs,
                                             learning_rate=args.lr,
                                             seed=args.seed)
    print(evaluation.ClassificationReport.header())
    print(evaluation.evaluate_classifier(clf, train).as_row("train"))
    if args.test:
        test = evaluation.load_features(args.test)
        print(evaluation.evaluate_classifier(clf, test).as_row("test"))
    return 0


def cmd_analyze_neighbors(args) -> int:
    model = alignment.load_model(args.model)
    rows = alignment.topic_neighbors(model, args.word, args.topic, args.n)
    lines = ["word,topic,neighbor,cosine"]
    lines += [f"{args.word},{args.topic},{w},{c:.6f}" for w, c in rows]
    _emit(lines, args.out)
    return 0


def cmd_analyze_pca(args) -> int:
    model = alignment.load_model(args.model)
    words = [w for w in args.words.split(",") if w]
    rows = alignment.pca_export(model, words)
    lines = ["word,topic,pc1,pc2"]
    lines += [f"{w},{k},{a:.6f},{b:.6f}" for w, k, a, b in rows]
    _emit(lines, args.out)
    return 0


def cmd_analyze_cross_sim(args) -> int:
    model = alignment.load_model(args.model)
    j, k = (int(x) for x in args.topics.split(","))
    sim = alignment.cross_topic_similarity(model, args.word, j, k)
    print(f"{args.word}: cos(topic {j}, topic {k}) = {sim:.6f}")
    return 0


def _emit(lines: list[str], out: str | None) -> None:
    text = "\n".join(lines) + "\n"
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _config_from_args(args) -> PipelineConfig:
    file_values = load_config_file(args.config) if args.config else {}
    overrides = {}
    for name in ("corpus", "outdir", "topics", "threshold", "dim", "window",
                 "anchors", "components", "min_count", "negative", "epochs",
                 "learning_rate", "alpha", "beta", "lda_iterations",
                 "infer_iterations", "block_rows", "lda_seed",
                 "partition_seed", "embed_seed", "smooth_seed"):
        overrides[name] = getattr(args, name, None)
    if getattr(args, "seed", None) is not None:
        for name in ("lda_seed", "partition_seed", "embed_seed", "smooth_seed"):
            if overrides[name] is None:
                overrides[name] = args.seed
    return make_config(file_values, **overrides)


def cmd_pipeline_run(args) -> int:
    config = _config_from_args(args)
    manifest = run_pipeline(config)
    ran = sum(1 for s in manifest.stages.values() if s.action == "run")
    skipped = sum(1 for s in manifest.stages.values() if s.action == "skipped")
    print(f"pipeline complete: {ran} stages run, {skipped} skipped "
          f"-> {config.outdir}/manifest.json")
    return 0


def cmd_pipeline_validate(args) -> int:
    config = _config_from_args(args)
    errors, warns = validate_config(config)
    for w in warns:
        print(f"warning: {w}")
    if errors:
        print("invalid configuration:")
        for e in errors:
            print(f"  {e}")
        return 1
    print("configuration ok")
    manifest_path = Path(config.outdir) / "manifest.json"
    if manifest_path.is_file():
        manifest = RunManifest.load(manifest_path)
        problems = manifest.verify_digests(Path(config.outdir))
        if problems:
            print("manifest digest problems:")
            for p in problems:
                print(f"  {p}")
            return 1
        print(f"manifest ok ({len(manifest.stages)} stages verified)")
    return 0


def _add_pipeline_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat key = value config file")
    p.add_argument("--corpus", help="corpus text file")
    p.add_argument("--outdir", help="output directory "
                   "(default $TOPICALIGN_OUTDIR or ./runs)")
    p.add_argument("--topics", type=int)
    p.add_argument("--threshold", type=float)
    p.add_argument("--dim", type=int)
    p.add_argument("--window", type=int)
    p.add_argument("--anchors", type=int)
    p.add_argument("--components", type=int)
    p.add_argument("--min-count", dest="min_count", type=int)
    p.add_argument("--negative", type=int)
    p.add_argument("--epochs", type=int)
    p.add_argument("--learning-rate", dest="learning_rate", type=float)
    p.add_argument("--alpha")
    p.add_argument("--beta", type=float)
    p.add_argument("--lda-iterations", dest="lda_iterations", type=int)
    p.add_argument("--infer-iterations", dest="infer_iterations", type=int)
    p.add_argument("--block-rows", dest="block_rows", type=int)
    p.add_argument("--seed", type=int, help="sets every stage seed at once")
    p.add_argument("--lda-seed", dest="lda_seed", type=int)
    p.add_argument("--partition-seed", dest="partition_seed", type=int)
    p.add_argument("--embed-seed", dest="embed_seed", type=int)
    p.add_argument("--smooth-seed", dest="smooth_seed", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="topicalign",
        description="Topic-specific word embedding spaces aligned into a "
                    "single vector space via unsupervised semantic anchors.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("lda-train", help="train a topic model")
    p.add_argument("--input", required=True)
    p.add_argument("--topics", type=int, default=50)
    p.add_argument("--alpha", default="auto")
    p.add_argument("--beta", type=float, default=0.01)
    p.add_argument("--iters", type=int, default=1000)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--min-count", dest="min_count", type=int, default=5)
    p.add_argument("--out", required=True)
    p.add_argument("--vocab-out", dest="vocab_out")
    p.set_defaults(func=cmd_lda_train)

    p = sub.add_parser("partition", help="soft-partition a corpus by topic")
    p.add_argument("--input", required=True)
    p.add_argument("--vocab", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--threshold", type=float, default=0.1)
    p.add_argument("--iters", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--outdir", required=True)
    p.set_defaults(func=cmd_partition)

    p = sub.add_parser("embed-train", help="train CBOW embeddings")
    p.add_argument("--input", required=True)
    p.add_argument("--dim", type=int, default=300)
    p.add_argument("--window", type=int, default=5)
    p.add_argument("--negative", type=int, default=5)
    p.add_argument("--epochs", type=int, default=5)
    p.add_argument("--lr", type=float, default=0.025)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--min-count", dest="min_count", type=int, default=5)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_embed_train)

    p = sub.add_parser("anchors", help="select semantic anchors")
    p.add_argument("--global", dest="global_file", required=True)
    p.add_argument("--topics", required=True,
                   help="comma list or glob of topic .vec files")
    p.add_argument("--count", type=int, default=5000)
    p.add_argument("--block-rows", dest="block_rows", type=int, default=256)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_anchors)

    p = sub.add_parser("align", help="fit orthogonal maps, build unified model")
    p.add_argument("--anchors", required=True)
    p.add_argument("--global", dest="global_file", required=True)
    p.add_argument("--topics", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_align)

    p = sub.add_parser("smooth", help="mixture-smooth a unified model")
    p.add_argument("--model", required=True)
    p.add_argument("--components", type=int, required=True)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_smooth)

    p = sub.add_parser("eval-scws", help="contextual similarity evaluation")
    p.add_argument("--dataset", required=True)
    p.add_argument("--metric", choices=["avgsimc", "maxsimc"], default="avgsimc")
    p.add_argument("--model", required=True)
    p.add_argument("--lda", required=True)
    p.add_argument("--vocab", required=True)
    p.add_argument("--exclude-target", dest="exclude_target", action="store_true",
                   help="drop the marked word from its context before inference")
    p.add_argument("--backoff-global", dest="backoff_global",
                   help="global .vec file used for out-of-vocabulary words")
    p.add_argument("--iters", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_eval_scws)

    p = sub.add_parser("features", help="document feature extraction")
    p.add_argument("--input", required=True, help="TSV: label<TAB>text per line")
    p.add_argument("--mode", choices=["avgc", "avg", "maxc"], required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--lda", required=True)
    p.add_argument("--vocab", required=True)
    p.add_argument("--iters", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_features)

    p = sub.add_parser("classify", help="train/evaluate the linear classifier")
    p.add_argument("--train", required=True)
    p.add_argument("--test")
    p.add_argument("--epochs", type=int, default=100)
    p.add_argument("--lr", type=float, default=0.1)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("analyze", help="cross-domain analysis")
    asub = p.add_subparsers(dest="analysis", required=True)

    q = asub.add_parser("neighbors", help="per-topic nearest neighbors")
    q.add_argument("--model", required=True)
    q.add_argument("--word", required=True)
    q.add_argument("--topic", type=int, required=True)
    q.add_argument("-n", type=int, default=5)
    q.add_argument("--out")
    q.set_defaults(func=cmd_analyze_neighbors)

    q = asub.add_parser("pca", help="2-component PCA export")
    q.add_argument("--model", required=True)
    q.add_argument("--words", required=True, help="comma-separated words")
    q.add_argument("--out")
    q.set_defaults(func=cmd_analyze_pca)

    q = asub.add_parser("cross-sim", help="cosine of one word across two topics")
    q.add_argument("--model", required=True)
    q.add_argument("--word", required=True)
    q.add_argument("--topics", required=True, help="two topic ids: j,k")
    q.set_defaults(func=cmd_analyze_cross_sim)

    p = sub.add_parser("pipeline", help="run or validate the full pipeline")
    psub = p.add_subparsers(dest="pipeline_command", required=True)
    q = psub.add_parser("run", help="execute all stages")
    _add_pipeline_options(q)
    q.set_defaults(func=cmd_pipeline_run)
    q = psub.add_parser("validate", help="check config and manifest digests")
    _add_pipeline_options(q)
    q.set_defaults(func=cmd_pipeline_validate)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except PipelineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
