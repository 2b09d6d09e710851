"""Multi-topic word embeddings aligned into a single vector space.

The package trains one embedding space per LDA topic, selects semantic
anchors whose similarity distributions are stable across spaces, fits an
orthogonal Procrustes map per topic onto the global space, optionally
smooths each word's topic vectors with a Gaussian mixture, and evaluates
the result on contextual word similarity and document-feature tasks.
"""

__version__ = "0.1.0"

from .alignment import (OrthogonalMap, SmoothedWord, UnifiedModel,
                        build_unified, cross_topic_similarity, load_model,
                        map_objective, pca_export, procrustes, project,
                        save_model, topic_neighbors)
from .anchors import AnchorSet, anchor_scores, select_anchors, similarity_row
from .corpus import (Corpus, Vocabulary, build_vocab, decode, encode,
                     intersect_vocabs, parse_text, read_corpus_file, tokenize)
from .embeddings import (EmbeddingMatrix, load_text, normalize_rows, restrict,
                         save_text, train_cbow)
from .evaluation import (ContextualPair, FeatureRecord, LinearClassifier,
                         ScwsResult, avg_sim_c, doc_features,
                         evaluate_classifier, max_sim_c, parse_scws, run_scws,
                         spearman, train_linear_classifier)
from .smoothing import (WordGMM, component_posterior, fit_gmm, smooth_model,
                        smoothed_vectors)
from .topics import (TopicModel, assign_topics, infer_posterior,
                     partition_corpus, train_lda)

__all__ = [
    "__version__",
    "AnchorSet", "ContextualPair", "Corpus", "EmbeddingMatrix",
    "FeatureRecord", "LinearClassifier", "OrthogonalMap", "ScwsResult",
    "SmoothedWord", "TopicModel", "UnifiedModel", "Vocabulary", "WordGMM",
    "anchor_scores", "assign_topics", "avg_sim_c", "build_unified",
    "build_vocab", "component_posterior", "cross_topic_similarity", "decode",
    "doc_features", "encode", "evaluate_classifier", "fit_gmm",
    "infer_posterior", "intersect_vocabs", "load_model", "load_text",
    "map_objective", "max_sim_c", "normalize_rows", "parse_scws",
    "parse_text", "partition_corpus", "pca_export", "procrustes", "project",
    "read_corpus_file", "restrict", "run_scws", "save_model", "save_text",
    "select_anchors", "similarity_row", "smooth_model", "smoothed_vectors",
    "spearman", "tokenize", "topic_neighbors", "train_cbow",
    "train_linear_classifier", "train_lda",
]
