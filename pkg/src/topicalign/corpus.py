"""Corpus ingestion: tokenization, vocabulary construction, id encoding.

Text input format: UTF-8 plain text, one sentence per line, a blank line
separates documents. A raw corpus is a list of documents, each document a
list of sentences, each sentence a list of token strings.
"""

from __future__ import annotations

import re
from collections import Counter
from collections.abc import Iterable, Iterator, Sequence
from pathlib import Path

RawCorpus = list[list[list[str]]]

_EDGE = re.compile(r"^[^a-z0-9]+|[^a-z0-9]+$")


def tokenize(text: str) -> list[str]:
    """Lowercase, split on whitespace, strip edge characters outside [a-z0-9].

    Inner punctuation is kept ("river-bank"); tokens that strip to nothing
    are dropped.
    """
    out = []
    for raw in text.lower().split():
        tok = _EDGE.sub("", raw)
        if tok:
            out.append(tok)
    return out


def parse_text(text: str) -> RawCorpus:
    """Parse sentence-per-line text with blank-line document boundaries."""
    documents: RawCorpus = []
    current: list[list[str]] = []
    for line in text.split("\n"):
        if line.strip():
            current.append(tokenize(line))
        elif current:
            documents.append(current)
            current = []
    if current:
        documents.append(current)
    return documents


def read_corpus_file(path: str | Path) -> RawCorpus:
    return parse_text(Path(path).read_text(encoding="utf-8"))


class Vocabulary:
    """Bidirectional word <-> integer-id map with occurrence counts.

    Ids follow the order of ``words``; ``ids[words[i]] == i`` always holds.
    """

    def __init__(self, words: Sequence[str], counts: Sequence[int]):
        if len(words) != len(counts):
            raise ValueError("words and counts must have equal length")
        self.words: list[str] = list(words)
        self.counts: list[int] = [int(c) for c in counts]
        self.ids: dict[str, int] = {w: i for i, w in enumerate(self.words)}
        if len(self.ids) != len(self.words):
            raise ValueError("duplicate words in vocabulary")
        if any(c < 0 for c in self.counts):
            raise ValueError("negative word count")

    def __len__(self) -> int:
        return len(self.words)

    def __contains__(self, word: str) -> bool:
        return word in self.ids

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Vocabulary):
            return NotImplemented
        return self.words == other.words and self.counts == other.counts

    def id(self, word: str) -> int:
        return self.ids[word]

    def word(self, i: int) -> str:
        return self.words[i]

    def save(self, path: str | Path) -> None:
        """Write one ``word<TAB>count`` per line; id = 0-based line number."""
        with open(path, "w", encoding="utf-8") as fh:
            for w, c in zip(self.words, self.counts):
                fh.write(f"{w}\t{c}\n")

    @classmethod
    def load(cls, path: str | Path) -> "Vocabulary":
        words, counts = [], []
        with open(path, encoding="utf-8") as fh:
            for ln, line in enumerate(fh, start=1):
                line = line.rstrip("\n")
                if not line:
                    continue
                try:
                    w, c = line.split("\t")
                    words.append(w)
                    counts.append(int(c))
                except ValueError as exc:
                    raise ValueError(f"{path}:{ln}: malformed vocabulary line") from exc
        return cls(words, counts)


def build_vocab(raw_corpus: RawCorpus, min_count: int = 1) -> Vocabulary:
    """Count tokens and retain words with frequency >= min_count.

    Words are ordered by descending frequency, ties lexicographic.
    """
    if min_count < 1:
        raise ValueError("min_count must be >= 1")
    counter: Counter[str] = Counter()
    for doc in raw_corpus:
        for sent in doc:
            counter.update(sent)
    if not counter:
        raise ValueError("empty corpus")
    kept = [(w, c) for w, c in counter.items() if c >= min_count]
    if not kept:
        raise ValueError(f"no word reaches min_count={min_count}")
    kept.sort(key=lambda wc: (-wc[1], wc[0]))
    return Vocabulary([w for w, _ in kept], [c for _, c in kept])


class Corpus:
    """Encoded corpus: documents -> sentences -> word ids.

    Sentences that end up empty after out-of-vocabulary filtering are
    removed, as are documents left with no sentences.
    """

    def __init__(self, documents: list[list[list[int]]], vocab: Vocabulary):
        self.documents = documents
        self.vocab = vocab

    def __len__(self) -> int:
        return len(self.documents)

    def sentences(self) -> Iterator[list[int]]:
        for doc in self.documents:
            yield from doc

    def num_sentences(self) -> int:
        return sum(len(doc) for doc in self.documents)

    def num_tokens(self) -> int:
        return sum(len(s) for doc in self.documents for s in doc)


def encode(raw_corpus: RawCorpus, vocab: Vocabulary) -> Corpus:
    """Map tokens to ids, dropping OOV tokens and empty sentences/documents."""
    ids = vocab.ids
    documents = []
    for doc in raw_corpus:
        enc_doc = []
        for sent in doc:
            enc = [ids[t] for t in sent if t in ids]
            if enc:
                enc_doc.append(enc)
        if enc_doc:
            documents.append(enc_doc)
    return Corpus(documents, vocab)


def decode(corpus: Corpus, vocab: Vocabulary | None = None) -> RawCorpus:
    """Inverse of encode for retained tokens: ids back to word strings."""
    vocab = vocab or corpus.vocab
    return [[[vocab.word(i) for i in sent] for sent in doc] for doc in corpus.documents]


def decode_sentences(sentences: Iterable[Sequence[int]], vocab: Vocabulary) -> list[list[str]]:
    return [[vocab.word(i) for i in sent] for sent in sentences]


def intersect_vocabs(vocabs: Sequence[Vocabulary]) -> Vocabulary:
    """Words present in every vocabulary; count = minimum across inputs.

    Result is ordered by descending min-count, ties lexicographic.
    """
    if not vocabs:
        raise ValueError("need at least one vocabulary")
    shared = set(vocabs[0].words)
    for v in vocabs[1:]:
        shared &= set(v.words)
    if not shared:
        raise ValueError("vocabulary intersection is empty")
    entries = [(w, min(v.counts[v.ids[w]] for v in vocabs)) for w in shared]
    entries.sort(key=lambda wc: (-wc[1], wc[0]))
    return Vocabulary([w for w, _ in entries], [c for _, c in entries])


def write_sentences(sentences: Iterable[Sequence[str]], path: str | Path) -> None:
    """Write tokenized sentences one per line (single-document corpus file)."""
    with open(path, "w", encoding="utf-8") as fh:
        for sent in sentences:
            fh.write(" ".join(sent) + "\n")
