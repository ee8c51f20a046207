# Copyright 2026 The rwen-tts Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
# ==============================================================================

"""Export a corpus into manifest + TensorFiles.

Usage:
  python -m rwen_dataprep.export --corpus TEXT --parser conllu:FILE --encoder NAME --out DIR [--batch-size N]

The corpus holds one sentence per line. `--parser conllu:FILE` reads trees
from a CoNLL-U file with one block per corpus line; `--parser stanza` runs
Stanza when it is installed. `--encoder` is a Hugging Face model name, or
`pseudo:DIM` for the deterministic stand-in embeddings. Sentences whose
subwords cannot be aligned to parser words are skipped with a logged reason.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass

import numpy as np

from .align import AlignmentError, subword_spans, word_offsets
from .manifest import Record, write_manifest

log = logging.getLogger("rwen_dataprep.export")


@dataclass
class Parsed:
    words: list[str]
    head: list[int]
    rel: list[str]


def read_conllu(path: str) -> list[Parsed]:
    out, cur = [], Parsed([], [], [])
    with open(path, encoding="utf-8") as f:
        for line in f:
            line = line.rstrip("\n")
            if not line.strip():
                if cur.words:
                    out.append(cur)
                cur = Parsed([], [], [])
                continue
            if line.startswith("#"):
                continue
            cols = line.split("\t")
            if "-" in cols[0] or "." in cols[0]:
                continue
            cur.words.append(cols[1])
            cur.head.append(int(cols[6]))
            cur.rel.append(cols[7])
    if cur.words:
        out.append(cur)
    return out


def stanza_parser():
    try:
        import stanza
    except ImportError as e:
        raise SystemExit(f"parser unavailable: {e}") from None
    nlp = stanza.Pipeline("en", processors="tokenize,pos,lemma,depparse", tokenize_no_ssplit=True)

    def parse(text: str) -> Parsed:
        words = [w for s in nlp(text).sentences for w in s.words]
        return Parsed([w.text for w in words], [w.head for w in words], [w.deprel for w in words])

    return parse


class HfEncoder:
    """Last hidden layer of a pretrained encoder, d_H x (m + 2) with [CLS]/[SEP] at the ends."""

    def __init__(self, name: str):
        try:
            import torch
            from transformers import AutoModel, AutoTokenizer
        except ImportError as e:
            raise SystemExit(f"encoder unavailable: {e}") from None
        self.torch = torch
        self.tokenizer = AutoTokenizer.from_pretrained(name)
        self.model = AutoModel.from_pretrained(name).eval()

    def __call__(self, texts: list[str]) -> list[tuple[np.ndarray, list[tuple[int, int]]]]:
        batch = self.tokenizer(texts, return_offsets_mapping=True, padding=True, return_tensors="pt")
        offsets = batch.pop("offset_mapping")
        with self.torch.no_grad():
            hidden = self.model(**batch).last_hidden_state
        out = []
        for i in range(len(texts)):
            length = int(batch["attention_mask"][i].sum())
            h = hidden[i, :length].numpy().astype(np.float32).T
            chars = [tuple(int(v) for v in o) for o in offsets[i, 1 : length - 1]]
            out.append((h, chars))
        return out


def export(texts, parses, encoder, out_dir: str, batch_size: int = 16, pseudo_dim: int | None = None):
    records, skipped = [], 0
    for start in range(0, len(texts), batch_size):
        chunk = list(range(start, min(start + batch_size, len(texts))))
        encoded = encoder([texts[i] for i in chunk]) if encoder else [None] * len(chunk)
        for i, enc in zip(chunk, encoded):
            p = parses[i]
            sid = f"s{i + 1}"
            try:
                word_chars = word_offsets(texts[i], p.words)
                if enc is None:
                    spans, m, emb = [(k + 1, k + 2) for k in range(len(p.words))], len(p.words), None
                else:
                    emb, sub_chars = enc
                    spans, m = subword_spans(word_chars, sub_chars), len(sub_chars)
            except AlignmentError as e:
                log.warning("skipping %s: %s", sid, e)
                skipped += 1
                continue
            records.append(Record(sid, p.words, p.head, p.rel, spans, m, emb, pseudo_dim, 0))
    write_manifest(f"{out_dir}/manifest.jsonl", records)
    log.info("exported %d sentences, %d alignment failures", len(records), skipped)
    return len(records), skipped


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(description="Export a corpus into rwen manifest + TensorFiles")
    ap.add_argument("--corpus", required=True)
    ap.add_argument("--encoder", required=True, help="Hugging Face model name or pseudo:DIM")
    ap.add_argument("--parser", required=True, help="conllu:FILE or stanza")
    ap.add_argument("--out", required=True)
    ap.add_argument("--batch-size", type=int, default=16)
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")

    with open(args.corpus, encoding="utf-8") as f:
        texts = [line.strip() for line in f if line.strip()]
    if args.parser.startswith("conllu:"):
        parses = read_conllu(args.parser[len("conllu:") :])
        if len(parses) != len(texts):
            log.error("%d corpus lines but %d CoNLL-U blocks", len(texts), len(parses))
            return 1
    elif args.parser == "stanza":
        parse = stanza_parser()
        parses = [parse(t) for t in texts]
    else:
        ap.error("--parser must be conllu:FILE or stanza")

    if args.encoder.startswith("pseudo:"):
        encoder, pseudo_dim = None, int(args.encoder[len("pseudo:") :])
    else:
        encoder, pseudo_dim = HfEncoder(args.encoder), None
    _, skipped = export(texts, parses, encoder, args.out, args.batch_size, pseudo_dim)
    print(f"alignment failures: {skipped}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
