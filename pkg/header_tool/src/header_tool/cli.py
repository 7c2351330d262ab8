"""Export header embeddings for every numeric column of a CSV corpus.

Writes JSONL: a first meta line recording the encoder and dimension, then one
record per column with the shared schema {"table", "column", "header",
"vector"}. Vectors are raw encoder outputs — any normalization is the
consumer's responsibility.

Exit codes: 0 success, 1 usage error, 2 data or encoder error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from gem.columns import load_corpus
from gem.errors import DataError

from .encoders import DEFAULT_MODEL, EncoderUnavailable, load_encoder


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="header-embed", description=__doc__)
    parser.add_argument("--input", required=True, help="directory of CSV tables")
    parser.add_argument("--out", required=True, help="output JSONL file")
    parser.add_argument("--model", default=DEFAULT_MODEL,
                        help="sentence-encoder checkpoint, or 'hash'/'hash:DIM' "
                             "for the offline feature-hashing encoder")
    parser.add_argument("--batch-size", type=int, default=32)
    parser.add_argument("--hash-dim", type=int, default=384,
                        help="dimension of the offline hashing encoder")
    parser.add_argument("--threshold", type=float, default=0.95,
                        help="numeric-column detection threshold")
    return parser


def run(args: argparse.Namespace) -> int:
    if args.batch_size < 1:
        raise UsageError("--batch-size must be >= 1")
    corpus = load_corpus(args.input, numeric_threshold=args.threshold)
    encoder = load_encoder(args.model, args.hash_dim)

    # encode each distinct header once so repeated headers share one vector
    headers = [c.header for c in corpus.columns]
    unique = sorted(set(headers))
    matrix = encoder.encode(unique, batch_size=args.batch_size)
    by_header = {h: matrix[i] for i, h in enumerate(unique)}

    out = Path(args.out)
    with open(out, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(
            {"meta": {"model": encoder.name, "dim": int(matrix.shape[1])}}
        ) + "\n")
        for col in corpus.columns:
            fh.write(json.dumps({
                "table": col.id.table,
                "column": col.id.column,
                "header": col.header,
                "vector": [float(v) for v in by_header[col.header]],
            }) + "\n")
    print(f"wrote {out}: {len(corpus)} columns, dim {matrix.shape[1]}, "
          f"model {encoder.name}")
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        return run(parser.parse_args(argv))
    except (UsageError, ValueError) as exc:
        print(f"header-embed: usage error: {exc}", file=sys.stderr)
        return 1
    except (DataError, EncoderUnavailable) as exc:
        print(f"header-embed: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
