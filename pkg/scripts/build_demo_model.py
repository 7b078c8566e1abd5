"""Retrain the bundled demonstration model from the shipped corpus."""

import argparse
from pathlib import Path

from islhmm.fixtures import fixture_text
from islhmm.hmm import load_corpus, save_model, train

DEFAULT_OUT = Path(__file__).resolve().parents[1] / "src" / "islhmm" / "data" / "models" / "demo.model"


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--corpus", help="corpus file (default: bundled demo.corpus)")
    ap.add_argument("--out", type=Path, default=DEFAULT_OUT)
    ap.add_argument("--check", action="store_true", help="only verify the file is up to date")
    args = ap.parse_args()

    text = Path(args.corpus).read_text() if args.corpus else fixture_text("demo.corpus")
    corpus = load_corpus(text)
    model = train(corpus)
    out = save_model(model)
    if args.check:
        same = args.out.exists() and args.out.read_text() == out
        print(f"{args.out}: {'up to date' if same else 'STALE'}")
        raise SystemExit(0 if same else 1)
    args.out.write_text(out)
    print(f"{len(corpus)} entries, max_len {corpus.max_len}, checksum {model.checksum()} -> {args.out}")


if __name__ == "__main__":
    main()
