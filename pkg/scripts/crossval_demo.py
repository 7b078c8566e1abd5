"""k-fold cross-validation on the bundled corpora, plus the metric arithmetic
for two reference confusion matrices."""

import argparse

from islhmm.evaluation import ConfusionMatrix, fmt_metric, kfold, metrics
from islhmm.fixtures import fixture_text
from islhmm.hmm import load_corpus

REFERENCE = {
    "evaluation": ConfusionMatrix(tp=405, fp=14, fn=9, tn=82),
    "decoding": ConfusionMatrix(tp=412, fp=16, fn=2, tn=80),
}


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--k", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--json", action="store_true")
    args = ap.parse_args()

    for name in ("demo", "listing3"):
        corpus = load_corpus(fixture_text(f"{name}.corpus"))
        k = min(args.k, len(corpus))
        cv = kfold(corpus, k, args.seed)
        print(f"## {name}.corpus")
        print(cv.to_json() if args.json else cv.to_text())

    print("## reference confusion matrices")
    for label, cm in REFERENCE.items():
        ms = metrics(cm)
        print(f"{label:>10}: " + "  ".join(f"{m}={fmt_metric(v)}" for m, v in ms.items()))


if __name__ == "__main__":
    main()
