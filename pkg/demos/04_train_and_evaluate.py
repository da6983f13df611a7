"""The evaluation grid: five feature combinations x four classifiers.

5-fold cross-validation repeated over fresh shuffles (test1) plus a
held-out set from shapes the training never saw (test2). Repeats are
reduced here so the demo runs in seconds; the full protocol uses 100.
"""
from gazeintent import Combination, ModelKind, SynthConfig, generate_dataset, repeated_eval

cfg = SynthConfig(n_per_class=160, n_test_per_class=30, seed=7)
train, test = generate_dataset(cfg)
results = repeated_eval(train, test, tuple(Combination), tuple(ModelKind),
                        n_repeats=10, seed=0)

kinds = list(ModelKind)
header = "".join(f"{k.value:>16s}" for k in kinds)
for testset in ("test1", "test2"):
    print(f"\n=== {testset}: mean accuracy +/- std over 10 repeats ===")
    print(f"{'':4s}{header}")
    for comb in Combination:
        cells = []
        for kind in kinds:
            rep = results[(comb, kind)][testset]
            cells.append(f"{rep.mean_accuracy:.3f}+/-{rep.std_accuracy:.3f}")
        print(f"{comb.value:4s}" + "".join(f"{c:>16s}" for c in cells))
