"""
Handwritten digits
==================

The 8x8 digits are reduced to n principal components fit on 100 training
images, scaled to [-1, 1] and fed to [n, n, 1] networks. First 0 versus 1
with the sign of the output as the label, then all ten classes with one
network per class.
"""

# %%
from ccqkan import MnistSpec, run_mnist_binary, run_mnist_ova
from ccqkan.experiments import per_class_matrix

binary = run_mnist_binary(MnistSpec(ns=[4], d=2, n_splits=3))
for model, res in binary["results"][4].items():
    print(f"0 vs 1, {model:>9}: accuracy {res['accuracy']['mean']:.3f}, final MSE {res['loss']['mean']:.3f}")

# %%
ova = run_mnist_ova(MnistSpec(ns=[4], d=3, n_splits=2, models=("original", "red_i")))
for model in ("original", "red_i"):
    res = ova["results"][4][model]
    print(f"10 classes, {model:>9}: test {res['accuracy']['mean']:.3f}, train {sum(res['train_accuracy']) / 2:.3f}")

mat, header = per_class_matrix(ova)
print("digit  " + "  ".join(m for _, m in header))
for digit, row in enumerate(mat):
    print(f"{digit:>5}  " + "  ".join(f"{v:>{len(m)}.2f}" for v, (_, m) in zip(row, header)))
