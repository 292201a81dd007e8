"""Blur conditions on Maddux algebras and exact composition in the split structure."""

from bao.blur import BlurSpec, SplitAtom, SplitElement, compose_atoms, hp_partition_check, is_n_blur, is_strong_blur, split_compose
from bao.relalg import maddux

ra = maddux(9)
spec = BlurSpec.of([["a1", "a2", "a3"], ["a4", "a5", "a6"], ["a7", "a8", "a9"]])
print("3-blur:", is_n_blur(ra, spec, 3).to_json())
print("strong:", is_strong_blur(ra, spec, 3).to_json())

x = SplitAtom(2, "a1", 0)
y = SplitAtom(5, "a2", 0)
prod = compose_atoms(x, y, ra, spec)
print(f"{x.name(spec)} ; {y.name(spec)} =", prod.to_json(spec))

block = SplitElement.block(0, spec)
print("block ; block =", split_compose(block, block, ra, spec).to_json(spec))

small = maddux(3)
single = BlurSpec.of([small.diversity])
print("one blur on maddux(3):", is_n_blur(small, single, 3).to_json())
print("a1;a1 in the split structure:", compose_atoms(SplitAtom(0, "a1", 0), SplitAtom(1, "a1", 0), small, single).to_json(single))
for n in (3, 10, 25):
    print(f"H partition a1,a2 at N={n}:", hp_partition_check("a1", "a2", n, small, single).ok)
