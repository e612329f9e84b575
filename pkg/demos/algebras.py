"""The two canonical qubit algebras and what separates them."""

import numpy as np

from ghzw_calculus import cfa
from ghzw_calculus.slocc import tripartite_classify

for c in (cfa.GHZ, cfa.W):
    rep = cfa.check_cfa(c)
    print(f"{c.name}: axioms pass={rep.passed}, circle={c.circle}")
    print("  mu.delta =\n", np.real(c.mu_delta.matrix))
    print("  special:", cfa.check_special(c), " anti-special:", cfa.check_antispecial(c))
    for m in (3, 4):
        psi = cfa.spider(c, 0, m)
        nz = [format(k, f"0{m}b") for k in np.flatnonzero(psi.entries)]
        print(f"  spider(0,{m}) support: {nz}")
    print("  three-leg spider class:", tripartite_classify(cfa.spider(c, 0, 3)))

# a disguised algebra: conjugate W by a random invertible map, then recover it
rng = np.random.default_rng(1)
L = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
hidden = cfa.transport(cfa.W, L, name="hidden")
found = cfa.classify_cfa(hidden)
print(f"\nhidden algebra is {found.kind}-class, residual {found.residual:.2e}")
