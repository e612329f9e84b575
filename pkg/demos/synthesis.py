"""Building states and maps from the GHZ/W pair."""

import numpy as np

from ghzw_calculus import diagram as dg, ghzw
from ghzw_calculus.slocc import superclass_label
from ghzw_calculus.tensor import ket, state

print("pair checks:", ghzw.pair_check(ghzw.CANONICAL_PAIR).residuals)

# multiplexor: |0 psi> and |1 phi> branches from two 2-qubit states
rng = np.random.default_rng(0)
psi = state(rng.normal(size=4))
phi = state(rng.normal(size=4))
cert = ghzw.qmux_check(psi, phi)
print(f"\nqmux on 2 qubits: certified={cert.passed}, residual {cert.residual:.1e}")

# any 2x2 matrix from black and white multiplications plus ticks
a = np.array([[0, 2], [3, 1]])
f = ghzw.pldu_decompose(a)
print("\npldu of", a.tolist())
print("  p is NOT:", f.p_is_not, " xi, phi, psi:", f.xi.real, f.phi.real, f.psi.real)
print("  diagram value:\n", dg.evaluate(ghzw.pldu_diagram(f)).matrix.real)

# four-qubit superclass labels
for bits in (["0000", "1111"], ["0000", "0111", "1010"], ["0000", "1101", "1110"]):
    t = ket(bits[0])
    for b in bits[1:]:
        t = t + ket(b)
    print(" + ".join(f"|{b}>" for b in bits), "->", superclass_label(t))
