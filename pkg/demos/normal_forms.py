"""Rewriting single-algebra diagrams to their normal forms."""

from ghzw_calculus import diagram as dg, rewrite

examples = {
    "ghz bubble": ("(seq (comult ghz) (mult ghz))", "scfa"),
    "w bubble": ("(seq (comult w) (mult w))", "acfa"),
    "w double bubble": ("(seq (comult w) (mult w) (comult w) (mult w))", "acfa"),
    "w tree": ("(seq (par (mult w) id) (mult w) (comult w))", "acfa"),
    "closed w tree": ("(seq (unit w) (counit w))", "acfa"),
}

for label, (text, kind) in examples.items():
    d = dg.parse_dsl(text)
    nfs, canon, factor = rewrite.normalize_single(d, kind)
    value = dg.evaluate(d)
    back = dg.evaluate(canon).scale(factor)
    err = abs(value.entries - back.entries).max() if value.entries.size else 0.0
    print(f"{label:16s} -> {', '.join(map(str, nfs)):32s} factor {factor.real:g}  check {err:.1e}")

a = dg.parse_dsl("(seq (par (mult ghz) id) (mult ghz))")
b = dg.parse_dsl("(seq (par id (mult ghz)) (mult ghz) (comult ghz) (mult ghz))")
print("\nassociativity + bubble removal agree:", rewrite.decide_equal(a, b, "scfa"))

rep = rewrite.soundness_harness(seed=3, trials=100, mode="mixed")
print(f"{rep.applied} random rewrites, worst residual {rep.max_residual:.1e}")
print("rules used:", dict(sorted(rep.by_rule.items())))
