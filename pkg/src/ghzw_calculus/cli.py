"""Command-line interface: ``ghzw <verb> [inputs] [--tol T] [--seed S] [--json]``.

Exit codes: 0 success, 1 a checked property failed, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from pathlib import Path

import numpy as np

from . import diagram as dg
from . import ghzw, rewrite, slocc
from .cfa import CFA, CfaError, check_antispecial, check_cfa, check_special, classify_cfa, get_algebra
from .tensor import Tensor, TensorError, Tolerance

REPORT_SCHEMA = 1


class UsageError(Exception):
    pass


# ---------------------------------------------------------------- formatting


def _num(x: float) -> float:
    if abs(x) < 1e-14:
        return 0.0
    return float(f"{x:.12g}")


def _cnum(z) -> list[float]:
    z = complex(z)
    return [_num(z.real), _num(z.imag)]


def _fmt(z) -> str:
    z = complex(z)
    if z.imag == 0:
        return f"{z.real:.12g}"
    if z.real == 0:
        return f"{z.imag:.12g}j"
    return f"{z.real:.12g}{z.imag:+.12g}j"


def _matrix_json(m) -> list:
    return [[_cnum(z) for z in row] for row in np.asarray(m)]


def _tensor_json(t: Tensor) -> dict:
    return {"in": t.in_arity, "out": t.out_arity, "dim": t.dim, "entries": [_cnum(z) for z in t.entries]}


def _clean(obj):
    """Round every float in a JSON-like structure to 12 significant digits."""
    if isinstance(obj, float):
        return _num(obj)
    if isinstance(obj, complex):
        return _cnum(obj)
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.generic):
        return _clean(obj.item())
    return obj


# ---------------------------------------------------------------- loading


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc


def load_diagram(path: str) -> dg.Diagram:
    text = _read(path)
    if text.lstrip().startswith("{"):
        return dg.from_json(text)
    return dg.parse_dsl(text)


def load_cfa(arg: str) -> CFA:
    if not Path(arg).exists():
        try:
            return get_algebra(arg)
        except (KeyError, CfaError):
            raise UsageError(f"{arg}: no such file or built-in algebra") from None
    try:
        return CFA.from_json(json.loads(_read(arg)))
    except json.JSONDecodeError as exc:
        raise UsageError(f"{arg}: invalid JSON ({exc.msg})") from exc


_BUILTIN_STATE = re.compile(r"^(ghz|w)(\d+)$")


def load_state(arg: str) -> Tensor:
    m = _BUILTIN_STATE.match(arg)
    if m and not Path(arg).exists():
        n = int(m.group(2))
        return slocc.ghz_state(n) if m.group(1) == "ghz" else slocc.w_state(n)
    try:
        return slocc.state_from_json(_read(arg))
    except json.JSONDecodeError as exc:
        raise UsageError(f"{arg}: invalid JSON ({exc.msg})") from exc


def load_pair(arg: str) -> ghzw.GhzwPair:
    if arg == "canonical" and not Path(arg).exists():
        return ghzw.CANONICAL_PAIR
    try:
        return ghzw.GhzwPair.from_json(json.loads(_read(arg)))
    except json.JSONDecodeError as exc:
        raise UsageError(f"{arg}: invalid JSON ({exc.msg})") from exc


def load_matrix(arg: str) -> np.ndarray:
    text = _read(arg) if Path(arg).exists() else arg
    try:
        if text.lstrip().startswith("["):
            vals = json.loads(text)
            arr = np.array([[complex(*z) if isinstance(z, list) else complex(z) for z in row] for row in vals])
        else:
            arr = np.array([complex(x) for x in re.split(r"[,\s]+", text.strip()) if x]).reshape(2, 2)
    except (ValueError, TypeError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read a 2x2 matrix from {arg!r}") from exc
    if arr.shape != (2, 2):
        raise UsageError("pldu expects a 2x2 matrix")
    return arr


# ---------------------------------------------------------------- verbs


def cmd_eval(a, tol):
    d = load_diagram(a.diagram)
    sem = load_pair(a.pair).semantics() if a.pair else None
    t = dg.evaluate(d, sem)
    lines = [f"in={t.in_arity} out={t.out_arity}"]
    width = t.out_arity + t.in_arity
    for k, z in enumerate(t.entries):
        if abs(z) > tol.abs_eps:
            idx = format(k, f"0{width}b") if width else ""
            lines.append(f"{idx[:t.out_arity]}|{idx[t.out_arity:]}  {_fmt(z)}")
    return 0, {"tensor": _tensor_json(t)}, lines


def cmd_check_cfa(a, tol):
    c = load_cfa(a.cfa)
    rep = check_cfa(c, tol)
    out = {
        "name": c.name,
        "residuals": rep.residuals,
        "failures": rep.failures,
        "special": bool(rep.passed and check_special(c, tol)),
        "antispecial": bool(rep.passed and check_antispecial(c, tol)),
    }
    lines = [f"{k}: {v:.12g}" + ("  FAIL" if k in rep.failures else "") for k, v in rep.residuals.items()]
    lines.append("result: " + ("pass" if rep.passed else "fail (" + ", ".join(rep.failures) + ")"))
    return (0 if rep.passed else 1), out, lines


def cmd_classify_cfa(a, tol):
    c = load_cfa(a.cfa)
    k = classify_cfa(c, tol, a.seed)
    out = {"kind": k.kind, "L": _matrix_json(k.L), "residual": k.residual, "lambda": _cnum(k.lam) if k.lam is not None else None}
    return 0, out, [f"class: {k.kind}", f"residual: {k.residual:.12g}"]


def cmd_classify_state(a, tol):
    t = load_state(a.state)
    lab = slocc.tripartite_classify(t, tol)
    return 0, {"label": lab.to_json(), "text": str(lab)}, [str(lab)]


def cmd_superclass(a, tol):
    lab = slocc.superclass_label(load_state(a.state), tol)
    return 0, {"label": lab.to_json(), "text": str(lab)}, [str(lab)]


def cmd_frobenius_state(a, tol):
    t = load_state(a.state)
    res = slocc.is_frobenius_state(t, tol, seed=a.seed)
    if res is None:
        return 1, {"frobenius": False}, ["not a Frobenius state (no witness found)"]
    phi, xi = res
    out = {"frobenius": True, "phi": _tensor_json(phi), "xi": _tensor_json(xi)}
    return 0, out, ["Phi: " + " ".join(_fmt(z) for z in phi.entries), "xi: " + " ".join(_fmt(z) for z in xi.entries)]


def cmd_pair_check(a, tol):
    rep = ghzw.pair_check(load_pair(a.pair), tol)
    lines = [
        f"({k}) {ghzw.PAIR_CHECKS[k]}: {v:.12g}" + ("  FAIL" if k in rep.failures else "")
        for k, v in rep.residuals.items()
    ]
    lines.append("result: " + ("pass" if rep.passed else "fail (" + ", ".join(rep.failures) + ")"))
    return (0 if rep.passed else 1), {"residuals": rep.residuals, "failures": rep.failures}, lines


def cmd_partner(a, tol):
    c = load_cfa(a.cfa)
    if check_special(c, tol):
        first, second = ghzw.partner_from_scfa(c, tol, a.seed)
        out = {"input": "special", "partners": [first.to_json(), second.to_json()]}
        return 0, out, ["input is special; anti-special partners:", json.dumps(_clean(out["partners"]), sort_keys=True)]
    if check_antispecial(c, tol):
        p = ghzw.partner_from_acfa(c, tol)
        out = {"input": "antispecial", "partners": [p.to_json()]}
        return 0, out, ["input is anti-special; special partner:", json.dumps(_clean(out["partners"]), sort_keys=True)]
    return 1, {"input": "neither"}, ["input is neither special nor anti-special"]


def cmd_normalize(a, tol):
    d = load_diagram(a.diagram)
    nfs, canon, factor = rewrite.normalize_single(d, a.kind)
    out = {
        "components": [{"form": str(nf), "n": nf.n, "m": nf.m, "loops": nf.loops, "variant": nf.variant} for nf in nfs],
        "factor": _cnum(factor),
        "canonical": json.loads(dg.to_json(canon)),
    }
    lines = [str(nf) for nf in nfs] + [f"factor: {_fmt(factor)}"]
    return 0, out, lines


def cmd_qmux(a, tol):
    psi, phi = load_state(a.psi), load_state(a.phi)
    try:
        cert = ghzw.qmux_check(psi, phi, tol=Tolerance(max(tol.abs_eps, 1e-8), max(tol.rel_eps, 1e-8)), seed=a.seed)
    except ghzw.PairError as exc:
        raise UsageError(str(exc)) from exc
    out = {"passed": cert.passed, "residual": cert.residual, "output": _tensor_json(cert.output), "target": _tensor_json(cert.target)}
    lines = [f"residual: {cert.residual:.12g}", "certificate: " + ("pass" if cert.passed else "fail")]
    return (0 if cert.passed else 1), out, lines


def cmd_pldu(a, tol):
    m = load_matrix(a.matrix)
    f = ghzw.pldu_decompose(m, tol)
    rec = float(np.max(np.abs(f.product() - m)))
    diag_res = float(np.max(np.abs(dg.evaluate(ghzw.pldu_diagram(f)).matrix - m)))
    out = {**{k: _matrix_json(getattr(f, k)) for k in ("p", "l", "d", "u", "q")},
           "xi": [_cnum(z) for z in f.xi], "phi": [_cnum(z) for z in f.phi], "psi": [_cnum(z) for z in f.psi],
           "reconstruction_residual": rec, "diagram_residual": diag_res}
    ok = tol.accepts(rec, float(np.max(np.abs(m)))) and tol.accepts(diag_res, float(np.max(np.abs(m))))
    lines = []
    for k in ("p", "l", "d", "u", "q"):
        mat = getattr(f, k)
        lines.append(f"{k} = [[{_fmt(mat[0, 0])}, {_fmt(mat[0, 1])}], [{_fmt(mat[1, 0])}, {_fmt(mat[1, 1])}]]")
    lines.append(f"reconstruction residual: {rec:.12g}")
    lines.append(f"diagram residual: {diag_res:.12g}")
    return (0 if ok else 1), out, lines


def cmd_export_dot(a, tol):
    text = dg.to_dot(load_diagram(a.diagram))
    return 0, {"dot": text}, [text.rstrip("\n")]


VERBS = {
    "eval": (cmd_eval, "evaluate a diagram", [("diagram", "DSL or diagram JSON file")]),
    "check-cfa": (cmd_check_cfa, "check the Frobenius algebra axioms", [("cfa", "CFA JSON file or ghz/w")]),
    "classify-cfa": (cmd_classify_cfa, "GHZ or W class of an algebra on C^2", [("cfa", "CFA JSON file or ghz/w")]),
    "classify-state": (cmd_classify_state, "SLOCC class of a three-qubit state", [("state", "state JSON file or ghzN/wN")]),
    "superclass": (cmd_superclass, "superclass label of an N-qubit state", [("state", "state JSON file or ghzN/wN")]),
    "frobenius-state": (cmd_frobenius_state, "search Frobenius witnesses", [("state", "state JSON file or ghzN/wN")]),
    "pair-check": (cmd_pair_check, "check a GHZ/W pair", [("pair", "pair JSON file or 'canonical'")]),
    "partner": (cmd_partner, "partner algebras of a special or anti-special CFA", [("cfa", "CFA JSON file or ghz/w")]),
    "normalize": (cmd_normalize, "normal form of a single-algebra diagram", [("diagram", "DSL or diagram JSON file")]),
    "qmux": (cmd_qmux, "multiplexor certificate", [("psi", "state JSON file or ghzN/wN"), ("phi", "state JSON file or ghzN/wN")]),
    "pldu": (cmd_pldu, "PLDU decomposition of a 2x2 matrix", [("matrix", "'a,b,c,d', JSON [[..],[..]] or a file")]),
    "export-dot": (cmd_export_dot, "Graphviz rendering of a diagram", [("diagram", "DSL or diagram JSON file")]),
}


def _common_flags(p: argparse.ArgumentParser, defaults: bool):
    # flags may appear before or after the verb; only the top level sets defaults
    d = (lambda v: v) if defaults else (lambda v: argparse.SUPPRESS)
    p.add_argument("--tol", type=float, default=d(1e-9), help="absolute and relative tolerance (default 1e-9)")
    p.add_argument("--seed", type=int, default=d(0), help="seed for randomized searches (default 0)")
    p.add_argument("--json", action="store_true", default=d(False), help="print a JSON report")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ghzw", description="GHZ/W diagram calculus tools")
    _common_flags(p, True)
    sub = p.add_subparsers(dest="verb", required=True, metavar="verb")
    for verb, (_, help_, args) in VERBS.items():
        sp = sub.add_parser(verb, help=help_)
        _common_flags(sp, False)
        for name, h in args:
            sp.add_argument(name, help=h)
        if verb == "eval":
            sp.add_argument("--pair", help="pair JSON giving the semantics (default: canonical)")
        if verb == "normalize":
            sp.add_argument("--kind", choices=rewrite.KINDS, default="cfa", help="algebra class (default cfa)")
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    a = parser.parse_args(argv)
    if not (a.tol >= 0 and np.isfinite(a.tol)):
        parser.error("--tol must be a finite nonnegative number")
    tol = Tolerance(a.tol, a.tol)
    fn = VERBS[a.verb][0]
    try:
        code, report, lines = fn(a, tol)
    except (UsageError, dg.DiagramError, TensorError, CfaError, slocc.SloccError, ghzw.PairError, rewrite.RewriteError) as exc:
        print(f"ghzw {a.verb}: error: {exc}", file=sys.stderr)
        return 2
    if a.json:
        payload = {"schema": REPORT_SCHEMA, "verb": a.verb, "exit": code, **_clean(report)}
        print(json.dumps(payload, sort_keys=True))
    else:
        print("\n".join(lines))
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
