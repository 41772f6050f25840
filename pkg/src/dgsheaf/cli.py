"""Command-line front end: ``dgsheaf --input FILE --command NAME ...``.

Exit codes: 0 success, 1 parse or space error, 2 precondition violation,
3 internal certification failure (including a failed ``--recheck``).
"""
from __future__ import annotations

import argparse
import json
import sys

from .derived import (cotangent_complex, derived_intersection, derived_tensor, intersection_oracle_check)
from .dgring import StructureError, validate_dg
from .errors import CertificationError, PreconditionError
from .homology import WindowError, cohomology, is_quasi_iso, linear_cohomology_dimension, parse_window
from .modules import NotFiniteDimensional, module_iso_test
from .parsing import ParseError
from .problem import Problem, load_file
from .pseudofree import flatness_check, hilbert_series_oracle
from .resolution import (ResolutionStage, certify, check_homotopy_witness, check_quasi_homotopy_witness,
                         ore_square, resolve)
from .space import SpaceError

COMMANDS = ("validate", "stalk", "cohomology", "resolve", "certify", "qiso", "dtensor", "intersect",
            "ore-square", "homotopy-check", "cotangent", "oracle-compare")


def _flag(ok) -> str:
    if ok is None:
        return "skip"
    return "pass" if ok else "fail"


def _settings(args, cmd):
    qmax = args.qmax if args.qmax is not None else cmd.get("qmax")
    window = args.window if args.window is not None else cmd.get("window")
    if window is not None:
        lo, hi = parse_window(window)
        if qmax is None:
            qmax = max(1 - lo, 0)
    else:
        if qmax is None:
            qmax = 2
        lo, hi = min(-qmax + 1, 0), 0
    seed = args.seed if args.seed is not None else cmd.get("seed", 0)
    return qmax, (lo, hi), seed


def _target(problem: Problem, cmd, key="target"):
    return problem.ring(cmd[key]) if key in cmd else problem.default_ring()


def _need(cmd, key):
    if key not in cmd:
        raise ParseError(f"command {cmd['name']!r} needs the field {key!r}")
    return cmd[key]


def _checked(problem: Problem, name):
    f = problem.morphism(name)
    res = f.check()
    if not res.ok:
        raise PreconditionError(f"morphism {name!r} is not a DG morphism: {res.offending[0]}")
    return f


def _linear_recheck(B, report, checks):
    for x, row in report.entries.items():
        for n, entry in row.items():
            dim = linear_cohomology_dimension(B.stalk(x), n)
            ok = None if dim is None or entry.dimension is None else dim == entry.dimension
            checks[f"recheck:linear:{x}:{n}"] = _flag(ok)


# ---------------------------------------------------------------- commands

def cmd_validate(problem, cmd, q, window, seed, recheck):
    checks = {"space": "pass"}
    for name, R in problem.rings.items():
        res = validate_dg(R)
        checks[f"ring:{name}"] = _flag(res.ok)
    for name, f in problem.morphisms.items():
        checks[f"morphism:{name}"] = _flag(f.check().ok)
    for name, M in problem.modules.items():
        checks[f"module:{name}"] = _flag(not M.check_d_squared())
    return {"checks": checks}, []


def cmd_stalk(problem, cmd, q, window, seed, recheck):
    R = _target(problem, cmd)
    lo, hi = window
    per_point, checks = {}, {}
    for x in problem.space:
        st = R.stalk(x)
        sr = R.stalk_ring(x)
        row = {}
        for n in range(lo, hi + 1):
            row[str(n)] = {"rank": st.rank(n),
                           "presentation": {"ring": list(st.P.variables), "basis": st.labels(n),
                                            "relations": [str(r) for r in st.rels if r.degree() >= n]}}
            if recheck:
                got = sr.hilbert(n, 3)
                want = hilbert_series_oracle(sr.degrees, n, 3)
                checks[f"recheck:hilbert:{x}:{n}"] = _flag(got == want)
        per_point[str(x)] = row
    for n in range(lo, hi + 1):
        checks[f"flatness:{n}"] = _flag(flatness_check(R, n).ok)
    lines = [f"  {x}: " + ", ".join(f"rank^{n}={row[str(n)]['rank']}" for n in range(hi, lo - 1, -1))
             for x, row in ((x, per_point[str(x)]) for x in problem.space)]
    return {"per_point": per_point, "checks": checks}, lines


def cmd_cohomology(problem, cmd, q, window, seed, recheck):
    B = _target(problem, cmd)
    rep = cohomology(B, window)
    checks = {}
    if recheck:
        _linear_recheck(B, rep, checks)
    data = rep.to_json()
    return {"per_point": data["per_point"], "restrictions": data["restrictions"], "checks": checks}, \
        rep.summary_lines()


def _stage_report(stage: ResolutionStage, recheck):
    checks = {"certificate": _flag(stage.certificate.ok)}
    if recheck:
        checks["recheck:certificate"] = _flag(certify(stage).ok)
    lines = [f"  {g['id']}: degree {g['degree']} on {g['support']}, d = {g['d']}, -> {g['image']}"
             for g in stage.generators_table()]
    lines += [f"  ({'global' if e[0] is None else e[0]}, {e[1]}) {e[2]}: {e[3]}"
              for e in stage.certificate.table()]
    return {"generators": stage.generators_table(), "certificate": stage.certificate.to_json(),
            "checks": checks}, lines


def cmd_resolve(problem, cmd, q, window, seed, recheck):
    stage = resolve(_target(problem, cmd), q, seed=seed)
    return _stage_report(stage, recheck)


def cmd_certify(problem, cmd, q, window, seed, recheck):
    if "morphism" in cmd:
        f = _checked(problem, cmd["morphism"])
        stage = ResolutionStage(q, f.target, f.source, f)
        stage.certificate = certify(stage)
        return _stage_report(stage, recheck)
    return cmd_resolve(problem, cmd, q, window, seed, recheck)


def cmd_qiso(problem, cmd, q, window, seed, recheck):
    f = _checked(problem, _need(cmd, "morphism"))
    res = is_quasi_iso(f, window)
    checks = {"quasi_iso": _flag(res.ok)}
    if recheck:
        src, tgt = cohomology(f.source, window, False), cohomology(f.target, window, False)
        same = all(src.entries[x][n].dimension == tgt.entries[x][n].dimension
                   for x in problem.space for n in range(window[0], window[1] + 1))
        checks["recheck:dimensions"] = _flag(same if res.ok else None)
    witness = None if res.witness is None else [str(res.witness[0]), res.witness[1], res.witness[2]]
    lines = [f"  quasi-isomorphism: {res.ok} ({res.method})"]
    if witness:
        lines.append(f"  witness: point {witness[0]}, degree {witness[1]}: {witness[2]}")
    return {"quasi_iso": res.ok, "method": res.method, "witness": witness, "checks": checks}, lines


def cmd_dtensor(problem, cmd, q, window, seed, recheck):
    B, C = problem.ring(_need(cmd, "left")), problem.ring(_need(cmd, "right"))
    one = cmd.get("one_sided", False)
    dt = derived_tensor(B, C, q, window, seed=seed, one_sided=one)
    checks = {}
    if recheck:
        for label, kw in (("seed", {"seed": seed + 1, "one_sided": one}), ("one_sided", {"seed": seed, "one_sided": not one})):
            other = derived_tensor(B, C, q, window, **kw)
            same = all(module_iso_test(dt.report.module(x, n), other.report.module(x, n))
                       for x in problem.space for n in range(window[0], window[1] + 1))
            checks[f"recheck:{label}"] = _flag(same)
    data = dt.report.to_json()
    xi_witness = None if dt.xi_witness is None else [str(w) for w in dt.xi_witness]
    lines = dt.report.summary_lines() + [f"  comparison map to the underived product is a quasi-iso: {dt.xi_quasi_iso}"]
    return {"per_point": data["per_point"], "restrictions": data["restrictions"], "checks": checks,
            "one_sided": one, "xi_quasi_iso": dt.xi_quasi_iso, "xi_witness": xi_witness}, lines


def _intersection(problem, cmd, q, window, seed):
    _need(cmd, "subspaces")
    X = problem.ringed_space(cmd["structure"]) if "structure" in cmd else \
        problem.ringed_space(problem.default_ring().name)
    Y1, Y2 = (problem.subspace(n) for n in cmd["subspaces"])
    di = derived_intersection(X, Y1, Y2, q, window, seed=seed)
    orc = intersection_oracle_check(X, Y1, Y2, di, window)
    return X, di, orc


def cmd_intersect(problem, cmd, q, window, seed, recheck):
    X, di, orc = _intersection(problem, cmd, q, window, seed)
    checks = {"oracle_match": _flag(orc.ok), "support": _flag(di.support_ok)}
    if recheck and di.structure is not None:
        _linear_recheck(di.structure, di.report, checks)
    data = di.report.to_json()
    lines = di.report.summary_lines() + [f"  oracle-match: {str(orc.ok).lower()}"]
    return {"support": sorted(map(str, di.support)), "per_point": data["per_point"],
            "restrictions": data["restrictions"], "checks": checks}, lines


def cmd_oracle_compare(problem, cmd, q, window, seed, recheck):
    X, di, orc = _intersection(problem, cmd, q, window, seed)
    rows = {}
    lines = []
    for y in sorted(di.support, key=str):
        eng = {str(n): di.report.entries[y][n].rank for n in range(window[0], window[1] + 1)}
        ora = {str(n): ("inf" if r is None else r) for n, r in orc.oracle_ranks[y].items()}
        rows[str(y)] = {"engine": eng, "oracle": ora, "method": orc.methods[y],
                        "match": {str(n): orc.matches[(y, n)] for n in range(window[0], window[1] + 1)}}
        lines.append(f"  {y}: engine {eng}, oracle ({orc.methods[y]}) {ora}")
    lines.append(f"  oracle-match: {str(orc.ok).lower()}")
    return {"comparison": rows, "checks": {"oracle_match": _flag(orc.ok)}}, lines


def cmd_ore_square(problem, cmd, q, window, seed, recheck):
    _need(cmd, "morphisms")
    phi0, phi1 = (_checked(problem, n) for n in cmd["morphisms"])
    sq = ore_square(phi0, phi1, q, seed=seed)
    w = (-q + 1, 0)
    r0, r1 = is_quasi_iso(sq.psi0, w), is_quasi_iso(sq.psi1, w)
    checks = {"closes": _flag(sq.closes), "psi0_quasi_iso": _flag(r0.ok), "psi1_quasi_iso": _flag(r1.ok)}
    gens = sq.resolution.generators_table()
    lines = [f"  closes: {sq.closes}", f"  psi0 quasi-iso: {r0.ok}", f"  psi1 quasi-iso: {r1.ok}",
             f"  B' generators: {', '.join(g['id'] for g in gens)}"]
    return {"generators": gens, "mismatches": [list(map(str, m)) for m in sq.mismatches],
            "checks": checks}, lines


def cmd_homotopy_check(problem, cmd, q, window, seed, recheck):
    w = problem.witnesses.get(_need(cmd, "witness"))
    _need(cmd, "morphisms")
    if w is None:
        raise ParseError(f"unknown witness {cmd['witness']!r}")
    phi0, phi1 = (_checked(problem, n) for n in cmd["morphisms"])
    if "psi" in cmd:
        res = check_quasi_homotopy_witness(_checked(problem, cmd["psi"]), w, phi0, phi1, window)
    else:
        res = check_homotopy_witness(w, phi0, phi1, window)
    diags = [[d[0], str(d[1])] for d in res.diagnostics]
    lines = [f"  witness ok: {res.ok}"] + [f"  {d[0]}: {d[1]}" for d in diags]
    return {"diagnostics": diags, "checks": {"witness": _flag(res.ok)}}, lines


def cmd_cotangent(problem, cmd, q, window, seed, recheck):
    X = problem.ringed_space(cmd["structure"]) if "structure" in cmd else \
        problem.ringed_space(problem.default_ring().name)
    cc = cotangent_complex(X, q, window, seed=seed)
    data = cc.report.to_json()
    basis = [{"id": b.id, "degree": b.degree, "support": sorted(map(str, b.support.members))}
             for b in cc.module.basis]
    lines = ["  EXPERIMENTAL: agreement only with registered small oracles"] + cc.report.summary_lines()
    return {"experimental": True, "basis": basis, "per_point": data["per_point"],
            "checks": {"d_squared": "pass"}}, lines


HANDLERS = {
    "validate": cmd_validate, "stalk": cmd_stalk, "cohomology": cmd_cohomology, "resolve": cmd_resolve,
    "certify": cmd_certify, "qiso": cmd_qiso, "dtensor": cmd_dtensor, "intersect": cmd_intersect,
    "ore-square": cmd_ore_square, "homotopy-check": cmd_homotopy_check, "cotangent": cmd_cotangent,
    "oracle-compare": cmd_oracle_compare,
}


# ---------------------------------------------------------------- entry point

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(1)


def _join_window(argv):
    """Allow ``--window -3:0`` (argparse would read -3:0 as an option)."""
    out = list(argv)
    for i, a in enumerate(out[:-1]):
        if a == "--window" and out[i + 1].startswith("-"):
            out[i:i + 2] = [f"--window={out[i + 1]}"]
            break
    return out


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="dgsheaf", description="Sheaves of DG rings on finite spaces.")
    p.add_argument("--input", required=True, help="problem file (JSON)")
    p.add_argument("--command", choices=COMMANDS, help="override the command named in the file")
    p.add_argument("--qmax", type=int, help="resolution stage")
    p.add_argument("--window", help="degree window MIN:MAX")
    p.add_argument("--seed", type=int, help="candidate-order seed (0 keeps input order)")
    p.add_argument("--recheck", action="store_true", help="re-derive claims through independent code paths")
    p.add_argument("--out", help="write the JSON report here ('-' for standard output)")
    return p


def execute(problem: Problem, name: str, args) -> dict:
    cmd = problem.command
    q, window, seed = _settings(args, cmd)
    body, lines = HANDLERS[name](problem, cmd, q, window, seed, args.recheck)
    report = {"command": name, "window": list(window), "q_max": q, "seed": seed,
              "per_point": {}, "checks": {}}
    report.update(body)
    return report, lines


def _fail(code, kind, exc, out):
    print(f"error ({kind}): {exc}", file=sys.stderr)
    if out:
        payload = {"error": {"kind": kind, "message": str(exc), "exit_code": code}}
        _write(payload, out)
    return code


def _write(report, out):
    text = json.dumps(report, sort_keys=True, indent=2) + "\n"
    if out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


def run(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    args = build_parser().parse_args(_join_window(argv))
    try:
        problem = load_file(args.input)
        name = args.command or problem.command["name"]
        if name not in HANDLERS:
            raise ParseError(f"unknown command {name!r}")
        report, lines = execute(problem, name, args)
    except (ParseError, SpaceError) as exc:
        return _fail(1, "parse", exc, args.out)
    except CertificationError as exc:
        return _fail(3, "certification", exc, args.out)
    except (PreconditionError, StructureError, WindowError, NotFiniteDimensional) as exc:
        return _fail(2, "precondition", exc, args.out)
    except ValueError as exc:
        return _fail(1, "input", exc, args.out)
    print(f"{name}: window [{report['window'][0]}, {report['window'][1]}], q_max {report['q_max']}")
    for line in lines:
        print(line)
    for k, v in sorted(report["checks"].items()):
        if not k.startswith("recheck:") or v == "fail":
            print(f"  check {k}: {v}")
    if args.out:
        _write(report, args.out)
    code = 0
    if name == "validate" and any(v == "fail" for v in report["checks"].values()):
        code = 2
    if any(v == "fail" for k, v in report["checks"].items() if k.startswith("recheck:")):
        print("error (certification): an independent recheck disagrees with the engine", file=sys.stderr)
        code = 3
    return code


def main():
    sys.exit(run())
