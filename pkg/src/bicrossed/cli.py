"""Command-line driver.

Every command works inside a workspace directory (``--workspace``, default
``./workspace``) holding one JSON file per stored object plus
``manifest.json`` with their SHA-256 hashes.  Stored objects are re-validated
whenever they are loaded.

Exit codes: 0 success, 1 verification failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import random
import sys
from importlib import metadata
from pathlib import Path

import numpy as np

from .cohomology import (
    Cochain,
    PairCocycle,
    is_cocycle,
    kac_omega,
    restrict_cochain,
    solve_opext,
    trivialize_restriction,
    verify_pair,
    zero_cochain,
)
from .constructions import bicrossed_product, double_comparison, dpr_double, drinfeld_double
from .groups import (
    DEFAULT_CAP,
    ExactFactorization,
    FiniteGroup,
    GroupError,
    derive_matched_pair,
    exact_factorizations,
    make_factorization,
    named_group,
    rebuild_matches,
    verify_matched_pair,
)
from .hopf import (
    HopfError,
    QuasiBialgebra,
    StructureHopf,
    hopf_from_json,
    verify_algebra,
    verify_hopf,
    verify_quasi,
)
from .report import Report
from .repcat import default_objects, verify_equivalence
from .snf import ResourceCap


class UsageError(Exception):
    """Bad arguments or unknown workspace entries (exit code 2)."""


class ValidationError(Exception):
    """A stored object failed re-validation on load (exit code 1)."""


def _version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "0.1.0"


def _dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2)


# -- workspace -----------------------------------------------------------------

class Workspace:
    """Named JSON store with a hash manifest."""

    def __init__(self, root: Path):
        self.root = Path(root)
        self.manifest_path = self.root / "manifest.json"
        if self.manifest_path.exists():
            self.manifest = json.loads(self.manifest_path.read_text())
        else:
            self.manifest = {}

    @staticmethod
    def _file(name: str) -> str:
        return name.replace("/", "__") + ".json"

    def put(self, name: str, kind: str, payload: dict) -> None:
        self.root.mkdir(parents=True, exist_ok=True)
        text = _dumps({"kind": kind, "name": name, "payload": payload})
        fname = self._file(name)
        (self.root / fname).write_text(text)
        self.manifest[name] = {"kind": kind, "file": fname, "sha256": hashlib.sha256(text.encode()).hexdigest()}
        self.manifest_path.write_text(_dumps(self.manifest))

    def has(self, name: str) -> bool:
        return name in self.manifest

    def raw(self, name: str, kind: str | None = None) -> dict:
        if name not in self.manifest:
            raise UsageError(f"no workspace entry named {name!r}")
        entry = self.manifest[name]
        if kind is not None and entry["kind"] != kind:
            raise UsageError(f"{name!r} is a {entry['kind']}, expected a {kind}")
        text = (self.root / entry["file"]).read_text()
        if hashlib.sha256(text.encode()).hexdigest() != entry["sha256"]:
            raise ValidationError(f"{name!r}: file contents do not match the manifest hash")
        return json.loads(text)["payload"]

    def names(self, kind: str | None = None) -> list[str]:
        return sorted(n for n, e in self.manifest.items() if kind is None or e["kind"] == kind)

    # typed loaders, each re-validating

    def group(self, name: str) -> FiniteGroup:
        try:
            return FiniteGroup.from_json(self.raw(name, "group"))
        except GroupError as exc:
            raise ValidationError(f"{name!r}: {exc}") from exc

    def fact(self, name: str) -> ExactFactorization:
        d = self.raw(name, "factorization")
        sigma = self.group(d["group"])
        try:
            return make_factorization(sigma, d["F"], d["G"])
        except GroupError as exc:
            raise ValidationError(f"{name!r}: {exc}") from exc

    def pair(self, name: str) -> tuple[PairCocycle, ExactFactorization, dict]:
        d = self.raw(name, "pair")
        fact = self.fact(d["provenance"]["factorization"])
        pc = PairCocycle.from_json(d["pair"], derive_matched_pair(fact))
        rep = verify_pair(pc)
        if not rep.ok:
            raise ValidationError(f"{name!r}: {rep.summary()}")
        return pc, fact, d["provenance"]

    def cochain(self, name: str) -> Cochain:
        d = self.raw(name, "cochain")
        return Cochain.from_json(d["cochain"])

    def hopf(self, name: str):
        d = self.raw(name, "hopf")
        H = hopf_from_json(d["structure"])
        if isinstance(H, QuasiBialgebra):
            rep = verify_quasi(H)
        elif isinstance(H, StructureHopf):
            rep = verify_hopf(H) if H.antipode is not None else verify_quasi(H)
        else:
            rep = verify_algebra(H)
        if not rep.ok:
            raise ValidationError(f"{name!r}: {rep.summary()}")
        return H, d.get("provenance", {})


# -- argument resolution ---------------------------------------------------------

def _resolve_group(ws: Workspace, ref: str) -> tuple[str, FiniteGroup]:
    """A workspace name, a JSON file (table or permutations) or a named group."""
    if ws.has(ref):
        return ref, ws.group(ref)
    path = Path(ref)
    if path.suffix == ".json" or path.exists():
        if not path.exists():
            raise UsageError(f"no such file {ref}")
        try:
            data = json.loads(path.read_text())
            G = FiniteGroup.from_json(data)
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise UsageError(f"{ref}: not a group file ({exc})") from exc
        except GroupError as exc:
            raise ValidationError(f"{ref}: {exc}") from exc
        name = data.get("name", path.stem) if isinstance(data, dict) else path.stem
    else:
        try:
            G = named_group(ref)
        except GroupError as exc:
            raise UsageError(str(exc)) from exc
        name = ref
    ws.put(name, "group", G.to_json())
    return name, G


def _provenance(ws: Workspace, fact_name: str, N: int | None, cls: int | None) -> dict:
    d = ws.raw(fact_name, "factorization")
    return {"sigma": d["group"], "factorization": fact_name, "F": d["F"], "G": d["G"], "N": N, "class_index": cls}


def _emit(args, payload: dict) -> None:
    text = _dumps(payload)
    print(text)
    if getattr(args, "out", None):
        Path(args.out).write_text(text + "\n")


def _finish(args, ws: Workspace, name: str, rep: Report, extra: dict | None = None) -> int:
    payload = {"report": rep.to_json(), **(extra or {})}
    ws.put(f"report/{name}", "report", payload)
    _emit(args, payload)
    return 0 if rep.ok else 1


# -- commands ----------------------------------------------------------------------

def cmd_group_load(args, ws):
    name, G = _resolve_group(ws, args.source)
    if args.name and args.name != name:
        ws.put(args.name, "group", G.to_json())
        name = args.name
    _emit(args, {"name": name, "order": G.order, "abelian": G.is_abelian()})
    return 0


def cmd_group_show(args, ws):
    name, G = _resolve_group(ws, args.group)
    classes = G.conjugacy_classes()
    _emit(args, {
        "name": name,
        "order": G.order,
        "abelian": G.is_abelian(),
        "labels": list(G.labels),
        "element_orders": [G.element_order(a) for a in G.elements],
        "class_sizes": [len(c) for c in classes],
    })
    return 0


def cmd_factorize(args, ws):
    name, G = _resolve_group(ws, args.group)
    try:
        facts = exact_factorizations(G, cap=args.cap)
    except ResourceCap as exc:
        raise UsageError(str(exc)) from exc
    out = []
    for i, f in enumerate(facts):
        fname = f"{name}/f{i}"
        ws.put(fname, "factorization", {"group": name, "F": list(f.F_elems), "G": list(f.G_elems)})
        out.append({
            "name": fname,
            "F_order": f.F.order,
            "G_order": f.G.order,
            "F": [G.labels[a] for a in f.F_elems],
            "G": [G.labels[a] for a in f.G_elems],
            "trivial_actions": derive_matched_pair(f).is_trivial_actions(),
        })
    _emit(args, {"group": name, "factorizations": out})
    return 0


def cmd_matched_verify(args, ws):
    f = ws.fact(args.factorization)
    mp = derive_matched_pair(f)
    rep = verify_matched_pair(mp)
    rep.tick()
    if not rebuild_matches(f, mp):
        rep.fail("F x G product does not rebuild Sigma")
    return _finish(args, ws, f"matched/{args.factorization}", rep)


def cmd_opext_solve(args, ws):
    f = ws.fact(args.factorization)
    mp = derive_matched_pair(f)
    N = args.N or f.sigma.order
    try:
        res = solve_opext(mp, N, cap=args.cap)
    except ResourceCap as exc:
        raise UsageError(str(exc)) from exc
    names = []
    for k, pc in enumerate(res.classes()):
        pname = f"{args.factorization}/N{N}/c{k}"
        ws.put(pname, "pair", {"pair": pc.to_json(), "provenance": _provenance(ws, args.factorization, N, k)})
        names.append(pname)
    for w in res.warnings:
        print(f"warning: {w}", file=sys.stderr)
    _emit(args, {
        "factorization": args.factorization,
        "N": N,
        "order": res.order,
        "invariant_factors": res.invariant_factors,
        "trivial": res.order == 1,
        "classes": names,
        "n_unknowns": res.n_unknowns,
        "n_equations": res.n_equations,
        "warnings": res.warnings,
    })
    return 0


def _omega_report(w: Cochain, f: ExactFactorization) -> Report:
    rep = Report("kac_omega")
    rep.tick()
    if not is_cocycle(w):
        rep.fail("d omega != 0")
    for label, elems in (("F", f.F_elems), ("G", f.G_elems)):
        S, emb = f.sigma.subgroup(elems)
        r = restrict_cochain(w, S, emb)
        rep.tick()
        if not r.is_zero():
            rep.fail(f"omega restricted to {label} is not 1")
        cert = trivialize_restriction(w, S, emb)
        rep.tick()
        if cert is None or not cert.is_zero():
            rep.fail(f"restriction certificate on {label} is not zero")
    return rep


def cmd_omega_compute(args, ws):
    pc, f, prov = ws.pair(args.pair)
    w = kac_omega(pc, f)
    wname = f"{args.pair}/omega"
    ws.put(wname, "cochain", {"cochain": w.to_json(), "provenance": prov})
    return _finish(args, ws, f"omega/{args.pair}", _omega_report(w, f), {"cochain": wname, "zero": bool(w.is_zero())})


def _store_hopf(ws, name, H, prov) -> None:
    ws.put(name, "hopf", {"structure": H.to_json(), "provenance": prov})


def cmd_build(args, ws):
    try:
        if args.what == "bicrossed":
            pc, f, prov = ws.pair(args.source)
            H = bicrossed_product(pc)
            name = f"{args.source}/A"
        elif args.what == "double":
            if ws.has(args.source) and ws.manifest[args.source]["kind"] == "pair":
                pc, f, prov = ws.pair(args.source)
                H = drinfeld_double(bicrossed_product(pc))
                name = f"{args.source}/D(A)"
            else:
                A, prov = ws.hopf(args.source)
                H = drinfeld_double(A)
                name = f"{args.source}/D"
        else:
            gname, G = _resolve_group(ws, args.source)
            if args.omega:
                w = ws.cochain(args.omega)
            else:
                w = zero_cochain(G, 3, args.N or 1)
            H = dpr_double(G, w)
            prov = {"sigma": gname, "omega": args.omega, "N": w.N, "class_index": None}
            name = f"{gname}/dpr" + (f"[{args.omega}]" if args.omega else "")
    except HopfError as exc:
        rep = exc.report or Report("build")
        if exc.report is None:
            rep.fail(str(exc))
        return _finish(args, ws, f"build/{args.source}", rep)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    _store_hopf(ws, name, H, prov)
    _emit(args, {"name": name, "dim": H.dim, "N": H.N, "kind": H.to_json()["kind"]})
    return 0


def cmd_verify(args, ws):
    if args.what in ("hopf", "quasi"):
        d = ws.raw(args.target, "hopf")
        H = hopf_from_json(d["structure"])
        rep = verify_hopf(H) if args.what == "hopf" else verify_quasi(H)
    elif args.what == "pair":
        d = ws.raw(args.target, "pair")
        f = ws.fact(d["provenance"]["factorization"])
        rep = verify_pair(PairCocycle.from_json(d["pair"], derive_matched_pair(f)))
    else:
        w = ws.cochain(args.target)
        rep = Report("cocycle")
        rep.tick()
        if not is_cocycle(w):
            rep.fail("not a cocycle")
        rep.tick()
        if not w.is_normalized():
            rep.fail("not normalized")
    return _finish(args, ws, f"verify/{args.what}/{args.target}", rep)


def cmd_compare(args, ws):
    pc, f, prov = ws.pair(args.pair)
    w = ws.cochain(args.omega) if args.omega else None
    rep = double_comparison(pc, f, w)
    d = rep.details
    extra = {"verdict": d["verdict"], "dims": [d["double"]["dimension"], d["twisted_double"]["dimension"]]}
    return _finish(args, ws, f"compare/{args.pair}", rep, extra)


def cmd_repcat(args, ws):
    pc, f, prov = ws.pair(args.pair)
    rep = verify_equivalence(pc, f, default_objects(pc, f), triple_cap=args.triple_cap)
    return _finish(args, ws, f"repcat/{args.pair}", rep, {"details": rep.details})


def cmd_report(args, ws):
    rows = []
    for name in ws.names("report"):
        r = ws.raw(name, "report")["report"]
        rows.append({"name": name, "ok": r["ok"], "checked": r["checked"], "failures": r["n_failures"]})
    ok = all(r["ok"] for r in rows)
    if args.format == "markdown":
        lines = ["| report | status | checks | failures |", "|---|---|---|---|"]
        lines += [f"| {r['name']} | {'pass' if r['ok'] else 'FAIL'} | {r['checked']} | {r['failures']} |" for r in rows]
        text = "\n".join(lines)
        print(text)
        if args.out:
            Path(args.out).write_text(text + "\n")
    else:
        _emit(args, {"reports": rows, "ok": ok})
    return 0 if ok else 1


# -- parser ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bicrossed", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {_version()}")
    p.add_argument("--workspace", "-w", default="workspace", help="workspace directory")
    p.add_argument("--seed", type=int, default=0, help="seed for randomized helpers")
    p.add_argument("--out", help="also write the JSON output to this file")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("group", help="load or show a group").add_subparsers(dest="action", required=True)
    gl = g.add_parser("load")
    gl.add_argument("source", help="JSON file with a table or permutations, or a group name such as S3")
    gl.add_argument("--name")
    gl.set_defaults(func=cmd_group_load)
    gs = g.add_parser("show")
    gs.add_argument("group")
    gs.set_defaults(func=cmd_group_show)

    fz = sub.add_parser("factorize", help="enumerate exact factorizations")
    fz.add_argument("group")
    fz.add_argument("--cap", type=int, default=DEFAULT_CAP)
    fz.set_defaults(func=cmd_factorize)

    m = sub.add_parser("matched").add_subparsers(dest="action", required=True)
    mv = m.add_parser("verify")
    mv.add_argument("factorization")
    mv.set_defaults(func=cmd_matched_verify)

    o = sub.add_parser("opext").add_subparsers(dest="action", required=True)
    os_ = o.add_parser("solve")
    os_.add_argument("factorization")
    os_.add_argument("--N", type=int, help="torsion order of cocycle values (default |Sigma|)")
    os_.add_argument("--cap", type=int, default=4000)
    os_.set_defaults(func=cmd_opext_solve)

    om = sub.add_parser("omega").add_subparsers(dest="action", required=True)
    oc = om.add_parser("compute")
    oc.add_argument("pair")
    oc.set_defaults(func=cmd_omega_compute)

    b = sub.add_parser("build")
    b.add_argument("what", choices=["bicrossed", "double", "dpr"])
    b.add_argument("source", help="pair (bicrossed, double), Hopf algebra (double) or group (dpr)")
    b.add_argument("--omega", help="stored 3-cocycle for dpr")
    b.add_argument("--N", type=int, help="field order for the trivial 3-cocycle")
    b.set_defaults(func=cmd_build)

    v = sub.add_parser("verify")
    v.add_argument("what", choices=["hopf", "quasi", "pair", "cocycle"])
    v.add_argument("target")
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("compare")
    c.add_argument("what", choices=["doubles"])
    c.add_argument("pair")
    c.add_argument("--omega", help="compare against this stored 3-cocycle instead")
    c.set_defaults(func=cmd_compare)

    r = sub.add_parser("repcat")
    r.add_argument("what", choices=["check"])
    r.add_argument("pair")
    r.add_argument("--triple-cap", type=int, default=400)
    r.set_defaults(func=cmd_repcat)

    rp = sub.add_parser("report")
    rp.add_argument("--format", choices=["json", "markdown"], default="json")
    rp.set_defaults(func=cmd_report)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    random.seed(args.seed)
    np.random.seed(args.seed)
    ws = Workspace(Path(args.workspace))
    try:
        return args.func(args, ws)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValidationError as exc:
        rep = Report("load")
        rep.tick()
        rep.fail("stored object failed validation", message=str(exc))
        print(_dumps({"report": rep.to_json()}))
        print(f"validation failed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
