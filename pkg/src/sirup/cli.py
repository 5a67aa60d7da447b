"""Command-line front end.

Exit codes: 0 success, 1 domain error, 2 usage error, 3 verification
failure (including oracle disagreement).
"""
from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass
from pathlib import Path

from . import cactus as cac
from .classify import FORewriting, cq_kind, tetrachotomy
from .datalog import build_pi_q, build_symmetric_program, structural_check
from .model import ABox, Ontology, SirupError, parse_abox, parse_query, serialize
from .oracle import CLAUSE_CAP, ENUM_CAP, certain_answer_enum, certain_answer_sat, ground_to_cnf
from .gadgets import bike as bk
from .gadgets.chess import chessboard
from .gadgets.circuit import parse_netlist, circuit_gadget
from .gadgets.qbf import forall_exists, parse_dimacs, parse_qdimacs
from .gadgets.reach import reach_dag, reach_undirected
from .gadgets.verify import KINDS, verify_reduction

EXIT_OK, EXIT_DOMAIN, EXIT_USAGE, EXIT_VERIFY = 0, 1, 2, 3


@dataclass(frozen=True)
class RunConfig:
    enum_cap: int = ENUM_CAP
    clause_cap: int = CLAUSE_CAP
    depth: int = 3
    count_cap: int = 10_000
    seed: int = 0
    out_dir: Path | None = None

    def __post_init__(self):
        for k in ("enum_cap", "clause_cap", "depth", "count_cap"):
            if getattr(self, k) <= 0:
                raise SirupError(f"{k.replace('_', '-')} must be positive")


class Run:
    """Collects the printed report and its key = value sidecar."""

    def __init__(self, cfg: RunConfig, name: str):
        self.cfg, self.name = cfg, name
        self.lines, self.keys = [], {}

    def say(self, text=""):
        self.lines.append(str(text))
        print(text)

    def key(self, k, v):
        self.keys[k] = v

    def artifact(self, filename, text):
        """Write to the output directory, or print when there is none."""
        if self.cfg.out_dir is None:
            print(text, end="" if text.endswith("\n") else "\n")
            return
        self.cfg.out_dir.mkdir(parents=True, exist_ok=True)
        (self.cfg.out_dir / filename).write_text(text)
        self.key("artifact." + filename.rsplit(".", 1)[-1], str(self.cfg.out_dir / filename))

    def finish(self, code=EXIT_OK):
        self.key("exit", code)
        if self.cfg.out_dir is not None:
            self.cfg.out_dir.mkdir(parents=True, exist_ok=True)
            (self.cfg.out_dir / f"{self.name}.txt").write_text("\n".join(self.lines) + "\n")
            kv = "".join(f"{k} = {v}\n" for k, v in self.keys.items())
            (self.cfg.out_dir / f"{self.name}.kv").write_text(kv)
        return code


def _read(path) -> str:
    try:
        return Path(path).read_text()
    except OSError as e:
        raise SirupError(f"cannot read {path}: {e.strerror}") from None


def _query(path):
    return parse_query(_read(path))


def _abox(path):
    return parse_abox(_read(path))


def checked_abox(a: ABox, header=()) -> str:
    """Serialize and make sure the text parses back to the same atoms.
    Individuals without atoms have no written form; they are listed in a
    comment instead."""
    bare = sorted(a.individuals - {x for _, x in a.unary} - {x for s, _, d in a.binary for x in (s, d)})
    header = list(header) + ([f"isolated individuals: {' '.join(bare)}"] if bare else [])
    text = serialize(a, header)
    back = parse_abox(text)
    if (back.unary, back.binary) != (a.unary, a.binary):
        raise SirupError("serialized ABox does not parse back to itself")
    return text


def _graph(path):
    nodes, edges = [], []
    for line in _read(path).splitlines():
        parts = line.split("#", 1)[0].split()
        if len(parts) == 1:
            nodes.append(parts[0])
        elif len(parts) == 2:
            edges.append(tuple(parts))
        elif parts:
            raise SirupError(f"graph lines hold one vertex or one edge, got {line!r}")
    return nodes, edges


def _assignment(text):
    out = {}
    for item in filter(None, (s.strip() for s in text.split(","))):
        k, _, v = item.partition("=")
        if v.strip().upper() not in ("1", "0", "T", "F", "TRUE", "FALSE"):
            raise SirupError(f"bad assignment item {item!r}")
        out[k.strip()] = v.strip().upper() in ("1", "T", "TRUE")
    return out


# ------------------------------------------------------------ commands

def cmd_classify(a, cfg):
    r = Run(cfg, "classify")
    v = tetrachotomy(_query(a.cq), Ontology.parse(a.ontology))
    r.say(v.summary())
    for k, val in v.record().items():
        r.key(k, val)
    return r.finish()


def cmd_answer(a, cfg):
    r = Run(cfg, "answer")
    o, q, ab = Ontology.parse(a.ontology), _query(a.cq), _abox(a.abox)
    yn = lambda b: "yes" if b else "no"
    got = {}
    if a.method in ("sat", "both"):
        got["sat"] = certain_answer_sat(o, q, ab, cfg.clause_cap).answer
    if a.method in ("enum", "both"):
        got["enum"] = certain_answer_enum(o, q, ab, cfg.enum_cap).answer
    for k, v in got.items():
        r.key(f"answer.{k}", yn(v))
    if a.method != "both":
        r.say(yn(next(iter(got.values()))))
        return r.finish()
    agree = got["sat"] == got["enum"]
    r.say(f"{yn(got['sat'])} / {yn(got['enum'])} (oracles {'agree' if agree else 'disagree'})")
    r.key("agree", str(agree).lower())
    return r.finish(EXIT_OK if agree else EXIT_VERIFY)


def cmd_rewrite(a, cfg):
    r = Run(cfg, f"rewrite-{a.target}")
    o = Ontology.parse(a.ontology)
    if a.target == "symmetric":
        parts = [_query(p) for p in (a.q1, a.qp, a.q2)]
        prog = build_symmetric_program(*parts, a.x, a.y, o)
        rep = structural_check(prog)
        r.say(f"symmetric datalog program, {len(prog.rules)} rules; symmetric = {rep.symmetric}")
        r.key("symmetric", str(rep.symmetric).lower())
        r.artifact("rewriting.dl", prog.emit())
        return r.finish()
    q = _query(a.cq)
    if a.target == "datalog":
        if cq_kind(q) != 1:
            raise SirupError("the datalog program is defined for 1-CQs")
        prog = build_pi_q(q, o)
        rep = structural_check(prog)
        r.say(f"datalog program, {len(prog.rules)} rules; linear = {rep.linear}")
        r.key("rules", len(prog.rules))
        r.key("linear", str(rep.linear).lower())
        r.artifact("rewriting.dl", prog.emit())
        return r.finish()
    if q.path is not None and not o.total and cq_kind(q) != 1:
        v = tetrachotomy(q, o)
        if isinstance(v.rewriting, FORewriting):
            r.say(f"FO-rewritable: {v.summary()}")
            r.key("depth", "-")
            r.artifact("rewriting.ucq", v.rewriting.render() + "\n")
            return r.finish()
    if cq_kind(q) != 1:
        raise SirupError("no FO-rewriting: the query is neither a 0-CQ nor a 1-CQ")
    res = cac.fo_probe(q, o, cfg.depth, cfg.count_cap)
    r.say(res.summary())
    r.key("probe", res.kind.value)
    r.key("depth", res.depth if res.depth is not None else "-")
    if res.rewriting is None:
        raise SirupError(f"no FO-rewriting found up to depth {cfg.depth}")
    r.artifact("rewriting.ucq", res.rewriting.render())
    return r.finish()


def cmd_cactus(a, cfg):
    r = Run(cfg, f"cactus-{a.action}")
    q, o = _query(a.cq), Ontology.parse(a.ontology)
    if a.action == "enumerate":
        en = cac.enumerate_cactuses(q, o, cfg.depth, cfg.count_cap, max_segments=a.max_segments)
        r.say(f"{len(en.cactuses)} cactuses; {en.frontier()}")
        r.key("count", len(en.cactuses))
        r.key("truncated", str(en.truncated).lower())
        if a.dump:
            r.artifact("cactuses.abox", "\n".join(c.dump() for c in en.cactuses))
    elif a.action == "branching":
        pool = cac.minimal_pool(q, o, cfg.depth, a.max_segments or 7)
        nums = sorted(cac.branching_number(c).number for c in pool.cactuses)
        top = nums[-1] if nums else 0
        r.say(f"{len(nums)} minimal cactuses; max branching number {top}; {pool.frontier()}")
        r.key("minimal", len(nums))
        r.key("max_branching", top)
        r.key("truncated", str(pool.truncated).lower())
    else:
        res = cac.fo_probe(q, o, cfg.depth, cfg.count_cap)
        r.say(res.summary())
        r.key("probe", res.kind.value)
        r.key("depth", res.depth if res.depth is not None else "-")
    return r.finish()


def _gadget_abox(a):
    """Returns (query or None, ABox, header lines)."""
    g = a.gadget
    if g == "chessboard":
        q, ab = chessboard(a.n)
        return q, ab, [f"mutilated chessboard, n = {a.n}"]
    if g == "ae3sat":
        phi = parse_qdimacs(_read(a.formula))
        o = Ontology.parse(a.ontology)
        q, ab = forall_exists(phi, o)
        return q, ab, [f"forall-exists 3SAT, {phi.x_vars} x-vars, {phi.y_vars} y-vars, {o.value}"]
    q = _query(a.cq)
    if g == "reach-u":
        nodes, edges = _graph(a.graph)
        import networkx as nx
        G = nx.Graph(edges)
        G.add_nodes_from(nodes)
        return q, reach_undirected(q, G, a.source, a.target, a.label_a), ["undirected reachability"]
    if g == "reach-dag":
        nodes, edges = _graph(a.graph)
        import networkx as nx
        G = nx.DiGraph(edges)
        G.add_nodes_from(nodes)
        return q, reach_dag(q, G, a.source, a.target), ["dag reachability"]
    if g == "circuit":
        circ = parse_netlist(_read(a.circuit))
        alpha = _assignment(a.assignment)
        missing = set(circ.input_gates) - set(alpha)
        if missing:
            raise SirupError(f"no value for input gates {sorted(missing)}")
        ab = circuit_gadget(q, circ, alpha)
        return q, ab, [f"monotone circuit, value {'T' if circ.evaluate(alpha) else 'F'}"]
    if g == "wheel":
        choice = tuple(a.contacts.split(",")) if a.contacts else None
        w = bk.cogwheel(q, a.n, choice)
        return q, w.abox, [f"cogwheel, n = {a.n}"]
    if g == "bike":
        b = bk.bike(q, a.n)
        return q, b.abox, [f"bike, n = {b.n}"]
    if g == "psi":
        psi = parse_dimacs(_read(a.formula))
        pg = bk.psi_gadget(q, psi)
        return q, pg.abox, [f"3CNF gadget, n = {pg.n}, {len(pg.bikes)} bikes, {len(psi.clauses)} clauses"]
    raise SirupError(f"unknown gadget {g!r}")


def cmd_gadget(a, cfg):
    r = Run(cfg, f"gadget-{a.gadget}")
    q, ab, header = _gadget_abox(a)
    text = checked_abox(ab, header)
    r.say(f"{header[0]}: {len(ab.individuals)} individuals, {len(ab.unary) + len(ab.binary)} atoms")
    r.key("individuals", len(ab.individuals))
    r.key("atoms", len(ab.unary) + len(ab.binary))
    if q is not None and a.gadget in ("chessboard", "ae3sat"):
        r.artifact("query.cq", serialize(q))
    r.artifact("gadget.abox", text)
    return r.finish()


def cmd_verify(a, cfg):
    r = Run(cfg, f"verify-{a.kind.lower()}")
    kind = {k.lower(): k for k in KINDS}.get(a.kind.lower().replace("-", ""))
    if kind is None:
        raise SirupError(f"unknown kind {a.kind!r}; expected one of {', '.join(KINDS)}")
    p = {"seed": cfg.seed}
    if a.cq:
        p["query"] = _query(a.cq)
    for k in ("max_gates", "max_nodes", "samples", "n"):
        if getattr(a, k) is not None:
            p[k] = getattr(a, k)
    if a.formula:
        p["psi"] = parse_dimacs(_read(a.formula))
    elif kind == "PsiStructured":
        raise SirupError("PsiStructured needs --formula")
    rep = verify_reduction(kind, p, a.oracle, jobs=a.jobs)
    r.say(rep.summary())
    for k, v in rep.record().items():
        r.key(k, v)
    return r.finish(EXIT_OK if rep.passed else EXIT_VERIFY)


def cmd_export_cnf(a, cfg):
    r = Run(cfg, "export-cnf")
    cnf = ground_to_cnf(Ontology.parse(a.ontology), _query(a.cq), _abox(a.abox), cfg.clause_cap)
    r.key("variables", len(cnf.variables))
    r.key("clauses", len(cnf.clauses))
    r.artifact("instance.cnf", cnf.to_dimacs())
    return r.finish()


# -------------------------------------------------------------- parsing

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False, allow_abbrev=False)
    common.add_argument("--out", type=Path, help="directory for artifacts and report files")
    common.add_argument("--seed", type=int, default=0, help="random seed (SIRUP_SEED overrides)")
    common.add_argument("--enum-cap", type=int, default=ENUM_CAP)
    common.add_argument("--clause-cap", type=int, default=CLAUSE_CAP)
    common.add_argument("--depth", type=int, default=3, help="cactus depth bound")
    common.add_argument("--count-cap", type=int, default=10_000, help="cactus count cap")

    p = argparse.ArgumentParser(prog="sirup", description=__doc__.splitlines()[0], allow_abbrev=False)
    sub = p.add_subparsers(dest="command", required=True)

    def cmd(name, fn, **kw):
        s = sub.add_parser(name, parents=[common], allow_abbrev=False, **kw)
        s.set_defaults(fn=fn)
        return s

    def onto(s, default="cov_a"):
        s.add_argument("--ontology", default=default, help="cov_a (d-sirup), cov_a_bot (dd-sirup), cov_top, cov_top_bot")

    s = cmd("classify", cmd_classify, help="complexity class of a path CQ")
    s.add_argument("--cq", required=True)
    onto(s)

    s = cmd("answer", cmd_answer, help="certain answer over an ABox")
    s.add_argument("--cq", required=True)
    s.add_argument("--abox", required=True)
    s.add_argument("--method", choices=("sat", "enum", "both"), default="sat")
    onto(s)

    s = cmd("rewrite", cmd_rewrite, help="FO, datalog or symmetric datalog rewriting")
    s.add_argument("target", choices=("fo", "datalog", "symmetric"))
    s.add_argument("--cq")
    for k in ("--q1", "--qp", "--q2", "--x", "--y"):
        s.add_argument(k, help="symmetric decomposition part")
    onto(s)

    s = cmd("cactus", cmd_cactus, help="cactus enumeration, branching and FO probe")
    s.add_argument("action", choices=("enumerate", "branching", "probe"))
    s.add_argument("--cq", required=True)
    s.add_argument("--max-segments", type=int)
    s.add_argument("--dump", action="store_true", help="write the enumerated cactuses")
    onto(s)

    s = cmd("gadget", cmd_gadget, help="build a reduction ABox")
    s.add_argument("gadget", choices=("chessboard", "ae3sat", "reach-u", "reach-dag", "circuit",
                                      "wheel", "bike", "psi"))
    s.add_argument("--cq")
    s.add_argument("--n", type=int)
    s.add_argument("--formula", help="DIMACS (psi) or QDIMACS (ae3sat) file")
    s.add_argument("--graph", help="edge list, one 'u v' per line")
    s.add_argument("--source")
    s.add_argument("--target")
    s.add_argument("--label-a", action="store_true")
    s.add_argument("--circuit", help="netlist file")
    s.add_argument("--assignment", default="", help="input values, e.g. g1=1,g2=0")
    s.add_argument("--contacts", help="wheel contact pair 't,f' used in every copy")
    onto(s)

    s = cmd("verify", cmd_verify, help="check a reduction against ground truth")
    s.add_argument("--kind", required=True, help=", ".join(KINDS))
    s.add_argument("--cq")
    s.add_argument("--max-gates", type=int)
    s.add_argument("--max-nodes", type=int)
    s.add_argument("--samples", type=int)
    s.add_argument("--n", type=int)
    s.add_argument("--formula")
    s.add_argument("--oracle", choices=("sat", "enum", "both"), default="sat")
    s.add_argument("--jobs", type=int, default=1)

    s = cmd("export-cnf", cmd_export_cnf, help="ground an instance to DIMACS")
    s.add_argument("--cq", required=True)
    s.add_argument("--abox", required=True)
    onto(s)
    return p


_NEEDS = {
    "gadget": {"chessboard": ("n",), "ae3sat": ("formula",), "reach-u": ("cq", "graph", "source", "target"),
               "reach-dag": ("cq", "graph", "source", "target"), "circuit": ("cq", "circuit"),
               "wheel": ("cq", "n"), "bike": ("cq",), "psi": ("cq", "formula")},
    "rewrite": {"fo": ("cq",), "datalog": ("cq",), "symmetric": ("q1", "qp", "q2", "x", "y")},
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        a = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    which = getattr(a, "gadget", None) or getattr(a, "target", None)
    if a.command in _NEEDS:
        need = _NEEDS[a.command][which]
        missing = [f"--{k.replace('_', '-')}" for k in need if getattr(a, k, None) is None]
        if missing:
            print(f"sirup {a.command} {which}: missing {', '.join(missing)}", file=sys.stderr)
            return EXIT_USAGE
    seed = os.environ.get("SIRUP_SEED")
    if seed is not None:
        try:
            a.seed = int(seed)
        except ValueError:
            print(f"SIRUP_SEED must be an integer, got {seed!r}", file=sys.stderr)
            return EXIT_USAGE
    try:
        cfg = RunConfig(a.enum_cap, a.clause_cap, a.depth, a.count_cap, a.seed, a.out)
        return a.fn(a, cfg)
    except SirupError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
