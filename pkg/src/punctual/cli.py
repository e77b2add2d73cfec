"""Batch front door: fixture ingestion, scenario execution, JSON audit
reports, and golden-trace regression.

Reports never contain floating point: every rational is serialized as an
exact "num/den" string, and the deterministic section of a report is
reproducible bit-exactly from (fixture, seed, budget, horizon).

Exit codes: 0 all audits pass, 2 parse error, 3 budget violation,
4 audit failure or replay divergence, 5 broken input promise.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from .core import StepOracle, UniversalTable, polynomial_budget
from .diagonal import (
    DelaySchedule,
    baire_adversary,
    baire_bounded_adversary,
    bct_solve,
    modulus_check,
    uc_adversary,
)
from .errors import (
    AuditFailure,
    HallViolation,
    PromiseViolation,
    PunctualError,
    PunctualityViolation,
)
from .online_comb import (
    BipartiteInstance,
    HonestGraph,
    OrientedGraphStream,
    PosetStream,
    hall_extended,
    hall_finite,
    reorient,
    rival_sands,
    schmerl_color,
    szpilrajn_extend,
)
from .structures import (
    BackForth,
    ba_build,
    ba_decode,
    ba_encode,
    dlo_build,
    dlo_decode,
    dlo_encode,
    rg_build,
    rg_decode,
    rg_encode,
)
from .transform import (
    ColoringInstance,
    baer_decode_set,
    baer_encode,
    cauchy_punctualize,
    coh_punctualize,
    heine_borel_stream,
    ivt_stream,
    ramsey_punctualize,
    tree_punctualize,
)

SCHEMA = "punctual-report/1"


class ParseError(Exception):
    pass


# ---------------------------------------------------------------------------
# exact serialization


def to_jsonable(v):
    if isinstance(v, Fraction):
        return "%d/%d" % (v.numerator, v.denominator)
    if isinstance(v, bool) or v is None or isinstance(v, (int, str)):
        return v
    if isinstance(v, float):
        raise AuditFailure("floating point value %r in a report" % v)
    if isinstance(v, dict):
        return {str(k): to_jsonable(x) for k, x in sorted(v.items(), key=lambda kv: str(kv[0]))}
    if isinstance(v, (list, tuple)):
        return [to_jsonable(x) for x in v]
    if isinstance(v, (set, frozenset)):
        return [to_jsonable(x) for x in sorted(v)]
    raise ParseError("unserializable value of type %s" % type(v).__name__)


def parse_scalar(v):
    """Numbers stay numbers; 'a/b' strings become exact rationals."""
    if isinstance(v, str) and "/" in v:
        num, den = v.split("/", 1)
        return Fraction(int(num), int(den))
    if isinstance(v, float):
        raise ParseError("fixtures must use num/den strings, got %r" % v)
    if isinstance(v, list):
        return tuple(parse_scalar(x) for x in v)
    return v


def canonical_bytes(obj):
    return json.dumps(to_jsonable(obj), sort_keys=True, separators=(",", ":")).encode()


# ---------------------------------------------------------------------------
# fixtures


def read_jsonl(path):
    try:
        with open(path) as f:
            lines = [json.loads(ln) for ln in f if ln.strip()]
    except (OSError, ValueError) as e:
        raise ParseError("cannot read %s: %s" % (path, e))
    return lines


def split_meta(records):
    meta = {}
    rest = []
    for r in records:
        if not isinstance(r, dict):
            raise ParseError("fixture records must be objects")
        if "meta" in r:
            meta.update(r["meta"])
        else:
            rest.append(r)
    return meta, rest


def oracle_from_records(records, description="fixture"):
    table = {}
    for r in records:
        if "x" not in r or "t_converge" not in r or "value" not in r:
            raise ParseError("oracle record needs x, t_converge, value")
        table[parse_scalar(r["x"])] = (int(r["t_converge"]), parse_scalar(r["value"]))
    return StepOracle.from_table(table, description), table


def universal_from_records(records):
    entries = []
    tables = []
    for r in records:
        if "entry" not in r:
            raise ParseError("table record needs an 'entry' list of [x,t,v]")
        tbl = {int(x): (int(t), parse_scalar(v)) for x, t, v in r["entry"]}
        tables.append(tbl)
        entries.append(StepOracle.from_table(tbl, "entry%d" % len(entries)))
    return UniversalTable(entries), tables


# ---------------------------------------------------------------------------
# scenario runners; each returns (deterministic-report dict, audits list)


def run_transform(problem, records, horizon, budget):
    meta, rest = split_meta(records)
    audits = []
    if problem == "tree":
        oracle, _ = oracle_from_records(rest)
        st = tree_punctualize(oracle).stream(budget)
        rows = [{"stage": t, "output": list(v), "fuel": fuel}
                for t, (v, fuel) in enumerate(st.run(horizon))]
        return {"stages": rows}, audits
    if problem == "cauchy":
        oracle, _ = oracle_from_records(rest)
        st = cauchy_punctualize(oracle)
        st.budget = budget
        rows = [{"stage": t, "output": v, "fuel": fuel}
                for t, (v, fuel) in enumerate(st.run(horizon))]
        for t in range(1, len(rows)):
            if len(rows[t]["output"]) != t:
                raise AuditFailure("stage %d string has wrong length" % t)
        audits.append({"name": "lengths", "ok": True})
        return {"stages": rows}, audits
    if problem == "ramsey":
        arity = int(meta.get("arity", 2))
        colors = int(meta.get("colors", 2))
        oracle, _ = oracle_from_records(rest)
        R = ramsey_punctualize(ColoringInstance(arity, colors, oracle), horizon)
        p_rows = [{"stage": t, "output": v, "fuel": fuel}
                  for t, (v, fuel) in enumerate(R.p_stream(budget).run(horizon))]
        c_rows = [{"stage": t, "output": v, "fuel": fuel}
                  for t, (v, fuel) in enumerate(R.c_hat_stream(budget).run(horizon))]
        return {"p_table": p_rows, "c_hat": c_rows}, audits
    if problem == "coh":
        oracle, _ = oracle_from_records(rest)
        C = coh_punctualize(oracle, horizon)
        C.stream.budget = budget
        rows = [{"stage": t, "output": v, "fuel": fuel}
                for t, (v, fuel) in enumerate(C.stream.run(horizon))]
        return {"stages": rows, "due": list(C.due)}, audits
    if problem == "ivt":
        oracle, _ = oracle_from_records(rest)
        st = ivt_stream(oracle, budget)
        rows = [{"stage": t, "output": [v[0], v[1]], "fuel": fuel}
                for t, (v, fuel) in enumerate(st.run(horizon))]
        last = rows[-1]["output"]
        audits.append({"name": "interval_shrinks",
                       "ok": last[1] - last[0] <= Fraction(1, 2)})
        return {"stages": rows}, audits
    if problem == "hb":
        oracle, _ = oracle_from_records(rest)
        st = heine_borel_stream(oracle, budget)
        rows = [{"stage": t, "output": None if v is None else [v[0], v[1]], "fuel": fuel}
                for t, (v, fuel) in enumerate(st.run(horizon))]
        return {"stages": rows}, audits
    if problem == "baer":
        indices = sorted({int(r["x"]) for r in rest})
        G = baer_encode(indices)
        decoded = baer_decode_set(G, 1, max(indices) + 1 if indices else 1)
        audits.append({"name": "decode_round_trip", "ok": decoded == indices,
                       "decoded": decoded})
        return {"indices": indices, "decoded": decoded}, audits
    raise ParseError("unknown transform problem %r" % problem)


def run_diagonal(which, records, horizon, depth=12):
    meta, rest = split_meta(records)
    U, tables = universal_from_records(rest)
    audits = []
    if which == "baire":
        streams = baire_adversary(U)
        balls = [{"set": i, "balls": [[t, list(b)] for t, b in
                                      s.listed_balls(horizon)[:24]]}
                 for i, s in enumerate(streams)]
        for e, tbl in enumerate(tables):
            vals = []
            for x in range(depth):
                if x not in tbl:
                    break
                vals.append(tbl[x][1])
            if not vals:
                continue
            side = 2 * e if vals[0] != 0 else 2 * e + 1
            offender = streams[side].audit_excludes(vals, horizon)
            audits.append({"name": "excludes_entry_%d" % e,
                           "ok": offender is None,
                           "offender": None if offender is None
                           else [offender[0], list(offender[1])]})
        return {"balls": balls}, audits
    if which == "baire-bounded":
        k_count = int(meta.get("k_count", 4))
        streams = baire_bounded_adversary(U, k_count)
        balls = [{"set": [n, k], "balls": [[t, list(b)] for t, b in
                                           s.listed_balls(horizon)[:24]]}
                 for (n, k), s in sorted(streams.items())]
        return {"balls": balls}, audits
    if which == "uc":
        if len(U) != 1:
            raise ParseError("uc needs exactly one modulus-bound entry")
        g = U.entries[0]
        max_index = int(meta.get("max_index", 8))
        fn, table = uc_adversary(g, max_index=max_index)
        rows = []
        for row in table:
            rows.append({"index": row.index, "z": row.z, "x": row.x,
                         "y": row.y, "w": row.w, "gap": row.gap,
                         "width": row.width, "stage": row.stage,
                         "level": row.level})
        for row in table:
            gap = abs(fn.value(row.x) - fn.value(row.z))
            if gap < Fraction(1, 2 ** row.index):
                audits.append({"name": "jump_row_%d" % row.index, "ok": False})
            else:
                audits.append({"name": "jump_row_%d" % row.index, "ok": True})
        return {"breakpoints": rows}, audits
    raise ParseError("unknown diagonal adversary %r" % which)


def run_bct(records, delay_spec, horizon):
    _, rest = split_meta(records)
    from .core import PunctualStream

    opens = []
    for r in rest:
        if "balls" not in r:
            raise ParseError("bct open set record needs 'balls'")
        sched = {int(t): tuple(int(x) for x in ball) for t, ball in r["balls"]}

        def make_emit(sched=sched):
            return lambda t: sched.get(t)

        opens.append(PunctualStream.from_emit(make_emit(), description="open"))
    kind, _, arg = delay_spec.partition(":")
    if kind == "geometric":
        schedule = DelaySchedule.geometric(int(arg or 2))
    elif kind == "list":
        schedule = DelaySchedule.from_list([int(x) for x in arg.split(",") if x])
    else:
        raise ParseError("unknown delay schedule %r" % delay_spec)
    sol = bct_solve(opens, schedule, horizon=horizon)
    audits = []
    for idx, lo, hi in sol.blocks:
        vals = {sol.at(i) for i in range(lo, hi + 1)}
        audits.append({"name": "block_%d_constant" % idx,
                       "ok": len(vals) <= 1})
    return {"values": list(sol.values), "filler": sol.filler,
            "blocks": [list(b) for b in sol.blocks],
            "balls": [[n, t, list(b)] for n, t, b in sol.balls]}, audits


def _graph_from_records(rest):
    nbrs = {}
    order = []
    for r in rest:
        if "vertex" not in r:
            raise ParseError("graph record needs 'vertex'")
        v = int(r["vertex"])
        order.append(v)
        nbrs[v] = [int(x) for x in r.get("neighbors", r.get("edges_to_prior", []))]
    # mirror edges so the bundle is honest on both endpoints
    sym = {v: set(ns) for v, ns in nbrs.items()}
    for v, ns in nbrs.items():
        for u in ns:
            sym.setdefault(u, set()).add(v)
    return order, HonestGraph.from_neighbor_map(sym, "fixture")


def run_online(algo, records, horizon, audit=True):
    meta, rest = split_meta(records)
    audits = []
    if algo == "szpilrajn":
        revealed = [(int(r["vertex"]),
                     frozenset(int(x) for x in r.get("below", [])),
                     frozenset(int(x) for x in r.get("above", [])))
                    for r in rest]
        P = PosetStream(lambda s: revealed[s], "fixture")
        n = min(horizon, len(revealed))
        st = szpilrajn_extend(P)
        rows = [{"stage": t, "output": list(v), "fuel": fuel}
                for t, (v, fuel) in enumerate(st.run(n))]
        if audit:
            pos = {e: i for i, e in enumerate(rows[-1]["output"])}
            ok = all(pos[p] < pos[e] for e, below, _ in revealed[:n] for p in below) \
                and all(pos[e] < pos[p] for e, _, above in revealed[:n] for p in above)
            audits.append({"name": "linear_extension", "ok": ok})
        return {"stages": rows}, audits
    if algo == "reorient":
        revealed = [(int(r["vertex"]),
                     frozenset(int(x) for x in r.get("out_to", [])),
                     frozenset(int(x) for x in r.get("in_from", [])))
                    for r in rest]
        G = OrientedGraphStream(lambda s: revealed[s], "fixture")
        n = min(horizon, len(revealed))
        st = reorient(G)
        rows = [{"stage": t, "output": sorted(v), "fuel": fuel}
                for t, (v, fuel) in enumerate(st.run(n))]
        if audit:
            R = {tuple(e) for e in rows[-1]["output"]}
            trans = all((a, d) in R for (a, b) in R for (c, d) in R if b == c)
            audits.append({"name": "transitive", "ok": trans})
        return {"stages": rows}, audits
    if algo in ("rival-sands", "schmerl"):
        order, G = _graph_from_records(rest)
        if algo == "rival-sands":
            n = min(horizon, 3)  # member codes grow doubly exponentially
            st = rival_sands(G)
            rows = [{"stage": t, "output": v, "fuel": fuel}
                    for t, (v, fuel) in enumerate(st.run(n))]
            if audit:
                members = [r["output"] for r in rows]
                bad = [x for x in range(max(len(order), 1) + 200)
                       if sum(1 for m in members if G.adjacency(x, m)) > 1]
                audits.append({"name": "at_most_one_neighbor", "ok": not bad,
                               "violations": bad[:8]})
            return {"stages": rows}, audits
        ncol = int(meta.get("n", 2))
        n = min(horizon, len(order)) if order else horizon
        st = schmerl_color(G, ncol)
        rows = [{"stage": t, "output": v, "fuel": fuel}
                for t, (v, fuel) in enumerate(st.run(n))]
        if audit:
            colors = {t: r["output"] for t, r in enumerate(rows)}
            ok = all(1 <= c <= 2 * ncol - 1 for c in colors.values()) and all(
                colors[u] != colors[v] for u in colors for v in colors
                if u != v and G.adjacency(u, v))
            audits.append({"name": "proper_2n_minus_1_coloring", "ok": ok})
        return {"stages": rows}, audits
    if algo == "hall":
        b_side = [int(x) for x in meta.get("b_side", [])]
        a_side = [int(r["a"]) for r in rest]
        adj = {(int(r["a"]), int(b)) for r in rest for b in r.get("neighbors", [])}
        inst = BipartiteInstance(a_side=a_side, b_side=b_side,
                                 adjacency=lambda a, b: (a, b) in adj)
        try:
            f = hall_finite(inst)
        except HallViolation as e:
            return {"matching": None, "violation": list(e.witness)}, audits
        if audit:
            ok = len(set(f.values())) == len(f) and all((a, b) in adj for a, b in f.items())
            audits.append({"name": "injective_matching", "ok": ok})
        return {"matching": [[a, f[a]] for a in sorted(f)], "violation": None}, audits
    if algo == "hall-extended":
        h_table = [int(x) for x in meta.get("h", [])]
        if not h_table or h_table[0] != 0:
            raise ParseError("hall-extended meta needs h with h[0] = 0")
        a_list = [int(r["a"]) for r in rest]
        nbr_map = {int(r["a"]): [int(b) for b in r.get("neighbors", [])] for r in rest}
        rev = {}
        for a, bs in nbr_map.items():
            for b in bs:
                rev.setdefault(b, []).append(a)

        def nbr(v):
            return nbr_map.get(v, rev.get(v, []))

        def h(n):
            return h_table[n] if n < len(h_table) else h_table[-1] + (n - len(h_table) + 1)

        inst = BipartiteInstance(a_enum=lambda i: a_list[i], nbr=nbr, h=h)
        n = min(horizon, len(a_list))
        st = hall_extended(inst)
        rows = [{"stage": t, "output": list(v), "fuel": fuel}
                for t, (v, fuel) in enumerate(st.run(n))]
        if audit:
            f = dict(tuple(r["output"]) for r in rows)
            ok = len(set(f.values())) == len(f) and all(
                b in nbr(a) for a, b in f.items())
            audits.append({"name": "injective_matching", "ok": ok})
        return {"stages": rows}, audits
    raise ParseError("unknown online algorithm %r" % algo)


def _predicate_from_records(records):
    meta, rest = split_meta(records)
    wit = {}
    for r in rest:
        if "n" not in r or "y" not in r:
            raise ParseError("predicate record needs n and y")
        wit[int(r["n"])] = int(r["y"])
    default = meta.get("default")
    default = int(default) if default is not None else None
    count = int(meta.get("count", min(8, len(wit)) or 4))
    horizon = int(meta.get("horizon", 64))

    def pred(n, y):
        if n in wit:
            return y == wit[n]
        if default is None:
            return False
        return y == default

    expected = [wit.get(n, default) for n in range(count)]
    if any(e is None for e in expected):
        raise ParseError("predicate leaves inputs below count unwitnessed")
    return pred, expected, count, horizon


def run_structures(action, kind, records, prefix, horizon):
    audits = []
    if action == "build":
        if kind == "dlo":
            A = dlo_build()
            s = 0
            from .structures import interleave_sizes
            while interleave_sizes(s) < prefix:
                s += 1
            order = [e for e in A.order_prefix(s) if e < prefix]
            return {"order": order}, audits
        if kind == "rg":
            R = rg_build()
            rows = ["".join("1" if R.adjacency(i, j) else "0" for j in range(prefix))
                    for i in range(prefix)]
            return {"adjacency": rows}, audits
        if kind == "ba":
            A = ba_build()
            elems = [{"id": i, "depth": A.mask_of(i)[1], "mask": A.mask_of(i)[0]}
                     for i in range(prefix)]
            return {"elements": elems}, audits
        raise ParseError("unknown structure kind %r" % kind)
    pred, expected, count, phor = _predicate_from_records(records)
    if action == "encode":
        if kind == "dlo":
            B = dlo_encode(pred, phor)
            less_rows = ["".join("1" if B.less(i, j) else "0" for j in range(prefix))
                         for i in range(prefix)]
            return {"less": less_rows}, audits
        if kind == "rg":
            B = rg_encode(pred, phor)
            B.ensure(prefix - 1)
            rows = ["".join("1" if B.adjacency(i, j) else "0" for j in range(prefix))
                    for i in range(prefix)]
            return {"adjacency": rows, "markers": list(B.markers)}, audits
        if kind == "ba":
            B = ba_encode(pred, phor)
            elems = [{"id": i, "depth": B.mask_of(i)[1], "mask": B.mask_of(i)[0]}
                     for i in range(prefix)]
            return {"elements": elems,
                    "increase_stages": list(B.increase_stages)}, audits
        raise ParseError("unknown structure kind %r" % kind)
    if action == "decode":
        if kind == "dlo":
            A = dlo_build()
            B = dlo_encode(pred, phor)
            f = dlo_decode(BackForth(B, A), A, pred, count, phor)
        elif kind == "rg":
            R = rg_build()
            B = rg_encode(pred, phor)
            table = {}

            def g_of(v):
                if v not in table:
                    used = set(table.values())
                    w = 0
                    while True:
                        B.ensure(w)
                        if w not in used and all(
                                B.adjacency(w, table[m]) == R.adjacency(v, m)
                                for m in table):
                            table[v] = w
                            break
                        w += 1
                return table[v]

            f = rg_decode(g_of, pred, count, phor)
        elif kind == "ba":
            A = ba_build()
            B = ba_encode(pred, phor)
            f = ba_decode(lambda x: B.id_of(*A.mask_of(x)), A, B, pred, count, phor)
        else:
            raise ParseError("unknown structure kind %r" % kind)
        ok = all(pred(n, f[n]) for n in range(count)) and f == expected
        audits.append({"name": "choice_function", "ok": ok, "expected": expected})
        return {"decoded": list(f)}, audits
    raise ParseError("unknown structures action %r" % action)


# ---------------------------------------------------------------------------
# scenario plumbing


def execute(scenario):
    """(deterministic report, audits) for a parsed scenario dict."""
    kind = scenario["kind"]
    horizon = int(scenario.get("horizon", 64))
    if horizon < 1:
        raise ParseError("horizon must be >= 1")
    c = int(scenario.get("budget_c", 1000))
    k = int(scenario.get("budget_k", 2))
    if c <= 0 or k <= 0:
        raise ParseError("budget parameters must be positive")
    budget = polynomial_budget(c, k)
    audit = bool(scenario.get("audit", True))
    records = read_jsonl(scenario["instance"]) if scenario.get("instance") else []
    if kind[0] == "transform":
        return run_transform(kind[1], records, horizon, budget)
    if kind[0] == "diagonal":
        return run_diagonal(kind[1], records, horizon)
    if kind[0] == "solve":
        return run_bct(records, scenario.get("delay", "geometric:2"), horizon)
    if kind[0] == "online":
        return run_online(kind[1], records, horizon, audit)
    if kind[0] == "structures":
        return run_structures(kind[1], kind[2], records,
                              int(scenario.get("prefix", 16)), horizon)
    raise ParseError("unknown command %r" % (kind,))


def run(scenario):
    """Execute a scenario; returns (report dict, exit code)."""
    try:
        det, audits = execute(scenario)
    except ParseError as e:
        return {"schema": SCHEMA, "error": str(e)}, 2
    except PunctualityViolation as e:
        return {"schema": SCHEMA, "error": str(e)}, 3
    except (PromiseViolation, HallViolation) as e:
        return {"schema": SCHEMA, "error": str(e)}, 5
    except AuditFailure as e:
        return {"schema": SCHEMA, "error": str(e)}, 4
    except PunctualError as e:
        return {"schema": SCHEMA, "error": "%s: %s" % (type(e).__name__, e)}, 4
    det = to_jsonable(det)
    audits = to_jsonable(audits)
    report = {
        "schema": SCHEMA,
        "scenario": to_jsonable(scenario),
        "deterministic": det,
        "audits": audits,
    }
    code = 0 if all(a.get("ok", True) for a in audits) else 4
    return report, code


def replay(trace_path):
    """Re-execute a recorded report and byte-compare its deterministic
    sections; returns (verdict dict, exit code 0 or 4)."""
    try:
        with open(trace_path) as f:
            old = json.load(f)
        scenario = old["scenario"]
        old_bytes = canonical_bytes({"deterministic": old["deterministic"],
                                     "audits": old["audits"]})
    except (OSError, ValueError, KeyError) as e:
        return {"verdict": "unreadable trace: %s" % e}, 2
    new, code = run(scenario)
    if code in (2, 3, 5):
        return {"verdict": "re-execution failed", "report": new}, code
    new_bytes = canonical_bytes({"deterministic": new["deterministic"],
                                 "audits": new["audits"]})
    if old_bytes == new_bytes:
        return {"verdict": "match"}, 0
    # locate the first divergent stage for the message
    where = None
    o_stages = old.get("deterministic", {}).get("stages")
    n_stages = new.get("deterministic", {}).get("stages")
    if isinstance(o_stages, list) and isinstance(n_stages, list):
        for i in range(max(len(o_stages), len(n_stages))):
            a = o_stages[i] if i < len(o_stages) else None
            b = n_stages[i] if i < len(n_stages) else None
            if a != b:
                where = i
                break
    return {"verdict": "divergence", "first_differing_stage": where}, 4


def golden_check(report, out_path):
    """Compare (or record) the deterministic section under the golden dir."""
    gdir = os.environ.get("PUNCTUAL_GOLDEN_DIR")
    if not gdir or not out_path:
        return None, 0
    os.makedirs(gdir, exist_ok=True)
    gpath = os.path.join(gdir, os.path.basename(out_path))
    payload = canonical_bytes({"deterministic": report["deterministic"],
                               "audits": report["audits"]})
    if os.path.exists(gpath):
        with open(gpath, "rb") as f:
            if f.read() != payload:
                return {"golden": "mismatch", "path": gpath}, 4
        return {"golden": "match", "path": gpath}, 0
    with open(gpath, "wb") as f:
        f.write(payload)
    return {"golden": "recorded", "path": gpath}, 0


# ---------------------------------------------------------------------------
# argument parsing


def build_parser():
    p = argparse.ArgumentParser(prog="punctual")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, instance=True):
        if instance:
            sp.add_argument("--instance", "--table", "--opens", "--predicate",
                            dest="instance")
        sp.add_argument("--horizon", type=int, default=64)
        sp.add_argument("--budget-c", type=int, default=1000)
        sp.add_argument("--budget-k", type=int, default=2)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--out")
        sp.add_argument("--emit", dest="out")
        sp.add_argument("--audit", dest="audit", action="store_true", default=True)
        sp.add_argument("--no-audit", dest="audit", action="store_false")

    t = sub.add_parser("transform")
    t.add_argument("problem", choices=["tree", "cauchy", "ramsey", "coh",
                                       "ivt", "hb", "baer"])
    common(t)

    d = sub.add_parser("diagonal")
    d.add_argument("adversary", choices=["baire", "baire-bounded", "uc"])
    common(d)

    s = sub.add_parser("solve")
    s.add_argument("solver", choices=["bct"])
    s.add_argument("--delay", default="geometric:2")
    common(s)

    o = sub.add_parser("online")
    o.add_argument("algo", choices=["szpilrajn", "reorient", "rival-sands",
                                    "schmerl", "hall", "hall-extended"])
    common(o)

    st = sub.add_parser("structures")
    st.add_argument("action", choices=["build", "encode", "decode"])
    st.add_argument("kind", choices=["dlo", "rg", "ba"])
    st.add_argument("--prefix", type=int, default=16)
    common(st)

    r = sub.add_parser("replay")
    r.add_argument("trace")
    return p


def scenario_from_args(args):
    kind = [args.command]
    for attr in ("problem", "adversary", "solver", "algo", "action"):
        if getattr(args, attr, None):
            kind.append(getattr(args, attr))
    if getattr(args, "kind", None):
        kind.append(args.kind)
    sc = {
        "kind": kind,
        "instance": getattr(args, "instance", None),
        "horizon": args.horizon,
        "budget_c": args.budget_c,
        "budget_k": args.budget_k,
        "seed": args.seed,
        "audit": args.audit,
    }
    if getattr(args, "delay", None):
        sc["delay"] = args.delay
    if getattr(args, "prefix", None):
        sc["prefix"] = args.prefix
    return sc


def main(argv=None):
    # sparse-stream member codes are exact huge integers
    sys.set_int_max_str_digits(2_000_000)
    args = build_parser().parse_args(argv)
    if args.command == "replay":
        verdict, code = replay(args.trace)
        print(json.dumps(verdict, indent=2))
        return code
    report, code = run(scenario_from_args(args))
    out = getattr(args, "out", None)
    text = json.dumps(report, indent=2, sort_keys=True)
    if out:
        with open(out, "w") as f:
            f.write(text + "\n")
    else:
        print(text)
    if code == 0:
        gverdict, gcode = golden_check(report, out)
        if gverdict is not None:
            print(json.dumps(gverdict))
        code = gcode or code
    return code


if __name__ == "__main__":
    sys.exit(main())
