"""Command-line entry point: ``seqmatch <command> ...``.

Exit status is 0 on success, 1 on a domain error (bad input, failed check)
and 2 when a resource cap is hit.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Optional

from . import fixtures
from .analysis import ALL_CHECKS, DEFAULT_MATCHING_CAP, analyze, enumerate_spe_set, impossibility_report
from .da import p_oriented_da, q_oriented_da
from .design import design_order, search_position_based, verify_design
from .io import format_matching, load_instance, load_order, matching_to_list, order_to_json, save_instance
from .model import DEFAULT_ORDER_CAP, Matching, MatchingInstance, OfferingOrder, ResourceLimitError, induced_order
from .qsat.formula import parse_qdimacs
from .qsat.reduction import check_structure, reduce_qsat
from .sfda import classify, run_sfda
from .spe import DEFAULT_NODE_BUDGET, DEFAULT_TREE_NODE_CAP, build_game_tree, export_game_tree, solve_spe


def _emit(args, data: dict[str, Any], text: list[str]) -> None:
    if args.format == "json":
        print(json.dumps(data, indent=2))
    else:
        for line in text:
            print(line)


def _instance(args) -> MatchingInstance:
    return load_instance(args.instance)


def _order(args, inst: MatchingInstance) -> OfferingOrder:
    # without --order, firms offer in input order, each in one block
    if getattr(args, "order", None):
        return load_order(inst, args.order)
    return induced_order(inst, inst.firms)


def cmd_solve(args) -> int:
    inst = _instance(args)
    res = solve_spe(inst, _order(args, inst), node_budget=args.node_budget, workers=args.workers)
    data = {
        "matching": matching_to_list(res.matching, inst),
        "first_action": res.first_action.value if res.first_action else None,
        "nodes_visited": res.stats.visited,
        "memo_hits": res.stats.memo_hits,
    }
    text = [format_matching(res.matching, inst)]
    if args.stats:
        text.append(f"nodes visited: {res.stats.visited}, memo hits: {res.stats.memo_hits}")
    _emit(args, data, text)
    return 0


def cmd_spem(args) -> int:
    inst = _instance(args)
    order = _order(args, inst)
    if not order.pairs:
        raise ValueError("the decision problem needs at least one acceptable pair")
    res = solve_spe(inst, order, node_budget=args.node_budget, workers=args.workers)
    act = res.first_action.value
    _emit(args, {"first_pair": list(order.first()), "action": act}, [act])
    return 0


def _da(args, firm_side: bool) -> int:
    inst = _instance(args)
    if firm_side:
        mu = p_oriented_da(inst)
        # trace of the mirrored run: workers propose, firms hold
        _, trace = q_oriented_da(inst.transpose())
    else:
        mu, trace = q_oriented_da(inst)
    data = {"matching": matching_to_list(mu, inst)}
    text = [format_matching(mu, inst)]
    if args.trace:
        data["trace"] = trace.to_dict()
        for k, r in enumerate(trace.rounds, 1):
            props = " ".join(f"{a}->{b}" for a, b in r.proposals)
            held = " ".join(f"{a}:{b}" for a, b in r.held)
            text.append(f"round {k}: proposals {props} | held {held or '-'}")
    _emit(args, data, text)
    return 0


def cmd_qopt(args) -> int:
    return _da(args, firm_side=False)


def cmd_popt(args) -> int:
    return _da(args, firm_side=True)


def cmd_sfda(args) -> int:
    inst = _instance(args)
    w = classify(inst)
    mu = run_sfda(inst, _order(args, inst))
    data = {"matching": matching_to_list(mu, inst), "width": list(w.as_tuple()), "tractable": w.tractable}
    text = [format_matching(mu, inst)]
    if not w.tractable:
        text.append(f"note: list widths {w.as_tuple()}; sfda need not equal the equilibrium here")
    _emit(args, data, text)
    return 0


def cmd_design_order(args) -> int:
    inst = _instance(args)
    status = 0
    if args.search_position_based:
        r = search_position_based(inst, args.max_orders)
        data = {
            "target": matching_to_list(r.target, inst),
            "tried": r.tried,
            "successes": [list(pi) for pi in r.successes],
        }
        text = [f"target QOPT: {format_matching(r.target, inst)}", f"position orders tried: {r.tried}"]
        text += [f"reaches QOPT: {' '.join(pi)}" for pi in r.successes] or ["no position order reaches QOPT"]
        _emit(args, data, text)
        return 0
    if args.verify:
        rep = verify_design(inst, node_budget=args.node_budget)
        plan = rep.plan
        data = plan.to_dict()
        data["verify"] = {
            "ok": rep.ok,
            "target": matching_to_list(rep.target, inst),
            "achieved": matching_to_list(rep.achieved, inst),
            "checkpoints": dict(rep.checkpoints),
        }
        text = rep.describe()
        status = 0 if rep.ok else 1
    else:
        plan = design_order(inst)
        data = plan.to_dict()
        text = plan.log()
    if args.out:
        Path(args.out).write_text(order_to_json(plan.sigma), encoding="utf-8")
    _emit(args, data, text)
    return status


def cmd_analyze(args) -> int:
    inst = _instance(args)
    checks = [c.strip() for c in args.checks.split(",") if c.strip()] if args.checks else list(ALL_CHECKS)
    if args.matching:
        raw = json.loads(Path(args.matching).read_text(encoding="utf-8"))
        pairs = raw["matching"] if isinstance(raw, dict) else raw
        mu = Matching(tuple(e) for e in pairs)
        src = "given"
    else:
        mu = solve_spe(inst, _order(args, inst), node_budget=args.node_budget).matching
        src = "equilibrium"
    rep = analyze(inst, mu, checks, cap=args.matching_cap)
    d = rep.to_dict()
    data = {"matching": matching_to_list(mu, inst), **d, "implications_hold": rep.implications_hold()}
    text = [f"{src} matching: {format_matching(mu, inst)}"]
    for k, v in d.items():
        if k == "blocking":
            text.append("blocking pairs: " + (" ".join(f"({p},{q})" for p, q in v) or "none"))
        else:
            text.append(f"{k}: {v}")
    _emit(args, data, text)
    return 0


def cmd_enumerate_spe(args) -> int:
    inst = _instance(args)
    if args.report:
        rep = impossibility_report(inst, order_cap=args.max_orders, matching_cap=args.matching_cap)
        data = {
            "spe_set": sorted(matching_to_list(m, inst) for m in rep.spe_set),
            "qopt_in_spe": rep.qopt_in_spe,
            "popt_in_spe": rep.popt_in_spe,
            "intersections": {k: sorted(matching_to_list(m, inst) for m in v) for k, v in rep.intersections.items()},
        }
        _emit(args, data, rep.lines())
        return 0
    S = enumerate_spe_set(inst, args.max_orders)
    rows = sorted(matching_to_list(m, inst) for m in S)
    text = [f"{len(rows)} distinct equilibrium matchings"]
    text += ["{" + ", ".join(f"({p},{q})" for p, q in r) + "}" for r in rows]
    _emit(args, {"spe_set": rows}, text)
    return 0


def cmd_reduce(args) -> int:
    try:
        text = Path(args.qbf).read_text(encoding="utf-8")
    except OSError as e:
        raise ValueError(str(e)) from None
    f = parse_qdimacs(text)
    game = reduce_qsat(f)
    check_structure(game)
    inst = game.instance()
    save_instance(inst, args.out)
    if args.order_out:
        Path(args.order_out).write_text(order_to_json(game.order(), game.pi), encoding="utf-8")
    w = classify(inst)
    data = {
        "formula": str(f),
        "firms": len(inst.firms),
        "workers": len(inst.workers),
        "pairs": len(inst.pairs),
        "width": list(w.as_tuple()),
        "gadgets": game.gadget_counts(),
    }
    text = [
        f"formula: {f}",
        f"{len(inst.firms)} firms, {len(inst.workers)} workers, {len(inst.pairs)} pairs, widths {w.as_tuple()}",
        "gadgets: " + ", ".join(f"{k} {v}" for k, v in game.gadget_counts().items()),
        f"instance written to {args.out}",
    ]
    _emit(args, data, text)
    return 0


def cmd_export_tree(args) -> int:
    inst = _instance(args)
    order = _order(args, inst)
    if args.format == "png":
        from .plotting import render_tree

        if not args.out:
            raise ValueError("--format png needs --out")
        render_tree(inst, order, args.out, node_cap=args.node_cap)
        print(f"tree written to {args.out}")
        return 0
    if args.format == "json":
        nodes = build_game_tree(inst, order, args.node_cap)
        data = {
            "nodes": [
                {
                    "id": n.id,
                    "offer": list(n.offer) if n.offer else None,
                    "matching": matching_to_list(n.matching, inst) if n.matching is not None else None,
                    "accept": n.accept_child,
                    "reject": n.reject_child,
                    "action": n.spe_action.value if n.spe_action else None,
                    "on_path": n.on_path,
                }
                for n in nodes
            ]
        }
        out = json.dumps(data, indent=2) + "\n"
    else:
        out = export_game_tree(inst, order, args.depth_cap, args.node_cap)
    if args.out:
        Path(args.out).write_text(out, encoding="utf-8")
    else:
        sys.stdout.write(out)
    return 0


def cmd_fixtures(args) -> int:
    cat = fixtures.catalog()
    if args.export:
        d = Path(args.export)
        d.mkdir(parents=True, exist_ok=True)
        for name, fx in cat.items():
            save_instance(fx.instance, d / f"{name}.inst")
            for key, pi in fx.position_orders.items():
                (d / f"{name}_{key}.ord").write_text(order_to_json(fx.order(key), pi), encoding="utf-8")
    if args.figures:
        from .plotting import render_tree

        d = Path(args.figures)
        d.mkdir(parents=True, exist_ok=True)
        for name, fx in cat.items():
            for key in fx.position_orders:
                render_tree(fx.instance, fx.order(key), d / f"{name}_{key}.png", title=f"{name} / {key}")
    if not args.run_all:
        rows = [f"{name}: {fx.description}" for name, fx in cat.items()]
        _emit(args, {"fixtures": {n: fx.description for n, fx in cat.items()}}, rows)
        return 0
    results = fixtures.run_checks()
    failed = [r for r in results if not r.ok]
    data = {
        "checks": len(results),
        "failed": len(failed),
        "results": [{"fixture": r.fixture, "check": r.check, "ok": r.ok, "detail": r.detail} for r in results],
    }
    text = [f"{'ok  ' if r.ok else 'FAIL'} {r.fixture}: {r.check} {r.detail}".rstrip() for r in results]
    text.append(f"{len(results) - len(failed)}/{len(results)} fixture checks passed")
    _emit(args, data, text)
    return 1 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="seqmatch", description="Sequential matching games: equilibria, orders, analysis.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, order=True, fmt=("text", "json")):
        p.add_argument("--instance", required=True, help="instance file (JSON)")
        if order:
            p.add_argument("--order", help="order file; default: firms in input order")
        p.add_argument("--format", choices=fmt, default=fmt[0])

    def budget(p):
        p.add_argument("--node-budget", type=int, default=DEFAULT_NODE_BUDGET)

    p = sub.add_parser("solve", help="equilibrium matching for an order")
    common(p)
    budget(p)
    p.add_argument("--workers", type=int, default=0, help="threads for the parallel mode")
    p.add_argument("--stats", action="store_true")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("spem", help="does the first offered worker accept?")
    common(p)
    budget(p)
    p.add_argument("--workers", type=int, default=0)
    p.set_defaults(func=cmd_spem)

    for name, fn, helptext in (("qopt", cmd_qopt, "worker-optimal stable matching"),
                               ("popt", cmd_popt, "firm-optimal stable matching")):
        p = sub.add_parser(name, help=helptext)
        common(p, order=False)
        p.add_argument("--trace", action="store_true", help="include the round-by-round trace")
        p.set_defaults(func=fn)

    p = sub.add_parser("sfda", help="sequentially fixing deferred acceptance")
    common(p)
    p.set_defaults(func=cmd_sfda)

    p = sub.add_parser("design-order", help="order whose equilibrium is the worker-optimal matching")
    common(p, order=False)
    budget(p)
    p.add_argument("--verify", action="store_true", help="solve the designed order and check each step")
    p.add_argument("--search-position-based", action="store_true", help="experimental: try all position orders")
    p.add_argument("--max-orders", type=int, default=5040)
    p.add_argument("--out", help="write the designed order file here")
    p.set_defaults(func=cmd_design_order)

    p = sub.add_parser("analyze", help="stability notions of a matching")
    common(p)
    budget(p)
    p.add_argument("--matching", help="JSON list of pairs; default: the equilibrium of --order")
    p.add_argument("--checks", help=f"comma list from {','.join(ALL_CHECKS)}; default all")
    p.add_argument("--matching-cap", type=int, default=DEFAULT_MATCHING_CAP)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("enumerate-spe", help="equilibrium matchings over all orders")
    common(p, order=False)
    p.add_argument("--max-orders", type=int, default=DEFAULT_ORDER_CAP)
    p.add_argument("--matching-cap", type=int, default=DEFAULT_MATCHING_CAP)
    p.add_argument("--report", action="store_true", help="compare with the stable and efficient matchings")
    p.set_defaults(func=cmd_enumerate_spe)

    p = sub.add_parser("reduce", help="build the game for a quantified 3-CNF formula")
    p.add_argument("--qbf", required=True, help="QDIMACS file")
    p.add_argument("--out", required=True, help="instance file to write")
    p.add_argument("--order-out", help="order file to write")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("export-tree", help="game tree as DOT, JSON or PNG")
    common(p, fmt=("dot", "json", "png"))
    p.add_argument("--out", help="output file; default stdout (DOT/JSON)")
    p.add_argument("--depth-cap", type=int)
    p.add_argument("--node-cap", type=int, default=DEFAULT_TREE_NODE_CAP)
    p.set_defaults(func=cmd_export_tree)

    p = sub.add_parser("fixtures", help="list or check the built-in worked instances")
    p.add_argument("--run-all", action="store_true", help="recompute and check every stored result")
    p.add_argument("--export", metavar="DIR", help="write instance and order files")
    p.add_argument("--figures", metavar="DIR", help="render game trees as PNG")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_fixtures)
    return ap


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ResourceLimitError as e:
        print(f"error: resource cap reached: {e}", file=sys.stderr)
        return 2
    except RecursionError:
        print("error: resource cap reached: recursion depth", file=sys.stderr)
        return 2
    except (ValueError, KeyError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
