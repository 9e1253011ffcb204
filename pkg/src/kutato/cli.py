"""``kutato`` command line: learn, sample, entropy, compare, describe.

Exit codes: 0 success, 1 usage, 2 file or format problem, 3 validation or
resource problem.  Reports go to stdout as ``key<TAB>value`` lines with six
decimal places.
"""

from __future__ import annotations

import argparse
import sys
from collections.abc import Sequence
from pathlib import Path

from .entropy import brute_force_entropy, network_entropy
from .estimation import Estimator
from .evalcmp import cpt_max_abs_error, distribution_kl, structural_diff
from .inference import DEFAULT_CELL_BUDGET, ResourceError
from .io import FormatError, parse_order, read_cases, read_network, write_cases, write_network, write_trace
from .learner import DIRECTION_LEARNING, ConfigError, LearnConfig, kutato_learn, random_order
from .model import NetworkError
from .networks import exact_joint_database
from .sampling import SampleSpec, logic_sample

EXIT_USAGE, EXIT_FILE, EXIT_INVALID = 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _row(key, value) -> None:
    if isinstance(value, float):
        value = f"{value:.6f}"
    print(f"{key}\t{value}")


def _arcs(arcs) -> str:
    return ",".join(f"{a}->{b}" for a, b in arcs) or "-"


def cmd_learn(args) -> int:
    db = read_cases(args.data)
    if args.learn_directions:
        order = DIRECTION_LEARNING
    elif args.order == "random":
        order = random_order(db.names, args.seed)
    else:
        order = parse_order(args.order)
    config = LearnConfig(order=order, alpha=args.alpha, mode=args.estimator,
                         max_parents=args.max_parents, min_delta=args.min_delta,
                         workers=args.workers)
    net, trace = kutato_learn(db, config, name=args.name or Path(args.data).stem)
    write_network(net, args.out)
    if args.trace:
        write_trace(trace, args.trace)
    if args.plot:
        from .plotting import plot_trace

        plot_trace(trace, args.plot)
    _row("arcs_added", len(trace.steps))
    _row("final_entropy", trace.steps[-1].entropy_after if trace.steps else trace.initial_entropy)
    _row("halt", trace.halt_reason)
    return 0


def cmd_sample(args) -> int:
    net = read_network(args.net)
    if args.n < 0:
        raise UsageError("--n must be nonnegative")
    if args.exact:
        db = exact_joint_database(net, float(args.n))
    else:
        db = logic_sample(net, SampleSpec(args.n, args.seed))
    write_cases(db, args.out)
    _row("rows", db.n_rows)
    return 0


def cmd_entropy(args) -> int:
    net = read_network(args.net)
    report = network_entropy(net, cell_budget=args.budget)
    for name, h in zip(net.names, report.per_node):
        _row(f"node:{name}", h)
    _row("total", report.total)
    if args.brute_force:
        brute = brute_force_entropy(net, cell_budget=args.budget)
        _row("brute_force", brute)
        _row("abs_diff", f"{abs(brute - report.total):.3e}")
    if args.plot:
        from .plotting import plot_entropy

        plot_entropy(report, net.names, args.plot)
    return 0


def cmd_compare(args) -> int:
    learned = read_network(args.learned)
    reference = read_network(args.reference)
    diff = structural_diff(learned, reference)
    _row("missing", _arcs(diff.missing))
    _row("extra", _arcs(diff.extra))
    _row("reversed", _arcs(diff.reversed))
    m, e, r = diff.counts()
    _row("counts", f"{m}/{e}/{r}")
    if args.kl:
        if diff.empty:
            _row("max_cpt_error", cpt_max_abs_error(learned, reference))
            _row("kl", distribution_kl(learned, reference, cell_budget=args.budget))
        else:
            _row("kl", "skipped: structures differ")
    return 0


def cmd_describe(args) -> int:
    net = read_network(args.net)
    _row("network", net.name)
    _row("nodes", len(net))
    _row("arcs", len(net.arcs()))
    for i, v in enumerate(net.variables):
        parents = ",".join(net.variables[p].name for p in net.parents[i]) or "-"
        _row(f"node:{v.name}", f"arity={v.arity}\tparents={parents}")
    _row("joint_size", str(net.joint_size()))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="kutato", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("learn", help="learn a network from a case CSV")
    p.add_argument("--data", required=True)
    how = p.add_mutually_exclusive_group(required=True)
    how.add_argument("--order", help="a,b,c | @file | random")
    how.add_argument("--learn-directions", action="store_true")
    p.add_argument("--seed", type=int, default=0, help="seed for --order random")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--estimator", choices=[e.value for e in Estimator], default="dirichlet")
    p.add_argument("--max-parents", type=int)
    p.add_argument("--min-delta", type=float, default=0.0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--name")
    p.add_argument("--out", required=True)
    p.add_argument("--trace")
    p.add_argument("--plot", help="PNG of the entropy trajectory")
    p.set_defaults(func=cmd_learn)

    p = sub.add_parser("sample", help="logic-sample cases from a network")
    p.add_argument("--net", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--exact", action="store_true",
                   help="write the exact joint as weighted rows totalling --n")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("entropy", help="exact network entropy")
    p.add_argument("--net", required=True)
    p.add_argument("--brute-force", action="store_true")
    p.add_argument("--budget", type=int, default=DEFAULT_CELL_BUDGET)
    p.add_argument("--plot", help="PNG of per-node contributions")
    p.set_defaults(func=cmd_entropy)

    p = sub.add_parser("compare", help="compare a learned network with a reference")
    p.add_argument("--learned", required=True)
    p.add_argument("--reference", required=True)
    p.add_argument("--kl", action="store_true")
    p.add_argument("--budget", type=int, default=DEFAULT_CELL_BUDGET)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("describe", help="summarise a network file")
    p.add_argument("--net", required=True)
    p.set_defaults(func=cmd_describe)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"kutato: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, FormatError) as exc:
        print(f"kutato: error: {exc}", file=sys.stderr)
        return EXIT_FILE
    except (ConfigError, NetworkError, ResourceError, ValueError) as exc:
        print(f"kutato: error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
