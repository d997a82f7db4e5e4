"""
Command line front end.

    python pwlmip.py wsm fixtures/wsm3.json --json
    python pwlmip.py mmc-approx fixtures/uniformish.json --epsilon 1/4 --json
    python pwlmip.py export-lp model.json -o model.lp

Exit code 0 for every completed solve (feasible or infeasible), 2 for
invalid input, 3 when the node limit is exhausted.
"""
import argparse
import logging
import sys
import time
from dataclasses import dataclass, field
from typing import Optional

import Config
from AlmostCover import ApproxParams, almost_cover, decompose, decomposition_to_json
from Covering import SCHEMA as COVER_SCHEMA, CoverInstance, solve_umm, solve_wsm
from ElectionControl import solve_control
from Elections import SCHEMA as ELECTION_SCHEMA, OrdinalElection, election_from_json
from EmipLowering import lower, solve_emip
from EmipModel import SCHEMA as EMIP_SCHEMA, EmipModel, normalize
from LpFormat import export_lp, format_assignment
from MilpSolver import MilpSolver, ResourceExhausted
from Oracle import HARD_KINDS, brute_cover, brute_manipulate, brute_scoring_ccdv, gen_hard_instances
from RationalIO import dump_document, format_rational, load_document, parse_rational

logger = logging.getLogger("pwlmip")

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_EXHAUSTED = 3


@dataclass
class RunReport:
    command: str
    status: str
    payload: dict = field(default_factory=dict)
    cost: Optional[object] = None
    statistics: dict = field(default_factory=dict)
    wall_time: float = 0.0

    def to_json(self, timing=False):
        report = {"command": self.command, "status": self.status, "result": self.payload,
                  "statistics": self.statistics}
        if self.cost is not None:
            report["cost"] = format_rational(self.cost)
        if timing:
            # wall time breaks byte-identical reports, so it is opt-in
            report["wall_time"] = round(self.wall_time, 6)
        return report

    def summary(self):
        lines = [f"{self.command}: {self.status}"]
        if self.cost is not None:
            lines.append(f"cost: {format_rational(self.cost)}")
        for key, value in self.payload.items():
            lines.append(f"{key}: {value}")
        if self.statistics:
            lines.append("statistics: " + ", ".join(f"{k}={v}" for k, v in sorted(self.statistics.items())))
        return "\n".join(lines)


def _statistics(solver):
    return {"nodes": solver.nodes, "pivots": solver.pivots}


def run_solve_emip(args, solver):
    model = EmipModel.from_json(load_document(args.file, EMIP_SCHEMA), source=args.file)
    solution = solve_emip(model, solver)
    if not solution.feasible:
        return RunReport("solve-emip", "infeasible", statistics=_statistics(solver))
    payload = {"assignment": format_assignment(solution.assignment)}
    if solution.objective_value is not None:
        payload["objective"] = format_rational(solution.objective_value)
    return RunReport("solve-emip", "feasible", payload, statistics=_statistics(solver))


def _load_cover(path):
    return CoverInstance.from_json(load_document(path, COVER_SCHEMA), source=path)


def run_cover(args, solver):
    instance = _load_cover(args.file)
    solve = solve_wsm if args.command == "wsm" else solve_umm
    cover = solve(instance, args.minimize_cost, solver)
    if cover is None:
        return RunReport(args.command, "infeasible", statistics=_statistics(solver))
    return RunReport(args.command, "feasible", cover.to_json(), cover.cost, _statistics(solver))


def run_mmc_approx(args, solver):
    instance = _load_cover(args.file)
    epsilon = parse_rational(args.epsilon, "--epsilon")
    if epsilon <= 0:
        raise ValueError(f"Invalid --epsilon {args.epsilon}: must be positive")
    emitted = None
    payload = {}
    if instance.universe_size > 0:
        params = ApproxParams(epsilon, instance.universe_size)
        emitted = [v for j in range(instance.n) for v in decompose(instance.vector(j), params, j)]
        if args.dump_decomposition:
            payload["decomposition"] = decomposition_to_json(emitted, params)
    solution = almost_cover(instance, epsilon, args.minimize_cost, solver, emitted)
    if solution is None:
        return RunReport("mmc-approx", "infeasible", payload, statistics=_statistics(solver))
    payload.update(solution.to_json())
    return RunReport("mmc-approx", "feasible", payload, len(solution.chosen), _statistics(solver))


def _load_election(path):
    return election_from_json(load_document(path, ELECTION_SCHEMA), source=path)


def run_control(args, solver):
    election = _load_election(args.file)
    result = solve_control(election, args.command, args.minimize_cost, args.unique_winner, solver,
                           args.candidate_cap)
    status = "feasible" if result.feasible else "infeasible"
    return RunReport(args.command, status, result.to_json(), result.cost, _statistics(solver))


def run_export_lp(args, solver):
    model = EmipModel.from_json(load_document(args.file, EMIP_SCHEMA), source=args.file)
    normalized = normalize(model.check())
    milp, _ = lower(normalized)
    objective, sense = None, "maximize"
    if normalized.objective is not None:
        objective = normalized.objective.coefficients
        sense = "maximize" if normalized.objective.sense == "max" else "minimize"
    text = export_lp(milp, objective, sense, title=f"lowered from {args.file}")
    if args.output is None:
        sys.stdout.write(text)
        return None
    with open(args.output, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(text)
    logger.info(f"wrote {args.output}: {len(milp.variables)} variables, {len(milp.rows)} rows")
    return None


def run_oracle(args, solver):
    if not (args.dev_oracle or Config.dev_oracle_enabled()):
        raise ValueError(f"Invalid command: the oracle is disabled, set {Config.DEV_ORACLE_ENV}=1 or pass --dev-oracle")
    payload = {}
    if args.problem in HARD_KINDS:
        instance = gen_hard_instances(args.problem, args.seed)
        payload["instance"] = instance.to_json()
        found = brute_cover(instance)
    elif args.problem == "cover":
        found = brute_cover(_load_cover(_required_file(args)))
    else:
        election = _load_election(_required_file(args))
        if isinstance(election, OrdinalElection):
            if args.problem != "ccdv":
                raise ValueError(f"Invalid oracle problem {args.problem} for a scoring rule election")
            found = brute_scoring_ccdv(election, args.unique_winner)
        else:
            found = brute_manipulate(election, args.problem, args.unique_winner)
    if found is None:
        return RunReport("oracle", "infeasible", payload)
    cost, witness = found
    payload["witness"] = list(witness)
    return RunReport("oracle", "feasible", payload, cost)


def _required_file(args):
    if args.file is None:
        raise ValueError(f"Invalid command: oracle {args.problem} needs an instance file")
    return args.file


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="print the run report as JSON")
    common.add_argument("--minimize-cost", action="store_true",
                        help="report a cheapest solution instead of any solution within budget")
    common.add_argument("--node-limit", type=int, default=None,
                        help=f"branch-and-bound node limit (default {Config.DEFAULT_NODE_LIMIT}, "
                             f"env {Config.NODE_LIMIT_ENV})")
    common.add_argument("--dump-decomposition", action="store_true",
                        help="include the emitted shape vectors in the mmc-approx report")
    common.add_argument("--seed", type=int, default=None, help="seed for generated instances")
    common.add_argument("--log-level", default=None, help=f"logging level (env {Config.LOG_LEVEL_ENV})")
    common.add_argument("--unique-winner", action="store_true", default=Config.UNIQUE_WINNER,
                        help="p must beat every rival strictly")
    common.add_argument("--candidate-cap", type=int, default=Config.SCORING_CANDIDATE_CAP,
                        help="largest candidate count accepted by scoring-ccdv")
    common.add_argument("--timing", action="store_true", help="include wall time in the report")

    parser = argparse.ArgumentParser(prog="pwlmip",
                                     description="Piecewise linear MIP lowering, covering and election control")
    commands = parser.add_subparsers(dest="command", metavar="COMMAND", required=True)

    solve = commands.add_parser("solve-emip", parents=[common], help="solve an emip-v1 model")
    solve.add_argument("file")
    solve.set_defaults(handler=run_solve_emip)

    for name, text in (("wsm", "weighted set multicover"), ("umm", "uniform multiset multicover")):
        cover = commands.add_parser(name, parents=[common], help=f"{text} on a cover-v1 instance")
        cover.add_argument("file")
        cover.set_defaults(handler=run_cover)

    approx = commands.add_parser("mmc-approx", parents=[common], help="almost-cover for multiset multicover")
    approx.add_argument("file")
    approx.add_argument("--epsilon", required=True, help="accuracy as an exact rational, e.g. 1/4")
    approx.set_defaults(handler=run_mmc_approx)

    for name, text in (("ccdv", "control by deleting voters"), ("ccav", "control by adding voters"),
                       ("bribery", "bribery"), ("scoring-ccdv", "voter deletion under a scoring rule")):
        control = commands.add_parser(name, parents=[common], help=f"{text} on an election-v1 file")
        control.add_argument("file")
        control.set_defaults(handler=run_control)

    export = commands.add_parser("export-lp", parents=[common], help="write the lowered model in LP format")
    export.add_argument("file")
    export.add_argument("-o", "--output", default=None, help="LP file to write, stdout when omitted")
    export.set_defaults(handler=run_export_lp)

    # not listed in --help
    oracle = commands.add_parser("oracle", parents=[common])
    oracle.add_argument("problem", choices=("cover", "ccdv", "ccav", "bribery") + HARD_KINDS)
    oracle.add_argument("file", nargs="?", default=None)
    oracle.add_argument("--dev-oracle", action="store_true", default=Config.DEV_ORACLE)
    oracle.set_defaults(handler=run_oracle)
    return parser


def _emit(report, args):
    if report is None or report.status == "error" and not args.json:
        return
    if args.json:
        sys.stdout.write(dump_document(report.to_json(args.timing)))
    else:
        print(report.summary())


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        logging.basicConfig(level=Config.log_level(args.log_level), stream=sys.stderr,
                            format="%(levelname)s %(name)s: %(message)s")
        node_limit = args.node_limit if args.node_limit is not None else Config.node_limit()
        if node_limit <= 0:
            raise ValueError(f"Invalid --node-limit {node_limit}: expected a positive integer")
    except ValueError as e:
        print(f"pwlmip: {e}", file=sys.stderr)
        return EXIT_INPUT

    solver = MilpSolver(node_limit=node_limit)
    start = time.perf_counter()
    try:
        report = args.handler(args, solver)
        code = EXIT_OK
    except ResourceExhausted as e:
        logger.error(f"{args.command}: {e}")
        report = RunReport(args.command, "resource-exhausted", {"message": str(e)}, statistics=_statistics(solver))
        code = EXIT_EXHAUSTED
    except ValueError as e:
        print(f"pwlmip: {e}", file=sys.stderr)
        report = RunReport(args.command, "error", {"message": str(e)})
        code = EXIT_INPUT
    if report is not None:
        report.wall_time = time.perf_counter() - start
        logger.info(f"{args.command} finished in {report.wall_time:.3f} s")
    _emit(report, args)
    return code


if __name__ == "__main__":
    sys.exit(main())
