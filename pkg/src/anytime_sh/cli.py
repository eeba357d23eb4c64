"""Command-line entry point: ``mab``, ``tournament``, ``play`` and ``schedule``.

Every output starts with a comment line naming the version, the resolved
options and the seed, so a file is enough to rerun the experiment. Exit
codes: 0 success, 1 internal failure, 2 usage error, 3 contract error.
"""

from __future__ import annotations

import argparse
import contextlib
import itertools
import json
import logging
import math
import sys
from pathlib import Path
from typing import Sequence

from . import __version__
from .bandits import (
    POLICY_KINDS,
    BudgetTooSmallError,
    format_anytime_schedule,
    format_sh_schedule,
)
from .games import DEFAULT_GAME_IDS, make_game
from .mab import C_MAB, DEFAULT_ITERATIONS, generate_suite, run_suite
from .mab import write_csv as write_mab_csv
from .mcts import C_GAME, NotAnytimeError
from .tournament import (
    AGENT_NAMES,
    AgentSpec,
    MatchupSpec,
    play_game,
    run_matchup,
    summarize,
    write_csv,
    write_game_log,
)

log = logging.getLogger("anytime_sh")

EXIT_OK, EXIT_INTERNAL, EXIT_USAGE, EXIT_CONTRACT = 0, 1, 2, 3
GAME_BUDGETS = (1000, 5000, 10000, 20000, 30000, 40000, 50000)

# options that do not influence results and stay out of the header
_UNRECORDED = {"out", "config", "command", "verbose", "log"}


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1, got {value}")
    return value


def _positive_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not value > 0 or math.isinf(value):
        raise argparse.ArgumentTypeError(f"must be a positive number, got {text}")
    return value


def _nonnegative_float(text: str) -> float:
    value = float(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be non-negative, got {text}")
    return value


def _int_list(text: str) -> list[int]:
    try:
        values = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers: {text!r}") from None
    if not values or min(values) < 1:
        raise argparse.ArgumentTypeError("budgets must be positive integers")
    return values


def _choice_list(choices: Sequence[str]):
    def parse(text: str) -> list[str]:
        values = [x.strip() for x in text.split(",") if x.strip()]
        bad = [v for v in values if v not in choices]
        if not values or bad:
            raise argparse.ArgumentTypeError(
                f"invalid choice {', '.join(bad) or text!r}; choose from {', '.join(choices)}")
        return values
    return parse


def _game_list(text: str) -> list[str]:
    values = [x.strip() for x in text.split(",") if x.strip()]
    if not values:
        raise argparse.ArgumentTypeError("no games given")
    for v in values:
        try:
            make_game(v)
        except ValueError as exc:
            raise argparse.ArgumentTypeError(str(exc)) from None
    return values


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="master seed (default 0)")
    common.add_argument("--out", default="-", help="output file, '-' for stdout")
    common.add_argument("--jobs", type=_positive_int, default=1,
                        help="worker processes; results do not depend on it")
    common.add_argument("--config", type=Path,
                        help="JSON file of option values; command-line flags win")
    common.add_argument("-v", "--verbose", action="store_true", help="progress on stderr")

    parser = argparse.ArgumentParser(
        prog="anytime-sh",
        description="Sequential Halving, Anytime SH and UCB1 on synthetic bandits "
                    "and as root strategies in MCTS game play.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("mab", parents=[common],
                       help="simple regret on a suite of Gaussian bandit problems")
    p.add_argument("--policies", type=_choice_list(POLICY_KINDS), default=list(POLICY_KINDS),
                   help=f"comma-separated subset of {','.join(POLICY_KINDS)}")
    p.add_argument("--problems", type=_positive_int, default=100)
    p.add_argument("--k", type=_positive_int, default=10, help="arms per problem")
    p.add_argument("--budgets", type=_int_list, default=list(DEFAULT_ITERATIONS),
                   help="iteration budgets to report (default: the calibrated ten)")
    p.add_argument("--c", type=_nonnegative_float, default=C_MAB,
                   help="UCB1 exploration constant")

    p = sub.add_parser("tournament", parents=[common],
                       help="agent-vs-agent matches with seat swapping")
    p.add_argument("--games", type=_game_list, default=list(DEFAULT_GAME_IDS))
    p.add_argument("--agents", type=_choice_list(AGENT_NAMES),
                   default=["anytime-sh", "uct", "hmcts"],
                   help="every pair of listed agents plays; one agent plays itself")
    p.add_argument("--n", type=_positive_int, default=150, help="games per matchup (even)")
    budget = p.add_mutually_exclusive_group()
    budget.add_argument("--iters", type=_int_list, default=list(GAME_BUDGETS),
                        help="iterations per move, comma-separated")
    budget.add_argument("--time-ms", type=_positive_float,
                        help="wall-clock per move instead of iterations (not reproducible)")
    p.add_argument("--c", type=_nonnegative_float, default=C_GAME)
    p.add_argument("--final-move", choices=["robust", "max-mean"], default="robust",
                   help="final-move rule for uct")
    p.add_argument("--log", help="also write a JSON log with every move of every game")

    p = sub.add_parser("play", parents=[common],
                       help="play one game, boards on stderr, JSON log to --out")
    p.add_argument("--game", type=_game_list, default=["tictactoe"])
    p.add_argument("--agents", type=_choice_list(AGENT_NAMES), default=["uct", "uct"],
                   help="first player, second player")
    budget = p.add_mutually_exclusive_group()
    budget.add_argument("--iters", type=_positive_int, default=1000)
    budget.add_argument("--time-ms", type=_positive_float)
    p.add_argument("--c", type=_nonnegative_float, default=C_GAME)
    p.add_argument("--final-move", choices=["robust", "max-mean"], default="robust")

    p = sub.add_parser("schedule", parents=[common],
                       help="print the pull schedule of SH or Anytime SH")
    p.add_argument("kind", choices=["sh", "anytime"])
    p.add_argument("--k", type=_positive_int, help="number of arms (required)")
    p.add_argument("--t", type=_positive_int, help="SH budget")
    p.add_argument("--passes", type=_positive_int, default=1, help="Anytime SH passes")
    return parser


def _config_argv(path: Path, parser: argparse.ArgumentParser, command: str) -> list[str]:
    """Turn a JSON config into flags that go before the real command line."""
    try:
        data = json.loads(path.read_text())
    except OSError as exc:
        parser.error(f"cannot read config {path}: {exc}")
    except json.JSONDecodeError as exc:
        parser.error(f"config {path} is not valid JSON: {exc}")
    if not isinstance(data, dict):
        parser.error(f"config {path} must hold a JSON object")
    argv = []
    for key, value in data.items():
        if key in ("config", "command", "kind"):
            continue
        flag = "--" + key.replace("_", "-")
        if isinstance(value, bool):
            if value:
                argv.append(flag)
            continue
        if isinstance(value, list):
            value = ",".join(str(v) for v in value)
        argv += [flag, str(value)]
    return argv


def parse_args(argv: Sequence[str] | None) -> argparse.Namespace:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    args = parser.parse_args(argv)
    if args.config is not None:
        extra = _config_argv(args.config, parser, args.command)
        i = argv.index(args.command) + 1
        if args.command == "schedule":
            i += 1  # keep the positional kind first
        args = parser.parse_args(argv[:i] + extra + argv[i:])
    return args


def header(args: argparse.Namespace) -> str:
    parts = [f"anytime-sh {__version__}", args.command]
    if args.command == "schedule":
        parts.append(args.kind)
    for key in sorted(vars(args)):
        if key in _UNRECORDED or key == "kind":
            continue
        value = getattr(args, key)
        if value is None:
            continue
        if isinstance(value, list):
            value = ",".join(map(str, value))
        parts.append(f"--{key.replace('_', '-')}={value}")
    return " ".join(parts)


@contextlib.contextmanager
def _output(path: str):
    if path == "-":
        yield sys.stdout
        sys.stdout.flush()
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            yield fh


def cmd_mab(args) -> int:
    budgets = sorted(set(args.budgets))
    if budgets[0] < args.k:
        raise BudgetTooSmallError(args.k, budgets[0], args.k)
    problems = generate_suite(args.problems, args.k, args.seed)
    log.info("running %d problems x %d policies", len(problems), len(args.policies))
    results = run_suite(problems, args.policies, budgets, args.seed, c=args.c, jobs=args.jobs)
    with _output(args.out) as out:
        out.write(f"# {header(args)}\n")
        write_mab_csv(out, results, args.seed)
    return EXIT_OK


def _agent(name: str, args) -> AgentSpec:
    return AgentSpec(name, c=args.c, final_move_rule=args.final_move)


def _pairs(agents: list[str]) -> list[tuple[str, str]]:
    if len(agents) == 1:
        return [(agents[0], agents[0])]
    return list(itertools.combinations(dict.fromkeys(agents), 2))


def cmd_tournament(args) -> int:
    if args.n % 2:
        raise _UsageError(f"--n must be even so both seats are played equally, got {args.n}")
    budgets = [None] if args.time_ms is not None else args.iters
    specs = []
    for game in args.games:
        for a, b in _pairs(args.agents):
            for iters in budgets:
                specs.append(MatchupSpec(game, _agent(a, args), _agent(b, args), iters or 0,
                                         args.n, args.seed, time_ms=args.time_ms))
    results = []
    for spec in specs:
        result = run_matchup(spec, jobs=args.jobs)
        log.info("%s %s vs %s @%s: %g / %d", spec.game, spec.agent_a.label,
                 spec.agent_b.label, spec.iterations or f"{args.time_ms}ms",
                 result.wins_a, result.n)
        results.append(result)
    with _output(args.out) as out:
        out.write(f"# {header(args)}\n")
        write_csv(out, summarize(results))
    if args.log:
        with open(args.log, "w", encoding="utf-8") as fh:
            write_game_log(fh, results, header=header(args))
    return EXIT_OK


def cmd_play(args) -> int:
    if len(args.agents) != 2:
        raise _UsageError("--agents needs exactly two names: first player, second player")
    game = args.game[0]
    first, second = (_agent(name, args) for name in args.agents)
    state = make_game(game)
    MatchupSpec(game, first, second, args.iters if args.time_ms is None else 0, 2,
                args.seed, time_ms=args.time_ms)

    def show(state, text):
        print(f"{state.current_player.opponent.name} plays {text}", file=sys.stderr)
        print(state.render() + "\n", file=sys.stderr)

    print(state.render() + "\n", file=sys.stderr)
    record = play_game(game, first, second, True, args.iters, args.seed, on_move=show,
                       time_ms=args.time_ms)
    print(f"result: {record.outcome}", file=sys.stderr)
    data = {
        "#": header(args),
        "game": game,
        "players": [first.label, second.label],
        "seed": args.seed,
        "moves": record.moves,
        "outcome": record.outcome,
    }
    with _output(args.out) as out:
        json.dump(data, out, indent=1)
        out.write("\n")
    return EXIT_OK


def cmd_schedule(args) -> int:
    if args.k is None:
        raise _UsageError("schedule needs --k")
    if args.k < 2:
        raise _UsageError("--k must be at least 2")
    if args.kind == "sh":
        if args.t is None:
            raise _UsageError("schedule sh needs --t")
        lines = format_sh_schedule(args.k, args.t)
    else:
        lines = format_anytime_schedule(args.k, args.passes)
    with _output(args.out) as out:
        out.write(f"# {header(args)}\n")
        out.write("\n".join(lines) + "\n")
    return EXIT_OK


class _UsageError(Exception):
    pass


COMMANDS = {"mab": cmd_mab, "tournament": cmd_tournament, "play": cmd_play,
            "schedule": cmd_schedule}


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(message)s", stream=sys.stderr)
    try:
        return COMMANDS[args.command](args)
    except _UsageError as exc:
        print(f"anytime-sh {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NotAnytimeError, BudgetTooSmallError) as exc:
        print(f"anytime-sh {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_CONTRACT
    except ValueError as exc:
        print(f"anytime-sh {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # noqa: BLE001
        log.exception("internal error")
        print(f"anytime-sh {args.command}: internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
