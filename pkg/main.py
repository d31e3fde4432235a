import argparse
import logging
import math
import sys
import time
from typing import get_args

from pydantic import ValidationError

from src.algorithms import idgs_stage1, idgs_stage2, long_circuit, stage1_circuit
from src.analysis import (
    BIT_ORDER_NOTE,
    print_comparison,
    print_depth_report,
    print_feasibility_scan,
    print_histogram,
    print_identity_report,
    print_plan_summary,
    print_run_outcome,
    print_sweep,
)
from src.depth import check_depth_theorem, comparison_table, depth_report
from src.distributed import node_seeds, run_idgs, serve_node_requests
from src.exceptions import CapacityError, InfeasiblePlanError, ParameterError, SimulationError, WidthMismatchError
from src.experiments import (
    CHANNEL_ALIASES,
    CircuitOp,
    DepthConfig,
    DumpCircuitConfig,
    NoiseSweepConfig,
    PlanConfig,
    RunCommandConfig,
    SampleConfig,
    load_config,
)
from src.identities import verify_identities
from src.models import IdgsResult
from src.planner import exact_partial_plan, feasibility_scan, idgs_plan, long_params
from src.simulation.gates import GateSequence
from src.simulation.operators import (
    compile_operator,
    generalized_grover,
    grover,
    local_grover,
    long_iterate,
)
from src.simulation.oracle import (
    SubfunctionId,
    bit_flip_oracle,
    empty_oracle,
    marked_oracle,
    restrict_prefix,
    subfunction,
    synthesize_subfunction_phase_oracle,
)
from src.simulation.state import sample_prefix
from src.sweeps import AMPLITUDE_DAMPING_GRID, PHASE_DAMPING_GRID, noise_sweep
from src.writer import output_path, write_gate_text, write_run_record, write_sweep_csv

logger = logging.getLogger(__name__)


def _csv_floats(text: str) -> list[float]:
    return [float(v) for v in text.split(',') if v.strip()]


def _csv_words(text: str) -> list[str]:
    return [v.strip() for v in text.split(',') if v.strip()]


def _plan_for(n: int, k: int, p: int, mirrored: bool = False):
    return idgs_plan(n, k, p, mirrored=mirrored) if k else exact_partial_plan(n, p, mirrored=mirrored)


def cmd_plan(args) -> int:
    flags = {'n': args.n, 'k': args.k, 'p': args.p, 'mirrored': args.mirrored, 'scan': args.scan, 'n_max': args.n_max}
    cfg = load_config(PlanConfig, flags, args.config)
    if cfg.scan:
        rows = feasibility_scan(range(cfg.n, (cfg.n_max or cfg.n) + 1), [cfg.k])
        print_feasibility_scan(rows)
        return 0
    plan = _plan_for(cfg.n, cfg.k, cfg.p, cfg.mirrored)
    print(plan.model_dump_json(indent=2))
    return 0


def _noise_flags(args) -> dict | None:
    if args.noise_channel is None:
        return None
    return {
        'channel': CHANNEL_ALIASES.get(args.noise_channel, args.noise_channel),
        'gamma': args.gamma if args.gamma is not None else 0.0,
        'backend': args.backend or 'auto',
        'trajectories': args.trajectories,
    }


def cmd_run(args) -> int:
    flags = {
        'n': args.n,
        'k': args.k,
        'p': args.p,
        'target': args.target,
        'seed': args.seed,
        'parallelism': args.parallelism,
        'mode': args.mode,
        'brute_force_tail': args.brute_force_tail,
        'mirrored': args.mirrored,
        'noise': _noise_flags(args),
        'timing': args.timing,
        'output': args.output,
    }
    cfg = load_config(RunCommandConfig, flags, args.config)
    f = marked_oracle(cfg.n, cfg.target)
    plan = idgs_plan(cfg.n, cfg.k, cfg.p, mirrored=cfg.mirrored)

    start = time.perf_counter()
    outcome = run_idgs(f, cfg.to_run_config())
    wall_time = time.perf_counter() - start if cfg.timing else None

    found = isinstance(outcome, IdgsResult)
    record = {
        'config': cfg.model_dump(mode='json'),
        'plan': plan.model_dump(mode='json'),
        'reports': [r.model_dump(mode='json') for r in outcome.reports],
        'target': outcome.target if found else None,
        'wall_time': wall_time,
    }
    print_plan_summary(plan)
    print_run_outcome(outcome)
    path = output_path(f'run_n{cfg.n}_k{cfg.k}_p{cfg.p}_seed{cfg.seed}.json', cfg.output)
    write_run_record(record, path)
    return 0 if found else 1


def cmd_noise_sweep(args) -> int:
    flags = {
        'n': args.n,
        'k': args.k,
        'p': args.p,
        'target': args.target,
        'channel': args.channel,
        'grid': _csv_floats(args.grid) if args.grid else None,
        'backend': args.backend,
        'trajectories': args.trajectories,
        'shots': args.shots,
        'seed': args.seed,
        'algorithms': _csv_words(args.algorithms) if args.algorithms else None,
        'output': args.output,
    }
    cfg = load_config(NoiseSweepConfig, flags, args.config)
    grid = cfg.grid
    if grid is None:
        grid = AMPLITUDE_DAMPING_GRID if cfg.channel == 'amplitude_damping' else PHASE_DAMPING_GRID
    rows = noise_sweep(cfg.n, cfg.k, cfg.p, cfg.target, cfg.noise_spec(), grid, cfg.algorithms, cfg.shots, cfg.seed)
    print_sweep(rows)
    write_sweep_csv(rows, output_path(f'noise_{cfg.channel}_n{cfg.n}.csv', cfg.output))
    return 0


def cmd_verify_identities(args) -> int:
    checks = verify_identities()
    print_identity_report(checks)
    return 0 if all(c.passed for c in checks) else 1


def cmd_depth(args) -> int:
    flags = {'n': args.n, 'k': args.k, 'p': args.p, 'compare': args.compare}
    cfg = load_config(DepthConfig, flags, args.config)
    report = depth_report(cfg.n, cfg.k, cfg.p)
    print_depth_report(report)
    check = check_depth_theorem(cfg.n, cfg.k, cfg.p)
    print(f'  Stage-1 deeper than stage 2: {check.holds}' + (f' ({check.note})' if check.note else ''))
    if cfg.compare:
        print_comparison(comparison_table(cfg.n, cfg.k, cfg.p))
    print(report.model_dump_json(indent=2))
    return 0


def build_circuit(cfg: DumpCircuitConfig) -> GateSequence:
    width = cfg.n - cfg.k
    if cfg.op == 'bit-oracle':
        return bit_flip_oracle(marked_oracle(cfg.n, cfg.target) if cfg.target else empty_oracle(cfg.n))
    if cfg.op == 'subfunction-oracle':
        f = marked_oracle(cfg.n, cfg.target) if cfg.target else empty_oracle(cfg.n)
        alpha = math.pi if cfg.alpha is None else cfg.alpha
        return synthesize_subfunction_phase_oracle(bit_flip_oracle(f), SubfunctionId(k=cfg.k, i=cfg.i), alpha)

    f = marked_oracle(width, cfg.target) if cfg.target else empty_oracle(width)
    match cfg.op:
        case 'g':
            return compile_operator(grover(f))
        case 'g2':
            return compile_operator(grover(f, kind='G2'))
        case 'g1':
            return compile_operator(local_grover(f, cfg.p))
        case 'g3':
            return compile_operator(local_grover(f, cfg.p, kind='G3'))
        case 'g4':
            plan = _plan_for(cfg.n, cfg.k, cfg.p)
            theta = plan.theta if cfg.theta is None else cfg.theta
            phi = plan.phi if cfg.phi is None else cfg.phi
            return compile_operator(generalized_grover(f, theta, phi, kind='G4'))
        case 'gg':
            return compile_operator(generalized_grover(f, cfg.theta, cfg.phi))
        case 'l':
            omega = long_params(width).omega if cfg.theta is None else cfg.theta
            return compile_operator(long_iterate(f, omega))
        case 'stage1':
            return stage1_circuit(f, _plan_for(cfg.n, cfg.k, cfg.p))
        case 'stage2':
            return long_circuit(f)
    raise ParameterError(f'Unknown circuit {cfg.op}')


def cmd_dump_circuit(args) -> int:
    flags = {
        'op': args.op,
        'n': args.n,
        'k': args.k,
        'p': args.p,
        'target': args.target,
        'theta': args.theta,
        'phi': args.phi,
        'i': args.i,
        'alpha': args.alpha,
        'output': args.output,
    }
    cfg = load_config(DumpCircuitConfig, flags, args.config)
    circuit = build_circuit(cfg)
    if cfg.output:
        write_gate_text(circuit, cfg.output)
    else:
        print(circuit.to_text(), end='')
    return 0


def cmd_sample(args) -> int:
    flags = {'n': args.n, 'k': args.k, 'p': args.p, 'target': args.target, 'shots': args.shots, 'seed': args.seed}
    cfg = load_config(SampleConfig, flags, args.config)
    f = marked_oracle(cfg.n, cfg.target)
    plan = idgs_plan(cfg.n, cfg.k, cfg.p)
    print(f'Sampling {cfg.shots} shots per stage ({BIT_ORDER_NOTE})')
    for sid in SubfunctionId.all_ids(cfg.k):
        seed1, seed2 = node_seeds(cfg.seed + sid.index)
        f_i = subfunction(f, sid)
        stage1 = idgs_stage1(f_i, cfg.p, seed1, plan=plan)
        counts = sample_prefix(stage1.final_state, cfg.p, cfg.shots, seed1)
        print_histogram(f'Node {sid.i}, stage 1 (first {cfg.p} qubits):', counts, cfg.shots)
        f_rest = restrict_prefix(f_i, stage1.measured)
        stage2 = idgs_stage2(f_rest, seed2)
        counts = sample_prefix(stage2.final_state, f_rest.m, cfg.shots, seed2)
        print_histogram(f'Node {sid.i}, stage 2 after prefix {stage1.measured}:', counts, cfg.shots)
    return 0


def cmd_node_worker(args) -> int:
    serve_node_requests(sys.stdin, sys.stdout)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description='Simulate iterative exact distributed Grover search')
    parser.add_argument('-v', '--verbose', action='store_true', help='Log progress at DEBUG level')
    sub = parser.add_subparsers(dest='command', required=True)

    def sizes(p, n_required=True, k_default=None, p_default=None):
        p.add_argument('-n', type=int, required=n_required, default=None, help='Total number of input bits')
        p.add_argument('-k', type=int, default=k_default, help='Bits fixed per node (2^k nodes)')
        p.add_argument('-p', type=int, default=p_default, help='Prefix width found in stage 1')
        p.add_argument('--config', default=None, help='JSON file whose keys mirror the flags')

    plan = sub.add_parser('plan', help='Print every derived parameter as JSON')
    sizes(plan)
    plan.add_argument('--mirrored', action='store_true', default=None, help='Use the (-theta, -phi) branch')
    plan.add_argument('--scan', action='store_true', default=None, help='List feasibility of every p for n..n-max')
    plan.add_argument('--n-max', type=int, default=None)
    plan.set_defaults(handler=cmd_plan)

    run = sub.add_parser('run', help='Run the distributed search for a single target')
    sizes(run, n_required=False)
    run.add_argument('--target', default=None, help='The marked n-bit string')
    run.add_argument('--seed', type=int, default=None)
    run.add_argument('--parallelism', type=int, default=None, help='Maximum concurrent node tasks')
    run.add_argument('--mode', choices=['inprocess', 'multiprocess'], default=None)
    run.add_argument('--brute-force-tail', action='store_true', default=None, help='Classical search for stage 2')
    run.add_argument('--mirrored', action='store_true', default=None)
    run.add_argument('--noise-channel', choices=sorted(CHANNEL_ALIASES), default=None)
    run.add_argument('--gamma', type=float, default=None)
    run.add_argument('--backend', choices=['auto', 'density-matrix', 'trajectories'], default=None)
    run.add_argument('--trajectories', type=int, default=None)
    run.add_argument('--timing', action='store_true', default=None, help='Record wall time')
    run.add_argument('--output', default=None, help='Run record path (JSON)')
    run.set_defaults(handler=cmd_run)

    sweep = sub.add_parser('noise-sweep', help='Success rate against noise strength, as CSV')
    sizes(sweep, n_required=False)
    sweep.add_argument('--target', default=None)
    sweep.add_argument('--channel', choices=sorted(CHANNEL_ALIASES), default=None)
    sweep.add_argument('--grid', default=None, help='Comma-separated gamma values')
    sweep.add_argument('--backend', choices=['auto', 'density-matrix', 'trajectories'], default=None)
    sweep.add_argument('--trajectories', type=int, default=None)
    sweep.add_argument('--shots', type=int, default=None)
    sweep.add_argument('--seed', type=int, default=None)
    sweep.add_argument('--algorithms', default=None, help='Comma-separated subset of idgs,long')
    sweep.add_argument('--output', default=None, help='CSV path')
    sweep.set_defaults(handler=cmd_noise_sweep)

    identities = sub.add_parser('verify-identities', help='Check the closed-form identities numerically')
    identities.set_defaults(handler=cmd_verify_identities)

    depth = sub.add_parser('depth', help='Circuit depth and query accounting')
    sizes(depth)
    depth.add_argument('--compare', action='store_true', default=None, help='Add the algorithm comparison table')
    depth.set_defaults(handler=cmd_depth)

    dump = sub.add_parser('dump-circuit', help='Print the gate sequence of an operator')
    dump.add_argument('op', choices=get_args(CircuitOp))
    sizes(dump)
    dump.add_argument('--target', default=None)
    dump.add_argument('--theta', type=float, default=None)
    dump.add_argument('--phi', type=float, default=None)
    dump.add_argument('--i', default=None, help='Subfunction id for subfunction-oracle')
    dump.add_argument('--alpha', type=float, default=None)
    dump.add_argument('--output', default=None)
    dump.set_defaults(handler=cmd_dump_circuit)

    sample = sub.add_parser('sample', help='Per-node measurement histograms')
    sizes(sample, n_required=False)
    sample.add_argument('--target', default=None)
    sample.add_argument('--shots', type=int, default=None)
    sample.add_argument('--seed', type=int, default=None)
    sample.set_defaults(handler=cmd_sample)

    worker = sub.add_parser('node-worker', help='Serve node requests as JSON lines on stdin/stdout')
    worker.set_defaults(handler=cmd_node_worker)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format='%(levelname)s %(name)s: %(message)s',
    )

    try:
        return args.handler(args)
    except ValidationError as exc:
        print(f'Invalid configuration:\n{exc}', file=sys.stderr)
        return 2
    except InfeasiblePlanError as exc:
        print(f'Infeasible plan: {exc}', file=sys.stderr)
        return 3
    except (ParameterError, CapacityError, WidthMismatchError) as exc:
        print(f'Invalid configuration: {exc}', file=sys.stderr)
        return 2
    except SimulationError as exc:
        print(f'Simulation error: {exc}', file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f'Invalid configuration: {exc}', file=sys.stderr)
        return 2


if __name__ == '__main__':
    sys.exit(main())
