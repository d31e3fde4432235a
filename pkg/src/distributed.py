"""Fan-out of the 2^k node tasks and the classical merge of their reports.

Every node derives its randomness from base_seed + index(i), so the number of concurrent
tasks never changes a result. Nodes share nothing and return only classical reports.
"""

import json
import logging
import subprocess
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import IO

import numpy as np
from pydantic import BaseModel, ValidationError

from src.algorithms import idgs_stage1, idgs_stage1_noisy, idgs_stage2, idgs_stage2_noisy
from src.exceptions import IntegrityError, ParameterError, WidthMismatchError, WorkerError
from src.models import IdgsPlan, IdgsResult, NodeReport, NotFound, RunConfig
from src.planner import idgs_plan
from src.simulation.noise import NoiseSpec
from src.simulation.oracle import (
    MarkedOracle,
    SubfunctionId,
    classical_eval,
    marked_oracle,
    restrict_prefix,
    subfunction,
)

logger = logging.getLogger(__name__)

_ENTRY_POINT = Path(__file__).resolve().parents[1] / 'main.py'


class OracleWire(BaseModel):
    n: int
    target: str


class NodeRequest(BaseModel):
    """One line of the node-worker protocol."""

    oracle: OracleWire
    i: str
    k: int
    p: int
    seed: int
    brute_force_tail: bool = False
    mirrored: bool = False


def node_seeds(seed: int) -> tuple[int, int]:
    """Independent stage-1 and stage-2 seeds from one node seed."""
    first, second = np.random.SeedSequence(seed).generate_state(2)
    return int(first), int(second)


def run_node(
    f: MarkedOracle,
    sid: SubfunctionId,
    plan: IdgsPlan,
    seed: int,
    noise: NoiseSpec | None = None,
    brute_force_tail: bool = False,
) -> NodeReport:
    """Both stages on the subfunction f_i, then classical verification of x ∥ y ∥ i."""
    logger.info('Node %s: start (seed=%d)', sid.i or '-', seed)
    f_i = subfunction(f, sid)
    seed1, seed2 = node_seeds(seed)
    if noise is None:
        stage1 = idgs_stage1(f_i, plan.p, seed1, plan=plan)
    else:
        stage1 = idgs_stage1_noisy(f_i, plan, noise, seed1)

    f_rest = restrict_prefix(f_i, stage1.measured)
    if noise is None or brute_force_tail:
        stage2 = idgs_stage2(f_rest, seed2, brute_force=brute_force_tail)
    else:
        stage2 = idgs_stage2_noisy(f_rest, noise, seed2)

    candidate = stage1.measured + stage2.measured + sid.i
    report = NodeReport(
        id=sid,
        prefix=stage1.measured,
        suffix=stage2.measured,
        candidate=candidate,
        verified=classical_eval(f, candidate),
        stage1_prob=stage1.success_prob,
        stage2_prob=stage2.success_prob,
    )
    logger.info('Node %s: candidate %s verified=%d', sid.i or '-', candidate, report.verified)
    return report


def merge_and_verify(f: MarkedOracle, reports: list[NodeReport]) -> IdgsResult | NotFound:
    """The unique candidate that f accepts, or NotFound when no node produced one."""
    if not reports:
        raise ParameterError('No node reports to merge')
    k = reports[0].id.k
    expected = {sid.i for sid in SubfunctionId.all_ids(k)}
    seen = {r.id.i for r in reports}
    if seen != expected or len(reports) != len(expected):
        raise ParameterError(f'Reports must cover each of the {len(expected)} subfunction ids exactly once')

    ordered = sorted(reports, key=lambda r: r.id.index)
    verified = sorted({r.candidate for r in ordered if classical_eval(f, r.candidate)})
    if len(verified) > 1:
        raise IntegrityError(f'{len(verified)} distinct candidates verified: {verified}')
    if not verified:
        return NotFound(reports=ordered)
    return IdgsResult(target=verified[0], reports=ordered)


def _call_worker(request: NodeRequest) -> NodeReport:
    completed = subprocess.run(
        [sys.executable, str(_ENTRY_POINT), 'node-worker'],
        input=request.model_dump_json() + '\n',
        capture_output=True,
        text=True,
        cwd=_ENTRY_POINT.parent,
        check=False,
    )
    if completed.returncode != 0:
        raise WorkerError(
            f'Node worker for i={request.i!r} exited with {completed.returncode}: {completed.stderr.strip()}'
        )
    lines = completed.stdout.strip().splitlines()
    if not lines:
        raise WorkerError(f'Node worker for i={request.i!r} returned no report')
    try:
        return NodeReport.model_validate_json(lines[-1])
    except ValidationError as exc:
        raise WorkerError(f'Node worker for i={request.i!r} returned a malformed report: {lines[-1]!r}') from exc


def run_idgs(f: MarkedOracle, cfg: RunConfig) -> IdgsResult | NotFound:
    """Run every node (in threads, sequentially, or as worker processes) and merge."""
    if f.m != cfg.n:
        raise WidthMismatchError(f'Oracle has {f.m} bits, run is configured for n={cfg.n}')
    target = f.target
    plan = idgs_plan(cfg.n, cfg.k, cfg.p, mirrored=cfg.mirrored)
    ids = SubfunctionId.all_ids(cfg.k)
    logger.info('Running %d nodes (n=%d, k=%d, p=%d, mode=%s)', len(ids), cfg.n, cfg.k, cfg.p, cfg.mode)

    if cfg.mode == 'multiprocess':
        requests = [
            NodeRequest(
                oracle=OracleWire(n=cfg.n, target=target),
                i=sid.i,
                k=cfg.k,
                p=cfg.p,
                seed=cfg.base_seed + sid.index,
                brute_force_tail=cfg.brute_force_tail,
                mirrored=cfg.mirrored,
            )
            for sid in ids
        ]
        with ThreadPoolExecutor(max_workers=cfg.parallelism) as pool:
            reports = list(pool.map(_call_worker, requests))
        return merge_and_verify(f, reports)

    def task(sid: SubfunctionId) -> NodeReport:
        return run_node(f, sid, plan, cfg.base_seed + sid.index, cfg.noise, cfg.brute_force_tail)

    if cfg.parallelism == 1:
        reports = [task(sid) for sid in ids]
    else:
        with ThreadPoolExecutor(max_workers=cfg.parallelism) as pool:
            reports = list(pool.map(task, ids))
    return merge_and_verify(f, reports)


def handle_request(request: NodeRequest) -> NodeReport:
    f = marked_oracle(request.oracle.n, request.oracle.target)
    plan = idgs_plan(request.oracle.n, request.k, request.p, mirrored=request.mirrored)
    sid = SubfunctionId(k=request.k, i=request.i)
    return run_node(f, sid, plan, request.seed, brute_force_tail=request.brute_force_tail)


def serve_node_requests(stream_in: IO[str], stream_out: IO[str]) -> int:
    """Answer newline-delimited JSON requests with one NodeReport line each."""
    handled = 0
    for line in stream_in:
        if not line.strip():
            continue
        report = handle_request(NodeRequest.model_validate(json.loads(line)))
        stream_out.write(report.model_dump_json() + '\n')
        stream_out.flush()
        handled += 1
    return handled
