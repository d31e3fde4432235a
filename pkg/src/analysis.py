from src.models import ComparisonRow, DepthReport, IdentityCheck, IdgsPlan, IdgsResult, NodeReport, NotFound, SweepRow

BIT_ORDER_NOTE = 'bitstrings are MSB-first (qubit 0 = leftmost)'


def print_plan_summary(plan: IdgsPlan) -> None:
    print(f'\nPlan for n={plan.n}, k={plan.k}, p={plan.p} (stage-1 register {plan.width} qubits):')
    print(f'  Stage 1: G2 x {plan.p1}, G3 x {plan.p2}, G4 x 1 with theta={plan.theta:.4f}, phi={plan.phi:.4f}')
    print(f'  Stage 2: L x {plan.stage2.iterations} on {plan.stage2_width} qubits, omega={plan.stage2.omega:.4f}')
    print(f'  a_t={plan.a_t:.6f}, a_nt={plan.a_nt:.6f}, E={plan.E:.6f}, F={plan.F:.6f}')
    if plan.p1 == 0 or plan.p2 == 0:
        print('  Note: an iteration count rounded to 0')


def print_feasibility_scan(rows: list[dict]) -> None:
    print('\nFeasibility scan:')
    print(f'  {"n":>3} {"k":>3} {"p":>3}  feasible')
    for row in rows:
        mark = 'yes' if row['feasible'] else f'no  {row["reason"]}'
        print(f'  {row["n"]:>3} {row["k"]:>3} {row["p"]:>3}  {mark}')
    feasible = sum(1 for row in rows if row['feasible'])
    print(f'\n{feasible} of {len(rows)} configurations are feasible')


def print_node_reports(reports: list[NodeReport]) -> None:
    print(f'\nNode reports ({BIT_ORDER_NOTE}):')
    print(f'  {"node":<6} {"prefix":<8} {"suffix":<14} {"candidate":<20} {"verified":<8} {"P(stage1)":>10} {"P(stage2)":>10}')
    for r in reports:
        print(
            f'  {r.id.i or "-":<6} {r.prefix:<8} {r.suffix:<14} {r.candidate:<20} {r.verified:<8} '
            f'{r.stage1_prob:>10.6f} {r.stage2_prob:>10.6f}'
        )


def print_run_outcome(outcome: IdgsResult | NotFound) -> None:
    print_node_reports(outcome.reports)
    if isinstance(outcome, IdgsResult):
        print(f'\nTarget found: {outcome.target}')
    else:
        print(f'\nNo target found: {outcome.reason}')


def print_histogram(title: str, counts: dict[str, int], shots: int, width: int = 40) -> None:
    print(f'\n{title}')
    for bits in sorted(counts):
        share = counts[bits] / shots
        print(f'  {bits}  {counts[bits]:>6}  {share:6.3f}  {"#" * round(share * width)}')


def print_depth_report(report: DepthReport) -> None:
    print(f'\nCircuit depth for n={report.n}, k={report.k}, p={report.p}:')
    print(f'  d(G2) = d(G4) = {report.d_g2}, d(G3) = {report.d_g3}, d(L) = {report.d_l}')
    print(f'  Stage 1: {report.p1}*{report.d_g2} + {report.p2}*{report.d_g3} + {report.d_g4} = {report.stage1_total}')
    print(f'  Stage 2: {report.stage2_iterations}*{report.d_l} = {report.stage2_total}')
    print(f'  Overall depth: {report.overall}')
    print(f'  Grover baseline: {report.grover_iterations} iterations, depth {report.grover_baseline}')
    print(f'  Saving: {report.saving}')
    print(f'  Queries per node: {report.stage1_queries} + {report.stage2_queries} = {report.node_queries}')
    print(f'  Total queries: {report.total_queries} (closed form {report.total_queries_formula:.1f})')
    print(f'  gamma_p - eta_p: {report.query_gap_constant:.4f}')
    for warning in report.warnings:
        print(f'  Warning: {warning}')
    for note in report.notes:
        print(f'  Note: {note}')


def print_comparison(rows: list[ComparisonRow]) -> None:
    print(f'\n  {"algorithm":<20} {"qubits":>6} {"exact":>6} {"depth":>10} {"queries":>10}')
    for row in rows:
        exact = 'yes' if row.exact else 'no'
        print(f'  {row.algorithm:<20} {row.qubits:>6} {exact:>6} {row.circuit_depth:>10} {row.total_queries:>10}')


def print_identity_report(checks: list[IdentityCheck]) -> None:
    print('\nIdentity checks:')
    for check in checks:
        status = 'PASS' if check.passed else 'FAIL'
        print(
            f'  [{status}] {check.name}: max residual {check.max_residual:.3e} '
            f'(tolerance {check.tolerance:.0e}, {check.cases} cases)'
        )
        if check.note:
            print(f'         {check.note}')
    failed = [c.name for c in checks if not c.passed]
    print(f'\n{len(checks) - len(failed)} of {len(checks)} identities hold')


def print_sweep(rows: list[SweepRow]) -> None:
    print(f'\n  {"gamma":>7} {"algorithm":<9} {"backend":<16} {"p1_bar":>8} {"p2_bar":>8} {"success":>8} {"stderr":>8}')
    for row in rows:
        p1 = f'{row.p1_bar:.4f}' if row.p1_bar is not None else '-'
        p2 = f'{row.p2_bar:.4f}' if row.p2_bar is not None else '-'
        print(
            f'  {row.gamma:>7.3f} {row.algorithm:<9} {row.backend:<16} {p1:>8} {p2:>8} '
            f'{row.success:>8.4f} {row.stderr:>8.4f}'
        )
