"""Batch command line: forge instances, sweep the bounds, certify, verify, report.

Exit codes: 0 success, 1 failed check, 2 inconclusive certification,
64 usage/input/format errors, 70 internal errors.
"""

import argparse
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, List, Optional, Sequence, Tuple

from ..core.coisometry import FamilyTag, corrupt_shift, make_shift_family
from ..core.errors import (
    ArtifactFormatError,
    BoundViolation,
    DimensionMismatch,
    InvalidInstance,
    InvalidParameters,
    InvalidSpec,
    InvalidTolerance,
    PreconditionViolated,
    UsageError,
)
from ..engine.certifier import CertifyOutcome, Verdict, certify, verify_certificate
from ..engine.feasibility import DEFAULT_RESTARTS
from ..engine.inequalities import Instance, check_theorem, norm_table, specialization_defects
from ..forge.generator import ForgeKind, ForgeSpec, forge, random_constraint_set
from ..forge.oracles import GRID_STEP, OracleComparison, compare_with_solver, exhaustive_index_check
from ..reports.generator import ReportGenerator, summary_to_dict
from ..storage.models import BoundRow, CertifyRow
from ..storage.serialization import (
    certificate_to_dict,
    dumps,
    instance_to_dict,
    oracle_comparison_to_dict,
    rows_to_csv,
    shift_report_to_dict,
)
from ..storage.store import ArtifactStore
from ..utils.config import Config, ToleranceConfig, get_app_data_dir, get_config

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INCONCLUSIVE = 2
EXIT_USAGE = 64
EXIT_INTERNAL = 70

COMMANDS = ('check', 'certify', 'verify', 'forge', 'report', 'oracle', 'shiftcheck')

_INPUT_ERRORS = (
    UsageError,
    ArtifactFormatError,
    DimensionMismatch,
    InvalidSpec,
    InvalidInstance,
    InvalidParameters,
    InvalidTolerance,
    PreconditionViolated,
    OSError,
    json.JSONDecodeError,
)


@dataclass(frozen=True)
class RunConfig:
    """Everything one invocation needs; built from argv and the Config file."""
    command: str
    tolerances: ToleranceConfig
    seeds: range = range(0, 1)
    d: int = 2
    m: int = 2
    n: int = 3
    family: FamilyTag = FamilyTag.SCALAR
    kind: ForgeKind = ForgeKind.RANDOM
    eps: float = 1e-2
    min_norm: float = 0.05
    restarts: int = DEFAULT_RESTARTS
    grid_step: float = GRID_STEP
    jobs: int = 1
    inputs: Tuple[Path, ...] = ()
    output: Optional[Path] = None
    certificate: Optional[Path] = None
    html: Optional[Path] = None
    truncation: Optional[int] = None
    corrupt: bool = False
    data_dir: Path = field(default_factory=get_app_data_dir)

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        if len(self.seeds) == 0:
            raise UsageError(f"seed range {self.seeds.start}..{self.seeds.stop} is empty")
        if self.jobs < 1:
            raise UsageError(f"--jobs must be positive, got {self.jobs}")
        if self.restarts < 0:
            raise UsageError(f"solver_restarts must be nonnegative, got {self.restarts}")
        if not 0.0 < self.grid_step <= 1.0:
            raise UsageError(f"grid_step must be in (0, 1], got {self.grid_step}")
        # verify reads the certificate, certify writes it
        reads_certificate = self.command == 'verify'
        outputs = (self.output, self.html) + (() if reads_certificate else (self.certificate,))
        written = [path.resolve() for path in outputs if path is not None]
        read = [path.resolve() for path in self.inputs]
        if reads_certificate and self.certificate is not None:
            read.append(self.certificate.resolve())
        if set(written) & set(read) or len(set(written)) != len(written):
            raise UsageError("input and output paths must be distinct")


def parse_seeds(text: str) -> range:
    """``A..B`` is the half-open range [A, B); a bare ``A`` is the single seed A."""
    try:
        if '..' in text:
            start, stop = text.split('..', 1)
            return range(int(start), int(stop))
        seed = int(text)
        return range(seed, seed + 1)
    except ValueError:
        raise UsageError(f"bad seed range {text!r}, expected A..B") from None


class LabArgumentParser(argparse.ArgumentParser):
    """Argument errors raise UsageError so they map onto exit code 64."""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = LabArgumentParser(add_help=False)
    common.add_argument('--seeds', help='half-open seed range A..B (default: DWMOD_SEED or config seed_base)')
    common.add_argument('--d', type=int, default=2, help='algebra dimension')
    common.add_argument('--m', type=int, default=2, help='module rows')
    common.add_argument('--n', type=int, default=3, help='number of elements')
    common.add_argument('--family', choices=[t.value for t in FamilyTag if t is not FamilyTag.SHIFT], default='scalar')
    common.add_argument('--kind', choices=[k.value for k in ForgeKind], default='random')
    common.add_argument('--eps', type=float, help='near-equality perturbation')
    common.add_argument('--tol-eq', type=float, dest='tol_eq')
    common.add_argument('--tol-feas', type=float, dest='tol_feas')
    common.add_argument('--jobs', type=int, help='worker processes')
    common.add_argument('--in', dest='inputs', nargs='+', type=Path, default=[], metavar='PATH')
    common.add_argument('--out', dest='output', type=Path, metavar='PATH')
    common.add_argument('--config-dir', dest='config_dir', type=Path, help='data directory holding config.json')
    common.add_argument('-v', '--verbose', action='count', default=0)

    parser = LabArgumentParser(prog='dwmod', description='Generalized Dunkl-Williams laboratory')
    subparsers = parser.add_subparsers(dest='command', required=True)
    subparsers.add_parser('check', parents=[common], help='sweep the bounds and their specializations')
    certify_parser = subparsers.add_parser('certify', parents=[common], help='search equality certificates')
    certify_parser.add_argument('--certificate', type=Path, help='certificate JSON for a single instance')
    verify_parser = subparsers.add_parser('verify', parents=[common], help='verify a certificate')
    verify_parser.add_argument('--certificate', type=Path, required=True)
    subparsers.add_parser('forge', parents=[common], help='write forged instances')
    report_parser = subparsers.add_parser('report', parents=[common], help='aggregate sweep CSVs')
    report_parser.add_argument('--html', type=Path, help='also render an HTML summary')
    subparsers.add_parser('oracle', parents=[common], help='compare the solver with the Bloch grid oracle')
    shift_parser = subparsers.add_parser('shiftcheck', parents=[common], help='check the shift identities')
    shift_parser.add_argument('--truncation', type=int, help='basis size N (default n^2)')
    shift_parser.add_argument('--corrupt', action='store_true', help='shift the targets of v_0 by one')
    return parser


def configure_logging(verbosity: int):
    level = logging.WARNING if verbosity <= 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    logging.basicConfig(
        level=level,
        format='%(asctime)s %(levelname)s %(name)s: %(message)s',
        stream=sys.stderr,
        force=True,
    )


def make_run_config(args: argparse.Namespace) -> RunConfig:
    config = Config(args.config_dir) if args.config_dir else get_config()
    tolerances = config.tolerances().with_overrides(tol_eq=args.tol_eq, tol_feas=args.tol_feas)
    seeds = parse_seeds(args.seeds) if args.seeds else range(config.seed_base, config.seed_base + 1)
    return RunConfig(
        command=args.command,
        tolerances=tolerances,
        seeds=seeds,
        d=args.d,
        m=args.m,
        n=args.n,
        family=FamilyTag.parse(args.family),
        kind=ForgeKind.parse(args.kind),
        eps=args.eps if args.eps is not None else config.near_equality_eps,
        min_norm=config.min_norm,
        jobs=args.jobs if args.jobs is not None else config.jobs,
        restarts=config.solver_restarts,
        grid_step=config.grid_step,
        inputs=tuple(args.inputs),
        output=args.output,
        certificate=getattr(args, 'certificate', None),
        html=getattr(args, 'html', None),
        truncation=getattr(args, 'truncation', None),
        corrupt=getattr(args, 'corrupt', False),
        data_dir=config.data_dir,
    )


# ---------------------------------------------------------------- per-seed work

def _forge_spec(config: RunConfig, seed: int) -> ForgeSpec:
    return ForgeSpec(seed=seed, d=config.d, m=config.m, n=config.n, family=config.family, kind=config.kind, eps=config.eps)


def _forge_one(task: Tuple[RunConfig, int]) -> Instance:
    config, seed = task
    return forge(_forge_spec(config, seed), config.tolerances, config.min_norm)


def bound_row(inst: Instance, seed: int, kind: str, tol: ToleranceConfig) -> BoundRow:
    """Evaluate the bounds and every specialization on one instance."""
    table = norm_table(inst, tol)
    try:
        report = check_theorem(inst, tol, table)
        violation = False
    except BoundViolation as e:
        report = e.report
        violation = True
    defects = specialization_defects(inst.xs, tol, table)
    if defects:
        logger.warning("seed %d: %s", seed, '; '.join(defects))
    return BoundRow(
        seed=seed,
        d=inst.d,
        m=inst.m,
        n=inst.n,
        family=inst.family_tag or '',
        kind=kind,
        lhs=report.lhs,
        upper=report.upper,
        upper_argmin=report.upper_argmin,
        lower=report.lower,
        lower_argmax=report.lower_argmax,
        violation=violation,
        specializations_ok=not defects,
    )


def _check_one(task: Tuple[RunConfig, int]) -> BoundRow:
    config, seed = task
    return bound_row(_forge_one(task), seed, config.kind.value, config.tolerances)


def certify_row(outcome: CertifyOutcome, seed: int, source: str) -> CertifyRow:
    cert = outcome.certificate
    return CertifyRow(
        seed=seed,
        source=source,
        equality=outcome.equality,
        certified=cert is not None,
        case_tag=cert.case_tag.value if cert else '',
        i=cert.i if cert else None,
        l=cert.l if cert else None,
        max_residual=cert.max_residual if cert else None,
        gap=outcome.gap,
        verdict=outcome.verdict.value,
    )


def _certify_one(task: Tuple[RunConfig, int]) -> CertifyOutcome:
    config, seed = task
    return certify(_forge_one(task), config.tolerances, seed, config.restarts)


def _oracle_one(task: Tuple[RunConfig, int]) -> OracleComparison:
    """--n random 2x2 constraints for the seed, solved and enumerated."""
    config, seed = task
    cs = random_constraint_set(seed, config.n)
    return compare_with_solver(cs, config.tolerances, config.grid_step, config.restarts, seed)


def _map(config: RunConfig, fn: Callable, seeds: Sequence[int]) -> List:
    """Apply ``fn`` per seed, results in seed order regardless of completion order."""
    tasks = [(config, seed) for seed in seeds]
    if config.jobs == 1 or len(tasks) == 1:
        return [fn(task) for task in tasks]
    chunksize = max(1, len(tasks) // (4 * config.jobs))
    with ProcessPoolExecutor(max_workers=config.jobs) as pool:
        return list(pool.map(fn, tasks, chunksize=chunksize))


# ---------------------------------------------------------------------- commands

class Runner:
    """Executes one RunConfig."""

    def __init__(self, config: RunConfig):
        self.config = config
        self.store = ArtifactStore(config.data_dir / 'artifacts')

    def _emit(self, text: str, path: Optional[Path]):
        if path is None:
            sys.stdout.write(text)
        else:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(text, encoding='utf-8')
            logger.info("wrote %s", path)

    def _instances(self) -> List[Tuple[int, str, Instance]]:
        """(seed, source, instance) triples from --in files, or forged from the seed range."""
        if self.config.inputs:
            loaded = []
            for path in self.config.inputs:
                for index, inst in enumerate(self.store.load_instances(path.resolve())):
                    loaded.append((index, str(path), inst))
            return loaded
        instances = _map(self.config, _forge_one, self.config.seeds)
        return [(seed, 'forge', inst) for seed, inst in zip(self.config.seeds, instances)]

    def run(self) -> int:
        handler = getattr(self, f"cmd_{self.config.command}")
        return handler()

    def cmd_forge(self) -> int:
        instances = [inst for _, _, inst in self._instances()]
        if len(instances) == 1:
            payload = instance_to_dict(instances[0])
        else:
            payload = {'instances': [instance_to_dict(inst) for inst in instances]}
        self._emit(dumps(payload), self.config.output)
        return EXIT_OK

    def cmd_check(self) -> int:
        config = self.config
        if config.inputs:
            rows = [
                bound_row(inst, seed, 'file', config.tolerances)
                for seed, _, inst in self._instances()
            ]
        else:
            rows = _map(config, _check_one, config.seeds)
        self._emit(rows_to_csv(rows, BoundRow.columns()), config.output)
        violations = sum(1 for row in rows if row.violation)
        failures = sum(1 for row in rows if not row.specializations_ok)
        logger.info("checked %d instances: %d violations, %d specialization failures", len(rows), violations, failures)
        return EXIT_OK if violations == 0 and failures == 0 else EXIT_FAILED

    def cmd_certify(self) -> int:
        config = self.config
        if config.inputs:
            triples = self._instances()
            outcomes = [certify(inst, config.tolerances, seed, config.restarts) for seed, _, inst in triples]
            keys = [(seed, source) for seed, source, _ in triples]
        else:
            outcomes = _map(config, _certify_one, config.seeds)
            keys = [(seed, 'forge') for seed in config.seeds]

        rows = [certify_row(outcome, seed, source) for outcome, (seed, source) in zip(outcomes, keys)]
        if len(outcomes) == 1:
            cert = outcomes[0].certificate
            target = config.certificate or config.output
            if cert is not None:
                self._emit(dumps(certificate_to_dict(cert)), target)
            else:
                logger.info("no certificate: gap %.3e", outcomes[0].gap)
            if config.certificate is not None and config.output is not None:
                self._emit(rows_to_csv(rows, CertifyRow.columns()), config.output)
        else:
            self._emit(rows_to_csv(rows, CertifyRow.columns()), config.output)

        verdicts = [outcome.verdict for outcome in outcomes]
        if Verdict.MISMATCH in verdicts:
            return EXIT_FAILED
        if Verdict.INCONCLUSIVE in verdicts:
            return EXIT_INCONCLUSIVE
        return EXIT_OK

    def cmd_verify(self) -> int:
        config = self.config
        if len(config.inputs) != 1:
            raise UsageError("verify needs exactly one --in instance file")
        inst = self.store.load_instance(config.inputs[0].resolve())
        cert = self.store.load_certificate(config.certificate.resolve())
        result = verify_certificate(inst, cert, config.tolerances)
        payload = {'valid': result.valid, 'residuals': list(result.residuals), 'reason': result.reason}
        self._emit(dumps(payload), config.output)
        return EXIT_OK if result.valid else EXIT_FAILED

    def cmd_report(self) -> int:
        config = self.config
        if not config.inputs:
            raise UsageError("report needs at least one --in CSV file")
        generator = ReportGenerator(self.store, Config(config.data_dir))
        sources = [path.resolve() for path in config.inputs]
        if config.output is not None:
            generator.generate_json_report(sources, config.output.resolve())
        else:
            payload = summary_to_dict(generator.build_summary(sources))
            payload['sources'] = [str(path) for path in sources]
            self._emit(dumps(payload), None)
        if config.html is not None:
            generator.generate_html_report(sources, config.html.resolve())
        return EXIT_OK

    def cmd_oracle(self) -> int:
        config = self.config
        if config.d != 2:
            raise UsageError(f"the Bloch grid oracle needs --d 2, got {config.d}")
        comparisons = _map(config, _oracle_one, config.seeds)
        results = [oracle_comparison_to_dict(seed, c) for seed, c in zip(config.seeds, comparisons)]
        disagreements = sum(1 for c in comparisons if not c.ok)
        payload = {
            'step': config.grid_step,
            'restarts': config.restarts,
            'constraints': config.n,
            'results': results,
            'in_band': sum(1 for c in comparisons if c.in_band),
            'disagreements': disagreements,
        }
        self._emit(dumps(payload), config.output)
        logger.info("compared %d constraint sets: %d disagreements", len(comparisons), disagreements)
        return EXIT_OK if disagreements == 0 else EXIT_FAILED

    def cmd_shiftcheck(self) -> int:
        config = self.config
        truncation = config.truncation if config.truncation is not None else config.n * config.n
        ops = make_shift_family(config.n, truncation)
        if config.corrupt:
            ops[0] = corrupt_shift(ops[0])
        report = exhaustive_index_check(ops, truncation)
        self._emit(dumps(shift_report_to_dict(report)), config.output)
        return EXIT_OK if report.ok else EXIT_FAILED


def run(config: RunConfig) -> int:
    return Runner(config).run()


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Parse ``argv``, run the command and map failures onto exit codes."""
    try:
        args = build_parser().parse_args(argv)
        configure_logging(args.verbose)
        return run(make_run_config(args))
    except _INPUT_ERRORS as e:
        logger.error("%s", e)
        return EXIT_USAGE
    except Exception:
        logger.exception("internal error")
        return EXIT_INTERNAL
