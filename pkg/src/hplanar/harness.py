"""Seeded batches of the SAT-to-{K4}-planarity equivalence check."""

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

from .config import Config
from .errors import PreconditionError
from .hardness import (
    HarnessStatus,
    HarnessVerdict,
    PlanarCnf,
    equivalence_harness,
    random_planar_cnf,
)
from .ledger import RunLedger

logger = logging.getLogger(__name__)


@dataclass
class HarnessSummary:
    """Summary of a single batch."""

    total: int = 0
    passed: int = 0
    failed: int = 0
    breaches: int = 0
    ceilings: int = 0
    unsatisfiable: int = 0
    failing_seeds: list[int] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.failed == 0 and self.breaches == 0

    def __str__(self) -> str:
        parts = [
            f"Harness Summary: total={self.total}",
            f"passed={self.passed}",
            f"failed={self.failed}",
            f"breaches={self.breaches}",
            f"ceilings={self.ceilings}",
            f"unsat={self.unsatisfiable}",
        ]
        if self.failing_seeds:
            parts.append(f"FAILING={','.join(str(s) for s in self.failing_seeds)}")
        return ", ".join(parts)


@dataclass(frozen=True)
class _Job:
    seed: int
    variables: int
    clauses: int
    harness_ceiling: Optional[int]
    sat_ceiling: Optional[int]


def _evaluate(job: _Job) -> tuple[PlanarCnf, HarnessVerdict]:
    phi = random_planar_cnf(job.variables, job.clauses, seed=job.seed)
    verdict = equivalence_harness(
        phi, ceiling=job.harness_ceiling, sat_ceiling=job.sat_ceiling
    )
    return phi, verdict


class HarnessRunner:
    """Runs seeded formulas through the equivalence harness and records every verdict."""

    def __init__(self, config: Config, ledger: Optional[RunLedger] = None):
        self.config = config
        self.ledger = ledger if ledger is not None else RunLedger(config.ledger_path)

    def run(self, count: int, variables: int, clauses: int) -> HarnessSummary:
        if count < 0:
            raise PreconditionError(f"instance count must be non-negative, got {count}")
        logger.info(
            f"Starting harness batch of {count} formulas ({variables} variables, {clauses} clauses)",
            extra={"command": "harness", "seed": self.config.seed},
        )
        jobs = [
            _Job(
                seed=self.config.seed + i,
                variables=variables,
                clauses=clauses,
                harness_ceiling=self.config.harness_ceiling,
                sat_ceiling=self.config.sat_ceiling,
            )
            for i in range(count)
        ]
        if self.config.threads > 1 and len(jobs) > 1:
            with ProcessPoolExecutor(max_workers=self.config.threads) as pool:
                # map keeps submission order
                results = list(pool.map(_evaluate, jobs))
        else:
            results = [_evaluate(job) for job in jobs]

        summary = HarnessSummary()
        for job, (phi, verdict) in zip(jobs, results):
            self._process(job, phi, verdict, summary)

        self.ledger.record_run(
            total=summary.total,
            passed=summary.passed,
            failed=summary.failed,
            breaches=summary.breaches,
            ceilings=summary.ceilings,
        )
        logger.info(str(summary))
        return summary

    def _process(self, job: _Job, phi: PlanarCnf, verdict: HarnessVerdict, summary: HarnessSummary) -> None:
        summary.total += 1
        log_extra = {"seed": job.seed, "status": verdict.status.value}
        self.ledger.record_verdict(job.seed, phi.variables, len(phi.clauses), verdict)
        if verdict.satisfiable is False:
            summary.unsatisfiable += 1

        if verdict.status is HarnessStatus.PASS:
            summary.passed += 1
            logger.debug(f"seed {job.seed}: pass (satisfiable={verdict.satisfiable})", extra=log_extra)
        elif verdict.status is HarnessStatus.CEILING:
            summary.ceilings += 1
            logger.warning(f"seed {job.seed}: skipped, {verdict.reason}", extra=log_extra)
        elif verdict.status is HarnessStatus.BREACH:
            summary.breaches += 1
            summary.failing_seeds.append(job.seed)
            logger.error(f"seed {job.seed}: reduction breach: {verdict.reason}", extra=log_extra)
        else:
            summary.failed += 1
            summary.failing_seeds.append(job.seed)
            logger.error(f"seed {job.seed}: FAIL: {verdict.reason}", extra=log_extra)

    def close(self) -> None:
        self.ledger.close()
