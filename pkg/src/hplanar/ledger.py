"""Ledger of harness verdicts and batch runs."""

import logging
import sqlite3
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional

from .hardness import HarnessStatus, HarnessVerdict

logger = logging.getLogger(__name__)


@dataclass
class VerdictRecord:
    """One stored harness verdict."""

    seed: int
    variables: int
    clauses: int
    satisfiable: Optional[bool]
    modulator_found: Optional[bool]
    status: HarnessStatus
    reason: str
    checked_at: Optional[datetime] = None


def _flag(value: Optional[bool]) -> Optional[int]:
    return None if value is None else int(value)


def _unflag(value: Optional[int]) -> Optional[bool]:
    return None if value is None else bool(value)


class RunLedger:
    """SQLite-based ledger."""

    def __init__(self, db_path: str):
        self.db_path = db_path
        self._conn: Optional[sqlite3.Connection] = None
        self._init_db()

    def _init_db(self) -> None:
        """Initialize database schema."""
        if self.db_path != ":memory:":
            Path(self.db_path).parent.mkdir(parents=True, exist_ok=True)

        self._conn = sqlite3.connect(self.db_path)
        self._conn.row_factory = sqlite3.Row

        self._conn.execute("""
            CREATE TABLE IF NOT EXISTS harness_verdicts (
                id INTEGER PRIMARY KEY AUTOINCREMENT,
                seed INTEGER,
                variables INTEGER,
                clauses INTEGER,
                satisfiable INTEGER,
                modulator_found INTEGER,
                status TEXT,
                reason TEXT,
                checked_at TEXT
            )
        """)

        self._conn.execute("""
            CREATE TABLE IF NOT EXISTS run_history (
                id INTEGER PRIMARY KEY AUTOINCREMENT,
                run_at TEXT,
                total INTEGER,
                passed INTEGER,
                failed INTEGER,
                breaches INTEGER,
                ceilings INTEGER
            )
        """)

        self._conn.commit()
        logger.debug(f"Ledger initialized at {self.db_path}")

    @property
    def conn(self) -> sqlite3.Connection:
        if self._conn is None:
            raise RuntimeError("ledger is closed")
        return self._conn

    def record_verdict(self, seed: int, variables: int, clauses: int, verdict: HarnessVerdict) -> None:
        now = datetime.now(timezone.utc).isoformat()
        self.conn.execute("""
            INSERT INTO harness_verdicts
            (seed, variables, clauses, satisfiable, modulator_found, status, reason, checked_at)
            VALUES (?, ?, ?, ?, ?, ?, ?, ?)
        """, (
            seed,
            variables,
            clauses,
            _flag(verdict.satisfiable),
            _flag(verdict.modulator_found),
            verdict.status.value,
            verdict.reason,
            now,
        ))
        self.conn.commit()

    def record_run(self, total: int, passed: int, failed: int, breaches: int, ceilings: int) -> None:
        """Record run statistics."""
        now = datetime.now(timezone.utc).isoformat()
        self.conn.execute("""
            INSERT INTO run_history (run_at, total, passed, failed, breaches, ceilings)
            VALUES (?, ?, ?, ?, ?, ?)
        """, (now, total, passed, failed, breaches, ceilings))
        self.conn.commit()

    def _records(self, query: str, params: tuple = ()) -> list[VerdictRecord]:
        cursor = self.conn.execute(query, params)
        return [
            VerdictRecord(
                seed=row["seed"],
                variables=row["variables"],
                clauses=row["clauses"],
                satisfiable=_unflag(row["satisfiable"]),
                modulator_found=_unflag(row["modulator_found"]),
                status=HarnessStatus(row["status"]),
                reason=row["reason"] or "",
                checked_at=datetime.fromisoformat(row["checked_at"]) if row["checked_at"] else None,
            )
            for row in cursor.fetchall()
        ]

    def get_verdicts(self) -> list[VerdictRecord]:
        return self._records("SELECT * FROM harness_verdicts ORDER BY id")

    def get_failures(self) -> list[VerdictRecord]:
        """Verdicts other than pass, oldest first."""
        return self._records(
            "SELECT * FROM harness_verdicts WHERE status != ? ORDER BY id",
            (HarnessStatus.PASS.value,),
        )

    def run_count(self) -> int:
        return self.conn.execute("SELECT COUNT(*) FROM run_history").fetchone()[0]

    def close(self) -> None:
        """Close database connection."""
        if self._conn:
            self._conn.close()
            self._conn = None
