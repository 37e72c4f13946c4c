"""Run ledger: every CLI invocation recorded in SQLite under the output directory."""
import json
import logging
import sqlite3
from datetime import datetime
from pathlib import Path
from typing import Optional

logger = logging.getLogger(__name__)

DATA_DIR = Path("out")
DB_PATH = DATA_DIR / "runs.db"


def configure(output_dir: Path) -> Path:
    """Point the ledger at ``<output_dir>/runs.db``."""
    global DATA_DIR, DB_PATH
    DATA_DIR = Path(output_dir)
    DB_PATH = DATA_DIR / "runs.db"
    return DB_PATH


def get_connection() -> sqlite3.Connection:
    """Get a database connection with row factory."""
    DATA_DIR.mkdir(parents=True, exist_ok=True)
    conn = sqlite3.connect(DB_PATH, timeout=10)
    conn.row_factory = sqlite3.Row
    return conn


def init_db() -> None:
    """Create the runs table if needed."""
    DATA_DIR.mkdir(parents=True, exist_ok=True)
    with get_connection() as conn:
        conn.execute("""
            CREATE TABLE IF NOT EXISTS runs (
                id INTEGER PRIMARY KEY AUTOINCREMENT,
                command TEXT NOT NULL,
                model TEXT NOT NULL,
                exit_code INTEGER NOT NULL,
                summary TEXT,
                created_at TEXT DEFAULT CURRENT_TIMESTAMP
            )
        """)
        conn.execute("CREATE INDEX IF NOT EXISTS idx_runs_command ON runs(command)")
        conn.commit()


# ============== Run Operations ==============

def record_run(command: str, model: str, exit_code: int, summary: Optional[dict] = None) -> Optional[int]:
    """Insert one run; ledger failures are logged, never raised."""
    try:
        init_db()
        with get_connection() as conn:
            cursor = conn.execute("""
                INSERT INTO runs (command, model, exit_code, summary, created_at)
                VALUES (?, ?, ?, ?, ?)
            """, (command, model, int(exit_code), json.dumps(summary or {}, default=str),
                  datetime.now().isoformat()))
            conn.commit()
            return cursor.lastrowid
    except (sqlite3.Error, OSError) as e:
        logger.warning(f"Run ledger write failed: {e}")
        return None


def _row_to_dict(row: sqlite3.Row) -> dict:
    run = dict(row)
    try:
        run["summary"] = json.loads(run.get("summary") or "{}")
    except json.JSONDecodeError:
        pass
    return run


def get_runs(limit: int = 100, command: Optional[str] = None) -> list:
    """Most recent runs first, optionally for one command."""
    if not DB_PATH.exists():
        return []
    try:
        with get_connection() as conn:
            if command:
                rows = conn.execute(
                    "SELECT * FROM runs WHERE command = ? ORDER BY id DESC LIMIT ?", (command, limit)
                ).fetchall()
            else:
                rows = conn.execute("SELECT * FROM runs ORDER BY id DESC LIMIT ?", (limit,)).fetchall()
            return [_row_to_dict(row) for row in rows]
    except sqlite3.Error as e:
        logger.warning(f"Run ledger read failed: {e}")
        return []


def get_run(run_id: int) -> Optional[dict]:
    if not DB_PATH.exists():
        return None
    with get_connection() as conn:
        row = conn.execute("SELECT * FROM runs WHERE id = ?", (run_id,)).fetchone()
        return _row_to_dict(row) if row else None


def get_run_stats() -> dict:
    """Run counts per command and per exit code."""
    stats = {"total": 0, "by_command": {}, "by_exit_code": {}}
    if not DB_PATH.exists():
        return stats
    try:
        with get_connection() as conn:
            for row in conn.execute("SELECT command, COUNT(*) AS n FROM runs GROUP BY command"):
                stats["by_command"][row["command"]] = row["n"]
            for row in conn.execute("SELECT exit_code, COUNT(*) AS n FROM runs GROUP BY exit_code"):
                stats["by_exit_code"][str(row["exit_code"])] = row["n"]
        stats["total"] = sum(stats["by_command"].values())
    except sqlite3.Error as e:
        logger.warning(f"Run ledger stats failed: {e}")
    return stats

