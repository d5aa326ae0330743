# raagtool/database.py

import json
import sqlite3
import sys
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, Optional

from config import CACHE_PATH

# Results are deterministic functions of (command, config), so entries never expire.


def _get_db(path: Path = None) -> sqlite3.Connection:
    """Get database connection"""
    path = Path(path or CACHE_PATH)
    path.parent.mkdir(parents=True, exist_ok=True)
    return sqlite3.connect(path)


def canonical_key(config: Dict[str, Any]) -> str:
    """Canonical JSON of a resolved config (sorted keys, no whitespace)."""
    return json.dumps(config, sort_keys=True, separators=(",", ":"))


def init_database(path: Path = None):
    """Create the results table if it does not exist"""
    conn = _get_db(path)
    conn.execute("""
        CREATE TABLE IF NOT EXISTS results (
            command TEXT NOT NULL,
            config TEXT NOT NULL,
            version TEXT NOT NULL,
            data TEXT NOT NULL,
            timestamp TEXT NOT NULL,
            PRIMARY KEY (command, config, version)
        )
    """)
    conn.commit()
    conn.close()
    print(f"✓ Result cache ready: {path or CACHE_PATH}", file=sys.stderr)


def get_cached_result(command: str, config: Dict[str, Any], version: str, path: Path = None) -> Optional[dict]:
    """
    Look up a stored result.

    Args:
        command: CLI subcommand name (e.g., 'limit-check')
        config: fully resolved run configuration
        version: package version the result was produced with

    Returns:
        The stored report body, or None when absent or unreadable
    """
    try:
        conn = _get_db(path)
        row = conn.execute(
            "SELECT data FROM results WHERE command = ? AND config = ? AND version = ?",
            (command, canonical_key(config), version),
        ).fetchone()
        conn.close()
        return json.loads(row[0]) if row else None
    except Exception as e:
        print(f"⚠ Cache read error: {e}", file=sys.stderr)
        return None


def cache_result(command: str, config: Dict[str, Any], version: str, data: dict, path: Path = None):
    """Store a report body under (command, canonical config, version)."""
    try:
        conn = _get_db(path)
        conn.execute(
            "INSERT OR REPLACE INTO results (command, config, version, data, timestamp) VALUES (?, ?, ?, ?, ?)",
            (command, canonical_key(config), version, json.dumps(data), datetime.now().isoformat()),
        )
        conn.commit()
        conn.close()
    except Exception as e:
        print(f"⚠ Cache write error: {e}", file=sys.stderr)


def clear_cache(command: str = None, path: Path = None):
    """Clear one command's entries, or the whole cache when no command is given."""
    try:
        conn = _get_db(path)
        if command:
            conn.execute("DELETE FROM results WHERE command = ?", (command,))
            print(f"✓ Cleared cache for: {command}", file=sys.stderr)
        else:
            conn.execute("DELETE FROM results")
            print("✓ Cleared entire cache", file=sys.stderr)
        conn.commit()
        conn.close()
    except Exception as e:
        print(f"⚠ Cache clear error: {e}", file=sys.stderr)


def get_cache_stats(path: Path = None) -> Optional[dict]:
    """Entry counts, total and per command"""
    try:
        conn = _get_db(path)
        total = conn.execute("SELECT COUNT(*) FROM results").fetchone()[0]
        by_command = conn.execute("SELECT command, COUNT(*) FROM results GROUP BY command").fetchall()
        conn.close()
        return {"total_entries": total, "by_command": dict(by_command)}
    except Exception as e:
        print(f"⚠ Cache stats error: {e}", file=sys.stderr)
        return None


if __name__ == "__main__":
    print("=" * 60)
    print("RESULT CACHE SMOKE TEST")
    print("=" * 60)
    init_database()
    cache_result("spectral", {"u": 1.0, "T": 3.0}, "test", {"results": [{"value": 1.0}]})
    print(get_cached_result("spectral", {"T": 3.0, "u": 1.0}, "test"))
    print(get_cache_stats())
    clear_cache("spectral")
