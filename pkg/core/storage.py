# core/storage.py
import json
import logging
import sqlite3
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List, Optional

from utils.atomic_write import write_text_atomic
from utils.digest import payload_digest

LOGGER = logging.getLogger(__name__)

DATA_DIR = Path(__file__).parent.parent / "data"
DB_PATH = DATA_DIR / "reports.db"
REPORTS_PATH = DATA_DIR / "reports"
# bump whenever a change alters report contents; older cache entries then miss
REPORT_VERSION = 2


def init_db():
    REPORTS_PATH.mkdir(parents=True, exist_ok=True)
    conn = sqlite3.connect(DB_PATH)
    cur = conn.cursor()
    cur.execute("""
        CREATE TABLE IF NOT EXISTS reports (
            id INTEGER PRIMARY KEY AUTOINCREMENT,
            digest TEXT UNIQUE,
            command TEXT,
            created TEXT,
            path TEXT
        )
    """)
    conn.commit()
    conn.close()


def report_digest(payload: Dict[str, Any]) -> str:
    """SHA-256 of the canonical JSON of everything that determines a report."""
    return payload_digest({**payload, "report_version": REPORT_VERSION})


def save_report(command: str, digest: str, report: Dict[str, Any]) -> Path:
    init_db()
    file_path = REPORTS_PATH / f"{digest}.json"
    write_text_atomic(file_path, json.dumps(report, sort_keys=True, indent=2))

    conn = sqlite3.connect(DB_PATH)
    cur = conn.cursor()
    cur.execute("""
        INSERT INTO reports (digest, command, created, path)
        VALUES (?, ?, ?, ?)
        ON CONFLICT(digest) DO UPDATE SET command = excluded.command,
            created = excluded.created, path = excluded.path
    """, (digest, command, datetime.now().isoformat(), str(file_path)))
    conn.commit()
    conn.close()
    LOGGER.debug("cached %s report %s", command, digest[:12])
    return file_path


def load_report(digest: str) -> Optional[Dict[str, Any]]:
    """The cached report, or None on a miss (including a row whose file vanished)."""
    init_db()
    conn = sqlite3.connect(DB_PATH)
    cur = conn.cursor()
    cur.execute("SELECT path FROM reports WHERE digest = ?", (digest,))
    row = cur.fetchone()
    conn.close()
    if row is None:
        LOGGER.debug("cache miss %s", digest[:12])
        return None
    try:
        with open(row[0], "r", encoding="utf-8") as f:
            report = json.load(f)
    except FileNotFoundError:
        LOGGER.warning("report file not found: %s", row[0])
        return None
    except json.JSONDecodeError as e:
        LOGGER.warning("unreadable report %s: %s", row[0], e)
        return None
    LOGGER.debug("cache hit %s", digest[:12])
    return report


def list_reports() -> List[Dict[str, Any]]:
    init_db()
    conn = sqlite3.connect(DB_PATH)
    cur = conn.cursor()
    cur.execute("SELECT id, digest, command, created, path FROM reports ORDER BY created, id")
    rows = cur.fetchall()
    conn.close()

    reports = []
    for r in rows:
        reports.append({
            "id": r[0],
            "digest": r[1],
            "command": r[2],
            "created": datetime.fromisoformat(r[3]),
            "path": r[4],
        })
    return reports


def check_reports():
    """
    Print every cached report.
    """
    rows = list_reports()
    if not rows:
        print("No cached reports.")
        return

    for r in rows:
        print(f"ID: {r['id']}, Command: {r['command']}, Digest: {r['digest'][:12]}, Created: {r['created'].isoformat()}")
