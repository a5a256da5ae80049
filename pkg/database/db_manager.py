import json
import logging
import os
import sqlite3
import threading
from typing import Dict, List, Optional

logger = logging.getLogger(__name__)


class DatabaseManager:
    """
    SQLite store for TPE trials and experiment cells. Writes go through one
    lock, so suggest/record cycles of concurrent searches stay serialised.
    """

    def __init__(self, db_path: str = "runs.db"):
        self.db_path = db_path
        self.connection = None
        self._lock = threading.Lock()
        self._initialize_database()

    def _initialize_database(self):
        schema_path = os.path.join(os.path.dirname(__file__), 'schema.sql')
        try:
            self.connection = sqlite3.connect(self.db_path, check_same_thread=False)
            self.connection.row_factory = sqlite3.Row

            with open(schema_path, 'r') as f:
                schema_sql = f.read()

            self.connection.executescript(schema_sql)
            self.connection.commit()
            logger.debug("Database initialized at: %s", self.db_path)

        except sqlite3.Error as e:
            logger.error("Database initialization error: %s", e)
            raise
        except FileNotFoundError:
            logger.error("Schema file not found at: %s", schema_path)
            raise

    def _write(self, sql: str, params: tuple) -> int:
        with self._lock:
            try:
                cursor = self.connection.cursor()
                cursor.execute(sql, params)
                self.connection.commit()
                return cursor.lastrowid
            except sqlite3.Error as e:
                logger.error("Database write failed: %s", e)
                raise

    def record_trial(self, study: str, trial) -> int:
        """Store one algorithms.tpe.Trial; re-recording the same trial id replaces it."""
        return self._write("""
            INSERT OR REPLACE INTO trials (study, trial_id, config, val_mse, status, error)
            VALUES (?, ?, ?, ?, ?, ?)
        """, (
            study,
            trial.trial_id,
            json.dumps(trial.config, sort_keys=True),
            trial.loss if trial.completed else None,
            trial.status,
            trial.error,
        ))

    def record_cell(self, cell) -> int:
        """Store one experiments.CellResult."""
        return self._write("""
            INSERT OR REPLACE INTO cells (foreign_id, window_id, scaling, variant, status,
                                          hit_ratio, mse, best_config, error)
            VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?)
        """, (
            cell.foreign_id,
            cell.window_id,
            cell.scaling,
            cell.variant,
            cell.status,
            cell.hit_ratio,
            cell.mse,
            None if cell.best_config is None else json.dumps(cell.best_config, sort_keys=True),
            cell.error,
        ))

    def get_trials(self, study: str) -> List[Dict]:
        try:
            cursor = self.connection.cursor()
            cursor.execute("SELECT * FROM trials WHERE study = ? ORDER BY trial_id", (study,))
            rows = [dict(row) for row in cursor.fetchall()]
            for row in rows:
                row['config'] = json.loads(row['config'])
            return rows

        except sqlite3.Error as e:
            logger.error("Error retrieving trials: %s", e)
            return []

    def get_studies(self) -> List[str]:
        try:
            cursor = self.connection.cursor()
            cursor.execute("SELECT DISTINCT study FROM trials ORDER BY study")
            return [row['study'] for row in cursor.fetchall()]

        except sqlite3.Error as e:
            logger.error("Error retrieving studies: %s", e)
            return []

    def get_cells(self, foreign_id: Optional[str] = None, status: Optional[str] = None) -> List[Dict]:
        try:
            cursor = self.connection.cursor()
            query = "SELECT * FROM cells WHERE 1=1"
            params = []

            if foreign_id:
                query += " AND foreign_id = ?"
                params.append(foreign_id)

            if status:
                query += " AND status = ?"
                params.append(status)

            query += " ORDER BY id"

            cursor.execute(query, params)
            return [dict(row) for row in cursor.fetchall()]

        except sqlite3.Error as e:
            logger.error("Error retrieving cells: %s", e)
            return []

    def get_statistics(self) -> Dict:
        try:
            cursor = self.connection.cursor()

            cursor.execute("SELECT status, COUNT(*) AS n FROM trials GROUP BY status")
            trials = {row['status']: row['n'] for row in cursor.fetchall()}

            cursor.execute("SELECT status, COUNT(*) AS n FROM cells GROUP BY status")
            cells = {row['status']: row['n'] for row in cursor.fetchall()}

            cursor.execute("""
                SELECT variant, AVG(hit_ratio) AS hit_ratio
                FROM cells
                WHERE status = 'ok'
                GROUP BY variant
                ORDER BY variant
            """)
            by_variant = {row['variant']: row['hit_ratio'] for row in cursor.fetchall()}

            return {
                'trials': trials,
                'cells': cells,
                'mean_hit_ratio_by_variant': by_variant,
            }

        except sqlite3.Error as e:
            logger.error("Error getting statistics: %s", e)
            return {}

    def close(self):
        """Close database connection."""
        if self.connection:
            self.connection.close()
            self.connection = None
            logger.debug("Database connection closed")

    def __enter__(self):
        """Context manager entry."""
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        """Context manager exit."""
        self.close()
