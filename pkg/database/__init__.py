"""Trial and cell-result store."""

from .db_manager import DatabaseManager

__all__ = ['DatabaseManager']
