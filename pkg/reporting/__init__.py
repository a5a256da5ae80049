"""Report tables and CSV/JSON exports."""

from .report_generator import ReportGenerator, emit_report, format_cell, format_summary

__all__ = ['ReportGenerator', 'emit_report', 'format_cell', 'format_summary']
