"""
Reporting module for medium-parameter tables (text, CSV, LaTeX).
"""

from .medium_report_generator import MediumReportGenerator

__all__ = ['MediumReportGenerator']
