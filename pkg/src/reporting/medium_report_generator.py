"""
Medium Parameter Report Generator
Tabulates cloak medium parameters as text, CSV or a LaTeX table.
"""

from pathlib import Path
from typing import Any, Dict, Iterable, Optional

import jinja2
import pandas as pd

from ..part_1_abstract_tensor_algebra.tensor_expression_renderer import render_text
from ..part_2_component_calculation.component_scalars import rational_to_expression

COLUMNS = ['geometry', 'component', 'expression', 'value-at-sample']
GREEK_COMPONENTS = {'phi': '\\varphi', 'theta': '\\theta'}


def latex_symbol(name: str) -> str:
    """'epsilon_phi' -> '\\varepsilon_{\\varphi}'."""
    kind, _, component = name.partition('_')
    head = '\\varepsilon' if kind == 'epsilon' else '\\mu'
    return f"{head}_{{{GREEK_COMPONENTS.get(component, component)}}}"


class MediumReportGenerator:
    """Builds and emits medium-parameter tables."""

    def __init__(self):
        """Initialize the template environment."""
        self.template_dir = Path(__file__).parent / "templates"
        self.env = jinja2.Environment(
            loader=jinja2.FileSystemLoader(str(self.template_dir)),
            autoescape=False,
            trim_blocks=True,
            lstrip_blocks=True,
        )

    @staticmethod
    def build_parameter_table(results: Iterable[Dict[str, Any]]) -> pd.DataFrame:
        """
        One row per physical parameter.

        Args:
            results: CloakAnalyzer.analyze_cloak dictionaries

        Returns:
            DataFrame with columns geometry, component, expression, value-at-sample
        """
        rows = []
        for result in results:
            medium = result['medium']
            sample = result.get('sample') or {}
            for name, value in medium.as_dict().items():
                sampled = sample.get(name)
                rows.append({
                    'geometry': medium.geometry,
                    'component': name,
                    'expression': render_text(rational_to_expression(value)),
                    'value-at-sample': '' if sampled is None else str(sampled),
                    'latex': render_text(rational_to_expression(value), 'latex'),
                    'symbol': latex_symbol(name),
                })
        return pd.DataFrame(rows, columns=COLUMNS + ['latex', 'symbol'])

    @staticmethod
    def to_text(table: pd.DataFrame) -> str:
        return table[COLUMNS].to_string(index=False)

    @staticmethod
    def to_csv(table: pd.DataFrame, output_path: Optional[str] = None) -> str:
        text = table[COLUMNS].to_csv(index=False)
        if output_path:
            Path(output_path).write_text(text, encoding='utf-8')
        return text

    def to_latex(self, table: pd.DataFrame, output_path: Optional[str] = None) -> str:
        """Render the LaTeX table through the jinja2 template."""
        template = self.env.get_template("medium_parameters.tex.j2")
        text = template.render(rows=table.to_dict('records'),
                               has_sample=bool((table['value-at-sample'] != '').any()))
        if output_path:
            Path(output_path).write_text(text, encoding='utf-8')
        return text
