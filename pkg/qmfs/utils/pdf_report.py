"""
PDF rendering of an N-sweep
"""

from io import BytesIO
from typing import Any, Dict, List

from reportlab.lib import colors
from reportlab.lib.enums import TA_CENTER
from reportlab.lib.pagesizes import A4
from reportlab.lib.styles import ParagraphStyle, getSampleStyleSheet
from reportlab.lib.units import inch
from reportlab.platypus import Paragraph, SimpleDocTemplate, Spacer, Table, TableStyle

from qmfs.schemas.results import ResultRecord, format_error


class SweepReportGenerator:
    """Generate a PDF table of errors against the number of sources"""

    def __init__(self):
        self.styles = getSampleStyleSheet()
        self._setup_custom_styles()

    def _setup_custom_styles(self):
        self.styles.add(ParagraphStyle(
            name='ReportTitle',
            parent=self.styles['Heading1'],
            fontSize=18,
            spaceAfter=30,
            alignment=TA_CENTER,
            textColor=colors.darkblue
        ))

        self.styles.add(ParagraphStyle(
            name='ReportHeader',
            parent=self.styles['Heading3'],
            fontSize=12,
            spaceAfter=15,
            textColor=colors.darkblue
        ))

        self.styles.add(ParagraphStyle(
            name='ReportNormal',
            parent=self.styles['Normal'],
            fontSize=10,
            spaceAfter=6
        ))

    def _problem_rows(self, config: Dict[str, Any]) -> List[List[str]]:
        surface = config.get('surface', {})
        medium = config.get('medium', {})
        return [
            ['Parameter', 'Value'],
            ['Surface', f"{surface.get('kind', '')} radii={surface.get('radii', '')}"],
            ['Medium', f"omega={medium.get('omega')} eps={medium.get('epsilon')} "
                       f"mu={medium.get('mu')} beta={medium.get('beta')}"],
            ['Mode', str(config.get('mode', ''))],
            ['Auxiliary scale', str(config.get('aux_scale', ''))],
            ['Evaluation radius', str(config.get('evaluation', {}).get('radius', ''))],
        ]

    def generate_sweep_report(self, records: List[ResultRecord]) -> BytesIO:
        buffer = BytesIO()
        doc = SimpleDocTemplate(buffer, pagesize=A4, rightMargin=72, leftMargin=72, topMargin=72, bottomMargin=18)
        story = []

        story.append(Paragraph("MFS CONVERGENCE REPORT", self.styles['ReportTitle']))
        story.append(Spacer(1, 12))

        if records:
            story.append(Paragraph("Problem", self.styles['ReportHeader']))
            problem_table = Table(self._problem_rows(records[0].config), colWidths=[1.8*inch, 4*inch])
            problem_table.setStyle(TableStyle([
                ('BACKGROUND', (0, 0), (-1, 0), colors.grey),
                ('TEXTCOLOR', (0, 0), (-1, 0), colors.whitesmoke),
                ('FONTNAME', (0, 0), (-1, 0), 'Helvetica-Bold'),
                ('BACKGROUND', (0, 1), (-1, -1), colors.beige),
                ('GRID', (0, 0), (-1, -1), 1, colors.black)
            ]))
            story.append(problem_table)
            story.append(Spacer(1, 20))

        story.append(Paragraph("Errors on the evaluation sphere", self.styles['ReportHeader']))
        story.append(Paragraph(
            "Maximum absolute componentwise difference to the exact field over the evaluation sphere.",
            self.styles['ReportNormal'],
        ))
        rows = [['N', 'Error for E', 'Error for H', 'Residual', 'Condition', 'Solver']]
        for record in records:
            rows.append([
                str(record.n),
                format_error(record.err_e),
                format_error(record.err_h),
                f"{record.residual_norm:.2e}",
                f"{record.condition_estimate:.2e}",
                record.solver_path.value,
            ])

        error_table = Table(rows, colWidths=[0.6*inch, 1.1*inch, 1.1*inch, 1*inch, 1*inch, 1.1*inch])
        error_table.setStyle(TableStyle([
            ('BACKGROUND', (0, 0), (-1, 0), colors.darkblue),
            ('TEXTCOLOR', (0, 0), (-1, 0), colors.whitesmoke),
            ('ALIGN', (0, 0), (-1, -1), 'CENTER'),
            ('FONTNAME', (0, 0), (-1, 0), 'Helvetica-Bold'),
            ('FONTSIZE', (0, 0), (-1, 0), 10),
            ('BOTTOMPADDING', (0, 0), (-1, 0), 12),
            ('BACKGROUND', (0, 1), (-1, -1), colors.lightblue),
            ('GRID', (0, 0), (-1, -1), 1, colors.black),
            ('FONTSIZE', (0, 1), (-1, -1), 9)
        ]))
        story.append(error_table)

        doc.build(story)
        buffer.seek(0)
        return buffer
