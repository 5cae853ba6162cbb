import logging
from pathlib import Path

import pandas as pd
from openpyxl import load_workbook
from openpyxl.styles import Border, Font, PatternFill, Side

from .fixtures import verification_table


class OutputGenerator:
    """Handles Excel output of covering profiles and fixture verification tables"""

    HEADER_FILL = PatternFill(start_color="DDEBF7", end_color="DDEBF7", fill_type="solid")
    FAIL_FILL = PatternFill(start_color="F8CBAD", end_color="F8CBAD", fill_type="solid")
    THIN = Side(style="thin", color="999999")

    def __init__(self, config=None):
        self.config = config or {}

    def write_output(self, sheets, output_file):
        """
        Write one worksheet per DataFrame and format the result

        Args:
            sheets (dict): Worksheet name -> DataFrame, written in insertion order
            output_file (str or Path): Target .xlsx path

        Returns:
            str: The written path
        """
        output_path = Path(output_file)
        output_path.parent.mkdir(parents=True, exist_ok=True)
        if not sheets:
            logging.warning(f"No tables to write to {output_path}")
            return None

        with pd.ExcelWriter(output_path, engine="openpyxl") as writer:
            for name, frame in sheets.items():
                frame.to_excel(writer, sheet_name=name[:31], index=False)

        wb = load_workbook(output_path)
        for ws in wb.worksheets:
            self._format_sheet(ws)
        wb.save(output_path)
        logging.info(f"Successfully wrote {len(sheets)} worksheet(s) to {output_path}")
        return str(output_path)

    def _format_sheet(self, ws):
        """Header fill, thin borders, widths from content and red rows where ok is False"""
        border = Border(left=self.THIN, right=self.THIN, top=self.THIN, bottom=self.THIN)
        headers = [cell.value for cell in ws[1]]
        for cell in ws[1]:
            cell.fill = self.HEADER_FILL
            cell.font = Font(bold=True)
        ok_col = headers.index("ok") + 1 if "ok" in headers else None
        for row in ws.iter_rows(min_row=1, max_row=ws.max_row):
            for cell in row:
                cell.border = border
        if ok_col is not None:
            for row_idx in range(2, ws.max_row + 1):
                if ws.cell(row=row_idx, column=ok_col).value is False:
                    for col_idx in range(1, ws.max_column + 1):
                        ws.cell(row=row_idx, column=col_idx).fill = self.FAIL_FILL
        for column in ws.columns:
            width = max(len(str(cell.value)) if cell.value is not None else 0 for cell in column)
            ws.column_dimensions[column[0].column_letter].width = min(max(width + 2, 8), 60)

    def write_covering_profile(self, profile, output_file, min_oscillation=None):
        sheets = {"covering": profile.to_frame()}
        if min_oscillation is not None:
            sheets["min_oscillation"] = pd.DataFrame([min_oscillation])
        return self.write_output(sheets, output_file)

    def write_fixture(self, fixture, results, output_file):
        table = verification_table(results)
        sheets = {
            "claims": table,
            "distances": pd.DataFrame(fixture.space.dist, columns=[str(l) for l in fixture.space.labels]),
        }
        return self.write_output(sheets, output_file)
