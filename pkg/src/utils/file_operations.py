"""
File operations utilities.
Handles output folders and the CSV files written by the CLI.
"""
import csv
import logging
from pathlib import Path

logger = logging.getLogger(__name__)

ALLOCATION_FIELDS = ["ue_id", "cell", "sector", "r_radar", "r_comm", "r_aggregate", "utility"]
TRACE_FIELDS = ["stage", "iteration", "group", "aggregate_bid", "price", "budget"]
CURVE_FIELDS = ["application", "rate", "utility"]


def format_number(value):
    """Fixed 6-decimal rendering used in every CSV; -0 is written as 0."""
    text = f"{float(value):.6f}"
    return "0.000000" if text == "-0.000000" else text


class FileOperations:
    """Utility class for file operations."""

    @staticmethod
    def ensure_directory_exists(directory_path):
        """
        Ensure a directory exists, create if it doesn't.

        Args:
            directory_path: Path to the directory

        Returns:
            Path: Path object for the directory
        """
        directory_path = Path(directory_path)
        directory_path.mkdir(parents=True, exist_ok=True)
        return directory_path

    @staticmethod
    def write_csv(file_path, fieldnames, rows):
        """
        Write rows to a CSV file with a header and Unix line endings.

        Args:
            file_path: Destination file
            fieldnames: Column names, in order
            rows: Iterable of dicts keyed by column name

        Returns:
            Path: Path to the written file
        """
        file_path = Path(file_path)
        FileOperations.ensure_directory_exists(file_path.parent)

        with open(file_path, "w", newline="", encoding="utf-8") as csvfile:
            writer = csv.DictWriter(csvfile, fieldnames=fieldnames, lineterminator="\n")
            writer.writeheader()
            count = 0
            for row in rows:
                writer.writerow(row)
                count += 1

        logger.info(f"Success: Wrote {count} rows to {file_path}")
        return file_path

    @staticmethod
    def allocation_rows(scenario, result, utility_values):
        """One row per UE: rates of both stages and the utility at the aggregate rate."""
        for ue, radar, comm, total, value in zip(
            scenario.ues, result.r_radar, result.r_comm, result.r_aggregate, utility_values
        ):
            yield {
                "ue_id": ue.id,
                "cell": ue.cell,
                "sector": ue.sector_index,
                "r_radar": format_number(radar),
                "r_comm": format_number(comm),
                "r_aggregate": format_number(total),
                "utility": format_number(value),
            }

    @staticmethod
    def trace_rows(*traces):
        """One row per (stage, iteration, group)."""
        for trace in traces:
            for snapshot in trace.snapshots:
                for group, (w, p, r) in enumerate(
                    zip(snapshot.aggregate_bids, snapshot.prices, snapshot.budgets), start=1
                ):
                    yield {
                        "stage": trace.stage.value,
                        "iteration": snapshot.iteration,
                        "group": group,
                        "aggregate_bid": format_number(w),
                        "price": format_number(p),
                        "budget": format_number(r),
                    }

    @staticmethod
    def get_file_info(file_path):
        """
        Get basic information about a file.

        Args:
            file_path: Path to the file

        Returns:
            dict: name, size and absolute path, or None if the file does not exist
        """
        file_path = Path(file_path)

        if not file_path.exists():
            return None

        stat = file_path.stat()

        return {"name": file_path.name, "size_bytes": stat.st_size, "absolute_path": file_path.absolute()}
