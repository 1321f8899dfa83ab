# src/reporters/artifact_writer.py
import csv
import json
import logging
import math
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence

from ..utils.provenance import csv_header_lines

logger = logging.getLogger(__name__)


class ArtifactWriter:
    """Writes CSV/JSON artifacts for one run and can roll them back."""

    def __init__(self, out_dir: Path, header: Dict[str, Any]):
        self.out_dir = Path(out_dir)
        self.header = header
        self.written: List[Path] = []
        self.out_dir.mkdir(parents=True, exist_ok=True)

    def _track(self, name: str) -> Path:
        path = self.out_dir / name
        self.written.append(path)
        return path

    def write_csv(self, name: str, columns: Sequence[str], rows: Iterable[Sequence[Any]],
                  notes: Optional[Dict[str, Any]] = None) -> Path:
        path = self._track(name)
        with open(path, "w", encoding="utf-8", newline="") as f:
            for line in csv_header_lines(self.header):
                f.write(line + "\n")
            for key, value in (notes or {}).items():
                f.write(f"# {key}={value!r}\n")
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(columns)
            for row in rows:
                for value in row:
                    if isinstance(value, float) and not math.isfinite(value):
                        raise ValueError(f"non-finite value in {name}: {row!r}")
                writer.writerow([repr(v) if isinstance(v, float) else v for v in row])
        logger.info("wrote %s", path)
        return path

    def write_json(self, name: str, payload: Dict[str, Any]) -> Path:
        path = self._track(name)
        document = {"provenance": self.header, **payload}
        path.write_text(json.dumps(document, indent=2, allow_nan=False) + "\n", encoding="utf-8")
        logger.info("wrote %s", path)
        return path

    def track(self, path: Path) -> Path:
        """Register a file produced elsewhere (figures) for rollback."""
        self.written.append(Path(path))
        return Path(path)

    def rollback(self):
        for path in self.written:
            if path.exists():
                path.unlink()
                logger.info("removed partial output %s", path)
        self.written.clear()
