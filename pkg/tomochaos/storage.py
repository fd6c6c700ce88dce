"""
Result Storage
Writes per-experiment CSV tables and the JSON run summary
"""
import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import jsonschema
import pandas as pd

from .state import RunSummary

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.10g"


class ResultStore:
    """Manages the output directory of one run"""

    def __init__(self, out_dir: Union[str, Path]):
        self.out_dir = Path(out_dir)
        self.schema_path = Path(__file__).parent.parent / "schema.json"
        self._schema = None
        self.files: List[str] = []

    def prepare(self) -> None:
        """Create the output directory; OSError propagates"""
        self.out_dir.mkdir(parents=True, exist_ok=True)

    def get_schema(self) -> Dict[str, Any]:
        """Load the documented summary schema"""
        if self._schema is None:
            with open(self.schema_path, "r", encoding="utf-8") as f:
                self._schema = json.load(f)
        return self._schema

    def write_csv(self, name: str, frame: pd.DataFrame) -> Path:
        """
        Write a table with a header row and a fixed float format

        Returns:
            Path of the written file
        """
        self.prepare()
        path = self.out_dir / name
        frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
        self.files.append(name)
        logger.info("Wrote %s (%d rows)", path, len(frame))
        return path

    def write_summary(self, summary: RunSummary, name: str = "summary.json") -> Path:
        """Serialise the summary with sorted keys, after checking it against the schema"""
        self.prepare()
        payload = summary.model_dump(mode="json", by_alias=True)
        self.validate_summary(payload)
        path = self.out_dir / name
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            json.dump(payload, f, indent=2, sort_keys=True)
            f.write("\n")
        logger.info("Wrote %s", path)
        return path

    def validate_summary(self, payload: Dict[str, Any]) -> None:
        """
        Check a summary payload against schema.json

        Raises:
            ValueError: naming the offending path when the payload does not match
        """
        try:
            jsonschema.validate(instance=payload, schema=self.get_schema())
        except jsonschema.ValidationError as e:
            location = "/".join(str(part) for part in e.absolute_path) or "<root>"
            raise ValueError(f"Summary does not match schema at {location}: {e.message}") from e

    def read_summary(self, name: str = "summary.json") -> Optional[Dict[str, Any]]:
        """Load a previously written summary, None if absent"""
        path = self.out_dir / name
        if not path.exists():
            return None
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
