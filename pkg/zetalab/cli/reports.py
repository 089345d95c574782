import hashlib
import json
import logging
import math
import platform
import sys
from pathlib import Path
from typing import Any, Dict, Iterable, Optional

import numpy as np
import pandas as pd
import pydantic
import scipy

from zetalab import __version__
from zetalab.core.config import RunConfig
from zetalab.core.errors import ZetaLabError
from zetalab.models.run import RunManifest

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.15g"


def _number(v: float) -> Optional[float]:
    if not math.isfinite(v):
        return None
    return float(f"{v:.15g}")


def to_jsonable(obj: Any) -> Any:
    """Plain JSON data: floats at 15 significant digits, complex as {"re", "im"}"""
    if isinstance(obj, pydantic.BaseModel):
        return {key: to_jsonable(getattr(obj, key)) for key in type(obj).model_fields}
    if isinstance(obj, pd.DataFrame):
        return [to_jsonable(row) for row in obj.to_dict(orient="records")]
    if isinstance(obj, dict):
        return {str(key): to_jsonable(value) for key, value in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _number(float(obj))
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": _number(obj.real), "im": _number(obj.imag)}
    return obj


def render(report: Any, fmt: str) -> str:
    """Serialize a report; DataFrames go through pandas, everything else through JSON"""
    if fmt == "csv":
        frame = report if isinstance(report, pd.DataFrame) else pd.json_normalize(to_jsonable(report))
        return frame.to_csv(index=False, float_format=FLOAT_FORMAT)
    if fmt == "json":
        return json.dumps(to_jsonable(report), indent=2) + "\n"
    raise ZetaLabError(f"Unknown output format: {fmt}")


def emit_report(report: Any, fmt: str, path: str = "-") -> Optional[Path]:
    """Write the report to path ('-' is stdout); returns the file written, if any"""
    text = render(report, fmt)
    if path == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return None
    target = Path(path)
    try:
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(text, encoding="utf-8")
    except OSError as e:
        logger.error(f"Failed to write report to {target}: {e}")
        raise ZetaLabError(f"Cannot write report to {target}: {e.strerror}")
    logger.info(f"Report written to {target}")
    return target


def file_checksum(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def library_versions() -> Dict[str, str]:
    return {
        "zetalab": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "pandas": pd.__version__,
        "pydantic": pydantic.VERSION,
    }


def build_manifest(argv: Iterable[str], config: RunConfig, files: Iterable[Path],
                   wall_time: float) -> RunManifest:
    return RunManifest(
        command_line=" ".join(["zetalab", *argv]),
        config=config.model_dump(),
        versions=library_versions(),
        wall_time=wall_time,
        checksums={str(p.name): file_checksum(p) for p in sorted(files)},
    )


def write_manifest(manifest: RunManifest, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(manifest.model_dump(), indent=2) + "\n", encoding="utf-8")
    logger.debug(f"Run manifest written to {path}")
    return path
