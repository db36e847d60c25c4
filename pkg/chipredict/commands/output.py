"""
ChiPredict - Result output.
JSON records, CSV tables and run manifests.
"""

import hashlib
import json
import logging
import sys
from datetime import datetime, timezone
from typing import Any, Dict, Optional

import pandas as pd

from chipredict import __version__
from chipredict.models.results import RunManifest

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"


def print_json(record: Dict[str, Any], stream=None):
    stream = stream or sys.stdout
    stream.write(json.dumps(record, indent=2) + "\n")


def write_table(table: pd.DataFrame, path: Optional[str] = None):
    """CSV with 17 significant digits and LF line endings, to path or stdout."""
    if path:
        with open(path, "w", encoding="utf-8", newline="") as f:
            table.to_csv(f, float_format=FLOAT_FORMAT, lineterminator="\n", index=False)
        logger.info(f"Wrote {len(table)} rows to {path}")
    else:
        table.to_csv(sys.stdout, float_format=FLOAT_FORMAT, lineterminator="\n", index=False)


def config_digest(flags: Dict[str, Any], settings: Dict[str, Any]) -> str:
    """sha256 of the canonical JSON of the resolved flags and settings."""
    canonical = json.dumps({"flags": flags, "settings": settings}, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def build_manifest(command: str, flags: Dict[str, Any], settings: Dict[str, Any], seed: int) -> RunManifest:
    return RunManifest(
        tool_version=__version__,
        seed=seed,
        timestamp=datetime.now(timezone.utc).isoformat(),
        config_digest=config_digest(flags, settings),
        command=command,
        settings=settings,
    )


def write_manifest(manifest: RunManifest, path: str):
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(manifest.model_dump_json(indent=2) + "\n")
    logger.info(f"Wrote manifest to {path}")
