"""
File input/output for the command-line front end.

JSON configs are validated into pydantic models, traces are written as CSV
through pandas and every command ends with a run manifest whose digest
covers the command, the bytes of every input file and the remaining flags.
"""

import hashlib
import json
from pathlib import Path
from typing import Any, TypeVar

import pandas as pd
from pydantic import BaseModel

from config.logging import get_logger
from src import __version__
from src.models.run import RunManifest
from src.utils.exceptions import ConfigurationError
from src.utils.validators import parse_model

ModelT = TypeVar("ModelT", bound=BaseModel)

logger = get_logger(__name__)


def read_bytes(path: Path) -> bytes:
    """Raw file contents; a missing file is a configuration error."""
    if not path.is_file():
        raise ConfigurationError(f"Input file not found: {path}", {"path": str(path)})
    return path.read_bytes()


def read_model(path: Path, model_cls: type[ModelT]) -> ModelT:
    """
    Load and validate a JSON file.

    Raises:
        ConfigurationError: On a missing file, malformed JSON or a schema
            violation (the message names the offending fields).
    """
    raw = read_bytes(path)
    try:
        payload = json.loads(raw)
    except json.JSONDecodeError as e:
        raise ConfigurationError(f"{path.name} is not valid JSON: {e}", {"path": str(path)}) from e
    return parse_model(model_cls, payload, source=path.name)


def compute_digest(command: str, inputs: dict[str, Path], flags: dict[str, Any]) -> str:
    """
    sha256 over the command, each input file's bytes and the flags.

    Input paths enter only through their contents, so renaming a file
    leaves the digest unchanged.
    """
    digest = hashlib.sha256()
    digest.update(command.encode())
    for label in sorted(inputs):
        digest.update(f"\0{label}\0".encode())
        digest.update(read_bytes(inputs[label]))
    digest.update(json.dumps(flags, sort_keys=True, default=str).encode())
    return digest.hexdigest()


class OutputWriter:
    """Writes command outputs into one directory and records them."""

    def __init__(self, out_dir: Path, command: str):
        self.out_dir = out_dir
        self.command = command
        self.outputs: list[str] = []
        out_dir.mkdir(parents=True, exist_ok=True)

    def _record(self, name: str) -> Path:
        path = self.out_dir / name
        if name not in self.outputs:
            self.outputs.append(name)
        return path

    def frame(self, name: str, frame: pd.DataFrame) -> Path:
        """Write a DataFrame as CSV."""
        path = self._record(name)
        frame.to_csv(path, index=False)
        logger.info("Wrote %s (%d rows)", path, len(frame))
        return path

    def model(self, name: str, model: BaseModel) -> Path:
        """Write a pydantic model as indented JSON."""
        path = self._record(name)
        path.write_text(model.model_dump_json(indent=2) + "\n")
        logger.info("Wrote %s", path)
        return path

    def data(self, name: str, payload: dict[str, Any]) -> Path:
        """Write plain JSON data with sorted keys."""
        path = self._record(name)
        path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
        logger.info("Wrote %s", path)
        return path

    def text(self, name: str, content: str) -> Path:
        """Write a text file."""
        path = self._record(name)
        path.write_text(content)
        logger.info("Wrote %s", path)
        return path

    def manifest(self, digest: str) -> RunManifest:
        """Write {command}_manifest.json listing every output written so far."""
        manifest = RunManifest(
            command=self.command,
            config_digest=digest,
            outputs=list(self.outputs),
            version=__version__,
        )
        if not manifest.verify(self.out_dir):
            raise ConfigurationError(
                "An output listed in the manifest is missing or empty",
                {"outputs": manifest.outputs},
            )
        path = self.out_dir / f"{self.command}_manifest.json"
        path.write_text(manifest.model_dump_json(indent=2) + "\n")
        logger.info("Wrote %s", path)
        return manifest
