import hashlib
import json
from typing import Any, Dict

TOOL_NAME = "qeosim"
TOOL_VERSION = "0.1.0"


def canonical_json(document: Any) -> str:
    return json.dumps(document, sort_keys=True, separators=(",", ":"), default=str)


def config_hash(resolved: Dict[str, Any]) -> str:
    return hashlib.sha256(canonical_json(resolved).encode("utf-8")).hexdigest()


def provenance(resolved: Dict[str, Any], subcommand: str) -> Dict[str, Any]:
    """Run header: no timestamps, so identical inputs give identical bytes."""
    return {
        "tool": TOOL_NAME,
        "version": TOOL_VERSION,
        "subcommand": subcommand,
        "config_sha256": config_hash(resolved),
        "resolved": resolved,
    }


def csv_header_lines(header: Dict[str, Any]) -> list:
    lines = [
        f"# {header['tool']} {header['version']} {header['subcommand']}",
        f"# config_sha256={header['config_sha256']}",
    ]
    for section, values in sorted(header["resolved"].items()):
        lines.append(f"# {section}={canonical_json(values)}")
    return lines
