"""
Report Writer
Assembles the schema-versioned JSON report and serializes every float with
17 significant digits
"""
import json
import logging
import math
import sys
from datetime import datetime, timezone

import numpy as np

from core.errors import InputError

logger = logging.getLogger(__name__)


def _float(value):
    # strict JSON has no non-finite numbers; they travel as strings
    if math.isnan(value):
        return '"NaN"'
    if math.isinf(value):
        return '"Infinity"' if value > 0 else '"-Infinity"'
    text = "%.17g" % value
    if not any(c in text for c in ".e"):
        text += ".0"
    return text


def _string(text):
    return json.dumps(text)


def encode(value, indent=2, level=0):
    """JSON text for plain data, numpy scalars and arrays"""
    if value is None:
        return "null"
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return _float(float(value))
    if isinstance(value, str):
        return _string(value)
    if isinstance(value, np.ndarray):
        value = value.tolist()
    pad = " " * (indent * (level + 1))
    close = " " * (indent * level)
    if isinstance(value, (list, tuple)):
        if not value:
            return "[]"
        # numeric rows stay on one line
        if all(isinstance(v, (int, float, np.integer, np.floating)) and not isinstance(v, bool)
               for v in value):
            return "[" + ", ".join(encode(v) for v in value) + "]"
        items = [pad + encode(v, indent, level + 1) for v in value]
        return "[\n" + ",\n".join(items) + "\n" + close + "]"
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = [pad + _string(str(k)) + ": " + encode(v, indent, level + 1) for k, v in value.items()]
        return "{\n" + ",\n".join(items) + "\n" + close + "}"
    raise InputError(f"cannot serialize {type(value).__name__} into a report")


def build_report(command, config, result, diagnostics):
    return {
        "schema": config.schema,
        "command": command,
        "config": config.to_dict(),
        "result": result,
        "diagnostics": diagnostics,
        "meta": {"timestamp": datetime.now(timezone.utc).isoformat()},
    }


def write_report(report, output=None):
    """Write to output (a path) or stdout"""
    text = encode(report) + "\n"
    if output is None:
        sys.stdout.write(text)
        return
    try:
        with open(output, "w") as handle:
            handle.write(text)
    except OSError as e:
        raise InputError(f"cannot write report to {output}: {e}") from e
    logger.info("report written to %s", output)
