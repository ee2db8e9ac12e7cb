"""
Sample Ingestion
Plain-text sample files: one finite decimal per line, '#' comments and blank
lines skipped
"""
import logging
import math

import numpy as np

from core.cf_core import from_samples
from core.errors import IngestError

logger = logging.getLogger(__name__)


def parse_samples(lines):
    """Parse an iterable of text lines into a float array"""
    values = []
    for number, raw in enumerate(lines, start=1):
        text = raw.strip()
        if not text or text.startswith("#"):
            continue
        try:
            value = float(text)
        except ValueError:
            raise IngestError(f"not a decimal number: {text!r}", line=number) from None
        if not math.isfinite(value):
            raise IngestError(f"sample is not finite: {text!r}", line=number)
        values.append(value)
    if not values:
        raise IngestError("no samples found")
    return np.array(values, dtype=float)


def read_samples(path):
    try:
        with open(path, "r") as handle:
            samples = parse_samples(handle)
    except OSError as e:
        raise IngestError(f"cannot read sample file {path}: {e}") from e
    logger.info("read %d samples from %s", samples.size, path)
    return samples


def sample_summary(samples):
    """n, sample mean and (population) sample variance"""
    return {
        "n": int(samples.size),
        "mean": float(np.mean(samples)),
        "variance": float(np.var(samples)),
    }


def ingest(path):
    """EmpiricalCF over the samples in path, with the sample summary"""
    samples = read_samples(path)
    return from_samples(samples), sample_summary(samples)
