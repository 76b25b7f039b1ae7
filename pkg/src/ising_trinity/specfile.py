"""JSON model-spec files: validation-first parsing and faithful serialization."""

from __future__ import annotations

import json
import warnings
from pathlib import Path

import numpy as np

from .core import SYMMETRY_TOL, ModelSpec
from .errors import SpecValidationError


def _require_number(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SpecValidationError(f"{where} must be a number, got {value!r}")
    out = float(value)
    if not np.isfinite(out):
        raise SpecValidationError(f"{where} must be finite, got {value!r}")
    return out


def model_spec_from_dict(data: dict) -> tuple[ModelSpec, float]:
    """Validate a parsed spec document, returning the spec and ``extra_shift``.

    Any nonzero coupling diagonal is zeroed with a warning: the diagonal never
    affects probabilities.
    """
    if not isinstance(data, dict):
        raise SpecValidationError(
            f"spec document must be a JSON object, got {type(data).__name__}"
        )
    unknown = set(data) - {"n", "delta", "sigma", "extra_shift"}
    if unknown:
        raise SpecValidationError(f"unknown spec fields: {sorted(unknown)}")
    if "n" not in data:
        raise SpecValidationError("spec is missing required field 'n'")
    n = data["n"]
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise SpecValidationError(f"'n' must be a positive integer, got {n!r}")

    if "delta" not in data:
        raise SpecValidationError("spec is missing required field 'delta'")
    delta_raw = data["delta"]
    if not isinstance(delta_raw, list) or len(delta_raw) != n:
        raise SpecValidationError(f"'delta' must be a list of {n} numbers")
    delta = np.array(
        [_require_number(v, f"delta[{i}]") for i, v in enumerate(delta_raw)]
    )

    if "sigma" not in data:
        raise SpecValidationError("spec is missing required field 'sigma'")
    sigma_raw = data["sigma"]
    if not isinstance(sigma_raw, list) or len(sigma_raw) != n:
        raise SpecValidationError(f"'sigma' must be a list of {n} rows")
    rows = []
    for i, row in enumerate(sigma_raw):
        if not isinstance(row, list) or len(row) != n:
            raise SpecValidationError(f"sigma[{i}] must be a list of {n} numbers")
        rows.append([_require_number(v, f"sigma[{i}][{j}]") for j, v in enumerate(row)])
    sigma = np.array(rows)

    gap = np.abs(sigma - sigma.T)
    if gap.size and gap.max() > SYMMETRY_TOL:
        i, j = np.unravel_index(np.argmax(gap), gap.shape)
        raise SpecValidationError(
            f"sigma is not symmetric: sigma[{i}][{j}] = {sigma[i, j]!r} but "
            f"sigma[{j}][{i}] = {sigma[j, i]!r} (difference {gap[i, j]:.3g} "
            f"exceeds {SYMMETRY_TOL:g})"
        )

    if np.any(np.diag(sigma) != 0.0):
        warnings.warn(
            "nonzero sigma diagonal ignored: the diagonal never affects "
            "probabilities; zeroing it",
            stacklevel=2,
        )
        np.fill_diagonal(sigma, 0.0)

    extra_shift = 0.0
    if "extra_shift" in data:
        extra_shift = _require_number(data["extra_shift"], "extra_shift")
        if extra_shift < 0.0:
            raise SpecValidationError(
                f"extra_shift must be non-negative, got {extra_shift!r}"
            )
    return ModelSpec(delta=delta, sigma=sigma), extra_shift


def model_spec_to_dict(spec: ModelSpec, extra_shift: float = 0.0) -> dict:
    out = {
        "n": spec.n,
        "delta": spec.delta.tolist(),
        "sigma": spec.coupling_offdiag().tolist(),
    }
    if extra_shift != 0.0:
        out["extra_shift"] = float(extra_shift)
    return out


def load_model_spec(path) -> tuple[ModelSpec, float]:
    """Read and validate a JSON model-spec file."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecValidationError(f"{path} is not valid JSON: {exc}") from exc
    return model_spec_from_dict(data)


def save_model_spec(spec: ModelSpec, path, extra_shift: float = 0.0) -> None:
    """Write a spec as JSON; parsing the result reproduces the spec exactly."""
    doc = model_spec_to_dict(spec, extra_shift)
    Path(path).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
