"""CSV/JSON artifact writers with a fixed schema version.

Every file carries the schema version: JSON documents in a top-level
``schema_version`` key, CSV files in leading ``#``-comment lines together
with a ``kind`` tag and any shape metadata a reader needs.  Numeric output
uses repr-roundtrip formatting so identical inputs produce byte-identical
files.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import SchemaError

SCHEMA_VERSION = "1"


def _fmt(x: float) -> str:
    return np.format_float_scientific(x, precision=16, trim="-")


def _write_csv(path, kind: str, meta: dict, columns: dict) -> None:
    lines = [f"# schema_version={SCHEMA_VERSION}", f"# kind={kind}"]
    for key, val in meta.items():
        lines.append(f"# {key}={val}")
    names = list(columns)
    lines.append(",".join(names))
    data = np.column_stack([np.asarray(columns[c], dtype=float) for c in names])
    for row in data:
        lines.append(",".join(_fmt(x) for x in row))
    Path(path).write_text("\n".join(lines) + "\n")


def write_json(path, payload: dict) -> None:
    doc = {"schema_version": SCHEMA_VERSION, **payload}
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def read_json(path) -> dict:
    doc = json.loads(Path(path).read_text())
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise SchemaError(
            f"{path}: schema_version {doc.get('schema_version')!r} != {SCHEMA_VERSION!r}"
        )
    return doc


# ---------------------------------------------------------------------------
# radial profiles
# ---------------------------------------------------------------------------


def write_profile_csv(path, profile) -> None:
    _write_csv(
        path,
        "profile",
        {"N": profile.params.N, "alpha": profile.params.alpha, "p": profile.params.p},
        {
            "r": profile.mesh,
            "u": profile.u,
            "u_prime": profile.u_prime,
            "w": profile.w,
            "z": profile.z,
            "g": profile.g,
        },
    )


def profile_header(profile) -> dict:
    params = profile.params
    return {
        "kind": "profile-header",
        "params": {
            "N": params.N,
            "alpha": params.alpha,
            "p": params.p,
            "p_alpha": params.p_alpha,
            "kappa": params.kappa,
            "C_alpha": params.C_alpha,
        },
        "sup_norm": profile.sup_norm,
        "first_zero": profile.first_zero,
        "residual": profile.residual,
        "mesh_size": len(profile.mesh),
    }


# ---------------------------------------------------------------------------
# spectra
# ---------------------------------------------------------------------------


def spectrum_payload(spectrum, p: float) -> dict:
    return {
        "kind": "mode-spectrum",
        "p": p,
        "k": spectrum.k,
        "mu_k": spectrum.mu_k,
        "eigenvalues": [float(x) for x in spectrum.eigenvalues],
        "residuals": [float(x) for x in spectrum.residuals],
    }


def write_eigenfunctions_csv(path, spectrum, profile) -> None:
    """Eigenfunctions interpolated onto the profile mesh, one column each."""
    from scipy.interpolate import CubicSpline

    cols = {"r": profile.mesh}
    for i in range(spectrum.eigenfunctions.shape[1]):
        spline = CubicSpline(spectrum.mesh, spectrum.eigenfunctions[:, i])
        cols[f"psi_{i + 1}"] = spline(profile.mesh)
    _write_csv(
        path,
        "eigenfunctions",
        {"k": spectrum.k, "p": profile.params.p},
        cols,
    )


# ---------------------------------------------------------------------------
# scans and degeneracy points
# ---------------------------------------------------------------------------


def write_scan_csv(path, scan_result) -> None:
    _write_csv(
        path,
        "scan",
        {"N": scan_result.N, "alpha": scan_result.alpha, "k_max": scan_result.k_max},
        {
            "p": [row.p for row in scan_result.rows],
            "lambda11": [row.lambda_11 for row in scan_result.rows],
            "morse_index": [row.morse_index for row in scan_result.rows],
            "sup_norm": [row.sup_norm for row in scan_result.rows],
        },
    )


def degeneracy_payload(points, scan_result=None) -> dict:
    doc = {
        "kind": "degeneracy-points",
        "points": [
            {
                "p_bar": pt.p_bar,
                "bracket": list(pt.bracket),
                "changing": pt.changing,
                "lambda_gap": pt.lambda_gap,
            }
            for pt in points
        ],
        "changing_count": sum(1 for pt in points if pt.changing),
    }
    if scan_result is not None:
        doc["N"] = scan_result.N
        doc["alpha"] = scan_result.alpha
    return doc


def write_kernel_csv(path, point) -> None:
    _write_csv(
        path,
        "kernel",
        {"p_bar": point.p_bar, "changing": point.changing},
        {"r": point.kernel_mesh, "psi_11": point.kernel},
    )


# ---------------------------------------------------------------------------
# branches
# ---------------------------------------------------------------------------


def branch_manifest(branch) -> dict:
    lo, hi = branch.norm_range
    return {
        "kind": "branch",
        "N": branch.grid.N,
        "alpha": branch.grid.alpha,
        "grid": {"nr": branch.grid.nr, "ntheta": branch.grid.ntheta},
        "origin_p": branch.origin_p,
        "origin_p_scan": branch.origin_p_scan,
        "termination": branch.termination,
        "folds": branch.folds,
        "norm_range": [lo, hi],
        "points": [
            {
                "arclength": pt.arclength,
                "p": pt.p,
                "asymmetry": pt.asymmetry,
                "sup_norm": pt.sup_norm,
                "residual": pt.residual_norm,
                "c1_norm": pt.c1_norm,
            }
            for pt in branch.points
        ],
    }


def write_branch_snapshot_csv(path, branch, index: int) -> None:
    """One branch point's field as rows r_i, columns theta_j, with a
    self-describing header (grid sizes, axes, exponent)."""
    pt = branch.points[index]
    grid = branch.grid
    lines = [
        f"# schema_version={SCHEMA_VERSION}",
        "# kind=branch-snapshot",
        f"# N={grid.N}",
        f"# alpha={grid.alpha}",
        f"# nr={grid.nr}",
        f"# ntheta={grid.ntheta}",
        f"# p={_fmt(pt.p)}",
        f"# index={index}",
        "# r=" + ",".join(_fmt(x) for x in grid.r),
        "# theta=" + ",".join(_fmt(x) for x in grid.theta),
    ]
    for i in range(grid.nr):
        lines.append(",".join(_fmt(x) for x in pt.values[i]))
    Path(path).write_text("\n".join(lines) + "\n")
