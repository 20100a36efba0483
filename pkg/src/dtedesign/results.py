"""Self-describing result documents.

One run produces one canonical JSON document: config echo, seed,
per-metric values with Monte Carlo standard errors, and plot-ready
tables.  Serialisation is deterministic (sorted keys, repr floats), so a
rerun with the same seed is byte-identical regardless of worker count.
"""

import json

import numpy as np

from .boundaries import BoundarySet
from .oc import OCSummary

__all__ = [
    "canonical_json",
    "oc_document",
    "sweep_document",
    "bpp_document",
    "boundaries_document",
]

SCHEMA = "dtedesign-result-v1"


def _to_builtin(obj):
    if isinstance(obj, dict):
        return {str(k): _to_builtin(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_to_builtin(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_to_builtin(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, float) and (np.isinf(obj) or np.isnan(obj)):
        return None if np.isnan(obj) else ("-inf" if obj < 0 else "inf")
    return obj


def canonical_json(payload: dict) -> str:
    return json.dumps(_to_builtin(payload), sort_keys=True, indent=2) + "\n"


def _document(kind: str, config_echo: dict, master_seed: int, body: dict) -> str:
    return canonical_json(
        {
            "schema": SCHEMA,
            "kind": kind,
            "config": config_echo,
            "master_seed": master_seed,
            **body,
        }
    )


def _boundaries_payload(bounds: BoundarySet) -> dict:
    return {
        "fractions": list(bounds.fractions),
        "efficacy_z": list(bounds.efficacy_b),
        "futility_z": list(bounds.futility_a),
        "alternative_drift": bounds.drift,
        "cumulative_alpha": list(bounds.cumulative_alpha),
        "cumulative_beta": list(bounds.cumulative_beta),
    }


def oc_document(config_echo, master_seed, design, summary: OCSummary) -> str:
    return _document(
        "oc",
        config_echo,
        master_seed,
        {
            "boundaries": _boundaries_payload(design.boundaries),
            "summary": summary.to_dict(),
        },
    )


def sweep_document(config_echo, master_seed, rows) -> str:
    """rows: list of (interim fraction or None, design, OCSummary)."""
    results = []
    category_table = []
    curve_table = []
    for fraction, design, summary in rows:
        entry = {
            "interim_fraction": fraction,
            "boundaries": _boundaries_payload(design.boundaries),
            "summary": summary.to_dict(),
        }
        results.append(entry)
        label = fraction if fraction is not None else 1.0
        category_table.append(
            {"fraction": label, **summary.category_proportions}
        )
        curve_table.append(
            {
                "fraction": label,
                "assurance": summary.assurance,
                "expected_duration_months": summary.expected_duration,
                "expected_sample_size": summary.expected_sample_size,
            }
        )
    return _document(
        "sweep",
        config_echo,
        master_seed,
        {
            "results": results,
            "tables": {
                "category_proportions_by_fraction": category_table,
                "curves_by_fraction": curve_table,
            },
        },
    )


def _histogram(values, n_bins: int = 20):
    counts, edges = np.histogram(np.asarray(values), bins=n_bins, range=(0.0, 1.0))
    return {"bin_edges": edges.tolist(), "counts": counts.tolist()}


def bpp_document(config_echo, master_seed, entries) -> str:
    """entries: list of (fraction, design, bpp values, informativeness)."""
    results = []
    for fraction, design, values, info in entries:
        values = np.asarray(values)
        results.append(
            {
                "fraction": fraction,
                "final_critical_z": design.boundaries.efficacy_b[-1],
                "bpp_values": values.tolist(),
                "informativeness": info,
                "mean_bpp": float(values.mean()),
                "mc_se_mean_bpp": float(values.std(ddof=1) / np.sqrt(len(values)))
                if len(values) > 1
                else 0.0,
                "histogram": _histogram(values),
            }
        )
    return _document("bpp", config_echo, master_seed, {"results": results})


def patient_records_document(config_echo, master_seed, records) -> str:
    """Debug export of a snapshot's patient records (one row per patient)."""
    rows = [
        {
            "arm": r.arm,
            "recruit_time_months": r.recruit_time,
            "latent_survival_months": r.latent_survival,
            "pseudo_event_time_months": r.pseudo_event_time,
            "observed_time_months": r.observed_time,
            "event": r.event_flag,
        }
        for r in records
    ]
    return _document("patients", config_echo, master_seed, {"records": rows})


def _implied_hazard_ratio(design):
    if not design.boundaries.drift:
        return None
    r = design.n_experimental / design.n_control
    info = design.total_events * r / (1.0 + r) ** 2
    return float(np.exp(-design.boundaries.drift / np.sqrt(info)))


def boundaries_document(config_echo, master_seed, design) -> str:
    bounds = design.boundaries
    rows = [
        {
            "fraction": f,
            "efficacy_z": b,
            "futility_z": a,
            "cumulative_alpha": ca,
            "cumulative_beta": cb,
        }
        for f, a, b, ca, cb in zip(
            bounds.fractions,
            bounds.futility_a,
            bounds.efficacy_b,
            bounds.cumulative_alpha,
            bounds.cumulative_beta,
        )
    ]
    return _document(
        "boundaries",
        config_echo,
        master_seed,
        {
            "boundaries": _boundaries_payload(bounds),
            "table": rows,
            "implied_design_hazard_ratio": _implied_hazard_ratio(design),
        },
    )
