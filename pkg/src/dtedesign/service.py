"""HTTP service backing the interactive explorer.

Jobs (oc/sweep/bpp runs) execute on a bounded worker pool with polled
progress; results are the same canonical documents the CLI writes, byte
for byte.  Prior-density curves are computed synchronously for form
previews.
"""

import pathlib
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from fastapi import FastAPI, HTTPException, Response
from pydantic import BaseModel

from .bpp import design_stage_bpp
from .config import ConfigError, parse_config
from .dte import ControlParams, survival_control
from .oc import run_oc, sweep_designs
from .results import bpp_document, canonical_json, oc_document, sweep_document

__all__ = ["create_app", "JobManager"]


@dataclass
class JobRecord:
    job_id: str
    kind: str
    status: str = "queued"  # queued -> running -> done | failed
    progress: float = 0.0
    error: str | None = None
    result_text: str | None = None

    def public(self) -> dict:
        body = {
            "job_id": self.job_id,
            "kind": self.kind,
            "status": self.status,
            "progress": round(self.progress, 6),
        }
        if self.error is not None:
            body["error"] = self.error
        return body


class JobManager:
    """In-memory job registry with a bounded executor."""

    def __init__(self, max_workers: int = 2):
        self._pool = ThreadPoolExecutor(max_workers=max_workers)
        self._lock = threading.Lock()
        self._jobs: dict[str, JobRecord] = {}
        self._counter = 0

    def submit(self, kind: str, cfg) -> str:
        with self._lock:
            self._counter += 1
            job_id = f"job-{self._counter}"
            self._jobs[job_id] = JobRecord(job_id=job_id, kind=kind)
        self._pool.submit(self._run, job_id, kind, cfg)
        return job_id

    def _set_progress(self, job_id: str, fraction: float):
        with self._lock:
            record = self._jobs[job_id]
            record.progress = max(record.progress, min(float(fraction), 1.0))

    def _run(self, job_id: str, kind: str, cfg):
        with self._lock:
            self._jobs[job_id].status = "running"
        try:
            doc = _run_with_progress(kind, cfg, lambda p: self._set_progress(job_id, p))
        except Exception as exc:  # failures surface through the job record
            with self._lock:
                record = self._jobs[job_id]
                record.status = "failed"
                record.error = f"{type(exc).__name__}: {exc}"
            return
        with self._lock:
            record = self._jobs[job_id]
            record.progress = 1.0
            record.status = "done"
            record.result_text = doc

    def get(self, job_id: str) -> JobRecord:
        with self._lock:
            if job_id not in self._jobs:
                raise KeyError(job_id)
            return self._jobs[job_id]


def _run_with_progress(kind: str, cfg, progress) -> str:
    """Job-kind dispatch mirroring the CLI but with progress reporting."""
    from .config import build_design

    if kind == "oc":
        design = build_design(cfg)
        summary = run_oc(
            design, cfg.priors, cfg.n_sims, cfg.master_seed, cfg.workers, progress
        )
        return oc_document(cfg.echo, cfg.master_seed, design, summary)
    if kind == "sweep":
        if not cfg.sweep_fractions:
            raise ConfigError("sweep.interim_fractions", "missing for sweep jobs")
        fractions = list(cfg.sweep_fractions)
        designs = [build_design(cfg, (f, 1.0)) for f in fractions]
        designs.append(build_design(cfg, (1.0,)))
        results = sweep_designs(
            designs, cfg.priors, cfg.n_sims, cfg.master_seed, cfg.workers, progress
        )
        rows = [
            (label, design, summary)
            for label, (design, summary) in zip(fractions + [None], results)
        ]
        return sweep_document(cfg.echo, cfg.master_seed, rows)
    if kind == "bpp":
        if not cfg.bpp_fractions:
            raise ConfigError("bpp.information_fraction", "missing for bpp jobs")
        entries = []
        n_fr = len(cfg.bpp_fractions)
        for k, fraction in enumerate(cfg.bpp_fractions):
            schedule = (fraction, 1.0) if fraction < 1.0 else (1.0,)
            design = build_design(cfg, schedule)
            values, info = design_stage_bpp(
                design,
                cfg.priors,
                fraction,
                cfg.bpp_n_trials,
                cfg.bpp_n_projections,
                cfg.master_seed,
                workers=cfg.workers,
                progress=lambda p, k=k: progress((k + p) / n_fr),
            )
            entries.append((fraction, design, values, info))
        return bpp_document(cfg.echo, cfg.master_seed, entries)
    raise ValueError(f"unknown job kind {kind!r}")


class PriorDensityRequest(BaseModel):
    priors: dict
    n_points: int = 200


def _density_curve(dist, n_points: int) -> dict:
    if dist.is_point:
        return {"kind": "point", "value": dist.params[0]}
    lo = float(dist.ppf(0.001))
    hi = float(dist.ppf(0.999))
    x = np.linspace(lo, hi, n_points)
    return {"kind": "continuous", "x": x.tolist(), "pdf": dist.pdf(x).tolist()}


def create_app(max_workers: int = 2, frontend_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="dtedesign service")
    manager = JobManager(max_workers=max_workers)

    if frontend_dir is None:
        candidate = pathlib.Path(__file__).resolve().parents[2] / "frontend"
        frontend_dir = str(candidate) if (candidate / "index.html").exists() else None
    if frontend_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/app", StaticFiles(directory=frontend_dir, html=True), name="app")

    def _parse(body: dict):
        try:
            return parse_config(body)
        except ConfigError as exc:
            raise HTTPException(
                status_code=400,
                detail={"code": "invalid_config", "field": exc.field, "message": str(exc)},
            ) from exc

    @app.post("/jobs/oc", status_code=202)
    def submit_oc(body: dict):
        return {"job_id": manager.submit("oc", _parse(body))}

    @app.post("/jobs/sweep", status_code=202)
    def submit_sweep(body: dict):
        return {"job_id": manager.submit("sweep", _parse(body))}

    @app.post("/jobs/bpp", status_code=202)
    def submit_bpp(body: dict):
        return {"job_id": manager.submit("bpp", _parse(body))}

    def _get_job(job_id: str) -> JobRecord:
        try:
            return manager.get(job_id)
        except KeyError:
            raise HTTPException(
                status_code=404,
                detail={"code": "unknown_job", "message": f"no job {job_id}"},
            ) from None

    @app.get("/jobs/{job_id}")
    def job_status(job_id: str):
        return _get_job(job_id).public()

    @app.get("/jobs/{job_id}/result")
    def job_result(job_id: str):
        record = _get_job(job_id)
        if record.status == "failed":
            raise HTTPException(
                status_code=409,
                detail={"code": "job_failed", "message": record.error or "job failed"},
            )
        if record.status != "done":
            raise HTTPException(
                status_code=409,
                detail={"code": "not_ready", "message": f"job is {record.status}"},
            )
        return Response(content=record.result_text, media_type="application/json")

    @app.post("/priors/density")
    def prior_density_curves(req: PriorDensityRequest):
        cfg = _parse({
            "priors": req.priors,
            "design": {
                "n_control": 2,
                "n_experimental": 2,
                "total_events": 2,
                "recruitment_duration_months": 1,
            },
        })
        priors = cfg.priors
        lam = priors.control_lambda
        gam = priors.control_gamma
        body = {
            "hazard_ratio": {
                "point_mass": {"value": 1.0, "probability": 1.0 - priors.p_separate},
                "density": _density_curve(priors.hr_prior.continuous, req.n_points),
            },
            "delay_months": {
                "point_mass": {
                    "value": 0.0,
                    "probability": 1.0
                    - priors.p_separate * priors.p_dte
                },
                "density": _density_curve(priors.delay_prior.continuous, req.n_points),
            },
        }
        if lam.is_point and gam.is_point:
            ctrl = ControlParams(lam.params[0], gam.params[0])
            horizon = 3.0 * np.log(2.0) / lam.params[0]
            t = np.linspace(0.0, horizon, req.n_points)
            body["control_survival"] = {
                "t_months": t.tolist(),
                "survival": [float(survival_control(ti, ctrl)) for ti in t],
            }
        return Response(content=canonical_json(body), media_type="application/json")

    return app
