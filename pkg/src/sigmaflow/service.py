"""HTTP front end: the task runner behind a small JSON API.

POST a run configuration to /tasks/{task} and get the report back; artifacts
are written under the server's output root exactly as in a local run.
"""

from typing import Optional

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, ConfigDict

from . import __version__
from .config import ConfigError, RunConfig, config_from_dict
from .report import Report
from .tasks import TASKS, run_task

app = FastAPI(title="sigmaflow", version=__version__)


class HealthResponse(BaseModel):
    status: str
    version: str


class TaskListResponse(BaseModel):
    tasks: list[str]


class RunRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    config: RunConfig = RunConfig()
    seed: Optional[int] = None
    tag: Optional[str] = None


class RunResponse(BaseModel):
    report: Report
    run_dir: str


@app.get("/health", response_model=HealthResponse)
def health():
    return HealthResponse(status="ok", version=__version__)


@app.get("/tasks", response_model=TaskListResponse)
def list_tasks():
    return TaskListResponse(tasks=list(TASKS))


@app.post("/tasks/{task}", response_model=RunResponse)
def run(task: str, request: RunRequest):
    if task not in TASKS:
        raise HTTPException(status_code=404, detail=f"unknown task {task!r}")
    try:
        cfg = config_from_dict(request.config.model_dump())
    except ConfigError as exc:
        raise HTTPException(status_code=422, detail=exc.problems) from None
    report, run_dir = run_task(cfg, task, seed=request.seed, tag=request.tag)
    return RunResponse(report=report, run_dir=str(run_dir))
