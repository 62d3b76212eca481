"""JSON file formats: markets, plans, preferences and Qing partitions."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Mapping

from .engine import AssignmentPlan
from .model import (
    Job,
    JobCategory,
    LevelVector,
    Market,
    MarketError,
    Matching,
    Worker,
    WorkerCategory,
)
from .procedures import QingPartition


class FormatError(ValueError):
    """A file that is not valid JSON or does not follow the expected schema."""


def read_json(path: str | Path) -> Any:
    text = Path(path).read_text(encoding="utf-8")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None


def write_json(path: str | Path, data: Any) -> None:
    Path(path).write_text(dumps(data), encoding="utf-8")


def dumps(data: Any) -> str:
    return json.dumps(data, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def _object(data: Any, where: str, required: set[str], optional: frozenset[str] = frozenset()) -> dict:
    if not isinstance(data, dict):
        raise FormatError(f"{where}: expected an object")
    unknown = sorted(set(data) - required - optional)
    if unknown:
        raise FormatError(f"{where}: unknown fields {unknown}")
    missing = sorted(required - set(data))
    if missing:
        raise FormatError(f"{where}: missing fields {missing}")
    return data


def _str(value: Any, where: str) -> str:
    if not isinstance(value, str):
        raise FormatError(f"{where}: expected a string")
    return value


def _str_list(value: Any, where: str) -> list[str]:
    if not isinstance(value, list):
        raise FormatError(f"{where}: expected an array of strings")
    return [_str(v, f"{where}[{i}]") for i, v in enumerate(value)]


def market_from_dict(data: Any) -> Market:
    data = _object(data, "market", {"regions", "workers", "jobs"})
    regions = _str_list(data["regions"], "regions")
    if not isinstance(data["workers"], list):
        raise FormatError("workers: expected an array")
    if not isinstance(data["jobs"], list):
        raise FormatError("jobs: expected an array")
    workers = []
    for i, raw in enumerate(data["workers"]):
        where = f"workers[{i}]"
        raw = _object(raw, where, {"id", "category", "region", "exam_rank"})
        if raw["category"] not in ("A", "B"):
            raise FormatError(f"{where}.category: expected 'A' or 'B'")
        rank = raw["exam_rank"]
        if not isinstance(rank, int) or isinstance(rank, bool):
            raise FormatError(f"{where}.exam_rank: expected an integer")
        workers.append(
            Worker(_str(raw["id"], f"{where}.id"), WorkerCategory(raw["category"]),
                   _str(raw["region"], f"{where}.region"), rank)
        )
    jobs = []
    for i, raw in enumerate(data["jobs"]):
        where = f"jobs[{i}]"
        raw = _object(raw, where, {"id", "category", "region"})
        if raw["category"] not in ("A", "AB", "B"):
            raise FormatError(f"{where}.category: expected 'A', 'AB' or 'B'")
        jobs.append(
            Job(_str(raw["id"], f"{where}.id"), JobCategory(raw["category"]),
                _str(raw["region"], f"{where}.region"))
        )
    if len(regions) != len(set(regions)):
        raise MarketError("region ids must be unique")
    return Market(tuple(workers), tuple(jobs), tuple(regions))


def market_to_dict(market: Market) -> dict:
    return {
        "regions": list(market.regions),
        "workers": [
            {"id": w.id, "category": w.category.value, "region": w.region, "exam_rank": w.exam_rank}
            for w in market.workers
        ],
        "jobs": [{"id": j.id, "category": j.category.value, "region": j.region} for j in market.jobs],
    }


def _orders(data: Any, where: str) -> dict[str, list[str]]:
    if not isinstance(data, dict):
        raise FormatError(f"{where}: expected an object mapping worker ids to job id arrays")
    return {_str(k, where): _str_list(v, f"{where}.{k}") for k, v in data.items()}


def plan_from_dict(data: Any) -> AssignmentPlan:
    data = _object(data, "plan", {"worker_order", "job_orders"})
    return AssignmentPlan(
        tuple(_str_list(data["worker_order"], "worker_order")), _orders(data["job_orders"], "job_orders")
    )


def plan_to_dict(plan: AssignmentPlan) -> dict:
    return {"worker_order": list(plan.worker_order), "job_orders": {w: list(o) for w, o in plan.job_orders.items()}}


def preferences_from_dict(data: Any) -> dict[str, list[str]]:
    return _orders(data, "preferences")


def partition_from_dict(data: Any) -> QingPartition:
    data = _object(data, "partition", {"wa1", "wa2", "wb1", "wb2"})
    return QingPartition(*(frozenset(_str_list(data[k], k)) for k in ("wa1", "wa2", "wb1", "wb2")))


def partition_to_dict(partition: QingPartition) -> dict:
    return {k: sorted(getattr(partition, k)) for k in ("wa1", "wa2", "wb1", "wb2")}


def matching_to_list(mu: Matching) -> list[list[str]]:
    return [list(p) for p in mu.sorted_pairs()]


def level_to_dict(v: LevelVector) -> dict:
    return {
        "total_matched": v.total_matched,
        "a_workers_matched": v.a_workers_matched,
        "a_jobs_filled": v.a_jobs_filled,
        "ab_jobs_filled": v.ab_jobs_filled,
    }


def load(path: str | Path, parser) -> Any:
    return parser(read_json(path))


def orders_to_dict(orders: Mapping[str, Any]) -> dict:
    return {w: list(o) for w, o in sorted(orders.items())}
