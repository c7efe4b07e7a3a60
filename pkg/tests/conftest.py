from __future__ import annotations

import json
from pathlib import Path
from typing import Optional

import pytest

from ibgs.config import Config
from ibgs.pipeline import run_stream, write_report
from ibgs.synth import build_scenario, generate, write_scenario_output


def load_jsonl(path: Path) -> list[dict]:
    return [json.loads(line) for line in Path(path).read_text().splitlines() if line]


@pytest.fixture(scope="session")
def scenario_run(tmp_path_factory):
    """Generate + run a scenario once per (name, seed, config); cached for the session."""
    cache: dict = {}

    def _run(name: str, cfg: Optional[Config] = None, seed: int = 0) -> dict:
        cfg = cfg or Config()
        key = (name, seed, json.dumps(cfg.to_dict(), sort_keys=True))
        if key in cache:
            return cache[key]
        out = tmp_path_factory.mktemp(f"run_{name}")
        result = generate(build_scenario(name, cfg, seed=seed))
        paths = write_scenario_output(result, out)
        report = run_stream(
            paths["stream"],
            cfg,
            masks_dir=out / "masks",
            instances_path=out / "instances.jsonl",
            events_path=out / "events.jsonl",
            model_log_path=out / "model_log.jsonl",
        )
        write_report(report, out / "report.json")
        cache[key] = {
            "dir": out,
            "result": result,
            "manifest": result.manifest,
            "report": report,
            "stream": paths["stream"],
            "gt": paths["gt"],
            "masks": out / "masks",
            "instances": out / "instances.jsonl",
            "events": out / "events.jsonl",
            "model_log": out / "model_log.jsonl",
        }
        return cache[key]

    return _run
