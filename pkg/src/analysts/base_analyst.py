"""
Base Analyst class with shared functionality
"""

import json
import math
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List, Optional

from ..orchestrator.run_config import RunConfig


@dataclass
class AnalysisReport:
    """Rows produced by one analyst run plus its health flags"""

    rows: List[Dict[str, Any]]
    warnings: List[str] = field(default_factory=list)
    checks_passed: bool = True
    high_variance: bool = False


class BaseAnalyst:
    """Base class for all analysts with common functionality"""

    required_fields: List[str] = []

    def __init__(self, name: str, config: Dict[str, Any], logger: Any):
        self.name = name
        self.config = config
        self.logger = logger
        self.run_count = 0

    def section(self, name: str) -> Dict[str, Any]:
        return self.config.get(name, {}) or {}

    def seed(self, run_config: RunConfig) -> int:
        if run_config.seed is not None:
            return run_config.seed
        return int(self.config.get('random_seed', 42))

    def samples(self, run_config: RunConfig) -> int:
        if run_config.samples is not None:
            return run_config.samples
        return int(self.section('monte_carlo').get('samples', 100000))

    def workers(self, run_config: RunConfig) -> int:
        if run_config.workers is not None:
            return run_config.workers
        return int(self.section('monte_carlo').get('workers', 1))

    def run(self, run_config: RunConfig) -> AnalysisReport:
        self.run_count += 1
        report = self.analyze(run_config)
        self.validate_output(report.rows, self.required_fields)
        self.log_execution(
            self.name,
            f"{len(report.rows)} rows",
            {
                "warnings": report.warnings,
                "checks_passed": report.checks_passed,
                "high_variance": report.high_variance,
            },
        )
        return report

    def analyze(self, run_config: RunConfig) -> AnalysisReport:
        raise NotImplementedError

    def log_execution(self, task: str, result: Any, metadata: Optional[Dict] = None):
        """Log analyst execution details"""
        log_entry = {
            "timestamp": datetime.now().isoformat(),
            "analyst": self.name,
            "task": task,
            "result_summary": str(result)[:200] if result else None,
            "metadata": metadata or {},
            "run_count": self.run_count
        }

        self.logger.info(f"{self.name} executed: {task} ({log_entry['result_summary']})", extra={"extra": log_entry})

        self._save_log_entry(log_entry)

    def _save_log_entry(self, entry: Dict):
        """Append the entry to logs/<analyst>.jsonl"""
        log_dir = self.section('logging').get('output_dir', 'logs')
        if not log_dir:
            return
        log_dir = Path(log_dir)
        log_dir.mkdir(parents=True, exist_ok=True)

        log_file = log_dir / f"{self.name.lower().replace(' ', '_')}.jsonl"

        with open(log_file, 'a', encoding='utf-8') as f:
            f.write(json.dumps(entry, default=str) + '\n')

    def validate_output(self, rows: List[Dict[str, Any]], required_fields: list) -> bool:
        """Validate that every row contains the required fields"""
        for row in rows:
            missing_fields = [f for f in required_fields if f not in row]
            if missing_fields:
                self.logger.error(f"{self.name} output missing fields: {missing_fields}")
                return False

        return True


def relative_error(value: float, reference: float) -> float:
    if reference == 0.0:
        return abs(value)
    return abs(value - reference) / abs(reference)


def z_score(estimate: float, reference: float, stderr: float) -> float:
    """(estimate - reference) / stderr; 0 when both agree exactly"""
    difference = estimate - reference
    if stderr > 0.0:
        return difference / stderr
    return 0.0 if difference == 0.0 else math.copysign(math.inf, difference)
