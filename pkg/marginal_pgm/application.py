"""
The end-to-end pipeline: measure, estimate, answer queries, write artifacts.

Only the measurement phase touches the raw dataset. Everything after it works
from the measurement log, so its outputs are post-processing of private
releases.
"""
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np

from .core.dataset import Dataset
from .core.domain import Clique, Domain
from .core.errors import ConfigError, MeasurementError
from .core.estimation import EstimationReport, EstimatorConfig, StepRule, estimate
from .core.inference import FactoredQuery, answer_factored_query, sample_synthetic
from .core.junction_tree import ModelSize, build_junction_tree
from .core.loss import LossSpec
from .core.measurements import LinearMeasurement, estimate_total
from .core.mechanisms import PrivacyAccountant, as_fraction, laplace_measure
from .core.model import GraphicalModel
from .core.mwem import mwem_pgm
from .core.query_blocks import clique_query
from .core.workloads import Workload, workload_error_by_clique
from .utils.config import RunConfig
from .utils.data_loader import load_dataset, read_domain_file
from .utils.file_utils import ensure_directory_exists, write_csv, write_json, write_text

logger = logging.getLogger(__name__)

MEASUREMENTS_FILE = "measurements.json"
MARGINALS_FILE = "marginals.json"
WORKLOAD_ERROR_FILE = "workload_error.json"
REPORT_FILE = "estimation_report.json"
MODEL_SIZE_FILE = "model_size.json"
VALUE_MAPS_FILE = "value_maps.json"
SYNTHETIC_FILE = "synthetic.csv"
QUERIES_FILE = "queries.json"
SUMMARY_FILE = "summary.txt"


@dataclass
class RunResult:
    """Everything a pipeline run produced."""
    model: GraphicalModel
    report: EstimationReport
    measurements: List[LinearMeasurement]
    model_size: ModelSize
    total: float
    accountant: Optional[PrivacyAccountant] = None
    workload_errors: Optional[Dict[Clique, float]] = None
    files: Dict[str, Path] = field(default_factory=dict)

    @property
    def workload_error(self) -> Optional[float]:
        if not self.workload_errors:
            return None
        return float(np.mean(list(self.workload_errors.values())))


class PGMApplication:
    """Runs one configured estimation job."""

    def __init__(self, config: RunConfig):
        """Initialize the application.

        Args:
            config: Validated run configuration.
        """
        self.config = config
        # independent streams for measurement and synthetic sampling
        measure_seed, sample_seed = np.random.SeedSequence(config.seed).spawn(2)
        self.measure_rng = np.random.default_rng(measure_seed)
        self.sample_rng = np.random.default_rng(sample_seed)
        self.output_dir = Path(config.output_dir)
        self.files: Dict[str, Path] = {}

    # configuration helpers

    def estimator_config(self) -> EstimatorConfig:
        """Estimator settings shared by the measure and mwem modes."""
        c = self.config
        return EstimatorConfig(
            algorithm=c.algorithm,
            iterations=c.iterations,
            step_rule=StepRule(kind=c.step_rule, eta0=c.step_size, line_search=c.line_search),
            tolerance=c.tolerance,
            lipschitz_aggregate=c.lipschitz_aggregate,
        )

    def _workload(self, domain: Domain, measurements: List[LinearMeasurement]) -> Workload:
        if self.config.workload:
            return Workload.from_config(domain, self.config.workload)
        cliques = []
        for m in measurements:
            if m.clique not in cliques:
                cliques.append(m.clique)
        return Workload.identity(domain, cliques)

    # measurement phase (the only phase that reads the dataset)

    def _measure(self, data: Dataset, accountant: PrivacyAccountant) -> List[LinearMeasurement]:
        records = self.config.measurements
        explicit = [r["epsilon"] for r in records if r.get("epsilon") is not None]
        if explicit and len(explicit) != len(records):
            raise ConfigError("give 'epsilon' for every measurement or for none")
        shares = ([as_fraction(e) for e in explicit] if explicit
                  else [as_fraction(self.config.epsilon) / len(records)] * len(records))
        measurements = []
        for record, eps in zip(records, shares):
            if "clique" not in record:
                raise ConfigError(f"measurement entry {record} has no 'clique'")
            clique = data.domain.canonical(record["clique"])
            query = clique_query(data.domain, clique, record)
            measurements.append(laplace_measure(
                data.marginal(clique), query, eps, data.records_count, self.measure_rng,
                accountant, noiseless=self.config.noiseless,
            ))
        return measurements

    def _load_measurement_file(self, domain: Domain) -> List[LinearMeasurement]:
        path = self.config.measurement_file
        try:
            with open(path, "r", encoding="utf-8") as f:
                raw = json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f"cannot read measurement file {path}: {e}") from None
        if isinstance(raw, dict):
            raw = raw.get("measurements", [])
        if not raw:
            raise MeasurementError(f"measurement file {path} holds no measurements")
        return [LinearMeasurement.from_record(record, domain) for record in raw]

    # pipeline

    def run(self) -> RunResult:
        """Run the configured pipeline and write every artifact.

        Raises:
            PGMError: Any library failure, tagged with its component.
        """
        c = self.config
        ensure_directory_exists(self.output_dir)
        if c.noiseless:
            logger.warning("noiseless mode: measurements are exact and NOT private")

        accountant, truth, value_maps = None, None, None
        mwem_model, mwem_report = None, None
        if c.uses_dataset:
            logger.info("measurement phase: reading %s", c.dataset_path)
            data = load_dataset(c.dataset_path, c.domain_path, c.binning)
            domain, value_maps = data.domain, data.value_maps
            if c.mode == "mwem":
                workload = Workload.from_config(domain, c.workload)
                reports = []
                mwem_model, accountant = mwem_pgm(
                    data, workload, c.epsilon, c.rounds, self.estimator_config(),
                    self.measure_rng, noiseless=c.noiseless, parameter_cap=c.parameter_cap,
                    callback=lambda t, model, report: reports.append(report),
                )
                mwem_report = reports[-1]
                measurements = accountant.measurements
            else:
                accountant = PrivacyAccountant(c.epsilon, non_private=c.noiseless)
                measurements = self._measure(data, accountant)
                workload = self._workload(domain, measurements)
            truth = {clique: data.marginal(clique) for clique in workload.cliques}
            known_total = float(data.records_count)
            del data
        else:
            domain, labels = read_domain_file(c.domain_path)
            value_maps = {a: v for a, v in labels.items() if v is not None} or None
            measurements = self._load_measurement_file(domain)
            workload = self._workload(domain, measurements)
            known_total = c.total

        self._write_measurements(measurements, accountant)

        # estimation phase
        if c.total_mode == "estimate":
            total, variance = estimate_total(measurements)
            logger.info("estimated total %.6g (variance %.4g)", total, variance)
        else:
            total = float(c.total) if c.total is not None else known_total

        if mwem_model is not None:
            model, report = mwem_model, mwem_report
            size = model.tree.model_size()
            self.files[MODEL_SIZE_FILE] = write_json(size.to_dict(), self.output_dir / MODEL_SIZE_FILE)
        else:
            tree = build_junction_tree(domain, [m.clique for m in measurements])
            size = tree.model_size()
            self.files[MODEL_SIZE_FILE] = write_json(size.to_dict(), self.output_dir / MODEL_SIZE_FILE)
            logger.info("junction tree: %s", size)
            tree.check_size(c.parameter_cap)
            spec = LossSpec(c.loss, measurements, rescaled=True)
            model, report = estimate(tree, spec, total, self.estimator_config())

        result = RunResult(model, report, measurements, size, model.total, accountant,
                           files=self.files)
        self._write_model_outputs(result, value_maps)

        # post-processing of the estimate
        if truth is not None:
            result.workload_errors = workload_error_by_clique(truth, model, workload)
            self.files[WORKLOAD_ERROR_FILE] = write_json({
                "workload_error": result.workload_error,
                "per_clique": {",".join(k): v for k, v in result.workload_errors.items()},
            }, self.output_dir / WORKLOAD_ERROR_FILE)
        if c.queries:
            self._answer_queries(model)
        if c.synthetic_records is not None:
            count = c.synthetic_records or int(round(model.total))
            synthetic = sample_synthetic(model, count, self.sample_rng)
            if value_maps:
                synthetic = Dataset(synthetic.domain, synthetic.records, value_maps)
            self.files[SYNTHETIC_FILE] = write_csv(synthetic.decoded(), self.output_dir / SYNTHETIC_FILE)

        self.files[SUMMARY_FILE] = write_text(self.summary(result, domain),
                                              self.output_dir / SUMMARY_FILE)
        logger.info("outputs written to %s", self.output_dir)
        return result

    def _write_measurements(self, measurements, accountant) -> None:
        self.files[MEASUREMENTS_FILE] = write_json({
            "measurements": [m.to_record() for m in measurements],
            "accountant": accountant.report() if accountant is not None else None,
        }, self.output_dir / MEASUREMENTS_FILE)

    def _write_model_outputs(self, result: RunResult, value_maps) -> None:
        self.files[MARGINALS_FILE] = write_json({
            "total": result.total,
            "log_partition": result.model.log_partition,
            "marginals": result.model.marginals_dict(),
        }, self.output_dir / MARGINALS_FILE)
        self.files[REPORT_FILE] = write_json(result.report.to_dict(), self.output_dir / REPORT_FILE)
        if value_maps:
            self.files[VALUE_MAPS_FILE] = write_json(value_maps, self.output_dir / VALUE_MAPS_FILE)

    def _answer_queries(self, model: GraphicalModel) -> None:
        answers = []
        for i, entry in enumerate(self.config.queries):
            query = FactoredQuery.from_config(model.domain, entry.get("blocks", {}))
            answer = answer_factored_query(model, query, cap=self.config.parameter_cap)
            answers.append({"name": entry.get("name", f"query{i + 1}"), **answer.to_dict()})
        self.files[QUERIES_FILE] = write_json(answers, self.output_dir / QUERIES_FILE)

    def summary(self, result: RunResult, domain: Domain) -> str:
        """Render the human-readable run summary.

        Args:
            result: Outcome of the run.
            domain: Domain the model is defined over.

        Returns:
            str: The summary text.
        """
        c = self.config
        lines = [
            "marginal-pgm run summary",
            f"domain: {len(domain)} attributes, size {domain.size_string()}",
            f"measurements: {len(result.measurements)}",
            f"junction tree: {result.model_size}",
            f"total: {result.total:.6g} ({c.total_mode})",
            f"algorithm: {result.report.algorithm}, {result.report.iterations} iterations, "
            f"final loss {result.report.final_loss:.10g}",
        ]
        if result.accountant is not None:
            spent = result.accountant.consumed
            lines.append(f"privacy: epsilon {float(spent):.6g} of {float(result.accountant.budget):.6g}"
                         + (" (NON-PRIVATE noiseless run)" if result.accountant.non_private else ""))
        if result.workload_error is not None:
            lines.append(f"workload error: {result.workload_error:.6g}")
        return "\n".join(lines) + "\n"


def run(config: RunConfig) -> RunResult:
    """Run the pipeline for ``config``."""
    return PGMApplication(config).run()
