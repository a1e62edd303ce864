import logging
import os
import uuid
from typing import Any, Dict, Optional

# Setup a default shared logger
logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s [%(levelname)s] %(name)s - %(message)s'
)


def default_config() -> Dict[str, Any]:
    """
    Build the default solver configuration from the environment.

    Default Configuration:
        - tolerance (float): fixed-point stopping tolerance, ∞-norm.
          Env: LOADCOUPLING_TOLERANCE. Default: 1e-9
        - max_iterations (int): fixed-point iteration limit.
          Env: LOADCOUPLING_MAX_ITERATIONS. Default: 10000
        - divergence_cap (float): load above which an iteration is declared
          divergent. Env: LOADCOUPLING_DIVERGENCE_CAP. Default: 1e3
        - node_limit (int): branch-and-bound node limit.
          Env: LOADCOUPLING_NODE_LIMIT. Default: 1000000
        - time_limit (float or None): branch-and-bound wall-clock limit in
          seconds. Env: LOADCOUPLING_TIME_LIMIT. Default: None
        - relative_gap (float): branch-and-bound stopping gap.
          Env: LOADCOUPLING_RELATIVE_GAP. Default: 0.0
        - linearization (str): "secant" or "tangent-mid".
          Env: LOADCOUPLING_LINEARIZATION. Default: "secant"
        - lb_constraints (bool): add the interference lower-bound rows.
          Env: LOADCOUPLING_LB_CONSTRAINTS. Default: True
        - intervals (str): "bounds" for load-bound intervals, "trivial" for
          (0, T). Env: LOADCOUPLING_INTERVALS. Default: "bounds"
    """
    time_limit = os.getenv("LOADCOUPLING_TIME_LIMIT")
    return {
        'tolerance': float(os.getenv("LOADCOUPLING_TOLERANCE", 1e-9)),
        'max_iterations': int(os.getenv("LOADCOUPLING_MAX_ITERATIONS", 10000)),
        'divergence_cap': float(os.getenv("LOADCOUPLING_DIVERGENCE_CAP", 1e3)),
        'node_limit': int(os.getenv("LOADCOUPLING_NODE_LIMIT", 1000000)),
        'time_limit': float(time_limit) if time_limit else None,
        'relative_gap': float(os.getenv("LOADCOUPLING_RELATIVE_GAP", 0.0)),
        'linearization': os.getenv("LOADCOUPLING_LINEARIZATION", "secant"),
        'lb_constraints': os.getenv(
            "LOADCOUPLING_LB_CONSTRAINTS", "1"
        ).lower() not in ("0", "false", "no"),
        'intervals': os.getenv("LOADCOUPLING_INTERVALS", "bounds"),
    }


class Pipeline:
    """
    A processing pipeline that manages a chain of stages.

    Each request flows through a series of stages that enrich it before it
    reaches the core processing function. The stack is reverse-wrapped: every
    stage wraps the next one, with process_core at the center.

    Attributes:
        stage_stack (callable): The compiled stage chain
        stage_classes (list): Stage classes to be included in the pipeline
        config (dict): Configuration dictionary for the pipeline and stages
        logger (Logger): Logger instance shared by the pipeline and stages
    """
    def __init__(self, config: Optional[Dict[str, Any]] = None, logger=None):
        """
        Initialize the pipeline with configuration and logger.

        Args:
            config (Optional[Dict[str, Any]], optional): Overrides for the
                defaults returned by default_config(). Defaults to None.
            logger (Logger, optional): Logger instance to use. If None, the
                "pipeline" logger is used. Defaults to None.
        """
        self.stage_stack = None
        self.stage_classes = []
        self.config = default_config()
        if config:
            self.config.update(config)

        if logger is None:
            self.logger = logging.getLogger("pipeline")
        else:
            self.logger = logger

    def add_stage(self, stage_class):
        """
        Add a stage class to the pipeline.

        Returns:
            self: The pipeline, for method chaining

        Example:
            pipeline = Pipeline().add_stage(LoadBoundsStage).add_stage(SegmentStage)
        """
        self.stage_classes.append(stage_class)
        return self

    def build_stage_stack(self):
        handler = self.process_core

        for stage_class in reversed(self.stage_classes):
            handler = stage_class(
                get_response=handler,
                config=self.config,
                logger=self.logger
            )

        self.stage_stack = handler

    def process_core(self, data, *args, **kwargs):
        """
        Innermost function of the stage chain. Returns the data unchanged;
        subclasses override it.
        """
        self.logger.debug("Core processing executed")
        return data

    def process(self, data, *args, **kwargs):
        """
        Run data through the entire stage stack.

        Note:
            'request_id' and 'pipeline_config' are added to kwargs so every
            stage can tag its log lines and read the shared configuration.
        """
        request_id = str(uuid.uuid4())
        self.logger.info(f"Starting pipeline with request ID: {request_id}")
        if self.stage_stack is None:
            self.build_stage_stack()
        kwargs['request_id'] = request_id
        kwargs['pipeline_config'] = self.config
        return self.stage_stack(data, *args, **kwargs)
