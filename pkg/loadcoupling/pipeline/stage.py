import logging


class Stage:
    """
    Base class for one step of a Pipeline.

    Each stage receives the request, does its part of the work and hands the
    request to the next stage through get_response.

    Attributes:
        get_response (callable): Calls the next stage in the chain
        config (dict): Global configuration dictionary shared by all stages
        stage_config (dict): Settings keyed by this stage's class name
        logger (Logger): Logger instance configured for this stage
    """
    def __init__(self, get_response, config=None, logger=None):
        self.get_response = get_response
        self.config = config or {}

        stage_name = self.__class__.__name__
        self.stage_config = config.get(stage_name, {}) if config else {}

        if logger is None:
            self.logger = logging.getLogger(
                f"pipeline.{self.__class__.__name__}"
            )
        else:
            # Child logger keeps the hierarchy under the injected logger
            self.logger = logger.getChild(self.__class__.__name__)

    def setting(self, key, default=None):
        """Stage-specific value for key, falling back to the global config."""
        if key in self.stage_config:
            return self.stage_config[key]
        return self.config.get(key, default)

    def __call__(self, request, *args, **kwargs):
        request_id = kwargs.get('request_id', 'unknown')
        self.logger.info(
            f"[{request_id}] Processing in {self.__class__.__name__}"
        )
        self.handle(request)
        return self.get_response(request, *args, **kwargs)

    def handle(self, request):
        """Do this stage's work on request in place. No-op by default."""
