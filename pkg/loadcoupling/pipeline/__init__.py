from .pipeline import Pipeline, default_config
from .stage import Stage
