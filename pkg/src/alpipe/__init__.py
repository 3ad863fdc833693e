"""alpipe: pool-based active-learning pipelines and benchmark harness."""

__version__ = "0.1.0"
