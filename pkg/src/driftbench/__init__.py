"""driftbench: chronological-drift benchmarking and AutoML for sensor data.

Train on early batches, test on later (more drifted) ones, and search the
joint algorithm/hyperparameter/preprocessing space for pipelines that hold up
under that regime.
"""

from . import data, ensemble, learners, metrics, preprocess, search

__version__ = "0.1.0"

__all__ = ["data", "preprocess", "learners", "search", "ensemble", "metrics", "__version__"]
