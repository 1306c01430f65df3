"""medlab: autonomous medical-AI research pipeline and benchmark harness."""

__version__ = "0.1.0"
