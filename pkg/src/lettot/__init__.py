"""Label-free LLM evaluation via expert element frameworks."""

__version__ = "0.1.0"
