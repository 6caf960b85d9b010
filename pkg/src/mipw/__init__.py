"""mipw: a workbench for word-level metaphoricity annotation with LLMs."""

__version__ = "0.1.0"
