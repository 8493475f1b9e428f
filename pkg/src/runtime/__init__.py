"""Runtime plumbing for the Gaussian area verification suite: config, logging, errors."""

__version__ = "1.0.0"
