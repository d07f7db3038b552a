"""isacsim: closed-form and Monte Carlo analysis of a NOMA-based
integrated sensing and communication system with signal alignment."""

__version__ = "0.1.0"
