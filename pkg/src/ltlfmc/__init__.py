"""Model checking of transition systems and Moore machines against LTLf."""

__version__ = "0.1.0"
