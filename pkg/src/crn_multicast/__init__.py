"""Monte-Carlo simulator for ETX-based multicast routing in cognitive radio networks."""

__version__ = "0.1.0"
