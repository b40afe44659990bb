"""Evacuation-time estimation toolkit: crowd simulation, surrogate training,
and room-graph aggregation."""

__version__ = "0.1.0"
