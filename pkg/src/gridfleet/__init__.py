"""gridfleet: a carrier-collaboration testbed on a marker grid.

Software agents for an orchestrator, carrier depots, trucks and customers
coordinate delivery tours over a simulated grid map; a gateway service
mirrors every run as a live, replayable event stream.
"""

__version__ = "0.1.0"
