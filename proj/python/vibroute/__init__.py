"""Road-vibration route toolkit.

Classify 1 Hz vehicle telemetry into mobility areas (A1/A2/A3) with a
kernel-density classifier, score routes by severity-weighted travel time,
and recommend the route that minimises patient-cabin vibration.
"""

from vibroute._core import *  # noqa: F401,F403
from vibroute._core import __version__  # noqa: F401
