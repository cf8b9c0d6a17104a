"""Affective stage engine.

Phrase-level voice features feed a supervised emotion classifier whose
recognized states drive a troupe of image-composing agents.  The whole loop
runs on a deterministic logical clock and every session is event-sourced for
bit-exact replay.
"""

__version__ = "0.1.0"
