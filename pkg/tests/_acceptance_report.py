"""Shared sink for acceptance verdict lines.

test_acceptance.py appends one line per criterion; the conftest terminal
summary hook prints the collected checklist at the end of the run, where
pytest's output capture cannot swallow it.
"""

lines: list[str] = []
