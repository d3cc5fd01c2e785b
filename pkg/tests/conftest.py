"""Shared test configuration.

Keeps hypothesis deadlines off; several properties run exact integer
recursions whose first call dominates the profile.
"""

from __future__ import annotations

from hypothesis import settings

settings.register_profile("exact", deadline=None, max_examples=60)
settings.load_profile("exact")
