"""Models for problems, scheme configuration, and artifact paths."""
