"""Jobs test package."""
