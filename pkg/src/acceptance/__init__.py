"""Acceptance criteria run by the selftest command."""
