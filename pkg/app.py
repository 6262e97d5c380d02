"""ASGI entrypoint for the workbench JSON API."""

from src.webapp import app

__all__ = ["app"]
