"""HTTP service exposing studies, analyses, reports, and the review loop."""

from .app import create_app

__all__ = ["create_app"]
