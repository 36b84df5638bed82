"""
QH Gromov - API 모듈
"""

from .routes import resolve_domain, router

__all__ = ["router", "resolve_domain"]
