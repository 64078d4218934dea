"""Shared rate limiter for the mock annealer routes"""
from slowapi import Limiter
from slowapi.util import get_remote_address

from src.config import settings

limiter = Limiter(key_func=get_remote_address, enabled=settings.rate_limit_enabled)

SOLVE_LIMIT = f"{settings.rate_limit_requests}/{settings.rate_limit_window}"
