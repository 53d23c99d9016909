from __future__ import annotations

import functools

import pytest

from layercodes.builder import build_layer_code
from layercodes.css import builtin

BUILTINS = ["rep(3)", "c422", "shor", "steane"]


@functools.lru_cache(maxsize=None)
def layer(name: str, c: int = 2):
    """Layer codes are immutable, so one build per input is shared across tests."""
    return build_layer_code(builtin(name), c)


@pytest.fixture(params=BUILTINS)
def builtin_name(request):
    return request.param
