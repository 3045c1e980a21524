#!/usr/bin/env python3
# -*- coding: utf-8 -*-
import os
import sys

import numpy as np
import pytest

# Add backend/src to path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from agmh.core.settings import get_settings  # noqa: E402


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(autouse=True)
def _isolated_settings(monkeypatch, tmp_path):
    """每个测试使用独立的输出目录与线程池，避免读到本地 .env。"""
    monkeypatch.setenv("AGMH_OUTPUT_DIR", str(tmp_path / "output"))
    monkeypatch.setenv("AGMH_EXECUTOR", "thread")
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()
