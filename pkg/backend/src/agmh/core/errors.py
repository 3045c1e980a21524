#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""统一异常类型：采样器、目标分布、配置加载共用。"""

from __future__ import annotations

from typing import Optional

import numpy as np


class AGMError(Exception):
	def __init__(self, message: str, original_error: Optional[Exception] = None):
		super().__init__(message)
		self.original_error = original_error


class DimensionError(AGMError):
	def __init__(self, message: str, expected: Optional[int] = None, got: Optional[int] = None, **kwargs):
		super().__init__(message, **kwargs)
		self.expected = expected
		self.got = got


class NonFiniteInputError(AGMError):
	pass


class NotPositiveDefiniteError(AGMError):
	def __init__(self, message: str, component: Optional[int] = None, matrix: Optional[np.ndarray] = None, **kwargs):
		super().__init__(message, **kwargs)
		self.component = component
		self.matrix = matrix


class NotSymmetricError(AGMError):
	def __init__(self, message: str, asymmetry: float = 0.0, matrix: Optional[np.ndarray] = None, **kwargs):
		super().__init__(message, **kwargs)
		self.asymmetry = asymmetry
		self.matrix = matrix


class InvalidChainStateError(AGMError):
	def __init__(self, message: str, state: Optional[np.ndarray] = None, **kwargs):
		super().__init__(message, **kwargs)
		self.state = state


class QuadratureConvergenceError(AGMError):
	def __init__(self, message: str, coarse: Optional[dict] = None, fine: Optional[dict] = None, **kwargs):
		super().__init__(message, **kwargs)
		self.coarse = coarse
		self.fine = fine


class ConfigError(AGMError):
	def __init__(self, message: str, source: str = "", **kwargs):
		super().__init__(message, **kwargs)
		self.source = source
