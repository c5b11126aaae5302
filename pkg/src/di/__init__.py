"""
依賴注入 (Dependency Injection) 模組

使用方式：
    >>> from src.di import get_service_factory
    >>> E = get_service_factory().structure("vect:2,2")
"""

from src.di.service_factory import ServiceFactory, get_service_factory

__all__ = [
    'ServiceFactory',
    'get_service_factory',
]
