from src.models.models import JobSpec, Report

__all__ = ['JobSpec', 'Report']
