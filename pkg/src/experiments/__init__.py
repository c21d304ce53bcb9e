from .base import BaseExperiment, Failure, Report, Table
