"""Quantum-kernel SVM and QCNN pipelines for pulsar classification."""

__version__ = "0.1.0"
