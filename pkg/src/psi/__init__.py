"""Polymorphic System I kernel: isomorphism decision, typing modulo isomorphism, reduction."""

KERNEL_VERSION = "0.4.1"
TRACE_SCHEMA_VERSION = 1

__all__ = ["KERNEL_VERSION", "TRACE_SCHEMA_VERSION"]
