__all__ = [
    "config",
    "errors",
    "models",
    "schemas",
]
