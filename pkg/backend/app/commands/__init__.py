from . import evaluate, generate, persistence, solve, verify

COMMANDS = {m.NAME: m for m in (solve, generate, evaluate, persistence, verify)}

__all__ = ["COMMANDS"]
