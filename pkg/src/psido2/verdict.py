"""Three-valued verdicts for questions that truncation may leave undecided."""
from enum import Enum


class Tri(str, Enum):
    TRUE = "true"
    FALSE = "false"
    INCONCLUSIVE = "inconclusive"

    @classmethod
    def of(cls, flag: bool) -> "Tri":
        return cls.TRUE if flag else cls.FALSE

    def __bool__(self):
        # Refuse to silently collapse "inconclusive" into a boolean.
        if self is Tri.INCONCLUSIVE:
            raise TypeError("inconclusive verdict used as a boolean")
        return self is Tri.TRUE

    def __str__(self):
        return self.value
