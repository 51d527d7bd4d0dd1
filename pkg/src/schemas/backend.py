from enum import Enum


class Backend(str, Enum):
    RATIONAL = "rational"
    FLOAT = "float"

    def __str__(self):
        return self.value
