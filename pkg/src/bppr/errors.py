"""Exception hierarchy shared across the package.

The CLI maps these onto process exit codes: InputError -> 2,
SchemaError -> 3, NumericError -> 4.
"""


class BpprError(Exception):
    """Base class for all package-specific errors."""


class InputError(BpprError):
    """Malformed input values: unreadable files, missing values,
    non-numeric responses, constant columns, bad flag combinations."""


class SchemaError(BpprError):
    """Structural mismatches: missing columns, unknown categorical
    levels, unsupported or malformed model files."""


class NumericError(BpprError):
    """Numerical failures surfaced from the model math."""


class DegenerateProjection(NumericError):
    """All projected values coincide, so no knot interval exists."""


class DegenerateKnots(NumericError):
    """Too few projections exceed the initial knot, or interior knots
    collide with the boundary knot."""


class SingularDesign(NumericError):
    """The design Gram matrix is numerically rank deficient."""


class ChainFormatError(SchemaError):
    """A model file failed to parse or violates the documented schema.

    ``byte_offset`` locates the first offending byte when the failure
    came from the JSON parser; it is None for schema-level violations.
    """

    def __init__(self, message, byte_offset=None):
        super().__init__(message)
        self.byte_offset = byte_offset
