"""
File: errors.py
Description: exception hierarchy; the CLI maps exit_code to the process status
"""

from __future__ import absolute_import


class CodecError(Exception):
    exit_code = 1


class InputError(CodecError):
    exit_code = 2


class DimensionError(InputError, ValueError):
    pass


class PaddingRequiredError(DimensionError):
    pass


class ImageTooSmallError(InputError, ValueError):
    pass


class ModelError(CodecError):
    exit_code = 3


class WrongModelError(ModelError):
    pass


class MalformedLatentsError(ModelError, ValueError):
    pass


class FormatError(CodecError):
    exit_code = 4


class CorruptionError(FormatError):
    def __init__(self, message, offset=None):
        if offset is not None:
            message = f'{message} (byte offset {offset})'
        super(CorruptionError, self).__init__(message)
        self.offset = offset


class DivergenceError(CodecError):
    exit_code = 5

    def __init__(self, message, checkpoint=None):
        super(DivergenceError, self).__init__(message)
        self.checkpoint = checkpoint


class NoOverlapError(CodecError, ValueError):
    pass
