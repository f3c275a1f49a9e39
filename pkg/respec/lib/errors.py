"""
Respec - Copyright (C) 2026 the respec developers

    This program is free software: you can redistribute it and/or modify
    it under the terms of the GNU General Public License as published by
    the Free Software Foundation, either version 3 of the License, or
    (at your option) any later version.

    This program is distributed in the hope that it will be useful,
    but WITHOUT ANY WARRANTY; without even the implied warranty of
    MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
    GNU General Public License for more details.

    You should have received a copy of the GNU General Public License
    along with this program.  If not, see <https://www.gnu.org/licenses/>
"""

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_NUMERICAL = 2
EXIT_IO = 3


class RespecError(Exception):
    """ Base error

        every error carries a json payload:
            {'error': <class name>, 'message': ..., **details}
    """

    exit_code = EXIT_DOMAIN

    def __init__(self, message='', **details):
        super().__init__(message)
        self.details = details

    def to_json(self):
        payload = {'error': self.__class__.__name__, 'message': str(self)}
        payload.update(self.details)
        return payload


class DomainError(RespecError):
    """ Invalid input or violated precondition
    """
    exit_code = EXIT_DOMAIN


class NumericalError(RespecError):
    """ Solver failure
    """
    exit_code = EXIT_NUMERICAL


class OverlapError(DomainError):
    """ Resonator closures intersect each other or the outer boundary
    """

    def __init__(self, message='', pair=None, **details):
        if pair is not None:
            details['pair'] = list(pair)
        super().__init__(message, **details)
        self.pair = pair


class WindowError(DomainError):
    """ Window not strictly inside the flat edge """


class ScaleError(DomainError):
    """ Scaling law produced d >= eps """


class NonPositiveVolume(DomainError):
    """ Resonator volume <= 0 """


class GeometryError(DomainError):
    """ Invalid outer shape """


class SceneError(DomainError):
    """ Malformed scene document """


class ResolutionError(DomainError):
    """ Grading too coarse for the smallest window """


class DegenerateElement(DomainError):
    """ Zero area triangle """

    def __init__(self, message='', element=None, **details):
        if element is not None:
            details['element'] = int(element)
        super().__init__(message, **details)


class EmptySystem(DomainError):
    """ All degrees of freedom eliminated """


class CountTooLarge(DomainError):
    """ More eigenpairs requested than degrees of freedom """


class BadDimension(DomainError):
    """ Dimension or scale out of range """


class EmptySet(DomainError):
    """ Distance between empty sets """


class CutoffMismatch(DomainError):
    """ Truncated spectra with different cutoffs """


class MissingVectors(DomainError):
    """ Spectrum without eigenvectors """


class InsufficientData(DomainError):
    """ Not enough rows to fit """


class InvariantViolation(DomainError):
    """ Value type invariant violated """


class BracketFailure(DomainError):
    """ Corner ordering violated, eps too large for these targets
    """

    def __init__(self, message='eps too large for these targets', **details):
        super().__init__(message, **details)


class NoConvergence(NumericalError):
    """ Iteration cap reached

        partial - whatever the solver got before giving up
    """

    def __init__(self, message='', partial=None, **details):
        super().__init__(message, **details)
        self.partial = partial


class NotPositiveDefinite(NumericalError):
    """ Matrix failed the positive definiteness precondition """


class MonotonicityViolation(NumericalError):
    """ Oracle eigenvalues decreased while a window grew """


def exit_code_for(payload):
    """ Exit code of a to_json() payload
    """
    cls = globals().get(payload.get('error')) if payload else None
    if isinstance(cls, type) and issubclass(cls, RespecError):
        return cls.exit_code
    return EXIT_DOMAIN
