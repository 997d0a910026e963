"""Exception types shared across the package."""


class HowieError(Exception):
    """Base class for all errors raised by this package."""


class StructureError(HowieError):
    """Operands live over different base groups or factor structures."""


class WordSyntaxError(HowieError):
    """A word string does not match the serialization grammar."""


class NotUnimodular(HowieError):
    """The relator word does not have t-exponent sum one."""


class TorsionBase(HowieError):
    """The base group has torsion and no override was given."""


class NormalizationFailed(HowieError):
    """Height rewriting produced data violating the normal-form conditions."""


class NotInDomain(HowieError):
    """Argument lies outside the domain of the shift isomorphism."""


class DiagramError(HowieError):
    """Malformed diagram input or sphere/orientation violation."""


class ScheduleError(HowieError):
    """A standard motion cannot be built on the given diagram."""


class NoSuchConjugate(HowieError):
    """No conjugating power produces the required boundary corners."""


class CertificateError(HowieError):
    """A certificate is malformed or cannot be read off a diagram."""
