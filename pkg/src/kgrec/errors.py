"""Exception types shared across the package.

Everything raised on purpose derives from KgrecError so callers (service,
CLI) can map domain failures to exit codes / HTTP statuses in one place.
"""

from __future__ import annotations


class KgrecError(Exception):
    """Base class for all domain errors."""


# --- graph store ---------------------------------------------------------

class InvalidName(KgrecError):
    """Topic or verb name fails normalization (lowercase, hyphenated, no whitespace)."""


class DuplicateName(KgrecError):
    """A non-rejected topic/verb with the same name already exists."""


class UnknownTopic(KgrecError):
    pass


class UnknownRelationType(KgrecError):
    pass


class UnknownRelationship(KgrecError):
    pass


class DuplicateRelationship(KgrecError):
    """A non-rejected relationship with the same key already exists."""


class InvariantViolation(KgrecError):
    """Structural invariant broken (dangling reference, self loop, bad state)."""


class ParseError(KgrecError):
    """Snapshot/record stream could not be decoded."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


# --- curation ------------------------------------------------------------

class UnknownContributor(KgrecError):
    pass


class NotReliable(KgrecError):
    """Contributor's reliability is revoked (or never granted)."""


class NotCreator(KgrecError):
    """Contributor lacks creator-level permissions."""


class VerbUnread(KgrecError):
    """Contributor has not marked the relationship's verb definition as read."""


class AlreadyResolved(KgrecError):
    """The relationship's vote is closed; no further votes accepted."""


class EmptyInput(KgrecError):
    """A metric was asked for over an empty collection."""


# --- weighting / augmentation --------------------------------------------

class InvalidCoefficients(KgrecError):
    """alpha/beta must be non-negative and sum to 1."""


class EmptyGraph(KgrecError):
    """No topics available to weight."""


class UnknownSeedTopic(KgrecError):
    pass


# --- classifier ----------------------------------------------------------

class EmptyCorpus(KgrecError):
    pass


class LabelWithoutSupport(KgrecError):
    """A label in the training space has no positive documents."""


class UntrainedModel(KgrecError):
    pass


class DidNotConverge(Warning):
    """Optimizer stopped before reaching the requested tolerance (warning-grade)."""


# --- baselines / evaluation ----------------------------------------------

class UnknownProject(KgrecError):
    pass


class TooSmall(KgrecError):
    """Corpus too small to split."""


class MissingJudgments(KgrecError):
    """Manual-mode evaluation lacks judgments for a recommended topic."""


# --- service / popularity --------------------------------------------------

class AllSourcesUnavailable(KgrecError):
    """Neither the live popularity endpoint nor a cache file could serve counts."""


class CorruptSnapshot(KgrecError):
    """Durable store state cannot be recovered."""


class BindFailure(KgrecError):
    """Service could not bind its listen address."""
