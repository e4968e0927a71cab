"""
Exception hierarchy for the scene grammar parser.

Everything a caller can fix by changing its input subclasses ``ValueError`` so the
CLI can map it to the validation exit code in one place.
"""


class SceneGrammarError(Exception):
    """Base class for all errors raised by this package."""


class SchemaError(SceneGrammarError, ValueError):
    """An input file or in-memory object violates its schema or invariants."""


class PlaneFitError(SceneGrammarError, ValueError):
    """A plane cannot be fitted to the given statistics."""


class CyclicGrammarError(SceneGrammarError, ValueError):
    """Intermediate symbols are defined in terms of themselves."""


class NotDerivableError(SceneGrammarError, ValueError):
    """A ground-truth tree node cannot be derived with the grammar's rules."""


class ConflictingModelsError(SceneGrammarError, ValueError):
    """Two grammars carry different models for the same rule."""


class ModelError(SceneGrammarError, ValueError):
    """A rule model is missing, mismatched, or produced a non-finite density."""


class FeatureSchemaError(SceneGrammarError, ValueError):
    """Feature arity or schema id does not match what a model expects."""


class TerminalLimitError(SceneGrammarError, ValueError):
    """A scene is too large for the exhaustive parser."""


class LabelDomainError(SceneGrammarError, ValueError):
    """Predicted and gold label maps cover different segments."""
