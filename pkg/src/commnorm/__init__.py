"""Distributional learning and distinguishing from 2-party communication structure.

Subpackages follow the pipeline: ``corefn`` (Boolean-function substrate),
``norm`` (exact and Monte-Carlo 2-party norms, natural-property test),
``concepts`` (evaluation rules, target and example distributions, oracle),
``learner`` (weak predictor, candidate selection, filtering booster),
``games`` (communication games, correlation-bound falsification, weak-PRF
harness), ``cli`` (batch experiment runner).
"""

__version__ = "0.1.0"
