"""Stability control of a wheel-legged vehicle through a movable centre-of-mass slider.

Modules: ``mechanism`` (slider plant), ``vehicle`` (bicycle model and the
stability factor), ``kinematics`` and ``gait`` (humanoid walking), ``grader``
(K-means stability levels), ``fuzzy`` and ``adrc`` (controllers),
``supervisor`` (mode switching), ``harness`` (closed-loop scenarios) and
``cli``.
"""
__version__ = "0.1.0"
