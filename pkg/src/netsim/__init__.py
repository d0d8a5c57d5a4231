"""netsim: multibody simulation of multi-UAV tethered-net target capture.

Core pieces:

- :mod:`netsim.world` -- rigid bodies, point masses, marker constraints,
  spring-damper segments, and the semi-implicit constrained stepper.
- :mod:`netsim.rope`, :mod:`netsim.contact` -- lumped-mass rope/net
  builders and penalty sphere contact.
- :mod:`netsim.uav`, :mod:`netsim.control` -- quadrotor force model,
  rotor allocation, and the cascaded position/attitude controller.
- :mod:`netsim.perception` -- IMU, detection, gimbal tracking, ranging,
  and multi-camera target fusion.
- :mod:`netsim.capture` -- the cooperative capture environment.
"""
from .errors import (BadKnots, CoincidentCenters, ConfigError,
                     DanglingReference, DegenerateBox, DegenerateChord,
                     DegenerateGeometry, EpisodeFinished, InitialViolation,
                     InsufficientObservations, NetsimError, NonFinite,
                     NonPositiveLength, OverConstrained, SingularAllocation,
                     SolverSingular)
from .world import (Constraint, Marker, PointMass, RigidBody, StepConfig,
                    World, assemble)

__version__ = "0.1.0"

__all__ = [
    "World", "RigidBody", "PointMass", "Marker", "Constraint", "StepConfig",
    "assemble",
    "NetsimError", "DanglingReference", "OverConstrained", "InitialViolation",
    "SolverSingular", "NonFinite", "NonPositiveLength", "DegenerateChord",
    "CoincidentCenters", "BadKnots", "SingularAllocation",
    "InsufficientObservations", "DegenerateGeometry", "DegenerateBox",
    "EpisodeFinished", "ConfigError",
    "__version__",
]
