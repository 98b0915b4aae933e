"""Generalized coherent states over compact Lie groups.

Thin wrapper over the C++ core. State vectors and group elements are numpy
complex arrays; algebra coefficients are real arrays.
"""

from ._coherent import (
    CoherentError,
    Rep,
    Schedule,
    __version__,
    berry_connection,
    canonicalize,
    classify_informative,
    conjugate_generator,
    dirac_check,
    discrete_propagator,
    exactness_threshold,
    exp_element,
    fitted_order,
    flow_coadjoint,
    haar_quadrature,
    highest_weight_fiducial,
    identity_resolution,
    load_generator_file,
    matsumoto_fiducial,
    moment_map,
    propagate_quantum,
    run_config,
    spin_rep,
    validate_algebra,
    van_hove_check,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
