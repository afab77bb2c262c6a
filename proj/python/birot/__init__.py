"""Swirl-free bi-rotational Euler simulator on the quadrant."""

try:
    from . import _birot as _impl  # installed layout: birot/_birot.so
except ImportError:  # build-tree layout: _birot.so on sys.path
    import _birot as _impl

GridSpec = _impl.GridSpec
QuadratureSpec = _impl.QuadratureSpec
Stagger = _impl.Stagger
assemble_tensor = _impl.assemble_tensor
axis_regularity_estimate = _impl.axis_regularity_estimate
biot_savart = _impl.biot_savart
brute_force_velocity_4d = _impl.brute_force_velocity_4d
divergence_residual = _impl.divergence_residual
eval_Fr = _impl.eval_Fr
eval_Fs = _impl.eval_Fs
f_a = _impl.f_a
lorentz_norm = _impl.lorentz_norm
lp_norm = _impl.lp_norm
measure_weight = _impl.measure_weight
rearrange = _impl.rearrange
run_scenario = _impl.run_scenario
solve_stream = _impl.solve_stream
velocity_from_stream = _impl.velocity_from_stream
verify = _impl.verify
w_from_zeta = _impl.w_from_zeta
x_minus_minus = _impl.x_minus_minus
zeta_from_w = _impl.zeta_from_w

__all__ = [
    "GridSpec",
    "QuadratureSpec",
    "Stagger",
    "assemble_tensor",
    "axis_regularity_estimate",
    "biot_savart",
    "brute_force_velocity_4d",
    "divergence_residual",
    "eval_Fr",
    "eval_Fs",
    "f_a",
    "lorentz_norm",
    "lp_norm",
    "measure_weight",
    "rearrange",
    "run_scenario",
    "solve_stream",
    "velocity_from_stream",
    "verify",
    "w_from_zeta",
    "x_minus_minus",
    "zeta_from_w",
]
