"""The truncated homotopy series and its Bessel-function error model.

The series x(t) = (A + c*lambda^2) cos(omega*t) corrects a small-amplitude
primary oscillation; its truncation error is modeled as A*J0(lambda), which
|J0| <= 1 caps at |A| for every lambda.
"""

import numpy as np

from duffinglab import (
    DEFAULT_HOMOTOPY,
    analytical_undamped,
    bessel_j0,
    error_bound,
    error_model,
    homotopy_approx,
)

h = DEFAULT_HOMOTOPY
print(f"series instance: amplitude {h.amplitude}, omega {h.omega}, "
      f"lambda {h.lambda_h}, correction {h.correction_coeff}")
print(f"value at t=0: {homotopy_approx(h, 0.0):.12f} "
      f"(primary {h.amplitude}, correction {h.correction_coeff * h.lambda_h**2:.3e})")

print("\nprimary vs corrected series over one cycle:")
for t in np.linspace(0.0, 2 * np.pi / h.omega, 9):
    primary = analytical_undamped(h.amplitude, 0.0, h.omega, float(t))
    print(f"  t={t:7.2f}  primary {primary:+.6f}  total {homotopy_approx(h, float(t)):+.6f}")

print("\nBessel-based error model A*J0(lambda), A = 0.05:")
for lam in (0.0, 0.25, 0.5, 0.75, 1.0):
    est = error_model(0.05, lam)
    print(f"  lambda={lam:4.2f}  J0={bessel_j0(lam):+.6f}  error estimate {est:+.6f}")
print(f"bound for any lambda: |error| <= {error_bound(0.05)}")
