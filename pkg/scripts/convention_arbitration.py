"""Compare the two normalizations of eta on every geometric entry.

For the slice curvatures nu_i and for the chart's spatial block this prints the
worst residual under ``slice_unit`` (eta unit for rho^2 g_F) and ``fiber_unit``
(eta unit for g_F). The library picks the smaller one; this script shows how
far apart they are.
"""
import numpy as np

from nullscreen.catalog import REGISTRY, catalog_get
from nullscreen.chart import make_patch, pullback_metric_residual
from nullscreen.isoparam import screen_spectrum, slice_relation
from nullscreen.nullhyp import build_null_frame
from nullscreen.rng import Xorshift64Star

N = 3
print(f"{'entry':<24} {'cbar':>4}  {'nu slice_unit':>13} {'nu fiber_unit':>13}  {'chart slice_unit':>16} {'chart fiber_unit':>16}")
for name, entry in REGISTRY.items():
    if entry.control:
        continue
    g = catalog_get(name, N)
    rng = Xorshift64Star(1)
    rel = {"slice_unit": 0.0, "fiber_unit": 0.0}
    for _ in range(20):
        frame = build_null_frame(g, g.sample_point(rng))
        for k, v in slice_relation(g, frame, screen_spectrum(g, frame)).items():
            rel[k] = max(rel[k], v)
    patch = make_patch(g, 0.5 * sum(g.t_range), 10, rng)
    chart = {"slice_unit": 0.0, "fiber_unit": 0.0}
    for q in patch.base_points:
        for s in np.linspace(-0.9 * patch.eps, 0.9 * patch.eps, 5):
            for k, v in pullback_metric_residual(patch, s, q).spatial.items():
                chart[k] = max(chart[k], v)
    print(f"{name:<24} {g.model.cbar:>4}  {rel['slice_unit']:>13.2e} {rel['fiber_unit']:>13.2e}  "
          f"{chart['slice_unit']:>16.2e} {chart['fiber_unit']:>16.2e}")
