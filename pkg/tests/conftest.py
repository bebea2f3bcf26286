import math

import pytest
from hypothesis import HealthCheck, settings

from photonic_repeater.repeater import HardwareParams, LinkParams, compose_depolarizing, make_config

settings.register_profile(
    "default",
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

ETA = math.sqrt(0.95)
CASE_HW = HardwareParams(eta_s=ETA, eta_d=ETA)
MUNRO_HW = HardwareParams(eta_s=0.97, eta_d=0.97)
E_D = 4.2e-5
E_D_8KM = compose_depolarizing(E_D, 2)

# (hardware, L, L0, e_d, m, branches) of every published operating point
PUBLISHED_POINTS = {
    "case1_5000km": (CASE_HW, 5000.0, 4.0, E_D, 24, (16, 14, 1)),
    "case1_1000km": (CASE_HW, 1000.0, 4.0, E_D, 19, (11, 11, 1)),
    "case2_5000km": (CASE_HW, 5000.0, 8.0, E_D_8KM, 27, (17, 28, 2)),
    "case2_1000km": (CASE_HW, 1000.0, 8.0, E_D_8KM, 21, (12, 23, 2)),
    # 129 source nodes at 6.15 km spacing: L = 130 * 6.15
    "munro_800km": (MUNRO_HW, 799.5, 6.15, 3.08e-4, 20, (10, 20, 2)),
}


def published_config(name: str):
    hw, L, L0, e_d, m, branches = PUBLISHED_POINTS[name]
    return make_config(m, branches, hw, LinkParams(L, L0, e_d))


@pytest.fixture(params=sorted(PUBLISHED_POINTS))
def published_point(request):
    return request.param, published_config(request.param)
