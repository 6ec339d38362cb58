import numpy as np
import pytest

from eqarea.flux import buckley_leverett, parse_flux_spec, polynomial_flux

# the two tangency states of the quartic (u^2 - 2u)^2 between 0 and 2
E1_USTAR = 2.0 / 3.0
E1_SPEED = 32.0 / 27.0
# bitangent of u^4/4 - 5u^3/3 + 3u^2 and its slope
E3_A = (5.0 - np.sqrt(21.0)) / 3.0
E3_B = (5.0 + np.sqrt(21.0)) / 3.0
E3_SPEED = 20.0 / 27.0
# tangency roots of the same flux anchored at zero
E3_T1 = (20.0 - 2.0 * np.sqrt(19.0)) / 9.0
E3_T2 = (20.0 + 2.0 * np.sqrt(19.0)) / 9.0
# Buckley-Leverett (M = 1/2) shock data
BL_USTAR = 1.0 / np.sqrt(3.0)
BL_SPEED = (1.0 + np.sqrt(3.0)) / 2.0


@pytest.fixture(scope="session")
def flux_e1():
    return parse_flux_spec("polynomial:[0,0,4,-4,1]")


@pytest.fixture(scope="session")
def flux_e3():
    return polynomial_flux([0.0, 0.0, 3.0, -5.0 / 3.0, 0.25])


@pytest.fixture(scope="session")
def flux_bl():
    return buckley_leverett(0.5)


@pytest.fixture(scope="session")
def flux_square():
    return polynomial_flux([0.0, 0.0, 1.0])
