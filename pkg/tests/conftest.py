import numpy as np
import pytest

# 30-element three-level (2*3*5) demo vector. Crafted so the best (1,2,2)
# hierarchical approximation keeps {1, 4, 10, 13} while plain top-4
# selection keeps {1, 9, 19, 24}.
REFERENCE_VALUES = np.array([
    0.2, 10.0, 0.3, 0.4, 4.5,
    0.5, 0.6, 0.2, 0.3, 5.0,
    4.4, 0.3, 0.2, 4.3, 0.5,
    0.4, 0.2, 0.6, 0.3, 5.2,
    0.5, 0.3, 0.2, 0.4, 5.1,
    0.6, 0.2, 0.3, 0.5, 0.4,
], dtype=np.complex128)

REFERENCE_HIER_SUPPORT = {1, 4, 10, 13}
REFERENCE_FLAT_SUPPORT = {1, 9, 19, 24}


@pytest.fixture
def reference_vector():
    return REFERENCE_VALUES.copy()
