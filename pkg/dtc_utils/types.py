from typing import Union

import numpy as np
import numpy.typing as npt
from typing_extensions import TypeAlias

ComplexMatrix: TypeAlias = "npt.NDArray[np.complex128]"
RealVector: TypeAlias = "npt.NDArray[np.float64]"

# 1-based party position within a MultipartiteState.
Party: TypeAlias = int

SeedLike: TypeAlias = Union[int, np.random.SeedSequence]
