from typing import List, Union, Tuple, NewType

import numpy as np


SegmentKey = NewType("SegmentKey", Tuple[str, int])
RatePoint = NewType("RatePoint", Union[List[float], Tuple[float, float]])
RatePoints = NewType("RatePoints", Union[List[RatePoint], Tuple[RatePoint], np.ndarray])
