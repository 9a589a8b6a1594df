"""Sparse frame selection.

Consecutive frames are highly redundant, so a fixed number of frames is
taken at a uniform stride across the whole clip rather than densely.
"""

from .errors import InvalidInputError


def sample_frame_indices(total_frames: int, n: int) -> list[int]:
    """The n frame indices to keep from a clip of total_frames.

    index_i = floor(i * total_frames / n): nondecreasing, always within
    [0, total_frames). Clips shorter than n repeat indices so the output
    length is exactly n (a one-frame clip yields n zeros).
    """
    total_frames = int(total_frames)
    n = int(n)
    if total_frames < 1:
        raise InvalidInputError("total_frames must be >= 1")
    if n < 1:
        raise InvalidInputError("n must be >= 1")
    return [i * total_frames // n for i in range(n)]
