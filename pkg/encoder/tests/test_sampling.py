import pytest
from hypothesis import given, strategies as st

from vpencode import sample_frame_indices
from vpencode.errors import InvalidInputError


class TestExamples:
    def test_320_frames_32_samples_is_stride_10(self):
        assert sample_frame_indices(320, 32) == list(range(0, 320, 10))

    def test_single_frame_video_repeats_zero(self):
        assert sample_frame_indices(1, 32) == [0] * 32

    def test_equal_counts_is_identity(self):
        assert sample_frame_indices(32, 32) == list(range(32))

    def test_short_video_repeats_indices(self):
        out = sample_frame_indices(3, 8)
        assert len(out) == 8
        assert set(out) <= {0, 1, 2}

    def test_floor_formula(self):
        # 7 frames, 3 samples: floor(0*7/3)=0, floor(7/3)=2, floor(14/3)=4
        assert sample_frame_indices(7, 3) == [0, 2, 4]


class TestValidation:
    def test_zero_frames_rejected(self):
        with pytest.raises(InvalidInputError):
            sample_frame_indices(0, 4)

    def test_zero_samples_rejected(self):
        with pytest.raises(InvalidInputError):
            sample_frame_indices(4, 0)

    def test_negative_rejected(self):
        with pytest.raises(InvalidInputError):
            sample_frame_indices(-3, 4)


class TestProperties:
    @given(st.integers(1, 5000), st.integers(1, 256))
    def test_length_range_and_monotonicity(self, total, n):
        out = sample_frame_indices(total, n)
        assert len(out) == n
        assert all(0 <= i < total for i in out)
        assert all(a <= b for a, b in zip(out, out[1:]))

    @given(st.integers(1, 5000), st.integers(1, 256))
    def test_first_index_is_zero(self, total, n):
        assert sample_frame_indices(total, n)[0] == 0

    @given(st.integers(1, 256), st.integers(1, 20))
    def test_covers_all_frames_when_oversampling(self, total, mult):
        # sampling at least one index per frame touches every frame
        out = sample_frame_indices(total, total * mult)
        assert set(out) == set(range(total))
