import numpy as np
import pytest

from inpaintkit import ClickPrompt, Image, Mask, PipelineConfig, validate_image
from inpaintkit.errors import (
    ChannelMismatch,
    ConfigError,
    DimensionTooLarge,
    EmptyImage,
    PointOutOfBounds,
)
from inpaintkit.model import ClickPoint, PointLabel


def rgb(h, w, value=0):
    return np.full((h, w, 3), value, dtype=np.uint8)


class TestValidateImage:
    def test_accepts_512_square_unchanged(self):
        raster = rgb(512, 512, 7)
        image = validate_image(raster)
        assert (image.width, image.height) == (512, 512)
        assert np.array_equal(image.pixels, raster)

    def test_rejects_4097_wide(self):
        with pytest.raises(DimensionTooLarge):
            validate_image(rgb(100, 4097))

    def test_accepts_1x1(self):
        image = validate_image(rgb(1, 1, 255))
        assert (image.width, image.height) == (1, 1)

    def test_accepts_4096_boundary(self):
        image = validate_image(rgb(1, 4096))
        assert image.width == 4096

    def test_drops_alpha_with_warning(self, caplog):
        raster = np.zeros((4, 4, 4), dtype=np.uint8)
        raster[..., 3] = 128
        with caplog.at_level("WARNING"):
            image = validate_image(raster)
        assert image.pixels.shape == (4, 4, 3)
        assert any("alpha" in record.message for record in caplog.records)

    def test_rejects_single_channel(self):
        with pytest.raises(ChannelMismatch):
            validate_image(np.zeros((4, 4, 1), dtype=np.uint8))

    def test_rejects_2d(self):
        with pytest.raises(ChannelMismatch):
            validate_image(np.zeros((4, 4), dtype=np.uint8))

    def test_rejects_empty(self):
        with pytest.raises(EmptyImage):
            validate_image(np.zeros((0, 5, 3), dtype=np.uint8))

    def test_rejects_16bit(self):
        with pytest.raises(ChannelMismatch):
            validate_image(np.zeros((4, 4, 3), dtype=np.uint16))


class TestImageInvariants:
    def test_buffer_length_always_w_h_3(self, rng):
        for _ in range(20):
            h = int(rng.integers(1, 64))
            w = int(rng.integers(1, 64))
            image = validate_image(rng.integers(0, 256, (h, w, 3), dtype=np.uint8))
            assert image.pixels.size == w * h * 3

    def test_pixels_are_read_only(self):
        image = validate_image(rgb(4, 4))
        with pytest.raises(ValueError):
            image.pixels[0, 0, 0] = 1


class TestMask:
    def test_from_array_accepts_zero_one(self):
        mask = Mask.from_array(np.array([[0, 1], [1, 0]], dtype=np.uint8))
        assert mask.area == 2

    def test_from_array_rejects_other_values(self):
        with pytest.raises(ChannelMismatch):
            Mask.from_array(np.array([[0, 2]], dtype=np.uint8))

    def test_bits_are_read_only(self):
        mask = Mask(np.zeros((3, 3), bool))
        with pytest.raises(ValueError):
            mask.bits[0, 0] = True


class TestClickPrompt:
    def test_requires_positive_point(self):
        with pytest.raises(PointOutOfBounds):
            ClickPrompt((ClickPoint(1, 1, PointLabel.NEGATIVE),))

    def test_bounds_check(self):
        prompt = ClickPrompt.single(5, 5)
        prompt.check_bounds(6, 6)
        with pytest.raises(PointOutOfBounds):
            prompt.check_bounds(5, 6)

    def test_negative_coordinate_out_of_bounds(self):
        prompt = ClickPrompt(
            (ClickPoint(-1, 0, PointLabel.POSITIVE),)
        )
        with pytest.raises(PointOutOfBounds):
            prompt.check_bounds(10, 10)


class TestPipelineConfig:
    def test_defaults_are_valid(self):
        config = PipelineConfig()
        assert config.dilate_radius_remove == 15
        assert config.dilate_radius_fill_min == 35
        assert config.dilate_fraction_fill == pytest.approx(0.10)
        assert config.working_resolution == 512
        assert config.crop_margin == pytest.approx(0.25)

    def test_working_resolution_must_be_multiple_of_8(self):
        with pytest.raises(ConfigError):
            PipelineConfig(working_resolution=500)
        with pytest.raises(ConfigError):
            PipelineConfig(working_resolution=0)

    def test_negative_radius_rejected(self):
        with pytest.raises(ConfigError):
            PipelineConfig(dilate_radius_remove=-1)

    def test_negative_margin_rejected(self):
        with pytest.raises(ConfigError):
            PipelineConfig(crop_margin=-0.1)
