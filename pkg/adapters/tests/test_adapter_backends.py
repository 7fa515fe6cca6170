import numpy as np
import pytest

from orgamask_adapters import AdapterError, get_backend
from orgamask_adapters.geometry import component_centroids, connected_components

from imagefx import well_image


class TestGeometry:
    def test_components_in_raster_discovery_order(self):
        mask = np.zeros((4, 6), dtype=bool)
        mask[3, 0] = True          # discovered last despite lowest column
        mask[0, 4] = True
        mask[1, 1] = True
        components = connected_components(mask)
        assert [pixels[0] for pixels in components] == [(0, 4), (1, 1), (3, 0)]

    def test_diagonal_pixels_join(self):
        mask = np.zeros((3, 3), dtype=bool)
        mask[0, 0] = mask[1, 1] = mask[2, 2] = True
        assert len(connected_components(mask)) == 1

    def test_centroids_are_pixel_means(self):
        mask = np.zeros((4, 4), dtype=bool)
        mask[0:2, 0:2] = True
        mask[3, 3] = True
        assert component_centroids(mask) == [(0.5, 0.5), (3.0, 3.0)]

    def test_empty_mask_has_no_centroids(self):
        assert component_centroids(np.zeros((3, 3), dtype=bool)) == []


@pytest.fixture
def backend():
    return get_backend("synthetic")


class TestSyntheticBackend:
    def test_finds_the_three_blobs(self, backend):
        proposals = backend.propose_masks(well_image())
        assert len(proposals) == 3
        areas = sorted(int(m.sum()) for m in proposals)
        assert all(area > 100 for area in areas)

    def test_deterministic_across_instances(self):
        first = get_backend("synthetic").propose_masks(well_image())
        second = get_backend("synthetic", seed=99).propose_masks(well_image())
        assert len(first) == len(second)
        for a, b in zip(first, second):
            assert np.array_equal(a, b)

    def test_blank_image_yields_nothing(self, backend):
        blank = np.full((16, 16), 128, dtype=np.uint8)
        assert backend.propose_masks(blank) == []
        assert backend.detect_boxes(blank, "anything") == []
        assert not backend.prototype_mask(blank, "trained").any()

    def test_point_prompt_selects_containing_component(self, backend):
        image = well_image()
        masks = backend.masks_from_points(image, [(30.0, 40.0), (0.0, 0.0)])
        assert masks[0][30, 40]
        assert not masks[1].any()  # background point gets an empty mask

    def test_box_prompt_selects_largest_inside(self, backend):
        image = well_image()
        masks = backend.masks_from_boxes(image, [(20.0, 14.0, 60.0, 46.0)])
        assert masks[0].any()
        rows, cols = np.nonzero(masks[0])
        assert rows.min() >= 14 and rows.max() < 46
        assert cols.min() >= 20 and cols.max() < 60

    def test_detected_boxes_bound_their_components(self, backend):
        image = well_image()
        for x0, y0, x1, y1, score in backend.detect_boxes(image, "ignored"):
            assert 0 <= x0 < x1 <= image.shape[1]
            assert 0 <= y0 < y1 <= image.shape[0]
            assert 0.0 <= score <= 1.0

    def test_prototype_variants_differ_in_reach(self, backend):
        image = well_image()
        trained = backend.prototype_mask(image, "trained")
        untrained = backend.prototype_mask(image, "untrained")
        # the looser threshold can only add pixels
        assert not (trained & ~untrained).any()
        assert untrained.sum() >= trained.sum()

    def test_unknown_variant_rejected(self, backend):
        with pytest.raises(AdapterError, match="variant"):
            backend.prototype_mask(well_image(), "finetuned")


class TestRealBackendErrors:
    def test_unknown_backend_name(self):
        with pytest.raises(AdapterError, match="unknown backend"):
            get_backend("yolo")

    def test_sam_requires_checkpoint_flag(self):
        with pytest.raises(AdapterError, match="--checkpoint"):
            get_backend("sam")

    def test_sam_missing_checkpoint_file(self, tmp_path):
        missing = tmp_path / "sam_vit_h.pth"
        with pytest.raises(AdapterError, match="not found"):
            get_backend("sam", checkpoint=str(missing))

    def test_gdino_requires_both_paths(self):
        with pytest.raises(AdapterError, match="--checkpoint and --model-config"):
            get_backend("gdino")

    def test_organoid_requires_weights(self):
        with pytest.raises(AdapterError, match="--weights"):
            get_backend("organoid")

    def test_organoid_missing_weights_file(self, tmp_path):
        with pytest.raises(AdapterError, match="not found"):
            get_backend("organoid", weights=str(tmp_path / "model.h5"))
