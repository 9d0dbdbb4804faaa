import numpy as np
import pytest

from berlu.data import (
    gen_spirals,
    gen_two_moons,
    load_csv,
    load_idx,
    save_csv,
    save_idx,
)


class TestTwoMoons:
    def test_zero_noise_lies_on_unit_half_circles(self):
        ds = gen_two_moons(1000, noise=0.0, seed=1)
        x0 = ds.features[ds.labels == 0]
        x1 = ds.features[ds.labels == 1]
        r0 = np.hypot(x0[:, 0], x0[:, 1])
        r1 = np.hypot(x1[:, 0] - 1.0, x1[:, 1] - 0.5)
        np.testing.assert_allclose(r0, 1.0, atol=1e-12)
        np.testing.assert_allclose(r1, 1.0, atol=1e-12)
        assert (x0[:, 1] >= -1e-12).all()

    def test_deterministic(self):
        a = gen_two_moons(1000, 0.1, seed=7)
        b = gen_two_moons(1000, 0.1, seed=7)
        np.testing.assert_array_equal(a.features, b.features)
        np.testing.assert_array_equal(a.train_idx, b.train_idx)

    def test_class_balance(self):
        ds = gen_two_moons(500, 0.1, seed=0)
        assert (ds.labels == 0).sum() == 250
        assert (ds.labels == 1).sum() == 250

    def test_split_is_disjoint_and_covering(self):
        ds = gen_two_moons(1000, 0.1, seed=0)
        merged = np.sort(np.concatenate([ds.train_idx, ds.val_idx]))
        np.testing.assert_array_equal(merged, np.arange(1000))
        assert len(ds.val_idx) == 200

    def test_validation(self):
        with pytest.raises(ValueError):
            gen_two_moons(2)
        with pytest.raises(ValueError):
            gen_two_moons(101)
        with pytest.raises(ValueError):
            gen_two_moons(100, noise=-0.1)


class TestSpirals:
    def test_zero_noise_radius_linear_in_angle(self):
        ds = gen_spirals(800, turns=2.0, noise=0.0, seed=1)
        arm = ds.features[ds.labels == 0]
        r = np.hypot(arm[:, 0], arm[:, 1])
        # radius normalized to [0, 1] and linear along the arm
        assert r[0] == pytest.approx(0.0, abs=1e-12)
        assert r[-1] == pytest.approx(1.0, abs=1e-12)
        steps = np.diff(r)
        np.testing.assert_allclose(steps, steps[0], atol=1e-12)

    def test_second_arm_is_point_reflection(self):
        ds = gen_spirals(400, noise=0.0, seed=1)
        a0 = ds.features[ds.labels == 0]
        a1 = ds.features[ds.labels == 1]
        np.testing.assert_allclose(a1, -a0, atol=1e-12)

    def test_deterministic_and_balanced(self):
        a = gen_spirals(600, 1.75, 0.05, seed=5)
        b = gen_spirals(600, 1.75, 0.05, seed=5)
        np.testing.assert_array_equal(a.features, b.features)
        assert (a.labels == 0).sum() == 300


class TestIdx:
    def test_hand_crafted_fixture_roundtrip(self, tmp_path):
        # four 2x2 images with known pixel bytes, written by the test itself
        import struct

        img = tmp_path / "img.idx"
        lab = tmp_path / "lab.idx"
        pixels = bytes(range(16))  # 4 images * 4 pixels
        with open(img, "wb") as f:
            f.write(struct.pack(">iiii", 0x00000803, 4, 2, 2))
            f.write(pixels)
        with open(lab, "wb") as f:
            f.write(struct.pack(">ii", 0x00000801, 4))
            f.write(bytes([0, 1, 2, 1]))
        ds = load_idx(img, lab)
        assert ds.features.shape == (4, 4)
        np.testing.assert_allclose(
            ds.features, np.arange(16).reshape(4, 4) / 255.0, atol=1e-15
        )
        np.testing.assert_array_equal(ds.labels, [0, 1, 2, 1])
        assert ds.classes == 3
        assert len(ds.train_idx) == 4 and len(ds.val_idx) == 0

    def test_val_fraction_flag(self, tmp_path):
        img, lab = tmp_path / "i", tmp_path / "l"
        save_idx(np.zeros((10, 4)), np.zeros(10, dtype=int), img, lab, 2, 2)
        ds = load_idx(img, lab, val_fraction=0.2)
        assert len(ds.val_idx) == 2 and len(ds.train_idx) == 8

    def test_wrong_magic(self, tmp_path):
        import struct

        img = tmp_path / "img.idx"
        with open(img, "wb") as f:
            f.write(struct.pack(">iiii", 0x00000801, 1, 2, 2))
            f.write(bytes(4))
        with pytest.raises(ValueError, match="magic mismatch"):
            load_idx(img, img)

    def test_truncated_file(self, tmp_path):
        import struct

        img = tmp_path / "img.idx"
        lab = tmp_path / "lab.idx"
        with open(img, "wb") as f:
            f.write(struct.pack(">iiii", 0x00000803, 4, 2, 2))
            f.write(bytes(7))  # needs 16
        with open(lab, "wb") as f:
            f.write(struct.pack(">ii", 0x00000801, 4))
            f.write(bytes(4))
        with pytest.raises(ValueError, match="truncated"):
            load_idx(img, lab)

    def test_count_mismatch(self, tmp_path):
        import struct

        img = tmp_path / "img.idx"
        lab = tmp_path / "lab.idx"
        with open(img, "wb") as f:
            f.write(struct.pack(">iiii", 0x00000803, 2, 2, 2))
            f.write(bytes(8))
        with open(lab, "wb") as f:
            f.write(struct.pack(">ii", 0x00000801, 3))
            f.write(bytes(3))
        with pytest.raises(ValueError, match="count mismatch"):
            load_idx(img, lab)


class TestCsvInterchange:
    def test_roundtrip_is_value_identical(self, tmp_path):
        ds = gen_two_moons(200, 0.1, seed=2)
        path = tmp_path / "moons.csv"
        save_csv(ds, path)
        back = load_csv(path)
        np.testing.assert_array_equal(back.features, ds.features)
        np.testing.assert_array_equal(back.labels, ds.labels)
        assert back.classes == ds.classes

    def test_header_shape(self, tmp_path):
        ds = gen_spirals(10, noise=0.0, seed=0)
        path = tmp_path / "s.csv"
        save_csv(ds, path)
        header = open(path).readline().strip()
        assert header == "y,x0,x1"

    def test_bad_header_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("a,b,c\n1,2,3\n")
        with pytest.raises(ValueError, match="header"):
            load_csv(path)
