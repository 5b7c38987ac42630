"""Interop with the ifcm consumer package.

The extractor and the classifier share no code; the pack files and the
class manifest are the whole contract.  These tests read
extractor-written packs with the consumer's reader, train a small model
directly on them, and push every pack through classification.
"""

import os

import numpy as np
import pytest

import ifcm
from ifcm_extractor import ExtractorConfig, extract

PER_CLASS = 6  # must match the corpus fixture in conftest.py


@pytest.fixture(scope="module")
def consumer_packs(extracted):
    _, paths = extracted
    return [ifcm.read_pack(p) for p in paths]


@pytest.fixture(scope="module")
def model(consumer_packs):
    cfg = ifcm.TrainingConfig(
        clusters_per_class=2,
        e_b=5,
        e_q=5,
        mf_shape="triangular",
        superpixels=16,
        seed=0,
    )
    classes = [ifcm.ClassSpec(1, "cls-a"), ifcm.ClassSpec(2, "cls-b")]
    return ifcm.train(consumer_packs, cfg, classes)


class TestReaderInterop:
    def test_consumer_parses_every_pack(self, consumer_packs):
        assert len(consumer_packs) >= 10
        for pack in consumer_packs:
            assert pack.maps.shape == (512, 4, 4)
            assert pack.raster.shape == (3, 64, 64)
            assert np.isfinite(pack.maps).all()
            assert pack.raster.min() >= 0.0 and pack.raster.max() <= 1.0
            assert pack.labels is None
            assert pack.class_id in (1, 2)
        by_class = {cid: 0 for cid in (1, 2)}
        for pack in consumer_packs:
            by_class[pack.class_id] += 1
        assert by_class == {1: PER_CLASS, 2: PER_CLASS}

    def test_consumer_rewrite_preserves_content(self, tmp_path, extracted):
        _, paths = extracted
        pack = ifcm.read_pack(paths[0])
        again = os.path.join(tmp_path, "again.ifp")
        ifcm.write_pack(pack, again)
        back = ifcm.read_pack(again)
        assert back.image_id == pack.image_id
        assert back.class_id == pack.class_id
        np.testing.assert_array_equal(back.maps, pack.maps)
        np.testing.assert_array_equal(back.raster, pack.raster)


class TestClassifyFlow:
    def test_every_pack_classifies(self, consumer_packs, model):
        for pack in consumer_packs:
            decision = ifcm.classify(model, pack)
            assert decision.class_id in (1, 2)
            assert np.isfinite(
                [s for st in decision.result.states for s in (st.mu, st.gamma)]
            ).all()

    def test_explanations_render(self, consumer_packs, model):
        decision = ifcm.classify(model, consumer_packs[0])
        text = ifcm.explain(decision, model).render()
        assert text.strip()

    def test_mismatched_depth_is_flagged(
        self, tmp_path, image_root, model
    ):
        shallow_cfg = ExtractorConfig(
            weights="random", layer="conv3", input_size=64, seed=0
        )
        out = str(tmp_path / "shallow")
        written = extract(
            os.path.join(image_root, "cls-a"), out, shallow_cfg
        )
        pack = ifcm.read_pack(written[0])
        assert pack.maps.shape[0] == 256
        with pytest.raises(ifcm.DimensionMismatchError):
            ifcm.classify(model, pack)


@pytest.mark.skipif(
    "IFCM_CALTECH_DIR" not in os.environ,
    reason="needs a local Caltech-style image tree (set IFCM_CALTECH_DIR) "
    "and downloadable pretrained weights",
)
class TestCaltechSmoke:
    """Accuracy smoke test on real photographs, when available.

    Expects IFCM_CALTECH_DIR to hold one directory per class with at
    least 25 images each; the first four class directories are used,
    15 images to train and 10 to score.
    """

    def test_four_class_accuracy(self, tmp_path):
        root = os.environ["IFCM_CALTECH_DIR"]
        class_dirs = sorted(
            d for d in os.listdir(root)
            if os.path.isdir(os.path.join(root, d))
        )[:4]
        assert len(class_dirs) == 4, "need at least four class directories"

        staged = tmp_path / "images"
        staged.mkdir()
        manifest = tmp_path / "classes.txt"
        with open(manifest, "w", encoding="utf-8") as fh:
            for cid, name in enumerate(class_dirs, start=1):
                fh.write(f"{cid},{name}\n")
                src = os.path.join(root, name)
                images = sorted(os.listdir(src))[:25]
                assert len(images) == 25, f"{name} has fewer than 25 images"
                dst = staged / name
                dst.mkdir()
                for img in images:
                    os.symlink(os.path.join(src, img), dst / img)

        out = str(tmp_path / "packs")
        extract(
            str(staged),
            out,
            ExtractorConfig(weights="pretrained"),
            str(manifest),
        )
        packs = [
            ifcm.read_pack(os.path.join(out, n))
            for n in sorted(os.listdir(out))
        ]
        by_class = {}
        for pack in packs:
            by_class.setdefault(pack.class_id, []).append(pack)
        train_set, test_set = [], []
        for cid in sorted(by_class):
            train_set += by_class[cid][:15]
            test_set += by_class[cid][15:25]

        cfg = ifcm.TrainingConfig(mf_shape="triangular", seed=0)
        classes = ifcm.read_class_manifest(str(manifest))
        model = ifcm.train(train_set, cfg, classes)
        hits = sum(
            ifcm.classify(model, p).class_id == p.class_id for p in test_set
        )
        assert hits / len(test_set) >= 0.70
