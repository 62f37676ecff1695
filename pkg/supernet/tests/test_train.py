import numpy as np
import pytest
import torch

from supernet_sampler.data import DatasetError, load_dataset
from supernet_sampler.encoding import ToyBackbone, sample_arch
from supernet_sampler.model import ElasticSupernet
from supernet_sampler.train import evaluate_ce, load_checkpoint, train_supernet


@pytest.fixture(scope="module")
def quick_checkpoint(tmp_path_factory):
    out = tmp_path_factory.mktemp("ckpt") / "quick.pt"
    ckpt = train_supernet(dataset="digits", epochs=1, seed=0, subset=400,
                          batch_size=16, out=out)
    return out, ckpt


def test_every_arch_selects_a_runnable_subnetwork():
    backbone = ToyBackbone()
    model = ElasticSupernet(backbone)
    model.eval()
    x = torch.randn(3, 1, 8, 8)
    rng = np.random.default_rng(1)
    archs = [sample_arch(rng, backbone) for _ in range(10)]
    archs.append(tuple(1.0 for _ in range(8)))
    archs.append((0.5, 0.5, 0.0, 0.0, 0.5, 0.5, 0.0, 0.0))
    with torch.no_grad():
        for ratios in archs:
            logits = model(x, ratios)
            assert logits.shape == (3, backbone.num_classes)
            assert torch.isfinite(logits).all()


def test_smoke_checkpoint_is_loadable(quick_checkpoint):
    path, _ = quick_checkpoint
    model, backbone, meta = load_checkpoint(path)
    assert backbone.total_cells == 8
    assert meta["dataset"] == "digits" and meta["epochs"] == 1
    _, (held_x, held_y), _, _ = load_dataset("digits", subset=meta["subset"])
    ce = evaluate_ce(model, tuple(1.0 for _ in range(8)), held_x, held_y)
    assert np.isfinite(ce)


def test_training_reduces_maximal_subnetwork_ce(quick_checkpoint):
    _, ckpt = quick_checkpoint
    meta = ckpt["metadata"]
    assert meta["final_max_ce"] < meta["initial_max_ce"]


def test_checkpoint_reproducible_for_fixed_seed(tmp_path):
    a = train_supernet(dataset="digits", epochs=1, seed=3, subset=200, batch_size=32)
    b = train_supernet(dataset="digits", epochs=1, seed=3, subset=200, batch_size=32)
    for key, ta in a["state_dict"].items():
        assert torch.equal(ta, b["state_dict"][key]), key
    assert a["metadata"]["final_max_ce"] == b["metadata"]["final_max_ce"]


def test_missing_local_dataset_fails_without_download_flag():
    with pytest.raises(DatasetError):
        load_dataset("cifar10", download=False)


def test_unknown_dataset_rejected():
    with pytest.raises(DatasetError):
        load_dataset("imagenet")
