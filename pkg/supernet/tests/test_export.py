import numpy as np
import pytest

from supernet_sampler.encoding import ToyBackbone, validate_arch
from supernet_sampler.export import LOSS_HEADER, export_loss_samples
from supernet_sampler.train import train_supernet


@pytest.fixture(scope="module")
def checkpoint(tmp_path_factory):
    out = tmp_path_factory.mktemp("ckpt") / "export.pt"
    train_supernet(dataset="digits", epochs=1, seed=0, subset=300, batch_size=16, out=out)
    return out


def test_schema_and_row_count(checkpoint, tmp_path):
    out = tmp_path / "samples.csv"
    assert export_loss_samples(checkpoint, n=25, seed=0, out_path=out) == 25
    lines = out.read_text().splitlines()
    assert lines[0] == LOSS_HEADER
    assert len(lines) == 26
    for line in lines[1:]:
        assert len(line.split(",")) == 17


def test_emitted_rows_are_valid_archs(checkpoint, tmp_path):
    out = tmp_path / "samples.csv"
    export_loss_samples(checkpoint, n=40, seed=1, out_path=out)
    backbone = ToyBackbone()
    for line in out.read_text().splitlines()[1:]:
        vals = [float(t) for t in line.split(",")]
        ratios = tuple(vals[: backbone.total_cells])
        validate_arch(ratios, backbone)  # raises on an invalid arch
        assert all(v == 0.0 for v in vals[backbone.total_cells : 16])
        assert np.isfinite(vals[16])


def test_export_deterministic(checkpoint, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    export_loss_samples(checkpoint, n=10, seed=5, out_path=a)
    export_loss_samples(checkpoint, n=10, seed=5, out_path=b)
    assert a.read_bytes() == b.read_bytes()


def test_n_below_one_rejected(checkpoint, tmp_path):
    with pytest.raises(ValueError):
        export_loss_samples(checkpoint, n=0, seed=0, out_path=tmp_path / "x.csv")
